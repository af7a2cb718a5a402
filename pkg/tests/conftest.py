import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modoc.corpus import ingest


def make_record(
    doc_id,
    title="Vocal learning in songbirds",
    authors=("Ada Lovelace",),
    venue="Journal of Avian Neuroscience",
    year=2021,
    abstract="Birds learn songs. They imitate tutors.",
    sections=None,
):
    if sections is None:
        sections = [
            {
                "title": "Introduction",
                "paragraphs": [
                    ["Songbirds acquire song by imitation.", "Tutors shape the outcome."],
                    ["Learning has a critical period."],
                ],
            },
            {
                "title": "Methods",
                "paragraphs": [["We recorded juvenile finches."]],
            },
        ]
    return {
        "id": doc_id,
        "title": title,
        "authors": [{"full_name": a} for a in authors],
        "venue": venue,
        "year": year,
        "abstract": abstract,
        "sections": sections,
    }


def write_corpus(path: Path, records) -> Path:
    path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def mini_corpus_path(tmp_path):
    records = [
        make_record("d1"),
        make_record(
            "d2",
            title="Zebra finch song structure",
            authors=("Richard Hahnloser", "Grace Hopper"),
            venue="Acoustic Communication Letters",
            year=2019,
            abstract="Zebra finch song learning follows motifs. Syllables repeat in order.",
        ),
        make_record(
            "d3",
            title="Corvid problem solving",
            authors=("Alan Turing",),
            venue="Animal Cognition Reports",
            year=None,
            abstract="Corvids solve puzzles. Tools are used in sequence.",
            sections=[
                {
                    "title": "Results",
                    "paragraphs": [["Crows bend wires.", "New Caledonian crows excel."]],
                }
            ],
        ),
    ]
    return write_corpus(tmp_path / "mini.jsonl", records)


@pytest.fixture
def mini_corpus(mini_corpus_path):
    return ingest(mini_corpus_path)
