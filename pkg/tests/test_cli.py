import json
import subprocess
import sys

import pytest

from modoc.cli import main

from conftest import make_record, write_corpus


@pytest.fixture
def corpus_path(mini_corpus_path):
    return str(mini_corpus_path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIndexCommand:
    def test_creates_index_file(self, capsys, corpus_path, tmp_path):
        out = tmp_path / "mini.idx"
        code, stdout, _ = run_cli(capsys, "index", "--corpus", corpus_path, "--out", str(out))
        assert code == 0
        assert out.exists()
        assert json.loads(stdout)["documents"] == 3

    def test_duplicate_id_data_error(self, capsys, tmp_path):
        path = write_corpus(tmp_path / "dup.jsonl", [make_record("d1"), make_record("d1")])
        code, _, stderr = run_cli(
            capsys, "index", "--corpus", str(path), "--out", str(tmp_path / "x.idx")
        )
        assert code == 2
        assert json.loads(stderr)["error"]["code"] == "DuplicateId"


class TestSearchCommand:
    def test_search_stable_across_runs(self, capsys, corpus_path, tmp_path):
        index_path = str(tmp_path / "mini.idx")
        run_cli(capsys, "index", "--corpus", corpus_path, "--out", index_path)

        argv = ["search", "--index", index_path, "--query", 'Title:"vocal learning"', "--limit", "5"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2
        results = json.loads(out1)["results"]
        assert len(results) <= 5
        assert results[0]["doc_id"] == "d1"

    def test_fingerprint_checked_when_corpus_given(self, capsys, corpus_path, tmp_path):
        index_path = str(tmp_path / "mini.idx")
        run_cli(capsys, "index", "--corpus", corpus_path, "--out", index_path)
        other = write_corpus(tmp_path / "other.jsonl", [make_record("zz")])
        code, _, stderr = run_cli(
            capsys, "search", "--index", index_path, "--corpus", str(other), "--query", "x"
        )
        assert code == 2
        assert json.loads(stderr)["error"]["code"] == "IndexCorpusMismatch"

    def test_pretty_table(self, capsys, corpus_path, tmp_path):
        index_path = str(tmp_path / "mini.idx")
        run_cli(capsys, "index", "--corpus", corpus_path, "--out", index_path)
        code, out, _ = run_cli(
            capsys, "search", "--index", index_path, "--query", "learning", "--pretty"
        )
        assert code == 0
        assert "rank" in out.splitlines()[0]

    def test_malformed_query_data_error(self, capsys, corpus_path, tmp_path):
        index_path = str(tmp_path / "mini.idx")
        run_cli(capsys, "index", "--corpus", corpus_path, "--out", index_path)
        code, _, stderr = run_cli(
            capsys, "search", "--index", index_path, "--query", "Year:2024..2020"
        )
        assert code == 2
        assert json.loads(stderr)["error"]["code"] == "MalformedYearRange"


class TestAlignCommand:
    def test_verbatim_query_file(self, capsys, corpus_path, tmp_path):
        query_file = tmp_path / "q.txt"
        query_file.write_text("Tutors shape the outcome.\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys,
            "align",
            "--corpus", corpus_path,
            "--doc", "d1",
            "--query-file", str(query_file),
            "--granularity", "sentence",
        )
        assert code == 0
        top = json.loads(out)["hits"][0]
        assert top["rank"] == 1
        assert abs(top["score"] - 1.0) < 1e-6


class TestKeyphrasesCommand:
    def test_keyphrases_respect_contract(self, capsys, corpus_path):
        code, out, _ = run_cli(
            capsys, "keyphrases", "--corpus", corpus_path, "--query", "learning"
        )
        assert code == 0
        phrases = json.loads(out)["keyphrases"]
        assert 0 < len(phrases) <= 5
        assert all("learning" not in p["phrase"].split() for p in phrases)


class TestHighlightsCommand:
    def test_highlights(self, capsys, corpus_path):
        code, out, _ = run_cli(capsys, "highlights", "--corpus", corpus_path, "--doc", "d1", "-k", "2")
        assert code == 0
        assert len(json.loads(out)["hits"]) == 2


class TestParseQueryCommand:
    def test_natural_parse(self, capsys):
        code, out, _ = run_cli(
            capsys, "parse-query", "--text", "papers by Richard Hahnloser from 2020 to 2024"
        )
        assert code == 0
        assert json.loads(out)["canonical"] == 'Author.FullName:"Richard Hahnloser" Year:2020..2024'


class TestImportCommand:
    def test_splitter_applied_only_here(self, capsys, tmp_path):
        raw = make_record("d1", sections=[
            {"title": "S", "paragraphs": ["First point. Second point? Third."]}
        ])
        raw_path = tmp_path / "raw.jsonl"
        raw_path.write_text(json.dumps(raw) + "\n", encoding="utf-8")
        out_path = tmp_path / "clean.jsonl"
        code, out, _ = run_cli(
            capsys, "import", "--input", str(raw_path), "--out", str(out_path)
        )
        assert code == 0
        record = json.loads(out_path.read_text(encoding="utf-8").splitlines()[0])
        assert record["sections"][0]["paragraphs"][0] == [
            "First point.",
            "Second point?",
            "Third.",
        ]


class TestBenchCommand:
    def test_writes_csv_and_figure(self, capsys, corpus_path, tmp_path):
        out_dir = tmp_path / "report"
        code, out, _ = run_cli(
            capsys,
            "bench",
            "--corpus", corpus_path,
            "--queries", "10",
            "--out-dir", str(out_dir),
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["summary"]["queries"] == 10
        assert (out_dir / "latencies.csv").exists()
        assert (out_dir / "summary.csv").exists()
        assert (out_dir / "latency_hist.png").exists()
        header = (out_dir / "latency_hist.png").read_bytes()[:8]
        assert header == b"\x89PNG\r\n\x1a\n"


class TestUsageErrors:
    def test_unknown_flag_exits_one(self, corpus_path):
        result = subprocess.run(
            [sys.executable, "-m", "modoc.cli", "search", "--bogus"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 1
        assert "usage" in result.stderr.lower()

    def test_missing_subcommand_exits_one(self):
        result = subprocess.run(
            [sys.executable, "-m", "modoc.cli"], capture_output=True, text=True
        )
        assert result.returncode == 1

    def test_console_script_entry_point(self, corpus_path):
        result = subprocess.run(
            ["modoc", "parse-query", "--text", "finch song"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert json.loads(result.stdout)["canonical"] == '"finch" "song"'
