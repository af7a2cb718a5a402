"""Batch CLI: index, search, align, keyphrases, highlights, parse-query,
import, bench, and serve.

Machine-readable JSON goes to stdout; --pretty switches the read commands to
human tables. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .corpus import Granularity, ingest, split_sentences
from .errors import FileUnreadable, ModocError
from .index import build_index, load_index, save_index
from .query import Query, format_query, parse_natural, parse_structured
from .retrieval import align, discover, highlights, suggest_keyphrases

USAGE_EXIT = 1
DATA_EXIT = 2


class CliParser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; the CLI contract wants 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _emit(payload, pretty_rows=None, pretty=False) -> None:
    if pretty and pretty_rows is not None:
        headers, rows = pretty_rows
        widths = [
            max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
            for i, h in enumerate(headers)
        ]
        line = "  ".join(str(h).ljust(w) for h, w in zip(headers, widths))
        print(line)
        print("  ".join("-" * w for w in widths))
        for row in rows:
            print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
    else:
        print(json.dumps(payload, ensure_ascii=False, indent=2))


def _load_query(args) -> Query:
    q = parse_structured(args.query) if args.query else Query()
    context = getattr(args, "context", None)
    if context:
        q = q.with_context(context)
    if getattr(args, "limit", None):
        q = Query(terms=q.terms, year_range=q.year_range, context_text=q.context_text, limit=args.limit)
    return q.validate()


def cmd_index(args) -> int:
    corpus = ingest(args.corpus)
    started = time.perf_counter()
    index = build_index(corpus)
    build_seconds = time.perf_counter() - started
    save_index(index, args.out)
    _emit(
        {
            "documents": len(index),
            "skipped_records": len(corpus.skipped),
            "fingerprint": index.corpus_fingerprint,
            "build_seconds": round(build_seconds, 3),
            "path": str(args.out),
        }
    )
    for lineno, reason in corpus.skipped:
        print(f"skipped line {lineno}: {reason}", file=sys.stderr)
    return 0


def cmd_search(args) -> int:
    corpus = ingest(args.corpus) if args.corpus else None
    index = load_index(args.index, corpus)
    results = discover(index, _load_query(args))
    payload = [r.to_dict() for r in results]
    _emit(
        {"results": payload},
        pretty_rows=(
            ("rank", "doc_id", "score", "title"),
            [(r.rank, r.doc_id, f"{r.score:.4f}", r.title[:60]) for r in results],
        ),
        pretty=args.pretty,
    )
    return 0


def cmd_align(args) -> int:
    corpus = ingest(args.corpus)
    if args.query_file:
        query_text = Path(args.query_file).read_text(encoding="utf-8").strip()
    else:
        query_text = args.query_text
    hits = align(corpus, query_text, args.doc, Granularity(args.granularity))
    _emit(
        {"hits": [h.to_dict() for h in hits]},
        pretty_rows=(
            ("rank", "score", "text"),
            [(h.rank, f"{h.score:.4f}", h.text[:70]) for h in hits],
        ),
        pretty=args.pretty,
    )
    return 0


def cmd_keyphrases(args) -> int:
    corpus = ingest(args.corpus)
    index = load_index(args.index, corpus) if args.index else build_index(corpus)
    q = _load_query(args)
    pool = Query(terms=q.terms, year_range=q.year_range, context_text=q.context_text, limit=100)
    results = discover(index, pool)
    phrases = suggest_keyphrases(index, corpus, results, q)
    _emit(
        {"keyphrases": [p.to_dict() for p in phrases]},
        pretty_rows=(
            ("phrase", "score"),
            [(p.phrase, f"{p.score:.4f}") for p in phrases],
        ),
        pretty=args.pretty,
    )
    return 0


def cmd_highlights(args) -> int:
    corpus = ingest(args.corpus)
    hits = highlights(corpus, args.doc, k=args.k)
    _emit(
        {"hits": [h.to_dict() for h in hits]},
        pretty_rows=(
            ("rank", "score", "sentence"),
            [(h.rank, f"{h.score:.4f}", h.text[:70]) for h in hits],
        ),
        pretty=args.pretty,
    )
    return 0


def cmd_parse_query(args) -> int:
    q = parse_natural(args.text)
    _emit({"query": q.to_dict(), "canonical": format_query(q)})
    return 0


def cmd_import(args) -> int:
    """Convert records whose paragraphs are plain strings into the pre-split
    corpus format using the explicit regex splitter."""
    raw_path = Path(args.input)
    try:
        raw_lines = raw_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FileUnreadable(f"cannot read {raw_path}: {exc}") from exc

    converted, bad = [], 0
    for lineno, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            bad += 1
            print(f"skipped line {lineno}: invalid JSON", file=sys.stderr)
            continue
        for section in record.get("sections", []):
            section["paragraphs"] = [
                split_sentences(p) if isinstance(p, str) else p
                for p in section.get("paragraphs", [])
            ]
        converted.append(record)

    out_path = Path(args.out)
    out_path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in converted) + "\n",
        encoding="utf-8",
    )
    corpus = ingest(out_path)  # validate what we just wrote
    _emit({"documents": len(corpus), "skipped_json_lines": bad, "path": str(out_path)})
    return 0


def cmd_bench(args) -> int:
    from .reporting import run_benchmark, write_report

    corpus = ingest(args.corpus)
    started = time.perf_counter()
    index = build_index(corpus)
    build_seconds = time.perf_counter() - started
    report = run_benchmark(index, query_count=args.queries, seed=args.seed, build_seconds=build_seconds)
    paths = write_report(report, args.out_dir)
    _emit({"summary": report.summary(), "artifacts": {k: str(v) for k, v in paths.items()}})
    return 0


def cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(corpus_path=args.corpus, index_path=args.index)
    if args.port is not None:
        config.port = args.port
    if args.data_dir is not None:
        config.data_dir = args.data_dir
    if args.host is not None:
        config.host = args.host
    serve(config)
    return 0


def build_parser() -> CliParser:
    parser = CliParser(prog="modoc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and persist an index", parents=[])
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("search", help="literature discovery")
    p.add_argument("--index", required=True)
    p.add_argument("--corpus", help="verify the index fingerprint against this corpus")
    p.add_argument("--query", help="structured query string")
    p.add_argument("--context", help="semantic context text")
    p.add_argument("--limit", type=int)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("align", help="rank units of a document against a query text")
    p.add_argument("--corpus", required=True)
    p.add_argument("--doc", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--query-text")
    group.add_argument("--query-file")
    p.add_argument(
        "--granularity", choices=["sentence", "paragraph", "section"], default="sentence"
    )
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=cmd_align)

    p = sub.add_parser("keyphrases", help="suggest keyphrases for a query's top results")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index")
    p.add_argument("--query", required=True)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=cmd_keyphrases)

    p = sub.add_parser("highlights", help="extractive sentence highlights")
    p.add_argument("--corpus", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(fn=cmd_highlights)

    p = sub.add_parser("parse-query", help="rule-based natural query parsing")
    p.add_argument("--text", required=True)
    p.set_defaults(fn=cmd_parse_query)

    p = sub.add_parser("import", help="split raw paragraph strings into corpus sentences")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_import)

    p = sub.add_parser("bench", help="latency benchmark with CSV + figure report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="bench-report")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index")
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--data-dir")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ModocError as exc:
        print(
            json.dumps({"error": {"code": exc.code, "message": exc.message}}),
            file=sys.stderr,
        )
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
