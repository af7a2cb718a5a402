"""Benchmark report: query latency measurements, CSV + rendered figures.

The bench CLI subcommand builds (or loads) an index, replays a batch of
structured queries, and writes three artifacts next to each other: the raw
per-query latencies as CSV, a summary CSV, and a latency histogram PNG.
"""

from __future__ import annotations

import csv
import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .index import Index
from .query import Field, Query, QueryTerm
from .retrieval import discover


@dataclass
class LatencyReport:
    query_count: int
    document_count: int
    build_seconds: float
    latencies_ms: list[float]

    @property
    def median_ms(self) -> float:
        return statistics.median(self.latencies_ms)

    @property
    def p95_ms(self) -> float:
        ordered = sorted(self.latencies_ms)
        rank = max(int(len(ordered) * 0.95) - 1, 0)
        return ordered[rank]

    def summary(self) -> dict:
        return {
            "documents": self.document_count,
            "queries": self.query_count,
            "index_build_seconds": round(self.build_seconds, 3),
            "median_ms": round(self.median_ms, 3),
            "p95_ms": round(self.p95_ms, 3),
            "max_ms": round(max(self.latencies_ms), 3),
        }


def sample_queries(index: Index, count: int, seed: int = 0) -> list[Query]:
    """Structured queries drawn from the index's own vocabulary, so every
    query exercises real postings."""
    rng = random.Random(seed)
    title_tokens = sorted(index.postings["title"])
    abstract_tokens = sorted(index.postings["abstract"])
    if not title_tokens or not abstract_tokens:
        raise ValueError("index has no postings to sample from")
    queries = []
    for _ in range(count):
        terms = [QueryTerm(Field.ANY, rng.choice(abstract_tokens))]
        if rng.random() < 0.5:
            terms.append(QueryTerm(Field.TITLE, rng.choice(title_tokens)))
        if rng.random() < 0.3:
            terms.append(QueryTerm(Field.ANY, rng.choice(abstract_tokens), negated=True))
        year_range = (2000, 2020) if rng.random() < 0.3 else None
        queries.append(Query(terms=tuple(terms), year_range=year_range, limit=20))
    return queries


def measure_latencies(index: Index, queries: list[Query]) -> list[float]:
    latencies = []
    for q in queries:
        started = time.perf_counter()
        discover(index, q)
        latencies.append((time.perf_counter() - started) * 1000.0)
    return latencies


def run_benchmark(
    index: Index, query_count: int = 100, seed: int = 0, build_seconds: float = 0.0
) -> LatencyReport:
    queries = sample_queries(index, query_count, seed=seed)
    return LatencyReport(
        query_count=query_count,
        document_count=len(index),
        build_seconds=build_seconds,
        latencies_ms=measure_latencies(index, queries),
    )


def write_report(report: LatencyReport, out_dir: str | Path) -> dict[str, Path]:
    """Write latencies.csv, summary.csv, and latency_hist.png; returns the
    paths keyed by artifact name."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    latencies_path = out_dir / "latencies.csv"
    with latencies_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["query_index", "latency_ms"])
        for i, value in enumerate(report.latencies_ms):
            writer.writerow([i, f"{value:.4f}"])

    summary_path = out_dir / "summary.csv"
    summary = report.summary()
    with summary_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(sorted(summary))
        writer.writerow([summary[k] for k in sorted(summary)])

    figure_path = out_dir / "latency_hist.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(report.latencies_ms, bins=30, color="#4477aa", edgecolor="white")
    ax.axvline(report.median_ms, color="#228833", linestyle="--",
               label=f"median {report.median_ms:.1f} ms")
    ax.axvline(report.p95_ms, color="#ee6677", linestyle="--",
               label=f"p95 {report.p95_ms:.1f} ms")
    ax.set_xlabel("query latency (ms)")
    ax.set_ylabel("queries")
    ax.set_title(f"structured query latency, {report.document_count} documents")
    ax.legend()
    fig.tight_layout()
    fig.savefig(figure_path, dpi=120)
    plt.close(fig)

    return {"latencies": latencies_path, "summary": summary_path, "figure": figure_path}
