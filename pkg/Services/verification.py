# Services/verification.py
import hashlib
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from Models.dataset import Dataset
from Models.query import Variant
from Models.timetable import DAY
from Services.clock import format_clock
from Services.oracle import oracle_ea, oracle_profile
from Services.preprocess import split_with
from Services.router import answer
from Services.tree_splitter import CutKind, tree_node_total

logger = logging.getLogger(__name__)


class Mismatch(BaseModel):
    mode: str
    src: int
    dst: int
    departure: Optional[int] = None
    window: Optional[Tuple[int, int]] = None
    results: Dict[str, List[List[int]]]

    def reproducer(self, dataset_path: str, digest: str = "") -> str:
        when = (
            f"--dep {format_clock(self.departure)}" if self.window is None
            else f"--profile {format_clock(self.window[0])} {format_clock(self.window[1])}"
        )
        lines = [f"dataset {dataset_path}" + (f" (sha256 {digest})" if digest else "")]
        lines.append(f"query --data {dataset_path} --from {self.src} --to {self.dst} {when} --variant <tb|pt|st>")
        for engine, tuples in sorted(self.results.items()):
            lines.append(f"  {engine:6s} {tuples}")
        return "\n".join(lines)


class VerifyReport(BaseModel):
    ea_queries: int
    profile_queries: int
    passed: bool
    mismatches: List[Mismatch] = []
    warnings: List[str] = []


class VariantTiming(BaseModel):
    variant: str
    mode: str
    queries: int
    mean_us: float
    median_us: float
    graph_size_mean: Optional[float] = None
    graph_build_us_mean: Optional[float] = None
    result_hash: str


class BenchReport(BaseModel):
    strategy: str
    stops: int
    trips: int
    lines: int
    transfers: int
    full_prefix_nodes: int
    split_prefix_nodes: int
    postfix_nodes: int
    dataset_bytes: Optional[int] = None
    rows: List[VariantTiming] = []


class StrategyComparison(BaseModel):
    stops: int
    full_prefix_nodes: int
    halving_nodes: int
    centrality_nodes: int
    centrality_to_halving: float

    @property
    def avg_halving(self) -> float:
        return self.halving_nodes / max(self.stops, 1)

    @property
    def avg_centrality(self) -> float:
        return self.centrality_nodes / max(self.stops, 1)


def profile_window(dataset: Dataset) -> Tuple[int, int]:
    """Window used for random profile queries: the whole schedule."""
    return 0, max(dataset.timetable.last_departure(), 0)


def random_queries(num_stops: int, count: int, seed: int) -> List[Tuple[int, int, int]]:
    rng = np.random.default_rng(seed)
    return [
        (int(rng.integers(0, num_stops)), int(rng.integers(0, num_stops)), int(rng.integers(0, DAY)))
        for _ in range(count)
    ]


def _rows(results) -> List[List[int]]:
    return [list(r) for r in sorted(results)]


def verify_dataset(dataset: Dataset, queries: int, seed: int) -> VerifyReport:
    """Random EA and profile queries; every variant must equal the oracle."""
    tt = dataset.timetable
    report = VerifyReport(ea_queries=queries, profile_queries=queries // 5, passed=True)
    if queries == 0:
        report.warnings.append("no queries requested; verification is vacuous")
        logger.warning("Verify called with 0 queries")
        return report

    window = profile_window(dataset)
    for src, dst, departure in random_queries(tt.num_stops, queries, seed):
        results = {"oracle": oracle_ea(tt, src, dst, departure)}
        for variant in Variant:
            results[variant.value] = answer(dataset, variant, src, dst, departure=departure).results
        if len({frozenset(r) for r in results.values()}) > 1:
            report.mismatches.append(Mismatch(
                mode="ea", src=src, dst=dst, departure=departure,
                results={k: _rows(v) for k, v in results.items()},
            ))

    for src, dst, _ in random_queries(tt.num_stops, queries // 5, seed + 1):
        results = {"oracle": oracle_profile(tt, src, dst, *window)}
        for variant in Variant:
            results[variant.value] = answer(dataset, variant, src, dst, window=window).results
        if len({frozenset(r) for r in results.values()}) > 1:
            report.mismatches.append(Mismatch(
                mode="profile", src=src, dst=dst, window=window,
                results={k: _rows(v) for k, v in results.items()},
            ))

    report.passed = not report.mismatches
    if report.passed:
        logger.info(f"Verified {queries} EA and {queries // 5} profile queries")
    else:
        logger.error(f"Verification failed: {len(report.mismatches)} mismatching queries")
    return report


def results_hash(all_results) -> str:
    digest = hashlib.sha256()
    for results in all_results:
        digest.update(repr(sorted(results)).encode())
    return digest.hexdigest()[:16]


def bench_dataset(dataset: Dataset, queries: int, seed: int, dataset_bytes: Optional[int] = None) -> BenchReport:
    """
    Uniform random source/destination pairs; EA departures uniform on the
    first day, profiles over the whole first day. Queries run sequentially.
    """
    tt = dataset.timetable
    report = BenchReport(
        strategy=dataset.strategy,
        stops=tt.num_stops,
        trips=len(tt.trips),
        lines=len(tt.lines),
        transfers=len(dataset.transfers),
        full_prefix_nodes=dataset.prefix_node_total(),
        split_prefix_nodes=tree_node_total(dataset.split_prefix),
        postfix_nodes=tree_node_total(dataset.postfix),
        dataset_bytes=dataset_bytes,
    )
    sample = random_queries(tt.num_stops, queries, seed)
    for mode in ("ea", "profile"):
        for variant in Variant:
            totals, sizes, builds, outputs = [], [], [], []
            for src, dst, departure in sample:
                if mode == "ea":
                    result = answer(dataset, variant, src, dst, departure=departure)
                else:
                    result = answer(dataset, variant, src, dst, window=(0, DAY))
                totals.append(result.total_seconds * 1e6)
                builds.append(result.graph_seconds * 1e6)
                if result.graph_size is not None:
                    sizes.append(result.graph_size)
                outputs.append(result.results)
            uses_graph = variant != Variant.TB
            report.rows.append(VariantTiming(
                variant=variant.value,
                mode=mode,
                queries=len(sample),
                mean_us=float(np.mean(totals)) if totals else 0.0,
                median_us=float(np.median(totals)) if totals else 0.0,
                graph_size_mean=float(np.mean(sizes)) if uses_graph and sizes else None,
                graph_build_us_mean=float(np.mean(builds)) if uses_graph and builds else None,
                result_hash=results_hash(outputs),
            ))
    return report


def compare_strategies(dataset: Dataset) -> StrategyComparison:
    """Re-split the stored full prefix trees under both cut strategies."""
    tt, ts = dataset.timetable, dataset.transfers
    totals = {}
    for kind in CutKind:
        _, trimmed, postfix = split_with(tt, ts, dataset.prefix_trees, kind)
        totals[kind] = tree_node_total(trimmed) + tree_node_total(postfix)
    return StrategyComparison(
        stops=tt.num_stops,
        full_prefix_nodes=dataset.prefix_node_total(),
        halving_nodes=totals[CutKind.HALVING],
        centrality_nodes=totals[CutKind.CENTRALITY],
        centrality_to_halving=totals[CutKind.CENTRALITY] / max(totals[CutKind.HALVING], 1),
    )
