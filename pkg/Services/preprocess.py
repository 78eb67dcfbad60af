# Services/preprocess.py
import logging
import time
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel

from Models.dataset import Dataset
from Models.errors import InvalidTimetableError
from Models.timetable import Timetable
from Models.trees import PrefixTree
from Models.transfers import TransferSet
from Services.prefix_tree_builder import build_prefix_trees
from Services.transfer_precompute import compute_initial_transfers, reduce_transfers
from Services.tree_splitter import (
    CutKind,
    CutStrategy,
    betweenness_order,
    build_line_graph,
    split_trees,
    tree_node_total,
)
from Services.validation import validate_timetable

logger = logging.getLogger(__name__)


class PreprocessReport(BaseModel):
    """
    Build figures of one preprocessing run; timings are wall-clock and
    therefore excluded from the dataset file.
    """
    strategy: str
    threads: int
    stops: int
    trips: int
    lines: int
    initial_transfers: int
    reduced_transfers: int
    removed_fraction: float
    transfer_seconds: float
    avg_prefix_tree_ms: float
    tree_seconds_sequential: float
    tree_seconds_wall: float
    speedup: float
    split_seconds: float
    full_prefix_nodes: int
    split_prefix_nodes: int
    postfix_nodes: int
    avg_nodes_per_stop: float
    dataset_bytes: Optional[int] = None


def split_with(
    tt: Timetable, ts: TransferSet, prefix_trees: List[PrefixTree], kind: CutKind
) -> Tuple[CutStrategy, list, list]:
    if kind == CutKind.CENTRALITY:
        strategy = CutStrategy.centrality(betweenness_order(build_line_graph(tt, ts)))
    else:
        strategy = CutStrategy.halving()
    trimmed, postfix = split_trees(prefix_trees, tt, ts, strategy)
    return strategy, trimmed, postfix


def preprocess(tt: Timetable, kind: CutKind = CutKind.HALVING, threads: int = 1) -> Tuple[Dataset, PreprocessReport]:
    """Validate, compute and reduce transfers, build and split the trees."""
    report = validate_timetable(tt)
    if not report.ok:
        raise InvalidTimetableError(report)

    started = time.perf_counter()
    initial = compute_initial_transfers(tt, threads)
    reduced = reduce_transfers(tt, initial, threads=threads)
    transfer_seconds = time.perf_counter() - started

    started = time.perf_counter()
    prefix_trees, build_seconds = build_prefix_trees(tt, reduced, threads)
    tree_wall = time.perf_counter() - started

    started = time.perf_counter()
    strategy, trimmed, postfix = split_with(tt, reduced, prefix_trees, kind)
    split_seconds = time.perf_counter() - started

    full_nodes = tree_node_total(prefix_trees)
    split_prefix_nodes = tree_node_total(trimmed)
    postfix_nodes = tree_node_total(postfix)
    counts: Dict[str, int] = {
        "stops": tt.num_stops,
        "trips": len(tt.trips),
        "lines": len(tt.lines),
        "initial_transfers": initial.initial_count,
        "reduced_transfers": len(reduced),
        "full_prefix_nodes": full_nodes,
        "split_prefix_nodes": split_prefix_nodes,
        "postfix_nodes": postfix_nodes,
    }
    dataset = Dataset(
        timetable=tt,
        transfers=reduced,
        prefix_trees=prefix_trees,
        split_prefix=trimmed,
        postfix=postfix,
        meta={
            "strategy": strategy.kind.value,
            "counts": counts,
            "ranking": sorted(strategy.ranks, key=strategy.ranks.get) if strategy.ranks else [],
        },
    )
    sequential = sum(build_seconds)
    summary = PreprocessReport(
        strategy=strategy.kind.value,
        threads=threads,
        stops=tt.num_stops,
        trips=len(tt.trips),
        lines=len(tt.lines),
        initial_transfers=initial.initial_count,
        reduced_transfers=len(reduced),
        removed_fraction=reduced.removed_fraction,
        transfer_seconds=transfer_seconds,
        avg_prefix_tree_ms=1000 * sequential / max(tt.num_stops, 1),
        tree_seconds_sequential=sequential + split_seconds,
        tree_seconds_wall=tree_wall + split_seconds,
        speedup=(sequential + split_seconds) / max(tree_wall + split_seconds, 1e-9),
        split_seconds=split_seconds,
        full_prefix_nodes=full_nodes,
        split_prefix_nodes=split_prefix_nodes,
        postfix_nodes=postfix_nodes,
        avg_nodes_per_stop=(split_prefix_nodes + postfix_nodes) / max(tt.num_stops, 1),
    )
    logger.info(
        f"Preprocessed {tt.num_stops} stops: {full_nodes} full prefix nodes, "
        f"{split_prefix_nodes}+{postfix_nodes} split nodes ({strategy.kind.value})"
    )
    return dataset, summary
