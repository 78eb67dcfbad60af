# Services/router.py
import time
from dataclasses import dataclass
from typing import Optional, Set, Tuple

from Models.dataset import Dataset
from Models.query import QueryGraph, QueryMode, Variant
from Services.query_common import check_stop
from Services.query_engine import build_query_graph_pt, build_query_graph_st, run_query
from Services.tb_query import tb_earliest_arrival, tb_profile


@dataclass
class Answer:
    results: Set[tuple]
    graph_size: Optional[int]
    graph_seconds: float
    search_seconds: float

    @property
    def total_seconds(self) -> float:
        return self.graph_seconds + self.search_seconds


def build_graph(dataset: Dataset, variant: Variant, src: int, dst: int) -> QueryGraph:
    tt = dataset.timetable
    check_stop(tt, src)
    check_stop(tt, dst)
    if variant == Variant.PT:
        return build_query_graph_pt(dataset.prefix_trees[src], dst)
    if variant == Variant.ST:
        return build_query_graph_st(dataset.split_prefix[src], dataset.postfix[dst], src, dst, tt.num_stops)
    raise ValueError(f"variant {variant.value} uses no query graph")


def answer(
    dataset: Dataset,
    variant: Variant,
    src: int,
    dst: int,
    departure: Optional[int] = None,
    window: Optional[Tuple[int, int]] = None,
) -> Answer:
    """Run one earliest-arrival (departure given) or profile (window given) query."""
    tt, ts = dataset.timetable, dataset.transfers
    if variant == Variant.TB:
        started = time.perf_counter()
        if window is None:
            results = tb_earliest_arrival(tt, ts, src, dst, departure)
        else:
            results = tb_profile(tt, ts, src, dst, *window)
        return Answer(results, None, 0.0, time.perf_counter() - started)

    started = time.perf_counter()
    graph = build_graph(dataset, variant, src, dst)
    built = time.perf_counter()
    if window is None:
        results = run_query(graph, tt, ts, QueryMode.EARLIEST_ARRIVAL, src, dst, departure=departure)
    else:
        results = run_query(graph, tt, ts, QueryMode.PROFILE, src, dst, edt=window[0], ldt=window[1])
    return Answer(results, graph.size, built - started, time.perf_counter() - built)
