# Services/query_engine.py
import logging
from collections import deque
from typing import Deque, Dict, List, Sequence, Set, Tuple

from Models.errors import InvalidRangeError
from Models.query import TARGET, NodeKey, QueryGraph, QueryMode
from Models.timetable import INF, Timetable
from Models.transfers import TransferSet
from Models.trees import PostfixTree, PrefixTree
from Services.pareto import pareto_arrivals, pareto_profile
from Services.query_common import (
    BestArrivals,
    DestinationIndex,
    check_range,
    check_stop,
    departure_groups,
    last_departure_from,
)
from Services.tree_splitter import cut_pairs, tail_keys

logger = logging.getLogger(__name__)

Label = Tuple[int, int, int]  # trip, transfers, departure


def build_query_graph_pt(ptree: PrefixTree, dst: int) -> QueryGraph:
    """Union of the root-to-node paths of every node annotated with dst."""
    graph = QueryGraph()
    if ptree.root_stop == dst:
        return graph
    for node in ptree.annotated(dst):
        graph.add_path(n.key for n in node.path())
    return graph


def build_query_graph_st(
    prefix: PrefixTree, postfix: PostfixTree, src: int, dst: int, num_stops: int
) -> QueryGraph:
    """Join every matching prefix/postfix cut pair into a source-to-target path."""
    graph = QueryGraph()
    for head, leaf in cut_pairs(prefix, postfix, src, dst, num_stops):
        graph.add_path([n.key for n in head.path()] + tail_keys(leaf))
    return graph


class LabelCorrectingSearch:
    """
    FIFO label correction over a query graph.

    A label is (trip, transfers, departure) at a (line, board) node. Only
    labels of the same trip compare: fewer transfers and a later departure
    win. Labels and best arrivals persist between run() calls so profile
    sweeps go latest departure first.
    """

    def __init__(self, qg: QueryGraph, tt: Timetable, ts: TransferSet, dst: int):
        self.qg = qg
        self.tt = tt
        self.ts = ts
        self.best = BestArrivals()
        self.destination = DestinationIndex(tt, dst)
        self.labels: Dict[NodeKey, List[Label]] = {}
        self._hops: Dict[int, Dict[NodeKey, List[Tuple[int, int]]]] = {}
        self.relaxations = 0

    def _hops_of(self, trip: int) -> Dict[NodeKey, List[Tuple[int, int]]]:
        """Reduced transfers leaving trip, grouped by the target's (line, board)."""
        hops = self._hops.get(trip)
        if hops is None:
            hops = {}
            for exit_index in range(1, len(self.tt.trips[trip].stops)):
                for u, j in self.ts.outgoing(trip, exit_index):
                    hops.setdefault((self.tt.trips[u].line, j), []).append((exit_index, u))
            self._hops[trip] = hops
        return hops

    def _insert(self, key: NodeKey, trip: int, n: int, departure: int) -> bool:
        labels = self.labels.setdefault(key, [])
        for t, m, d in labels:
            if t == trip and m <= n and d >= departure:
                return False
        labels[:] = [(t, m, d) for t, m, d in labels if not (t == trip and n <= m and departure >= d)]
        labels.append((trip, n, departure))
        return True

    def run(self, seeds: Sequence[Tuple[NodeKey, int]], departure: int) -> List[Tuple[int, int, int]]:
        found: List[Tuple[int, int, int]] = []
        queue: Deque[Tuple[NodeKey, int, int]] = deque()
        for key, trip in seeds:
            if self._insert(key, trip, 0, departure):
                queue.append((key, trip, 0))

        while queue:
            key, trip, n = queue.popleft()
            board = key[1]
            arrivals = self.tt.trips[trip].arrivals
            if arrivals[board + 1] >= self.best.at(n):
                continue
            arrival = self.destination.arrival(trip, board)
            if arrival < INF and self.best.record(arrival, n):
                found.append((departure, arrival, n))
            hops = self._hops_of(trip)
            for child in self.qg.children(key):
                if child == TARGET:
                    continue
                for exit_index, u in hops.get(child, ()):
                    if exit_index > board and self._insert(child, u, n + 1, departure):
                        self.relaxations += 1
                        queue.append((child, u, n + 1))
        return found


def _root_walks(qg: QueryGraph, tt: Timetable, src: int) -> Dict[NodeKey, int]:
    walks = {}
    for line, board in qg.roots:
        stop = tt.lines[line].stops[board]
        walk = 0 if stop == src else tt.footpath(src, stop)
        if walk is not None:
            walks[(line, board)] = walk
    return walks


def run_query(
    qg: QueryGraph,
    tt: Timetable,
    ts: TransferSet,
    mode: QueryMode,
    src: int,
    dst: int,
    departure: int | None = None,
    edt: int | None = None,
    ldt: int | None = None,
) -> Set[tuple]:
    """
    Earliest-arrival mode returns {(arrival, transfers)}; profile mode
    returns {(departure, arrival, transfers)} for departures in [edt, ldt].
    """
    check_stop(tt, src)
    check_stop(tt, dst)
    if mode == QueryMode.EARLIEST_ARRIVAL and departure is None:
        raise InvalidRangeError("earliest arrival query needs a departure time")
    if mode == QueryMode.PROFILE:
        if edt is None or ldt is None:
            raise InvalidRangeError("profile query needs a departure range")
        check_range(edt, ldt)
    if src == dst or qg.is_empty():
        return set()

    search = LabelCorrectingSearch(qg, tt, ts, dst)
    walks = _root_walks(qg, tt, src)
    if mode == QueryMode.EARLIEST_ARRIVAL:
        seeds = []
        for (line, board), walk in walks.items():
            for trip in tt.trips_from(line, board, departure + walk):
                seeds.append((tt.trips[trip].departures[board], trip, (line, board)))
        found = search.run([(key, trip) for _, trip, key in sorted(seeds)], departure)
        return pareto_arrivals((a, n) for _, a, n in found)

    if ldt < last_departure_from(tt, src):
        logger.warning(
            f"Profile window for stop {src} closes before its last departure; "
            f"tree-based answers can miss journeys that are optimal only inside the window"
        )
    found = []
    for leave, group in departure_groups(tt, src, edt, ldt).items():
        seeds = [((tt.trips[trip].line, j), trip) for trip, j in group if (tt.trips[trip].line, j) in walks]
        found.extend(search.run(seeds, leave))
    logger.debug(f"Profile {src}->{dst}: {search.relaxations} relaxations on graph of size {qg.size}")
    return pareto_profile(found)
