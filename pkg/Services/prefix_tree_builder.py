# Services/prefix_tree_builder.py
import logging
import time
from typing import Dict, List, Set, Tuple

from Models.timetable import Timetable
from Models.transfers import TransferSet
from Models.trees import NO_EXIT, NodeKey, PrefixTree, TreeNode
from Services.query_common import ReachedIndex, check_stop, departure_groups
from Services.workers import map_shared

logger = logging.getLogger(__name__)


class StopLabelFrontier:
    """Per stop, the Pareto set of (arrival, transfers) labels seen so far."""

    def __init__(self):
        self._labels: Dict[int, List[Tuple[int, int]]] = {}

    def insert(self, stop: int, arrival: int, transfers: int) -> bool:
        """Add the label unless an existing one is at least as good; True if added."""
        labels = self._labels.setdefault(stop, [])
        for a, n in labels:
            if a <= arrival and n <= transfers:
                return False
        labels[:] = [(a, n) for a, n in labels if not (arrival <= a and transfers <= n)]
        labels.append((arrival, transfers))
        return True

    def labels(self, stop: int) -> List[Tuple[int, int]]:
        return sorted(self._labels.get(stop, ()))


class _SearchNode:
    __slots__ = ("trip", "board", "end", "parent", "exit", "stops")

    def __init__(self, trip: int, board: int, end: int, parent: int, exit_index: int):
        self.trip = trip
        self.board = board
        self.end = end
        self.parent = parent
        self.exit = exit_index
        self.stops: Set[int] = set()


def _enqueue(
    nodes: List[_SearchNode], queue: List[int], reached: ReachedIndex,
    trip: int, board: int, n: int, parent: int, exit_index: int,
) -> None:
    end = reached.get(n, trip)
    if board >= end:
        return
    queue.append(len(nodes))
    nodes.append(_SearchNode(trip, board, end, parent, exit_index))
    reached.mark(n, trip, board)


def _merge(tree: PrefixTree, tt: Timetable, nodes: List[_SearchNode]) -> None:
    # A node survives if it or a descendant improved a stop label
    alive = [bool(node.stops) for node in nodes]
    for idx in range(len(nodes) - 1, -1, -1):
        if alive[idx] and nodes[idx].parent >= 0:
            alive[nodes[idx].parent] = True

    placed: Dict[int, TreeNode] = {}
    for idx, node in enumerate(nodes):
        if not alive[idx]:
            continue
        above = tree.root if node.parent < 0 else placed[node.parent]
        merged = above.ensure_child(tt.trips[node.trip].line, node.board)
        merged.destinations |= node.stops
        if node.exit != NO_EXIT:
            merged.entry_exit = max(merged.entry_exit, node.exit)
        placed[idx] = merged


def build_prefix_tree(tt: Timetable, ts: TransferSet, src: int) -> PrefixTree:
    """
    One-to-all profile search from src over every departure, latest first,
    with reached indexes and stop labels kept across departures. Each
    departure's search tree is pruned to the branches that improved a stop
    label and merged into the prefix tree by (line, board index).
    """
    check_stop(tt, src)
    tree = PrefixTree(root_stop=src)
    reached = ReachedIndex(tt)
    frontier = StopLabelFrontier()

    for _departure, seeds in departure_groups(tt, src).items():
        nodes: List[_SearchNode] = []
        queue: List[int] = []
        for trip, board in seeds:
            _enqueue(nodes, queue, reached, trip, board, 0, -1, NO_EXIT)

        n = 0
        while queue:
            upcoming: List[int] = []
            for idx in queue:
                node = nodes[idx]
                trip = tt.trips[node.trip]
                for i in range(node.board + 1, len(trip.stops)):
                    stop, arrival = trip.stops[i], trip.arrivals[i]
                    if stop != src and frontier.insert(stop, arrival, n):
                        node.stops.add(stop)
                    for q, walk in tt.footpaths_from(stop):
                        if q != src and frontier.insert(q, arrival + walk, n):
                            node.stops.add(q)
                for i in range(node.board + 1, node.end + 1):
                    for u, j in ts.outgoing(node.trip, i):
                        _enqueue(nodes, upcoming, reached, u, j, n + 1, idx, i)
            queue = upcoming
            n += 1
        _merge(tree, tt, nodes)
    return tree


def _build_task(shared: Tuple[Timetable, TransferSet], src: int) -> Tuple[PrefixTree, float]:
    tt, ts = shared
    started = time.perf_counter()
    tree = build_prefix_tree(tt, ts, src)
    return tree, time.perf_counter() - started


def build_prefix_trees(tt: Timetable, ts: TransferSet, threads: int = 1) -> Tuple[List[PrefixTree], List[float]]:
    """Prefix trees for every stop in id order, with per-tree build seconds."""
    built = map_shared(_build_task, (tt, ts), list(range(tt.num_stops)), threads)
    trees = [tree for tree, _ in built]
    seconds = [elapsed for _, elapsed in built]
    logger.info(f"Built {len(trees)} prefix trees with {sum(t.node_count for t in trees)} nodes")
    return trees, seconds


def optimal_line_sequences(ptree: PrefixTree, dst: int) -> Set[Tuple[NodeKey, ...]]:
    """Root-to-node paths, as (line, board) keys, of every node annotated with dst."""
    return {tuple(n.key for n in node.path()) for node in ptree.annotated(dst)}
