# Services/tree_splitter.py
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from Models.errors import DatasetError
from Models.timetable import Timetable
from Models.transfers import TransferSet
from Models.trees import CUT, NodeKey, PostfixTree, PrefixTree, TreeNode

logger = logging.getLogger(__name__)

PARTITIONS = 64


class CutKind(str, Enum):
    HALVING = "halving"
    CENTRALITY = "centrality"


@dataclass(frozen=True)
class CutStrategy:
    """
    How split_trees picks the cut node of a path.

    ranks maps line id to its position in the centrality order (0 is the
    most central). An empty mapping under CENTRALITY means "compute it
    from the line graph".
    """
    kind: CutKind
    ranks: Mapping[int, int] = field(default_factory=dict)

    @classmethod
    def halving(cls) -> "CutStrategy":
        return cls(CutKind.HALVING)

    @classmethod
    def centrality(cls, order: Sequence[int] = ()) -> "CutStrategy":
        return cls(CutKind.CENTRALITY, {line: rank for rank, line in enumerate(order)})


def build_line_graph(tt: Timetable, ts: TransferSet) -> nx.Graph:
    """Lines as nodes, an edge wherever a transfer connects two different lines."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(tt.lines)))
    if len(ts):
        line_of = np.array([t.line for t in tt.trips], dtype=np.int64)
        pairs = set(zip(line_of[ts.from_trip].tolist(), line_of[ts.to_trip].tolist()))
        graph.add_edges_from((a, b) for a, b in sorted(pairs) if a != b)
    return graph


def line_centrality(graph: nx.Graph) -> Dict[int, float]:
    """Exact unnormalized betweenness; each unordered pair counted once."""
    return nx.betweenness_centrality(graph, normalized=False)


def betweenness_order(graph: nx.Graph) -> List[int]:
    """Lines by descending betweenness, ties by line id."""
    centrality = line_centrality(graph)
    return sorted(graph.nodes, key=lambda line: (-round(centrality[line], 9), line))


def select_cut(path: Sequence[TreeNode], strategy: CutStrategy) -> int:
    """0-based index of the cut node among a path's internal nodes."""
    if not path:
        raise ValueError("cannot cut an empty path")
    if strategy.kind == CutKind.HALVING:
        return math.ceil(len(path) / 2) - 1
    worst = len(strategy.ranks) + 1
    return min(range(len(path)), key=lambda i: (strategy.ranks.get(path[i].line, worst), i))


def partition(stop: int, num_stops: int) -> int:
    return stop * PARTITIONS // num_stops


def final_exit(tt: Timetable, line: int, board: int, dst: int) -> int:
    """Smallest index after board where the line reaches dst, directly or on foot."""
    stops = tt.lines[line].stops
    for i in range(board + 1, len(stops)):
        if stops[i] == dst or tt.footpath(stops[i], dst) is not None:
            return i
    # Only reachable when the trees and the timetable disagree
    raise DatasetError(f"line {line} boarded at {board} never reaches stop {dst}")


def split_trees(
    ptrees: Sequence[PrefixTree],
    tt: Timetable,
    ts: TransferSet,
    strategy: CutStrategy,
) -> Tuple[List[PrefixTree], List[PostfixTree]]:
    """
    Cut every annotated prefix path and move its tail into the
    destination's postfix tree.

    The prefix keeps root..cut and marks the cut node with the destination's
    partition bit. The postfix tree of the destination gets the remaining
    nodes in reverse, ending in a (line, CUT) leaf that carries the exit
    index towards the next line and the source's partition bit. Merged
    leaves keep the largest exit index.
    """
    if strategy.kind == CutKind.CENTRALITY and not strategy.ranks:
        strategy = CutStrategy.centrality(betweenness_order(build_line_graph(tt, ts)))
    num_stops = tt.num_stops
    trimmed = [PrefixTree(root_stop=s) for s in range(num_stops)]
    postfix = [PostfixTree(root_stop=s) for s in range(num_stops)]

    for tree in sorted(ptrees, key=lambda t: t.root_stop):
        src = tree.root_stop
        for node in tree.nodes():
            if not node.destinations:
                continue
            path = node.path()
            c = select_cut(path, strategy)
            cut = trimmed[src].insert_path(n.key for n in path[: c + 1])
            cut.is_cut = True
            tail = [n.key for n in reversed(path[c + 1:])]
            for dst in sorted(node.destinations):
                cut.direction_bits |= 1 << partition(dst, num_stops)
                if c < len(path) - 1:
                    exit_index = path[c + 1].entry_exit
                else:
                    exit_index = final_exit(tt, path[c].line, path[c].index, dst)
                leaf = postfix[dst].insert_path(tail).ensure_child(path[c].line, CUT)
                leaf.is_cut = True
                leaf.entry_exit = max(leaf.entry_exit, exit_index)
                leaf.direction_bits |= 1 << partition(src, num_stops)

    before = sum(t.node_count for t in ptrees)
    after = sum(t.node_count for t in trimmed) + sum(t.node_count for t in postfix)
    logger.info(f"Split trees ({strategy.kind.value}): {before} prefix nodes -> {after} prefix+postfix nodes")
    return trimmed, postfix


def cut_pairs(
    prefix: PrefixTree, postfix: PostfixTree, src: int, dst: int, num_stops: int
) -> List[Tuple[TreeNode, TreeNode]]:
    """
    Matching (prefix cut node, postfix cut leaf) pairs: same line, board
    index below the exit index, and each side carrying the other end's bit.
    Found by sorting both sides by line and sweeping.
    """
    if src == dst:
        return []
    want_dst = 1 << partition(dst, num_stops)
    want_src = 1 << partition(src, num_stops)
    left = sorted(
        (n for n in prefix.cut_nodes() if n.direction_bits & want_dst), key=lambda n: (n.line, n.index)
    )
    right = sorted(
        (n for n in postfix.cut_leaves() if n.direction_bits & want_src), key=lambda n: (n.line, n.exit_index)
    )
    pairs: List[Tuple[TreeNode, TreeNode]] = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i].line < right[j].line:
            i += 1
        elif left[i].line > right[j].line:
            j += 1
        else:
            line = left[i].line
            i_end, j_end = i, j
            while i_end < len(left) and left[i_end].line == line:
                i_end += 1
            while j_end < len(right) and right[j_end].line == line:
                j_end += 1
            for a in left[i:i_end]:
                pairs.extend((a, b) for b in right[j:j_end] if a.index < b.exit_index)
            i, j = i_end, j_end
    return pairs


def tail_keys(leaf: TreeNode) -> List[NodeKey]:
    """Keys from just after the cut up to the postfix root, in travel order."""
    return [node.key for node in leaf.ancestors()]


def recoverable_sequences(
    prefix: PrefixTree, postfix: PostfixTree, src: int, dst: int, num_stops: int
) -> Set[Tuple[NodeKey, ...]]:
    """Line sequences obtainable by joining matching prefix and postfix branches."""
    return {
        tuple([n.key for n in head.path()] + tail_keys(leaf))
        for head, leaf in cut_pairs(prefix, postfix, src, dst, num_stops)
    }


def tree_node_total(trees: Sequence[PrefixTree | PostfixTree]) -> int:
    return sum(t.node_count for t in trees)
