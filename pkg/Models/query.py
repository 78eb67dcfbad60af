# Models/query.py
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Set, Tuple

NodeKey = Tuple[int, int]

# Anchor keys; real nodes are (line, board_index) with line ≥ 0
SOURCE: NodeKey = (-1, -1)
TARGET: NodeKey = (-2, -2)


class ArrivalTuple(NamedTuple):
    arrival: int
    transfers: int


class ResultTuple(NamedTuple):
    departure: int
    arrival: int
    transfers: int


class QueryMode(str, Enum):
    EARLIEST_ARRIVAL = "ea"
    PROFILE = "profile"


class Variant(str, Enum):
    TB = "tb"
    PT = "pt"
    ST = "st"


@dataclass
class QueryGraph:
    """
    Per-query graph over (line, board_index) nodes between the SOURCE and
    TARGET anchors. Repeated keys collapse onto one node.
    """
    edges: Dict[NodeKey, Set[NodeKey]] = field(default_factory=dict)

    def add_edge(self, a: NodeKey, b: NodeKey) -> None:
        self.edges.setdefault(a, set()).add(b)
        self.edges.setdefault(b, set())

    def add_path(self, keys: Iterable[NodeKey]) -> None:
        previous = SOURCE
        for key in keys:
            self.add_edge(previous, key)
            previous = key
        if previous != SOURCE:
            self.add_edge(previous, TARGET)

    def children(self, key: NodeKey) -> List[NodeKey]:
        return sorted(self.edges.get(key, ()))

    @property
    def roots(self) -> List[NodeKey]:
        return [k for k in self.children(SOURCE) if k != TARGET]

    @property
    def nodes(self) -> Set[NodeKey]:
        return {k for k in self.edges if k not in (SOURCE, TARGET)}

    def edge_set(self) -> Set[Tuple[NodeKey, NodeKey]]:
        return {(a, b) for a, targets in self.edges.items() for b in targets}

    @property
    def num_edges(self) -> int:
        return sum(len(targets) for targets in self.edges.values())

    @property
    def size(self) -> int:
        """Nodes plus edges, anchors excluded from the node count."""
        return len(self.nodes) + self.num_edges

    def is_empty(self) -> bool:
        return not self.nodes

    def contains(self, other: "QueryGraph") -> bool:
        """Every edge (hence every anchor-to-anchor path) of other is in self."""
        return other.edge_set() <= self.edge_set()
