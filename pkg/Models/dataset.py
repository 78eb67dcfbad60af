# Models/dataset.py
from dataclasses import dataclass, field
from typing import Any, Dict, List

from Models.timetable import Timetable
from Models.transfers import TransferSet
from Models.trees import PostfixTree, PrefixTree


@dataclass
class Dataset:
    """
    Everything a query needs: the timetable, the reduced transfers, full
    prefix trees (PT variant), and split prefix plus postfix trees (ST
    variant). meta holds the cut strategy and deterministic build counts.
    """
    timetable: Timetable
    transfers: TransferSet
    prefix_trees: List[PrefixTree]
    split_prefix: List[PrefixTree]
    postfix: List[PostfixTree]
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def strategy(self) -> str:
        return self.meta.get("strategy", "")

    def prefix_node_total(self) -> int:
        return sum(t.node_count for t in self.prefix_trees)

    def split_node_total(self) -> int:
        return sum(t.node_count for t in self.split_prefix) + sum(t.node_count for t in self.postfix)
