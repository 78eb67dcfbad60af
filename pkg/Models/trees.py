# Models/trees.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

NodeKey = Tuple[int, int]

# Board index of postfix cut leaves; their exit index lives in entry_exit
CUT = -1
NO_EXIT = -1
ROOT_KEY: NodeKey = (-1, -1)


@dataclass
class TreeNode:
    """
    (line, index) node of a prefix or postfix tree.

    index is a board index, except on postfix cut leaves where it is CUT.
    entry_exit is the exit index of the parent's line where this node is
    boarded (prefix trees) or the generalized exit index (postfix cut
    leaves).
    """
    line: int
    index: int
    is_cut: bool = False
    direction_bits: int = 0
    entry_exit: int = NO_EXIT
    destinations: Set[int] = field(default_factory=set)
    children: Dict[NodeKey, "TreeNode"] = field(default_factory=dict)
    parent: Optional["TreeNode"] = field(default=None, compare=False, repr=False)

    @property
    def key(self) -> NodeKey:
        return (self.line, self.index)

    @property
    def exit_index(self) -> int:
        return self.entry_exit

    @property
    def is_root(self) -> bool:
        return self.parent is None

    def child(self, line: int, index: int) -> TreeNode | None:
        return self.children.get((line, index))

    def ensure_child(self, line: int, index: int) -> TreeNode:
        node = self.children.get((line, index))
        if node is None:
            node = TreeNode(line, index, parent=self)
            self.children[(line, index)] = node
        return node

    def sorted_children(self) -> List[TreeNode]:
        return [self.children[k] for k in sorted(self.children)]

    def walk(self) -> Iterator[TreeNode]:
        """Preorder over descendants (self excluded), children by key."""
        stack = list(reversed(self.sorted_children()))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.sorted_children()))

    def path(self) -> List[TreeNode]:
        """Nodes from the root's child down to self."""
        nodes = []
        node: TreeNode | None = self
        while node is not None and not node.is_root:
            nodes.append(node)
            node = node.parent
        return nodes[::-1]

    def ancestors(self) -> Iterator[TreeNode]:
        """Parent, grandparent, ... up to but excluding the root."""
        node = self.parent
        while node is not None and not node.is_root:
            yield node
            node = node.parent


@dataclass
class SearchTree:
    root_stop: int
    root: TreeNode = field(default_factory=lambda: TreeNode(*ROOT_KEY))

    def insert_path(self, keys: Iterable[NodeKey]) -> TreeNode:
        node = self.root
        for line, index in keys:
            node = node.ensure_child(line, index)
        return node

    def nodes(self) -> Iterator[TreeNode]:
        return self.root.walk()

    @property
    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def is_bare(self) -> bool:
        return not self.root.children


@dataclass
class PrefixTree(SearchTree):
    """Condensed one-to-all profile of root_stop; nodes annotated with destinations."""

    def annotated(self, dst: int) -> List[TreeNode]:
        return [node for node in self.nodes() if dst in node.destinations]

    def cut_nodes(self) -> List[TreeNode]:
        return [node for node in self.nodes() if node.is_cut]


@dataclass
class PostfixTree(SearchTree):
    """Reversed path tails ending at root_stop; leaves keyed (line, CUT)."""

    def cut_leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes() if node.is_cut]
