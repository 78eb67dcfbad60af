# Models/transfers.py
from __future__ import annotations

from functools import cached_property
from typing import Dict, Iterable, Iterator, List, NamedTuple, Tuple

import numpy as np


class Transfer(NamedTuple):
    from_trip: int
    exit_index: int
    to_trip: int
    board_index: int


class TransferSet:
    """
    Transfers t@e → u@b stored column-wise and sorted by
    (from_trip, exit_index, to_trip, board_index).

    initial_count is the size of the unreduced set this one derives from.
    """

    def __init__(
        self,
        from_trip: np.ndarray,
        exit_index: np.ndarray,
        to_trip: np.ndarray,
        board_index: np.ndarray,
        initial_count: int | None = None,
    ):
        columns = [np.asarray(c, dtype=np.int64) for c in (from_trip, exit_index, to_trip, board_index)]
        order = np.lexsort(columns[::-1])
        self.from_trip, self.exit_index, self.to_trip, self.board_index = (c[order] for c in columns)
        self.initial_count = len(order) if initial_count is None else initial_count

    @classmethod
    def from_transfers(cls, transfers: Iterable[Tuple[int, int, int, int]], initial_count: int | None = None) -> "TransferSet":
        rows = np.array(sorted(set(transfers)), dtype=np.int64).reshape(-1, 4)
        return cls(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], initial_count)

    @classmethod
    def empty(cls) -> "TransferSet":
        return cls.from_transfers([])

    def __len__(self) -> int:
        return len(self.from_trip)

    def __iter__(self) -> Iterator[Transfer]:
        for row in zip(
            self.from_trip.tolist(), self.exit_index.tolist(), self.to_trip.tolist(), self.board_index.tolist()
        ):
            yield Transfer(*row)

    def __contains__(self, item: Tuple[int, int, int, int]) -> bool:
        to_trip, board = item[2], item[3]
        return (to_trip, board) in self.outgoing(item[0], item[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransferSet):
            return NotImplemented
        return self.initial_count == other.initial_count and all(
            np.array_equal(a, b)
            for a, b in zip(self.columns(), other.columns())
        )

    def __repr__(self) -> str:
        return f"<TransferSet {len(self)} of {self.initial_count}>"

    def columns(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.from_trip, self.exit_index, self.to_trip, self.board_index

    @cached_property
    def _groups(self) -> Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]]:
        groups: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
        for t, e, u, b in self:
            groups.setdefault((t, e), []).append((u, b))
        return {k: tuple(v) for k, v in groups.items()}

    def outgoing(self, trip: int, exit_index: int) -> Tuple[Tuple[int, int], ...]:
        """(to_trip, board_index) pairs leaving trip at exit_index."""
        return self._groups.get((trip, exit_index), ())

    def subset(self, keep: np.ndarray) -> "TransferSet":
        keep = np.asarray(keep, dtype=bool)
        return TransferSet(
            self.from_trip[keep], self.exit_index[keep], self.to_trip[keep], self.board_index[keep],
            initial_count=self.initial_count,
        )

    def without(self, transfer: Tuple[int, int, int, int]) -> "TransferSet":
        keep = ~(
            (self.from_trip == transfer[0]) & (self.exit_index == transfer[1])
            & (self.to_trip == transfer[2]) & (self.board_index == transfer[3])
        )
        return self.subset(keep)

    @property
    def removed_fraction(self) -> float:
        if not self.initial_count:
            return 0.0
        return 1.0 - len(self) / self.initial_count
