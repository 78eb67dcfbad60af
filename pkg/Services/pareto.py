# Services/pareto.py
from typing import Iterable, Set, Tuple

from Models.query import ArrivalTuple, ResultTuple


def dominates(a: Tuple[int, int, int], b: Tuple[int, int, int]) -> bool:
    """Profile dominance: leaves no earlier, arrives no later, no more transfers."""
    return a != b and a[0] >= b[0] and a[1] <= b[1] and a[2] <= b[2]


def pareto_arrivals(pairs: Iterable[Tuple[int, int]]) -> Set[ArrivalTuple]:
    result = set()
    best = None
    for arrival, transfers in sorted(set(pairs), key=lambda p: (p[1], p[0])):
        if best is None or arrival < best:
            result.add(ArrivalTuple(arrival, transfers))
            best = arrival
    return result


def pareto_profile(triples: Iterable[Tuple[int, int, int]]) -> Set[ResultTuple]:
    candidates = sorted(set(triples), key=lambda t: (-t[0], t[2], t[1]))
    kept = []
    for c in candidates:
        if not any(dominates(k, c) for k in kept):
            kept.append(c)
    return {ResultTuple(*c) for c in kept}


def is_antichain(results: Iterable[Tuple[int, ...]]) -> bool:
    items = list(results)
    if items and len(items[0]) == 2:
        items = [(0, a, n) for a, n in items]
    return not any(dominates(a, b) for a in items for b in items)
