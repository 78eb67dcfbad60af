# Services/tb_query.py
import logging
from typing import List, Sequence, Set, Tuple

from Models.query import ArrivalTuple, ResultTuple
from Models.timetable import INF, Timetable
from Models.transfers import TransferSet
from Services.pareto import pareto_arrivals, pareto_profile
from Services.query_common import (
    BestArrivals,
    DestinationIndex,
    ReachedIndex,
    check_range,
    check_stop,
    departure_groups,
    earliest_seeds,
)

logger = logging.getLogger(__name__)


class TripBasedSearch:
    """
    Breadth-first search over trip segments, one queue per transfer count.

    Reached indexes and best arrivals survive between run() calls, which is
    what makes latest-first profile sweeps valid.
    """

    def __init__(self, tt: Timetable, ts: TransferSet, dst: int):
        self.tt = tt
        self.ts = ts
        self.reached = ReachedIndex(tt)
        self.best = BestArrivals()
        self.destination = DestinationIndex(tt, dst)
        self.segments_scanned = 0

    def _enqueue(self, queue: List[Tuple[int, int, int]], trip: int, board: int, n: int) -> None:
        end = self.reached.get(n, trip)
        if board >= end:
            return
        queue.append((trip, board, end))
        self.reached.mark(n, trip, board)

    def run(self, seeds: Sequence[Tuple[int, int]], departure: int) -> List[Tuple[int, int, int]]:
        """Search from the given first boardings; returns improving (departure, arrival, n)."""
        tt, ts = self.tt, self.ts
        found: List[Tuple[int, int, int]] = []
        queue: List[Tuple[int, int, int]] = []
        for trip, board in seeds:
            self._enqueue(queue, trip, board, 0)

        n = 0
        while queue:
            upcoming: List[Tuple[int, int, int]] = []
            for trip, board, end in queue:
                self.segments_scanned += 1
                arrival = self.destination.arrival(trip, board)
                if arrival < INF and self.best.record(arrival, n):
                    found.append((departure, arrival, n))

                limit = self.best.at(n + 1)
                arrivals = tt.trips[trip].arrivals
                for i in range(board + 1, end + 1):
                    if arrivals[i] >= limit:
                        break
                    for u, j in ts.outgoing(trip, i):
                        if tt.trips[u].arrivals[j + 1] >= limit:
                            continue
                        self._enqueue(upcoming, u, j, n + 1)
            queue = upcoming
            n += 1
        return found


def tb_earliest_arrival(tt: Timetable, ts: TransferSet, src: int, dst: int, departure: int) -> Set[ArrivalTuple]:
    check_stop(tt, src)
    check_stop(tt, dst)
    if src == dst:
        return set()
    search = TripBasedSearch(tt, ts, dst)
    found = search.run(earliest_seeds(tt, src, departure), departure)
    return pareto_arrivals((a, n) for _, a, n in found)


def tb_profile(tt: Timetable, ts: TransferSet, src: int, dst: int, edt: int, ldt: int) -> Set[ResultTuple]:
    check_stop(tt, src)
    check_stop(tt, dst)
    check_range(edt, ldt)
    if src == dst:
        return set()
    search = TripBasedSearch(tt, ts, dst)
    found: List[Tuple[int, int, int]] = []
    for departure, seeds in departure_groups(tt, src, edt, ldt).items():
        found.extend(search.run(seeds, departure))
    logger.debug(f"TB profile {src}->{dst}: {search.segments_scanned} segments, {len(found)} candidates")
    return pareto_profile(found)
