# Services/synthetic.py
import logging
import math
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, conint

from Models.errors import SyntheticSpecError
from Models.timetable import DAY, Footpath, RawTrip, Stop, Timetable

logger = logging.getLogger(__name__)


class SyntheticKind(str, Enum):
    GRID = "grid"
    HUB = "hub"
    RANDOM = "random"


_KIND_ALIASES = {"hub-and-spoke": "hub", "hub_and_spoke": "hub", "uniform": "random"}


class SyntheticSpec(BaseModel):
    """
    Generator settings; equal settings always yield the same timetable.

    Attributes:
        kind: grid (lattice rows/columns), hub (trunk through the hubs, feeder branches) or random
        stops: Number of stops
        lines: Number of routes to lay out
        trips: Trips per route
        seed: Random seed
    """
    kind: SyntheticKind = SyntheticKind.GRID
    stops: conint(ge=4) = 100
    lines: conint(ge=1) = 20
    trips: conint(ge=1) = 30
    seed: int = 0

    @classmethod
    def from_string(cls, text: str) -> "SyntheticSpec":
        """Parse 'kind=grid,stops=100,lines=20,trips=30,seed=7'."""
        fields: Dict[str, str] = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            if not sep:
                raise SyntheticSpecError(f"expected key=value in synthetic spec, got {part!r}")
            fields[key.strip()] = value.strip()
        if "kind" in fields:
            fields["kind"] = _KIND_ALIASES.get(fields["kind"], fields["kind"])
        return cls(**fields)

    def label(self) -> str:
        return f"kind={self.kind.value},stops={self.stops},lines={self.lines},trips={self.trips},seed={self.seed}"


def _grid_routes(spec: SyntheticSpec, rng: np.random.Generator) -> List[List[int]]:
    width = math.ceil(math.sqrt(spec.stops))
    height = math.ceil(spec.stops / width)
    candidates = []
    for r in range(height):
        row = [r * width + c for c in range(width) if r * width + c < spec.stops]
        candidates += [row, row[::-1]]
    for c in range(width):
        column = [r * width + c for r in range(height) if r * width + c < spec.stops]
        candidates += [column, column[::-1]]
    candidates = [route for route in candidates if len(route) >= 2]
    order = rng.permutation(len(candidates))
    routes = []
    for k in range(spec.lines):
        route = candidates[int(order[k % len(order)])]
        if k >= len(order):
            # Second pass: partial runs so repeated corridors get distinct lines
            cut = int(rng.integers(0, max(1, len(route) - 2)))
            route = route[cut:]
        routes.append(route)
    return routes


def _hub_layout(spec: SyntheticSpec, rng: np.random.Generator) -> Tuple[List[int], List[List[int]]]:
    """Hub stops, and the spokes of each feeder branch from its outer end inwards."""
    hubs = list(range(max(2, spec.stops // 25)))
    spokes = rng.permutation(np.arange(len(hubs), spec.stops))
    feeders = max(spec.lines - 2, 0)
    branches = min(max(1, math.ceil(feeders / 2)), len(spokes))
    return hubs, [[int(s) for s in part] for part in np.array_split(spokes, branches)]


def _hub_routes(spec: SyntheticSpec, rng: np.random.Generator) -> List[List[int]]:
    """
    Two trunk routes through every hub, one per direction, then feeder
    routes in pairs: a branch's spokes into its hub, and back out again.
    Branch k hangs off hub k mod the hub count.
    """
    hubs, branches = _hub_layout(spec, rng)
    routes = [hubs, hubs[::-1]][: spec.lines]
    for k in range(spec.lines - len(routes)):
        branch = (k // 2) % len(branches)
        spokes, hub = branches[branch], hubs[branch % len(hubs)]
        routes.append(spokes + [hub] if k % 2 == 0 else [hub] + spokes[::-1])
    return routes


def _random_routes(spec: SyntheticSpec, rng: np.random.Generator) -> List[List[int]]:
    routes = []
    for _ in range(spec.lines):
        length = int(rng.integers(4, min(11, spec.stops + 1)))
        routes.append([int(s) for s in rng.choice(spec.stops, size=length, replace=False)])
    return routes


def _branch_walks(rng: np.random.Generator, routes: List[List[int]]) -> Dict[Tuple[int, int], int]:
    # Only between neighbouring spokes of one branch; hubs and branches stay apart
    hubs = set(routes[0]) if routes else set()
    walks: Dict[Tuple[int, int], int] = {}
    for route in routes[2:]:
        for a, b in zip(route, route[1:]):
            if a in hubs or b in hubs or rng.random() >= 0.3:
                continue
            walks[(a, b)] = walks[(b, a)] = int(rng.integers(120, 901))
    return walks


def _footpaths(spec: SyntheticSpec, rng: np.random.Generator, routes: List[List[int]]) -> List[Footpath]:
    if spec.kind == SyntheticKind.HUB:
        walks = _branch_walks(rng, routes)
    else:
        walks = _random_walks(spec, rng)
    return [Footpath(a, b, d) for (a, b), d in sorted(walks.items())]


def _random_walks(spec: SyntheticSpec, rng: np.random.Generator) -> Dict[Tuple[int, int], int]:
    walks: Dict[Tuple[int, int], int] = {}
    for a in range(spec.stops):
        if rng.random() < 0.2:
            b = int(rng.integers(0, spec.stops))
            if b != a:
                walks[(a, b)] = int(rng.integers(120, 901))
                if rng.random() < 0.5:
                    walks[(b, a)] = int(rng.integers(120, 901))
    return walks


def generate_timetable(spec: SyntheticSpec) -> Timetable:
    rng = np.random.default_rng(spec.seed)
    route_builder = {
        SyntheticKind.GRID: _grid_routes,
        SyntheticKind.HUB: _hub_routes,
        SyntheticKind.RANDOM: _random_routes,
    }[spec.kind]
    routes = route_builder(spec, rng)
    prefix = spec.kind.value[0].upper()
    stops = [Stop(i, f"{prefix}{i}", int(rng.choice([0, 60, 120, 180]))) for i in range(spec.stops)]

    raw_trips: List[RawTrip] = []
    for r, route in enumerate(routes):
        hops = rng.integers(60, 301, size=len(route) - 1)
        dwell = int(rng.integers(0, 31))
        first = int(rng.integers(5 * 3600, 8 * 3600))
        headway = int(rng.choice([600, 900, 1200, 1800]))
        for k in range(spec.trips):
            # Occasional express runs overtake their predecessor and split the route into lines
            scale = 0.75 if rng.random() < 0.1 else 1.0
            t = first + k * headway
            arrivals, departures = [t], [t]
            for i, hop in enumerate(hops, start=1):
                t = departures[-1] + int(hop * scale)
                arrivals.append(t)
                departures.append(t + dwell if i < len(route) - 1 else t)
            raw_trips.append(RawTrip(tuple(route), tuple(arrivals), tuple(departures), f"R{r}-{k}"))

    num_days = 2 if any(t.departures[-1] >= DAY for t in raw_trips) else 1
    tt = Timetable.from_raw(stops, _footpaths(spec, rng, routes), raw_trips, num_days)
    logger.info(f"Generated {spec.label()}: {tt}")
    return tt
