# Tests/conftest.py
import os

# Innan något importerar settings: ingen körlogg under testerna
os.environ["RECORD_RUNS"] = "false"
os.environ.setdefault("DATABASE_URL", "sqlite://")

import pytest

from Models.timetable import Footpath, RawTrip, Stop, Timetable
from Services.dataset_store import save_dataset
from Services.preprocess import preprocess
from Services.synthetic import SyntheticSpec, generate_timetable
from Services.transfer_precompute import compute_initial_transfers, reduce_transfers

# F1 stop ids
A, B, C, D = 0, 1, 2, 3

SYNTHETIC_SPECS = [
    "kind=grid,stops=16,lines=6,trips=5,seed=1",
    "kind=hub,stops=30,lines=6,trips=4,seed=2",
    "kind=random,stops=20,lines=6,trips=4,seed=3",
]


def make_f1() -> Timetable:
    """
    Four stops A, B (120 s change time), C, D with a 180 s walk C -> D.
    Line 0 runs A -> B (t1 08:00-08:10, t2 09:00-09:10), line 1 runs
    B -> C (u1 08:15-08:30, u2 09:15-09:30).
    """
    stops = [Stop(A, "A"), Stop(B, "B", 120), Stop(C, "C"), Stop(D, "D")]
    trips = [
        RawTrip((A, B), (28800, 29400), (28800, 29400), "t1"),
        RawTrip((A, B), (32400, 33000), (32400, 33000), "t2"),
        RawTrip((B, C), (29700, 30600), (29700, 30600), "u1"),
        RawTrip((B, C), (33300, 34200), (33300, 34200), "u2"),
    ]
    return Timetable.from_raw(stops, [Footpath(C, D, 180)], trips)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the full-size instances too")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def f1():
    return make_f1()


@pytest.fixture(scope="session")
def f1_initial(f1):
    return compute_initial_transfers(f1)


@pytest.fixture(scope="session")
def f1_transfers(f1, f1_initial):
    return reduce_transfers(f1, f1_initial)


@pytest.fixture(scope="session")
def f1_dataset(f1):
    dataset, _ = preprocess(f1)
    return dataset


@pytest.fixture(scope="session")
def f1_dataset_file(f1_dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "f1.tbt"
    save_dataset(path, f1_dataset)
    return path


@pytest.fixture(scope="session", params=SYNTHETIC_SPECS, ids=lambda s: s.split(",")[0].split("=")[1])
def synthetic_dataset(request):
    dataset, _ = preprocess(generate_timetable(SyntheticSpec.from_string(request.param)))
    return dataset


@pytest.fixture
def run_db_url(tmp_path):
    return f"sqlite:///{tmp_path / 'runs.db'}"
