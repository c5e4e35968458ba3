from importlib import resources

import pytest

from mpcsp import load_instance
from mpcsp.solver import SolverConfig


def data_path(name: str):
    return resources.files("mpcsp") / "data" / f"{name}.txt"


def load(name: str):
    return load_instance(data_path(name))


@pytest.fixture(scope="session")
def toy1():
    return load("toy1")


@pytest.fixture(scope="session")
def toy2():
    return load("toy2")


@pytest.fixture(scope="session")
def inst1():
    return load("bench1")


@pytest.fixture(scope="session")
def inst2():
    return load("bench2")


@pytest.fixture(scope="session")
def highs():
    pytest.importorskip("highspy")
    return SolverConfig("highs")


MICRO = dict(periods=2, objects=(1, 2), object_dims=(4, 12), items=(1, 3), item_dims=(2, 7), catalogue=(1, 2))


def micro_instance(seed: int):
    """Seeded toy instance within the exhaustive oracle's limits."""
    from mpcsp.instance import GenConfig, generate_instance
    return generate_instance(GenConfig(xi=seed % 3, seed=seed, **MICRO))


@pytest.fixture(scope="session")
def toy1_plan(toy1):
    from mpcsp.oracle import exact_multi_period
    return exact_multi_period(toy1)


# Reference four-period comparison: (objective, cost, leftover value) for the
# myopic and forward-looking methods, the printed gap and the highlighted winner.
FOUR_PERIOD_BLOCK = [
    ((314108050, 9155, 0), (400703843, 11679, 2647), 27.5688, "Loss"),
    ((187422365, 6715, 0), (187422365, 6715, 0), 0.0, "Tie"),
    ((340487089, 8951, 0), (340487089, 8951, 0), 0.0, "Tie"),
    ((309586584, 9677, 0), (309586584, 9677, 0), 0.0, "Tie"),
    ((444536794, 15954, 5462), (182258424, 6541, 0), -59.0004, "Win"),
    ((236240392, 6246, 2066), (148039222, 3914, 0), -37.3353, "Win"),
    ((607520858, 13433, 0), (607520858, 13433, 0), 0.0, "Tie"),
    ((241124382, 12191, 1407), (191042687, 9659, 2674), -20.7701, "Win"),
    ((226123995, 4757, 0), (226123995, 4757, 0), 0.0, "Tie"),
    ((354815285, 10884, 3115), (354815285, 10884, 3115), 0.0, "Tie"),
]
