import numpy as np
import pytest

from everwill import CarrierRoster, GoldenState, GoodState, PrimitiveState, Society


@pytest.fixture
def society2():
    """Two persons, one good, tie strength 0.5."""
    return Society(2, 1, [[1.0, 0.5], [0.5, 1.0]])


@pytest.fixture
def society2x2():
    """Two persons, two goods."""
    return Society(2, 2, [[1.0, 0.5], [0.5, 1.0]])


@pytest.fixture
def society3x2():
    """Three persons, two goods; ties satisfy every axiom."""
    rel = [
        [1.0, 0.5, 0.4],
        [0.5, 1.0, 0.8],
        [0.4, 0.8, 1.0],
    ]
    return Society(3, 2, rel)


@pytest.fixture
def primitive_state_2x2():
    """Valid primitive state on society2x2 with distinct forces."""
    return PrimitiveState(
        assignment=[0, 1],
        power=[1.0, 2.0],
        force=[[0.3, 0.2], [0.1, 0.4]],
    )


def make_good_state(society: Society, power=0.9, force=0.2) -> GoodState:
    shape = (society.persons, society.estate, society.persons)
    return GoodState(
        assignment=np.arange(society.estate) % society.persons,
        power=np.full(shape, power),
        force=np.full(shape, force),
    )


def make_roster(count=4, intensity=1.0, max_idle=2) -> CarrierRoster:
    return CarrierRoster(
        np.full(count, intensity, dtype=float),
        np.full(count, max_idle, dtype=np.int64),
    )


def make_golden_state(society: Society, roster: CarrierRoster, exercised=None) -> GoldenState:
    cells = society.persons * society.estate * society.persons
    idx = np.arange(roster.count) % cells
    location = np.stack(
        [
            idx // (society.estate * society.persons),
            (idx // society.persons) % society.estate,
            idx % society.persons,
        ],
        axis=1,
    )
    if exercised is None:
        exercised = np.zeros(roster.count, dtype=bool)
    return GoldenState(
        assignment=np.arange(society.estate) % society.persons,
        location=location,
        idle=np.zeros(roster.count, dtype=np.int64),
        exercised=exercised,
    )
