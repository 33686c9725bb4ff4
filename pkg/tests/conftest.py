import json
from pathlib import Path

import pytest
from hypothesis import settings

from shortlist_strat import Election, UtilityProfile

settings.register_profile("default", deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"
NAMES = ("b1", "b2", "m1", "m2", "o1", "o2")
B1, B2, M1, M2, O1, O2 = range(6)


def ids(*names):
    return frozenset(NAMES.index(n) for n in names)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def jury():
    """Seven jurors: three put the operas first, four back b1 and m1."""
    return Election.build([((O1, O2, B1, B2, M1, M2), 3), ((B1, M1, B2, M2, O1, O2), 4)], names=NAMES)


@pytest.fixture
def three_voters():
    return Election.build([((O1, O2, M1, M2, B1, B2), 2), ((M2, M1, B2, B1, O1, O2), 1)], names=NAMES)


@pytest.fixture
def two_manipulators():
    return UtilityProfile([[10, 5, 4, 0, 0, 0], [1, 2, 5, 7, 0, 0]])


def load(name):
    return json.loads((DATA / name).read_text())


def random_instances(seed, count, max_m=6, max_n=5, max_r=3, max_ell=3, max_k=4, max_u=3):
    """Small random (election, profile, ell, k, lex order) tuples for oracle comparisons."""
    import random

    from shortlist_strat.oracle import RandomSpec, gen_random

    rng = random.Random(seed)
    for _ in range(count):
        m = rng.randint(3, max_m)
        ell = rng.randint(1, min(max_ell, m - 1))
        k = rng.randint(1, min(max_k, m - 1))
        spec = RandomSpec(m, rng.randint(0, max_n), rng.randint(1, max_r), ell, k, max_u,
                          rng.getrandbits(32))
        election, profile = gen_random(spec)
        order = list(range(m))
        rng.shuffle(order)
        yield election, profile, ell, k, tuple(order)
