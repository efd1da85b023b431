import json

import numpy as np
import pytest

from mobeq.citydata import bundled_city, bundled_controls_dict, controls_from_dict
from mobeq.model import GameInstance, UNBOUNDED


@pytest.fixture(scope="session")
def boston_city():
    return bundled_city("boston")


@pytest.fixture(scope="session")
def nominal_dict():
    return bundled_controls_dict("boston")


@pytest.fixture()
def nominal_controls(boston_city, nominal_dict):
    return controls_from_dict(json.loads(json.dumps(nominal_dict)), boston_city)


def make_random_instance(rng: np.random.RandomState) -> GameInstance:
    """Small random instance with mode 0 unbounded, consistent totals."""
    n = rng.randint(2, 5)
    k = rng.randint(1, 4)
    m = rng.randint(2, 5)
    d = rng.rand(n, n, k) * 50.0
    d[d < 15.0] = 0.0  # sprinkle structural zeros
    for i in range(n):
        d[i, i, :] = 0.0
    c = rng.rand(n, n, k, m) * 10.0
    cap = rng.rand(n, m) * 40.0
    cap[:, 0] = UNBOUNDED
    return GameInstance(
        n_zones=n,
        n_modes=m,
        n_populations=k,
        cost=c,
        fare=np.zeros((n, n, m)),
        demand=d,
        capacity=cap,
        travel_time=np.zeros((n, n, m)),
        distance=np.zeros((n, n)),
        population_sizes=d.sum(axis=(0, 1)),
    )


def random_feasible_configuration(inst: GameInstance, rng: np.random.RandomState) -> np.ndarray:
    """Sample a feasible split: random mode weights clipped by remaining
    capacity, with walking absorbing whatever is left."""
    x = np.zeros((inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes))
    remaining = inst.capacity.copy()
    triples = inst.demand_triples()
    order = rng.permutation(len(triples))
    for idx in order:
        i, j, k = triples[idx]
        d = inst.demand[i, j, k]
        left = 1.0
        for m in rng.permutation(inst.n_modes - 1) + 1:
            want = rng.rand() * left
            cap_left = remaining[i, m]
            take = want if cap_left == UNBOUNDED else min(want, max(cap_left, 0.0) / d)
            x[i, j, k, m] = take
            if cap_left != UNBOUNDED:
                remaining[i, m] -= take * d
            left -= take
        x[i, j, k, 0] = left  # walking takes the remainder
    return x
