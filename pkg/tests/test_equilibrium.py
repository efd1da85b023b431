import math

import numpy as np
import pytest

from conftest import make_random_instance
from mobeq.equilibrium import (
    Configuration,
    check_feasible,
    solve_equilibrium,
    verify_nash,
)
from mobeq.model import GameInstance, UNBOUNDED


def single_od_instance(walk_cost=10.0, bus_cost=4.0, bus_cap=60.0, demand=100.0):
    """One OD pair, one population: bus vs walk."""
    n, k, m = 2, 1, 2
    cost = np.zeros((n, n, k, m))
    cost[0, 1, 0, 0] = walk_cost
    cost[0, 1, 0, 1] = bus_cost
    d = np.zeros((n, n, k))
    d[0, 1, 0] = demand
    cap = np.zeros((n, m))
    cap[:, 0] = UNBOUNDED
    cap[0, 1] = bus_cap
    return GameInstance(
        n_zones=n, n_modes=m, n_populations=k,
        cost=cost, fare=np.zeros((n, n, m)), demand=d, capacity=cap,
        travel_time=np.zeros((n, n, m)), distance=np.zeros((n, n)),
        population_sizes=np.array([demand]),
    )


def enumerate_bus_walk_optimum(walk_cost, bus_cost, bus_cap, demand):
    """Independent oracle: exhaustively try every integer bus load."""
    best_load, best_obj = None, math.inf
    for load in range(int(bus_cap) + 1):
        obj = load * bus_cost + (demand - load) * walk_cost
        if obj < best_obj:
            best_load, best_obj = load, obj
    return best_load, best_obj


# Frozen from the enumeration oracle above: bus is cheaper, so the
# optimum fills all 60 bus seats and walks the remaining 40.
ENUMERATED_BUS_LOAD = 60
ENUMERATED_OBJECTIVE = 640.0


class TestHandEnumerableInstance:
    def test_enumeration_oracle_agrees_with_frozen_values(self):
        load, obj = enumerate_bus_walk_optimum(10.0, 4.0, 60, 100)
        assert (load, obj) == (ENUMERATED_BUS_LOAD, ENUMERATED_OBJECTIVE)

    def test_sixty_forty_split(self):
        inst = single_od_instance()
        cfg, stats = solve_equilibrium(inst)
        assert stats.objective == ENUMERATED_OBJECTIVE
        assert cfg.x[0, 1, 0, 1] * 100.0 == pytest.approx(ENUMERATED_BUS_LOAD, abs=1e-12)
        assert cfg.x[0, 1, 0, 0] * 100.0 == pytest.approx(40.0, abs=1e-12)
        assert check_feasible(cfg) == []
        assert verify_nash(cfg).verdict  # walkers face a saturated bus

    def test_swapped_split_fails_with_named_witness(self):
        inst = single_od_instance()
        x = np.zeros((2, 2, 1, 2))
        x[0, 1, 0, 0] = 0.6
        x[0, 1, 0, 1] = 0.4
        cert = verify_nash(Configuration(x=x, instance=inst))
        assert not cert.verdict
        w = cert.witnesses[0]
        assert (w.i, w.j, w.k, w.mode, w.mode_alt) == (0, 1, 0, 0, 1)
        assert w.cost == 10.0 and w.cost_alt == 4.0
        assert w.slack_alt == pytest.approx(20.0)


class TestSolveBasics:
    def test_unbounded_capacities_pick_cheapest_mode(self):
        rng = np.random.RandomState(7)
        n, k, m = 3, 2, 4
        cost = rng.rand(n, n, k, m) * 10
        d = rng.rand(n, n, k) * 20 + 1
        for i in range(n):
            d[i, i, :] = 0
        cap = np.full((n, m), UNBOUNDED)
        inst = GameInstance(n, m, k, cost=cost, fare=np.zeros((n, n, m)), demand=d,
                            capacity=cap, travel_time=np.zeros((n, n, m)),
                            distance=np.zeros((n, n)), population_sizes=d.sum(axis=(0, 1)))
        cfg, _ = solve_equilibrium(inst)
        for (i, j, kk) in inst.demand_triples():
            chosen = int(np.argmax(cfg.x[i, j, kk]))
            assert cfg.x[i, j, kk, chosen] == pytest.approx(1.0)
            assert cost[i, j, kk, chosen] == pytest.approx(cost[i, j, kk].min())

    def test_equal_costs_tie_break_to_lowest_mode_index(self):
        n, k, m = 2, 1, 3
        cost = np.zeros((n, n, k, m))
        cost[0, 1, 0] = [5.0, 5.0, 5.0]
        d = np.zeros((n, n, k))
        d[0, 1, 0] = 10.0
        cap = np.full((n, m), UNBOUNDED)
        inst = GameInstance(n, m, k, cost=cost, fare=np.zeros((n, n, m)), demand=d,
                            capacity=cap, travel_time=np.zeros((n, n, m)),
                            distance=np.zeros((n, n)), population_sizes=np.array([10.0]))
        cfg, _ = solve_equilibrium(inst)
        assert cfg.x[0, 1, 0, 0] == 1.0
        assert cfg.x[0, 1, 0, 1] == 0.0

    def test_zero_demand_returns_zero_split(self):
        n, k, m = 2, 1, 2
        inst = GameInstance(n, m, k, cost=np.ones((n, n, k, m)), fare=np.zeros((n, n, m)),
                            demand=np.zeros((n, n, k)), capacity=np.full((n, m), UNBOUNDED),
                            travel_time=np.zeros((n, n, m)), distance=np.zeros((n, n)),
                            population_sizes=np.array([0.0]))
        cfg, stats = solve_equilibrium(inst)
        assert np.all(cfg.x == 0.0)
        assert stats.objective == 0.0
        assert check_feasible(cfg) == []
        assert verify_nash(cfg).verdict

    def test_determinism_bit_identical(self):
        rng = np.random.RandomState(123)
        inst = make_random_instance(rng)
        a, sa = solve_equilibrium(inst)
        b, sb = solve_equilibrium(inst)
        assert np.array_equal(a.x, b.x)
        assert sa.objective == sb.objective

    def test_population_total_mismatch_is_precondition_error(self):
        from mobeq.errors import InfeasibleInstanceError

        inst = single_od_instance()
        broken = GameInstance(
            n_zones=inst.n_zones, n_modes=inst.n_modes, n_populations=inst.n_populations,
            cost=inst.cost.copy(), fare=inst.fare.copy(), demand=inst.demand.copy(),
            capacity=inst.capacity.copy(), travel_time=inst.travel_time.copy(),
            distance=inst.distance.copy(), population_sizes=np.array([90.0]),
        )
        with pytest.raises(InfeasibleInstanceError):
            solve_equilibrium(broken)


class TestCheckFeasible:
    def test_all_walk_is_feasible(self):
        rng = np.random.RandomState(5)
        inst = make_random_instance(rng)
        x = np.zeros((inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes))
        for (i, j, k) in inst.demand_triples():
            x[i, j, k, 0] = 1.0
        assert check_feasible(Configuration(x=x, instance=inst)) == []

    def test_incomplete_split_flagged(self):
        inst = single_od_instance()
        x = np.zeros((2, 2, 1, 2))
        x[0, 1, 0, 0] = 0.9
        report = check_feasible(Configuration(x=x, instance=inst))
        assert any(v.code == "unit-split" for v in report)

    def test_capacity_excess_reports_residual(self):
        inst = single_od_instance()
        cfg, _ = solve_equilibrium(inst)
        x = cfg.x.copy()
        # push one extra traveler onto the saturated bus
        x[0, 1, 0, 1] += 1.0 / 100.0
        x[0, 1, 0, 0] -= 1.0 / 100.0
        report = check_feasible(Configuration(x=x, instance=inst))
        cap_violations = [v for v in report if v.code == "capacity"]
        assert len(cap_violations) == 1
        assert "by 1" in cap_violations[0].message

    def test_intra_zone_split_flagged(self):
        inst = single_od_instance()
        x = np.zeros((2, 2, 1, 2))
        x[0, 1, 0, 0] = 1.0
        x[1, 1, 0, 0] = 0.5  # travelers "staying home"
        report = check_feasible(Configuration(x=x, instance=inst))
        assert any(v.code == "no-intra-zone" for v in report)

    def test_negative_entry_flagged(self):
        inst = single_od_instance()
        x = np.zeros((2, 2, 1, 2))
        x[0, 1, 0, 0] = 1.1
        x[0, 1, 0, 1] = -0.1
        report = check_feasible(Configuration(x=x, instance=inst))
        assert any(v.code == "nonnegativity" for v in report)

    def test_shape_mismatch_is_structural(self):
        inst = single_od_instance()
        with pytest.raises(ValueError):
            check_feasible(Configuration(x=np.zeros((1, 1, 1, 1)), instance=inst))


class TestSolverProperties:
    def test_zone_relabeling_equivariance(self):
        # Relabeling zones reorders the per-zone subproblems and the
        # bundles inside them; the optimum is the same point, reached via
        # a different augmentation order, so agreement is to solver
        # tolerance (bit-exactness for identical inputs is covered by the
        # determinism test).
        rng = np.random.RandomState(17)
        for _ in range(25):
            inst = make_random_instance(rng)
            n = inst.n_zones
            perm = rng.permutation(n)
            inv = np.argsort(perm)
            permuted = GameInstance(
                n_zones=n, n_modes=inst.n_modes, n_populations=inst.n_populations,
                cost=inst.cost[perm][:, perm],
                fare=inst.fare[perm][:, perm],
                demand=inst.demand[perm][:, perm],
                capacity=inst.capacity[perm],
                travel_time=inst.travel_time[perm][:, perm],
                distance=inst.distance[perm][:, perm],
                population_sizes=inst.population_sizes,
            )
            base, sb = solve_equilibrium(inst)
            rel, sr = solve_equilibrium(permuted)
            assert np.allclose(rel.x[inv][:, inv], base.x, atol=1e-9)
            assert abs(sb.objective - sr.objective) <= 1e-9 * max(1.0, abs(sb.objective))

    def test_feasibility_closure_and_equilibrium(self):
        rng = np.random.RandomState(29)
        for _ in range(50):
            inst = make_random_instance(rng)
            cfg, _ = solve_equilibrium(inst)
            assert check_feasible(cfg) == []
            assert verify_nash(cfg).verdict

    def test_saturated_walking_never_misfires(self):
        # walking is a sentinel, not a huge number: an expensive walk must
        # still produce a witness when a cheap bounded mode has slack
        inst = single_od_instance(walk_cost=1000.0, bus_cost=1.0, bus_cap=1000.0)
        x = np.zeros((2, 2, 1, 2))
        x[0, 1, 0, 0] = 1.0
        cert = verify_nash(Configuration(x=x, instance=inst))
        assert not cert.verdict
        assert cert.witnesses[0].slack_alt == pytest.approx(1000.0)
