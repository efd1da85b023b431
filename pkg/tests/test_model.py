import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mobeq.errors import CityValidationError, InvalidControlsError
from mobeq.model import (
    CityModel,
    DemandTensor,
    FareScheme,
    Mode,
    Population,
    ScenarioControls,
    UNBOUNDED,
    Zone,
    build_instance,
    validate_city,
    validate_controls,
)


def small_city(demand=None, pop_sizes=None):
    entries = demand if demand is not None else {(0, 1, 0): 100.0, (1, 0, 0): 50.0}
    sizes = pop_sizes if pop_sizes is not None else [math.fsum(entries.values())]
    return CityModel(
        schema_version="1",
        name="toy",
        zones=(
            Zone(0, "a", 42.0, -71.0),
            Zone(1, "b", 42.1, -71.1),
        ),
        populations=tuple(
            Population(k, f"pop{k}", 10.0 * (k + 1), size) for k, size in enumerate(sizes)
        ),
        modes=(
            Mode(1, "bus", 15.0, FareScheme("per_trip", 2.0), 50, 2800.0, 90.0, False),
            Mode(2, "amod", 20.0, FareScheme("per_mile", 1.0), 4, 350.0, 12.0, True),
        ),
        demand=DemandTensor(entries),
    )


class TestValidateCity:
    def test_consistent_city_is_valid(self, boston_city):
        assert validate_city(boston_city) == []

    def test_intra_zone_demand_flagged(self):
        city = small_city({(0, 0, 0): 5.0, (0, 1, 0): 95.0}, pop_sizes=[100.0])
        codes = [v.code for v in validate_city(city)]
        assert "intra-zone demand" in codes

    def test_population_demand_mismatch(self):
        city = small_city({(0, 1, 0): 90.0}, pop_sizes=[100.0])
        report = validate_city(city)
        assert any(v.code == "population/demand mismatch" for v in report)
        msg = next(v.message for v in report if v.code == "population/demand mismatch")
        assert "100" in msg and "90" in msg

    def test_bad_latitude(self):
        city = small_city()
        bad = CityModel(
            **{**city.__dict__, "zones": (Zone(0, "a", 200.0, 0.0), city.zones[1])}
        )
        assert any(v.code == "zone-latitude" for v in validate_city(bad))

    def test_demand_referencing_unknown_zone(self):
        city = small_city({(0, 9, 0): 10.0, (0, 1, 0): 90.0}, pop_sizes=[100.0])
        assert any(v.code == "demand-zone" for v in validate_city(city))


class TestValidateControls:
    def test_tax_rate_out_of_range(self, boston_city):
        controls = ScenarioControls(tax_rates={2: 1.5})
        assert any(v.code == "tax-range" for v in validate_controls(boston_city, controls))

    def test_fleet_on_walking_rejected(self, boston_city):
        controls = ScenarioControls(fleet={(0, 0): 5})
        assert any(v.code == "fleet-walking" for v in validate_controls(boston_city, controls))

    def test_unknown_zone(self, boston_city):
        controls = ScenarioControls(fleet={(99, 1): 5})
        assert any(v.code == "fleet-zone" for v in validate_controls(boston_city, controls))

    def test_negative_count(self, boston_city):
        controls = ScenarioControls(fleet={(0, 1): -3})
        assert any(v.code == "fleet-count" for v in validate_controls(boston_city, controls))


class TestBuildInstance:
    def test_bus_capacity_is_vehicles_times_seats(self, boston_city, nominal_controls):
        inst = build_instance(boston_city, nominal_controls)
        # 15 buses x 50 seats in every zone
        assert np.all(inst.capacity[:, 1] == 750.0)

    def test_zero_fleet_zero_capacity(self):
        city = small_city()
        controls = ScenarioControls(fleet={(0, 1): 15})  # nothing in zone 1, no amod
        inst = build_instance(city, controls)
        assert inst.capacity[1, 1] == 0.0
        assert inst.capacity[0, 2] == 0.0

    def test_walking_capacity_unbounded_everywhere(self, boston_city, nominal_controls):
        inst = build_instance(boston_city, nominal_controls)
        assert np.all(inst.capacity[:, 0] == UNBOUNDED)

    def test_rejects_unknown_references(self, boston_city):
        with pytest.raises(InvalidControlsError):
            build_instance(boston_city, ScenarioControls(fleet={(0, 99): 1}))

    def test_rejects_invalid_city(self):
        city = small_city({(0, 1, 0): 90.0}, pop_sizes=[100.0])
        with pytest.raises(CityValidationError):
            build_instance(city, ScenarioControls())

    def test_pure_function_bit_identical(self, boston_city, nominal_controls):
        a = build_instance(boston_city, nominal_controls)
        b = build_instance(boston_city, nominal_controls)
        for name in ("cost", "fare", "demand", "capacity", "travel_time", "distance"):
            assert np.array_equal(getattr(a, name), getattr(b, name))

    def test_fare_override_applies(self, boston_city, nominal_controls):
        from dataclasses import replace

        pricier = replace(
            nominal_controls, fare_overrides={2: FareScheme("per_mile", 2.0)}
        )
        base = build_instance(boston_city, nominal_controls)
        bumped = build_instance(boston_city, pricier)
        off_diag = ~np.eye(8, dtype=bool)
        assert np.allclose(bumped.fare[:, :, 2][off_diag], 2.0 * base.fare[:, :, 2][off_diag])

    def test_decision_space_dimension(self, boston_city, nominal_controls):
        inst = build_instance(boston_city, nominal_controls)
        n, m, k = inst.n_zones, inst.n_modes, inst.n_populations
        assert inst.cost.shape == (n, n, k, m)
        assert inst.cost.size == n * n * m * k  # N^2 M K decision slots

    def test_instance_immutable(self, boston_city, nominal_controls):
        inst = build_instance(boston_city, nominal_controls)
        with pytest.raises(ValueError):
            inst.cost[0, 0, 0, 0] = 1.0


@st.composite
def city_and_controls(draw):
    n = draw(st.integers(2, 4))
    k = draw(st.integers(1, 2))
    zones = tuple(
        Zone(i, f"z{i}", 42.0 + 0.01 * i, -71.0 - 0.02 * i) for i in range(n)
    )
    entries = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for kk in range(k):
                count = draw(st.integers(0, 40))
                if count:
                    entries[(i, j, kk)] = float(count)
    sizes = [
        math.fsum(v for (i, j, kk), v in entries.items() if kk == pk) for pk in range(k)
    ]
    populations = tuple(
        Population(pk, f"p{pk}", draw(st.floats(0, 50)), sizes[pk]) for pk in range(k)
    )
    modes = (
        Mode(1, "bus", draw(st.floats(5, 30)), FareScheme("per_trip", draw(st.floats(0, 5))),
             draw(st.integers(1, 60)), 2800.0, 90.0, False),
        Mode(2, "amod", draw(st.floats(5, 40)), FareScheme("per_mile", draw(st.floats(0, 3))),
             4, 350.0, 12.0, True),
    )
    city = CityModel(
        schema_version="1", name="gen", zones=zones, populations=populations,
        modes=modes, demand=DemandTensor(entries),
    )
    fleet = {}
    for i in range(n):
        for m in (1, 2):
            fleet[(i, m)] = draw(st.integers(0, 20))
    controls = ScenarioControls(fleet=fleet, tax_rates={2: draw(st.floats(0, 1))})
    return city, controls


class TestInstanceProperties:
    @settings(max_examples=40, deadline=None)
    @given(city_and_controls())
    def test_build_instance_invariants(self, pair):
        city, controls = pair
        inst = build_instance(city, controls)
        assert np.all(inst.cost >= 0) and np.all(np.isfinite(inst.cost))
        # zero diagonal times, unbounded walking
        for m in range(inst.n_modes):
            assert np.all(np.diag(inst.travel_time[:, :, m]) == 0.0)
        assert np.all(inst.capacity[:, 0] == UNBOUNDED)
        assert np.all(inst.capacity[:, 1:] >= 0)
        assert np.all(np.diag(inst.distance) == 0.0)
        # demand consistency carried through
        for k in range(inst.n_populations):
            assert inst.demand[:, :, k].sum() == pytest.approx(inst.population_sizes[k])
