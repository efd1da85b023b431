"""Domain types for the mobility game and input-consistency validation.

A city is modeled as zones, traveler populations, and transport modes.
Walking is never listed in city data: the engine injects it as mode 0 with
an unbounded per-zone capacity, so every instance is feasible by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Mapping

import numpy as np

from .errors import CityValidationError, InvalidControlsError
from .travel import DistanceMatrix, compute_distance, compute_travel_time

# Engine constants. Walking speed is not a data input; it is fixed here and
# overridable only through CityModel.walking_speed for experiments.
DEFAULT_WALKING_SPEED_MPH = 3.1
DEFAULT_CIRCUITY = 1.3
DEFAULT_WINDOW_HOURS = 1.0

#: Sentinel for "no capacity limit" (walking). Kept as +inf, never a large
#: finite number, so saturation checks cannot misfire.
UNBOUNDED = math.inf

WALKING_MODE_ID = 0
WALKING_MODE_NAME = "walking"


@dataclass(frozen=True)
class FareScheme:
    """Pricing rule for one mode: flat per trip or proportional to miles."""

    kind: Literal["per_trip", "per_mile"]
    amount: float  # USD per trip, or USD per mile

    def resolve(self, miles: float) -> float:
        """Monetary fare for a trip of the given length."""
        if self.kind == "per_trip":
            return self.amount
        return self.amount * miles


@dataclass(frozen=True)
class Zone:
    id: int
    name: str
    latitude: float
    longitude: float


@dataclass(frozen=True)
class Population:
    id: int
    name: str
    value_of_time: float  # USD per hour
    size: float  # travelers per window; must equal originating demand


@dataclass(frozen=True)
class Mode:
    id: int
    name: str
    speed_mph: float
    fare: FareScheme
    seats_per_vehicle: int
    emissions_g_per_vehicle_mile: float
    operating_cost_per_vehicle_hour: float
    taxable: bool


def make_walking_mode(speed_mph: float = DEFAULT_WALKING_SPEED_MPH) -> Mode:
    """The injected mode 0: free, emission-less, uncapacitated."""
    return Mode(
        id=WALKING_MODE_ID,
        name=WALKING_MODE_NAME,
        speed_mph=speed_mph,
        fare=FareScheme("per_trip", 0.0),
        seats_per_vehicle=1,
        emissions_g_per_vehicle_mile=0.0,
        operating_cost_per_vehicle_hour=0.0,
        taxable=False,
    )


class DemandTensor:
    """Sparse map (origin, destination, population) -> traveler count.

    Counts are real-valued; zero entries are dropped. Immutable after
    construction.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[tuple[int, int, int], float]):
        clean = {}
        for key, value in entries.items():
            v = float(value)
            if v != 0.0:
                clean[(int(key[0]), int(key[1]), int(key[2]))] = v
        object.__setattr__(self, "_entries", clean)

    def __setattr__(self, name, value):
        raise AttributeError("DemandTensor is immutable")

    @property
    def entries(self) -> Mapping[tuple[int, int, int], float]:
        return dict(self._entries)

    def get(self, i: int, j: int, k: int) -> float:
        return self._entries.get((i, j, k), 0.0)

    def items(self):
        return self._entries.items()

    def total(self) -> float:
        return math.fsum(self._entries.values())

    def originating(self, k: int) -> float:
        """Total demand of population k across all OD pairs."""
        return math.fsum(v for (i, j, kk), v in self._entries.items() if kk == k)

    def as_array(self, n_zones: int, n_populations: int) -> np.ndarray:
        d = np.zeros((n_zones, n_zones, n_populations))
        for (i, j, k), v in self._entries.items():
            d[i, j, k] = v
        return d

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return isinstance(other, DemandTensor) and self._entries == other._entries

    def __hash__(self):
        return hash(frozenset(self._entries.items()))


@dataclass(frozen=True)
class CityModel:
    """Static description of a city: zones, populations, modes, demand.

    ``modes`` excludes walking; the engine injects it. Travel-time
    overrides (hours, keyed by origin/destination/full mode index) replace
    the distance/speed estimate and are how asymmetric times enter.
    """

    schema_version: str
    name: str
    zones: tuple[Zone, ...]
    populations: tuple[Population, ...]
    modes: tuple[Mode, ...]  # excluding walking
    demand: DemandTensor
    travel_time_overrides: Mapping[tuple[int, int, int], float] = field(
        default_factory=dict
    )
    circuity: float = DEFAULT_CIRCUITY
    window_hours: float = DEFAULT_WINDOW_HOURS
    walking_speed: float = DEFAULT_WALKING_SPEED_MPH

    @property
    def n_zones(self) -> int:
        return len(self.zones)

    @property
    def n_populations(self) -> int:
        return len(self.populations)

    def all_modes(self) -> tuple[Mode, ...]:
        """Walking plus the city's modes, in index order."""
        return (make_walking_mode(self.walking_speed),) + self.modes

    @property
    def n_modes(self) -> int:
        """Mode count including walking."""
        return len(self.modes) + 1

    def mode_named(self, name: str) -> Mode:
        for m in self.all_modes():
            if m.name == name:
                return m
        raise KeyError(name)


@dataclass(frozen=True)
class ScenarioControls:
    """The levers users pull between iterations.

    fleet maps (zone, mode) -> vehicle count for modes != walking. Missing
    pairs mean zero vehicles. fare_overrides replace a mode's city-file
    fare; tax_rates are fractions of revenue in [0, 1].
    """

    fleet: Mapping[tuple[int, int], int] = field(default_factory=dict)
    fare_overrides: Mapping[int, FareScheme] = field(default_factory=dict)
    tax_rates: Mapping[int, float] = field(default_factory=dict)

    def with_fleet(self, zone: int, mode: int, vehicles: int) -> "ScenarioControls":
        fleet = dict(self.fleet)
        fleet[(zone, mode)] = vehicles
        return replace(self, fleet=fleet)


@dataclass(frozen=True)
class Violation:
    """One broken invariant; violations are data, not faults."""

    code: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.message}"


ValidationReport = list  # list[Violation]


@dataclass(frozen=True)
class GameInstance:
    """Fully resolved problem: costs, demand, capacities, times.

    All tensors are dense float64 arrays indexed [i, j, k, m] (or slices
    thereof) with mode 0 = walking. capacity[i, 0] is +inf everywhere.
    population_sizes carries the per-population totals so the full
    optimization problem, including its demand-consistency rows, can be
    assembled and checked independently of the demand tensor.
    """

    n_zones: int
    n_modes: int
    n_populations: int
    cost: np.ndarray  # (N, N, K, M) USD per traveler
    fare: np.ndarray  # (N, N, M) USD per traveler
    demand: np.ndarray  # (N, N, K) travelers
    capacity: np.ndarray  # (N, M) seats per window; +inf for walking
    travel_time: np.ndarray  # (N, N, M) hours
    distance: np.ndarray  # (N, N) miles
    population_sizes: np.ndarray  # (K,)
    window_hours: float = DEFAULT_WINDOW_HOURS

    def __post_init__(self):
        for arr in (
            self.cost,
            self.fare,
            self.demand,
            self.capacity,
            self.travel_time,
            self.distance,
            self.population_sizes,
        ):
            arr.setflags(write=False)

    def demand_triples(self):
        """Nonzero (i, j, k) triples in index order."""
        idx = np.argwhere(self.demand > 0.0)
        return [tuple(int(v) for v in t) for t in idx]


def trip_cost(fare: float, value_of_time: float, time_hours: float) -> float:
    """Per-traveler cost: monetary fare plus time valued at w USD/h."""
    return fare + value_of_time * time_hours


def validate_city(city: CityModel) -> ValidationReport:
    """Check every structural invariant; an empty report means valid."""
    report: ValidationReport = []
    n = len(city.zones)

    ids = [z.id for z in city.zones]
    if ids != list(range(n)):
        report.append(
            Violation("zone-ids", f"zone ids must be contiguous 0..{n - 1}, got {ids}")
        )
    for z in city.zones:
        if not -90.0 <= z.latitude <= 90.0:
            report.append(
                Violation("zone-latitude", f"zone {z.id} latitude {z.latitude} outside [-90, 90]")
            )
        if not -180.0 <= z.longitude <= 180.0:
            report.append(
                Violation("zone-longitude", f"zone {z.id} longitude {z.longitude} outside [-180, 180]")
            )

    pop_ids = [p.id for p in city.populations]
    if pop_ids != list(range(len(city.populations))):
        report.append(Violation("population-ids", f"population ids must be contiguous 0..K-1, got {pop_ids}"))
    for p in city.populations:
        if p.value_of_time < 0:
            report.append(Violation("value-of-time", f"population {p.id} value_of_time {p.value_of_time} < 0"))
        if p.size < 0:
            report.append(Violation("population-size", f"population {p.id} size {p.size} < 0"))

    mode_ids = [m.id for m in city.modes]
    if mode_ids != list(range(1, len(city.modes) + 1)):
        report.append(
            Violation("mode-ids", f"mode ids must be contiguous 1..M (0 is reserved for walking), got {mode_ids}")
        )
    names = [m.name for m in city.modes]
    if len(set(names)) != len(names) or WALKING_MODE_NAME in names:
        report.append(Violation("mode-names", f"mode names must be unique and not '{WALKING_MODE_NAME}'"))
    for m in city.modes:
        if not m.speed_mph > 0:
            report.append(Violation("mode-speed", f"mode {m.name} speed {m.speed_mph} must be > 0"))
        if m.seats_per_vehicle < 1:
            report.append(Violation("mode-seats", f"mode {m.name} seats_per_vehicle {m.seats_per_vehicle} < 1"))
        if m.emissions_g_per_vehicle_mile < 0:
            report.append(Violation("mode-emissions", f"mode {m.name} emissions rate < 0"))
        if m.operating_cost_per_vehicle_hour < 0:
            report.append(Violation("mode-operating-cost", f"mode {m.name} operating cost < 0"))
        if m.fare.amount < 0:
            report.append(Violation("mode-fare", f"mode {m.name} fare amount < 0"))

    n_pop = len(city.populations)
    for (i, j, k), v in city.demand.items():
        if not (0 <= i < n and 0 <= j < n):
            report.append(Violation("demand-zone", f"demand entry ({i},{j},{k}) references unknown zone (N={n})"))
            continue
        if not 0 <= k < n_pop:
            report.append(Violation("demand-population", f"demand entry ({i},{j},{k}) references unknown population (K={n_pop})"))
            continue
        if not math.isfinite(v) or v < 0:
            report.append(Violation("demand-value", f"demand d[{i},{j},{k}] = {v} must be finite and >= 0"))
        if i == j and v != 0:
            report.append(Violation("intra-zone demand", f"d[{i},{i},{k}] = {v}; travelers may not stay in their zone"))

    # Each population's size must equal its total originating demand,
    # otherwise the per-population consistency rows of the optimization
    # problem contradict the per-route ones.
    for p in city.populations:
        total = city.demand.originating(p.id)
        if abs(total - p.size) > 1e-9 * max(1.0, abs(p.size)):
            report.append(
                Violation(
                    "population/demand mismatch",
                    f"k={p.id} ({p.name}): size {p.size:g} != originating demand {total:g}",
                )
            )

    n_modes = len(city.modes) + 1
    for (i, j, m), hours in city.travel_time_overrides.items():
        if not (0 <= i < n and 0 <= j < n and 0 <= m < n_modes):
            report.append(Violation("override-index", f"travel-time override ({i},{j},{m}) out of range"))
        elif hours < 0 or not math.isfinite(hours):
            report.append(Violation("override-value", f"travel-time override ({i},{j},{m}) = {hours} must be finite and >= 0"))

    if city.circuity < 1.0:
        report.append(Violation("circuity", f"circuity {city.circuity} must be >= 1"))
    if city.window_hours <= 0:
        report.append(Violation("window", f"window_hours {city.window_hours} must be > 0"))

    return report


def validate_controls(city: CityModel, controls: ScenarioControls) -> ValidationReport:
    """Range- and reference-check controls against a city."""
    report: ValidationReport = []
    n = city.n_zones
    n_modes = city.n_modes
    for (i, m), count in controls.fleet.items():
        if not (0 <= i < n):
            report.append(Violation("fleet-zone", f"fleet entry references unknown zone {i}"))
        if not (1 <= m < n_modes):
            code = "fleet-walking" if m == WALKING_MODE_ID else "fleet-mode"
            report.append(Violation(code, f"fleet entry references invalid mode {m}"))
        if count != int(count) or count < 0:
            report.append(Violation("fleet-count", f"fleet({i},{m}) = {count} must be a non-negative integer"))
    for m, scheme in controls.fare_overrides.items():
        if not (1 <= m < n_modes):
            report.append(Violation("fare-mode", f"fare override references invalid mode {m}"))
        if scheme.amount < 0:
            report.append(Violation("fare-amount", f"fare override for mode {m} is negative"))
    for m, rate in controls.tax_rates.items():
        if not (1 <= m < n_modes):
            report.append(Violation("tax-mode", f"tax rate references invalid mode {m}"))
        if not 0.0 <= rate <= 1.0:
            report.append(Violation("tax-range", f"tax_rates must lie in [0,1]; mode {m} has {rate}"))
    return report


def build_instance(
    city: CityModel,
    controls: ScenarioControls,
    distances: DistanceMatrix | None = None,
) -> GameInstance:
    """Resolve a city plus controls into cost/demand/capacity tensors.

    Deterministic: identical inputs give bit-identical instances. A
    precomputed DistanceMatrix may be passed to avoid recomputation; by
    default great-circle distances scaled by the city's circuity factor
    are used for both travel times and distance-based fares.
    """
    city_report = validate_city(city)
    if city_report:
        raise CityValidationError(city_report)
    controls_report = validate_controls(city, controls)
    if controls_report:
        raise InvalidControlsError("; ".join(str(v) for v in controls_report))

    n = city.n_zones
    modes = city.all_modes()
    n_modes = len(modes)
    n_pop = city.n_populations

    if distances is None:
        distances = compute_distance(city.zones, city.circuity)
    dist = distances.miles

    travel_time = np.zeros((n, n, n_modes))
    for m_idx, mode in enumerate(modes):
        travel_time[:, :, m_idx] = compute_travel_time(
            distances, mode, city.travel_time_overrides, mode_index=m_idx
        )

    fare = np.zeros((n, n, n_modes))
    for m_idx, mode in enumerate(modes):
        scheme = controls.fare_overrides.get(m_idx, mode.fare)
        if scheme.kind == "per_trip":
            fare[:, :, m_idx] = scheme.amount
            np.fill_diagonal(fare[:, :, m_idx], 0.0)
        else:
            fare[:, :, m_idx] = scheme.amount * dist

    vot = np.array([p.value_of_time for p in city.populations])
    # c[i,j,k,m] = fare[i,j,m] + w_k * t[i,j,m]
    cost = fare[:, :, None, :] + vot[None, None, :, None] * travel_time[:, :, None, :]

    capacity = np.zeros((n, n_modes))
    capacity[:, WALKING_MODE_ID] = UNBOUNDED
    for (i, m_idx), count in controls.fleet.items():
        capacity[i, m_idx] = float(int(count)) * modes[m_idx].seats_per_vehicle

    demand = city.demand.as_array(n, n_pop)
    sizes = np.array([float(p.size) for p in city.populations])

    return GameInstance(
        n_zones=n,
        n_modes=n_modes,
        n_populations=n_pop,
        cost=cost,
        fare=fare,
        demand=demand,
        capacity=capacity,
        travel_time=travel_time,
        distance=dist.copy(),
        population_sizes=sizes,
        window_hours=city.window_hours,
    )
