"""KPI bundle computed from a solved split: times, emissions, money flows.

Conventions (documented engine choices, not data):
  - vehicle-miles convert from passenger-miles at full occupancy
    (passenger-miles / seats per vehicle), keeping emissions monotone in
    ridership;
  - operating cost is fleet-proportional (USD per vehicle-hour times the
    window), independent of ridership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import Configuration
from .model import CityModel, GameInstance, ScenarioControls


@dataclass(frozen=True)
class KpiBundle:
    """Per-iteration metrics.

    mode_share, riders: one mapping per zone, keyed by mode name.
    zone_departures: travelers leaving each zone (demand row sums).
    """

    avg_travel_time_min: float
    co2_kg: float
    revenue: dict  # mode name -> USD collected in fares
    operating_cost: dict  # mode name -> USD per window
    tax_revenue: float
    mode_share: list  # per zone: {mode name: fraction}
    riders: list  # per zone: {mode name: travelers}
    zone_departures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "avg_travel_time_min": self.avg_travel_time_min,
            "co2_kg": self.co2_kg,
            "revenue": dict(self.revenue),
            "operating_cost": dict(self.operating_cost),
            "tax_revenue": self.tax_revenue,
            "mode_share": [dict(z) for z in self.mode_share],
            "riders": [dict(z) for z in self.riders],
            "zone_departures": list(self.zone_departures),
        }

    @staticmethod
    def from_dict(data: dict) -> "KpiBundle":
        return KpiBundle(
            avg_travel_time_min=data["avg_travel_time_min"],
            co2_kg=data["co2_kg"],
            revenue=dict(data["revenue"]),
            operating_cost=dict(data["operating_cost"]),
            tax_revenue=data["tax_revenue"],
            mode_share=[dict(z) for z in data["mode_share"]],
            riders=[dict(z) for z in data["riders"]],
            zone_departures=list(data["zone_departures"]),
        )


def compute_kpis(
    inst: GameInstance,
    cfg: Configuration,
    city: CityModel,
    controls: ScenarioControls,
) -> KpiBundle:
    """Aggregate a feasible split into the reported metric set."""
    modes = city.all_modes()
    d, x = inst.demand, cfg.x
    flows = d[:, :, :, None] * x  # travelers per (i, j, k, m)

    total_travelers = float(d.sum())
    weighted_hours = float(np.einsum("ijkm,ijm->", flows, inst.travel_time))
    avg_minutes = 60.0 * weighted_hours / total_travelers if total_travelers > 0 else 0.0

    # Fares actually collected, passenger-miles, and riders per (zone, mode).
    revenue = {}
    passenger_miles = {}
    for m_idx, mode in enumerate(modes):
        revenue[mode.name] = float(np.einsum("ijk,ij->", flows[:, :, :, m_idx], inst.fare[:, :, m_idx]))
        passenger_miles[mode.name] = float(
            np.einsum("ijk,ij->", flows[:, :, :, m_idx], inst.distance)
        )

    operating_cost = {}
    for m_idx, mode in enumerate(modes):
        fleet_total = sum(
            count for (zone, mm), count in controls.fleet.items() if mm == m_idx
        )
        operating_cost[mode.name] = (
            float(fleet_total) * mode.operating_cost_per_vehicle_hour * inst.window_hours
        )

    tax_revenue = math.fsum(
        controls.tax_rates.get(m_idx, 0.0) * revenue[mode.name]
        for m_idx, mode in enumerate(modes)
        if mode.taxable
    )

    co2_g = math.fsum(
        mode.emissions_g_per_vehicle_mile * passenger_miles[mode.name] / mode.seats_per_vehicle
        for mode in modes
    )

    riders_im = flows.sum(axis=(1, 2))  # (N, M)
    departures = d.sum(axis=(1, 2))  # (N,)
    mode_share, riders = [], []
    for i in range(inst.n_zones):
        dep = float(departures[i])
        share_row, rider_row = {}, {}
        for m_idx, mode in enumerate(modes):
            r = float(riders_im[i, m_idx])
            rider_row[mode.name] = r
            share_row[mode.name] = r / dep if dep > 0 else 0.0
        mode_share.append(share_row)
        riders.append(rider_row)

    return KpiBundle(
        avg_travel_time_min=avg_minutes,
        co2_kg=co2_g / 1000.0,
        revenue=revenue,
        operating_cost=operating_cost,
        tax_revenue=tax_revenue,
        mode_share=mode_share,
        riders=riders,
        zone_departures=[float(v) for v in departures],
    )


def zone_mode_revenue(inst: GameInstance, cfg: Configuration) -> np.ndarray:
    """Fares collected per (origin zone, mode); used by CSV reporting."""
    flows = inst.demand[:, :, :, None] * cfg.x
    return np.einsum("ijkm,ijm->im", flows, inst.fare)
