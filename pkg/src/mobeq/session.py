"""Iterate-and-compare workflow: a session holds a city and an ordered
history of solved scenarios so equilibria can be diffed across iterations.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .equilibrium import (
    Configuration,
    NashCertificate,
    SolveStats,
    SUPPORT_TOL,
    check_feasible,
    solve_equilibrium,
    verify_nash,
)
from .errors import (
    CityValidationError,
    InvalidControlsError,
    SessionError,
    SolverVerifierDisagreement,
)
from .metrics import KpiBundle, compute_kpis
from .model import (
    CityModel,
    ScenarioControls,
    build_instance,
    validate_city,
    validate_controls,
)


@dataclass(frozen=True)
class EquilibriumReport:
    """One solved iteration: controls in, certified split and KPIs out."""

    iteration: int
    controls: ScenarioControls
    configuration: Configuration
    kpis: KpiBundle
    nash: NashCertificate
    stats: SolveStats
    timestamp: str

    def sparse_x(self) -> list:
        """Nonzero split entries as [i, j, k, m, value] rows."""
        entries = []
        x = self.configuration.x
        for (i, j, k) in self.configuration.instance.demand_triples():
            for m in range(self.configuration.instance.n_modes):
                v = float(x[i, j, k, m])
                if v > SUPPORT_TOL:
                    entries.append([i, j, k, m, v])
        return entries


@dataclass
class Session:
    """A city plus its append-only iteration history."""

    id: str
    city: CityModel
    history: list = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)


def create_session(city: CityModel) -> Session:
    report = validate_city(city)
    if report:
        raise CityValidationError(report)
    return Session(id=uuid.uuid4().hex, city=city)


def run_iteration(session: Session, controls: ScenarioControls) -> EquilibriumReport:
    """Solve one scenario and append it to the session history.

    A split that fails feasibility or equilibrium verification is an
    engine defect: the iteration aborts with diagnostics attached and the
    history stays untouched.
    """
    report = validate_controls(session.city, controls)
    if report:
        raise InvalidControlsError("; ".join(str(v) for v in report))

    with session._lock:
        inst = build_instance(session.city, controls)
        cfg, stats = solve_equilibrium(inst)
        feas = check_feasible(cfg)
        if feas:
            raise SolverVerifierDisagreement("solved split failed feasibility", feas)
        cert = verify_nash(cfg)
        if not cert.verdict:
            raise SolverVerifierDisagreement(
                "solved split failed equilibrium verification", cert.witnesses
            )
        kpis = compute_kpis(inst, cfg, session.city, controls)
        rec = EquilibriumReport(
            iteration=len(session.history) + 1,
            controls=controls,
            configuration=cfg,
            kpis=kpis,
            nash=cert,
            stats=stats,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        session.history.append(rec)
        return rec


def reset_session(session: Session) -> None:
    """Drop all iterations, keeping the city."""
    with session._lock:
        session.history.clear()


def rerun_last(session: Session) -> EquilibriumReport:
    """Re-solve the most recent controls as a new iteration."""
    if not session.history:
        raise SessionError("session has no iterations to re-run")
    return run_iteration(session, session.history[-1].controls)


@dataclass(frozen=True)
class KpiDelta:
    """Element-wise KPI differences between two iterations (b minus a)."""

    a: int
    b: int
    avg_travel_time_min: float
    co2_kg: float
    revenue: dict
    operating_cost: dict
    tax_revenue: float
    mode_share: list  # per zone: {mode name: share delta}

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "avg_travel_time_min": self.avg_travel_time_min,
            "co2_kg": self.co2_kg,
            "revenue": dict(self.revenue),
            "operating_cost": dict(self.operating_cost),
            "tax_revenue": self.tax_revenue,
            "mode_share": [dict(z) for z in self.mode_share],
        }


def diff_iterations(session: Session, a: int, b: int) -> KpiDelta:
    """KPI deltas between stored iterations a and b (1-based)."""
    by_index = {r.iteration: r for r in session.history}
    if a not in by_index or b not in by_index:
        raise SessionError(f"iterations {a} and {b} must both exist (have 1..{len(session.history)})")
    ka, kb = by_index[a].kpis, by_index[b].kpis
    return KpiDelta(
        a=a,
        b=b,
        avg_travel_time_min=kb.avg_travel_time_min - ka.avg_travel_time_min,
        co2_kg=kb.co2_kg - ka.co2_kg,
        revenue={m: kb.revenue[m] - ka.revenue[m] for m in ka.revenue},
        operating_cost={m: kb.operating_cost[m] - ka.operating_cost[m] for m in ka.operating_cost},
        tax_revenue=kb.tax_revenue - ka.tax_revenue,
        mode_share=[
            {m: zb[m] - za[m] for m in za}
            for za, zb in zip(ka.mode_share, kb.mode_share)
        ],
    )
