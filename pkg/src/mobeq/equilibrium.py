"""Equilibrium solver: per-origin-zone transportation decomposition.

Once the per-population consistency rows are recognized as redundant
(given demand/population agreement), nothing couples different origin
zones: each origin is an independent transportation problem whose
supplies are the (destination, population) demand bundles and whose
sinks are the modes with their seat capacities. Each subproblem is
solved exactly by successive shortest augmenting paths on the bipartite
residual graph; the unbounded walking sink guarantees feasibility.

A dense LP assembled verbatim from the full formulation (including the
redundant per-population rows) backs the ``oracle_solve`` cross-check
path; it is deliberately independent of the decomposition.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import InfeasibleInstanceError, OracleSizeError
from .model import GameInstance, UNBOUNDED, Violation, ValidationReport

#: Tolerance on feasibility equalities and capacity slack.
FEAS_TOL = 1e-9
#: Tolerance for cost comparison and saturation in equilibrium verification.
NASH_TOL = 1e-9
#: x entries at or below this are treated as unused.
SUPPORT_TOL = 1e-9
#: Residuals below this are treated as exhausted inside the solver.
_FLOW_EPS = 1e-12
#: Variable cap for the dense cross-check LP.
ORACLE_MAX_VARIABLES = 5000


@dataclass(frozen=True)
class Configuration:
    """Mode-split tensor x[i, j, k, m] in [0, 1], tied to its instance."""

    x: np.ndarray
    instance: GameInstance

    def __post_init__(self):
        self.x.setflags(write=False)

    def loads(self) -> np.ndarray:
        """Seats used per (origin, mode): sum_jk d_ijk * x_ijk^m."""
        return np.einsum("ijk,ijkm->im", self.instance.demand, self.x)

    def objective(self) -> float:
        """Total system cost sum c * d * x in USD."""
        return float(
            np.einsum("ijkm,ijk,ijkm->", self.instance.cost, self.instance.demand, self.x)
        )


@dataclass(frozen=True)
class NashWitness:
    """A profitable unilateral deviation: (i,j,k) travelers on m would
    rather use the cheaper, unsaturated mode m_alt."""

    i: int
    j: int
    k: int
    mode: int
    mode_alt: int
    cost: float
    cost_alt: float
    slack_alt: float

    def __str__(self):
        return (
            f"(i={self.i}, j={self.j}, k={self.k}): mode {self.mode} costs "
            f"{self.cost:.6g} but mode {self.mode_alt} costs {self.cost_alt:.6g} "
            f"with {self.slack_alt:.6g} seats free"
        )


@dataclass(frozen=True)
class NashCertificate:
    verdict: bool
    witnesses: tuple[NashWitness, ...] = ()

    def __post_init__(self):
        assert self.verdict == (len(self.witnesses) == 0)


@dataclass(frozen=True)
class SolveStats:
    objective: float
    per_zone_iterations: tuple[int, ...]
    wall_time_s: float
    solver_kind: str  # "decomposed" | "oracle"


@dataclass(frozen=True)
class LpSummary:
    """Shape of the assembled LP, for problem-size assertions."""

    n_variables: int
    n_capacity_rows: int  # one per (zone, mode) with finite capacity
    n_unbounded_capacities: int  # (zone, mode) pairs skipped as vacuous
    n_route_rows: int  # one unit-sum row per nonzero-demand triple
    n_population_rows: int


@dataclass(frozen=True)
class AssembledLp:
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    variables: list  # (i, j, k, m) per column
    summary: LpSummary


def check_feasible(cfg: Configuration) -> ValidationReport:
    """Evaluate the five feasibility conditions at tolerance 1e-9.

    Returns one violation per broken condition instance, with indices and
    residuals. Shape mismatches are structural faults, not violations.
    """
    inst = cfg.instance
    expected = (inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes)
    if cfg.x.shape != expected:
        raise ValueError(f"configuration shape {cfg.x.shape} does not match instance {expected}")

    report: ValidationReport = []
    x, d = cfg.x, inst.demand

    neg = np.argwhere(x < -FEAS_TOL)
    for i, j, k, m in neg:
        report.append(
            Violation("nonnegativity", f"x[{i},{j},{k},{m}] = {x[i, j, k, m]:.3e} < 0")
        )

    intra = x.sum(axis=3)
    for i in range(inst.n_zones):
        for k in range(inst.n_populations):
            if intra[i, i, k] > FEAS_TOL:
                report.append(
                    Violation("no-intra-zone", f"sum_m x[{i},{i},{k},m] = {intra[i, i, k]:.3e} != 0")
                )

    sums = x.sum(axis=3)
    for i, j, k in inst.demand_triples():
        resid = sums[i, j, k] - 1.0
        if abs(resid) > FEAS_TOL:
            report.append(
                Violation("unit-split", f"sum_m x[{i},{j},{k},m] = 1{resid:+.3e}")
            )

    flows = d[:, :, :, None] * x
    for k in range(inst.n_populations):
        total = math.fsum(flows[:, :, k, :].ravel())
        resid = total - inst.population_sizes[k]
        if abs(resid) > FEAS_TOL:
            report.append(
                Violation(
                    "population-total",
                    f"sum d*x for k={k} is {total:.12g}, expected {inst.population_sizes[k]:.12g}",
                )
            )

    loads = cfg.loads()
    for i in range(inst.n_zones):
        for m in range(inst.n_modes):
            cap = inst.capacity[i, m]
            if cap == UNBOUNDED:
                continue
            excess = loads[i, m] - cap
            if excess > FEAS_TOL:
                report.append(
                    Violation("capacity", f"load[{i},{m}] = {loads[i, m]:.12g} exceeds C = {cap:.12g} by {excess:.3e}")
                )
    return report


def _solve_zone(costs: np.ndarray, supplies: np.ndarray, caps: np.ndarray):
    """Exact min-cost assignment of demand bundles to capacitated modes.

    costs[s, m] is the per-unit cost of bundle s on mode m, supplies[s]
    the bundle size, caps[m] the seat limit (may be +inf). Bundles are
    routed one at a time in index order; each augmentation follows a
    shortest path in the residual graph, which preserves optimality of
    the partial flow. Shortest paths use Dijkstra over reduced costs with
    node potentials, so predecessor chains are cycle-free by construction
    even under floating-point noise. Ties resolve toward lower mode
    index, then lower bundle index, via the fixed node-selection order
    with strict improvement.

    Returns (y, iterations) with y[s, m] the assigned amounts.
    """
    n_s, n_m = costs.shape
    y = np.zeros((n_s, n_m))
    load = np.zeros(n_m)
    sink = n_s + n_m  # node ids: bundles 0..S-1, modes S..S+M-1, sink
    n_nodes = n_s + n_m + 1
    pi = np.zeros(n_nodes)  # potentials keep residual reduced costs >= 0
    iterations = 0

    for s0 in range(n_s):
        remaining = float(supplies[s0])
        while remaining > _FLOW_EPS:
            dist = np.full(n_nodes, np.inf)
            pred = np.full(n_nodes, -1, dtype=np.int64)
            done = np.zeros(n_nodes, dtype=bool)
            dist[s0] = 0.0
            while True:
                u = -1
                best = np.inf
                for v in range(n_nodes):
                    if not done[v] and dist[v] < best:
                        best = dist[v]
                        u = v
                if u < 0:
                    break
                done[u] = True
                if u == sink:
                    continue
                if u < n_s:
                    for m in range(n_m):
                        v = n_s + m
                        if done[v]:
                            continue
                        w = max(0.0, costs[u, m] + pi[u] - pi[v])
                        if dist[u] + w < dist[v]:
                            dist[v] = dist[u] + w
                            pred[v] = u
                else:
                    m = u - n_s
                    for s in range(n_s):
                        if done[s] or y[s, m] <= _FLOW_EPS:
                            continue
                        w = max(0.0, -costs[s, m] + pi[u] - pi[s])
                        if dist[u] + w < dist[s]:
                            dist[s] = dist[u] + w
                            pred[s] = u
                    if not done[sink] and caps[m] - load[m] > _FLOW_EPS:
                        w = max(0.0, pi[u] - pi[sink])
                        if dist[u] + w < dist[sink]:
                            dist[sink] = dist[u] + w
                            pred[sink] = u
            if not np.isfinite(dist[sink]):
                # Unreachable when a mode has unbounded capacity.
                raise InfeasibleInstanceError(
                    "zone demand exceeds total mode capacity and no unbounded mode exists"
                )
            # Fold distances into the potentials, capping unreached nodes
            # at the sink distance so every residual arc stays >= 0.
            d_cap = dist[sink]
            for v in range(n_nodes):
                pi[v] += dist[v] if dist[v] < d_cap else d_cap

            # Trace the augmenting path and find the bottleneck.
            path = []
            node = sink
            while node != s0:
                prev = int(pred[node])
                path.append((prev, node))
                node = prev
                if len(path) > n_nodes:
                    raise RuntimeError("augmenting-path trace cycled; solver defect")
            path.reverse()
            amount = remaining
            for u, v in path:
                if v == sink:
                    residual = caps[u - n_s] - load[u - n_s]
                elif u >= n_s:  # mode -> bundle (undo a previous assignment)
                    residual = y[v, u - n_s]
                else:  # bundle -> mode, uncapacitated
                    residual = math.inf
                if residual < amount:
                    amount = residual

            for u, v in path:
                if v == sink:
                    continue
                if u >= n_s:
                    y[v, u - n_s] = max(y[v, u - n_s] - amount, 0.0)
                else:
                    y[u, v - n_s] += amount
            # Loads follow from y exactly; recomputing avoids drift.
            load = y.sum(axis=0)
            remaining -= amount
            iterations += 1
    return y, iterations


def solve_equilibrium(inst: GameInstance) -> tuple[Configuration, SolveStats]:
    """Minimum-total-cost feasible split, computed zone by zone.

    The result is deterministic (bit-identical across runs) and, by the
    optimality of each transportation subproblem, an equilibrium: every
    traveler's mode is no costlier than any unsaturated alternative.
    """
    for k in range(inst.n_populations):
        total = math.fsum(inst.demand[:, :, k].ravel())
        if abs(total - inst.population_sizes[k]) > FEAS_TOL * max(1.0, inst.population_sizes[k]):
            raise InfeasibleInstanceError(
                f"population {k}: demand total {total:g} != size {inst.population_sizes[k]:g}"
            )

    t0 = time.perf_counter()
    n, n_m, n_k = inst.n_zones, inst.n_modes, inst.n_populations
    x = np.zeros((n, n, n_k, n_m))
    per_zone = []
    for i in range(n):
        bundles = [
            (j, k)
            for j in range(n)
            for k in range(n_k)
            if inst.demand[i, j, k] > 0.0
        ]
        if not bundles:
            per_zone.append(0)
            continue
        costs = np.array([[inst.cost[i, j, k, m] for m in range(n_m)] for (j, k) in bundles])
        supplies = np.array([inst.demand[i, j, k] for (j, k) in bundles])
        y, iters = _solve_zone(costs, supplies, inst.capacity[i])
        per_zone.append(iters)
        for s, (j, k) in enumerate(bundles):
            x[i, j, k, :] = y[s] / supplies[s]

    cfg = Configuration(x=x, instance=inst)
    stats = SolveStats(
        objective=cfg.objective(),
        per_zone_iterations=tuple(per_zone),
        wall_time_s=time.perf_counter() - t0,
        solver_kind="decomposed",
    )
    return cfg, stats


def assemble_lp(inst: GameInstance) -> AssembledLp:
    """Build the full LP verbatim: objective sum c*d*x, per-(zone, mode)
    capacity rows, unit-split rows per nonzero-demand triple, and the
    redundant per-population total rows.

    Variables exist only for nonzero-demand triples; (zone, mode) pairs
    with unbounded capacity yield vacuous rows and are skipped (their
    count is reported in the summary).
    """
    triples = inst.demand_triples()
    n_m = inst.n_modes
    variables = [(i, j, k, m) for (i, j, k) in triples for m in range(n_m)]
    n_vars = len(variables)
    col = {v: idx for idx, v in enumerate(variables)}

    c = np.array([inst.cost[i, j, k, m] * inst.demand[i, j, k] for (i, j, k, m) in variables])

    ub_rows, b_ub = [], []
    n_unbounded = 0
    for i in range(inst.n_zones):
        for m in range(n_m):
            if inst.capacity[i, m] == UNBOUNDED:
                n_unbounded += 1
                continue
            row = np.zeros(n_vars)
            for j in range(inst.n_zones):
                for k in range(inst.n_populations):
                    key = (i, j, k, m)
                    if key in col:
                        row[col[key]] = inst.demand[i, j, k]
            ub_rows.append(row)
            b_ub.append(inst.capacity[i, m])

    eq_rows, b_eq = [], []
    for (i, j, k) in triples:
        row = np.zeros(n_vars)
        for m in range(n_m):
            row[col[(i, j, k, m)]] = 1.0
        eq_rows.append(row)
        b_eq.append(1.0)
    n_route_rows = len(eq_rows)
    for k in range(inst.n_populations):
        row = np.zeros(n_vars)
        for idx, (i, j, kk, m) in enumerate(variables):
            if kk == k:
                row[idx] = inst.demand[i, j, kk]
        eq_rows.append(row)
        b_eq.append(float(inst.population_sizes[k]))

    summary = LpSummary(
        n_variables=n_vars,
        n_capacity_rows=len(ub_rows),
        n_unbounded_capacities=n_unbounded,
        n_route_rows=n_route_rows,
        n_population_rows=inst.n_populations,
    )
    a_ub = np.array(ub_rows) if ub_rows else np.zeros((0, n_vars))
    a_eq = np.array(eq_rows) if eq_rows else np.zeros((0, n_vars))
    return AssembledLp(
        c=c,
        a_ub=a_ub,
        b_ub=np.array(b_ub),
        a_eq=a_eq,
        b_eq=np.array(b_eq),
        variables=variables,
        summary=summary,
    )


def oracle_solve(inst: GameInstance) -> tuple[Configuration, SolveStats]:
    """Cross-check path: solve the fully assembled LP with an off-the-shelf
    exact method (HiGHS simplex family). Intended for tests and the
    ``--oracle`` CLI path on small instances only.
    """
    n_total = inst.n_zones * inst.n_zones * inst.n_modes * inst.n_populations
    if n_total > ORACLE_MAX_VARIABLES:
        raise OracleSizeError(
            f"{n_total} variables exceeds the oracle cap of {ORACLE_MAX_VARIABLES}"
        )
    t0 = time.perf_counter()
    lp = assemble_lp(inst)
    if lp.summary.n_variables == 0:
        cfg = Configuration(
            x=np.zeros((inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes)),
            instance=inst,
        )
        return cfg, SolveStats(0.0, (), time.perf_counter() - t0, "oracle")

    res = linprog(
        lp.c,
        A_ub=lp.a_ub if lp.a_ub.size else None,
        b_ub=lp.b_ub if lp.b_ub.size else None,
        A_eq=lp.a_eq,
        b_eq=lp.b_eq,
        bounds=(0, None),
        method="highs",
    )
    if res.status == 2:
        raise InfeasibleInstanceError("oracle LP is infeasible: " + res.message)
    if not res.success:
        raise InfeasibleInstanceError(f"oracle LP failed (status {res.status}): {res.message}")

    x = np.zeros((inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes))
    for idx, (i, j, k, m) in enumerate(lp.variables):
        x[i, j, k, m] = res.x[idx]
    cfg = Configuration(x=x, instance=inst)
    stats = SolveStats(
        objective=float(res.fun),
        per_zone_iterations=(),
        wall_time_s=time.perf_counter() - t0,
        solver_kind="oracle",
    )
    return cfg, stats


def verify_nash(cfg: Configuration) -> NashCertificate:
    """Check the deviation criterion for every used mode.

    A split is an equilibrium when for every (i, j, k, m) with positive
    share, every alternative mode m' is either at least as costly or
    saturated at origin i. Costs are load-independent constants, so the
    check reduces to comparing the cost tensor against per-origin loads.
    """
    inst = cfg.instance
    loads = cfg.loads()
    witnesses = []
    for (i, j, k) in inst.demand_triples():
        for m in range(inst.n_modes):
            if cfg.x[i, j, k, m] <= SUPPORT_TOL:
                continue
            c_m = inst.cost[i, j, k, m]
            for m_alt in range(inst.n_modes):
                if m_alt == m:
                    continue
                c_alt = inst.cost[i, j, k, m_alt]
                if c_m <= c_alt + NASH_TOL:
                    continue
                cap_alt = inst.capacity[i, m_alt]
                if cap_alt != UNBOUNDED and loads[i, m_alt] >= cap_alt - NASH_TOL:
                    continue
                slack = math.inf if cap_alt == UNBOUNDED else cap_alt - loads[i, m_alt]
                witnesses.append(
                    NashWitness(i, j, k, m, m_alt, float(c_m), float(c_alt), float(slack))
                )
    return NashCertificate(verdict=not witnesses, witnesses=tuple(witnesses))
