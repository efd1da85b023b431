"""Command-line entry point: validate, solve, replay, compare, serve.

Machine-readable output goes to stdout, diagnostics to stderr. Exit
codes: 0 success, 1 validation/regression failure, 2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .citydata import (
    load_city,
    load_controls,
    load_session,
    report_to_dict,
)
from .equilibrium import oracle_solve
from .errors import MobeqError, SolverVerifierDisagreement
from .metrics import zone_mode_revenue
from .model import validate_city
from .session import EquilibriumReport, create_session, diff_iterations, run_iteration

# CSV column order is frozen for spreadsheet users; do not reorder.
CSV_COLUMNS = ("zone", "mode", "share", "riders", "revenue")


def _eprint(*args):
    print(*args, file=sys.stderr)


def cmd_validate(args) -> int:
    city = load_city(args.city)  # raises on schema/semantic errors
    report = validate_city(city)
    if report:
        for v in report:
            print(str(v))
        return 1
    print(f"{city.name}: valid ({city.n_zones} zones, {city.n_populations} populations, "
          f"{len(city.modes)} modes + walking, {city.demand.total():g} travelers)")
    return 0


def _report_csv(city, inst, report: EquilibriumReport) -> str:
    modes = city.all_modes()
    revenue_im = zone_mode_revenue(inst, report.configuration)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i in range(inst.n_zones):
        for m_idx, mode in enumerate(modes):
            writer.writerow([
                i,
                mode.name,
                repr(report.kpis.mode_share[i][mode.name]),
                repr(report.kpis.riders[i][mode.name]),
                repr(float(revenue_im[i, m_idx])),
            ])
    kpis = report.kpis
    writer.writerow(["kpi", "avg_travel_time_min", repr(kpis.avg_travel_time_min)])
    writer.writerow(["kpi", "co2_kg", repr(kpis.co2_kg)])
    writer.writerow(["kpi", "tax_revenue", repr(kpis.tax_revenue)])
    for mode in modes:
        writer.writerow(["kpi", f"revenue[{mode.name}]", repr(kpis.revenue[mode.name])])
        writer.writerow(["kpi", f"operating_cost[{mode.name}]", repr(kpis.operating_cost[mode.name])])
    writer.writerow(["kpi", "objective_usd", repr(report.stats.objective)])
    return buf.getvalue()


def cmd_solve(args) -> int:
    city = load_city(args.city)
    controls = load_controls(args.controls, city)
    session = create_session(city)
    report = run_iteration(session, controls)
    inst = report.configuration.instance

    if args.oracle:
        _, oracle_stats = oracle_solve(inst)
        gap = abs(report.stats.objective - oracle_stats.objective)
        rel = gap / max(1.0, abs(oracle_stats.objective))
        _eprint(f"objective gap: {gap:.1e} (relative {rel:.1e})")
        if rel > 1e-6:
            _eprint("solver and oracle disagree beyond tolerance")
            return 2

    if args.format == "csv":
        out = _report_csv(city, inst, report)
    else:
        payload = report_to_dict(report, city)
        if args.oracle:
            payload["oracle_objective_usd"] = oracle_stats.objective
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(out)
        _eprint(f"wrote {args.out}")
    else:
        sys.stdout.write(out)
    return 0


def _kpi_scalars(kpis: dict, prefix: str = "") -> dict:
    """Flatten a KPI dict into dotted-path scalars for comparison."""
    flat = {}
    for key, value in kpis.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_kpi_scalars(value, path + "."))
        elif isinstance(value, list):
            for idx, item in enumerate(value):
                if isinstance(item, dict):
                    flat.update(_kpi_scalars(item, f"{path}[{idx}]."))
                else:
                    flat[f"{path}[{idx}]"] = item
        else:
            flat[path] = value
    return flat


def cmd_replay(args) -> int:
    stored = load_session(args.session)
    fresh = create_session(stored.city)
    failures = 0
    for record in stored.history:
        report = run_iteration(fresh, record.controls)
        want = _kpi_scalars(record.kpis.to_dict())
        got = _kpi_scalars(report.kpis.to_dict())
        for path, expected in want.items():
            actual = got.get(path)
            if actual is None or abs(actual - expected) > 1e-9:
                _eprint(f"iteration {record.iteration}: {path} = {actual!r}, stored {expected!r}")
                failures += 1
    if failures:
        _eprint(f"replay FAILED: {failures} KPI deviations beyond 1e-9")
        return 1
    print(f"replay OK: {len(stored.history)} iterations reproduced")
    return 0


def cmd_compare(args) -> int:
    session = load_session(args.session)
    delta = diff_iterations(session, args.a, args.b)
    mode_names = [m.name for m in session.city.all_modes()]

    rows = [
        ("avg_travel_time_min", delta.avg_travel_time_min),
        ("co2_kg", delta.co2_kg),
        ("tax_revenue", delta.tax_revenue),
    ]
    rows += [(f"revenue[{m}]", delta.revenue[m]) for m in mode_names]
    rows += [(f"operating_cost[{m}]", delta.operating_cost[m]) for m in mode_names]

    width = max(len(name) for name, _ in rows)
    _eprint(f"deltas: iteration {args.b} minus iteration {args.a}")
    for name, value in rows:
        _eprint(f"  {name:<{width}}  {value:+.6g}")
    for i, zone_delta in enumerate(delta.mode_share):
        shifts = ", ".join(f"{m}: {zone_delta[m]:+.4f}" for m in mode_names)
        _eprint(f"  zone {i} share  {shifts}")

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["metric", "delta"])
    for name, value in rows:
        writer.writerow([name, repr(value)])
    for i, zone_delta in enumerate(delta.mode_share):
        for m in mode_names:
            writer.writerow([f"mode_share[zone {i}][{m}]", repr(zone_delta[m])])
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.addr, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobeq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a city file, print violations")
    p.add_argument("city")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve one scenario and emit the report")
    p.add_argument("city")
    p.add_argument("--controls", required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check against the dense LP oracle")
    p.add_argument("--out", help="write output to a file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("replay", help="re-execute a session file and compare KPIs")
    p.add_argument("session")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("compare", help="print KPI deltas between two iterations")
    p.add_argument("session")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--addr", default=os.environ.get("MOBEQ_ADDR", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("MOBEQ_PORT", "8000")))
    p.add_argument("--data-dir", default=None, help="directory for session persistence")
    p.add_argument("--ui-dir", default=None, help="built web UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverVerifierDisagreement as exc:
        _eprint(f"internal error: {exc}")
        for w in exc.witnesses:
            _eprint(f"  witness: {w}")
        return 2
    except MobeqError as exc:
        _eprint(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
