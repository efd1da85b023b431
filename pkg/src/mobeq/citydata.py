"""On-disk formats: strict-JSON city, controls, and session documents.

Every document is validated twice: structurally against a published JSON
Schema (unknown keys are rejected), then semantically through the model
validators, so hand-edited files fail loudly with a precise field path
instead of being silently patched up.
"""

from __future__ import annotations

import json
from importlib.resources import files
from pathlib import Path
import numpy as np
import jsonschema

from .equilibrium import Configuration, NashCertificate, NashWitness, SolveStats
from .errors import CityValidationError, InvalidControlsError, SchemaError, SessionError
from .metrics import KpiBundle
from .model import (
    CityModel,
    DemandTensor,
    FareScheme,
    Mode,
    Population,
    ScenarioControls,
    Zone,
    build_instance,
    validate_city,
    DEFAULT_CIRCUITY,
    DEFAULT_WINDOW_HOURS,
    DEFAULT_WALKING_SPEED_MPH,
    WALKING_MODE_NAME,
)
from .session import EquilibriumReport, Session

SCHEMA_DIR = files("mobeq").joinpath("schemas")
DATA_DIR = files("mobeq").joinpath("data")

# Engine defaults for optional per-mode fields, keyed by mode name.
# These are engineering estimates, not survey data; city files may (and
# the bundled ones do) state every value explicitly.
MODE_FIELD_DEFAULTS = {
    "bus": {"seats_per_vehicle": 50, "emissions_g_per_vehicle_mile": 2800.0,
            "operating_cost_usd_per_vehicle_hour": 90.0},
    "amod": {"seats_per_vehicle": 4, "emissions_g_per_vehicle_mile": 350.0,
             "operating_cost_usd_per_vehicle_hour": 12.0},
    "bike": {"seats_per_vehicle": 1, "emissions_g_per_vehicle_mile": 0.0,
             "operating_cost_usd_per_vehicle_hour": 0.5},
}
_FALLBACK_MODE_DEFAULTS = {
    "seats_per_vehicle": 1,
    "emissions_g_per_vehicle_mile": 0.0,
    "operating_cost_usd_per_vehicle_hour": 0.0,
}


def _load_schema(name: str) -> dict:
    return json.loads(SCHEMA_DIR.joinpath(name).read_text(encoding="utf-8"))


_SCHEMAS = {
    "city": _load_schema("city.schema.json"),
    "controls": _load_schema("controls.schema.json"),
    "session": _load_schema("session.schema.json"),
}


def schema_for(kind: str) -> dict:
    """The published machine-readable schema (city|controls|session)."""
    return json.loads(json.dumps(_SCHEMAS[kind]))


def _validate_schema(data, kind: str) -> None:
    validator = jsonschema.Draft202012Validator(_SCHEMAS[kind])
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "(document root)"
        raise SchemaError(f"{kind} document invalid at {path}: {err.message}", field_path=path)


def _read_json(source) -> dict:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        raise TypeError(f"expected path or stream, got {type(source)!r}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def city_from_dict(data: dict) -> CityModel:
    """Strict parse -> validate -> CityModel; raises on any violation."""
    _validate_schema(data, "city")
    if data["schema_version"] != "1":
        raise SchemaError(f"unsupported schema_version {data['schema_version']!r}; expected \"1\"")

    zones = tuple(
        Zone(id=z["id"], name=z["name"], latitude=z["latitude"], longitude=z["longitude"])
        for z in sorted(data["zones"], key=lambda z: z["id"])
    )
    populations = tuple(
        Population(
            id=p["id"],
            name=p["name"],
            value_of_time=p["value_of_time_usd_per_hour"],
            size=p["size"],
        )
        for p in sorted(data["populations"], key=lambda p: p["id"])
    )
    modes = []
    for m in sorted(data["modes"], key=lambda m: m["id"]):
        defaults = MODE_FIELD_DEFAULTS.get(m["name"], _FALLBACK_MODE_DEFAULTS)
        modes.append(
            Mode(
                id=m["id"],
                name=m["name"],
                speed_mph=m["speed_mph"],
                fare=FareScheme(kind=m["fare"]["kind"], amount=m["fare"]["amount"]),
                seats_per_vehicle=m.get("seats_per_vehicle", defaults["seats_per_vehicle"]),
                emissions_g_per_vehicle_mile=m.get(
                    "emissions_g_per_vehicle_mile", defaults["emissions_g_per_vehicle_mile"]
                ),
                operating_cost_per_vehicle_hour=m.get(
                    "operating_cost_usd_per_vehicle_hour",
                    defaults["operating_cost_usd_per_vehicle_hour"],
                ),
                taxable=m.get("taxable", False),
            )
        )

    entries = {}
    from .model import Violation

    dupes = []
    for rec in data["demand"]:
        key = (rec["from"], rec["to"], rec["population"])
        if key in entries:
            dupes.append(Violation("demand-duplicate", f"demand entry {key} appears more than once"))
        entries[key] = entries.get(key, 0.0) + rec["count"]
    if dupes:
        raise CityValidationError(dupes)

    overrides = {
        (o["from"], o["to"], o["mode"]): o["hours"]
        for o in data.get("travel_time_overrides", [])
    }
    defaults = data.get("defaults", {})
    city = CityModel(
        schema_version=data["schema_version"],
        name=data["name"],
        zones=zones,
        populations=populations,
        modes=tuple(modes),
        demand=DemandTensor(entries),
        travel_time_overrides=overrides,
        circuity=defaults.get("circuity", DEFAULT_CIRCUITY),
        window_hours=defaults.get("window_hours", DEFAULT_WINDOW_HOURS),
        walking_speed=defaults.get("walking_speed_mph", DEFAULT_WALKING_SPEED_MPH),
    )
    report = validate_city(city)
    if report:
        raise CityValidationError(report)
    return city


def city_to_dict(city: CityModel, notes=None) -> dict:
    data = {
        "schema_version": city.schema_version,
        "name": city.name,
        "zones": [
            {"id": z.id, "name": z.name, "latitude": z.latitude, "longitude": z.longitude}
            for z in city.zones
        ],
        "populations": [
            {
                "id": p.id,
                "name": p.name,
                "value_of_time_usd_per_hour": p.value_of_time,
                "size": p.size,
            }
            for p in city.populations
        ],
        "modes": [
            {
                "id": m.id,
                "name": m.name,
                "speed_mph": m.speed_mph,
                "fare": {"kind": m.fare.kind, "amount": m.fare.amount},
                "seats_per_vehicle": m.seats_per_vehicle,
                "emissions_g_per_vehicle_mile": m.emissions_g_per_vehicle_mile,
                "operating_cost_usd_per_vehicle_hour": m.operating_cost_per_vehicle_hour,
                "taxable": m.taxable,
            }
            for m in city.modes
        ],
        "demand": [
            {"from": i, "to": j, "population": k, "count": v}
            for (i, j, k), v in sorted(city.demand.items())
        ],
        "defaults": {
            "circuity": city.circuity,
            "window_hours": city.window_hours,
            "walking_speed_mph": city.walking_speed,
        },
    }
    if city.travel_time_overrides:
        data["travel_time_overrides"] = [
            {"from": i, "to": j, "mode": m, "hours": h}
            for (i, j, m), h in sorted(city.travel_time_overrides.items())
        ]
    if notes:
        data["notes"] = notes
    return data


def load_city(source) -> CityModel:
    """Read a city document from a path or stream."""
    return city_from_dict(_read_json(source))


def save_city(city: CityModel, path, notes=None) -> None:
    Path(path).write_text(json.dumps(city_to_dict(city, notes=notes), indent=2) + "\n", encoding="utf-8")


def controls_from_dict(data: dict, city: CityModel) -> ScenarioControls:
    """Parse controls keyed by mode name into index-keyed controls."""
    _validate_schema(data, "controls")
    mode_index = {m.name: idx for idx, m in enumerate(city.all_modes())}

    def mode_id(name: str) -> int:
        if name == WALKING_MODE_NAME:
            raise InvalidControlsError(f"walking accepts no {name!r} controls")
        if name not in mode_index:
            raise InvalidControlsError(f"unknown mode {name!r}; city has {sorted(mode_index)}")
        return mode_index[name]

    fleet = {}
    for name, value in data.get("fleet", {}).items():
        m = mode_id(name)
        if isinstance(value, list):
            if len(value) != city.n_zones:
                raise InvalidControlsError(
                    f"fleet[{name!r}] lists {len(value)} zones; city has {city.n_zones}"
                )
            for i, count in enumerate(value):
                fleet[(i, m)] = int(count)
        else:
            for i in range(city.n_zones):
                fleet[(i, m)] = int(value)

    fare_overrides = {
        mode_id(name): FareScheme(kind=v["kind"], amount=v["amount"])
        for name, v in data.get("fare_overrides", {}).items()
    }
    tax_rates = {mode_id(name): float(v) for name, v in data.get("tax_rates", {}).items()}
    return ScenarioControls(fleet=fleet, fare_overrides=fare_overrides, tax_rates=tax_rates)


def controls_to_dict(controls: ScenarioControls, city: CityModel) -> dict:
    """Canonical JSON form: per-zone fleet lists keyed by mode name."""
    modes = city.all_modes()
    fleet = {}
    for (i, m), count in controls.fleet.items():
        fleet.setdefault(modes[m].name, [0] * city.n_zones)[i] = int(count)
    return {
        "fleet": {name: fleet[name] for name in sorted(fleet)},
        "fare_overrides": {
            modes[m].name: {"kind": s.kind, "amount": s.amount}
            for m, s in sorted(controls.fare_overrides.items())
        },
        "tax_rates": {modes[m].name: r for m, r in sorted(controls.tax_rates.items())},
    }


def load_controls(source, city: CityModel) -> ScenarioControls:
    return controls_from_dict(_read_json(source), city)


def save_controls(controls: ScenarioControls, city: CityModel, path) -> None:
    Path(path).write_text(
        json.dumps(controls_to_dict(controls, city), indent=2) + "\n", encoding="utf-8"
    )


def report_to_dict(
    report: EquilibriumReport, city: CityModel, include_configuration: bool = True
) -> dict:
    data = {
        "iteration": report.iteration,
        "controls": controls_to_dict(report.controls, city),
        "kpis": report.kpis.to_dict(),
        "nash": {
            "verdict": report.nash.verdict,
            "witnesses": [
                {
                    "i": w.i, "j": w.j, "k": w.k,
                    "mode": w.mode, "mode_alt": w.mode_alt,
                    "cost": w.cost, "cost_alt": w.cost_alt, "slack_alt": w.slack_alt,
                }
                for w in report.nash.witnesses
            ],
        },
        "stats": {
            "objective_usd": report.stats.objective,
            "per_zone_iterations": list(report.stats.per_zone_iterations),
            "wall_time_s": report.stats.wall_time_s,
            "solver_kind": report.stats.solver_kind,
        },
        "timestamp": report.timestamp,
    }
    if include_configuration:
        data["configuration"] = report.sparse_x()
    return data


def _report_from_dict(data: dict, city: CityModel) -> EquilibriumReport:
    controls = controls_from_dict(data["controls"], city)
    inst = build_instance(city, controls)
    x = np.zeros((inst.n_zones, inst.n_zones, inst.n_populations, inst.n_modes))
    for i, j, k, m, v in data["configuration"]:
        x[i, j, k, m] = v
    nash = NashCertificate(
        verdict=data["nash"]["verdict"],
        witnesses=tuple(
            NashWitness(
                i=w["i"], j=w["j"], k=w["k"], mode=w["mode"], mode_alt=w["mode_alt"],
                cost=w["cost"], cost_alt=w["cost_alt"], slack_alt=w["slack_alt"],
            )
            for w in data["nash"]["witnesses"]
        ),
    )
    stats = SolveStats(
        objective=data["stats"]["objective_usd"],
        per_zone_iterations=tuple(data["stats"]["per_zone_iterations"]),
        wall_time_s=data["stats"]["wall_time_s"],
        solver_kind=data["stats"]["solver_kind"],
    )
    return EquilibriumReport(
        iteration=data["iteration"],
        controls=controls,
        configuration=Configuration(x=x, instance=inst),
        kpis=KpiBundle.from_dict(data["kpis"]),
        nash=nash,
        stats=stats,
        timestamp=data["timestamp"],
    )


def session_to_dict(session: Session) -> dict:
    return {
        "schema_version": "1",
        "kind": "session",
        "id": session.id,
        "city": city_to_dict(session.city),
        "history": [report_to_dict(r, session.city) for r in session.history],
    }


def session_from_dict(data: dict) -> Session:
    if not isinstance(data, dict) or data.get("kind") != "session":
        raise SchemaError("not a session document (missing kind: session)")
    version = data.get("schema_version")
    if version != "1":
        raise SchemaError(f"unsupported schema_version {version!r}; this engine reads version \"1\"")
    _validate_schema(data, "session")
    city = city_from_dict(data["city"])
    session = Session(id=data["id"], city=city)
    for entry in data["history"]:
        session.history.append(_report_from_dict(entry, city))
    expected = list(range(1, len(session.history) + 1))
    if [r.iteration for r in session.history] != expected:
        raise SessionError(f"history iterations must be numbered {expected[:3]}..., contiguously")
    return session


def load_session(source) -> Session:
    return session_from_dict(_read_json(source))


def save_session(session: Session, path) -> None:
    Path(path).write_text(json.dumps(session_to_dict(session), indent=2) + "\n", encoding="utf-8")


BUNDLED_CITY_IDS = ("boston", "lugano", "kyiv")


def bundled_city(city_id: str) -> CityModel:
    resource = DATA_DIR.joinpath(f"{city_id}.city")
    return city_from_dict(json.loads(resource.read_text(encoding="utf-8")))


def bundled_datasets() -> list[CityModel]:
    """The shipped cities: Boston/Cambridge plus two scaffolds."""
    return [bundled_city(cid) for cid in BUNDLED_CITY_IDS]


def bundled_controls(city_id: str) -> ScenarioControls | None:
    """The nominal controls shipped alongside a bundled city, if any."""
    resource = DATA_DIR.joinpath(f"{city_id}_nominal.controls")
    try:
        text = resource.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None
    return controls_from_dict(json.loads(text), bundled_city(city_id))


def bundled_controls_dict(city_id: str) -> dict | None:
    resource = DATA_DIR.joinpath(f"{city_id}_nominal.controls")
    try:
        return json.loads(resource.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return None
