"""HTTP facade over sessions and solves, plus static serving of the UI.

All request and response bodies use the same JSON dialect as the city
and session files. Every 4xx/5xx body is an ApiError object:
``{"code": ..., "message": ..., "details": ...}``. Responses are
serialized canonically (sorted keys) so repeated solves of the same
scenario produce byte-identical payloads.
"""

from __future__ import annotations

import concurrent.futures
import json
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .citydata import (
    BUNDLED_CITY_IDS,
    bundled_city,
    bundled_controls_dict,
    city_from_dict,
    controls_from_dict,
    load_session,
    report_to_dict,
    save_session,
    schema_for,
)
from .errors import (
    CityValidationError,
    InvalidControlsError,
    MobeqError,
    SchemaError,
    SessionError,
    SolverVerifierDisagreement,
)
from .model import CityModel
from .session import Session, create_session, diff_iterations, run_iteration

DEFAULT_SOLVE_TIMEOUT_S = 30.0


def canonical_json(payload) -> bytes:
    """Stable byte encoding shared by the service and its contract tests."""
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def _json(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, code: str, message: str, details=None) -> Response:
    return _json({"code": code, "message": message, "details": details}, status_code)


class ServiceState:
    """Cities and sessions held by one service process."""

    def __init__(self, data_dir: str | None = None, include_bundled: bool = True):
        self.cities: dict[str, CityModel] = {}
        self.default_controls: dict[str, dict | None] = {}
        self.sessions: dict[str, Session] = {}
        self.session_city_id: dict[str, str] = {}
        self.data_dir = Path(data_dir) if data_dir else None
        if include_bundled:
            for cid in BUNDLED_CITY_IDS:
                self.cities[cid] = bundled_city(cid)
                self.default_controls[cid] = bundled_controls_dict(cid)
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.data_dir.glob("*.mobeq")):
                session = load_session(path)
                self.sessions[session.id] = session
                self.session_city_id[session.id] = "persisted"

    def persist(self, session: Session) -> None:
        if self.data_dir:
            save_session(session, self.data_dir / f"{session.id}.mobeq")

    def forget(self, session_id: str) -> None:
        if self.data_dir:
            path = self.data_dir / f"{session_id}.mobeq"
            if path.exists():
                path.unlink()

    def city_summary(self, cid: str) -> dict:
        city = self.cities[cid]
        controls = self.default_controls.get(cid)
        if controls is None:
            controls = {
                "fleet": {m.name: 0 for m in city.modes},
                "fare_overrides": {},
                "tax_rates": {},
            }
        return {
            "id": cid,
            "name": city.name,
            "n_zones": city.n_zones,
            "n_populations": city.n_populations,
            "n_modes": city.n_modes,
            "total_travelers": city.demand.total(),
            "zones": [
                {"id": z.id, "name": z.name, "latitude": z.latitude, "longitude": z.longitude}
                for z in city.zones
            ],
            "modes": [
                {
                    "name": m.name,
                    "fare": {"kind": m.fare.kind, "amount": m.fare.amount},
                    "taxable": m.taxable,
                }
                for m in city.all_modes()
            ],
            "populations": [
                {"name": p.name, "value_of_time_usd_per_hour": p.value_of_time, "size": p.size}
                for p in city.populations
            ],
            "default_controls": controls,
            "bundled": cid in BUNDLED_CITY_IDS,
        }


def create_app(
    data_dir: str | None = None,
    ui_dir: str | None = None,
    include_bundled: bool = True,
    solve_timeout_s: float = DEFAULT_SOLVE_TIMEOUT_S,
) -> FastAPI:
    app = FastAPI(title="mobeq", docs_url=None, redoc_url=None)
    state = ServiceState(data_dir=data_dir, include_bundled=include_bundled)
    app.state.mobeq = state
    pool = concurrent.futures.ThreadPoolExecutor(max_workers=4, thread_name_prefix="solve")

    @app.exception_handler(MobeqError)
    async def _mobeq_error(request: Request, exc: MobeqError):
        if isinstance(exc, SolverVerifierDisagreement):
            return _error(
                500,
                "solver-verifier-disagreement",
                str(exc),
                details=[str(w) for w in exc.witnesses],
            )
        if isinstance(exc, CityValidationError):
            return _error(
                422, "invalid-city", "city failed validation",
                details=[{"code": v.code, "message": v.message} for v in exc.report],
            )
        if isinstance(exc, SchemaError):
            return _error(422, "schema-violation", str(exc), details={"field": exc.field_path})
        if isinstance(exc, InvalidControlsError):
            return _error(422, "invalid-controls", str(exc))
        if isinstance(exc, SessionError):
            return _error(404, "unknown-iteration", str(exc))
        return _error(500, "internal", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        return _error(422, "invalid-body", "request body is not valid JSON of the expected shape",
                      details=json.loads(json.dumps(exc.errors(), default=str)))

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        return _error(exc.status_code, "http-error", str(exc.detail))

    def _session_or_none(session_id: str) -> Session | None:
        return state.sessions.get(session_id)

    @app.get("/api/v1/cities")
    def list_cities():
        return _json([state.city_summary(cid) for cid in state.cities])

    @app.post("/api/v1/cities")
    def upload_city(body: dict = Body(...)):
        city = city_from_dict(body)  # SchemaError/CityValidationError -> 422
        cid = uuid.uuid4().hex[:12]
        state.cities[cid] = city
        state.default_controls[cid] = None
        return _json({"city_id": cid, "name": city.name}, status_code=201)

    @app.get("/api/v1/schemas/{kind}")
    def get_schema(kind: str):
        if kind not in ("city", "controls", "session"):
            return _error(404, "not-found", f"no schema named {kind!r}")
        return _json(schema_for(kind))

    @app.post("/api/v1/sessions")
    def new_session(body: dict = Body(...)):
        cid = body.get("city_id")
        if cid not in state.cities:
            return _error(404, "not-found", f"unknown city_id {cid!r}")
        session = create_session(state.cities[cid])
        state.sessions[session.id] = session
        state.session_city_id[session.id] = cid
        return _json({"session_id": session.id, "city_id": cid}, status_code=201)

    @app.post("/api/v1/sessions/{session_id}/iterations")
    def post_iteration(session_id: str, request: Request, body: dict = Body(...)):
        session = _session_or_none(session_id)
        if session is None:
            return _error(404, "not-found", f"unknown session {session_id!r}")
        controls = controls_from_dict(body, session.city)
        future = pool.submit(run_iteration, session, controls)
        try:
            report = future.result(timeout=solve_timeout_s)
        except concurrent.futures.TimeoutError:
            return _error(
                504, "solve-timeout",
                f"solve exceeded {solve_timeout_s:g}s; the iteration will still be "
                "appended when it completes",
            )
        state.persist(session)
        include_cfg = request.query_params.get("include") == "configuration"
        return _json(report_to_dict(report, session.city, include_configuration=include_cfg))

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = _session_or_none(session_id)
        if session is None:
            return _error(404, "not-found", f"unknown session {session_id!r}")
        return _json({
            "session_id": session.id,
            "city_name": session.city.name,
            "iterations": [
                report_to_dict(r, session.city, include_configuration=False)
                for r in session.history
            ],
        })

    @app.get("/api/v1/sessions/{session_id}/diff")
    def get_diff(session_id: str, a: int, b: int):
        session = _session_or_none(session_id)
        if session is None:
            return _error(404, "not-found", f"unknown session {session_id!r}")
        return _json(diff_iterations(session, a, b).to_dict())

    @app.delete("/api/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        if session_id not in state.sessions:
            return _error(404, "not-found", f"unknown session {session_id!r}")
        del state.sessions[session_id]
        state.session_city_id.pop(session_id, None)
        state.forget(session_id)
        return Response(status_code=204)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
