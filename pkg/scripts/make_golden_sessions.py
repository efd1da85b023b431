#!/usr/bin/env python3
"""Record the two reference sessions used by the regression suite.

Each session starts from the bundled Boston nominal controls and applies
one adjustment: doubling the bus fleet, or doubling the robotaxi
per-mile fare. The saved files are self-contained (they embed the city)
and `mobeq replay <file>` re-solves them and compares every KPI.

Run from the repository root:  python3 scripts/make_golden_sessions.py
"""

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from mobeq.citydata import (  # noqa: E402
    bundled_city,
    bundled_controls_dict,
    controls_from_dict,
    save_session,
)
from mobeq.session import create_session, run_iteration  # noqa: E402

DATA_DIR = REPO / "src" / "mobeq" / "data"


def record(city, adjustments, path) -> None:
    nominal = bundled_controls_dict("boston")
    session = create_session(city)
    run_iteration(session, controls_from_dict(nominal, city))
    for adjust in adjustments:
        run_iteration(session, controls_from_dict(adjust(json.loads(json.dumps(nominal))), city))
    save_session(session, path)
    print(f"wrote {path} ({len(session.history)} iterations)")


def double_buses(controls: dict) -> dict:
    controls["fleet"]["bus"] = 2 * controls["fleet"]["bus"]
    return controls


def double_amod_fare(controls: dict) -> dict:
    controls["fare_overrides"]["amod"] = {"kind": "per_mile", "amount": 2.0}
    return controls


def main() -> int:
    city = bundled_city("boston")
    record(city, [double_buses], DATA_DIR / "golden_boston_session.mobeq")
    record(city, [double_amod_fare], DATA_DIR / "golden_boston_amod_session.mobeq")
    return 0


if __name__ == "__main__":
    sys.exit(main())
