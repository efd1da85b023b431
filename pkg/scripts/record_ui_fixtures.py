#!/usr/bin/env python3
"""Record API responses for the frontend contract tests.

Replays the two reference scenarios through the real HTTP stack and
stores the raw response bodies under frontend/fixtures/. The UI tests
assert that rendered charts display exactly these values.

Run from the repository root:  python3 scripts/record_ui_fixtures.py
"""

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from mobeq.service import create_app  # noqa: E402

FIXTURE_DIR = REPO / "frontend" / "fixtures"


def record_session(client, nominal, adjust, path):
    sid = client.post("/api/v1/sessions", json={"city_id": "boston"}).json()["session_id"]
    first = client.post(f"/api/v1/sessions/{sid}/iterations", json=nominal)
    assert first.status_code == 200, first.text
    second_controls = adjust(json.loads(json.dumps(nominal)))
    second = client.post(f"/api/v1/sessions/{sid}/iterations", json=second_controls)
    assert second.status_code == 200, second.text
    diff = client.get(f"/api/v1/sessions/{sid}/diff?a=1&b=2")
    assert diff.status_code == 200, diff.text
    payload = {
        "iterations": [first.json(), second.json()],
        "diff": diff.json(),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app(include_bundled=True))

    cities = client.get("/api/v1/cities")
    assert cities.status_code == 200
    (FIXTURE_DIR / "cities.json").write_text(
        json.dumps(cities.json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {FIXTURE_DIR / 'cities.json'}")

    nominal = next(c for c in cities.json() if c["id"] == "boston")["default_controls"]

    def doubled_buses(controls):
        controls["fleet"]["bus"] = 2 * controls["fleet"]["bus"]
        return controls

    def pricier_amod(controls):
        controls["fare_overrides"]["amod"] = {"kind": "per_mile", "amount": 2.0}
        return controls

    record_session(client, nominal, doubled_buses, FIXTURE_DIR / "golden_doubled_buses.json")
    record_session(client, nominal, pricier_amod, FIXTURE_DIR / "golden_pricier_amod.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
