#!/usr/bin/env python3
"""Record real service responses as test fixtures for the console.

Drives the combodose FastAPI app in-process through its test client and
dumps every response the UI would see while conducting the reference
trial (seed 1, 3x3 grid, N=30, predictive early completion).  The vitest
suite replays these documents, so the frontend is tested against the
exact JSON the server produces.

Usage:
    python scripts/make_fixtures.py   # from frontend/, rewrites tests/fixtures/
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from combodose.service import create_app

OUTCOMES = [0, 1, 0, 0, 2, 1, 2, 2]
CONFIG = {
    "design": "boin",
    "phi": 0.3,
    "variant": "drp",
    "tau": 0.4,
    "N": 30,
    "cohort_size": 3,
    "J": 3,
    "K": 3,
    "seed": 1,
}


def main():
    out_dir = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp, TestClient(create_app(tmp)) as client:
        created = client.post("/trials", json=CONFIG)
        assert created.status_code == 201, created.text
        doc = created.json()
        trial_id = doc["id"]
        initial_rates = client.get(f"/trials/{trial_id}/rates").json()

        steps = []
        whatif_before_last = None
        for i, dlt in enumerate(OUTCOMES):
            if i == len(OUTCOMES) - 1:
                whatif_before_last = client.get(f"/trials/{trial_id}/whatif").json()
            response = client.post(
                f"/trials/{trial_id}/cohorts",
                json={"dlt_count": dlt, "revision": doc["revision"] + i},
            )
            assert response.status_code == 200, response.text
            steps.append(
                {
                    "dlt_count": dlt,
                    "response": response.json(),
                    "rates": client.get(f"/trials/{trial_id}/rates").json(),
                }
            )

        conflict = client.post(
            f"/trials/{trial_id}/cohorts", json={"dlt_count": 0, "revision": 0}
        )
        overflow_id = client.post("/trials", json=CONFIG).json()["id"]
        overflow = client.post(
            f"/trials/{overflow_id}/cohorts", json={"dlt_count": 4}
        )

        fixture = {
            "config": CONFIG,
            "created": doc,
            "initial_rates": initial_rates,
            "steps": steps,
            "whatif_before_last": whatif_before_last,
            "mtd": client.get(f"/trials/{trial_id}/mtd").json(),
            "conflict_409": {
                "status": conflict.status_code,
                "body": conflict.json(),
            },
            "overflow_422": {
                "status": overflow.status_code,
                "body": overflow.json(),
            },
        }
    path = out_dir / "example_conduct.json"
    path.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
