"""HTTP service tests: trial conduct, tables, persistence, and jobs."""

import time

import pytest
from fastapi.testclient import TestClient

from combodose.service import create_app

from conftest import EXAMPLE_DRP, EXAMPLE_N, EXAMPLE_OUTCOMES, EXAMPLE_SEED

EXAMPLE_CONFIG = {
    "design": "boin",
    "phi": 0.3,
    "variant": "drp",
    "tau": 0.4,
    "N": EXAMPLE_N,
    "cohort_size": 3,
    "J": 3,
    "K": 3,
    "seed": EXAMPLE_SEED,
}


@pytest.fixture
def client(tmp_path):
    with TestClient(create_app(tmp_path)) as c:
        yield c


def create_trial(client, **overrides):
    body = dict(EXAMPLE_CONFIG, **overrides)
    response = client.post("/trials", json=body)
    assert response.status_code == 201, response.text
    return response.json()


# ------------------------------------------------------------ trial conduct


def test_create_and_fetch_trial(client):
    doc = create_trial(client)
    assert doc["revision"] == 0
    assert doc["state"]["status"] == "ongoing"
    assert doc["state"]["current"] == [0, 0]
    fetched = client.get(f"/trials/{doc['id']}").json()
    assert fetched == doc


def test_unknown_trial_is_404(client):
    assert client.get("/trials/nope").status_code == 404


def test_example_conduct_through_api(client):
    doc = create_trial(client)
    trial_id = doc["id"]
    revision = doc["revision"]
    last = None
    for dlt in EXAMPLE_OUTCOMES:
        response = client.post(
            f"/trials/{trial_id}/cohorts",
            json={"dlt_count": dlt, "revision": revision},
        )
        assert response.status_code == 200, response.text
        last = response.json()
        revision = last["revision"]
    assert last["state"]["status"] == "completed-early"
    assert last["state"]["enrolled"] == 24
    assert last["drp"] == pytest.approx(EXAMPLE_DRP, abs=1e-12)
    assert last["drp_variant"] == "drp"
    assert last["state"]["n"][1][1] == 9
    assert last["state"]["m"][1][1] == 3
    assert last["state"]["eliminated"] == []
    mtd = client.get(f"/trials/{trial_id}/mtd").json()
    assert mtd["mtd"] == [1, 1]


def test_revision_conflict_is_409(client):
    doc = create_trial(client)
    trial_id = doc["id"]
    ok = client.post(
        f"/trials/{trial_id}/cohorts", json={"dlt_count": 0, "revision": 0}
    )
    assert ok.status_code == 200
    stale = client.post(
        f"/trials/{trial_id}/cohorts", json={"dlt_count": 0, "revision": 0}
    )
    assert stale.status_code == 409
    unguarded = client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": 0})
    assert unguarded.status_code == 200


def test_dlt_count_above_cohort_is_422(client):
    doc = create_trial(client)
    response = client.post(
        f"/trials/{doc['id']}/cohorts", json={"dlt_count": 4}
    )
    assert response.status_code == 422


def test_cohort_after_completion_is_409(client):
    doc = create_trial(client, J=1, K=1, N=3, variant="off")
    trial_id = doc["id"]
    assert (
        client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": 1}).status_code
        == 200
    )
    response = client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": 0})
    assert response.status_code == 409


def test_whatif_enumerates_next_cohort(client):
    doc = create_trial(client)
    trial_id = doc["id"]
    for dlt in EXAMPLE_OUTCOMES[:-1]:
        client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": dlt})
    whatif = client.get(f"/trials/{trial_id}/whatif").json()["whatif"]
    assert [w["dlt_count"] for w in whatif] == [0, 1, 2, 3]
    by_dlt = {w["dlt_count"]: w["check"] for w in whatif}
    assert by_dlt[2]["value"] == pytest.approx(EXAMPLE_DRP, abs=1e-12)
    assert by_dlt[2]["halt"] is True
    assert by_dlt[0]["halt"] is False


def test_whatif_on_finished_trial_is_409(client):
    doc = create_trial(client, J=1, K=1, N=3, variant="off")
    client.post(f"/trials/{doc['id']}/cohorts", json={"dlt_count": 0})
    assert client.get(f"/trials/{doc['id']}/whatif").status_code == 409


def test_rates_endpoint_reports_adjusted_matrix(client):
    doc = create_trial(client)
    trial_id = doc["id"]
    fresh = client.get(f"/trials/{trial_id}/rates").json()
    assert all(x is None for row in fresh["raw"] for x in row)
    assert all(x is None for row in fresh["adjusted"] for x in row)
    for dlt in EXAMPLE_OUTCOMES:
        client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": dlt})
    rates = client.get(f"/trials/{trial_id}/rates").json()
    assert rates["raw"][1][1] == pytest.approx(3 / 9, abs=1e-12)
    assert rates["adjusted"][1][1] == pytest.approx(0.335, abs=5e-3)
    assert rates["adjusted"][0][0] == pytest.approx(0.0, abs=5e-3)
    assert rates["raw"][2][2] is None and rates["adjusted"][2][2] is None


# -------------------------------------------------------------- persistence


def test_trial_reload_replays_event_log(tmp_path):
    with TestClient(create_app(tmp_path)) as client:
        doc = create_trial(client)
        trial_id = doc["id"]
        for dlt in EXAMPLE_OUTCOMES:
            client.post(f"/trials/{trial_id}/cohorts", json={"dlt_count": dlt})
        final = client.get(f"/trials/{trial_id}").json()
    with TestClient(create_app(tmp_path)) as reloaded:
        replayed = reloaded.get(f"/trials/{trial_id}").json()
        assert replayed["state"] == final["state"]
        assert replayed["revision"] == final["revision"]
        assert reloaded.get(f"/trials/{trial_id}/mtd").json()["mtd"] == [1, 1]
    snapshot = tmp_path / "trials" / f"{trial_id}.json"
    assert snapshot.exists()


# ------------------------------------------------------------------- tables


def test_retainment_table_endpoint(client):
    doc = client.get("/tables/retainment", params={"design": "boin"}).json()
    rows = {r["n"]: r["retain"] for r in doc["rows"]}
    assert rows[9] == [3] and rows[12] == [3, 4]


def test_early_completion_table_endpoint(client):
    doc = client.get("/tables/early-completion", params={"N": 36}).json()
    rows = {(r["n"], r["m"]): r for r in doc["rows"]}
    assert rows[(9, 3)]["max_l"] == 12
    assert rows[(3, 1)]["sub_cohort_only"] is True


def test_drp_endpoint(client):
    doc = client.get("/drp", params={"n": 9, "m": 3, "l": 6}).json()
    assert doc["value"] == pytest.approx(EXAMPLE_DRP, abs=1e-12)
    assert doc["retainment_set"] == [4, 5]
    iso = client.get(
        "/drp", params={"n": 9, "m": 3, "l": 6, "isotonic_rate": 0.335}
    ).json()
    assert iso["value"] == pytest.approx(0.491, abs=5e-3)


def test_invalid_parameters_are_422(client):
    assert client.get("/drp", params={"n": 3, "m": 5, "l": 0}).status_code == 422
    assert (
        client.get("/tables/retainment", params={"phi": 1.5}).status_code == 422
    )


# --------------------------------------------------------------------- jobs


def test_simulation_job_lifecycle(client):
    submitted = client.post(
        "/simulate",
        json={
            "replications": 5,
            "N": 12,
            "grid": "3x4",
            "ec": "drp",
            "seed": 9,
        },
    )
    assert submitted.status_code == 202
    job_id = submitted.json()["job_id"]
    for _ in range(200):
        job = client.get(f"/jobs/{job_id}").json()
        if job["status"] != "running":
            break
        time.sleep(0.05)
    assert job["status"] == "done", job
    assert len(job["result"]) == 6
    assert job["result"][0]["design"] == "boin-drp"
    assert client.get("/jobs/nope").status_code == 404


def test_simulation_job_custom_scenarios(client):
    submitted = client.post(
        "/simulate",
        json={
            "replications": 4,
            "N": 6,
            "scenarios": [
                {"name": "tiny", "true_p": [[0.1, 0.3], [0.3, 0.5]]}
            ],
        },
    )
    job_id = submitted.json()["job_id"]
    for _ in range(200):
        job = client.get(f"/jobs/{job_id}").json()
        if job["status"] != "running":
            break
        time.sleep(0.05)
    assert job["status"] == "done", job
    assert [r["scenario"] for r in job["result"]] == ["tiny"]
