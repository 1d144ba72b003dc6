"""HTTP API: routes, auth, idempotency, persistence, and recovery."""

import json

import pytest
from fastapi.testclient import TestClient

from arena.server import create_app
from conftest import ABS_DIFF

A_PLUS_B = ABS_DIFF.replace("a - b", "a + b")
A_GE_B = ABS_DIFF.replace("a > b", "a >= b")

KILLER = [{"fn": "abs_diff", "args": [4, 3], "expected": 1}]
SURVIVOR = [{"fn": "abs_diff", "args": [2, 7], "expected": 5}]


@pytest.fixture
def api(tmp_path):
    app = create_app(tmp_path)
    with TestClient(app) as client:
        client.data_dir = tmp_path
        yield client


def create_game(api):
    r = api.post("/games", json={"config": {"unit_source": ABS_DIFF,
                                            "unit_name": "abs_diff"}})
    assert r.status_code == 201
    return r.json()["game_id"], r.json()["creator_token"]


def join(api, gid, name, role, team):
    r = api.post(f"/games/{gid}/join",
                 json={"name": name, "role": role, "team": team})
    assert r.status_code == 200
    return r.json()


def auth(player):
    return {"Authorization": f"Bearer {player['token']}"}


def test_game_lifecycle(api):
    gid, creator = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    defender = join(api, gid, "D", "defender", "blue")
    r = api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
                 headers=auth(attacker))
    assert r.status_code == 200
    assert r.json() == {"mutant_id": "m1", "state": "alive",
                        "edited_lines": [2]}
    r = api.post(f"/games/{gid}/tests", json={"assertions": KILLER},
                 headers=auth(defender))
    assert r.status_code == 200
    assert r.json()["kills"] == ["m1"]
    r = api.get(f"/games/{gid}")
    body = r.json()
    assert body["mutants"]["m1"]["state"] == "killed"
    assert body["covered_lines"] == [1, 2]
    r = api.get(f"/games/{gid}/scoreboard")
    assert r.json()["players"] == {"p1": 0, "p2": 1}
    r = api.post(f"/games/{gid}/finish",
                 headers={"Authorization": f"Bearer {creator}"})
    assert r.status_code == 200
    assert r.json()["status"] == "finished"


def test_validation_failures_are_422(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    defender = join(api, gid, "D", "defender", "blue")
    r = api.post(f"/games/{gid}/mutants", json={"source": "broken {"},
                 headers=auth(attacker))
    assert r.status_code == 422
    assert r.json()["error"]["code"] == "syntax_error"
    r = api.post(f"/games/{gid}/tests",
                 json={"assertions": [{"fn": "abs_diff", "args": [4, 3],
                                       "expected": 9}]},
                 headers=auth(defender))
    assert r.status_code == 422
    assert r.json()["error"]["code"] == "assertion_fails_on_original"


def test_auth_and_role_errors(api):
    gid, creator = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    defender = join(api, gid, "D", "defender", "blue")
    r = api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B})
    assert r.status_code == 401
    r = api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
                 headers={"Authorization": "Bearer bogus"})
    assert r.status_code == 401
    r = api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
                 headers=auth(defender))
    assert r.status_code == 403
    r = api.post(f"/games/{gid}/tests", json={"assertions": KILLER},
                 headers=auth(attacker))
    assert r.status_code == 403
    r = api.post(f"/games/{gid}/finish", headers=auth(attacker))
    assert r.status_code == 403
    assert api.get("/games/gdoesnotexist").status_code == 404


def test_claim_conflict_is_409(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    defender = join(api, gid, "D", "defender", "blue")
    api.post(f"/games/{gid}/mutants", json={"source": A_GE_B},
             headers=auth(attacker))
    r = api.post(f"/games/{gid}/claims", json={"mutant_id": "m1"},
                 headers=auth(defender))
    assert r.status_code == 200
    r = api.post(f"/games/{gid}/claims", json={"mutant_id": "m1"},
                 headers=auth(defender))
    assert r.status_code == 409


def test_counter_claim_routes(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    defender = join(api, gid, "D", "defender", "blue")
    api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
             headers=auth(attacker))
    api.post(f"/games/{gid}/claims", json={"mutant_id": "m1"},
             headers=auth(defender))
    r = api.post(f"/games/{gid}/claims/m1/counter",
                 json={"assertions": SURVIVOR}, headers=auth(attacker))
    assert r.status_code == 422
    assert r.json()["error"]["code"] == "counter_does_not_kill"
    r = api.post(f"/games/{gid}/claims/m1/counter",
                 json={"assertions": KILLER}, headers=auth(attacker))
    assert r.status_code == 200
    assert r.json() == {"mutant_id": "m1", "state": "counter_killed"}


def test_oversized_body_is_413(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    r = api.post(f"/games/{gid}/mutants", content=b"x" * (129 * 1024),
                 headers=auth(attacker))
    assert r.status_code == 413


def test_invalid_config_is_422(api):
    r = api.post("/games", json={"config": {"unit_source": ABS_DIFF,
                                            "step_budget": -5}})
    assert r.status_code == 422


def test_event_feed_is_gapless_and_supports_since(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
             headers=auth(attacker))
    events = api.get(f"/games/{gid}/events?since=0").json()["events"]
    seqs = [e["seq"] for e in events]
    assert seqs == list(range(1, len(seqs) + 1))
    later = api.get(f"/games/{gid}/events?since=2").json()["events"]
    assert [e["seq"] for e in later] == seqs[2:]


def test_idempotent_submission_replay(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    body = {"source": A_PLUS_B, "submission_id": "sub-1"}
    first = api.post(f"/games/{gid}/mutants", json=body, headers=auth(attacker))
    seq_before = api.get(f"/games/{gid}").json()["last_seq"]
    second = api.post(f"/games/{gid}/mutants", json=body, headers=auth(attacker))
    assert second.status_code == first.status_code
    assert second.json() == first.json()
    assert api.get(f"/games/{gid}").json()["last_seq"] == seq_before
    # Rejections replay identically too.
    bad = {"source": "broken {", "submission_id": "sub-2"}
    r1 = api.post(f"/games/{gid}/mutants", json=bad, headers=auth(attacker))
    r2 = api.post(f"/games/{gid}/mutants", json=bad, headers=auth(attacker))
    assert (r1.status_code, r1.json()) == (r2.status_code, r2.json())


def test_state_is_never_ahead_of_disk(api):
    gid, _ = create_game(api)
    attacker = join(api, gid, "A", "attacker", "red")
    api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
             headers=auth(attacker))
    log = (api.data_dir / "games" / f"{gid}.ndjson").read_text().splitlines()
    assert len(log) == api.get(f"/games/{gid}").json()["last_seq"]


def test_recovery_from_restart(tmp_path):
    with TestClient(create_app(tmp_path)) as api:
        gid, creator = create_game(api)
        attacker = join(api, gid, "A", "attacker", "red")
        defender = join(api, gid, "D", "defender", "blue")
        api.post(f"/games/{gid}/mutants",
                 json={"source": A_PLUS_B, "submission_id": "s1"},
                 headers=auth(attacker))
        before = api.get(f"/games/{gid}").json()
    # Fresh process over the same data directory.
    with TestClient(create_app(tmp_path)) as api:
        after = api.get(f"/games/{gid}").json()
        assert after == before
        # Tokens and idempotency survive the restart.
        r = api.post(f"/games/{gid}/mutants",
                     json={"source": A_PLUS_B, "submission_id": "s1"},
                     headers=auth(attacker))
        assert r.status_code == 200
        assert r.json()["mutant_id"] == "m1"
        r = api.post(f"/games/{gid}/tests", json={"assertions": KILLER},
                     headers=auth(defender))
        assert r.json()["kills"] == ["m1"]
        r = api.post(f"/games/{gid}/finish",
                     headers={"Authorization": f"Bearer {creator}"})
        assert r.status_code == 200


def test_recovery_drops_truncated_final_line(tmp_path):
    with TestClient(create_app(tmp_path)) as api:
        gid, _ = create_game(api)
        attacker = join(api, gid, "A", "attacker", "red")
        api.post(f"/games/{gid}/mutants", json={"source": A_PLUS_B},
                 headers=auth(attacker))
        full = api.get(f"/games/{gid}").json()
    log_path = tmp_path / "games" / f"{gid}.ndjson"
    text = log_path.read_text()
    lines = text.splitlines(keepends=True)
    truncated = "".join(lines[:-1]) + lines[-1][: len(lines[-1]) // 2]
    log_path.write_text(truncated)
    with TestClient(create_app(tmp_path)) as api:
        state = api.get(f"/games/{gid}").json()
        assert state["last_seq"] == full["last_seq"] - 1


def test_join_validation(api):
    gid, _ = create_game(api)
    r = api.post(f"/games/{gid}/join", json={"name": "X", "role": "referee",
                                             "team": "green"})
    assert r.status_code == 422
    r = api.post(f"/games/{gid}/join", json={"name": "", "role": "attacker",
                                             "team": "red"})
    assert r.status_code == 422
