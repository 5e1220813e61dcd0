import json

import pytest
from starlette.testclient import TestClient

from comrade import engine
from comrade.companion import CompanionConfig
from comrade.engine import GameConfig
from comrade.harness import replay_schedule
from comrade.service import PROTOCOL_VERSION, create_app


def make_client(tmp_path, manual_clock=True, companion_cfg=None, config=None):
    app = create_app(
        config or GameConfig(),
        companion_cfg or CompanionConfig(
            p_experiment=0.0, intro_threshold=5,
            horizon_ticks=200, decision_epoch_ticks=60, max_rollout_pairs=5,
        ),
        data_dir=tmp_path,
        manual_clock=manual_clock,
    )
    return TestClient(app)


def recv(ws):
    return json.loads(ws.receive_text())


def send(ws, **msg):
    ws.send_text(json.dumps(msg))


def open_session(ws, seed=5, session_id=None):
    hello = {"type": "hello", "protocol_version": PROTOCOL_VERSION, "seed": seed}
    if session_id:
        hello["session_id"] = session_id
    ws.send_text(json.dumps(hello))
    welcome = recv(ws)
    first_delta = recv(ws)
    return welcome, first_delta


def test_hello_welcome_and_initial_delta(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        welcome, delta = open_session(ws)
        assert welcome["type"] == "welcome"
        assert welcome["config"]["map_width"] == GameConfig().map_width
        assert delta["type"] == "state_delta" and delta["tick"] == 0


def test_version_mismatch_errors_and_closes(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        send(ws, type="hello", protocol_version=99)
        err = recv(ws)
        assert err["type"] == "error" and err["code"] == "version_mismatch"
        with pytest.raises(Exception):
            ws.receive_text()


def test_player_action_applied_and_rejected(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        open_session(ws)
        send(ws, type="player_action", kind="build_tower", x=3, y=2)
        delta = recv(ws)
        assert delta["type"] == "state_delta"
        assert len(delta["in_progress"]) == 1
        # same cell is now pending: second build is impossible
        send(ws, type="player_action", kind="build_tower", x=3, y=2)
        err = recv(ws)
        assert err["type"] == "error" and err["code"] == "impossible"


def test_malformed_message_keeps_connection(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        open_session(ws)
        ws.send_text("}{not json")
        assert recv(ws)["code"] == "malformed"
        send(ws, type="no_such_type")
        assert recv(ws)["code"] == "malformed"
        send(ws, type="player_action", kind="levitate", x=0, y=0)
        assert recv(ws)["code"] == "malformed"
        # the session is still usable afterwards
        send(ws, type="advance", ticks=3)
        assert recv(ws)["tick"] == 3


def test_set_config_and_validation(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        open_session(ws)
        send(ws, type="set_config", companion={"p_help": 0.9})
        assert recv(ws)["type"] == "config_ok"
        send(ws, type="set_config", companion={"p_help": 7.5})
        assert recv(ws)["code"] == "config"


def test_advance_and_state_hash(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        open_session(ws, seed=9)
        send(ws, type="advance", ticks=250)
        assert recv(ws)["tick"] == 250
        send(ws, type="state_hash")
        h = recv(ws)["hash"]
    headless = engine.new_game(GameConfig(), 9)
    engine.step(headless, 250)
    assert h == engine.state_hash(headless)


def test_dump_regions(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        open_session(ws)
        send(ws, type="player_action", kind="build_wall", x=4, y=4)
        recv(ws)
        send(ws, type="dump_regions")
        regions = recv(ws)
        assert regions["type"] == "regions" and len(regions["regions"]) == 2


def test_disconnect_resume_preserves_hash(tmp_path):
    client = make_client(tmp_path)
    with client.websocket_connect("/ws") as ws:
        welcome, _ = open_session(ws, seed=11)
        sid = welcome["session_id"]
        send(ws, type="player_action", kind="build_wall", x=5, y=3)
        recv(ws)
        send(ws, type="advance", ticks=120)
        recv(ws)
        send(ws, type="state_hash")
        before = recv(ws)["hash"]
    with client.websocket_connect("/ws") as ws:
        welcome, _ = open_session(ws, session_id=sid)
        assert welcome["session_id"] == sid
        send(ws, type="state_hash")
        assert recv(ws)["hash"] == before


def test_unknown_session_rejected(tmp_path):
    with make_client(tmp_path).websocket_connect("/ws") as ws:
        send(ws, type="hello", protocol_version=PROTOCOL_VERSION, session_id="nope")
        err = recv(ws)
        assert err["code"] == "unknown_session"


def test_second_concurrent_resume_rejected(tmp_path):
    client = make_client(tmp_path)
    with client.websocket_connect("/ws") as ws:
        welcome, _ = open_session(ws, seed=2)
        sid = welcome["session_id"]
        with client.websocket_connect("/ws") as ws2:
            send(ws2, type="hello", protocol_version=PROTOCOL_VERSION, session_id=sid)
            err = recv(ws2)
            assert err["code"] == "session_busy"


def test_served_equals_headless_replay(tmp_path):
    schedule = [
        (0, "build_wall", 4, 4),
        (20, "build_wall", 5, 4),
        (40, "build_tower", 3, 4),
        (120, "build_wall", 4, 5),
        (200, "build_wall", 4, 3),
        (280, "build_wall", 4, 2),
    ]
    ccfg = CompanionConfig(
        p_experiment=0.0, intro_threshold=5,
        horizon_ticks=200, decision_epoch_ticks=60, max_rollout_pairs=5,
    )
    oracle = replay_schedule(GameConfig(), ccfg, schedule, "complementary", 5, 1200)
    with make_client(tmp_path, companion_cfg=ccfg).websocket_connect("/ws") as ws:
        open_session(ws, seed=5)
        tick = 0
        for t, kind, x, y in schedule:
            if t > tick:
                send(ws, type="advance", ticks=t - tick)
                recv(ws)
                tick = t
            send(ws, type="player_action", kind=kind, x=x, y=y)
            recv(ws)  # delta or impossible, same as the headless skip rule
        send(ws, type="advance", ticks=1200 - tick)
        recv(ws)
        send(ws, type="state_hash")
        assert recv(ws)["hash"] == oracle


def test_realtime_ticks_and_companion_feed(tmp_path):
    # wall-clock mode: deltas stream without advance messages
    with make_client(tmp_path, manual_clock=False).websocket_connect("/ws") as ws:
        open_session(ws, seed=3)
        seen_ticks = []
        for _ in range(5):
            msg = recv(ws)
            if msg["type"] == "state_delta":
                seen_ticks.append(msg["tick"])
        assert seen_ticks == sorted(seen_ticks) and len(seen_ticks) >= 4
