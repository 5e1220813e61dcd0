import json

import pytest

from comrade.companion import CompanionConfig
from comrade.engine import ActionKind, GameConfig
from comrade.errors import ConfigurationError, TraceParseError
from comrade.harness import (
    COMPANION_MODES,
    POLICIES,
    SessionCore,
    compare_modes,
    config_digest,
    export_trace,
    import_trace,
    load_scenario,
    make_policy,
    replay_schedule,
    run_episode,
)
from comrade.player_model import Trace

FAST_CFG = CompanionConfig(
    p_experiment=0.0, intro_threshold=5, horizon_ticks=200,
    decision_epoch_ticks=60, max_rollout_pairs=6,
)


def test_make_policy_names():
    for name in POLICIES:
        assert make_policy(name).name == name
    with pytest.raises(ConfigurationError):
        make_policy("keyboard_masher")


def test_unknown_companion_mode_rejected():
    with pytest.raises(ConfigurationError):
        SessionCore(GameConfig(), CompanionConfig(), "psychic", 1)


@pytest.mark.parametrize("mode", COMPANION_MODES)
def test_episode_runs_in_every_mode(mode):
    report = run_episode(GameConfig(), make_policy("turtle"), mode, 3, 2500, FAST_CFG)
    assert report.survival_ticks > 0
    assert report.kills + report.leaks + report.enemies_alive == report.spawned


def test_episode_deterministic_byte_identical():
    a = run_episode(GameConfig(), make_policy("turtle"), "complementary", 7, 3000, FAST_CFG)
    b = run_episode(GameConfig(), make_policy("turtle"), "complementary", 7, 3000, FAST_CFG)
    assert a.to_json() == b.to_json()


def test_none_mode_has_no_companion_actions():
    report = run_episode(GameConfig(), make_policy("turtle"), "none", 2, 2500, FAST_CFG)
    assert report.companion_histogram == {}
    assert report.branch_counts == {} and report.decisions == 0


def test_complementary_companion_support_subset_of_player():
    # guideline-4 mechanism: with no experimentation the companion only
    # performs kinds the player has already performed
    report = run_episode(GameConfig(), make_policy("turtle"), "complementary", 5, 6000, FAST_CFG)
    assert report.companion_histogram  # the companion did act
    assert set(report.companion_histogram) <= set(report.player_histogram)


def test_branch_counts_sum_to_decisions():
    report = run_episode(GameConfig(), make_policy("rusher"), "complementary", 11, 4000, FAST_CFG)
    assert sum(report.branch_counts.values()) == report.decisions


def test_scripted_policy_fires_at_ticks():
    sched = [(0, ActionKind.BUILD_WALL, 4, 4), (40, ActionKind.BUILD_WALL, 5, 4)]
    policy = make_policy("scripted", schedule=sched) if "scripted" in POLICIES else None
    if policy is None:
        from comrade.harness import ScriptedPolicy

        policy = ScriptedPolicy(sched)
    report = run_episode(GameConfig(), policy, "none", 1, 200)
    assert report.player_histogram.get(ActionKind.BUILD_WALL) == 1.0


def test_feature_driven_policy_is_threshold_pure():
    from comrade.harness import FeatureDrivenPolicy
    from comrade import engine

    policy = FeatureDrivenPolicy()
    s = engine.new_game(GameConfig(), 1)
    s.resources = 200
    kind, _, _ = policy.act(s, None)
    assert kind is ActionKind.BUILD_TOWER
    s.resources = 100
    kind, _, _ = policy.act(s, None)
    assert kind is ActionKind.BUILD_WALL


def test_compare_modes_shape_and_aggregates():
    table = compare_modes(GameConfig(), "turtle", ["none", "random"], 2,
                          max_ticks=1500, companion_cfg=FAST_CFG)
    assert set(table) == {"none", "random"}
    for row in table.values():
        assert row["n"] == 2
        assert row["mean_survival_ticks"] > 0
    with pytest.raises(ConfigurationError):
        compare_modes(GameConfig(), "turtle", ["none"], 1)


def test_trace_roundtrip(tmp_path):
    report = run_episode(
        GameConfig(), make_policy("turtle"), "none", 3, 3000,
        trace_path=tmp_path / "t.jsonl",
    )
    assert report.survival_ticks > 0
    t = import_trace(tmp_path / "t.jsonl")
    assert len(t) > 0
    out2 = tmp_path / "t2.jsonl"
    export_trace(t, out2)
    assert (tmp_path / "t.jsonl").read_text() == out2.read_text()


def test_import_trace_empty_file(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("")
    assert len(import_trace(p)) == 0


def test_import_trace_error_carries_line_number(tmp_path):
    p = tmp_path / "bad.jsonl"
    good = json.dumps({"tick": 1, "kind": "repair", "x": 1, "y": 1, "sv": [1]})
    p.write_text(good + "\n{truncated\n")
    with pytest.raises(TraceParseError) as ei:
        import_trace(p)
    assert ei.value.line == 2


def test_import_trace_rejects_nonincreasing_tick(tmp_path):
    p = tmp_path / "bad.jsonl"
    e = json.dumps({"tick": 5, "kind": "repair", "x": 1, "y": 1, "sv": [1]})
    p.write_text(e + "\n" + e + "\n")
    with pytest.raises(TraceParseError) as ei:
        import_trace(p)
    assert ei.value.line == 2


def test_load_scenario(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"game": {"map_width": 30}, "companion": {"p_help": 0.9}}))
    game, comp = load_scenario(p)
    assert game.map_width == 30 and comp.p_help == 0.9


def test_load_scenario_invalid_config(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"game": {"map_width": -1}}))
    with pytest.raises(ConfigurationError):
        load_scenario(p)


def test_config_digest_sensitive_to_changes():
    a = config_digest(GameConfig(), CompanionConfig())
    b = config_digest(GameConfig(map_width=25), CompanionConfig())
    c = config_digest(GameConfig(), CompanionConfig(p_help=0.9))
    assert a != b and a != c


def test_replay_schedule_matches_session_core():
    from comrade import engine

    schedule = [
        (0, "build_wall", 4, 4),
        (20, "build_wall", 5, 4),
        (40, "build_tower", 3, 4),
    ]
    h1 = replay_schedule(GameConfig(), FAST_CFG, schedule, "complementary", 5, 1200)
    h2 = replay_schedule(GameConfig(), FAST_CFG, schedule, "complementary", 5, 1200)
    assert h1 == h2
    core = SessionCore(GameConfig(), FAST_CFG, "complementary", 5)
    i = 0
    while core.state.tick < 1200 and not core.state.over:
        while i < len(schedule) and schedule[i][0] == core.state.tick:
            _, k, x, y = schedule[i]
            i += 1
            if engine.is_possible_at(core.state, ActionKind(k), x, y):
                core.player_action(ActionKind(k), x, y)
        core.advance(1)
    assert engine.state_hash(core.state) == h1
