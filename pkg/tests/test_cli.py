import json

from comrade.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARSE, main


def test_simulate_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main([
        "simulate", "--seed", "3", "--max-ticks", "1500",
        "--companion", "none", "--out", str(out),
    ])
    assert rc == EXIT_OK
    report = json.loads(out.read_text())
    assert report["mode"] == "none" and report["seed"] == 3


def test_simulate_stdout_and_trace_export(tmp_path, capsys):
    trace_file = tmp_path / "trace.jsonl"
    rc = main([
        "simulate", "--seed", "2", "--max-ticks", "1500",
        "--companion", "none", "--export-trace", str(trace_file),
    ])
    assert rc == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["policy"] == "turtle"
    assert trace_file.exists() and trace_file.read_text().strip()


def test_simulate_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["simulate", "--seed", "5", "--max-ticks", "1200", "--companion", "none"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_with_scenario(tmp_path, capsys):
    scen = tmp_path / "s.json"
    scen.write_text(json.dumps({
        "game": {},
        "companion": {"p_experiment": 0.0, "intro_threshold": 5,
                      "horizon_ticks": 200, "max_rollout_pairs": 5},
    }))
    rc = main([
        "simulate", "--scenario", str(scen), "--seed", "4",
        "--max-ticks", "2000",
    ])
    assert rc == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mode"] == "complementary"


def test_compare_modes(tmp_path, capsys):
    scen = tmp_path / "s.json"
    scen.write_text(json.dumps({
        "game": {}, "companion": {"horizon_ticks": 200, "intro_threshold": 5,
                                  "max_rollout_pairs": 5},
    }))
    rc = main([
        "compare", "--scenario", str(scen), "--modes", "none,random",
        "--seeds", "2", "--max-ticks", "1200",
    ])
    assert rc == EXIT_OK
    table = json.loads(capsys.readouterr().out)
    assert set(table) == {"none", "random"}


def test_compare_unknown_mode_exit_code():
    assert main(["compare", "--modes", "telepathic", "--seeds", "2"]) == EXIT_CONFIG


def test_eval_classifiers(tmp_path, capsys):
    trace_file = tmp_path / "trace.jsonl"
    rc = main([
        "simulate", "--seed", "6", "--max-ticks", "3000", "--companion", "none",
        "--player", "feature_driven", "--export-trace", str(trace_file),
        "--out", str(tmp_path / "r.json"),
    ])
    assert rc == EXIT_OK
    rc = main(["eval-classifiers", "--trace", str(trace_file)])
    assert rc == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["best"]["classifier"] in ("majority", "decision_tree", "k_nearest")
    assert len(result["table"]) == 3
    for row in result["table"]:
        assert 0.0 <= row["accuracy"] <= 1.0


def test_eval_classifiers_bad_trace_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{nope\n")
    assert main(["eval-classifiers", "--trace", str(bad)]) == EXIT_PARSE


def test_replay_regions(tmp_path, capsys):
    points = tmp_path / "p.json"
    points.write_text(json.dumps({
        "map_width": 40, "map_height": 24, "points": [[10, 6], [5, 5]],
    }))
    rc = main(["replay-regions", "--points", str(points)])
    assert rc == EXIT_OK
    regions = json.loads(capsys.readouterr().out)
    by_id = {r["id"]: r for r in regions}
    assert by_id[0] == {"id": 0, "x0": 0, "y0": 0, "x1": 20, "y1": 12}
    assert by_id[1] == {"id": 1, "x0": 20, "y0": 0, "x1": 40, "y1": 24}
    assert by_id[2] == {"id": 2, "x0": 0, "y0": 12, "x1": 20, "y1": 24}


def test_replay_regions_malformed_exit_code(tmp_path):
    bad = tmp_path / "p.json"
    bad.write_text("{broken")
    assert main(["replay-regions", "--points", str(bad)]) == EXIT_PARSE


def test_bad_scenario_exit_code(tmp_path):
    scen = tmp_path / "s.json"
    scen.write_text(json.dumps({"game": {"map_width": -2}}))
    rc = main(["simulate", "--scenario", str(scen), "--max-ticks", "100"])
    assert rc == EXIT_CONFIG
