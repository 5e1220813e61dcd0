"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 parse error.
COMRADE_LOG sets the log level (DEBUG/INFO/WARNING/ERROR).
"""

import argparse
import json
import logging
import os
import sys

from .companion import CompanionConfig
from .engine import GameConfig
from .errors import ConfigurationError, TraceParseError
from .harness import (
    COMPANION_MODES,
    POLICIES,
    compare_modes,
    export_trace,
    import_trace,
    load_scenario,
    make_policy,
    run_episode,
)
from .player_model import ClassifierKind, FeatureConfig, evaluate_configs
from .regions import RegionSet

log = logging.getLogger("comrade")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3


def _setup_logging() -> None:
    level = os.environ.get("COMRADE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load(scenario_path):
    if scenario_path is None:
        return GameConfig(), CompanionConfig()
    return load_scenario(scenario_path)


def _cmd_simulate(args) -> int:
    config, companion_cfg = _load(args.scenario)
    policy = make_policy(args.player)
    report = run_episode(
        config, policy, args.companion, args.seed, args.max_ticks, companion_cfg,
        trace_path=args.export_trace,
    )
    out = report.to_json()
    if args.out:
        with open(args.out, "w") as f:
            f.write(out)
            f.write("\n")
    else:
        print(out)
    log.info("episode finished: survival=%d ticks", report.survival_ticks)
    return EXIT_OK


def _cmd_compare(args) -> int:
    config, companion_cfg = _load(args.scenario)
    modes = args.modes.split(",")
    for m in modes:
        if m not in COMPANION_MODES:
            raise ConfigurationError(f"unknown companion mode {m!r}")
    table = compare_modes(
        config,
        args.player,
        modes,
        args.seeds,
        base_seed=args.base_seed,
        max_ticks=args.max_ticks,
        companion_cfg=companion_cfg,
    )
    out = json.dumps(table, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as f:
            f.write(out)
            f.write("\n")
    else:
        print(out)
    return EXIT_OK


def _parse_candidates(path):
    if path is None:
        return [
            (ClassifierKind("majority"), FeatureConfig()),
            (ClassifierKind("decision_tree", max_depth=8, min_samples_split=2), FeatureConfig()),
            (ClassifierKind("k_nearest", k=3), FeatureConfig()),
        ]
    with open(path) as f:
        entries = json.load(f)
    out = []
    for e in entries:
        c = e.get("classifier", {})
        kind = ClassifierKind(
            c.get("name", "decision_tree"),
            max_depth=int(c.get("max_depth", 8)),
            min_samples_split=int(c.get("min_samples_split", 2)),
            k=int(c.get("k", 3)),
        )
        fc = FeatureConfig(tuple(e["features"])) if "features" in e else FeatureConfig()
        out.append((kind, fc))
    return out


def _cmd_eval_classifiers(args) -> int:
    trace = import_trace(args.trace)
    config, _ = _load(args.scenario)
    rs = RegionSet(config.map_width, config.map_height)
    for e in trace:
        rs.record_action_point(e.point[0], e.point[1])
    candidates = _parse_candidates(args.candidates)
    (best_kind, best_fc), table = evaluate_configs(trace, rs, candidates)
    print(
        json.dumps(
            {
                "best": {
                    "classifier": best_kind.name,
                    "features": list(best_fc.indices),
                },
                "table": [
                    {
                        "classifier": row["classifier"].name,
                        "features": list(row["features"].indices),
                        "accuracy": row["accuracy"],
                    }
                    for row in table
                ],
            },
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_replay_regions(args) -> int:
    with open(args.points) as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as exc:
            raise TraceParseError(exc.lineno, f"invalid points file: {exc.msg}") from None
    try:
        rs = RegionSet(int(d["map_width"]), int(d["map_height"]))
        for p in d["points"]:
            rs.record_action_point(int(p[0]), int(p[1]))
    except (KeyError, TypeError) as exc:
        raise TraceParseError(1, f"bad points file structure: {exc}") from None
    print(json.dumps(rs.dump(), indent=2))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config, companion_cfg = _load(args.scenario)
    app = create_app(
        config,
        companion_cfg,
        data_dir=args.data_dir,
        manual_clock=args.manual_clock,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="comrade")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one headless episode")
    sim.add_argument("--scenario", default=None)
    sim.add_argument("--player", default="turtle", choices=sorted(POLICIES))
    sim.add_argument("--companion", default="complementary", choices=COMPANION_MODES)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--max-ticks", type=int, default=20000)
    sim.add_argument("--out", default=None)
    sim.add_argument("--export-trace", default=None)
    sim.set_defaults(func=_cmd_simulate)

    cmp_ = sub.add_parser("compare", help="A/B companion modes over seeds")
    cmp_.add_argument("--scenario", default=None)
    cmp_.add_argument("--player", default="turtle", choices=sorted(POLICIES))
    cmp_.add_argument("--modes", default="complementary,random,none")
    cmp_.add_argument("--seeds", type=int, default=10)
    cmp_.add_argument("--base-seed", type=int, default=1)
    cmp_.add_argument("--max-ticks", type=int, default=20000)
    cmp_.add_argument("--out", default=None)
    cmp_.set_defaults(func=_cmd_compare)

    ev = sub.add_parser("eval-classifiers", help="rank classifiers on a trace")
    ev.add_argument("--trace", required=True)
    ev.add_argument("--candidates", default=None)
    ev.add_argument("--scenario", default=None)
    ev.set_defaults(func=_cmd_eval_classifiers)

    rr = sub.add_parser("replay-regions", help="rebuild a region set from points")
    rr.add_argument("--points", required=True)
    rr.set_defaults(func=_cmd_replay_regions)

    srv = sub.add_parser("serve", help="run the live session service")
    srv.add_argument("--scenario", default=None)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8080)
    srv.add_argument("--data-dir", default="./comrade-sessions")
    srv.add_argument("--manual-clock", action="store_true")
    srv.set_defaults(func=_cmd_serve)

    return p


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TraceParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
