"""Scripted-player evaluation harness.

Player archetypes stand in for human subjects; episodes are fully
deterministic given (scenario, policy, companion mode, seed). The
SessionCore here is the single authority for how player actions feed
the trace/region set and how companion decisions are scheduled, so the
live service and the headless harness stay hash-equivalent.
"""

import hashlib
import json
from dataclasses import dataclass, field
from statistics import mean, stdev

from . import engine
from .companion import (
    Branch,
    CompanionConfig,
    DecisionOutcome,
    decide,
    execute_outcome,
    maybe_retrain,
)
from .engine import ActionKind, GameConfig, GameState
from .errors import ConfigurationError, TraceParseError
from .player_model import (
    Trace,
    TraceEntry,
    action_distribution,
    l1_distance,
    predict_next,
)
from .regions import RegionSet
from .rng import Rng, mix_seed

PLAYER_THINK_PERIOD = 20  # ticks between policy decisions when idle

COMPANION_MODES = ("complementary", "random", "mimic", "none")


# ---------------------------------------------------------------------------
# player policies


class PolicyBase:
    """Returns (kind, x, y) when the idle player should act, else None."""

    name = "base"

    def act(self, state: GameState, rng: Rng):
        raise NotImplementedError


def _damaged_structures(state, x_max=None):
    out = []
    for s in state.structures:
        if x_max is not None and s.x >= x_max:
            continue
        maxh = engine.structure_max_health(s)
        if s.health < maxh:
            out.append((s.health * 100 // maxh, s.y, s.x, s))
    out.sort(key=lambda t: t[:3])
    return [t[3] for t in out]


class _BuilderPolicy(PolicyBase):
    """Shared build loop: walls across the lanes at a chosen column,
    towers one column behind, repair what's damaged, upgrade sometimes.

    Cycles through all four action kinds early so the companion has a
    full seen-action pool to draw from.
    """

    def __init__(self, wall_col: int | None = None):
        self.wall_col = wall_col

    def _columns(self, state):
        w = state.config.map_width
        wall = self.wall_col if self.wall_col is not None else max(2, w // 4)
        return min(wall, w - 2), max(min(wall, w - 2) - 2, 0)

    def act(self, state: GameState, rng: Rng):
        cfg = state.config
        wall_col, tower_col = self._columns(state)
        costs = cfg.costs
        # 1. repair the most damaged structure
        if state.resources >= costs[ActionKind.REPAIR]:
            damaged = _damaged_structures(state)
            for s in damaged:
                if s.health * 100 // engine.structure_max_health(s) < 70:
                    return (ActionKind.REPAIR, s.x, s.y)
        towers = [s for s in state.structures if s.kind == "tower"]
        walls = [s for s in state.structures if s.kind == "wall"]
        # 2. first tower before anything else
        if not towers and state.resources >= costs[ActionKind.BUILD_TOWER]:
            y = cfg.map_height // 2
            if engine.is_possible_at(state, ActionKind.BUILD_TOWER, tower_col, y):
                return (ActionKind.BUILD_TOWER, tower_col, y)
        # 3. wall line across the lanes
        if state.resources >= costs[ActionKind.BUILD_WALL]:
            for y in range(cfg.map_height):
                if engine.is_possible_at(state, ActionKind.BUILD_WALL, wall_col, y):
                    return (ActionKind.BUILD_WALL, wall_col, y)
        # 4. one early upgrade, then more towers, then upgrades again
        upgradable = [s for s in towers if s.level < engine.MAX_TOWER_LEVEL]
        if (
            upgradable
            and state.resources >= costs[ActionKind.UPGRADE_TOWER]
            and (len(towers) >= 1 and not any(s.level > 1 for s in towers))
        ):
            s = upgradable[0]
            return (ActionKind.UPGRADE_TOWER, s.x, s.y)
        if state.resources >= costs[ActionKind.BUILD_TOWER] and len(towers) < cfg.map_height:
            for y in range(cfg.map_height):
                for x in (tower_col, max(tower_col - 1, 0)):
                    if engine.is_possible_at(state, ActionKind.BUILD_TOWER, x, y):
                        return (ActionKind.BUILD_TOWER, x, y)
        if upgradable and state.resources >= costs[ActionKind.UPGRADE_TOWER]:
            s = min(upgradable, key=lambda s: (s.level, s.y, s.x))
            return (ActionKind.UPGRADE_TOWER, s.x, s.y)
        # 5. second wall line
        if state.resources >= costs[ActionKind.BUILD_WALL]:
            for y in range(cfg.map_height):
                if engine.is_possible_at(state, ActionKind.BUILD_WALL, wall_col + 1, y):
                    return (ActionKind.BUILD_WALL, wall_col + 1, y)
        return None


class TurtlePolicy(_BuilderPolicy):
    """Defends close to the base."""

    name = "turtle"

    def __init__(self):
        super().__init__(wall_col=None)


class RusherPolicy(_BuilderPolicy):
    """Builds far forward, near the enemy spawn side."""

    name = "rusher"

    def __init__(self):
        super().__init__()

    def _columns(self, state):
        w = state.config.map_width
        wall = min(2 * w // 3, w - 2)
        return wall, max(wall - 2, 0)


class SpreaderPolicy(_BuilderPolicy):
    """Round-robins the map thirds on every action."""

    name = "spreader"

    def __init__(self):
        super().__init__()
        self._turn = 0

    def _columns(self, state):
        w = state.config.map_width
        third = self._turn % 3
        wall = min(max(2, w // 6 + third * (w // 3)), w - 2)
        return wall, max(wall - 2, 0)

    def act(self, state, rng):
        a = super().act(state, rng)
        if a is not None:
            self._turn += 1
        return a


class ScriptedPolicy(PolicyBase):
    """Plays a fixed (tick, kind, x, y) schedule; actions fire once the
    schedule tick has passed and the player is idle."""

    name = "scripted"

    def __init__(self, schedule):
        self.schedule = sorted(schedule, key=lambda a: a[0])
        self._i = 0

    def act(self, state, rng):
        while self._i < len(self.schedule):
            tick, kind, x, y = self.schedule[self._i]
            if tick > state.tick:
                return None
            self._i += 1
            if engine.is_possible_at(state, ActionKind(kind), x, y):
                return (ActionKind(kind), x, y)
        return None


class FeatureDrivenPolicy(PolicyBase):
    """Action kind is a pure threshold function of two state features
    (resources, enemy count); used to sanity-check the classifiers."""

    name = "feature_driven"

    def __init__(self, resource_threshold: int = 150):
        self.resource_threshold = resource_threshold
        self._cursor = 0

    def act(self, state, rng):
        fv = engine.feature_vector(state)
        kind = (
            ActionKind.BUILD_TOWER
            if fv[0] >= self.resource_threshold
            else ActionKind.BUILD_WALL
        )
        if state.resources < state.config.costs[kind]:
            return None
        cfg = state.config
        w, h = cfg.map_width, cfg.map_height
        for _ in range(w * h):
            x = 1 + self._cursor % (w - 2)
            y = (self._cursor // (w - 2)) % h
            self._cursor += 1
            if engine.is_possible_at(state, kind, x, y):
                return (kind, x, y)
        return None


POLICIES = {
    "turtle": TurtlePolicy,
    "rusher": RusherPolicy,
    "spreader": SpreaderPolicy,
    "feature_driven": FeatureDrivenPolicy,
}


def make_policy(name: str) -> PolicyBase:
    try:
        return POLICIES[name]()
    except KeyError:
        raise ConfigurationError(f"unknown player policy {name!r}") from None


# ---------------------------------------------------------------------------
# session core


class SessionCore:
    """Owns one game session: state, trace, region set, model, and the
    companion scheduling. Drives identical logic for headless episodes
    and the live service (hash equivalence depends on this)."""

    def __init__(
        self,
        config: GameConfig,
        companion_cfg: CompanionConfig,
        mode: str,
        seed: int,
    ):
        if mode not in COMPANION_MODES:
            raise ConfigurationError(f"unknown companion mode {mode!r}")
        self.config = config
        self.companion_cfg = companion_cfg
        self.mode = mode
        self.seed = seed
        self.state = engine.new_game(config, seed)
        self.rs = RegionSet(config.map_width, config.map_height)
        self.trace = Trace()
        self.model = None
        self.last_trained_count = 0
        self.comp_rng = Rng(mix_seed(seed, 2))
        self.branch_counts: dict = {}
        self.player_actions: list = []
        self.companion_actions: list = []
        self.decision_log: list = []
        # hook for the live service: defer decide() off the tick loop
        self.async_decide = None

    # -- player side -------------------------------------------------------

    def player_action(self, kind: ActionKind, x: int, y: int) -> None:
        """Apply a player action at an exact cell and record it."""
        sv = engine.feature_vector(self.state)  # captured at action start
        tick = self.state.tick
        engine.apply_action_at(self.state, engine.PLAYER, kind, x, y)
        self.trace.record(sv, kind, (x, y), tick)
        self.rs.record_action_point(x, y)
        self.player_actions.append(kind)

    # -- companion side ----------------------------------------------------

    def _companion_active(self) -> bool:
        return len(self.trace) >= self.companion_cfg.intro_threshold

    def _ensure_model(self) -> None:
        retrained = maybe_retrain(
            self.trace, self.rs, self.companion_cfg, self.last_trained_count
        )
        if retrained is not None:
            self.model = retrained
            self.last_trained_count = len(self.trace)

    def _companion_tick(self) -> None:
        cfg = self.companion_cfg
        if self.mode == "none" or self.state.over:
            return
        if self.state.tick % cfg.decision_epoch_ticks != 0:
            return
        if engine.current_action(self.state, engine.COMPANION) is not None:
            return
        if not self._companion_active():
            return
        self._ensure_model()
        if self.mode == "complementary":
            if self.async_decide is not None:
                self.async_decide()
                return
            outcome = decide(
                self.state,
                self.trace,
                self.rs,
                self.model,
                cfg,
                self.comp_rng,
                player_current=engine.current_action(self.state, engine.PLAYER),
            )
            self.apply_outcome(outcome)
        elif self.mode == "mimic":
            if self.model is None:
                return
            kind, rid = predict_next(self.model, engine.feature_vector(self.state))
            outcome = DecisionOutcome((kind, rid), Branch.PARALLEL_PREDICTED, self.state.tick)
            self.apply_outcome(outcome, count_branch=False)
        elif self.mode == "random":
            rid = self.rs.sample_region(self.comp_rng)
            rect = self.rs.region_bounds(rid)
            options = [k for k in engine.ACTION_KINDS if engine.is_possible(self.state, k, rect)]
            if options:
                kind = options[self.comp_rng.randrange(len(options))]
                outcome = DecisionOutcome((kind, rid), Branch.BEST_STATE, self.state.tick)
                self.apply_outcome(outcome, count_branch=False)

    def apply_outcome(self, outcome: DecisionOutcome, count_branch: bool = True) -> bool:
        if count_branch:
            self.branch_counts[outcome.branch.value] = (
                self.branch_counts.get(outcome.branch.value, 0) + 1
            )
            self.decision_log.append(outcome.to_dict())
        applied = execute_outcome(self.state, self.rs, outcome)
        if applied and outcome.chosen is not None:
            self.companion_actions.append(outcome.chosen[0])
        return applied

    # -- clock -------------------------------------------------------------

    def advance(self, ticks: int) -> None:
        for _ in range(ticks):
            if not self.state.over:
                self._companion_tick()
            engine.step(self.state, 1)


# ---------------------------------------------------------------------------
# episodes


@dataclass
class EpisodeReport:
    survival_ticks: int
    final_score: int
    leaks: int
    kills: int
    spawned: int
    enemies_alive: int
    player_histogram: dict
    companion_histogram: dict
    histogram_l1: float
    branch_counts: dict
    decisions: int
    seed: int
    mode: str
    policy: str
    config_digest: str

    def to_json(self) -> str:
        d = {
            "survival_ticks": self.survival_ticks,
            "final_score": self.final_score,
            "leaks": self.leaks,
            "kills": self.kills,
            "spawned": self.spawned,
            "enemies_alive": self.enemies_alive,
            "player_histogram": {k.value: v for k, v in self.player_histogram.items()},
            "companion_histogram": {k.value: v for k, v in self.companion_histogram.items()},
            "histogram_l1": self.histogram_l1,
            "branch_counts": self.branch_counts,
            "decisions": self.decisions,
            "seed": self.seed,
            "mode": self.mode,
            "policy": self.policy,
            "config_digest": self.config_digest,
        }
        return json.dumps(d, sort_keys=True, separators=(",", ":"))


def config_digest(config: GameConfig, companion_cfg: CompanionConfig) -> str:
    blob = json.dumps(
        {"game": config.to_dict(), "companion": companion_cfg.to_dict()},
        sort_keys=True,
        separators=(",", ":"),
    ).encode()
    return hashlib.blake2b(blob, digest_size=8).hexdigest()


def run_episode(
    config: GameConfig,
    policy: PolicyBase,
    companion_mode: str,
    seed: int,
    max_ticks: int,
    companion_cfg: CompanionConfig | None = None,
    trace_path=None,
) -> EpisodeReport:
    if max_ticks <= 0:
        raise ConfigurationError("max_ticks must be positive")
    companion_cfg = companion_cfg or CompanionConfig()
    core = SessionCore(config, companion_cfg, companion_mode, seed)
    policy_rng = Rng(mix_seed(seed, 1))
    state = core.state
    while state.tick < max_ticks and not state.over:
        if (
            state.tick % PLAYER_THINK_PERIOD == 0
            and engine.current_action(state, engine.PLAYER) is None
        ):
            action = policy.act(state, policy_rng)
            if action is not None:
                kind, x, y = action
                if engine.is_possible_at(state, kind, x, y):
                    core.player_action(kind, x, y)
        core.advance(1)

    if trace_path is not None:
        export_trace(core.trace, trace_path)
    phist = action_distribution(core.player_actions) if core.player_actions else {}
    chist = action_distribution(core.companion_actions) if core.companion_actions else {}
    return EpisodeReport(
        survival_ticks=state.tick if state.over else max_ticks,
        final_score=engine.score(state, config.score_weights),
        leaks=state.leaks,
        kills=state.kills,
        spawned=state.spawned,
        enemies_alive=len(state.enemies),
        player_histogram=phist,
        companion_histogram=chist,
        histogram_l1=l1_distance(phist, chist) if phist and chist else 1.0 if phist or chist else 0.0,
        branch_counts=dict(sorted(core.branch_counts.items())),
        decisions=sum(core.branch_counts.values()),
        seed=seed,
        mode=companion_mode,
        policy=policy.name,
        config_digest=config_digest(config, companion_cfg),
    )


def compare_modes(
    config: GameConfig,
    policy_name: str,
    modes,
    n_seeds: int,
    base_seed: int = 1,
    max_ticks: int = 8000,
    companion_cfg: CompanionConfig | None = None,
) -> dict:
    if n_seeds < 2:
        raise ConfigurationError("n_seeds must be >= 2")
    table = {}
    for mode in modes:
        survivals = []
        scores = []
        for i in range(n_seeds):
            report = run_episode(
                config,
                make_policy(policy_name),
                mode,
                base_seed + i,
                max_ticks,
                companion_cfg,
            )
            survivals.append(report.survival_ticks)
            scores.append(report.final_score)
        table[mode] = {
            "mean_survival_ticks": mean(survivals),
            "stddev_survival_ticks": stdev(survivals),
            "mean_final_score": mean(scores),
            "stddev_final_score": stdev(scores),
            "n": n_seeds,
        }
    return table


# ---------------------------------------------------------------------------
# trace persistence (JSON Lines)


def export_trace(trace: Trace, path) -> None:
    with open(path, "w") as f:
        for e in trace:
            f.write(
                json.dumps(
                    {
                        "tick": e.tick,
                        "kind": e.kind.value,
                        "x": e.point[0],
                        "y": e.point[1],
                        "sv": list(e.sv),
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
            f.write("\n")


def import_trace(path) -> Trace:
    trace = Trace()
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                entry = TraceEntry(
                    tuple(d["sv"]), ActionKind(d["kind"]), (d["x"], d["y"]), d["tick"]
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise TraceParseError(lineno, str(exc)) from None
            if trace.entries and entry.tick <= trace.entries[-1].tick:
                raise TraceParseError(lineno, "tick not increasing")
            trace.entries.append(entry)
    return trace


# ---------------------------------------------------------------------------
# scenario files


def load_scenario(path) -> tuple:
    """Scenario file: {"game": GameConfig dict, "companion": CompanionConfig
    dict (optional)}. Returns (GameConfig, CompanionConfig)."""
    with open(path) as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as exc:
            raise TraceParseError(exc.lineno, f"invalid scenario JSON: {exc.msg}") from None
    try:
        game = GameConfig.from_dict(d.get("game", {}))
        comp = CompanionConfig.from_dict(d.get("companion", {}))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"bad scenario file: {exc}") from None
    return game, comp


def replay_schedule(
    config: GameConfig,
    companion_cfg: CompanionConfig,
    schedule,
    mode: str,
    seed: int,
    max_ticks: int,
) -> int:
    """Run a fixed (tick, kind, x, y) schedule headlessly; returns the
    final state hash (oracle for served-vs-headless equivalence)."""
    core = SessionCore(config, companion_cfg, mode, seed)
    pending = sorted(schedule, key=lambda a: a[0])
    i = 0
    while core.state.tick < max_ticks and not core.state.over:
        while i < len(pending) and pending[i][0] == core.state.tick:
            _, kind, x, y = pending[i]
            i += 1
            if engine.is_possible_at(core.state, ActionKind(kind), x, y):
                core.player_action(ActionKind(kind), x, y)
        core.advance(1)
    return engine.state_hash(core.state)
