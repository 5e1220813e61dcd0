"""Complementary decision pipeline for the companion.

One decide() call walks the stochastic branch structure: activation
gate, enabling search when the player's predicted next action is
blocked, a chance to help with the player's current action, a chance to
perform the predicted action in parallel, rollout-scored best-state
selection with the jeopardy filter, a last-resort unseen action, and a
final experimentation override. Rollouts run on independent clones of
the basis state, so live play is never mutated or paused.
"""

from dataclasses import dataclass, field
from enum import Enum

from . import engine
from .engine import ActionKind, GameState, ScoreWeights
from .errors import ActionRejected, ConfigurationError, DomainError
from .player_model import (
    ClassifierKind,
    FeatureConfig,
    PredictorModel,
    Trace,
    predict_next,
    seen_pairs,
    train,
    unseen_actions,
)
from .regions import RegionSet
from .rng import Rng


class Branch(str, Enum):
    INACTIVE = "inactive"
    ENABLE_PREDICTED = "enable_predicted"
    HELP_CURRENT = "help_current"
    PARALLEL_PREDICTED = "parallel_predicted"
    BEST_STATE = "best_state"
    LAST_RESORT_UNSEEN = "last_resort_unseen"
    DEFAULT_BEHAVIOR = "default_behavior"
    EXPERIMENT_OVERRIDE = "experiment_override"


@dataclass
class CompanionConfig:
    p_help: float = 0.3
    p_parallel: float = 0.5
    p_experiment: float = 0.1
    horizon_ticks: int = 600
    retrain_every: int = 5
    intro_threshold: int = 20
    classifier: ClassifierKind = field(default_factory=lambda: ClassifierKind("decision_tree", max_depth=8, min_samples_split=2))
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)
    score_weights: ScoreWeights = field(default_factory=ScoreWeights)
    decision_epoch_ticks: int = 40
    max_rollout_pairs: int = 0  # 0 = evaluate every seen pair

    def __post_init__(self):
        for name in ("p_help", "p_parallel", "p_experiment"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigurationError(f"{name}={v} outside [0, 1]")
        if self.horizon_ticks < max(engine.ACTION_DURATIONS.values()):
            raise ConfigurationError(
                "horizon_ticks must cover the longest action duration"
            )
        if self.intro_threshold < 2:
            raise ConfigurationError("intro_threshold must be >= 2")
        if self.retrain_every < 1 or self.decision_epoch_ticks < 1:
            raise ConfigurationError("cadences must be >= 1")

    def to_dict(self) -> dict:
        return {
            "p_help": self.p_help,
            "p_parallel": self.p_parallel,
            "p_experiment": self.p_experiment,
            "horizon_ticks": self.horizon_ticks,
            "retrain_every": self.retrain_every,
            "intro_threshold": self.intro_threshold,
            "classifier": {
                "name": self.classifier.name,
                "max_depth": self.classifier.max_depth,
                "min_samples_split": self.classifier.min_samples_split,
                "k": self.classifier.k,
            },
            "feature_indices": list(self.feature_config.indices),
            "score_weights": {
                "w_health": self.score_weights.w_health,
                "w_resources": self.score_weights.w_resources,
                "w_kills": self.score_weights.w_kills,
                "w_leaks": self.score_weights.w_leaks,
            },
            "decision_epoch_ticks": self.decision_epoch_ticks,
            "max_rollout_pairs": self.max_rollout_pairs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompanionConfig":
        kwargs = {}
        for key in ("p_help", "p_parallel", "p_experiment"):
            if key in d:
                kwargs[key] = float(d[key])
        for key in (
            "horizon_ticks", "retrain_every", "intro_threshold",
            "decision_epoch_ticks", "max_rollout_pairs",
        ):
            if key in d:
                kwargs[key] = int(d[key])
        if "classifier" in d:
            c = d["classifier"]
            kwargs["classifier"] = ClassifierKind(
                c["name"],
                max_depth=int(c.get("max_depth", 8)),
                min_samples_split=int(c.get("min_samples_split", 2)),
                k=int(c.get("k", 3)),
            )
        if "feature_indices" in d:
            kwargs["feature_config"] = FeatureConfig(tuple(d["feature_indices"]))
        if "score_weights" in d:
            w = d["score_weights"]
            kwargs["score_weights"] = ScoreWeights(
                int(w["w_health"]), int(w["w_resources"]), int(w["w_kills"]), int(w["w_leaks"])
            )
        return cls(**kwargs)


@dataclass
class DecisionOutcome:
    chosen: tuple | None  # (ActionKind, region id) or None for idle/default
    branch: Branch
    basis_tick: int
    rng_draws: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chosen": [self.chosen[0].value, self.chosen[1]] if self.chosen else None,
            "branch": self.branch.value,
            "basis_tick": self.basis_tick,
            "rng_draws": [[label, value] for label, value in self.rng_draws],
        }


def _rollout(state: GameState, kind: ActionKind, rect, cfg: CompanionConfig) -> GameState:
    clone = state.clone()
    engine.apply_action(clone, engine.COMPANION, kind, rect)
    engine.step(clone, cfg.horizon_ticks)
    return clone


def _rollout_pairs(seen, cfg: CompanionConfig):
    # cap preserves first-occurrence order, matching the tie-break rule
    if cfg.max_rollout_pairs and len(seen) > cfg.max_rollout_pairs:
        return seen[: cfg.max_rollout_pairs]
    return seen


def predict_best_state_action(state, seen, predicted, cfg: CompanionConfig, rs: RegionSet):
    """Rollout-score each possible seen pair; drop pairs whose end state
    blocks the player's predicted action (jeopardy filter); return the
    argmax survivor, ties by first occurrence in `seen`."""
    pred_kind, pred_region = predicted
    pred_rect = rs.region_bounds(pred_region)
    # a candidate only jeopardizes the predicted pair if the pair was
    # possible to begin with and the rollout end state blocks it
    pred_possible_now = engine.is_possible(state, pred_kind, pred_rect)
    best = None
    best_score = None
    for kind, rid in _rollout_pairs(seen, cfg):
        rect = rs.region_bounds(rid)
        if not engine.is_possible(state, kind, rect):
            continue
        end = _rollout(state, kind, rect, cfg)
        if pred_possible_now and not engine.is_possible(end, pred_kind, pred_rect):
            continue
        sc = engine.score(end, cfg.score_weights)
        if best is None or sc > best_score:
            best = (kind, rid)
            best_score = sc
    return best


def find_enabling_action(state, seen, predicted, cfg: CompanionConfig, rs: RegionSet):
    """The predicted action is currently impossible: find the seen pair
    whose rollout end state makes it possible, highest end score first."""
    pred_kind, pred_region = predicted
    pred_rect = rs.region_bounds(pred_region)
    best = None
    best_score = None
    for kind, rid in _rollout_pairs(seen, cfg):
        rect = rs.region_bounds(rid)
        if not engine.is_possible(state, kind, rect):
            continue
        end = _rollout(state, kind, rect, cfg)
        if not engine.is_possible(end, pred_kind, pred_rect):
            continue
        sc = engine.score(end, cfg.score_weights)
        if best is None or sc > best_score:
            best = (kind, rid)
            best_score = sc
    return best


def help_current(state: GameState, player_current, rs: RegionSet):
    """(kind, region) of the player's in-progress action if the companion
    can join it; None otherwise."""
    if player_current is None:
        return None
    if player_current not in state.in_progress:
        return None
    if engine.COMPANION in player_current.actors:
        return None
    return (player_current.kind, rs.lookup(player_current.x, player_current.y))


def decide(
    state: GameState,
    trace: Trace,
    rs: RegionSet,
    model: PredictorModel | None,
    cfg: CompanionConfig,
    rng: Rng,
    player_current=None,
) -> DecisionOutcome:
    basis_tick = state.tick
    if len(trace) < cfg.intro_threshold or model is None:
        return DecisionOutcome(None, Branch.INACTIVE, basis_tick)

    draws = []
    sv = engine.feature_vector(state)
    predicted = predict_next(model, sv)
    try:
        pred_rect = rs.region_bounds(predicted[1])
    except DomainError:
        pred_rect = None

    chosen = None
    branch = None
    if pred_rect is None or not engine.is_possible(state, predicted[0], pred_rect):
        if pred_rect is not None:
            enabling = find_enabling_action(state, seen_pairs(trace, rs), predicted, cfg, rs)
            if enabling is not None:
                chosen, branch = enabling, Branch.ENABLE_PREDICTED
        # no enabling action found: fall through to best-state
    else:
        u1 = rng.uniform()
        draws.append(("help", u1))
        helped = help_current(state, player_current, rs) if u1 < cfg.p_help else None
        if helped is not None:
            chosen, branch = helped, Branch.HELP_CURRENT
        else:
            u2 = rng.uniform()
            draws.append(("parallel", u2))
            if u2 < cfg.p_parallel:
                chosen, branch = predicted, Branch.PARALLEL_PREDICTED

    if branch is None:
        best = predict_best_state_action(state, seen_pairs(trace, rs), predicted, cfg, rs)
        if best is not None:
            chosen, branch = best, Branch.BEST_STATE
        else:
            rid = rs.sample_region(rng)
            draws.append(("last_resort_region", rid))
            picked = None
            for kind in unseen_actions(trace):
                if engine.is_possible(state, kind, rs.region_bounds(rid)):
                    picked = (kind, rid)
                    break
            if picked is not None:
                chosen, branch = picked, Branch.LAST_RESORT_UNSEEN
            else:
                chosen, branch = None, Branch.DEFAULT_BEHAVIOR

    # final experimentation override
    u3 = rng.uniform()
    draws.append(("experiment", u3))
    if u3 < cfg.p_experiment:
        rid = rs.sample_region(rng)
        draws.append(("experiment_region", rid))
        options = [
            kind
            for kind in unseen_actions(trace)
            if engine.is_possible(state, kind, rs.region_bounds(rid))
        ]
        if options:
            idx = rng.randrange(len(options))
            draws.append(("experiment_kind", idx))
            chosen, branch = (options[idx], rid), Branch.EXPERIMENT_OVERRIDE

    return DecisionOutcome(chosen, branch, basis_tick, draws)


def maybe_retrain(trace: Trace, rs: RegionSet, cfg: CompanionConfig, last_trained_count: int):
    """Retrain when the trace grew by at least retrain_every entries."""
    if len(trace) - last_trained_count >= cfg.retrain_every and len(trace) > 0:
        return train(trace, rs, cfg.classifier, cfg.feature_config)
    return None


def execute_outcome(state: GameState, rs: RegionSet, outcome: DecisionOutcome) -> bool:
    """Apply a decision to the live state; revalidates first (the basis
    state may be stale). Returns True if an action was started/joined."""
    if outcome.branch in (Branch.INACTIVE, Branch.DEFAULT_BEHAVIOR) or outcome.chosen is None:
        return False
    if outcome.branch is Branch.HELP_CURRENT:
        kind, rid = outcome.chosen
        rect = rs.region_bounds(rid)
        for ip in state.in_progress:
            if (
                engine.PLAYER in ip.actors
                and engine.COMPANION not in ip.actors
                and ip.kind is kind
                and rect.contains(ip.x, ip.y)
            ):
                engine.join_action(state, engine.COMPANION, ip)
                return True
        return False
    kind, rid = outcome.chosen
    try:
        rect = rs.region_bounds(rid)
        if not engine.is_possible(state, kind, rect):
            return False
        engine.apply_action(state, engine.COMPANION, kind, rect)
        return True
    except (ActionRejected, DomainError):
        return False
