"""Deterministic headless tower-defense simulation.

All simulation arithmetic is integer (enemy positions are fixed-point
milli-cells) so state hashes match across platforms. Enemies spawn off
the right edge and walk left down their lane toward the base; walls and
towers block them, towers fire on a fixed cadence, and an enemy that
walks off the left edge leaks. The game is over once leaks reach the
configured limit.

Snapshots are the canonical JSON serialization of the full state, which
doubles as the hash input, the wire-delta source and the persistence
format.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import ActionRejected, ConfigurationError
from .regions import Rect

FP = 1000  # fixed-point scale: milli-cells

SERIALIZATION_VERSION = 1


class ActionKind(str, Enum):
    BUILD_TOWER = "build_tower"
    BUILD_WALL = "build_wall"
    REPAIR = "repair"
    UPGRADE_TOWER = "upgrade_tower"
    IDLE = "idle"


# Non-idle kinds, in canonical order.
ACTION_KINDS = (
    ActionKind.BUILD_TOWER,
    ActionKind.BUILD_WALL,
    ActionKind.REPAIR,
    ActionKind.UPGRADE_TOWER,
)

# Ticks to complete each action at tick_rate 20/s.
ACTION_DURATIONS = {
    ActionKind.BUILD_TOWER: 60,
    ActionKind.BUILD_WALL: 30,
    ActionKind.REPAIR: 40,
    ActionKind.UPGRADE_TOWER: 80,
}

TOWER_BASE_HEALTH = 80
WALL_HEALTH = 120
MAX_TOWER_LEVEL = 3
TOWER_RANGE = 3  # cells, chebyshev
TOWER_FIRE_PERIOD = 8  # ticks
TOWER_BASE_DAMAGE = 10
ENEMY_ATTACK_PERIOD = 10  # ticks between melee hits on a blocking structure
ARMOR_REDUCTION = 3  # flat damage reduction for armored enemies
WAVE_STAGGER = 20  # tick offset between extra spawns within a wave

PLAYER = "player"
COMPANION = "companion"


@dataclass(frozen=True)
class EnemyType:
    id: str
    speed: int  # milli-cells per tick
    health: int
    damage: int
    ability: str = "none"  # none | fast | armored

    def validate(self) -> None:
        if self.speed <= 0 or self.health <= 0:
            raise ConfigurationError(f"enemy type {self.id}: speed and health must be positive")
        if self.ability not in ("none", "fast", "armored"):
            raise ConfigurationError(f"enemy type {self.id}: unknown ability {self.ability}")


@dataclass(frozen=True)
class SpawnEntry:
    tick: int
    enemy_type: str
    lane: int


@dataclass(frozen=True)
class ScoreWeights:
    w_health: int = 5
    w_resources: int = 1
    w_kills: int = 2
    w_leaks: int = 10


@dataclass
class GameConfig:
    map_width: int = 24
    map_height: int = 8
    enemy_types: tuple = (
        EnemyType("grunt", speed=30, health=50, damage=16),
        EnemyType("runner", speed=55, health=25, damage=8, ability="fast"),
        EnemyType("brute", speed=18, health=150, damage=30, ability="armored"),
    )
    spawn_schedule: tuple = (
        SpawnEntry(100, "grunt", 1),
        SpawnEntry(200, "grunt", 5),
        SpawnEntry(320, "runner", 3),
        SpawnEntry(440, "grunt", 6),
        SpawnEntry(520, "brute", 2),
    )
    wave_period: int = 600  # schedule cycles with one extra copy per wave
    wave_health_growth_pct: int = 12  # enemy health scales with wave number
    costs: dict = field(
        default_factory=lambda: {
            ActionKind.BUILD_TOWER: 150,
            ActionKind.BUILD_WALL: 25,
            ActionKind.REPAIR: 25,
            ActionKind.UPGRADE_TOWER: 120,
        }
    )
    income_per_tick: int = 1
    starting_resources: int = 250
    kill_reward: int = 1
    base_max_health: int = 100
    leak_limit: int = 10
    max_speed: int = 16
    score_weights: ScoreWeights = field(default_factory=ScoreWeights)
    tick_rate: int = 20

    def __post_init__(self):
        self.validate()
        self._types_by_id = {t.id: t for t in self.enemy_types}
        self._canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def validate(self) -> None:
        if self.map_width <= 0 or self.map_height <= 0:
            raise ConfigurationError(
                f"map dimensions must be positive, got {self.map_width}x{self.map_height}"
            )
        if self.leak_limit < 1:
            raise ConfigurationError("leak_limit must be >= 1")
        if self.max_speed < 1:
            raise ConfigurationError("max_speed must be >= 1")
        if self.base_max_health <= 0 or self.tick_rate <= 0 or self.wave_period <= 0:
            raise ConfigurationError("counts must be positive")
        if self.wave_health_growth_pct < 0:
            raise ConfigurationError("wave_health_growth_pct must be >= 0")
        if self.starting_resources < 0 or self.income_per_tick < 0:
            raise ConfigurationError("resources must be non-negative")
        if not self.enemy_types:
            raise ConfigurationError("at least one enemy type required")
        for t in self.enemy_types:
            t.validate()
        ids = {t.id for t in self.enemy_types}
        for e in self.spawn_schedule:
            if e.enemy_type not in ids:
                raise ConfigurationError(f"spawn entry references unknown enemy type {e.enemy_type}")
            if not (0 <= e.lane < self.map_height):
                raise ConfigurationError(f"spawn lane {e.lane} out of range")

    def enemy_type(self, type_id: str) -> EnemyType:
        return self._types_by_id[type_id]

    def to_dict(self) -> dict:
        return {
            "map_width": self.map_width,
            "map_height": self.map_height,
            "enemy_types": [
                {"id": t.id, "speed": t.speed, "health": t.health, "damage": t.damage, "ability": t.ability}
                for t in self.enemy_types
            ],
            "spawn_schedule": [[e.tick, e.enemy_type, e.lane] for e in self.spawn_schedule],
            "wave_period": self.wave_period,
            "wave_health_growth_pct": self.wave_health_growth_pct,
            "costs": {k.value: v for k, v in self.costs.items()},
            "income_per_tick": self.income_per_tick,
            "starting_resources": self.starting_resources,
            "kill_reward": self.kill_reward,
            "base_max_health": self.base_max_health,
            "leak_limit": self.leak_limit,
            "max_speed": self.max_speed,
            "score_weights": {
                "w_health": self.score_weights.w_health,
                "w_resources": self.score_weights.w_resources,
                "w_kills": self.score_weights.w_kills,
                "w_leaks": self.score_weights.w_leaks,
            },
            "tick_rate": self.tick_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameConfig":
        kwargs = {}
        for key in (
            "map_width", "map_height", "wave_period", "wave_health_growth_pct", "income_per_tick",
            "starting_resources", "kill_reward", "base_max_health",
            "leak_limit", "max_speed", "tick_rate",
        ):
            if key in d:
                kwargs[key] = int(d[key])
        if "enemy_types" in d:
            kwargs["enemy_types"] = tuple(
                EnemyType(t["id"], int(t["speed"]), int(t["health"]), int(t["damage"]), t.get("ability", "none"))
                for t in d["enemy_types"]
            )
        if "spawn_schedule" in d:
            kwargs["spawn_schedule"] = tuple(
                SpawnEntry(int(e[0]), e[1], int(e[2])) for e in d["spawn_schedule"]
            )
        if "costs" in d:
            kwargs["costs"] = {ActionKind(k): int(v) for k, v in d["costs"].items()}
        if "score_weights" in d:
            w = d["score_weights"]
            kwargs["score_weights"] = ScoreWeights(
                int(w["w_health"]), int(w["w_resources"]), int(w["w_kills"]), int(w["w_leaks"])
            )
        return cls(**kwargs)


@dataclass
class Structure:
    kind: str  # "tower" | "wall"
    x: int
    y: int
    health: int
    level: int = 1


def structure_max_health(s: Structure) -> int:
    if s.kind == "tower":
        return TOWER_BASE_HEALTH * s.level
    return WALL_HEALTH


@dataclass
class Enemy:
    uid: int
    type_id: str
    lane: int
    pos: int  # milli-cells from left edge; leak at pos < 0
    health: int


@dataclass
class InProgressAction:
    actors: list
    kind: ActionKind
    x: int
    y: int
    ticks_remaining: int


class GameState:
    __slots__ = (
        "config", "tick", "rng_state", "resources", "base_health", "leaks",
        "kills", "spawned", "structures", "enemies", "in_progress", "speed",
        "over", "last_player_action_tick", "next_enemy_id", "_struct_at",
    )

    def __init__(self, config: GameConfig):
        self.config = config
        self.tick = 0
        self.rng_state = 0
        self.resources = config.starting_resources
        self.base_health = config.base_max_health
        self.leaks = 0
        self.kills = 0
        self.spawned = 0
        self.structures: list[Structure] = []
        self.enemies: list[Enemy] = []
        self.in_progress: list[InProgressAction] = []
        self.speed = 1
        self.over = False
        self.last_player_action_tick = 0
        self.next_enemy_id = 0
        self._struct_at: dict = {}

    def structure_at(self, x: int, y: int):
        return self._struct_at.get((x, y))

    def clone(self) -> "GameState":
        s = GameState.__new__(GameState)
        s.config = self.config
        s.tick = self.tick
        s.rng_state = self.rng_state
        s.resources = self.resources
        s.base_health = self.base_health
        s.leaks = self.leaks
        s.kills = self.kills
        s.spawned = self.spawned
        s.structures = [Structure(st.kind, st.x, st.y, st.health, st.level) for st in self.structures]
        s.enemies = [Enemy(e.uid, e.type_id, e.lane, e.pos, e.health) for e in self.enemies]
        s.in_progress = [
            InProgressAction(list(ip.actors), ip.kind, ip.x, ip.y, ip.ticks_remaining)
            for ip in self.in_progress
        ]
        s.speed = self.speed
        s.over = self.over
        s.last_player_action_tick = self.last_player_action_tick
        s.next_enemy_id = self.next_enemy_id
        s._struct_at = {(st.x, st.y): st for st in s.structures}
        return s

    def to_dict(self) -> dict:
        return {
            "v": SERIALIZATION_VERSION,
            "config": self.config.to_dict(),
            "tick": self.tick,
            "rng_state": self.rng_state,
            "resources": self.resources,
            "base_health": self.base_health,
            "leaks": self.leaks,
            "kills": self.kills,
            "spawned": self.spawned,
            "structures": [[s.kind, s.x, s.y, s.health, s.level] for s in self.structures],
            "enemies": [[e.uid, e.type_id, e.lane, e.pos, e.health] for e in self.enemies],
            "in_progress": [
                [sorted(ip.actors), ip.kind.value, ip.x, ip.y, ip.ticks_remaining]
                for ip in self.in_progress
            ],
            "speed": self.speed,
            "over": self.over,
            "last_player_action_tick": self.last_player_action_tick,
            "next_enemy_id": self.next_enemy_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameState":
        if d.get("v") != SERIALIZATION_VERSION:
            raise ConfigurationError(f"unsupported serialization version {d.get('v')}")
        s = cls(GameConfig.from_dict(d["config"]))
        s.tick = d["tick"]
        s.rng_state = d["rng_state"]
        s.resources = d["resources"]
        s.base_health = d["base_health"]
        s.leaks = d["leaks"]
        s.kills = d["kills"]
        s.spawned = d["spawned"]
        s.structures = [Structure(k, x, y, h, lv) for k, x, y, h, lv in d["structures"]]
        s.enemies = [Enemy(u, t, ln, p, h) for u, t, ln, p, h in d["enemies"]]
        s.in_progress = [
            InProgressAction(list(a), ActionKind(k), x, y, tr) for a, k, x, y, tr in d["in_progress"]
        ]
        s.speed = d["speed"]
        s.over = d["over"]
        s.last_player_action_tick = d["last_player_action_tick"]
        s.next_enemy_id = d["next_enemy_id"]
        s._struct_at = {(st.x, st.y): st for st in s.structures}
        return s


def new_game(config: GameConfig, seed: int) -> GameState:
    config.validate()
    state = GameState(config)
    state.rng_state = seed & 0xFFFFFFFFFFFFFFFF
    return state


def snapshot(state: GameState) -> bytes:
    """Canonical serialized copy; restore() round-trips exactly."""
    return json.dumps(state.to_dict(), sort_keys=True, separators=(",", ":")).encode()


def restore(snap: bytes) -> GameState:
    return GameState.from_dict(json.loads(snap.decode()))


def state_hash(state: GameState) -> int:
    digest = hashlib.blake2b(snapshot(state), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def set_speed(state: GameState, multiplier: int) -> GameState:
    if not (1 <= multiplier <= state.config.max_speed):
        raise ConfigurationError(
            f"speed {multiplier} outside [1, {state.config.max_speed}]"
        )
    state.speed = multiplier
    return state


def _complete_action(state: GameState, ip: InProgressAction) -> None:
    cell = (ip.x, ip.y)
    existing = state._struct_at.get(cell)
    if ip.kind is ActionKind.BUILD_TOWER or ip.kind is ActionKind.BUILD_WALL:
        if existing is not None:
            return  # cell taken since the build started; action fizzles
        kind = "tower" if ip.kind is ActionKind.BUILD_TOWER else "wall"
        s = Structure(kind, ip.x, ip.y, TOWER_BASE_HEALTH if kind == "tower" else WALL_HEALTH, 1)
        state.structures.append(s)
        state._struct_at[cell] = s
    elif ip.kind is ActionKind.REPAIR:
        if existing is not None:
            existing.health = structure_max_health(existing)
    elif ip.kind is ActionKind.UPGRADE_TOWER:
        if existing is not None and existing.kind == "tower" and existing.level < MAX_TOWER_LEVEL:
            existing.level += 1


def _remove_structure(state: GameState, s: Structure) -> None:
    state.structures.remove(s)
    del state._struct_at[(s.x, s.y)]


def step(state: GameState, ticks: int) -> GameState:
    if ticks < 0:
        raise ConfigurationError("ticks must be >= 0")
    cfg = state.config
    schedule = cfg.spawn_schedule
    period = cfg.wave_period
    height = cfg.map_height
    spawn_x = cfg.map_width * FP
    struct_at = state._struct_at

    for _ in range(ticks):
        if state.over:
            state.tick += 1
            continue
        t = state.tick

        # spawns: wave k of an entry spawns k+1 copies, staggered
        for entry in schedule:
            d = t - entry.tick
            if d < 0:
                continue
            k, r = divmod(d, period)
            if r % WAVE_STAGGER == 0:
                j = r // WAVE_STAGGER
                if j <= k:
                    et = cfg.enemy_type(entry.enemy_type)
                    lane = (entry.lane + j) % height
                    health = et.health * (100 + cfg.wave_health_growth_pct * k) // 100
                    state.enemies.append(
                        Enemy(state.next_enemy_id, et.id, lane, spawn_x, health)
                    )
                    state.next_enemy_id += 1
                    state.spawned += 1

        # in-progress actions
        if state.in_progress:
            finished = None
            for ip in state.in_progress:
                ip.ticks_remaining -= 1
                if ip.ticks_remaining <= 0:
                    if finished is None:
                        finished = []
                    finished.append(ip)
            if finished:
                for ip in finished:
                    _complete_action(state, ip)
                state.in_progress = [ip for ip in state.in_progress if ip.ticks_remaining > 0]

        # enemy movement / melee
        attack_tick = t % ENEMY_ATTACK_PERIOD == 0
        leaked = None
        destroyed = None
        for en in state.enemies:
            et = cfg.enemy_type(en.type_id)
            new_pos = en.pos - et.speed
            if new_pos < 0:
                if leaked is None:
                    leaked = []
                leaked.append(en)
                continue
            cur_cell = en.pos // FP
            new_cell = new_pos // FP
            if new_cell != cur_cell:
                blocker = struct_at.get((new_cell, en.lane))
                if blocker is not None:
                    en.pos = (new_cell + 1) * FP
                    if attack_tick:
                        blocker.health -= et.damage
                        if blocker.health <= 0:
                            if destroyed is None:
                                destroyed = []
                            if blocker not in destroyed:
                                destroyed.append(blocker)
                    continue
            en.pos = new_pos
        if destroyed:
            for s in destroyed:
                _remove_structure(state, s)
        if leaked:
            for en in leaked:
                state.enemies.remove(en)
                state.leaks += 1
                et = cfg.enemy_type(en.type_id)
                state.base_health = max(0, state.base_health - et.damage)
            if state.leaks >= cfg.leak_limit:
                state.over = True
                state.tick += 1
                continue

        # tower fire
        if t % TOWER_FIRE_PERIOD == 0 and state.enemies:
            dead = None
            lanes: dict = {}
            for en in state.enemies:
                lanes.setdefault(en.lane, []).append(en)
            for s in state.structures:
                if s.kind != "tower":
                    continue
                target = None
                lo = (s.x - TOWER_RANGE) * FP
                hi = (s.x + TOWER_RANGE + 1) * FP
                for lane in range(s.y - TOWER_RANGE, s.y + TOWER_RANGE + 1):
                    for en in lanes.get(lane, ()):
                        if en.health <= 0 or not (lo <= en.pos < hi):
                            continue
                        if target is None or en.pos < target.pos or (
                            en.pos == target.pos and en.uid < target.uid
                        ):
                            target = en
                if target is not None:
                    dmg = TOWER_BASE_DAMAGE * s.level
                    if cfg.enemy_type(target.type_id).ability == "armored":
                        dmg = max(1, dmg - ARMOR_REDUCTION)
                    target.health -= dmg
                    if target.health <= 0:
                        if dead is None:
                            dead = []
                        dead.append(target)
            if dead:
                for en in dead:
                    state.enemies.remove(en)
                    state.kills += 1
                    state.resources += cfg.kill_reward

        state.resources += cfg.income_per_tick
        state.tick += 1
    return state


def _pending_cells(state: GameState) -> set:
    return {
        (ip.x, ip.y)
        for ip in state.in_progress
        if ip.kind in (ActionKind.BUILD_TOWER, ActionKind.BUILD_WALL)
    }


def _clip(rect: Rect, cfg: GameConfig) -> Rect:
    return Rect(
        max(0, rect.x0), max(0, rect.y0),
        min(cfg.map_width, rect.x1), min(cfg.map_height, rect.y1),
    )


def _candidate_cells(state: GameState, kind: ActionKind, rect: Rect):
    """Cells where `kind` could legally target inside rect (clipped)."""
    cfg = state.config
    r = _clip(rect, cfg)
    if r.x0 >= r.x1 or r.y0 >= r.y1:
        return
    if kind in (ActionKind.BUILD_TOWER, ActionKind.BUILD_WALL):
        occupied = set(state._struct_at) | _pending_cells(state)
        for y in range(r.y0, r.y1):
            for x in range(r.x0, r.x1):
                if (x, y) not in occupied:
                    yield (x, y)
    elif kind is ActionKind.REPAIR:
        for s in state.structures:
            if r.contains(s.x, s.y) and s.health < structure_max_health(s):
                yield (s.x, s.y)
    elif kind is ActionKind.UPGRADE_TOWER:
        for s in state.structures:
            if r.contains(s.x, s.y) and s.kind == "tower" and s.level < MAX_TOWER_LEVEL:
                yield (s.x, s.y)


def is_possible_at(state: GameState, kind: ActionKind, x: int, y: int) -> bool:
    """Legality of `kind` at one exact cell (player-facing check)."""
    if kind is ActionKind.IDLE:
        return True
    cfg = state.config
    if state.over or state.resources < cfg.costs[kind]:
        return False
    if not (0 <= x < cfg.map_width and 0 <= y < cfg.map_height):
        return False
    s = state.structure_at(x, y)
    if kind in (ActionKind.BUILD_TOWER, ActionKind.BUILD_WALL):
        return s is None and (x, y) not in _pending_cells(state)
    if kind is ActionKind.REPAIR:
        return s is not None and s.health < structure_max_health(s)
    if kind is ActionKind.UPGRADE_TOWER:
        return s is not None and s.kind == "tower" and s.level < MAX_TOWER_LEVEL
    return False


def is_possible(state: GameState, kind: ActionKind, rect: Rect) -> bool:
    """True iff the action is affordable and has a legal target in rect."""
    if kind is ActionKind.IDLE:
        return True
    if state.over or state.resources < state.config.costs[kind]:
        return False
    if kind in (ActionKind.BUILD_TOWER, ActionKind.BUILD_WALL):
        r = _clip(rect, state.config)
        if r.x0 >= r.x1 or r.y0 >= r.y1:
            return False
        # more free cells than occupiers: an empty cell must exist
        if r.area > len(state.structures) + len(state.in_progress):
            return True
    for _ in _candidate_cells(state, kind, rect):
        return True
    return False


def _pick_cell(state: GameState, kind: ActionKind, rect: Rect):
    """Legal cell nearest the rect center, row-major tie-break."""
    r = _clip(rect, state.config)
    cx2 = r.x0 + r.x1 - 1  # center x2, avoids fractions
    cy2 = r.y0 + r.y1 - 1
    best = None
    best_key = None
    for (x, y) in _candidate_cells(state, kind, rect):
        d = (2 * x - cx2) ** 2 + (2 * y - cy2) ** 2
        key = (d, y, x)
        if best_key is None or key < best_key:
            best = (x, y)
            best_key = key
    return best


def apply_action_at(state: GameState, actor: str, kind: ActionKind, x: int, y: int) -> GameState:
    """Start an action at an exact cell (used by live players/policies)."""
    if kind is ActionKind.IDLE:
        return state
    if state.over:
        raise ActionRejected("game is over")
    cfg = state.config
    if state.resources < cfg.costs[kind]:
        raise ActionRejected(f"cannot afford {kind.value}")
    if not is_possible_at(state, kind, x, y):
        raise ActionRejected(f"no legal target for {kind.value} at ({x}, {y})")
    state.resources -= cfg.costs[kind]
    state.in_progress.append(
        InProgressAction([actor], kind, x, y, ACTION_DURATIONS[kind])
    )
    if actor == PLAYER:
        state.last_player_action_tick = state.tick
    return state


def apply_action(state: GameState, actor: str, kind: ActionKind, rect: Rect) -> GameState:
    """Start an action somewhere in rect; the engine picks the exact cell
    (legal cell nearest the region center)."""
    if kind is ActionKind.IDLE:
        return state
    if state.over:
        raise ActionRejected("game is over")
    if state.resources < state.config.costs[kind]:
        raise ActionRejected(f"cannot afford {kind.value}")
    cell = _pick_cell(state, kind, rect)
    if cell is None:
        raise ActionRejected(f"no legal target for {kind.value} in region")
    return apply_action_at(state, actor, kind, cell[0], cell[1])


def join_action(state: GameState, actor: str, ip: InProgressAction) -> None:
    """Second actor joins an in-progress action; remaining time halves."""
    if ip not in state.in_progress:
        raise ActionRejected("action no longer in progress")
    if actor in ip.actors:
        raise ActionRejected(f"{actor} already working on this action")
    ip.actors.append(actor)
    ip.ticks_remaining = max(1, ip.ticks_remaining // 2)


def current_action(state: GameState, actor: str):
    """The actor's in-progress action, if any (one at a time per actor)."""
    for ip in state.in_progress:
        if actor in ip.actors:
            return ip
    return None


FEATURE_NAMES = (
    "resources",
    "base_health",
    "leaks",
    "kills",
    "enemy_count",
    "nearest_enemy_distance_to_base",
    "tower_count",
    "wall_count",
    "mean_structure_health_pct",
    "ticks_since_last_player_action",
)


def feature_vector(state: GameState, indices=None) -> tuple:
    """Numeric state summary; `indices` selects an ordered subset."""
    towers = 0
    walls = 0
    health_pct_sum = 0
    for s in state.structures:
        if s.kind == "tower":
            towers += 1
        else:
            walls += 1
        health_pct_sum += s.health * 100 // structure_max_health(s)
    n_struct = towers + walls
    mean_pct = health_pct_sum // n_struct if n_struct else 100
    if state.enemies:
        nearest = min(e.pos for e in state.enemies)
    else:
        nearest = state.config.map_width * FP
    full = (
        state.resources,
        state.base_health,
        state.leaks,
        state.kills,
        len(state.enemies),
        nearest,
        towers,
        walls,
        mean_pct,
        state.tick - state.last_player_action_tick,
    )
    if indices is None:
        return full
    return tuple(full[i] for i in indices)


def score(state: GameState, weights: ScoreWeights) -> int:
    return (
        weights.w_health * state.base_health
        + weights.w_resources * state.resources
        + weights.w_kills * state.kills
        - weights.w_leaks * state.leaks
    )
