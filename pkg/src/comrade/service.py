"""Live-play session service.

One WebSocket connection drives one session. The server is the single
authority over game state; clients send versioned JSON envelopes and
render only what the server confirms. Companion decisions run in a
worker thread on a cloned state, so the tick cadence never blocks on
rollouts (the fix for the single-threaded blackout problem).

A manual-clock mode replaces the wall-clock ticker with an `advance`
message, which makes served runs byte-reproducible for the
served-vs-headless equivalence tests.
"""

import asyncio
import json
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import engine
from .companion import CompanionConfig, decide
from .engine import ActionKind, GameConfig
from .errors import ActionRejected, DomainError
from .harness import SessionCore, export_trace, import_trace
from .player_model import Trace, train
from .regions import RegionSet

log = logging.getLogger("comrade.service")

PROTOCOL_VERSION = 1


def _state_delta(core: SessionCore) -> dict:
    s = core.state
    return {
        "type": "state_delta",
        "protocol_version": PROTOCOL_VERSION,
        "tick": s.tick,
        "resources": s.resources,
        "base_health": s.base_health,
        "leaks": s.leaks,
        "kills": s.kills,
        "speed": s.speed,
        "over": s.over,
        "entities": {
            "structures": [
                {"kind": st.kind, "x": st.x, "y": st.y, "health": st.health,
                 "max_health": engine.structure_max_health(st), "level": st.level}
                for st in s.structures
            ],
            "enemies": [
                {"uid": e.uid, "type": e.type_id, "lane": e.lane, "pos": e.pos, "health": e.health}
                for e in s.enemies
            ],
        },
        "in_progress": [
            {"actors": sorted(ip.actors), "kind": ip.kind.value, "x": ip.x,
             "y": ip.y, "ticks_remaining": ip.ticks_remaining}
            for ip in s.in_progress
        ],
    }


class Session:
    """Server-side wrapper: session id, paused flag, async companion."""

    def __init__(self, config: GameConfig, companion_cfg: CompanionConfig,
                 seed: int, session_id: str, sync: bool = False):
        self.id = session_id
        self.core = SessionCore(config, companion_cfg, "complementary", seed)
        self.paused = False
        self.pending_decision = None  # (future, basis_tick)
        self.executor = ThreadPoolExecutor(max_workers=1)
        self.last_companion_action = None
        if not sync:
            # real-time mode: rollouts run off the tick loop; manual
            # clock keeps the synchronous path so served runs match
            # headless replays bit for bit
            self.core.async_decide = self._launch_decide

    def _launch_decide(self) -> None:
        # called from the tick loop at decision epochs; at most one
        # outstanding decide() per companion
        if self.pending_decision is not None:
            return
        core = self.core
        basis = core.state.clone()
        trace_copy = Trace()
        trace_copy.entries = list(core.trace.entries)
        model = core.model
        cfg = core.companion_cfg
        rng = core.comp_rng
        rs = core.rs
        player_current = engine.current_action(basis, engine.PLAYER)

        def work():
            return decide(basis, trace_copy, rs, model, cfg, rng, player_current)

        self.pending_decision = (self.executor.submit(work), basis.tick)

    def collect_decision(self) -> None:
        """Apply a finished companion decision (revalidated) at the next
        tick boundary after completion."""
        if self.pending_decision is None:
            return
        future, basis_tick = self.pending_decision
        if not future.done():
            # re-decide is pointless while the old one runs; stale
            # outcomes are caught by revalidation below
            return
        self.pending_decision = None
        outcome = future.result()
        core = self.core
        stale = core.state.tick - basis_tick > core.companion_cfg.decision_epoch_ticks
        applied = core.apply_outcome(outcome)
        if not applied and stale and outcome.chosen is not None:
            log.debug("stale decision dropped at tick %d", core.state.tick)
            return
        if applied and outcome.chosen is not None:
            kind, rid = outcome.chosen
            rect = core.rs.region_bounds(rid)
            self.last_companion_action = {
                "type": "companion_action",
                "protocol_version": PROTOCOL_VERSION,
                "session_id": self.id,
                "tick": core.state.tick,
                "kind": kind.value,
                "region_rect": {"x0": rect.x0, "y0": rect.y0, "x1": rect.x1, "y1": rect.y1},
                "branch": outcome.branch.value,
            }

    def shutdown(self) -> None:
        self.executor.shutdown(wait=False, cancel_futures=True)


def _persist_session(session: Session, data_dir: Path) -> None:
    data_dir.mkdir(parents=True, exist_ok=True)
    core = session.core
    trace_path = data_dir / f"{session.id}.trace.jsonl"
    export_trace(core.trace, trace_path)
    blob = {
        "session_id": session.id,
        "protocol_version": PROTOCOL_VERSION,
        "seed": core.seed,
        "snapshot": engine.snapshot(core.state).decode(),
        "regions": core.rs.dump(),
        "region_next_id": core.rs.next_id,
        "region_split_count": core.rs.split_count,
        "region_ids": core.rs.ids,
        "companion": core.companion_cfg.to_dict(),
        "last_trained_count": core.last_trained_count,
        "rng_state": core.comp_rng.state,
        "branch_counts": core.branch_counts,
    }
    with open(data_dir / f"{session.id}.json", "w") as f:
        json.dump(blob, f, sort_keys=True)


def _resume_session(session_id: str, data_dir: Path, sync: bool = False) -> Session:
    path = data_dir / f"{session_id}.json"
    if not path.exists():
        raise DomainError(f"unknown session {session_id}")
    with open(path) as f:
        blob = json.load(f)
    state = engine.restore(blob["snapshot"].encode())
    cfg = state.config
    companion_cfg = CompanionConfig.from_dict(blob["companion"])
    session = Session(cfg, companion_cfg, blob["seed"], session_id, sync=sync)
    core = session.core
    core.state = state
    core.trace = import_trace(data_dir / f"{session_id}.trace.jsonl")
    rs = RegionSet(cfg.map_width, cfg.map_height)
    rs.rects.clear()
    from .regions import Rect

    for r in blob["regions"]:
        rect = Rect(r["x0"], r["y0"], r["x1"], r["y1"])
        rs.rects[r["id"]] = rect
        rs.grid[rect.y0 : rect.y1, rect.x0 : rect.x1] = r["id"]
    rs.next_id = blob["region_next_id"]
    rs.split_count = blob["region_split_count"]
    rs.ids = list(blob["region_ids"])
    core.rs = rs
    core.last_trained_count = blob["last_trained_count"]
    if core.last_trained_count > 0:
        # models are cheap to rebuild, so we persist the trace instead;
        # retrain on the same prefix the live session last trained on
        prefix = Trace()
        prefix.entries = core.trace.entries[: core.last_trained_count]
        core.model = train(prefix, rs, companion_cfg.classifier,
                           companion_cfg.feature_config)
    core.comp_rng.state = blob["rng_state"]
    core.branch_counts = dict(blob["branch_counts"])
    return session


def create_app(
    config: GameConfig | None = None,
    companion_cfg: CompanionConfig | None = None,
    data_dir="./comrade-sessions",
    manual_clock: bool = False,
    seed: int = 1,
) -> FastAPI:
    config = config or GameConfig()
    companion_cfg = companion_cfg or CompanionConfig()
    data_dir = Path(data_dir)
    app = FastAPI(title="comrade session service")
    app.state.active_sessions = set()

    frontend_dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if frontend_dist.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=frontend_dist, html=True), name="app")

    async def send(ws: WebSocket, msg: dict) -> None:
        await ws.send_text(json.dumps(msg))

    def error_msg(session_id, code, msg) -> dict:
        return {
            "type": "error",
            "protocol_version": PROTOCOL_VERSION,
            "session_id": session_id,
            "code": code,
            "msg": msg,
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session = None
        try:
            raw = await ws.receive_text()
            try:
                hello = json.loads(raw)
            except json.JSONDecodeError:
                await send(ws, error_msg(None, "malformed", "hello is not valid JSON"))
                await ws.close()
                return
            if hello.get("type") != "hello":
                await send(ws, error_msg(None, "protocol", "first message must be hello"))
                await ws.close()
                return
            if hello.get("protocol_version") != PROTOCOL_VERSION:
                await send(
                    ws,
                    error_msg(None, "version_mismatch",
                              f"server speaks protocol {PROTOCOL_VERSION}"),
                )
                await ws.close()
                return
            requested = hello.get("session_id")
            if requested:
                if requested in app.state.active_sessions:
                    await send(ws, error_msg(requested, "session_busy",
                                             "session already has an owner"))
                    await ws.close()
                    return
                try:
                    session = _resume_session(requested, data_dir, sync=manual_clock)
                except (DomainError, FileNotFoundError):
                    await send(ws, error_msg(requested, "unknown_session",
                                             f"no saved session {requested}"))
                    await ws.close()
                    return
            else:
                session = Session(config, companion_cfg,
                                  int(hello.get("seed", seed)), uuid.uuid4().hex,
                                  sync=manual_clock)
            app.state.active_sessions.add(session.id)
            core = session.core
            await send(
                ws,
                {
                    "type": "welcome",
                    "protocol_version": PROTOCOL_VERSION,
                    "session_id": session.id,
                    "config": {
                        "map_width": config.map_width,
                        "map_height": config.map_height,
                        "tick_rate": config.tick_rate,
                        "costs": {k.value: v for k, v in config.costs.items()},
                        "intro_threshold": core.companion_cfg.intro_threshold,
                    },
                },
            )
            await send(ws, _state_delta(session.core) | {"session_id": session.id})

            async def tick_loop():
                core = session.core
                while True:
                    period = 1.0 / (config.tick_rate * core.state.speed)
                    await asyncio.sleep(period)
                    if session.paused or core.state.over:
                        continue
                    session.collect_decision()
                    core.advance(1)
                    delta = _state_delta(core) | {"session_id": session.id}
                    await send(ws, delta)
                    if core.state.over:
                        await send(
                            ws,
                            {
                                "type": "game_over",
                                "protocol_version": PROTOCOL_VERSION,
                                "session_id": session.id,
                                "report": {
                                    "survival_ticks": core.state.tick,
                                    "kills": core.state.kills,
                                    "leaks": core.state.leaks,
                                    "branch_counts": core.branch_counts,
                                },
                            },
                        )
                    if session.last_companion_action is not None:
                        await send(ws, session.last_companion_action)
                        session.last_companion_action = None

            ticker = None
            if not manual_clock:
                ticker = asyncio.create_task(tick_loop())

            try:
                while True:
                    raw = await ws.receive_text()
                    try:
                        msg = json.loads(raw)
                    except json.JSONDecodeError:
                        await send(ws, error_msg(session.id, "malformed", "invalid JSON"))
                        continue
                    mtype = msg.get("type")
                    if mtype == "player_action":
                        try:
                            kind = ActionKind(msg["kind"])
                            x, y = int(msg["x"]), int(msg["y"])
                        except (KeyError, ValueError, TypeError):
                            await send(ws, error_msg(session.id, "malformed",
                                                     "bad player_action fields"))
                            continue
                        core = session.core
                        if not engine.is_possible_at(core.state, kind, x, y):
                            await send(ws, error_msg(session.id, "impossible",
                                                     f"{kind.value} not possible at ({x}, {y})"))
                            continue
                        try:
                            core.player_action(kind, x, y)
                        except (ActionRejected, DomainError) as exc:
                            await send(ws, error_msg(session.id, "impossible", str(exc)))
                            continue
                        if manual_clock:
                            await send(ws, _state_delta(core) | {"session_id": session.id})
                    elif mtype == "set_config":
                        try:
                            session.core.companion_cfg = CompanionConfig.from_dict(
                                session.core.companion_cfg.to_dict() | msg.get("companion", {})
                            )
                        except (ValueError, TypeError) as exc:
                            await send(ws, error_msg(session.id, "config", str(exc)))
                            continue
                        await send(ws, {"type": "config_ok",
                                        "protocol_version": PROTOCOL_VERSION,
                                        "session_id": session.id})
                    elif mtype == "pause":
                        session.paused = True
                    elif mtype == "resume":
                        session.paused = False
                    elif mtype == "advance" and manual_clock:
                        n = int(msg.get("ticks", 1))
                        session.core.advance(n)
                        await send(ws, _state_delta(session.core) | {"session_id": session.id})
                    elif mtype == "dump_regions":
                        await send(ws, {"type": "regions",
                                        "protocol_version": PROTOCOL_VERSION,
                                        "session_id": session.id,
                                        "regions": session.core.rs.dump()})
                    elif mtype == "state_hash" and manual_clock:
                        await send(ws, {"type": "state_hash",
                                        "protocol_version": PROTOCOL_VERSION,
                                        "session_id": session.id,
                                        "hash": engine.state_hash(session.core.state)})
                    else:
                        await send(ws, error_msg(session.id, "malformed",
                                                 f"unknown message type {mtype!r}"))
            finally:
                if ticker is not None:
                    ticker.cancel()
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                app.state.active_sessions.discard(session.id)
                _persist_session(session, data_dir)
                session.shutdown()

    return app
