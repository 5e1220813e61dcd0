import { describe, expect, it } from "vitest";

import {
  FEED_CAP,
  initialViewModel,
  reduceServer,
  reduceUi,
  replay,
} from "../src/reducer.js";
import type {
  CompanionActionMsg,
  ErrorMsg,
  GameOverMsg,
  ServerMsg,
  StateDeltaMsg,
  WelcomeMsg,
} from "../src/protocol.js";
import { PROTOCOL_VERSION } from "../src/protocol.js";
import { feedLines, hudLine } from "../src/render.js";

function welcome(): WelcomeMsg {
  return {
    type: "welcome",
    protocol_version: PROTOCOL_VERSION,
    session_id: "abc123",
    config: {
      map_width: 12,
      map_height: 8,
      tick_rate: 20,
      costs: { build_tower: 150, build_wall: 40, repair: 15, upgrade_tower: 120 },
      intro_threshold: 5,
    },
  };
}

function delta(tick: number): StateDeltaMsg {
  return {
    type: "state_delta",
    protocol_version: PROTOCOL_VERSION,
    tick,
    resources: 100 + tick,
    base_health: 200,
    leaks: 0,
    kills: 1,
    speed: 1,
    over: false,
    entities: { structures: [], enemies: [] },
    in_progress: [],
  };
}

function companion(tick: number): CompanionActionMsg {
  return {
    type: "companion_action",
    protocol_version: PROTOCOL_VERSION,
    session_id: "abc123",
    tick,
    kind: "build_wall",
    region_rect: { x0: 0, y0: 0, x1: 6, y1: 8 },
    branch: "best_state",
  };
}

describe("reduceServer", () => {
  it("welcome stores the session id and config", () => {
    const vm = reduceServer(initialViewModel(), welcome());
    expect(vm.sessionId).toBe("abc123");
    expect(vm.config?.map_width).toBe(12);
    expect(vm.config?.costs.build_tower).toBe(150);
  });

  it("state deltas replace the previous snapshot", () => {
    let vm = reduceServer(initialViewModel(), welcome());
    vm = reduceServer(vm, delta(5));
    vm = reduceServer(vm, delta(9));
    expect(vm.delta?.tick).toBe(9);
    expect(hudLine(vm)).toContain("tick 9");
  });

  it("deltas after game over are ignored", () => {
    let vm = reduceServer(initialViewModel(), welcome());
    vm = reduceServer(vm, delta(50));
    const over: GameOverMsg = {
      type: "game_over",
      protocol_version: PROTOCOL_VERSION,
      session_id: "abc123",
      report: { survival_ticks: 50, kills: 3, leaks: 10, branch_counts: {} },
    };
    vm = reduceServer(vm, over);
    vm = reduceServer(vm, delta(999));
    expect(vm.gameOver).toBe(50);
    expect(vm.delta?.tick).toBe(50);
  });

  it("companion actions feed newest-first, capped", () => {
    let vm = reduceServer(initialViewModel(), welcome());
    for (let t = 1; t <= FEED_CAP + 7; t++) {
      vm = reduceServer(vm, companion(t * 10));
    }
    expect(vm.feed).toHaveLength(FEED_CAP);
    expect(vm.feed[0].tick).toBe((FEED_CAP + 7) * 10);
    expect(feedLines(vm)[0]).toBe(`t${(FEED_CAP + 7) * 10} build_wall [best_state]`);
  });

  it("version mismatch is fatal, other errors are toasts", () => {
    const mismatch: ErrorMsg = {
      type: "error",
      protocol_version: PROTOCOL_VERSION,
      session_id: null,
      code: "version_mismatch",
      msg: "server speaks protocol 1",
    };
    expect(reduceServer(initialViewModel(), mismatch).fatal).toContain("protocol");

    const impossible: ErrorMsg = { ...mismatch, code: "impossible", msg: "cell taken" };
    const vm = reduceServer(initialViewModel(), impossible);
    expect(vm.fatal).toBeNull();
    expect(vm.toast).toBe("impossible: cell taken");
  });

  it("a frame from a different protocol version is fatal", () => {
    const future = { ...delta(1), protocol_version: PROTOCOL_VERSION + 1 };
    const vm = reduceServer(initialViewModel(), future);
    expect(vm.fatal).toContain("protocol mismatch");
    expect(vm.delta).toBeNull();
  });

  it("regions message replaces the overlay rectangles", () => {
    const msg: ServerMsg = {
      type: "regions",
      protocol_version: PROTOCOL_VERSION,
      session_id: "abc123",
      regions: [
        { id: 0, x0: 0, y0: 0, x1: 6, y1: 8 },
        { id: 1, x0: 6, y0: 0, x1: 12, y1: 8 },
      ],
    };
    const vm = reduceServer(initialViewModel(), msg);
    expect(vm.regions.map((r) => r.id)).toEqual([0, 1]);
  });
});

describe("replay", () => {
  it("the same message log always yields the same view model", () => {
    const log: ServerMsg[] = [
      welcome(),
      delta(1),
      companion(30),
      delta(31),
      companion(60),
      {
        type: "error",
        protocol_version: PROTOCOL_VERSION,
        session_id: "abc123",
        code: "impossible",
        msg: "no",
      },
      delta(90),
    ];
    const a = replay(log);
    const b = replay(log);
    expect(a).toEqual(b);
    // and equals folding one message at a time
    const folded = log.reduce(reduceServer, initialViewModel());
    expect(folded).toEqual(a);
    expect(a.feed).toHaveLength(2);
    expect(a.delta?.tick).toBe(90);
    expect(a.toast).toBe("impossible: no");
  });
});

describe("reduceUi", () => {
  it("kind selection, hover, overlay toggle and toast dismissal", () => {
    let vm = initialViewModel();
    expect(vm.selectedKind).toBe("build_wall");
    vm = reduceUi(vm, { type: "select_kind", kind: "build_tower" });
    expect(vm.selectedKind).toBe("build_tower");
    vm = reduceUi(vm, { type: "hover", cell: { x: 3, y: 2 } });
    expect(vm.hovered).toEqual({ x: 3, y: 2 });
    vm = reduceUi(vm, { type: "toggle_regions" });
    expect(vm.showRegions).toBe(true);
    vm = { ...vm, toast: "impossible: no" };
    vm = reduceUi(vm, { type: "dismiss_toast" });
    expect(vm.toast).toBeNull();
  });

  it("disconnect shows a banner unless one is already fatal", () => {
    let vm = reduceUi(initialViewModel(), { type: "disconnected" });
    expect(vm.fatal).toBe("connection lost");
    vm = { ...vm, fatal: "protocol mismatch: server spoke v2" };
    vm = reduceUi(vm, { type: "disconnected" });
    expect(vm.fatal).toContain("protocol mismatch");
  });
});
