// Pure view-model reducer: the rendered UI is a function of the message
// history, so replaying a captured log reproduces the exact view state.

import type {
  ActionKind,
  CompanionActionMsg,
  RegionRect,
  ServerMsg,
  StateDeltaMsg,
  WelcomeMsg,
} from "./protocol.js";
import { PROTOCOL_VERSION } from "./protocol.js";

export const FEED_CAP = 20;

export interface FeedEntry {
  tick: number;
  kind: ActionKind;
  branch: string;
  region: RegionRect;
}

export interface ViewModel {
  sessionId: string | null;
  config: WelcomeMsg["config"] | null;
  delta: StateDeltaMsg | null;
  selectedKind: ActionKind;
  hovered: { x: number; y: number } | null;
  feed: FeedEntry[];
  regions: Array<RegionRect & { id: number }>;
  showRegions: boolean;
  toast: string | null;
  fatal: string | null; // blocking banner, e.g. version mismatch
  gameOver: StateDeltaMsg["tick"] | null;
}

export function initialViewModel(): ViewModel {
  return {
    sessionId: null,
    config: null,
    delta: null,
    selectedKind: "build_wall",
    hovered: null,
    feed: [],
    regions: [],
    showRegions: false,
    toast: null,
    fatal: null,
    gameOver: null,
  };
}

export type UiEvent =
  | { type: "select_kind"; kind: ActionKind }
  | { type: "hover"; cell: { x: number; y: number } | null }
  | { type: "toggle_regions" }
  | { type: "dismiss_toast" }
  | { type: "disconnected" };

function applyCompanionAction(vm: ViewModel, msg: CompanionActionMsg): ViewModel {
  const entry: FeedEntry = {
    tick: msg.tick,
    kind: msg.kind,
    branch: msg.branch,
    region: msg.region_rect,
  };
  const feed = [entry, ...vm.feed].slice(0, FEED_CAP);
  return { ...vm, feed };
}

export function reduceServer(vm: ViewModel, msg: ServerMsg): ViewModel {
  if ("protocol_version" in msg && msg.protocol_version !== PROTOCOL_VERSION) {
    return { ...vm, fatal: `protocol mismatch: server spoke v${msg.protocol_version}` };
  }
  switch (msg.type) {
    case "welcome":
      return { ...vm, sessionId: msg.session_id, config: msg.config, fatal: null };
    case "state_delta":
      // never regress: the server only moves forward in ticks
      if (vm.gameOver !== null) return vm;
      return { ...vm, delta: msg };
    case "companion_action":
      return applyCompanionAction(vm, msg);
    case "regions":
      return { ...vm, regions: msg.regions };
    case "game_over":
      return { ...vm, gameOver: msg.report.survival_ticks };
    case "error":
      if (msg.code === "version_mismatch") {
        return { ...vm, fatal: msg.msg };
      }
      return { ...vm, toast: `${msg.code}: ${msg.msg}` };
    default:
      return vm;
  }
}

export function reduceUi(vm: ViewModel, ev: UiEvent): ViewModel {
  switch (ev.type) {
    case "select_kind":
      return { ...vm, selectedKind: ev.kind };
    case "hover":
      return { ...vm, hovered: ev.cell };
    case "toggle_regions":
      return { ...vm, showRegions: !vm.showRegions };
    case "dismiss_toast":
      return { ...vm, toast: null };
    case "disconnected":
      return vm.fatal ? vm : { ...vm, fatal: "connection lost" };
  }
}

/** Replay a captured server-message log from scratch. */
export function replay(log: ServerMsg[]): ViewModel {
  return log.reduce(reduceServer, initialViewModel());
}
