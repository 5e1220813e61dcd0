// Wire protocol: versioned JSON envelopes over a WebSocket.
// The server is authoritative; the client renders only confirmed state.

export const PROTOCOL_VERSION = 1;

export type ActionKind =
  | "build_tower"
  | "build_wall"
  | "repair"
  | "upgrade_tower";

export const ACTION_KINDS: ActionKind[] = [
  "build_tower",
  "build_wall",
  "repair",
  "upgrade_tower",
];

export interface RegionRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface StructureView {
  kind: "tower" | "wall";
  x: number;
  y: number;
  health: number;
  max_health: number;
  level: number;
}

export interface EnemyView {
  uid: number;
  type: string;
  lane: number;
  pos: number; // milli-cells from the left edge
  health: number;
}

export interface InProgressView {
  actors: string[];
  kind: ActionKind;
  x: number;
  y: number;
  ticks_remaining: number;
}

export interface WelcomeMsg {
  type: "welcome";
  protocol_version: number;
  session_id: string;
  config: {
    map_width: number;
    map_height: number;
    tick_rate: number;
    costs: Record<ActionKind, number>;
    intro_threshold: number;
  };
}

export interface StateDeltaMsg {
  type: "state_delta";
  protocol_version: number;
  session_id?: string;
  tick: number;
  resources: number;
  base_health: number;
  leaks: number;
  kills: number;
  speed: number;
  over: boolean;
  entities: {
    structures: StructureView[];
    enemies: EnemyView[];
  };
  in_progress: InProgressView[];
}

export interface CompanionActionMsg {
  type: "companion_action";
  protocol_version: number;
  session_id: string;
  tick: number;
  kind: ActionKind;
  region_rect: RegionRect;
  branch: string;
}

export interface GameOverMsg {
  type: "game_over";
  protocol_version: number;
  session_id: string;
  report: {
    survival_ticks: number;
    kills: number;
    leaks: number;
    branch_counts: Record<string, number>;
  };
}

export interface ErrorMsg {
  type: "error";
  protocol_version: number;
  session_id: string | null;
  code: string;
  msg: string;
}

export interface RegionsMsg {
  type: "regions";
  protocol_version: number;
  session_id: string;
  regions: Array<RegionRect & { id: number }>;
}

export type ServerMsg =
  | WelcomeMsg
  | StateDeltaMsg
  | CompanionActionMsg
  | GameOverMsg
  | ErrorMsg
  | RegionsMsg
  | { type: "config_ok"; protocol_version: number; session_id: string }
  | { type: "state_hash"; protocol_version: number; session_id: string; hash: number };

export function helloMsg(seed?: number, sessionId?: string): string {
  const msg: Record<string, unknown> = {
    type: "hello",
    protocol_version: PROTOCOL_VERSION,
  };
  if (seed !== undefined) msg.seed = seed;
  if (sessionId !== undefined) msg.session_id = sessionId;
  return JSON.stringify(msg);
}

export function playerActionMsg(kind: ActionKind, x: number, y: number): string {
  return JSON.stringify({ type: "player_action", kind, x, y });
}

export function dumpRegionsMsg(): string {
  return JSON.stringify({ type: "dump_regions" });
}
