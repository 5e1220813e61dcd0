// Canvas renderer: draws the grid, structures, enemies, the region
// overlay and the companion feed from the current view model only.

import type { ViewModel } from "./reducer.js";

export const CELL = 28;

const BRANCH_COLORS: Record<string, string> = {
  enable_predicted: "#4db6ac",
  help_current: "#7986cb",
  parallel_predicted: "#9575cd",
  best_state: "#ffb74d",
  last_resort_unseen: "#e57373",
  experiment_override: "#f06292",
  default_behavior: "#90a4ae",
};

export function canvasSize(vm: ViewModel): { w: number; h: number } {
  if (!vm.config) return { w: 640, h: 240 };
  return { w: vm.config.map_width * CELL, h: vm.config.map_height * CELL };
}

export function render(ctx: CanvasRenderingContext2D, vm: ViewModel): void {
  const { w, h } = canvasSize(vm);
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#1b262c";
  ctx.fillRect(0, 0, w, h);
  if (!vm.config) return;
  const cols = vm.config.map_width;
  const rows = vm.config.map_height;

  ctx.strokeStyle = "#2c3e50";
  ctx.lineWidth = 1;
  for (let x = 0; x <= cols; x++) {
    ctx.beginPath();
    ctx.moveTo(x * CELL + 0.5, 0);
    ctx.lineTo(x * CELL + 0.5, rows * CELL);
    ctx.stroke();
  }
  for (let y = 0; y <= rows; y++) {
    ctx.beginPath();
    ctx.moveTo(0, y * CELL + 0.5);
    ctx.lineTo(cols * CELL, y * CELL + 0.5);
    ctx.stroke();
  }

  if (vm.showRegions) {
    for (const r of vm.regions) {
      ctx.strokeStyle = "#546e7a";
      ctx.lineWidth = 2;
      ctx.strokeRect(
        r.x0 * CELL + 1, r.y0 * CELL + 1,
        (r.x1 - r.x0) * CELL - 2, (r.y1 - r.y0) * CELL - 2,
      );
      ctx.fillStyle = "#78909c";
      ctx.font = "10px monospace";
      ctx.fillText(String(r.id), r.x0 * CELL + 4, r.y0 * CELL + 12);
    }
  }

  const delta = vm.delta;
  if (!delta) return;

  for (const s of delta.entities.structures) {
    ctx.fillStyle = s.kind === "tower" ? "#4fc3f7" : "#8d6e63";
    const pad = s.kind === "tower" ? 4 : 2;
    ctx.fillRect(s.x * CELL + pad, s.y * CELL + pad, CELL - 2 * pad, CELL - 2 * pad);
    // health bar
    const frac = Math.max(0, s.health / s.max_health);
    ctx.fillStyle = frac > 0.5 ? "#66bb6a" : "#ef5350";
    ctx.fillRect(s.x * CELL + 2, s.y * CELL + CELL - 4, (CELL - 4) * frac, 2);
    if (s.kind === "tower" && s.level > 1) {
      ctx.fillStyle = "#fff59d";
      ctx.font = "10px monospace";
      ctx.fillText("^".repeat(s.level - 1), s.x * CELL + 3, s.y * CELL + 11);
    }
  }

  for (const ip of delta.in_progress) {
    ctx.strokeStyle = ip.actors.includes("companion") ? "#ba68c8" : "#ffd54f";
    ctx.setLineDash([3, 3]);
    ctx.strokeRect(ip.x * CELL + 3, ip.y * CELL + 3, CELL - 6, CELL - 6);
    ctx.setLineDash([]);
  }

  for (const e of delta.entities.enemies) {
    const px = (e.pos / 1000) * CELL;
    ctx.fillStyle = "#ef5350";
    ctx.beginPath();
    ctx.arc(px, e.lane * CELL + CELL / 2, CELL / 4, 0, Math.PI * 2);
    ctx.fill();
  }

  // recent companion actions flash their region
  const newest = vm.feed[0];
  if (newest && delta.tick - newest.tick < 40) {
    const r = newest.region;
    ctx.strokeStyle = BRANCH_COLORS[newest.branch] ?? "#ffffff";
    ctx.lineWidth = 3;
    ctx.strokeRect(
      r.x0 * CELL, r.y0 * CELL,
      (r.x1 - r.x0) * CELL, (r.y1 - r.y0) * CELL,
    );
  }

  if (vm.hovered) {
    ctx.strokeStyle = "#eceff1";
    ctx.lineWidth = 2;
    ctx.strokeRect(vm.hovered.x * CELL, vm.hovered.y * CELL, CELL, CELL);
  }
}

export function feedLines(vm: ViewModel): string[] {
  return vm.feed.map(
    (f) => `t${f.tick} ${f.kind} [${f.branch}]`,
  );
}

export function hudLine(vm: ViewModel): string {
  const d = vm.delta;
  if (!d) return "connecting...";
  return (
    `tick ${d.tick}  hp ${d.base_health}  res ${d.resources}  ` +
    `kills ${d.kills}  leaks ${d.leaks}` +
    (vm.gameOver !== null ? `  GAME OVER at ${vm.gameOver}` : "")
  );
}
