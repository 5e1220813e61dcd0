// Entry point: wires the socket, the reducer and the canvas together.

import { connect, type Connection } from "./net.js";
import {
  ACTION_KINDS,
  dumpRegionsMsg,
  playerActionMsg,
  type ActionKind,
} from "./protocol.js";
import {
  initialViewModel,
  reduceServer,
  reduceUi,
  type UiEvent,
  type ViewModel,
} from "./reducer.js";
import { CELL, canvasSize, feedLines, hudLine, render } from "./render.js";

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const hud = document.getElementById("hud")!;
const feedEl = document.getElementById("feed")!;
const toastEl = document.getElementById("toast")!;
const bannerEl = document.getElementById("banner")!;
const toolbar = document.getElementById("toolbar")!;

let vm: ViewModel = initialViewModel();
let conn: Connection | null = null;

function redraw(): void {
  const { w, h } = canvasSize(vm);
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
  }
  render(ctx, vm);
  hud.textContent = hudLine(vm);
  feedEl.textContent = feedLines(vm).join("\n");
  toastEl.textContent = vm.toast ?? "";
  toastEl.style.display = vm.toast ? "block" : "none";
  bannerEl.textContent = vm.fatal ?? "";
  bannerEl.style.display = vm.fatal ? "block" : "none";
  for (const btn of toolbar.querySelectorAll("button[data-kind]")) {
    btn.classList.toggle(
      "active",
      (btn as HTMLButtonElement).dataset.kind === vm.selectedKind,
    );
  }
}

function dispatchUi(ev: UiEvent): void {
  vm = reduceUi(vm, ev);
  redraw();
}

for (const kind of ACTION_KINDS) {
  const btn = document.createElement("button");
  btn.textContent = kind.replace("_", " ");
  btn.dataset.kind = kind;
  btn.onclick = () => dispatchUi({ type: "select_kind", kind });
  toolbar.appendChild(btn);
}
const regionsBtn = document.createElement("button");
regionsBtn.textContent = "regions";
regionsBtn.onclick = () => {
  dispatchUi({ type: "toggle_regions" });
  if (vm.showRegions) conn?.send(dumpRegionsMsg());
};
toolbar.appendChild(regionsBtn);

canvas.addEventListener("mousemove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const x = Math.floor((ev.clientX - rect.left) / CELL);
  const y = Math.floor((ev.clientY - rect.top) / CELL);
  dispatchUi({ type: "hover", cell: { x, y } });
});
canvas.addEventListener("mouseleave", () => dispatchUi({ type: "hover", cell: null }));
canvas.addEventListener("click", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const x = Math.floor((ev.clientX - rect.left) / CELL);
  const y = Math.floor((ev.clientY - rect.top) / CELL);
  conn?.send(playerActionMsg(vm.selectedKind as ActionKind, x, y));
});

toastEl.addEventListener("click", () => dispatchUi({ type: "dismiss_toast" }));

const params = new URLSearchParams(window.location.search);
const wsUrl =
  params.get("ws") ??
  `${window.location.protocol === "https:" ? "wss" : "ws"}://${window.location.host}/ws`;
const storedSession = window.sessionStorage.getItem("comrade-session") ?? undefined;

conn = connect(
  wsUrl,
  (msg) => {
    vm = reduceServer(vm, msg);
    if (msg.type === "welcome") {
      window.sessionStorage.setItem("comrade-session", msg.session_id);
    }
    redraw();
  },
  () => {
    vm = reduceUi(vm, { type: "disconnected" });
    redraw();
  },
  undefined,
  storedSession,
);

redraw();
