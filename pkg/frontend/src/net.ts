// WebSocket glue: parses server envelopes and feeds the reducer.

import type { ServerMsg } from "./protocol.js";
import { helloMsg } from "./protocol.js";

export interface Connection {
  send(payload: string): void;
  close(): void;
}

export function connect(
  url: string,
  onMessage: (msg: ServerMsg) => void,
  onClose: () => void,
  seed?: number,
  sessionId?: string,
): Connection {
  const ws = new WebSocket(url);
  ws.onopen = () => ws.send(helloMsg(seed, sessionId));
  ws.onmessage = (ev) => {
    let msg: ServerMsg;
    try {
      msg = JSON.parse(ev.data as string) as ServerMsg;
    } catch {
      return; // non-JSON frames are ignored
    }
    onMessage(msg);
  };
  ws.onclose = onClose;
  return {
    send: (payload) => {
      if (ws.readyState === WebSocket.OPEN) ws.send(payload);
    },
    close: () => ws.close(),
  };
}
