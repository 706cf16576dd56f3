/**
 * Operator console wiring: WebSocket session, canvas painting, keyboard
 * loop and the replay scrubber. All physics quantities come from server
 * frames; this file only draws and forwards inputs.
 */

import {
  decodeServerMessage,
  encodeInput,
  encodeReset,
  ProtocolError,
  type ResultFrame,
  type SceneFrame,
} from "./protocol.js";
import {
  buildShapes,
  defaultViewport,
  forceGauge,
  gaugeThresholdPx,
  DELICATE_FORCE_LIMIT_N,
  type Shape,
  type Viewport,
} from "./scene.js";
import { applyKey, commandForTick, IDLE_KEYS, type KeyState } from "./input.js";
import { parseSessionLog, scrubTo, type SessionLog } from "./replay.js";

const TICK_MS = 33;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawShapes(ctx: CanvasRenderingContext2D, shapes: Shape[]): void {
  for (const s of shapes) {
    if (s.kind === "polygon") {
      ctx.beginPath();
      s.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
      ctx.closePath();
      ctx.fillStyle = s.fill;
      ctx.fill();
      ctx.strokeStyle = s.stroke;
      ctx.stroke();
    } else if (s.kind === "line") {
      ctx.beginPath();
      ctx.moveTo(...s.from);
      ctx.lineTo(...s.to);
      ctx.lineWidth = s.width;
      ctx.strokeStyle = s.color;
      ctx.stroke();
      ctx.lineWidth = 1;
    } else if (s.kind === "dot") {
      ctx.beginPath();
      ctx.arc(s.at[0], s.at[1], s.radius, 0, 2 * Math.PI);
      ctx.fillStyle = s.color;
      ctx.fill();
    } else {
      ctx.beginPath();
      ctx.moveTo(...s.from);
      ctx.lineTo(...s.to);
      ctx.strokeStyle = s.color;
      ctx.lineWidth = 2;
      ctx.stroke();
      ctx.lineWidth = 1;
      if (s.label) {
        ctx.fillStyle = s.color;
        ctx.font = "11px sans-serif";
        ctx.fillText(s.label, s.to[0] + 4, s.to[1]);
      }
    }
  }
}

function drawGauge(ctx: CanvasRenderingContext2D, tableForce: number,
                   x: number, y: number, width: number): void {
  const gauge = forceGauge(tableForce);
  ctx.fillStyle = "#2a2a2a";
  ctx.fillRect(x, y, width, 16);
  ctx.fillStyle = gauge.overLimit ? "#e04f5f" : "#3aa17e";
  ctx.fillRect(x, y, gauge.fraction * width, 16);
  const tx = x + gaugeThresholdPx(width);
  ctx.strokeStyle = "#ffd24d";
  ctx.beginPath();
  ctx.moveTo(tx, y - 3);
  ctx.lineTo(tx, y + 19);
  ctx.stroke();
  ctx.fillStyle = "#eee";
  ctx.font = "12px sans-serif";
  ctx.fillText(`table force ${gauge.label} (limit ${DELICATE_FORCE_LIMIT_N} N)`,
               x + width + 10, y + 12);
}

function banner(text: string, error = false): void {
  const node = el<HTMLDivElement>("banner");
  node.textContent = text;
  node.className = error ? "banner error" : "banner";
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("scene");
  const maybeCtx = canvas.getContext("2d");
  if (!maybeCtx) throw new Error("no 2d context");
  const ctx: CanvasRenderingContext2D = maybeCtx;
  const viewport: Viewport = defaultViewport(canvas.width, canvas.height);

  let keys: KeyState = IDLE_KEYS;
  let latestFrame: SceneFrame | null = null;
  let lastResult: ResultFrame | null = null;
  let lastResultRaw: string | null = null;
  let frameDrawPending = false;
  let replayLog: SessionLog | null = null;

  const phaseLabel = el<HTMLSpanElement>("phase");
  const metrics = el<HTMLSpanElement>("metrics");

  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  const ws = new WebSocket(`${proto}//${location.host}/ws`);

  ws.onmessage = (ev: MessageEvent<string>) => {
    let msg;
    try {
      msg = decodeServerMessage(ev.data);
    } catch (err) {
      if (err instanceof ProtocolError) {
        banner(`protocol error: ${err.message}`, true);
        return;
      }
      throw err;
    }
    if (msg.type === "error") {
      banner(`server: ${msg.error}`, true);
      return;
    }
    if (msg.type === "result") {
      lastResult = msg;
      lastResultRaw = ev.data;  // exported verbatim: byte-for-byte the server's record
      banner(`${msg.success ? "SUCCESS" : "FAILURE"} — ${msg.classification}, `
        + `peak table force ${msg.peak_table_force.toFixed(2)} N, `
        + `${msg.grasp_time.toFixed(2)} s`);
      return;
    }
    // Latest frame wins; anything still undrawn is dropped.
    latestFrame = msg;
    if (!frameDrawPending) {
      frameDrawPending = true;
      requestAnimationFrame(() => {
        frameDrawPending = false;
        if (latestFrame) paint(latestFrame);
      });
    }
  };
  ws.onclose = () => banner("disconnected — reload to reconnect", true);

  function paint(frame: SceneFrame): void {
    ctx.fillStyle = "#181c20";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    drawShapes(ctx, buildShapes(frame, viewport));
    drawGauge(ctx, frame.table_force, 16, 16, 220);
    phaseLabel.textContent = frame.phase + (frame.stalled ? " (motor stalled)" : "");
    metrics.textContent =
      `t=${frame.t.toFixed(2)}s slider=${frame.slider_mm.toFixed(2)}mm `
      + `peak table=${frame.peak_table_force.toFixed(2)}N `
      + `peak object=${frame.peak_object_force.toFixed(2)}N`;
    if (frame.fault) banner("simulation fault — session failed", true);
  }

  window.addEventListener("keydown", (e) => { keys = applyKey(keys, e.key, true); });
  window.addEventListener("keyup", (e) => { keys = applyKey(keys, e.key, false); });

  setInterval(() => {
    if (ws.readyState !== WebSocket.OPEN) return;
    const phase = latestFrame ? latestFrame.phase : "free_drive";
    const cmd = commandForTick(keys, phase);
    ws.send(encodeInput(cmd.vx, cmd.vz, cmd.grasp, Date.now()));
  }, TICK_MS);

  el<HTMLButtonElement>("reset").addEventListener("click", () => {
    const object = el<HTMLInputElement>("object").value || "coin";
    const gripper = el<HTMLSelectElement>("gripper").value;
    const seed = Number(el<HTMLInputElement>("seed").value) || 0;
    lastResult = null;
    banner("");
    ws.send(encodeReset(object, gripper, seed));
  });

  // Replay: load a session log and scrub through its recorded inputs.
  const scrubber = el<HTMLInputElement>("scrubber");
  el<HTMLInputElement>("logfile").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      replayLog = parseSessionLog(await file.text());
      scrubber.max = String(Math.max(replayLog.rows.length - 1, 0));
      scrubber.value = "0";
      banner(`loaded ${replayLog.rows.length} ticks of `
        + `${replayLog.header.object} / ${replayLog.header.gripper}`);
    } catch (err) {
      banner(`replay: ${(err as Error).message}`, true);
    }
  });
  scrubber.addEventListener("input", () => {
    if (!replayLog) return;
    const state = scrubTo(replayLog, Number(scrubber.value));
    const row = replayLog.rows[state.index];
    metrics.textContent = `replay tick ${row.tick}`
      + (row.input ? ` input vx=${row.input.vx} vz=${row.input.vz}`
                     + (row.input.grasp ? " GRASP" : "") : " (idle)");
  });
  el<HTMLButtonElement>("export").addEventListener("click", () => {
    if (!lastResult || lastResultRaw === null) {
      banner("no finished session to export", true);
      return;
    }
    const blob = new Blob([lastResultRaw], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "session_result.json";
    a.click();
  });
}

main();
