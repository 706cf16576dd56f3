/**
 * Wire protocol with the session server: JSON frames over one WebSocket.
 * The server is the single source of physics; every quantity rendered by
 * the console comes out of these frames.
 */

export const PROTOCOL_FORMAT = 1;

export interface ContactFrame {
  pos_mm: [number, number];
  normal: [number, number];
  force: number;
  bodies: [string, string];
}

export interface SceneFrame {
  type: "state";
  format: number;
  tick: number;
  phase: "free_drive" | "primitive_running" | "lifting" | "done";
  t: number;
  o_tip_mm: [number, number];
  motor_q: number;
  joints: [number, number, number];
  slider_mm: number;
  finger_mm: [number, number, number, number][];
  fixed_tip_mm: [number, number];
  fixed_len_mm: number;
  fixed_width_mm: number;
  object_mm: [number, number][];
  contacts: ContactFrame[];
  table_force: number;
  object_force: number;
  peak_table_force: number;
  peak_object_force: number;
  stalled: boolean;
  fault: boolean;
}

export interface ResultFrame {
  type: "result";
  format: number;
  success: boolean;
  object: string;
  gripper: string;
  seed: number;
  peak_table_force: number;
  peak_object_force: number;
  grasp_time: number;
  classification: string;
}

export interface ErrorFrame {
  type: "error";
  error: string;
}

export type ServerMessage = SceneFrame | ResultFrame | ErrorFrame;

export interface InputMessage {
  type: "input";
  vx: number;
  vz: number;
  grasp: boolean;
  timestamp_ms: number;
}

export interface ResetMessage {
  type: "reset";
  object: string;
  gripper: string;
  seed: number;
}

export class ProtocolError extends Error {}

function isPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 &&
    typeof v[0] === "number" && typeof v[1] === "number";
}

/** Decode and validate one server message; throws ProtocolError on junk. */
export function decodeServerMessage(raw: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new ProtocolError("malformed JSON frame");
  }
  if (typeof data !== "object" || data === null || !("type" in data)) {
    throw new ProtocolError("frame without a type");
  }
  const msg = data as Record<string, unknown>;
  if (msg.type === "error") {
    return { type: "error", error: String(msg.error ?? "unknown") };
  }
  if (msg.format !== PROTOCOL_FORMAT) {
    throw new ProtocolError(`unsupported protocol format: ${String(msg.format)}`);
  }
  if (msg.type === "result") {
    return msg as unknown as ResultFrame;
  }
  if (msg.type === "state") {
    if (!isPair(msg.o_tip_mm) || !Array.isArray(msg.object_mm) ||
        !Array.isArray(msg.finger_mm) || !Array.isArray(msg.contacts) ||
        typeof msg.phase !== "string") {
      throw new ProtocolError("state frame missing required fields");
    }
    return msg as unknown as SceneFrame;
  }
  throw new ProtocolError(`unknown frame type: ${String(msg.type)}`);
}

export function encodeInput(vx: number, vz: number, grasp: boolean,
                            timestampMs: number): string {
  const msg: InputMessage = { type: "input", vx, vz, grasp, timestamp_ms: timestampMs };
  return JSON.stringify(msg);
}

export function encodeReset(object: string, gripper: string, seed: number): string {
  const msg: ResetMessage = { type: "reset", object, gripper, seed };
  return JSON.stringify(msg);
}
