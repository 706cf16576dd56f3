import { describe, expect, it } from "vitest";

import {
  decodeServerMessage,
  encodeInput,
  encodeReset,
  ProtocolError,
} from "../src/protocol.js";

const stateFrame = {
  type: "state",
  format: 1,
  tick: 3,
  phase: "free_drive",
  t: 0.099,
  o_tip_mm: [-15, -0.6],
  motor_q: 1.08,
  joints: [1.08, 0, 0],
  slider_mm: 0.38,
  finger_mm: [[0, 135, 30, 80], [30, 80, 50, 40], [50, 40, 60, 10]],
  fixed_tip_mm: [-15, -0.2],
  fixed_len_mm: 140,
  fixed_width_mm: 4,
  object_mm: [[-10, 0], [10, 0], [10, 1.5], [-10, 1.5]],
  contacts: [
    { pos_mm: [10, 0.7], normal: [-1, 0], force: 4.2, bodies: ["link2", "object"] },
  ],
  table_force: 2.19,
  object_force: 8.4,
  peak_table_force: 2.19,
  peak_object_force: 8.4,
  stalled: false,
  fault: false,
};

describe("decodeServerMessage", () => {
  it("decodes a state frame", () => {
    const msg = decodeServerMessage(JSON.stringify(stateFrame));
    expect(msg.type).toBe("state");
    if (msg.type === "state") {
      expect(msg.phase).toBe("free_drive");
      expect(msg.contacts).toHaveLength(1);
      expect(msg.o_tip_mm[0]).toBeCloseTo(-15);
    }
  });

  it("decodes a result frame", () => {
    const msg = decodeServerMessage(JSON.stringify({
      type: "result", format: 1, success: true, object: "coin", gripper: "f1",
      seed: 5, peak_table_force: 2.19, peak_object_force: 31.2,
      grasp_time: 3.0, classification: "pinch",
    }));
    expect(msg.type).toBe("result");
    if (msg.type === "result") expect(msg.success).toBe(true);
  });

  it("passes through error frames", () => {
    const msg = decodeServerMessage(JSON.stringify({ type: "error", error: "nope" }));
    expect(msg).toEqual({ type: "error", error: "nope" });
  });

  it("rejects malformed JSON", () => {
    expect(() => decodeServerMessage("{oops")).toThrow(ProtocolError);
  });

  it("rejects unknown format versions", () => {
    const bad = { ...stateFrame, format: 2 };
    expect(() => decodeServerMessage(JSON.stringify(bad))).toThrow(ProtocolError);
  });

  it("rejects state frames missing fields", () => {
    expect(() => decodeServerMessage(JSON.stringify({ type: "state", format: 1 })))
      .toThrow(ProtocolError);
  });
});

describe("encoders", () => {
  it("input message round-trips", () => {
    const raw = encodeInput(0.04, -0.02, true, 123);
    expect(JSON.parse(raw)).toEqual(
      { type: "input", vx: 0.04, vz: -0.02, grasp: true, timestamp_ms: 123 });
  });

  it("reset message round-trips", () => {
    expect(JSON.parse(encodeReset("washer", "f1", 9))).toEqual(
      { type: "reset", object: "washer", gripper: "f1", seed: 9 });
  });
});
