/**
 * Session-log replay: parse a recorded JSON-lines log, expose scrubber
 * state over its ticks, and export the session's result record. The log is
 * the same file the server writes; the console never re-simulates.
 */

export const LOG_FORMAT = 1;

export interface LogHeader {
  format: number;
  kind: string;
  object: string;
  gripper: string;
  seed: number;
}

export interface LogRow {
  tick: number;
  input: { vx: number; vz: number; grasp: boolean } | null;
  digest: string;
}

export interface SessionLog {
  header: LogHeader;
  rows: LogRow[];
}

export class ReplayError extends Error {}

export function parseSessionLog(text: string): SessionLog {
  const lines = text.split("\n").filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) {
    throw new ReplayError("empty session log");
  }
  let header: LogHeader;
  try {
    header = JSON.parse(lines[0]) as LogHeader;
  } catch {
    throw new ReplayError("malformed log header");
  }
  if (header.format !== LOG_FORMAT) {
    throw new ReplayError(`unsupported log format: ${header.format}`);
  }
  if (header.kind !== "session_log") {
    throw new ReplayError(`not a session log: ${header.kind}`);
  }
  const rows: LogRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    try {
      rows.push(JSON.parse(lines[i]) as LogRow);
    } catch {
      throw new ReplayError(`malformed log row ${i}`);
    }
  }
  return { header, rows };
}

export interface ScrubberState {
  index: number;  // current row, clamped into range
  length: number;
}

export function scrubTo(log: SessionLog, index: number): ScrubberState {
  const length = log.rows.length;
  const clamped = Math.max(0, Math.min(index, Math.max(length - 1, 0)));
  return { index: length === 0 ? 0 : clamped, length };
}

export function scrubFraction(state: ScrubberState): number {
  if (state.length <= 1) return 0;
  return state.index / (state.length - 1);
}

/** Result export mirrors the server's result frame field-for-field. */
export function exportResult(result: {
  success: boolean;
  object: string;
  gripper: string;
  seed: number;
  peak_table_force: number;
  peak_object_force: number;
  grasp_time: number;
  classification: string;
}): string {
  const ordered = {
    classification: result.classification,
    format: LOG_FORMAT,
    grasp_time: result.grasp_time,
    gripper: result.gripper,
    object: result.object,
    peak_object_force: result.peak_object_force,
    peak_table_force: result.peak_table_force,
    seed: result.seed,
    success: result.success,
    type: "result",
  };
  return JSON.stringify(ordered, Object.keys(ordered).sort());
}
