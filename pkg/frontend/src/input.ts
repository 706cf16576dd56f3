/**
 * Keyboard teleoperation: arrows / WASD drive O_tip, space triggers the
 * grasp. A pure reducer holds the pressed-key set; one message per tick is
 * derived from it (key-up therefore yields explicit zero velocities).
 */

export const DRIVE_SPEED = 0.04; // m/s command magnitude per axis

export interface KeyState {
  left: boolean;
  right: boolean;
  up: boolean;
  down: boolean;
  grasp: boolean;
}

export const IDLE_KEYS: KeyState = {
  left: false, right: false, up: false, down: false, grasp: false,
};

const KEYMAP: Record<string, keyof KeyState> = {
  ArrowLeft: "left", a: "left", A: "left",
  ArrowRight: "right", d: "right", D: "right",
  ArrowUp: "up", w: "up", W: "up",
  ArrowDown: "down", s: "down", S: "down",
  " ": "grasp",
};

export function applyKey(state: KeyState, key: string, pressed: boolean): KeyState {
  const field = KEYMAP[key];
  if (field === undefined) return state;
  if (state[field] === pressed) return state;
  return { ...state, [field]: pressed };
}

export interface TickCommand {
  vx: number;
  vz: number;
  grasp: boolean;
}

/**
 * One command per tick. The grasp trigger is edge-filtered by phase: the
 * console mirrors the server's phase guard and goes silent on space while
 * a primitive is already running.
 */
export function commandForTick(keys: KeyState, phase: string): TickCommand {
  const vx = (keys.right ? DRIVE_SPEED : 0) - (keys.left ? DRIVE_SPEED : 0);
  const vz = (keys.up ? DRIVE_SPEED : 0) - (keys.down ? DRIVE_SPEED : 0);
  const grasp = keys.grasp && phase === "free_drive";
  return { vx, vz, grasp };
}
