"""Real-time teleoperation sessions over the simulator.

A session ticks at a fixed rate, consuming at most one operator input per
tick (latest wins). Free drive moves O_tip with clamped velocities; the
grasp trigger freezes the fingertip gap as the primitive's D and runs the
synchronized closure over the following ticks, then an animated lift and
the hold evaluation. Sessions are deterministic given the reset parameters
and the tick-stamped input log, so recorded sessions replay bit-identically.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .controller import plan_primitive, primitive_step_targets
from .estimator import EstimatorConfig, oracle_estimate
from .geometry import Transform2, ValidationError
from .hand import aperture, make_hand_config
from .harness import TrialResult, pregrasp_world
from .objects import SuiteEntry, load_suite, suite_by_name
from .sim import SimParams, WorldState, classify_grasp, lift_test, step

PROTOCOL_FORMAT = 1
TICK_SECONDS = 0.033
STEPS_PER_TICK = 4            # simulator steps folded into one tick
LIFT_HEIGHT = 0.10
LIFT_SPEED = 0.05

PHASE_FREE = "free_drive"
PHASE_PRIMITIVE = "primitive_running"
PHASE_LIFT = "lifting"
PHASE_DONE = "done"


@dataclass(frozen=True)
class OperatorInput:
    """One operator message: drive velocities plus the grasp trigger."""

    vx: float = 0.0
    vz: float = 0.0
    grasp: bool = False
    timestamp_ms: int = 0


@dataclass(frozen=True)
class SessionConfig:
    object_name: str = "coin"
    gripper: str = "f1"
    seed: int = 0
    max_speed: float = 0.05     # m/s, O_tip drive clamp
    suite_path: str | None = None


@dataclass(frozen=True)
class SessionState:
    """Everything a session carries between ticks."""

    config: SessionConfig
    world: WorldState
    phase: str = PHASE_FREE
    tick: int = 0
    # Primitive bookkeeping (filled when triggered).
    step_targets: tuple = ()
    step_index: int = 0
    current_q: float = 0.0
    lift_remaining: float = 0.0
    lift_ok: bool = False
    result: TrialResult | None = None


def _entry(config: SessionConfig) -> SuiteEntry:
    table = suite_by_name(load_suite(config.suite_path))
    if config.object_name not in table:
        raise ValidationError(f"unknown object {config.object_name!r}")
    return table[config.object_name]


def new_session(config: SessionConfig) -> SessionState:
    """Session starting at the canonical pre-grasp for the chosen object.

    Matching the batch harness's pre-grasp makes a trigger-only session
    reproduce a zero-misalignment harness trial exactly.
    """
    entry = _entry(config)
    cfg = make_hand_config(config.gripper)
    est = oracle_estimate(entry.model, Transform2(), EstimatorConfig())
    world, _ = pregrasp_world(est, entry.model, Transform2(), cfg, SimParams())
    return SessionState(config=config, world=world)


def session_step(state: SessionState, latest_input: OperatorInput | None) -> SessionState:
    """Advance one tick, consuming at most the single latest input."""
    cfg = make_hand_config(state.config.gripper)
    entry = _entry(state.config)
    obj = entry.model
    sim_params = SimParams()
    world = state.world

    if state.phase == PHASE_FREE:
        vx = vz = 0.0
        trigger = False
        if latest_input is not None:
            vmax = state.config.max_speed
            vx = max(-vmax, min(vmax, latest_input.vx))
            vz = max(-vmax, min(vmax, latest_input.vz))
            trigger = latest_input.grasp
        dx_total = vx * TICK_SECONDS
        dz_total = vz * TICK_SECONDS
        for _ in range(STEPS_PER_TICK):
            world = step(world, ((dx_total / STEPS_PER_TICK, dz_total / STEPS_PER_TICK), 0.0),
                         cfg, obj, sim_params)
        if trigger:
            D = aperture(world.hand, cfg)
            params = plan_primitive(world, D, (1.0, 0.0), 200, cfg)
            targets = primitive_step_targets(
                params, world.hand.tip_frame, D, cfg, world.hand.joint_angles[1:])
            # Trial metrics are measured from the trigger.
            world = replace(world, peak_table_force=world.table_force,
                            peak_object_force=world.object_force)
            return replace(state, world=world, phase=PHASE_PRIMITIVE,
                           tick=state.tick + 1, step_targets=tuple(targets),
                           step_index=0, current_q=world.hand.motor_angle)
        return replace(state, world=world, tick=state.tick + 1)

    if state.phase == PHASE_PRIMITIVE:
        idx = state.step_index
        current_q = state.current_q
        for _ in range(STEPS_PER_TICK):
            if idx >= len(state.step_targets):
                break
            tx, tz, q = state.step_targets[idx]
            dx = tx - world.hand.tip_frame.x
            dz = tz - world.hand.tip_frame.z
            if world.motor_stalled:
                dq = 0.0
            else:
                dq = min(max(0.0, q - current_q), sim_params.max_dq)
                current_q += dq
            world = step(world, ((dx, dz), dq), cfg, obj, sim_params)
            idx += 1
        if idx >= len(state.step_targets) or world.fault:
            lift_ok = (not world.fault) and lift_test(world, obj, LIFT_HEIGHT)
            return replace(state, world=world, phase=PHASE_LIFT, tick=state.tick + 1,
                           step_index=idx, current_q=current_q,
                           lift_remaining=LIFT_HEIGHT, lift_ok=lift_ok)
        return replace(state, world=world, tick=state.tick + 1,
                       step_index=idx, current_q=current_q)

    if state.phase == PHASE_LIFT:
        dz_tick = min(LIFT_SPEED * TICK_SECONDS, state.lift_remaining)
        remaining = state.lift_remaining - dz_tick
        hand = replace(world.hand, tip_frame=world.hand.tip_frame.translated(0.0, dz_tick))
        pose = world.object_pose
        if state.lift_ok:
            pose = pose.translated(0.0, dz_tick)  # held object rides the hand
        world = replace(world, hand=hand, object_pose=pose,
                        time=world.time + TICK_SECONDS)
        if remaining <= 1e-12:
            result = TrialResult(
                object_name=state.config.object_name,
                gripper=state.config.gripper,
                trial_index=0,
                seed=state.config.seed,
                success=state.lift_ok,
                peak_table_force=world.peak_table_force,
                peak_object_force=world.peak_object_force,
                grasp_time=len(state.step_targets) * SimParams().dt + LIFT_HEIGHT / LIFT_SPEED,
                classification=classify_grasp(world.contacts) if state.lift_ok else "none",
            )
            return replace(state, world=world, phase=PHASE_DONE,
                           tick=state.tick + 1, lift_remaining=0.0, result=result)
        return replace(state, world=world, tick=state.tick + 1, lift_remaining=remaining)

    return replace(state, tick=state.tick + 1)  # done: time stands still


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

def serialize_state(state: SessionState) -> dict:
    """Schema-versioned state frame for subscribers (small, ~1-2 KB)."""
    world = state.world
    entry = _entry(state.config)
    poly = entry.model.cross_section
    pose = world.object_pose
    c, s = math.cos(pose.rotation), math.sin(pose.rotation)
    obj_verts = [[round((c * x - s * z + pose.x) * 1000.0, 3),
                  round((s * x + c * z + pose.z) * 1000.0, 3)]
                 for x, z in poly.vertices]
    from .hand import finger_segments, fixed_tip_position, make_hand_config
    cfg = make_hand_config(state.config.gripper)
    segs = finger_segments(world.hand, cfg)
    fx, fz = fixed_tip_position(world.hand, cfg)
    return {
        "type": "state",
        "format": PROTOCOL_FORMAT,
        "tick": state.tick,
        "phase": state.phase,
        "t": round(world.time, 6),
        "o_tip_mm": [round(world.hand.tip_frame.x * 1000.0, 4),
                     round(world.hand.tip_frame.z * 1000.0, 4)],
        "motor_q": round(world.hand.motor_angle, 6),
        "joints": [round(a, 6) for a in world.hand.joint_angles],
        "slider_mm": round(world.hand.slider.compression * 1000.0, 4),
        "finger_mm": [[round(v * 1000.0, 3) for v in (g.ax, g.az, g.bx, g.bz)] for g in segs],
        "fixed_tip_mm": [round(fx * 1000.0, 3), round(fz * 1000.0, 3)],
        "fixed_len_mm": round(cfg.fixed_finger_length * 1000.0, 3),
        "fixed_width_mm": round(cfg.fixed_finger_width * 1000.0, 3),
        "object_mm": obj_verts,
        "contacts": [
            {"pos_mm": [round(k.x * 1000.0, 3), round(k.z * 1000.0, 3)],
             "normal": [round(k.nx, 4), round(k.nz, 4)],
             "force": round(k.force, 3),
             "bodies": list(k.body_pair)}
            for k in world.contacts
        ],
        "table_force": round(world.table_force, 4),
        "object_force": round(world.object_force, 4),
        "peak_table_force": round(world.peak_table_force, 4),
        "peak_object_force": round(world.peak_object_force, 4),
        "stalled": world.motor_stalled,
        "fault": world.fault,
    }


def serialize_result(state: SessionState) -> dict:
    r = state.result
    return {
        "type": "result",
        "format": PROTOCOL_FORMAT,
        "success": bool(r.success) if r else False,
        "object": state.config.object_name,
        "gripper": state.config.gripper,
        "seed": state.config.seed,
        "peak_table_force": round(r.peak_table_force, 6) if r else 0.0,
        "peak_object_force": round(r.peak_object_force, 6) if r else 0.0,
        "grasp_time": round(r.grasp_time, 6) if r else 0.0,
        "classification": r.classification if r else "none",
    }


def state_digest(frame: dict) -> str:
    """Stable digest of a state frame, for replay divergence checks."""
    return hashlib.sha256(
        json.dumps(frame, sort_keys=True).encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Session logs: record and replay
# ---------------------------------------------------------------------------

def record_session(
    config: SessionConfig,
    inputs: list[OperatorInput | None],
    path: str | Path | None = None,
) -> tuple[list[dict], SessionState]:
    """Run a session over a tick-stamped input list; optionally log it."""
    state = new_session(config)
    frames = []
    lines = [{
        "format": PROTOCOL_FORMAT,
        "kind": "session_log",
        "object": config.object_name,
        "gripper": config.gripper,
        "seed": config.seed,
    }]
    for tick_input in inputs:
        state = session_step(state, tick_input)
        frame = serialize_state(state)
        frames.append(frame)
        lines.append({
            "tick": state.tick,
            "input": None if tick_input is None else {
                "vx": tick_input.vx, "vz": tick_input.vz, "grasp": tick_input.grasp},
            "digest": state_digest(frame),
        })
        if state.phase == PHASE_DONE:
            break
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(json.dumps(line, sort_keys=True) + "\n")
    return frames, state


def replay_session(path: str | Path) -> tuple[list[dict], SessionState, list[int]]:
    """Re-run a recorded log; returns frames, final state and any ticks whose
    state digest diverged from the recording."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [json.loads(ln) for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty session log")
    header = lines[0]
    if header.get("format") != PROTOCOL_FORMAT:
        raise ValidationError(
            f"unsupported session log format: {header.get('format')!r}")
    config = SessionConfig(object_name=header["object"], gripper=header["gripper"],
                           seed=int(header["seed"]))
    state = new_session(config)
    frames = []
    diverged = []
    for row in lines[1:]:
        inp = row.get("input")
        tick_input = None if inp is None else OperatorInput(
            vx=float(inp["vx"]), vz=float(inp["vz"]), grasp=bool(inp["grasp"]))
        state = session_step(state, tick_input)
        frame = serialize_state(state)
        frames.append(frame)
        if state_digest(frame) != row.get("digest"):
            diverged.append(state.tick)
    return frames, state, diverged
