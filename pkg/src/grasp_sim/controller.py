"""Synchronized arm-plus-finger grasp primitive and the symmetric-pose adapter.

The primitive closes the actuated finger while translating the whole hand
half the starting fingertip gap toward the object, so both fingers converge
on a centred object at the same rate, exactly as a parallel gripper would.
`map_grasp_pose` turns a symmetric two-contact grasp estimate (centre,
width) into the pre-grasp placement and primitive parameters: the fixed
finger tip goes half a width from the centre and the finger opens to the
width.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Transform2, ValidationError
from .hand import (
    HandConfig,
    aperture,
    aperture_to_motor,
    min_posture_aperture,
    motor_for_aperture,
)
from .sim import ObjectModel, SimParams, WorldState, step

DEFAULT_N_STEPS = 200


@dataclass(frozen=True)
class GraspPrimitiveParams:
    """Inputs of one primitive execution."""

    aperture_projection: float            # D: fingertip gap assumed to straddle the object
    closing_direction: tuple[float, float]  # u: horizontal unit vector, fixed finger -> object
    n_steps: int = DEFAULT_N_STEPS
    q_start: float = 0.0
    q_target: float = 0.0

    def __post_init__(self):
        if self.aperture_projection < 0.0:
            raise ValidationError("aperture projection D must be >= 0")
        ux, uz = self.closing_direction
        if abs(math.hypot(ux, uz) - 1.0) > 1e-9 or abs(uz) > 1e-9:
            raise ValidationError("closing direction must be a horizontal unit vector")
        if self.n_steps < 1:
            raise ValidationError("n_steps must be >= 1")
        if self.q_start > self.q_target + 1e-12:
            raise ValidationError("q_start must not exceed q_target")


@dataclass(frozen=True)
class GraspPose:
    """Symmetric grasp estimate: two opposed contacts on a plane."""

    center: tuple[float, float]
    approach: tuple[float, float] = (0.0, -1.0)
    width: float = 0.0
    angle: float = 0.0      # in-plane angle, recorded for logs only
    quality: float = 1.0

    def __post_init__(self):
        ax, az = self.approach
        if abs(math.hypot(ax, az) - 1.0) > 1e-9:
            raise ValidationError("approach vector must be unit length")
        if self.width < 0.0:
            raise ValidationError("grasp width must be >= 0")


@dataclass(frozen=True)
class PrimitiveOutcome:
    """Bookkeeping gathered while a primitive runs."""

    first_contact_fixed: int = -1      # step index of first fixed-finger object contact
    first_contact_actuated: int = -1   # step index of first actuated-finger object contact
    stalled_at: int = -1
    fault: bool = False


# ---------------------------------------------------------------------------
# Planning and execution
# ---------------------------------------------------------------------------

def plan_primitive(
    world: WorldState,
    D: float,
    u: tuple[float, float],
    n_steps: int,
    config: HandConfig,
) -> GraspPrimitiveParams:
    """Build the schedule: close from the current aperture while the arm
    covers 0.5 * D along u."""
    if D > config.max_aperture + 1e-9:
        raise ValidationError(f"D={D:.4f} exceeds max aperture {config.max_aperture:.4f}")
    current = aperture(world.hand, config)
    if D > current + 1e-6:
        raise ValidationError(f"D={D:.4f} exceeds current aperture {current:.4f}")
    q_start = world.hand.motor_angle
    _, pip, dip = world.hand.joint_angles
    floor = min_posture_aperture(config, pip, dip)
    q_target = motor_for_aperture(config, floor, pip, dip)
    return GraspPrimitiveParams(
        aperture_projection=D,
        closing_direction=u,
        n_steps=n_steps,
        q_start=q_start,
        q_target=q_target,
    )


def primitive_step_targets(
    params: GraspPrimitiveParams,
    start_tip: Transform2,
    start_aperture: float,
    config: HandConfig,
    posture: tuple[float, float] = (0.0, 0.0),
) -> list[tuple[float, float, float]]:
    """(tip_x, tip_z, motor_q) absolute targets for every step.

    The aperture shrinks linearly by D over the run (clamped to the closed
    floor), which makes the actuated fingertip's horizontal speed mirror the
    arm's: a centred object is met by both fingers on the same step.
    """
    D = params.aperture_projection
    ux, _ = params.closing_direction
    pip, dip = posture
    floor = min_posture_aperture(config, pip, dip)
    closing_span = max(D, start_aperture - floor)
    targets = []
    n = params.n_steps
    for k in range(1, n + 1):
        frac = k / n
        tip_x = start_tip.x + 0.5 * D * frac * ux
        ap = max(start_aperture - closing_span * frac, floor)
        q = motor_for_aperture(config, ap, pip, dip)
        targets.append((tip_x, start_tip.z, q))
    return targets


def execute_primitive(
    world: WorldState,
    params: GraspPrimitiveParams,
    config: HandConfig,
    obj: ObjectModel | None = None,
    sim_params: SimParams = SimParams(),
) -> tuple[list[WorldState], PrimitiveOutcome]:
    """Run the primitive to completion; the arm always finishes its travel,
    the finger stops early only when the motor stalls."""
    start_tip = world.hand.tip_frame
    start_ap = aperture(world.hand, config)
    posture = world.hand.joint_angles[1:]
    targets = primitive_step_targets(params, start_tip, start_ap, config, posture)
    trajectory = [world]
    first_fixed = first_act = -1
    stalled_at = -1
    current_q = world.hand.motor_angle
    for k, (tx, tz, q) in enumerate(targets, start=1):
        dx = tx - world.hand.tip_frame.x
        dz = tz - world.hand.tip_frame.z
        if world.motor_stalled:
            dq = 0.0
        else:
            dq = max(0.0, q - current_q)
        # Coarse schedules split into substeps under the per-step limits.
        n_sub = max(1,
                    math.ceil(dq / sim_params.max_dq - 1e-12),
                    math.ceil(math.hypot(dx, dz) / sim_params.max_hand_step - 1e-12))
        applied = 0.0
        for s in range(n_sub):
            sub_dq = 0.0 if world.motor_stalled else dq / n_sub
            world = step(world, ((dx / n_sub, dz / n_sub), sub_dq), config, obj, sim_params)
            if sub_dq > 0.0:
                applied += sub_dq
        current_q += applied
        trajectory.append(world)
        if first_fixed < 0 and any(
                c.body_pair == ("fixed", "object") and c.force > 1e-6
                for c in world.contacts):
            first_fixed = k
        if first_act < 0 and any(
                c.body_pair[0].startswith("link") and c.body_pair[1] == "object"
                and c.force > 1e-6
                for c in world.contacts):
            first_act = k
        if stalled_at < 0 and world.motor_stalled:
            stalled_at = k
        if world.fault:
            break
    outcome = PrimitiveOutcome(first_fixed, first_act, stalled_at, world.fault)
    return trajectory, outcome


def map_grasp_pose(
    pose: GraspPose,
    config: HandConfig,
    n_steps: int = DEFAULT_N_STEPS,
) -> tuple[Transform2, GraspPrimitiveParams]:
    """Place O_tip half a width from the centre and open the finger to the
    width, so the asymmetric hand closes like a parallel gripper."""
    if pose.width > config.max_aperture + 1e-9:
        raise ValidationError(
            f"grasp width {pose.width:.4f} exceeds max aperture {config.max_aperture:.4f}")
    floor = config.min_aperture
    if pose.width > 1e-12 and pose.width < floor - 1e-9:
        raise ValidationError(
            f"grasp width {pose.width:.4f} below reachable aperture {floor:.4f}")
    ux = 1.0
    d = 0.5 * pose.width
    pregrasp = Transform2(0.0, pose.center[0] - d * ux, pose.center[1])
    w = max(pose.width, floor)
    q_start = aperture_to_motor(config, w)
    q_target = aperture_to_motor(config, floor)
    params = GraspPrimitiveParams(
        aperture_projection=pose.width,
        closing_direction=(ux, 0.0),
        n_steps=n_steps,
        q_start=q_start,
        q_target=q_target,
    )
    return pregrasp, params


# ---------------------------------------------------------------------------
# Cartesian stage (stands in for whole-body IK)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CartesianStage:
    """Straight-line Cartesian mover with speed and step limits."""

    pose: Transform2 = field(default_factory=Transform2)
    max_speed: float = 0.05          # m/s
    max_step: float = 0.001          # m per control step
    workspace: tuple[float, float, float, float] = (-0.5, -0.05, 0.5, 0.5)

    def reachable(self, target: Transform2) -> bool:
        x0, z0, x1, z1 = self.workspace
        return x0 <= target.x <= x1 and z0 <= target.z <= z1


def stage_move_to(stage: CartesianStage, target: Transform2) -> list[Transform2]:
    """Waypoints from the stage pose to the target; empty when already there."""
    if not stage.reachable(target):
        raise ValidationError(
            f"target ({target.x:.3f}, {target.z:.3f}) outside workspace {stage.workspace}")
    dx = target.x - stage.pose.x
    dz = target.z - stage.pose.z
    dist = math.hypot(dx, dz)
    if dist == 0.0:
        return []
    n = max(1, math.ceil(dist / stage.max_step - 1e-12))
    waypoints = []
    for k in range(1, n + 1):
        f = k / n
        waypoints.append(Transform2(target.rotation,
                                    stage.pose.x + dx * f,
                                    stage.pose.z + dz * f))
    waypoints[-1] = target
    return waypoints


# ---------------------------------------------------------------------------
# Trajectory logs (JSON lines)
# ---------------------------------------------------------------------------

TRAJECTORY_FORMAT = 1


def trajectory_record(world: WorldState) -> dict:
    return {
        "t": round(world.time, 9),
        "o_tip": [world.hand.tip_frame.x, world.hand.tip_frame.z],
        "q": world.hand.motor_angle,
        "joints": list(world.hand.joint_angles),
        "slider_mm": world.hand.slider.compression * 1000.0,
        "contacts": [
            {"pos": [c.x, c.z], "normal": [c.nx, c.nz], "force": c.force,
             "bodies": list(c.body_pair)}
            for c in world.contacts
        ],
        "table_force": world.table_force,
        "object_force": world.object_force,
        "object_pose": [world.object_pose.rotation, world.object_pose.x, world.object_pose.z],
        "stalled": world.motor_stalled,
        "fault": world.fault,
    }


def write_trajectory(path: str | Path, trajectory: list[WorldState], meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": TRAJECTORY_FORMAT, "kind": "trajectory"}
        header.update(meta or {})
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for world in trajectory:
            fh.write(json.dumps(trajectory_record(world), sort_keys=True) + "\n")


def read_trajectory(path: str | Path) -> tuple[dict, list[dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty trajectory log")
    header = json.loads(lines[0])
    if header.get("format") != TRAJECTORY_FORMAT:
        raise ValidationError(f"unsupported trajectory format: {header.get('format')!r}")
    return header, [json.loads(ln) for ln in lines[1:]]
