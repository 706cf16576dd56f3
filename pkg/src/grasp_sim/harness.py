"""Batch trial runner: seeded randomized trials, gripper comparison, reports.

A trial places one object on the table, plans a grasp from an estimate,
runs the primitive and evaluates the hold. Misalignment emulates the
randomized initial wrist rotation of a teleoperator: the sampled angle maps
to a lateral offset of the object from the hand mid-plane
(offset = sin(angle) * half-extent, capped at a quarter of the fingertip
gap). Trials are fully determined by (seed, trial index) and independent of
execution order.

The comparison baseline is a symmetric multi-linkage gripper whose fingertip
arcs drop as it closes. Its operator model descends until the fingertips
register light table contact (the customary height reference for tabletop
teleoperation), then closes from full open without compensating the drop;
closure aborts at an emergency-stop force, which is what defeats it on thin
objects: the fingertip arc reaches the table before the object.
"""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

from .controller import (
    GraspPose,
    execute_primitive,
    map_grasp_pose,
    DEFAULT_N_STEPS,
)
from .estimator import EstimatorConfig, load_external_poses, noisy_estimate, oracle_estimate
from .geometry import ContactPoint, Polygon2, Segment2, Transform2, ValidationError
from .hand import (
    BaselineGripperModel,
    HandConfig,
    HandState,
    finger_segments,
    make_hand_config,
    min_posture_aperture,
    motor_for_aperture,
)
from .lp import solve_feasibility
from .objects import SuiteEntry, load_suite, suite_by_name
from .sim import (
    GRAVITY,
    ObjectModel,
    SimParams,
    WorldState,
    classify_grasp,
    lift_test,
    object_polygon,
    polygon_segment_contact,
    resolve_object,
    step,
)
from .geometry import friction_cone

REPORT_FORMAT = 1
HIST_BIN_N = 2.0  # force histogram bin width


@dataclass(frozen=True)
class TrialConfig:
    """One batch of seeded trials for a single gripper and mode."""

    gripper: str = "f1"
    object_name: str | None = None       # None: every suite object
    mode: str = "primitive"              # primitive | auto
    n_trials: int = 20
    seed: int = 0
    alignment_error_deg: tuple[float, float] = (-45.0, 45.0)
    lift_height: float = 0.10
    lift_speed: float = 0.05
    n_steps: int = DEFAULT_N_STEPS
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    suite_path: str | None = None
    external_poses_path: str | None = None  # auto mode: use recorded poses instead

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValidationError("n_trials must be >= 1")
        lo, hi = self.alignment_error_deg
        if lo > hi or lo < -90.0 or hi > 90.0:
            raise ValidationError("alignment error range invalid")
        if self.mode not in ("primitive", "auto"):
            raise ValidationError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class TrialResult:
    object_name: str
    gripper: str
    trial_index: int
    seed: int
    success: bool
    peak_table_force: float
    peak_object_force: float
    grasp_time: float
    classification: str
    alignment_error_deg: float = 0.0
    offset_m: float = 0.0
    fault: bool = False
    slider_bottomed: bool = False
    table_before_object: bool = False    # baseline thin-object signature


# Operator/policy constants for the asymmetric hand.
ENGAGE_DEPTH = 0.0006        # m the commanded tip sinks below the table
REACH_DEPTH = 0.130          # m of fixed finger usable below the palm
CHAIN_MARGIN = 0.002         # m clearance between the open finger and the object
EXTEND_WIDTH = 0.082         # m of grasp width at which the slide-out build is used

# Baseline operator model.
BASELINE_TOUCH_REF = 8.0     # N fingertip force used as the height reference
BASELINE_ESTOP = 60.0        # N wrist force that aborts the grasp
BASELINE_GRIP = 30.0         # N squeeze at which the torque grasp stops
BASELINE_PALM_CLEARANCE = 0.095  # m from pad tips to the palm underside
BASELINE_PAD_HEIGHT = 0.025
BASELINE_PAD_STIFFNESS = 1200.0  # N/m, fingertip/arm give against the table


def trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"trial:{seed}:{index}")


OPERATOR_OFFSET_CAP = 0.008  # m; residual centring error after re-aiming


def alignment_offset(error_deg: float, obj: ObjectModel, width: float) -> float:
    """Planar proxy for wrist-yaw misalignment.

    The sampled wrist angle maps to a lateral offset scaled by the object's
    half-extent, bounded by a quarter of the fingertip gap and by the
    operator's re-centring skill (wide objects do not make a teleoperator
    proportionally worse at aiming).
    """
    half_extent = 0.5 * obj.width
    off = math.sin(math.radians(error_deg)) * half_extent
    cap = min(width / 4.0, OPERATOR_OFFSET_CAP)
    return max(-cap, min(cap, off))


CURL_OPTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2)


def _poly_upper(poly: Polygon2, x: float) -> float:
    """Top of the polygon at a vertical line (or -inf when it misses)."""
    top = -math.inf
    for (x0, z0), (x1, z1) in poly.edges():
        lo, hi = (x0, x1) if x0 <= x1 else (x1, x0)
        if not lo - 1e-9 <= x <= hi + 1e-9:
            continue
        if abs(x1 - x0) < 1e-12:
            top = max(top, z0, z1)
        else:
            t = (x - x0) / (x1 - x0)
            top = max(top, z0 + t * (z1 - z0))
    return top


def _chain_clearance_lift(segs, poly: Polygon2) -> float:
    """How much the hand must rise so the open finger chain clears the
    object by the margin (negative when it already does). Checks object
    vertices against the chain and chain joints against the object's top,
    which catches the kink between links dipping over a flat top."""
    lift = -math.inf
    for vx, vz in poly.vertices:
        env = math.inf
        for seg in segs:
            x0, x1 = (seg.ax, seg.bx) if seg.ax <= seg.bx else (seg.bx, seg.ax)
            if not x0 - 1e-9 <= vx <= x1 + 1e-9:
                continue
            if abs(seg.bx - seg.ax) < 1e-12:
                env = min(env, min(seg.az, seg.bz))
            else:
                t = (vx - seg.ax) / (seg.bx - seg.ax)
                env = min(env, seg.az + t * (seg.bz - seg.az))
        if env is not math.inf:
            lift = max(lift, vz + CHAIN_MARGIN - env)
    joints = [(segs[0].ax, segs[0].az)]
    for seg in segs[:-1]:
        joints.append((seg.bx, seg.bz))
    joints.append((segs[-1].ax, segs[-1].az))  # all kinks, but not the tip
    for jx, jz in joints:
        top = _poly_upper(poly, jx)
        if top > -math.inf:
            lift = max(lift, top + CHAIN_MARGIN - jz)
    return lift


def _middle_link_radius(config: HandConfig, curl: float) -> float:
    """Distance from the palm pivot to the DIP joint at the given pre-curl;
    the middle link sweeps the annulus inside this radius during closure."""
    L1, L2, _ = config.linkage.link_lengths
    return math.sqrt(L1 * L1 + L2 * L2 + 2.0 * L1 * L2 * math.cos(curl))


def _corner_clearance_lift(poly: Polygon2, tip_x: float, config: HandConfig,
                           curl: float) -> float:
    """Raise the hand until every object vertex stays outside the swept
    annulus of the proximal and middle links, so the first closing contact
    lands on the distal link (side grasp) instead of clipping the top."""
    r_safe = _middle_link_radius(config, curl) + CHAIN_MARGIN
    pivot_z_off = config.linkage.reach  # pivot height above O_tip
    pivot_x = tip_x + config.pivot_offset_x
    lift = -math.inf
    for vx, vz in poly.vertices:
        # Plan across the operator's own aiming error band.
        for pad in (-OPERATOR_OFFSET_CAP, 0.0, OPERATOR_OFFSET_CAP):
            dx = vx - pivot_x + pad
            if dx <= 0.010 or dx >= r_safe:
                continue
            # Need (pivot_z - vz)^2 + dx^2 >= r_safe^2 with pivot_z = z + reach.
            need = math.sqrt(r_safe * r_safe - dx * dx)
            lift = max(lift, vz - pivot_z_off + need)
    return lift


def pregrasp_posture(
    obj: ObjectModel,
    pose: Transform2,
    width: float,
    config: HandConfig,
) -> tuple[tuple[float, float, float], float]:
    """Pre-grasp joint angles and O_tip height.

    Prefers the lowest hand position (table engagement whenever the object
    is short enough), adding the least pre-curl that keeps the open finger
    clear of the object through the whole closure: short things are
    approached with the finger extended so the tip sweeps down to table
    level; tall things get a pre-curled distal and enough height that their
    top corners stay outside the swept middle link.
    """
    poly = object_polygon(obj, pose)
    cx = pose.apply(*obj.com_local)[0]
    tip_x = cx - 0.5 * width
    floor = max(-ENGAGE_DEPTH, obj.height - REACH_DEPTH)
    best: tuple[float, float, float, tuple[float, float, float]] | None = None
    for c in CURL_OPTIONS:
        try:
            mp = motor_for_aperture(config, width, c, c)
        except ValidationError:
            continue
        floor_needed = max(obj.width - 0.0005, config.min_aperture)
        if min_posture_aperture(config, c, c) > floor_needed:
            continue  # cannot squeeze down to the object at this curl
        joints = (mp, c, c)
        hand = HandState(tip_frame=Transform2(0.0, tip_x, 0.0),
                         motor_angle=mp, joint_angles=joints)
        segs = finger_segments(hand, config)
        z = max(floor,
                _chain_clearance_lift(segs, poly),
                _corner_clearance_lift(poly, tip_x, config, c))
        # The posture must still reach the object's side wall at the catch.
        gap = max(obj.width, config.min_aperture + 0.0005)
        try:
            mp_catch = motor_for_aperture(config, gap, c, c)
        except ValidationError:
            continue
        catch_hand = HandState(tip_frame=Transform2(0.0, 0.0, z),
                               motor_angle=mp_catch, joint_angles=(mp_catch, c, c))
        tip_z_catch = finger_segments(catch_hand, config)[-1].bz
        if tip_z_catch > max(obj.height - 0.003, 0.65 * obj.height):
            continue
        if best is None or (z, c) < (best[0], best[1]):
            best = (z, c, joints)
    if best is None:
        raise ValidationError("no reachable pre-grasp posture for this width")
    return best[2], best[0]


def pregrasp_world(
    estimate: GraspPose,
    obj: ObjectModel,
    obj_pose: Transform2,
    config: HandConfig,
    sim_params: SimParams,
) -> tuple[WorldState, float]:
    """Hand placed at the pre-grasp endpoint with the finger opened to w."""
    pregrasp, _ = map_grasp_pose(estimate, config)
    w = max(estimate.width, config.min_aperture)
    joints, z = pregrasp_posture(obj, obj_pose, w, config)
    hand = HandState(
        tip_frame=Transform2(0.0, pregrasp.x, z),
        motor_angle=joints[0],
        joint_angles=joints,
        slider=config.slider,
    )
    world = WorldState(hand=hand, object_pose=obj_pose)
    world = step(world, ((0.0, 0.0), 0.0), config, obj, sim_params)  # settle
    # Trial metrics start from here: seed peaks with the settled loads.
    world = replace(world, time=0.0,
                    peak_table_force=world.table_force,
                    peak_object_force=world.object_force)
    return world, w


def run_trial(
    config: TrialConfig,
    trial_index: int,
    entry: SuiteEntry,
    hand_config: HandConfig | None = None,
) -> TrialResult:
    """One seeded trial; deterministic in (config.seed, trial_index)."""
    if config.gripper == "baseline":
        return _run_baseline_trial(config, trial_index, entry)
    cfg = hand_config if hand_config is not None else make_hand_config(config.gripper)
    rng = trial_rng(config.seed, trial_index)
    sim_params = SimParams()

    if config.mode == "auto":
        obj = entry.variant_model(trial_index)
        obj_pose = Transform2()
        if config.external_poses_path is not None:
            poses = load_external_poses(config.external_poses_path)
            estimate = poses[0] if poses else GraspPose(center=(0.0, 0.0),
                                                        width=0.0, quality=0.0)
        else:
            est_seed = config.seed * 100003 + trial_index
            estimate = noisy_estimate(obj, obj_pose, config.estimator, seed=est_seed)
        error_deg = 0.0
        offset = 0.0
    else:
        obj = entry.model
        estimate = oracle_estimate(obj, Transform2(), config.estimator)
        error_deg = rng.uniform(*config.alignment_error_deg)
        offset = alignment_offset(error_deg, obj, max(estimate.width, 1e-6))
        obj_pose = Transform2(0.0, offset, 0.0)

    if config.gripper == "f1" and hand_config is None and estimate.width > EXTEND_WIDTH:
        # Wide grasp: latch the fixed finger out for the extended aperture,
        # which keeps the fingertip arc shallow at large gaps.
        cfg = make_hand_config("f1-extended")
    if estimate.quality <= 0.0 or estimate.width > cfg.max_aperture + 1e-9:
        return TrialResult(entry.model.name, config.gripper, trial_index, config.seed,
                           False, 0.0, 0.0, 1e-3, "none", error_deg, offset)

    try:
        world, w = pregrasp_world(estimate, obj, obj_pose, cfg, sim_params)
    except ValidationError:
        # No collision-free pre-grasp exists for this shape and width.
        return TrialResult(entry.model.name, config.gripper, trial_index, config.seed,
                           False, 0.0, 0.0, 1e-3, "none", error_deg, offset)
    _, params = map_grasp_pose(estimate, cfg, n_steps=config.n_steps)
    params = replace(params, q_start=world.hand.motor_angle)
    trajectory, outcome = execute_primitive(world, params, cfg, obj, sim_params)
    final = trajectory[-1]

    success = (not final.fault) and lift_test(final, obj, config.lift_height)
    grasp_time = config.n_steps * sim_params.dt + config.lift_height / config.lift_speed
    return TrialResult(
        object_name=entry.model.name,
        gripper=config.gripper,
        trial_index=trial_index,
        seed=config.seed,
        success=success,
        peak_table_force=final.peak_table_force,
        peak_object_force=final.peak_object_force,
        grasp_time=grasp_time,
        classification=classify_grasp(final.contacts) if success else
                       classify_grasp(final.contacts) or "none",
        alignment_error_deg=error_deg,
        offset_m=offset,
        fault=final.fault,
        slider_bottomed=final.slider_bottomed,
    )


# ---------------------------------------------------------------------------
# Baseline symmetric gripper trials
# ---------------------------------------------------------------------------

def _pad_contacts(model_poly: Polygon2, cx: float, a: float, z_t: float, k_obj: float,
                  tol: float) -> list[ContactPoint]:
    contacts = []
    for side, x in (("pad_left", cx - 0.5 * a), ("pad_right", cx + 0.5 * a)):
        seg = Segment2(x, z_t, x, z_t + BASELINE_PAD_HEIGHT)
        for c in polygon_segment_contact(model_poly, seg, tol):
            contacts.append(replace(c, body_pair=(side, "object"),
                                    force=k_obj * c.penetration_depth))
    return contacts


def _baseline_lift(contacts: list[ContactPoint], obj: ObjectModel, com) -> bool:
    cols = []
    for c in contacts:
        for ex, ez in friction_cone(c.nx, c.nz, obj.mu_finger):
            cols.append((ex, ez, (c.x - com[0]) * ez - (c.z - com[1]) * ex))
    if not cols:
        return False
    A = [[col[r] for col in cols] for r in range(3)]
    return solve_feasibility(A, [0.0, obj.mass * GRAVITY, 0.0]).feasible


def _run_baseline_trial(config: TrialConfig, trial_index: int, entry: SuiteEntry) -> TrialResult:
    model = BaselineGripperModel()
    rng = trial_rng(config.seed, trial_index)
    sim_params = SimParams()
    k_obj = sim_params.object_stiffness

    if config.mode == "auto":
        obj = entry.variant_model(trial_index)
        obj_pose = Transform2()
        est_seed = config.seed * 100003 + trial_index
        estimate = noisy_estimate(obj, obj_pose, config.estimator, seed=est_seed)
        error_deg = 0.0
        offset = 0.0
        center = estimate.center[0]
    else:
        obj = entry.model
        estimate = oracle_estimate(obj, Transform2(), config.estimator)
        error_deg = rng.uniform(*config.alignment_error_deg)
        offset = alignment_offset(error_deg, obj, max(estimate.width, 1e-6))
        obj_pose = Transform2(0.0, offset, 0.0)
        center = estimate.center[0]

    # Height policy: descend until the pads feel the table, unless the palm
    # meets the object top first.
    touch_pen = BASELINE_TOUCH_REF / (2.0 * BASELINE_PAD_STIFFNESS)
    z_t = max(-touch_pen, obj.height - BASELINE_PALM_CLEARANCE)

    pose = obj_pose
    peak_table = 0.0
    peak_object = 0.0
    first_table = 0 if z_t < 0.0 else -1
    first_object = -1
    gripped = False
    estopped = False
    contacts: list[ContactPoint] = []
    steps_run = 0

    n_coarse = 240
    q = 0.0
    dq = model.sweep_max / n_coarse
    fine_phase = False
    for k in range(1, n_coarse * 4):
        steps_run = k
        if fine_phase:
            a_next = model.aperture(q) - 5e-5
            if a_next <= model.min_aperture + 1e-9:
                break
            q = model.motor_for_aperture(a_next)
        else:
            q = min(q + dq, model.sweep_max)
        a = model.aperture(q)
        drop = model.tip_drop(q)
        z_pad = z_t - drop
        table_pen = max(0.0, -z_pad)
        table_force = 2.0 * BASELINE_PAD_STIFFNESS * table_pen
        peak_table = max(peak_table, min(table_force, BASELINE_ESTOP))
        if first_table < 0 and table_pen > 0.0:
            first_table = k
        if table_force >= BASELINE_ESTOP:
            estopped = True
            break

        poly = object_polygon(obj, pose)
        contacts = _pad_contacts(poly, center, a, max(z_pad, -touch_pen * 3), k_obj,
                                 sim_params.contact_tol)
        squeeze = sum(c.force for c in contacts)
        peak_object = max(peak_object, squeeze)
        if contacts and first_object < 0:
            first_object = k
        if contacts:
            fine_phase = True
            res = resolve_object(contacts, obj, pose, sim_params, sim_params.max_object_step)
            ddx, ddz, ddth = res.displacement
            if abs(ddx) + abs(ddz) + abs(ddth) > 0.0:
                pose = Transform2(pose.rotation + ddth, pose.x + ddx, pose.z + ddz)
        sides = {c.body_pair[0] for c in contacts}
        if squeeze >= BASELINE_GRIP and len(sides) == 2:
            gripped = True
            break
        if q >= model.sweep_max - 1e-12 and not fine_phase:
            break

    success = False
    classification = "none"
    if gripped and not estopped:
        poly = object_polygon(obj, pose)
        success = _baseline_lift(contacts, obj, poly.centroid())
        classification = "pinch" if success else "none"

    grasp_time = steps_run * sim_params.dt + config.lift_height / config.lift_speed
    table_first = (first_table >= 0) and (first_object < 0 or first_table < first_object)
    return TrialResult(
        object_name=entry.model.name,
        gripper="baseline",
        trial_index=trial_index,
        seed=config.seed,
        success=success,
        peak_table_force=peak_table,
        peak_object_force=peak_object,
        grasp_time=grasp_time,
        classification=classification,
        alignment_error_deg=error_deg,
        offset_m=offset,
        table_before_object=table_first,
    )


# ---------------------------------------------------------------------------
# Suites and reports
# ---------------------------------------------------------------------------

def _round6(x: float) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return x
    return float(f"{float(x):.6g}")


def _histogram(values: list[float]) -> dict:
    if not values:
        return {"bin_width": HIST_BIN_N, "counts": [], "start": 0.0}
    top = max(values)
    n_bins = int(top // HIST_BIN_N) + 1
    counts = [0] * n_bins
    for v in values:
        counts[min(int(v // HIST_BIN_N), n_bins - 1)] += 1
    return {"bin_width": HIST_BIN_N, "counts": counts, "start": 0.0}


def _aggregate(results: list[TrialResult]) -> dict:
    results = sorted(results, key=lambda r: (r.object_name, r.trial_index))
    n = len(results)
    successes = sum(1 for r in results if r.success)
    forces = [r.peak_table_force for r in results]
    times = [r.grasp_time for r in results]
    agg = {
        "n_trials": n,
        "successes": successes,
        "success_rate": _round6(successes / n) if n else 0.0,
        "peak_table_force_median": _round6(statistics.median(forces)) if forces else 0.0,
        "peak_table_force_mean": _round6(statistics.fmean(forces)) if forces else 0.0,
        "peak_table_force_max": _round6(max(forces)) if forces else 0.0,
        "grasp_time_mean": _round6(statistics.fmean(times)) if times else 0.0,
        "grasp_time_std": _round6(statistics.pstdev(times)) if len(times) > 1 else 0.0,
        "force_histogram": _histogram(forces),
    }
    return agg


def run_suite(configs: list[TrialConfig]) -> dict:
    """Execute every config and aggregate a comparison report."""
    if not configs:
        raise ValidationError("at least one trial config required")
    all_results: list[TrialResult] = []
    per_config = []
    for config in configs:
        entries = load_suite(config.suite_path)
        if config.object_name is not None:
            table = suite_by_name(entries)
            if config.object_name not in table:
                raise ValidationError(f"unknown object {config.object_name!r}")
            entries = [table[config.object_name]]
        elif config.mode == "auto":
            entries = [e for e in entries if e.autonomous]
        results = []
        for entry in entries:
            for t in range(config.n_trials):
                results.append(run_trial(config, t, entry))
        results.sort(key=lambda r: (r.object_name, r.trial_index))
        per_object = {}
        for entry in entries:
            obj_results = [r for r in results if r.object_name == entry.model.name]
            per_object[entry.model.name] = _aggregate(obj_results)
        per_config.append({
            "gripper": config.gripper,
            "mode": config.mode,
            "seed": config.seed,
            "n_trials_per_object": config.n_trials,
            "objects": per_object,
            "aggregate": _aggregate(results),
        })
        all_results.extend(results)

    report = {
        "format": REPORT_FORMAT,
        "kind": "suite_report",
        "suites": per_config,
        "trials": [_trial_row(r) for r in sorted(
            all_results, key=lambda r: (r.gripper, r.object_name, r.trial_index))],
    }
    grippers = {c["gripper"]: c for c in per_config}
    if len(grippers) >= 2 and "baseline" in grippers:
        for name, suite in grippers.items():
            if name == "baseline":
                continue
            base_med = grippers["baseline"]["aggregate"]["peak_table_force_median"]
            med = suite["aggregate"]["peak_table_force_median"]
            report.setdefault("comparisons", {})[f"{name}_vs_baseline"] = {
                "force_median_ratio": _round6(med / base_med) if base_med > 0 else 0.0,
                "success_rate_delta": _round6(
                    suite["aggregate"]["success_rate"]
                    - grippers["baseline"]["aggregate"]["success_rate"]),
            }
    return report


def run_autonomous(config: TrialConfig) -> dict:
    """Estimator-driven pipeline over the autonomous object subset."""
    auto = replace(config, mode="auto")
    return run_suite([auto])


def _trial_row(r: TrialResult) -> dict:
    return {
        "object": r.object_name,
        "gripper": r.gripper,
        "trial": r.trial_index,
        "seed": r.seed,
        "success": r.success,
        "peak_table_force": _round6(r.peak_table_force),
        "peak_object_force": _round6(r.peak_object_force),
        "grasp_time": _round6(r.grasp_time),
        "classification": r.classification,
        "alignment_error_deg": _round6(r.alignment_error_deg),
        "offset_mm": _round6(r.offset_m * 1000.0),
        "fault": r.fault,
        "table_before_object": r.table_before_object,
    }


def emit_report(report: dict, path: str | Path, fmt: str = "json") -> None:
    """Bit-stable report files: sorted keys, fixed float formatting."""
    path = Path(path)
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif fmt == "csv":
        rows = report.get("trials", [])
        cols = ["gripper", "object", "trial", "seed", "success", "peak_table_force",
                "peak_object_force", "grasp_time", "classification",
                "alignment_error_deg", "offset_mm", "fault", "table_before_object"]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for row in rows:
                writer.writerow([row[c] for c in cols])
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
