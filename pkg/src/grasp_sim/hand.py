"""Kinematics and compliance of the asymmetric single-actuator hand.

The hand has two fingers:

  * a fixed finger hanging from the palm on a spring-loaded vertical slider
    (its tip defines the control frame O_tip and the constant grasp height),
  * an actuated three-joint finger (MP, PIP, DIP) driven by one motor with a
    contact-freezing transmission: a joint whose link touches something stops
    and the motor increment routes to the next joint down the chain, which is
    what turns fingertip contact into a pinch and proximal contact into an
    enveloping wrap.

A symmetric multi-linkage gripper used as the comparison baseline is modelled
separately by `BaselineGripperModel`: its fingertips sweep an arc, so the tip
height drops as the aperture shrinks.

Geometry lives in the O_tip frame: the commanded fixed-finger tip sits at the
origin when the slider is uncompressed; x points from the fixed finger toward
the actuated finger; z is up.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .geometry import Polygon2, Segment2, Transform2, ValidationError

MM = 1e-3

# Joint indices, in routing order.
MP, PIP, DIP = 0, 1, 2
JOINT_NAMES = ("mp", "pip", "dip")

HAND_CONFIG_FORMAT = 1


@dataclass(frozen=True)
class FingerLinkage:
    """Geometry and drive parameters of the actuated finger."""

    link_lengths: tuple[float, float, float] = (0.060, 0.040, 0.035)
    joint_limits: tuple[tuple[float, float], ...] = ((0.0, 1.6), (0.0, 2.2), (0.0, 2.2))
    pip_spring_constant: float = 0.13      # N*mm/deg, holds the extended posture
    motor_angle_range: tuple[float, float] = (0.0, 1.3)
    stall_torque: float = 4.1              # N*m, position servo limit

    def __post_init__(self):
        if any(L <= 0.0 for L in self.link_lengths):
            raise ValidationError("link lengths must be positive")
        if self.pip_spring_constant <= 0.0:
            raise ValidationError("PIP spring constant must be positive")
        q_open, q_closed = self.motor_angle_range
        if not q_open < q_closed:
            raise ValidationError("motor range must satisfy q_open < q_closed")

    @property
    def reach(self) -> float:
        return sum(self.link_lengths)


@dataclass(frozen=True)
class SliderState:
    """Spring-loaded vertical slider carrying the fixed finger."""

    compression: float = 0.0          # m, 0 = fully extended
    spring_constant: float = 500.0    # N/m
    preload: float = 2.0              # N
    max_stroke: float = 0.015         # m

    def __post_init__(self):
        if not 0.0 <= self.compression <= self.max_stroke + 1e-12:
            raise ValidationError("slider compression outside stroke")

    @property
    def reaction(self) -> float:
        """Spring force currently carried (N)."""
        return self.preload + self.spring_constant * self.compression

    @property
    def bottomed(self) -> bool:
        return self.compression >= self.max_stroke - 1e-12


def slider_react(slider: SliderState, vertical_load: float) -> SliderState:
    """Equilibrium compression under a vertical load.

    Below preload the slider does not move; past full stroke it bottoms out
    rigidly and carries the excess structurally.
    """
    if vertical_load < 0.0:
        raise ValidationError("vertical load must be >= 0")
    s = (vertical_load - slider.preload) / slider.spring_constant
    s = min(max(s, 0.0), slider.max_stroke)
    return replace(slider, compression=s)


def slider_reaction_force(slider: SliderState, vertical_load: float) -> float:
    """Force returned through the spring path: min(load, preload + k*stroke)."""
    return min(vertical_load, slider.preload + slider.spring_constant * slider.max_stroke)


@dataclass(frozen=True)
class HandState:
    """Full kinematic state of the hand."""

    tip_frame: Transform2 = field(default_factory=Transform2)
    motor_angle: float = 0.0
    joint_angles: tuple[float, float, float] = (0.0, 0.0, 0.0)
    slider: SliderState = field(default_factory=SliderState)
    frozen_joints: frozenset[int] = frozenset()
    stalled: bool = False


@dataclass(frozen=True)
class HandConfig:
    """One hand build: linkage, fixed-finger shape and slider constants."""

    variant: str = "F1"
    max_aperture: float = 0.1305
    fixed_finger_profile: Polygon2 | None = None
    linkage: FingerLinkage = field(default_factory=FingerLinkage)
    slider: SliderState = field(default_factory=SliderState)
    pivot_offset_x: float = 0.0        # palm slide-out of the extended build
    fixed_finger_width: float = 0.004
    fixed_finger_length: float = 0.140
    stall_force: float = 25.0          # N, summed finger contact force that stops the motor
    min_aperture: float = 0.0008

    def __post_init__(self):
        if self.fixed_finger_profile is None:
            w, L = self.fixed_finger_width, self.fixed_finger_length
            prof = Polygon2(((-w, 0.0), (0.0, 0.0), (0.0, L), (-w, L)))
            object.__setattr__(self, "fixed_finger_profile", prof)

    @property
    def open_tilt(self) -> float:
        """Chain tilt from vertical at q = 0 (full open)."""
        return math.asin((self.max_aperture - self.pivot_offset_x) / self.linkage.reach)

    @property
    def pivot(self) -> tuple[float, float]:
        """MP pivot in the O_tip frame: above the fixed tip, slid sideways
        in the extended build."""
        return (self.pivot_offset_x, self.linkage.reach)


def make_hand_config(variant: str) -> HandConfig:
    """Factory for the published hand builds."""
    key = variant.lower().replace("_", "-")
    if key == "f1":
        return HandConfig(variant="F1")
    if key in ("f1-wide", "f1-wide-finger"):
        return HandConfig(variant="F1_wide_finger", fixed_finger_width=0.020)
    if key == "f1-extended":
        return HandConfig(variant="F1_extended", max_aperture=0.215,
                          pivot_offset_x=0.0845, fixed_finger_width=0.004,
                          min_aperture=0.047)
    raise ValidationError(f"unknown hand variant: {variant!r}")


# ---------------------------------------------------------------------------
# Actuated-finger kinematics
# ---------------------------------------------------------------------------

def finger_forward_kinematics(
    linkage: FingerLinkage,
    joints: tuple[float, float, float],
    base: Transform2,
) -> list[Segment2]:
    """Link surface segments in world frame for the given joint angles.

    `base.rotation` is the chain tilt from straight-down at zero joints;
    positive joint angles curl the chain toward the fixed finger (-x).
    """
    for i, (angle, (lo, hi)) in enumerate(zip(joints, linkage.joint_limits)):
        if not lo - 1e-9 <= angle <= hi + 1e-9:
            raise ValidationError(
                f"joint {JOINT_NAMES[i]} angle {angle:.4f} outside limits [{lo}, {hi}]")
    segs: list[Segment2] = []
    px, pz = base.x, base.z
    tilt = base.rotation
    total = 0.0
    for L, angle in zip(linkage.link_lengths, joints):
        total += angle
        a = tilt - total
        nx = px + L * math.sin(a)
        nz = pz - L * math.cos(a)
        segs.append(Segment2(px, pz, nx, nz))
        px, pz = nx, nz
    return segs


def finger_segments(state: HandState, config: HandConfig) -> list[Segment2]:
    """Actuated-finger link segments in world frame for a hand state."""
    pvx, pvz = config.pivot
    base = Transform2(
        rotation=config.open_tilt,
        x=state.tip_frame.x + pvx,
        z=state.tip_frame.z + pvz,
    )
    return finger_forward_kinematics(config.linkage, state.joint_angles, base)



def fingertip(state: HandState, config: HandConfig) -> tuple[float, float]:
    seg = finger_segments(state, config)[-1]
    return (seg.bx, seg.bz)


def fixed_finger_polygon(state: HandState, config: HandConfig) -> Polygon2:
    """Fixed-finger profile in world frame, retracted up by the slider."""
    t = Transform2(0.0, state.tip_frame.x, state.tip_frame.z + state.slider.compression)
    return Polygon2(tuple(t.apply(x, z) for x, z in config.fixed_finger_profile.vertices))


def fixed_tip_position(state: HandState, config: HandConfig) -> tuple[float, float]:
    return (state.tip_frame.x, state.tip_frame.z + state.slider.compression)


def aperture(state: HandState, config: HandConfig) -> float:
    """Horizontal projected distance between the two fingertips."""
    tx, _ = fingertip(state, config)
    fx, _ = fixed_tip_position(state, config)
    return abs(tx - fx)


def aperture_to_motor(config: HandConfig, target: float) -> float:
    """Motor angle at which the unloaded (extended) finger shows the given
    aperture; closed form since the extended chain is one straight rod."""
    lo = config.min_aperture
    if not lo - 1e-9 <= target <= config.max_aperture + 1e-9:
        raise ValidationError(
            f"aperture {target:.4f} outside [{lo:.4f}, {config.max_aperture:.4f}]")
    target = min(max(target, lo), config.max_aperture)
    return config.open_tilt - math.asin((target - config.pivot_offset_x) / config.linkage.reach)


def _signed_gap(config: HandConfig, mp: float, pip: float, dip: float) -> float:
    """Fingertip x minus fixed-tip x; strictly decreasing in MP while all
    links point forward of straight-down."""
    T = config.open_tilt
    L1, L2, L3 = config.linkage.link_lengths
    tip_x = (L1 * math.sin(T - mp) + L2 * math.sin(T - mp - pip)
             + L3 * math.sin(T - mp - pip - dip))
    return tip_x + config.pivot_offset_x


def posture_aperture(config: HandConfig, mp: float, pip: float, dip: float) -> float:
    """Aperture of an arbitrary posture without building segments."""
    return abs(_signed_gap(config, mp, pip, dip))


def _mp_upper(config: HandConfig, pip: float, dip: float) -> float:
    T = config.open_tilt
    return min(config.linkage.joint_limits[MP][1],
               T - pip - dip + 0.5 * math.pi - 1e-6)


def motor_for_aperture(config: HandConfig, target: float, pip: float = 0.0,
                       dip: float = 0.0) -> float:
    """MP angle giving the target aperture with PIP/DIP held at a pre-curl.

    Closed form for the extended posture; bisection otherwise (the signed
    gap is monotone in MP while every link points forward of vertical).
    """
    if pip == 0.0 and dip == 0.0:
        return aperture_to_motor(config, target)
    hi = _mp_upper(config, pip, dip)
    lo = 0.0
    if target > _signed_gap(config, lo, pip, dip) + 1e-9:
        raise ValidationError(
            f"aperture {target:.4f} unreachable with pre-curl (max "
            f"{_signed_gap(config, lo, pip, dip):.4f})")
    if target < _signed_gap(config, hi, pip, dip):
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _signed_gap(config, mid, pip, dip) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def min_posture_aperture(config: HandConfig, pip: float, dip: float) -> float:
    """Smallest aperture reachable by MP alone at the given pre-curl."""
    if pip == 0.0 and dip == 0.0:
        return config.min_aperture
    hi = _mp_upper(config, pip, dip)
    return max(_signed_gap(config, hi, pip, dip), config.min_aperture)


def motor_range(config: HandConfig) -> tuple[float, float]:
    """(q_open, q_closed) for the build: full open to minimum aperture."""
    return (0.0, aperture_to_motor(config, config.min_aperture))


# ---------------------------------------------------------------------------
# Underactuated closure
# ---------------------------------------------------------------------------

def finger_closure_step(
    state: HandState,
    dq: float,
    contacted_links: frozenset[int] | set[int],
    linkage: FingerLinkage | None = None,
) -> HandState:
    """One motor increment through the contact-freezing transmission.

    `contacted_links` holds link indices (0 proximal, 1 middle, 2 distal)
    currently bearing a contact; the matching joints freeze and dq routes to
    the first free joint in MP -> PIP -> DIP order. With nothing touching,
    the PIP/DIP torsion springs keep the finger extended, so only MP sweeps.
    All joints frozen (or at their limits) is a stall: nothing moves.
    """
    if dq < 0.0:
        raise ValidationError("dq must be >= 0")
    linkage = linkage if linkage is not None else FingerLinkage()
    frozen = frozenset(contacted_links)
    if dq == 0.0:
        return replace(state, frozen_joints=frozen)
    angles = list(state.joint_angles)
    driven = -1
    for j in (MP, PIP, DIP):
        hi = linkage.joint_limits[j][1]
        if j in frozen or angles[j] >= hi - 1e-12:
            continue
        driven = j
        break
    if driven < 0:
        return replace(state, frozen_joints=frozen, stalled=True)
    hi = linkage.joint_limits[driven][1]
    angles[driven] = min(angles[driven] + dq, hi)
    return replace(
        state,
        joint_angles=tuple(angles),
        motor_angle=state.motor_angle + dq,
        frozen_joints=frozen,
        stalled=False,
    )


# ---------------------------------------------------------------------------
# Baseline symmetric multi-linkage gripper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BaselineGripperModel:
    """Two mirrored multi-linkage fingers; tips arc downward as they close.

    Sweep angle phi runs 0 (open) to pi/2; tip drop h = R * (1 - cos phi)
    grows monotonically while the aperture shrinks, which is the property
    that makes thin tabletop objects unreachable for this design.
    """

    tip_arc_radius: float = 0.060
    max_aperture: float = 0.125
    sweep_max: float = math.pi / 2

    def sweep(self, q: float) -> float:
        if not -1e-12 <= q <= self.sweep_max + 1e-12:
            raise ValidationError("baseline motor angle outside range")
        return min(max(q, 0.0), self.sweep_max)

    def aperture(self, q: float) -> float:
        phi = self.sweep(q)
        return self.max_aperture - 2.0 * self.tip_arc_radius * math.sin(phi)

    def tip_drop(self, q: float) -> float:
        phi = self.sweep(q)
        return self.tip_arc_radius * (1.0 - math.cos(phi))

    @property
    def min_aperture(self) -> float:
        return self.max_aperture - 2.0 * self.tip_arc_radius

    def motor_for_aperture(self, target: float) -> float:
        if not self.min_aperture - 1e-9 <= target <= self.max_aperture + 1e-9:
            raise ValidationError("aperture outside baseline range")
        s = (self.max_aperture - target) / (2.0 * self.tip_arc_radius)
        return math.asin(min(max(s, 0.0), 1.0))


def baseline_tip_pose(model: BaselineGripperModel, q: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """(left_tip, right_tip) relative to the gripper centreline at open-tip height."""
    a = model.aperture(q)
    h = model.tip_drop(q)
    return ((-0.5 * a, -h), (0.5 * a, -h))


# ---------------------------------------------------------------------------
# Hand configuration files (format: 1)
# ---------------------------------------------------------------------------

def hand_config_to_dict(config: HandConfig) -> dict:
    return {
        "format": HAND_CONFIG_FORMAT,
        "variant": config.variant,
        "max_aperture_mm": config.max_aperture / MM,
        "min_aperture_mm": config.min_aperture / MM,
        "link_lengths_mm": [L / MM for L in config.linkage.link_lengths],
        "joint_limits_rad": [list(lim) for lim in config.linkage.joint_limits],
        "pip_spring_n_mm_per_deg": config.linkage.pip_spring_constant,
        "stall_torque_n_m": config.linkage.stall_torque,
        "stall_force_n": config.stall_force,
        "slider": {
            "preload_n": config.slider.preload,
            "spring_n_per_m": config.slider.spring_constant,
            "max_stroke_mm": config.slider.max_stroke / MM,
        },
        "pivot_offset_mm": config.pivot_offset_x / MM,
        "fixed_finger": {
            "profile_mm": [[x / MM, z / MM] for x, z in config.fixed_finger_profile.vertices],
        },
    }


def hand_config_from_dict(data: dict) -> HandConfig:
    if data.get("format") != HAND_CONFIG_FORMAT:
        raise ValidationError(
            f"unsupported hand config format: {data.get('format')!r} (expected {HAND_CONFIG_FORMAT})")
    try:
        lengths = tuple(v * MM for v in data["link_lengths_mm"])
        if len(lengths) != 3:
            raise ValidationError("link_lengths_mm must have 3 entries")
        limits = tuple(tuple(float(v) for v in lim) for lim in data["joint_limits_rad"])
        slider = data["slider"]
        fixed = data["fixed_finger"]
        profile = Polygon2(tuple((x * MM, z * MM) for x, z in fixed["profile_mm"]))
        return HandConfig(
            variant=str(data["variant"]),
            max_aperture=float(data["max_aperture_mm"]) * MM,
            min_aperture=float(data.get("min_aperture_mm", 0.8)) * MM,
            fixed_finger_profile=profile,
            linkage=FingerLinkage(
                link_lengths=lengths,
                joint_limits=limits,
                pip_spring_constant=float(data["pip_spring_n_mm_per_deg"]),
                stall_torque=float(data.get("stall_torque_n_m", 4.1)),
            ),
            slider=SliderState(
                spring_constant=float(slider["spring_n_per_m"]),
                preload=float(slider["preload_n"]),
                max_stroke=float(slider["max_stroke_mm"]) * MM,
            ),
            pivot_offset_x=float(data.get("pivot_offset_mm", 0.0)) * MM,
            stall_force=float(data.get("stall_force_n", 25.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"hand config missing field: {exc}") from exc


def load_hand_config(path: str | Path) -> HandConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return hand_config_from_dict(json.load(fh))


def save_hand_config(config: HandConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hand_config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
