"""Fixed-step quasi-static world: table, object, hand.

Each step applies the commanded hand motion, detects contacts, computes
penalty normal forces (F = k_c * penetration) and resolves the object's
response by static rules with the precedence stick -> slide -> tip:

  stick : some combination of table contact forces inside their friction
          cones balances the applied wrench (checked by a feasibility LP),
  slide : the net horizontal push beats Coulomb friction against the table,
  tip   : the net moment about a support vertex beats the gravity-restoring
          moment.

There is no inertia: objects move only as far as needed to relieve contact
penetration, capped per step, and settle back onto the table afterwards.
Force peaks are tracked separately for the two load paths the wrist would
feel: through the table (slider reaction plus any direct finger-table
contact) and through the object (grasp reaction forces).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import (
    ContactPoint,
    Polygon2,
    Segment2,
    Transform2,
    ValidationError,
    friction_cone,
    polygon_segment_contact,
    transform_apply,
)
from .hand import (
    HandConfig,
    HandState,
    finger_closure_step,
    finger_segments,
    fixed_tip_position,
)
from .lp import solve_feasibility

GRAVITY = 9.81

LINK_BODIES = ("link0", "link1", "link2")


@dataclass(frozen=True)
class SimParams:
    """Numerical knobs of the quasi-static stepper."""

    object_stiffness: float = 1e5   # N/m, finger-object penalty (stiff bodies)
    table_stiffness: float = 1e4    # N/m, table path (includes arm give)
    dt: float = 0.005               # s per control step
    contact_tol: float = 1e-4       # m, touch detection tolerance
    max_hand_step: float = 2.5e-3   # m, per-step hand translation limit
    max_dq: float = 0.05            # rad, per-step motor increment limit
    max_object_step: float = 1e-3   # m, object relief displacement cap per step
    max_iters: int = 12             # contact relief iterations per step
    tip_angle_step: float = 0.02    # rad, tipping rotation per relief iteration
    fault_penetration: float = 0.008  # m, unresolved overlap that aborts a trial


@dataclass(frozen=True)
class ObjectModel:
    """A graspable item: planar cross-section resting on the table."""

    name: str
    cross_section: Polygon2
    mass: float
    mu_table: float = 0.4
    mu_finger: float = 0.6

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValidationError("object mass must be positive")
        if self.mu_table < 0.0 or self.mu_finger < 0.0:
            raise ValidationError("friction coefficients must be >= 0")

    @property
    def width(self) -> float:
        x0, _, x1, _ = self.cross_section.bounds()
        return x1 - x0

    @property
    def height(self) -> float:
        _, z0, _, z1 = self.cross_section.bounds()
        return z1 - z0

    @property
    def com_local(self) -> tuple[float, float]:
        cached = self.__dict__.get("_com")
        if cached is None:
            cached = self.cross_section.centroid()
            self.__dict__["_com"] = cached
        return cached


@dataclass(frozen=True)
class ContactResolution:
    """Outcome of one object-response resolution."""

    modes: tuple[str, ...]               # per finger contact: stick | slide | tip
    displacement: tuple[float, float, float]  # dx, dz, dtheta
    forces: tuple[float, ...]            # N per finger contact


@dataclass(frozen=True)
class WorldState:
    """Snapshot of the simulated scene."""

    hand: HandState = field(default_factory=HandState)
    object_pose: Transform2 = field(default_factory=Transform2)
    time: float = 0.0
    table_height: float = 0.0
    contacts: tuple[ContactPoint, ...] = ()
    table_force: float = 0.0
    object_force: float = 0.0
    peak_table_force: float = 0.0
    peak_object_force: float = 0.0
    motor_stalled: bool = False
    grasp_latched: bool = False
    slider_bottomed: bool = False
    fault: bool = False


def object_polygon(obj: ObjectModel, pose: Transform2) -> Polygon2:
    return transform_apply(pose, obj.cross_section)


# ---------------------------------------------------------------------------
# Contact detection
# ---------------------------------------------------------------------------

def detect_contacts(
    hand: HandState,
    config: HandConfig,
    obj: ObjectModel | None,
    pose: Transform2 | None,
    params: SimParams,
    poly: Polygon2 | None = None,
) -> list[ContactPoint]:
    """All hand/table/object contacts with penalty forces filled in."""
    k_obj = params.object_stiffness
    k_tab = params.table_stiffness
    contacts: list[ContactPoint] = []
    segs = finger_segments(hand, config)
    if poly is None and obj is not None and pose is not None:
        poly = object_polygon(obj, pose)

    for body, seg in zip(LINK_BODIES, segs):
        if poly is not None:
            for c in polygon_segment_contact(poly, seg, params.contact_tol):
                contacts.append(replace(c, body_pair=(body, "object"),
                                        force=k_obj * c.penetration_depth))
        # Link against the table plane.
        minz = min(seg.az, seg.bz)
        if minz < params.contact_tol:
            pen = max(0.0, -minz)
            lx = seg.ax if seg.az <= seg.bz else seg.bx
            contacts.append(ContactPoint(lx, minz, 0.0, -1.0, pen,
                                         (body, "table"), force=k_tab * pen))

    if poly is not None:
        fx, fz = fixed_tip_position(hand, config)
        face = Segment2(fx, fz, fx, fz + config.fixed_finger_length)
        for c in polygon_segment_contact(poly, face, params.contact_tol):
            contacts.append(replace(c, body_pair=("fixed", "object"),
                                    force=k_obj * c.penetration_depth))

    contacts.sort(key=lambda c: (c.body_pair, c.x, c.z))
    return contacts


def _support_vertices(poly: Polygon2, tol: float) -> list[tuple[float, float]]:
    return [(x, z) for x, z in poly.vertices if z <= tol]


def _contacted_links(contacts) -> frozenset[int]:
    touched = set()
    for c in contacts:
        if c.body_pair[0] in LINK_BODIES:
            touched.add(LINK_BODIES.index(c.body_pair[0]))
    return frozenset(touched)


# ---------------------------------------------------------------------------
# Object response
# ---------------------------------------------------------------------------

def _static_balance_feasible(
    finger_contacts: list[ContactPoint],
    supports: list[tuple[float, float]],
    obj: ObjectModel,
    com: tuple[float, float],
) -> bool:
    """Can table forces inside their cones balance the applied wrench?"""
    fx = fz = tau = 0.0
    for c in finger_contacts:
        f = c.force
        fx += f * c.nx
        fz += f * c.nz
        tau += (c.x - com[0]) * f * c.nz - (c.z - com[1]) * f * c.nx
    fz -= obj.mass * GRAVITY
    if not supports:
        return abs(fx) < 1e-9 and abs(fz) < 1e-9 and abs(tau) < 1e-9
    cols = []
    mu = max(obj.mu_table, 1e-12)
    for sx, sz in supports:
        for ex, ez in friction_cone(0.0, 1.0, mu):
            cols.append((ex, ez, (sx - com[0]) * ez - (sz - com[1]) * ex))
    A = [[col[r] for col in cols] for r in range(3)]
    return solve_feasibility(A, [-fx, -fz, -tau]).feasible


def resolve_object(
    contacts: list[ContactPoint],
    obj: ObjectModel,
    pose: Transform2,
    params: SimParams,
    step_cap: float,
    poly: Polygon2 | None = None,
) -> ContactResolution:
    """Classify the object response and produce a relief displacement.

    Precedence is stick, then slide, then tip; when both the slide and tip
    inequalities hold, slide wins (the lower-energy mode for tabletop
    objects). The relief displacement never exceeds `step_cap`.
    """
    finger_contacts = [c for c in contacts if c.body_pair[1] == "object"]
    if not finger_contacts:
        return ContactResolution((), (0.0, 0.0, 0.0), ())

    if poly is None:
        poly = object_polygon(obj, pose)
    com = pose.apply(*obj.com_local)
    supports = _support_vertices(poly, params.contact_tol)
    forces = tuple(c.force for c in finger_contacts)

    if _static_balance_feasible(finger_contacts, supports, obj, com):
        return ContactResolution(tuple("stick" for _ in finger_contacts),
                                 (0.0, 0.0, 0.0), forces)

    net_fx = sum(c.force * c.nx for c in finger_contacts)
    net_fz = sum(c.force * c.nz for c in finger_contacts)
    load = max(0.0, obj.mass * GRAVITY - net_fz)

    # Slide relief: move toward balancing the two jaws rather than fully
    # clearing one side, which would oscillate the object between them.
    if abs(net_fx) > obj.mu_table * load + 1e-12:
        direction = 1.0 if net_fx > 0.0 else -1.0
        pen_push = pen_against = 0.0
        for c in finger_contacts:
            along = c.nx * direction
            if along > 1e-9:
                pen_push = max(pen_push, c.penetration_depth * along)
            elif along < -1e-9:
                pen_against = max(pen_against, c.penetration_depth * (-along))
        relief = 0.5 * (pen_push - pen_against)
        if relief <= 1e-12:
            return ContactResolution(tuple("stick" for _ in finger_contacts),
                                     (0.0, 0.0, 0.0), forces)
        relief = min(relief, step_cap)
        return ContactResolution(tuple("slide" for _ in finger_contacts),
                                 (direction * relief, 0.0, 0.0), forces)

    # Tipping about a support-edge vertex.
    if supports:
        right = max(supports, key=lambda s: s[0])
        left = min(supports, key=lambda s: s[0])
        for pivot, sense in ((right, -1.0), (left, 1.0)):
            tau = 0.0
            for c in finger_contacts:
                f = c.force
                tau += (c.x - pivot[0]) * f * c.nz - (c.z - pivot[1]) * f * c.nx
            tau += (com[0] - pivot[0]) * (-obj.mass * GRAVITY)
            if tau * sense > 1e-12:
                dtheta = sense * min(params.tip_angle_step, step_cap / max(1e-6, _max_lever(finger_contacts, pivot)))
                return ContactResolution(tuple("tip" for _ in finger_contacts),
                                         _rotation_about(pivot, pose, dtheta), forces)

    # Net wrench infeasible but neither inequality decisive: hold position.
    return ContactResolution(tuple("stick" for _ in finger_contacts),
                             (0.0, 0.0, 0.0), forces)


def _max_lever(contacts, pivot) -> float:
    return max(math.hypot(c.x - pivot[0], c.z - pivot[1]) for c in contacts)


def _rotation_about(pivot, pose: Transform2, dtheta: float) -> tuple[float, float, float]:
    """Displacement triple equivalent to rotating the pose about a world point."""
    c, s = math.cos(dtheta), math.sin(dtheta)
    px, pz = pose.x - pivot[0], pose.z - pivot[1]
    nx = c * px - s * pz + pivot[0]
    nz = s * px + c * pz + pivot[1]
    return (nx - pose.x, nz - pose.z, dtheta)


def _settle_on_table(obj: ObjectModel, pose: Transform2, params: SimParams) -> Transform2:
    """Drop or raise the object so it rests exactly on the table."""
    poly = object_polygon(obj, pose)
    minz = min(z for _, z in poly.vertices)
    if abs(minz) > 1e-12:
        pose = pose.translated(0.0, -minz)
    return pose


def _gravity_topple(obj: ObjectModel, pose: Transform2, contacts, params: SimParams,
                    poly: Polygon2 | None = None) -> Transform2:
    """Let an unbalanced, unheld object rotate about its support vertex."""
    if poly is None:
        poly = object_polygon(obj, pose)
    supports = _support_vertices(poly, params.contact_tol)
    if not supports:
        return pose
    com = pose.apply(*obj.com_local)
    finger_contacts = [c for c in contacts if c.body_pair[1] == "object"]
    if _static_balance_feasible(finger_contacts, supports, obj, com):
        return pose
    xs = [s[0] for s in supports]
    if min(xs) - 1e-9 <= com[0] <= max(xs) + 1e-9:
        return pose
    pivot = max(supports, key=lambda s: s[0]) if com[0] > max(xs) else min(supports, key=lambda s: s[0])
    sense = -1.0 if com[0] > pivot[0] else 1.0
    dx, dz, dth = _rotation_about(pivot, pose, sense * params.tip_angle_step)
    rolled = Transform2(pose.rotation + dth, pose.x + dx, pose.z + dz)
    return _settle_on_table(obj, rolled, params)


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def step(
    world: WorldState,
    hand_command: tuple[tuple[float, float], float],
    config: HandConfig,
    obj: ObjectModel | None = None,
    params: SimParams = SimParams(),
    dt: float | None = None,
) -> WorldState:
    """Advance the world by one control step.

    `hand_command` is ((dx, dz), dq): an O_tip translation plus a motor
    increment. The arm always completes its motion (position controlled);
    the finger advances through the underactuated transmission and latches
    stalled once the summed grasp force reaches the configured stall force.
    """
    if world.fault:
        return world
    (dx, dz), dq = hand_command
    dt = params.dt if dt is None else dt
    if dt <= 0.0:
        raise ValidationError("dt must be > 0")
    if math.hypot(dx, dz) > params.max_hand_step + 1e-12:
        raise ValidationError("hand step exceeds per-step limit")
    if not 0.0 <= dq <= params.max_dq + 1e-12:
        raise ValidationError("motor increment outside per-step limit")

    hand = replace(world.hand, tip_frame=world.hand.tip_frame.translated(dx, dz))

    # Underactuated closure routed by the links touched at the start of the
    # step; an overloaded motor holds position until the load drops.
    if dq > 0.0 and not world.motor_stalled:
        hand = finger_closure_step(hand, dq, _contacted_links(world.contacts), config.linkage)

    # Slider equilibrium against the table (analytic: spring vs penalty).
    hand, slider_force, bottomed = _slider_table_equilibrium(hand, config, params)

    pose = world.object_pose
    step_cap = max(math.hypot(dx, dz), dq * config.linkage.reach, 1e-4)
    step_cap = min(step_cap * 2.0, params.max_object_step)
    contacts: list[ContactPoint] = []
    fault = False
    if obj is not None:
        moved_total = 0.0
        for _ in range(params.max_iters):
            poly = object_polygon(obj, pose)
            contacts = detect_contacts(hand, config, obj, pose, params, poly=poly)
            res = resolve_object(contacts, obj, pose, params, step_cap, poly=poly)
            ddx, ddz, ddth = res.displacement
            if abs(ddx) + abs(ddz) < 2e-6 and abs(ddth) < 1e-5:
                break
            pose = Transform2(pose.rotation + ddth, pose.x + ddx, pose.z + ddz)
            pose = _settle_on_table(obj, pose, params)
            moved_total += math.hypot(ddx, ddz) + abs(ddth) * 0.1
            if moved_total > 20.0 * params.max_object_step:
                break
        pose = _gravity_topple(obj, pose, contacts, params)
        contacts = detect_contacts(hand, config, obj, pose, params)
        worst = max((c.penetration_depth for c in contacts if c.body_pair[1] == "object"),
                    default=0.0)
        fault = worst > params.fault_penetration
    else:
        contacts = detect_contacts(hand, config, None, None, params)

    table_force = slider_force + sum(
        c.force for c in contacts if c.body_pair[1] == "table")
    object_force = sum(c.force for c in contacts if c.body_pair[1] == "object")
    finger_force = sum(c.force for c in contacts
                       if c.body_pair[1] == "object" and c.body_pair[0] in LINK_BODIES)

    # Overload holds the motor; with opposition established (a formed grasp,
    # meaning the fixed side also carries real load) the stop latches, which
    # is the end of a torque-limited closure.
    overloaded = finger_force >= config.stall_force
    links_touching = {c.body_pair[0] for c in contacts
                      if c.body_pair[1] == "object" and c.body_pair[0] in LINK_BODIES}
    fixed_force = sum(c.force for c in contacts if c.body_pair == ("fixed", "object"))
    opposition = fixed_force >= 0.2 * config.stall_force or len(links_touching) >= 2
    latched = world.grasp_latched or (overloaded and opposition)
    stalled = latched or overloaded

    return WorldState(
        hand=hand,
        object_pose=pose,
        time=world.time + dt,
        table_height=world.table_height,
        contacts=tuple(contacts),
        table_force=table_force,
        object_force=object_force,
        peak_table_force=max(world.peak_table_force, table_force),
        peak_object_force=max(world.peak_object_force, object_force),
        motor_stalled=stalled,
        grasp_latched=latched,
        slider_bottomed=world.slider_bottomed or bottomed,
        fault=world.fault or fault,
    )


def _slider_table_equilibrium(hand: HandState, config: HandConfig, params: SimParams):
    """Compression and reaction of the fixed-finger slider against the table.

    The commanded tip may sit below the table plane; the slider retracts the
    finger so the spring force matches the table penalty force. Bottomed out,
    the remainder is carried rigidly through the penalty stiffness.
    """
    z_cmd = hand.tip_frame.z
    slider = hand.slider
    if z_cmd >= 0.0:
        new = replace(slider, compression=0.0)
        return replace(hand, slider=new), 0.0, False
    k_c = params.table_stiffness
    k_s = slider.spring_constant
    s = (k_c * (-z_cmd) - slider.preload) / (k_s + k_c)
    s = min(max(s, 0.0), slider.max_stroke)
    new = replace(slider, compression=s)
    pen = max(0.0, -z_cmd - s)
    if s <= 0.0:
        force = k_c * pen  # below preload the spring does not move
        return replace(hand, slider=new), force, False
    bottomed = new.bottomed
    force = new.reaction
    if bottomed:
        force += k_c * max(0.0, pen - 0.0)  # rigid excess past full stroke
        force = max(force, k_c * pen)
    return replace(hand, slider=new), force, bottomed


# ---------------------------------------------------------------------------
# Grasp evaluation
# ---------------------------------------------------------------------------

def lift_test(world: WorldState, obj: ObjectModel, height: float = 0.10) -> bool:
    """Wrench feasibility of holding the object against gravity.

    True when finger-contact forces inside their friction cones can balance
    the object's weight (table contacts excluded). `height` is recorded by
    callers for logs; it does not change the static test.
    """
    finger_contacts = [c for c in world.contacts
                       if c.body_pair[1] == "object" and c.body_pair[0] != "table"]
    if not finger_contacts:
        return False
    com = world.object_pose.apply(*obj.com_local)
    cols = []
    for c in finger_contacts:
        for ex, ez in friction_cone(c.nx, c.nz, obj.mu_finger):
            cols.append((ex, ez, (c.x - com[0]) * ez - (c.z - com[1]) * ex))
    A = [[col[r] for col in cols] for r in range(3)]
    b = [0.0, obj.mass * GRAVITY, 0.0]
    return solve_feasibility(A, b).feasible


def classify_grasp(contacts) -> str:
    """pinch / envelope / none from the closure's contact set."""
    links = set()
    fixed = False
    for c in contacts:
        if c.body_pair[1] != "object":
            continue
        if c.body_pair[0] in LINK_BODIES:
            links.add(LINK_BODIES.index(c.body_pair[0]))
        elif c.body_pair[0] == "fixed":
            fixed = True
    if len(links) >= 2:
        return "envelope"
    if links == {2} and fixed:
        return "pinch"
    return "none"
