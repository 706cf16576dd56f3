"""Shared generators and independent oracles for the test suite.

Everything here is deliberately written against the *contracts* of the
package, not its implementation: the wrench oracle enumerates cone-edge
combinations with dense linear algebra instead of running a simplex, and
the symmetric-object generator builds wall-capture boxes from first
principles so first-contact symmetry can be asserted.
"""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from grasp_sim.geometry import Polygon2, Transform2, friction_cone
from grasp_sim.hand import HandState, finger_segments, make_hand_config, motor_for_aperture
from grasp_sim.harness import pregrasp_posture
from grasp_sim.sim import GRAVITY, ObjectModel

F1 = make_hand_config("f1")


def box_object(w: float, h: float, mass: float = 0.2, mu_t: float = 0.4,
               mu_f: float = 0.6, name: str = "box") -> ObjectModel:
    half = w / 2
    poly = Polygon2(((-half, 0.0), (half, 0.0), (half, h), (-half, h)))
    return ObjectModel(name, poly, mass, mu_t, mu_f)


def catch_tip_height(w_obj: float, clearance: float = 0.010) -> float:
    """Fingertip height when the jaws reach the object's width."""
    probe = box_object(w_obj, 0.05, name="probe")
    joints, zd = pregrasp_posture(probe, Transform2(), w_obj + clearance, F1)
    mp = motor_for_aperture(F1, max(w_obj, F1.min_aperture), joints[1], joints[2])
    hand = HandState(tip_frame=Transform2(0.0, 0.0, zd), motor_angle=mp,
                     joint_angles=(mp, joints[1], joints[2]))
    return finger_segments(hand, F1)[-1].bz


def wall_capture_box(rng: random.Random) -> ObjectModel:
    """Symmetric box whose side walls are met by the fingertips themselves
    (just above the catch height), the geometry for which simultaneous
    two-finger wall contact is claimed."""
    w_obj = rng.uniform(0.025, 0.06)
    h_obj = catch_tip_height(w_obj) + rng.uniform(0.005, 0.012)
    return box_object(w_obj, h_obj, mass=rng.uniform(0.05, 0.4), name="sym")


# ---------------------------------------------------------------------------
# Brute-force wrench feasibility
# ---------------------------------------------------------------------------

def wrench_columns(contacts, mu: float, com) -> list[tuple[float, float, float]]:
    cols = []
    for (x, z, nx, nz) in contacts:
        for ex, ez in friction_cone(nx, nz, mu):
            cols.append((ex, ez, (x - com[0]) * ez - (z - com[1]) * ex))
    return cols


def brute_force_wrench_feasible(
    cols: list[tuple[float, float, float]],
    target: tuple[float, float, float],
    tol: float = 1e-6,
) -> tuple[bool, float]:
    """Search cone-edge combinations for nonnegative coefficients producing
    the target wrench. Any achievable wrench in the plane decomposes over at
    most three edges, so enumerating singles, pairs and triples with dense
    least squares is an exhaustive check. Returns (feasible, margin) where
    the margin measures distance from the decision boundary: the smallest
    relative residual for infeasible instances, the smallest useful
    coefficient scale for feasible ones.
    """
    t = np.array(target, dtype=float)
    scale = max(1.0, float(np.linalg.norm(t)))
    if np.linalg.norm(t) <= tol:
        return True, 1.0
    best_residual = math.inf
    best_margin = 0.0
    feasible = False
    n = len(cols)
    for k in (1, 2, 3):
        for combo in itertools.combinations(range(n), k):
            A = np.array([[cols[j][r] for j in combo] for r in range(3)])
            lam, *_ = np.linalg.lstsq(A, t, rcond=None)
            if np.any(lam < -1e-9):
                continue
            residual = float(np.linalg.norm(A @ np.maximum(lam, 0.0) - t)) / scale
            best_residual = min(best_residual, residual)
            if residual < tol:
                feasible = True
                best_margin = max(best_margin, float(np.min(lam[lam > 1e-12]))
                                  if np.any(lam > 1e-12) else 0.0)
    if feasible:
        return True, best_margin
    return False, best_residual if math.isfinite(best_residual) else 1.0


def random_contact_instance(rng: random.Random):
    """2-4 contacts on a random box resting on the table, for the lift oracle."""
    w = rng.uniform(0.02, 0.10)
    h = rng.uniform(0.02, 0.10)
    mass = rng.uniform(0.02, 0.6)
    mu = rng.uniform(0.2, 1.0)
    obj = box_object(w, h, mass=mass, mu_f=mu)
    n_contacts = rng.randint(2, 4)
    contacts = []
    for _ in range(n_contacts):
        side = rng.choice(("left", "right", "top"))
        if side == "left":
            pos = (-w / 2, rng.uniform(0.1, 0.9) * h)
            normal = (1.0, 0.0)
        elif side == "right":
            pos = (w / 2, rng.uniform(0.1, 0.9) * h)
            normal = (-1.0, 0.0)
        else:
            pos = (rng.uniform(-0.4, 0.4) * w, h)
            normal = (0.0, -1.0)
        contacts.append((pos[0], pos[1], normal[0], normal[1]))
    return obj, contacts
