"""2D rigid-body math, polygon primitives, and contact queries.

Conventions used throughout the package:
  x : horizontal closing direction (metres)
  z : vertical, up positive (metres)
  angles in radians, normalised to (-pi, pi]

All functions here are pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class Transform2:
    """Planar rigid transform: rotation about the origin, then translation."""

    rotation: float = 0.0
    x: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rotation", normalize_angle(self.rotation))

    def apply(self, px: float, pz: float) -> tuple[float, float]:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return (c * px - s * pz + self.x, s * px + c * pz + self.z)

    def compose(self, other: "Transform2") -> "Transform2":
        """self ∘ other: apply `other` first, then `self`."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Transform2(
            rotation=self.rotation + other.rotation,
            x=c * other.x - s * other.z + self.x,
            z=s * other.x + c * other.z + self.z,
        )

    def inverse(self) -> "Transform2":
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Transform2(
            rotation=-self.rotation,
            x=-(c * self.x + s * self.z),
            z=-(-s * self.x + c * self.z),
        )

    def translated(self, dx: float, dz: float) -> "Transform2":
        return Transform2(self.rotation, self.x + dx, self.z + dz)


@dataclass(frozen=True)
class Segment2:
    """Directed line segment from a to b."""

    ax: float
    az: float
    bx: float
    bz: float

    def __post_init__(self):
        if self.ax == self.bx and self.az == self.bz:
            raise ValidationError("degenerate segment: a == b")

    @property
    def length(self) -> float:
        return math.hypot(self.bx - self.ax, self.bz - self.az)

    def point_at(self, t: float) -> tuple[float, float]:
        return (self.ax + t * (self.bx - self.ax), self.az + t * (self.bz - self.az))


@dataclass(frozen=True)
class Polygon2:
    """Simple polygon, vertices counter-clockwise, positive signed area."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(z)) for x, z in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise ValidationError("polygon needs >= 3 vertices")
        if self.signed_area() <= 0.0:
            raise ValidationError("polygon vertices must be counter-clockwise")
        if _self_intersects(verts):
            raise ValidationError("polygon is self-intersecting")

    @classmethod
    def _unchecked(cls, vertices) -> "Polygon2":
        """Skip validation for vertices produced by a rigid motion of an
        already-valid polygon."""
        poly = object.__new__(cls)
        object.__setattr__(poly, "vertices", tuple(vertices))
        return poly

    def signed_area(self) -> float:
        a = 0.0
        vs = self.vertices
        for i in range(len(vs)):
            x0, z0 = vs[i]
            x1, z1 = vs[(i + 1) % len(vs)]
            a += x0 * z1 - x1 * z0
        return 0.5 * a

    def centroid(self) -> tuple[float, float]:
        cx = cz = 0.0
        a = 0.0
        vs = self.vertices
        for i in range(len(vs)):
            x0, z0 = vs[i]
            x1, z1 = vs[(i + 1) % len(vs)]
            cross = x0 * z1 - x1 * z0
            a += cross
            cx += (x0 + x1) * cross
            cz += (z0 + z1) * cross
        a *= 0.5
        return (cx / (6.0 * a), cz / (6.0 * a))

    def bounds(self) -> tuple[float, float, float, float]:
        cached = self.__dict__.get("_bounds")
        if cached is None:
            xs = [v[0] for v in self.vertices]
            zs = [v[1] for v in self.vertices]
            cached = (min(xs), min(zs), max(xs), max(zs))
            self.__dict__["_bounds"] = cached
        return cached

    def edges(self):
        vs = self.vertices
        for i in range(len(vs)):
            yield vs[i], vs[(i + 1) % len(vs)]

    def contains(self, px: float, pz: float) -> bool:
        """Even-odd point-in-polygon test; boundary points count as inside."""
        inside = False
        vs = self.vertices
        n = len(vs)
        j = n - 1
        for i in range(n):
            xi, zi = vs[i]
            xj, zj = vs[j]
            if (zi > pz) != (zj > pz):
                t = (pz - zi) / (zj - zi)
                xcross = xi + t * (xj - xi)
                if px < xcross:
                    inside = not inside
            j = i
        if inside:
            return True
        return self.boundary_distance(px, pz) <= 1e-12

    def boundary_distance(self, px: float, pz: float) -> float:
        """Unsigned distance from a point to the polygon boundary."""
        best = math.inf
        for (x0, z0), (x1, z1) in self.edges():
            d = _point_segment_distance(px, pz, x0, z0, x1, z1)
            if d < best:
                best = d
        return best

    def signed_distance(self, px: float, pz: float) -> float:
        """Negative inside, positive outside."""
        d = self.boundary_distance(px, pz)
        return -d if self.contains(px, pz) else d


@dataclass(frozen=True)
class ContactPoint:
    """Single contact between two bodies.

    `normal` is unit length, pointing from the first body of `body_pair`
    into the second; `penetration_depth` >= 0 (0 for touch-within-tolerance).
    """

    x: float
    z: float
    nx: float
    nz: float
    penetration_depth: float
    body_pair: tuple[str, str]
    force: float = 0.0  # filled in by the simulator (N, along normal)

    def __post_init__(self):
        n = math.hypot(self.nx, self.nz)
        if abs(n - 1.0) > 1e-9:
            raise ValidationError(f"contact normal not unit length: {n}")
        if self.penetration_depth < 0.0:
            raise ValidationError("penetration depth must be >= 0")

    def flipped(self) -> "ContactPoint":
        return ContactPoint(
            self.x, self.z, -self.nx, -self.nz, self.penetration_depth,
            (self.body_pair[1], self.body_pair[0]), self.force,
        )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def transform_apply(t: Transform2, poly: Polygon2) -> Polygon2:
    """Rigid motion of a polygon (area preserved)."""
    c, si = math.cos(t.rotation), math.sin(t.rotation)
    return Polygon2._unchecked(
        (c * x - si * z + t.x, si * x + c * z + t.z) for x, z in poly.vertices)


def friction_cone(nx: float, nz: float, mu: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Edges of the planar friction cone at +/- atan(mu) around the normal.

    mu = 0 collapses both edges onto the normal.
    """
    if mu < 0.0:
        raise ValidationError("friction coefficient must be >= 0")
    n = math.hypot(nx, nz)
    if abs(n - 1.0) > 1e-9:
        raise ValidationError("normal must be unit length")
    half = math.atan(mu)
    c, s = math.cos(half), math.sin(half)
    e1 = (c * nx - s * nz, s * nx + c * nz)
    e2 = (c * nx + s * nz, -s * nx + c * nz)
    return e1, e2


def polygon_segment_contact(poly: Polygon2, seg: Segment2, tol: float = 1e-4) -> list[ContactPoint]:
    """Contacts between a polygon and a segment within tolerance `tol`.

    Returns at most one contact per connected penetrating interval of the
    segment (plus a touch contact if the closest approach is within tol).
    Normals point from the segment into the polygon; ordering is by the
    segment parameter, so output is deterministic.
    """
    if tol <= 0.0:
        raise ValidationError("tol must be > 0")
    # Cheap overlap rejection before the exact tests.
    px0, pz0, px1, pz1 = poly.bounds()
    sx0, sx1 = (seg.ax, seg.bx) if seg.ax <= seg.bx else (seg.bx, seg.ax)
    sz0, sz1 = (seg.az, seg.bz) if seg.az <= seg.bz else (seg.bz, seg.az)
    if sx1 < px0 - tol or sx0 > px1 + tol or sz1 < pz0 - tol or sz0 > pz1 + tol:
        return []
    intervals = _inside_intervals(poly, seg)
    contacts: list[ContactPoint] = []
    for t0, t1 in intervals:
        px, pz, nx, nz, depth = _penetration_contact(poly, seg, t0, t1)
        x0, z0 = seg.point_at(t0)
        x1, z1 = seg.point_at(t1)
        span = math.hypot(x1 - x0, z1 - z0)
        if span <= 0.0012:
            contacts.append(ContactPoint(px, pz, nx, nz, depth, ("segment", "polygon")))
        else:
            # Line contact: report both patch ends so force can distribute
            # anywhere along it (the patch wrench set is their convex hull).
            # Depth per end is measured behind the contact edge line, which
            # stays honest for deep transversal slices.
            for t in (t0 + 0.08 * (t1 - t0), t1 - 0.08 * (t1 - t0)):
                ex_, ez_ = seg.point_at(t)
                d = max(0.0, depth + (ex_ - px) * nx + (ez_ - pz) * nz)
                contacts.append(ContactPoint(ex_, ez_, nx, nz, d, ("segment", "polygon")))
    if not contacts:
        # Proximity contact: closest approach within tol counts as touching.
        t, d = _closest_approach(poly, seg)
        if d <= tol:
            px, pz = seg.point_at(t)
            nx, nz = _inward_normal_at(poly, px, pz)
            contacts.append(ContactPoint(px, pz, nx, nz, 0.0, ("segment", "polygon")))
    contacts.sort(key=lambda c: (c.x, c.z))
    return contacts


def _penetration_contact(poly: Polygon2, seg: Segment2, t0: float, t1: float):
    """Contact point, normal and depth for one penetrating chord.

    The normal is the polygon edge direction needing the smallest translation
    of the whole segment to separate the bodies; measuring against the whole
    segment (not just the chord) keeps a jaw slicing transversally through a
    thin part pressing sideways instead of flipping to a vertical normal.
    """
    params = (t0, 0.75 * t0 + 0.25 * t1, 0.5 * (t0 + t1), 0.25 * t0 + 0.75 * t1, t1)
    probes = [seg.point_at(t) for t in params]
    deep_i = 0
    deep_d = -1.0
    for i, (px, pz) in enumerate(probes):
        d = poly.boundary_distance(px, pz)
        if d > deep_d:
            deep_d = d
            deep_i = i
    px, pz = probes[deep_i]

    # Fast path: shallow contact relative to the chord span stays with the
    # nearest edge; deep or transversal chords get the directional test.
    chord = math.hypot(seg.point_at(t1)[0] - seg.point_at(t0)[0],
                       seg.point_at(t1)[1] - seg.point_at(t0)[1])
    if deep_d <= max(0.35 * chord, 1e-6):
        nx, nz = _inward_normal_at(poly, px, pz)
        return px, pz, nx, nz, deep_d

    samples = probes + [(seg.ax, seg.az), (seg.bx, seg.bz)]
    best_n = None
    best_sep = math.inf
    for (e0, e1) in poly.edges():
        ex, ez = e1[0] - e0[0], e1[1] - e0[1]
        L = math.hypot(ex, ez)
        n = (-ez / L, ex / L)  # inward for CCW
        sep = 0.0
        for s in samples:
            sep = max(sep, _last_crossing(poly, s, (-n[0], -n[1])))
            if sep >= best_sep:
                break
        if 0.0 < sep < best_sep:
            best_sep = sep
            best_n = n
    if best_n is None:
        nx, nz = _inward_normal_at(poly, px, pz)
        return px, pz, nx, nz, deep_d
    depth = min(deep_d, best_sep)
    return px, pz, best_n[0], best_n[1], depth


def _last_crossing(poly: Polygon2, point: tuple[float, float], direction: tuple[float, float]) -> float:
    """Largest ray parameter at which `point + t*direction` still meets the
    polygon boundary (0 when the ray never hits it)."""
    px, pz = point
    dx, dz = direction
    t_max = 0.0
    for (x0, z0), (x1, z1) in poly.edges():
        ex, ez = x1 - x0, z1 - z0
        denom = dx * ez - dz * ex
        if abs(denom) < 1e-18:
            continue
        t = ((x0 - px) * ez - (z0 - pz) * ex) / denom
        u = ((x0 - px) * dz - (z0 - pz) * dx) / denom
        if t > 0.0 and -1e-12 <= u <= 1.0 + 1e-12:
            t_max = max(t_max, t)
    return t_max


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------

def _point_segment_distance(px, pz, x0, z0, x1, z1) -> float:
    dx, dz = x1 - x0, z1 - z0
    L2 = dx * dx + dz * dz
    if L2 == 0.0:
        return math.hypot(px - x0, pz - z0)
    t = ((px - x0) * dx + (pz - z0) * dz) / L2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(px - (x0 + t * dx), pz - (z0 + t * dz))


def _self_intersects(verts) -> bool:
    n = len(verts)
    for i in range(n):
        a0, a1 = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b0, b1 = verts[j], verts[(j + 1) % n]
            if _segments_cross(a0, a1, b0, b1):
                return True
    return False


def _segments_cross(a0, a1, b0, b1) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1 = orient(a0, a1, b0)
    d2 = orient(a0, a1, b1)
    d3 = orient(b0, b1, a0)
    d4 = orient(b0, b1, a1)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _inside_intervals(poly: Polygon2, seg: Segment2) -> list[tuple[float, float]]:
    """Connected parameter intervals of the segment inside the polygon."""
    ts = [0.0, 1.0]
    dx, dz = seg.bx - seg.ax, seg.bz - seg.az
    for (x0, z0), (x1, z1) in poly.edges():
        ex, ez = x1 - x0, z1 - z0
        denom = dx * ez - dz * ex
        if abs(denom) < 1e-18:
            continue
        t = ((x0 - seg.ax) * ez - (z0 - seg.az) * ex) / denom
        u = ((x0 - seg.ax) * dz - (z0 - seg.az) * dx) / denom
        if -1e-12 <= t <= 1.0 + 1e-12 and -1e-12 <= u <= 1.0 + 1e-12:
            ts.append(min(1.0, max(0.0, t)))
    ts = sorted(set(ts))
    intervals: list[tuple[float, float]] = []
    for i in range(len(ts) - 1):
        t0, t1 = ts[i], ts[i + 1]
        if t1 - t0 < 1e-12:
            continue
        mx, mz = seg.point_at(0.5 * (t0 + t1))
        if poly.contains(mx, mz):
            if intervals and abs(intervals[-1][1] - t0) < 1e-12:
                intervals[-1] = (intervals[-1][0], t1)
            else:
                intervals.append((t0, t1))
    return intervals


def _closest_approach(poly: Polygon2, seg: Segment2) -> tuple[float, float]:
    """(segment parameter, distance) of the closest approach to the boundary."""
    best_t, best_d = 0.0, math.inf
    # Candidates: segment endpoints against edges, polygon vertices against segment.
    for t in (0.0, 1.0):
        px, pz = seg.point_at(t)
        d = poly.boundary_distance(px, pz)
        if d < best_d:
            best_t, best_d = t, d
    dx, dz = seg.bx - seg.ax, seg.bz - seg.az
    L2 = dx * dx + dz * dz
    for vx, vz in poly.vertices:
        t = ((vx - seg.ax) * dx + (vz - seg.az) * dz) / L2
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        px, pz = seg.point_at(t)
        d = math.hypot(px - vx, pz - vz)
        if d < best_d:
            best_t, best_d = t, d
    return best_t, best_d


def _inward_normal_at(poly: Polygon2, px: float, pz: float) -> tuple[float, float]:
    """Inward normal of the polygon edge nearest to the point."""
    best_d = math.inf
    best = (0.0, 1.0)
    for (x0, z0), (x1, z1) in poly.edges():
        d = _point_segment_distance(px, pz, x0, z0, x1, z1)
        if d < best_d:
            best_d = d
            ex, ez = x1 - x0, z1 - z0
            L = math.hypot(ex, ez)
            # CCW polygon: inward normal is the left normal of the edge.
            best = (-ez / L, ex / L)
    return best
