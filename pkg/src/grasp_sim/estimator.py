"""Grasp pose estimation: geometric oracle, noise wrapper, external file input.

The oracle stands in for a vision model: it reads the placed cross-section
directly and proposes a top grasp at the centroid with the horizontal extent
plus clearance as the width. The noisy wrapper perturbs that output with
seeded Gaussians to emulate estimator error; the file interface accepts
poses produced elsewhere.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .controller import GraspPose
from .geometry import Transform2, ValidationError
from .sim import ObjectModel, object_polygon

MM = 1e-3
POSES_FORMAT = 1


@dataclass(frozen=True)
class EstimatorConfig:
    clearance: float = 0.010           # m added to the object extent
    noise_sigma_center: float = 0.0    # m
    noise_sigma_width: float = 0.0     # m
    noise_sigma_angle: float = 0.0     # rad
    seed: int = 0
    max_aperture: float = 0.215        # widest hand build on offer

    def __post_init__(self):
        if self.clearance < 0.0:
            raise ValidationError("clearance must be >= 0")
        if min(self.noise_sigma_center, self.noise_sigma_width, self.noise_sigma_angle) < 0.0:
            raise ValidationError("noise sigmas must be >= 0")


def oracle_estimate(obj: ObjectModel, pose: Transform2, config: EstimatorConfig) -> GraspPose:
    """Exact antipodal top-grasp proposal from the placed cross-section."""
    poly = object_polygon(obj, pose)
    x0, _, x1, _ = poly.bounds()
    extent = x1 - x0
    cx, _ = poly.centroid()
    if extent > config.max_aperture - 1e-9:
        return GraspPose(center=(cx, 0.0), width=min(extent, config.max_aperture),
                         quality=0.0)
    width = min(extent + config.clearance, config.max_aperture)
    return GraspPose(center=(cx, 0.0), width=width, quality=1.0)


def noisy_estimate(
    obj: ObjectModel,
    pose: Transform2,
    config: EstimatorConfig,
    seed: int | None = None,
) -> GraspPose:
    """Oracle output perturbed by seeded Gaussian noise; deterministic per seed."""
    base = oracle_estimate(obj, pose, config)
    if base.quality <= 0.0:
        return base
    rng = random.Random(f"estimate:{config.seed if seed is None else seed}")
    dc = rng.gauss(0.0, config.noise_sigma_center) if config.noise_sigma_center > 0 else 0.0
    dw = rng.gauss(0.0, config.noise_sigma_width) if config.noise_sigma_width > 0 else 0.0
    da = rng.gauss(0.0, config.noise_sigma_angle) if config.noise_sigma_angle > 0 else 0.0
    poly = object_polygon(obj, pose)
    x0, _, x1, _ = poly.bounds()
    extent = x1 - x0
    width = min(max(base.width + dw, extent + 0.0005), config.max_aperture)
    return GraspPose(
        center=(base.center[0] + dc, base.center[1]),
        width=width,
        angle=base.angle + da,
        quality=base.quality,
    )


# ---------------------------------------------------------------------------
# External pose files
# ---------------------------------------------------------------------------

def load_external_poses(path: str | Path) -> list[GraspPose]:
    """Parse an external estimator's output; best quality first, stable order."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    if data.get("format") != POSES_FORMAT:
        raise ValidationError(
            f"{path}: unsupported pose file format {data.get('format')!r} (expected {POSES_FORMAT})")
    poses = []
    for i, item in enumerate(data.get("poses", [])):
        try:
            cx, cz = item["center_mm"]
            poses.append(GraspPose(
                center=(float(cx) * MM, float(cz) * MM),
                width=float(item["width_mm"]) * MM,
                angle=float(item.get("angle_deg", 0.0)) * 3.141592653589793 / 180.0,
                quality=float(item.get("quality", 1.0)),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: pose {i}: bad or missing field ({exc})") from exc
    order = sorted(range(len(poses)), key=lambda i: -poses[i].quality)
    return [poses[i] for i in order]


def save_external_poses(path: str | Path, poses: list[GraspPose]) -> None:
    data = {
        "format": POSES_FORMAT,
        "poses": [
            {
                "center_mm": [p.center[0] / MM, p.center[1] / MM],
                "width_mm": p.width / MM,
                "angle_deg": p.angle * 180.0 / 3.141592653589793,
                "quality": p.quality,
            }
            for p in poses
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
