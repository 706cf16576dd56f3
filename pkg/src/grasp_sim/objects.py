"""Object suite: planar cross-sections of the benchmark items.

Each entry is a polygon cross-section (mm in the file, metres in memory)
resting on the table with its horizontal extent centred on x = 0. The
bundled suite mixes published dimensions for the small calibration items
(coin, clip, washer, toothpick) with estimated-typical dimensions for the
rest; `dims_source` records which. `autonomous` marks the ten-object subset
used by the vision-pipeline experiments; `variants` holds alternative
resting placements cycled across autonomous trials.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .geometry import Polygon2, ValidationError
from .sim import ObjectModel

MM = 1e-3
SUITE_FORMAT = 1


@dataclass(frozen=True)
class SuiteEntry:
    """One catalogued object plus its experiment metadata."""

    index: int
    model: ObjectModel
    dims_source: str = "estimated"
    autonomous: bool = False
    variants: tuple[Polygon2, ...] = ()
    note: str = ""

    def variant_model(self, k: int) -> ObjectModel:
        """Cycle the object's placements: variant 0 is the base cross-section."""
        shapes = (self.model.cross_section, *self.variants)
        poly = shapes[k % len(shapes)]
        return ObjectModel(self.model.name, poly, self.model.mass,
                           self.model.mu_table, self.model.mu_finger)


def _box(w: float, h: float) -> list[list[float]]:
    return [[-w / 2, 0.0], [w / 2, 0.0], [w / 2, h], [-w / 2, h]]


def _octagon(w: float, h: float, cut: float = 0.25) -> list[list[float]]:
    cw, ch = cut * w, cut * h
    return [
        [-w / 2 + cw, 0.0], [w / 2 - cw, 0.0], [w / 2, ch], [w / 2, h - ch],
        [w / 2 - cw, h], [-w / 2 + cw, h], [-w / 2, h - ch], [-w / 2, ch],
    ]


def _disc(d: float, n: int = 12) -> list[list[float]]:
    # Flat edge at the bottom so the shape rests stably.
    r = d / 2.0
    start = -math.pi / 2 + math.pi / n
    return [[r * math.cos(start + 2 * math.pi * k / n),
             r + r * math.sin(start + 2 * math.pi * k / n)] for k in range(n)]


def _tub(w: float, h: float, wall: float, base_w: float | None = None) -> list[list[float]]:
    """Open container with outward-sloping walls (bowl / mug profile)."""
    bw = base_w if base_w is not None else w - 2 * wall
    hw, hb = w / 2, bw / 2
    return [
        [-hb, 0.0], [hb, 0.0], [hw, h], [hw - wall, h],
        [hb - wall, wall * 1.5], [-hb + wall, wall * 1.5], [-hw + wall, h], [-hw, h],
    ]


# (index, name, vertices_mm, mass_g, dims_source, autonomous, note, variants)
_CATALOG = [
    (1, "coin", _box(20, 1.5), 5, "published", False, "20 x 1.5 mm disc, flat on the table", []),
    (2, "clip", _box(8, 0.7), 1, "published", False, "0.7 mm wire clip, 27 mm long, lying flat", []),
    (3, "washer", _box(10, 1.2), 3, "published", False, "10 x 1.2 mm washer, flat", []),
    (4, "toothpick", _box(2, 2), 1, "published", False, "2 mm diameter, lying across the grasp plane", []),
    (5, "screw", _box(9, 8), 10, "estimated", False, "M5-ish screw lying on its side", []),
    (6, "banana", _octagon(36, 36), 120, "estimated", True, "mid-body cross-section", []),
    (7, "scissors", [[-18, 0], [18, 0], [18, 9], [15, 17], [-15, 17], [-18, 9]], 80,
     "estimated", True, "closed scissors, grasp across the handle loops",
     [[[-14, 0], [14, 0], [14, 9], [11, 17], [-11, 17], [-14, 9]]]),
    (8, "mug", _octagon(80, 75, 0.12), 350, "estimated", False, "section through the handle plane", []),
    (9, "soup_can", _octagon(66, 101, 0.12), 350, "estimated", True, "standing cylinder",
     [_octagon(52, 120, 0.12)]),
    (10, "spoon", _box(25, 10), 30, "estimated", False, "bowl-end cross-section", []),
    (11, "marker", _octagon(18, 18), 20, "estimated", True, "grasp across the barrel",
     [_octagon(22, 16)]),
    (12, "bowl", _tub(104, 48, 20, 88), 420, "estimated", False, "thick-walled ceramic bowl", []),
    (13, "hammer", _box(25, 25), 450, "estimated", True, "handle cross-section",
     [_box(30, 22)]),
    (14, "chips_can", _box(75, 240), 200, "estimated", False, "tall cardboard cylinder", []),
    (15, "toy_drill", _octagon(55, 55, 0.2), 300, "estimated", True, "body cross-section",
     [_octagon(48, 60, 0.2)]),
    (16, "power_drill", _octagon(60, 65, 0.2), 600, "published", False, "600 g drill, body grasp", []),
    (17, "pitcher", _octagon(86, 150, 0.15), 450, "estimated", False, "tall pitcher, body grasp", []),
    (18, "master_chef_can", _box(94, 135), 400, "estimated", False, "large can", []),
    (19, "tennis_ball", _disc(65), 58, "estimated", True, "felt ball",
     [_disc(62)]),
    (20, "strawberry", _octagon(42, 42), 50, "estimated", True, "plastic fruit",
     [_octagon(38, 45)]),
    (21, "toy_airplane", _octagon(60, 75, 0.2), 300, "estimated", False, "fuselage grasp", []),
    (22, "cup", _octagon(70, 75, 0.15), 140, "estimated", False, "cup, body grasp", []),
    (23, "mustard_bottle", _box(58, 190), 600, "published", True, "600 g bottle, body grasp",
     [_box(52, 200)]),
    (24, "spray_bottle", _box(45, 240), 280, "estimated", True, "tall spray bottle",
     [_box(40, 245)]),
    (25, "coffee_can", _box(78, 112), 350, "estimated", False, "medium can", []),
]

DEFAULT_MU_TABLE = 0.4
DEFAULT_MU_FINGER = 0.6


def builtin_suite_dict() -> dict:
    """The bundled suite in its file-schema form."""
    objects = []
    for idx, name, verts, mass_g, source, auto, note, variants in _CATALOG:
        objects.append({
            "index": idx,
            "name": name,
            "vertices_mm": [[round(x, 4), round(z, 4)] for x, z in verts],
            "mass_g": mass_g,
            "mu_table": DEFAULT_MU_TABLE,
            "mu_finger": DEFAULT_MU_FINGER,
            "dims_source": source,
            "autonomous": auto,
            "note": note,
            "variants_mm": [[[round(x, 4), round(z, 4)] for x, z in v] for v in variants],
        })
    return {"format": SUITE_FORMAT, "objects": objects}


def suite_from_dict(data: dict) -> list[SuiteEntry]:
    if data.get("format") != SUITE_FORMAT:
        raise ValidationError(
            f"unsupported object suite format: {data.get('format')!r} (expected {SUITE_FORMAT})")
    entries = []
    for i, item in enumerate(data.get("objects", [])):
        try:
            poly = Polygon2(tuple((x * MM, z * MM) for x, z in item["vertices_mm"]))
            model = ObjectModel(
                name=str(item["name"]),
                cross_section=poly,
                mass=float(item["mass_g"]) * 1e-3,
                mu_table=float(item.get("mu_table", DEFAULT_MU_TABLE)),
                mu_finger=float(item.get("mu_finger", DEFAULT_MU_FINGER)),
            )
            variants = tuple(
                Polygon2(tuple((x * MM, z * MM) for x, z in v))
                for v in item.get("variants_mm", []))
            entries.append(SuiteEntry(
                index=int(item.get("index", i + 1)),
                model=model,
                dims_source=str(item.get("dims_source", "estimated")),
                autonomous=bool(item.get("autonomous", False)),
                variants=variants,
                note=str(item.get("note", "")),
            ))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"object entry {i}: {exc}") from exc
    if not entries:
        raise ValidationError("object suite is empty")
    return entries


def load_suite(path: str | Path | None = None) -> list[SuiteEntry]:
    """Load a suite file, or the bundled 25-object suite when no path given."""
    if path is None:
        ref = resources.files("grasp_sim").joinpath("data/objects_v1.json")
        data = json.loads(ref.read_text(encoding="utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    return suite_from_dict(data)


def suite_by_name(entries: list[SuiteEntry]) -> dict[str, SuiteEntry]:
    return {e.model.name: e for e in entries}


def write_builtin_suite(path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(builtin_suite_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
