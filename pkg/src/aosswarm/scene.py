"""Procedural occluded-target scene.

The world is a flat rectangle of ground observed from a fixed flight
altitude. Occluders are horizontal semi-opaque disks ("crowns") floating at
a single canopy height; the target is a small grid of ground points (a
person-sized footprint). This is the cheapest model that still produces
position-dependent, spatially correlated occlusion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .rng import RngStream
from .swarm import Vec2, as_vec2

SCENE_SCHEMA_VERSION = 1


@dataclass
class Scene:
    """Immutable world description; safe to share across runs and threads.

    occluders is a (K, 4) array of rows [x, y, radius, opacity].
    footprint is a (P, 2) array of ground points belonging to the target.
    """

    extent: Tuple[float, float] = (100.0, 100.0)
    occluders: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    target_center: Vec2 = field(default_factory=lambda: np.array([50.0, 50.0]))
    footprint: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    altitude: float = 30.0
    canopy_height: float = 15.0

    def __post_init__(self):
        self.occluders = np.asarray(self.occluders, float).reshape(-1, 4)
        self.footprint = np.asarray(self.footprint, float).reshape(-1, 2)
        self.target_center = as_vec2(self.target_center)
        w, h = self.extent
        if w <= 0 or h <= 0:
            raise ValueError("scene extent must be positive in both directions")
        if len(self.occluders) and np.any(self.occluders[:, 2] <= 0):
            raise ValueError("occluder radii must be positive")
        if len(self.footprint) == 0:
            raise ValueError("target footprint must contain at least one point")
        if np.any(self.footprint < 0) or np.any(self.footprint > [w, h]):
            raise ValueError("target footprint must lie inside the scene extent")
        if self.altitude <= 0:
            raise ValueError("flight altitude must be positive")
        if not 0 < self.canopy_height < self.altitude:
            raise ValueError("canopy height must lie strictly between ground and altitude")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCENE_SCHEMA_VERSION,
            "extent": [float(v) for v in self.extent],
            "occluders": [[float(v) for v in row] for row in self.occluders],
            "target_center": [float(v) for v in self.target_center],
            "footprint": [[float(v) for v in row] for row in self.footprint],
            "altitude": float(self.altitude),
            "canopy_height": float(self.canopy_height),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        occ = np.asarray(data["occluders"], float).reshape(-1, 4)
        return cls(
            extent=tuple(data["extent"]),
            occluders=occ,
            target_center=np.asarray(data["target_center"], float),
            footprint=np.asarray(data["footprint"], float).reshape(-1, 2),
            altitude=float(data["altitude"]),
            canopy_height=float(data["canopy_height"]),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def target_footprint(center, size=(0.5, 2.0), grid=(5, 5)) -> np.ndarray:
    """Axis-aligned grid of ground points covering a person-sized rectangle."""
    center = as_vec2(center)
    xs = np.linspace(-size[0] / 2, size[0] / 2, grid[0])
    ys = np.linspace(-size[1] / 2, size[1] / 2, grid[1])
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return center + np.column_stack([gx.ravel(), gy.ravel()])


def generate_forest(
    seed: int,
    density: float = 300.0,
    extent: Tuple[float, float] = (100.0, 100.0),
    *,
    radius_range: Tuple[float, float] = (1.5, 3.5),
    opacity_range: Tuple[float, float] = (0.3, 1.0),
    canopy_height: float = 15.0,
    altitude: float = 30.0,
    swarm_start=(10.0, 50.0),
    target_distance: float = 50.0,
    target_bearing_range: Tuple[float, float] = (-np.pi / 6, np.pi / 6),
    footprint_size: Tuple[float, float] = (0.5, 2.0),
    footprint_grid: Tuple[int, int] = (5, 5),
) -> Scene:
    """Build a random forest scene reproducibly from a seed.

    density is in trees per hectare; the crown count is exact for the given
    extent. The target is placed at the given fixed distance from the swarm
    start, along a bearing drawn from the seed, so different seeds give
    different initializations of forest and target alike.
    """
    if density < 0:
        raise ValueError("tree density must be non-negative")
    w, h = extent
    start = as_vec2(swarm_start)
    count = int(round(density * (w * h) / 1e4))

    stream = RngStream(seed)
    occ_rng = stream.split("occluders")
    centers_x = occ_rng.uniform(0.0, w, size=count)
    centers_y = occ_rng.uniform(0.0, h, size=count)
    radii = occ_rng.uniform(radius_range[0], radius_range[1], size=count)
    opacities = occ_rng.uniform(opacity_range[0], opacity_range[1], size=count)
    occluders = np.column_stack([centers_x, centers_y, radii, opacities])

    bearing = stream.split("target").uniform(*target_bearing_range)
    target_center = start + target_distance * np.array([np.cos(bearing), np.sin(bearing)])

    return Scene(
        extent=(float(w), float(h)),
        occluders=occluders,
        target_center=target_center,
        footprint=target_footprint(target_center, footprint_size, footprint_grid),
        altitude=altitude,
        canopy_height=canopy_height,
    )
