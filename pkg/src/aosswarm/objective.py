"""Visibility objective over the occluded scene.

A sample is one aerial capture: per target-footprint-point transmittance
along the viewing ray plus an obliqueness score. Samples fuse like
independent looks -- a footprint point is seen if any sample sees it -- and
the fused score is weighted by how obliquely the target is viewed on
average. The sample history keeps old captures only while they still improve
the fused visibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .scene import Scene
from .swarm import Vec2, as_vec2


@dataclass
class SampleImage:
    """One aerial capture reduced to what the objective needs.

    mask holds per-footprint-point transmittance in [0, 1] (1 = clear line of
    sight); obliqueness is sin of the viewing angle from vertical, in [0, 1].
    """

    capture_position: Vec2
    mask: np.ndarray
    obliqueness: float


def capture_sample(scene: Scene, position) -> SampleImage:
    """Ray-cast one capture from the flight altitude above `position`.

    Each footprint point is connected to the camera by a 3D segment; every
    crown disk whose plane crossing lies within its radius multiplies the
    point's transmittance by (1 - opacity).
    """
    pos = as_vec2(position)
    # Fraction along the (camera -> ground point) segment where it crosses
    # the canopy plane; strictly inside (0, 1) by the Scene invariants.
    s = 1.0 - scene.canopy_height / scene.altitude
    crossings = pos + s * (scene.footprint - pos)  # (P, 2)

    mask = np.ones(len(scene.footprint))
    if len(scene.occluders):
        centers = scene.occluders[:, :2]
        radii = scene.occluders[:, 2]
        opacities = scene.occluders[:, 3]
        d2 = ((crossings[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)  # (P, K)
        blocked = d2 <= radii[None, :] ** 2
        mask = np.where(blocked, 1.0 - opacities[None, :], 1.0).prod(axis=1)

    horizontal = float(np.linalg.norm(pos - scene.target_center))
    obliqueness = horizontal / np.hypot(horizontal, scene.altitude)
    return SampleImage(pos, mask, float(np.clip(obliqueness, 0.0, 1.0)))


def integral_visibility(samples: Sequence[SampleImage]) -> float:
    """Fused target visibility of a sample set, in [0, 1].

    Per footprint point the samples combine as 1 - prod(1 - transmittance);
    the mean over points is weighted by the mean obliqueness weight
    (1 + obliqueness) / 2, so visibility stays the dominant term while
    obliquer viewing scores somewhat higher.
    """
    if not samples:
        return 0.0
    masks = np.stack([s.mask for s in samples])
    combined = 1.0 - np.prod(1.0 - masks, axis=0)
    weight = float(np.mean([(1.0 + s.obliqueness) / 2.0 for s in samples]))
    return float(combined.mean() * weight)


@dataclass
class SampleHistory:
    """Retained captures; stands in for the integral image's sample set."""

    retained: List[SampleImage] = field(default_factory=list)
    capacity: int = 10

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("history capacity must be a positive integer")
        if len(self.retained) > self.capacity:
            raise ValueError("retained samples exceed history capacity")


def update_history(history: SampleHistory, new: Sequence[SampleImage]) -> SampleHistory:
    """Fold the current captures into the history, improve-only.

    The current time step is always included. Old samples are then greedily
    re-admitted in descending mask-mean order (ties keep their list order,
    i.e. older first) while each admission strictly increases the fused
    visibility and the capacity allows it.
    """
    retained = list(new)[: history.capacity]
    best = integral_visibility(retained)
    order = sorted(range(len(history.retained)),
                   key=lambda k: -float(history.retained[k].mask.mean()))
    for k in order:
        if len(retained) >= history.capacity:
            break
        candidate = history.retained[k]
        trial = integral_visibility(retained + [candidate])
        if trial > best:
            retained.append(candidate)
            best = trial
    return SampleHistory(retained, history.capacity)


def evaluate(position, history: SampleHistory, scene: Scene) -> float:
    """Objective value at a position given the retained samples.

    The score is the fused visibility of the history extended by a fresh
    capture at the position, so it depends on the whole swarm's past, not
    just the point itself.
    """
    sample = capture_sample(scene, position)
    return integral_visibility(list(history.retained) + [sample])
