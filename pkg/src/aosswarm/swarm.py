"""Classic particle-swarm building blocks.

Positions and velocities are 2D vectors in the horizontal search plane
(meters). All update functions are pure: they return new vectors and never
mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

Vec2 = np.ndarray  # shape (2,), float64


def vec2(x: float, y: float) -> Vec2:
    return np.array([float(x), float(y)])


def as_vec2(value) -> Vec2:
    """Coerce to a finite 2D float vector, rejecting NaN/Inf and bad shapes."""
    arr = np.asarray(value, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


@dataclass
class PsoParams:
    """Hyperparameters of the classic swarm updates.

    omega, c_c, c_s drive the inertia/cognitive/social velocity terms;
    m sharpens spherical sampling toward the attractor; charge and d_max
    control the inter-particle repulsion term.
    """

    omega: float = 1.0
    c_c: float = 2.0
    c_s: float = 2.0
    m: int = 3
    charge: float = 1.0
    d_max: float = 10.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("sharpness exponent m must be a positive integer")
        if self.d_max <= 0:
            raise ValueError("repulsion cutoff d_max must be positive")
        if self.charge < 0:
            raise ValueError("particle charge must be non-negative")


@dataclass
class Particle:
    """One candidate solution: a drone position plus its motion state.

    personal_best is only maintained by the memory-based reference
    optimizers; the swarm-search stepper never populates it.
    """

    index: int
    position: Vec2
    velocity: Vec2
    personal_best: Optional[Vec2] = None
    personal_best_fitness: float = -np.inf


def pso_velocity_update(particle: Particle, global_best: Vec2, params: PsoParams, rng) -> Vec2:
    """Inertia + cognitive + social velocity update.

    Random factors are drawn per dimension, uniformly in [0, 1), so the two
    random forces span axis-aligned boxes toward the attractors.
    """
    if particle.personal_best is None:
        raise ValueError("particle has no personal best; cognitive term is undefined")
    if params.c_c < 0 or params.c_s < 0:
        raise ValueError("acceleration factors must be non-negative")
    r_c = rng.uniform(size=2)
    r_s = rng.uniform(size=2)
    return (
        params.omega * particle.velocity
        + params.c_c * r_c * (particle.personal_best - particle.position)
        + params.c_s * r_s * (global_best - particle.position)
    )


def pso_position_update(position: Vec2, velocity: Vec2) -> Vec2:
    return position + velocity


def sphere_sample(attractor: Vec2, current: Vec2, coefficient: float, m: int, rng) -> Vec2:
    """Rotation-invariant attraction toward a random point near the attractor.

    The point is drawn from the closed ball around the attractor whose radius
    equals the current distance to it; raising the radial draw to the power m
    compresses the samples toward the attractor itself. Returns the resulting
    displacement scaled by the coefficient.
    """
    if m < 1:
        raise ValueError("sharpness exponent m must be a positive integer")
    diff = np.asarray(attractor, float) - np.asarray(current, float)
    radius = float(np.linalg.norm(diff))
    if radius == 0.0:
        return np.zeros(2)
    r = rng.uniform()
    direction = rng.unit_vector()
    return coefficient * (r**m * radius * direction + diff)


def cpso_repulsion(particle: Particle, swarm: Sequence[Particle], params: PsoParams) -> Vec2:
    """Inverse-square repulsion from every swarm mate within the cutoff.

    Pairs at zero distance or at/above d_max contribute nothing, which guards
    the pole and bounds the range of influence.
    """
    force = np.zeros(2)
    for other in swarm:
        if other.index == particle.index:
            continue
        d = particle.position - other.position
        dist = float(np.linalg.norm(d))
        if 0.0 < dist < params.d_max:
            force += (params.charge**2 / dist**2) * (d / dist)
    return force
