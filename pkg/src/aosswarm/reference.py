"""Classic memory-based swarm optimizers, kept as a reference path.

These maximize a plain objective f(x) over a 2D box and exercise the pieces
the swarm-search stepper deliberately drops: personal bests, the inertia
term, inertia adaption, and worst-particle randomization. Supported flavors:
standard per-dimension randomization, spherical (rotation-invariant)
sampling, charged repulsion, and adaptive parameter control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from .adapt import (
    CONVERGENCE,
    EXPLORATION,
    MAPPING_CLASSIC,
    ApsoParams,
    adapt_inertia,
    apso_adapt_factors,
    classify_state,
    evolutionary_factor,
)
from .rng import SwarmRng
from .swarm import Particle, PsoParams, cpso_repulsion, pso_position_update, sphere_sample

SAMPLING_BOX = "box"
SAMPLING_SPHERE = "sphere"


@dataclass
class ReferenceResult:
    best_position: np.ndarray
    best_fitness: float
    fitness_trace: list = field(default_factory=list)
    randomized_steps: int = 0  # steps on which the worst particle was re-drawn


def maximize(
    objective: Callable[[np.ndarray], float],
    bounds: Tuple[Tuple[float, float], Tuple[float, float]],
    n_particles: int = 20,
    iterations: int = 100,
    seed: int = 0,
    params: PsoParams | None = None,
    sampling: str = SAMPLING_BOX,
    repulsion: bool = False,
    adaptive: bool = False,
    apso_params: ApsoParams | None = None,
) -> ReferenceResult:
    """Run a classic swarm maximization over an axis-aligned box.

    With adaptive=True the cognitive/social factors and the inertia weight
    are re-derived every iteration from the evolutionary state, and the worst
    particle is randomized whenever the state is convergence.
    """
    params = params or PsoParams()
    apso = apso_params or ApsoParams()
    if sampling not in (SAMPLING_BOX, SAMPLING_SPHERE):
        raise ValueError(f"unknown sampling flavor {sampling!r}")
    (x_lo, x_hi), (y_lo, y_hi) = bounds
    rng = SwarmRng(seed, n_particles)
    init = rng.root.split("init")

    swarm = []
    for i in range(n_particles):
        position = np.array([init.uniform(x_lo, x_hi), init.uniform(y_lo, y_hi)])
        particle = Particle(i, position, np.zeros(2))
        particle.personal_best = position.copy()
        particle.personal_best_fitness = float(objective(position))
        swarm.append(particle)

    best = max(swarm, key=lambda p: p.personal_best_fitness)
    result = ReferenceResult(best.personal_best.copy(), best.personal_best_fitness)
    omega, c_c, c_s = params.omega, params.c_c, params.c_s
    prev_state = EXPLORATION
    redraw = rng.root.split("redraw")

    for _ in range(iterations):
        fitnesses = np.array([float(objective(p.position)) for p in swarm])
        current_best = int(np.argmax(fitnesses))

        if adaptive:
            e_f = evolutionary_factor([p.position for p in swarm], current_best)
            state = classify_state(e_f, prev_state, MAPPING_CLASSIC)
            prev_state = state
            c_c, c_s = apso_adapt_factors(state, c_c, c_s, apso)
            omega = adapt_inertia(e_f)
            if state == CONVERGENCE:
                worst = int(np.argmin(fitnesses))
                swarm[worst].position = np.array(
                    [redraw.uniform(x_lo, x_hi), redraw.uniform(y_lo, y_hi)]
                )
                swarm[worst].velocity = np.zeros(2)
                result.randomized_steps += 1

        global_best = result.best_position
        step_params = PsoParams(
            omega=omega, c_c=c_c, c_s=c_s,
            m=params.m, charge=params.charge, d_max=params.d_max,
        )
        for i, particle in enumerate(swarm):
            stream = rng.particles[i]
            if sampling == SAMPLING_BOX:
                velocity = pso_velocity_update(particle, global_best, step_params, stream)
            else:
                velocity = (
                    omega * particle.velocity
                    + sphere_sample(particle.personal_best, particle.position, c_c, params.m, stream)
                    + sphere_sample(global_best, particle.position, c_s, params.m, stream)
                )
            if repulsion:
                velocity = velocity + cpso_repulsion(particle, swarm, step_params)
            particle.velocity = velocity
            particle.position = np.clip(
                pso_position_update(particle.position, velocity),
                [x_lo, y_lo], [x_hi, y_hi],
            )
            fitness = float(objective(particle.position))
            if fitness > particle.personal_best_fitness:
                particle.personal_best = particle.position.copy()
                particle.personal_best_fitness = fitness
                if fitness > result.best_fitness:
                    result.best_fitness = fitness
                    result.best_position = particle.position.copy()
        result.fitness_trace.append(result.best_fitness)

    return result
