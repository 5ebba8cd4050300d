"""The swarm-search update rule, end to end.

Each step captures samples at the current drone positions, folds them into
the sample history, and measures the best fused visibility. Below the
visibility threshold the swarm (re-)assembles on a scan line perpendicular
to the scanning direction and advances along it; above it, every drone gets
a random kick plus a unit pull toward the current leader, inverse-square
scattering enforces the minimal sample distance, and the scanning direction
is re-aimed at the leader. Adaptive variants additionally classify the
swarm's evolutionary state each leader-following step and adapt the social
and cognitive weights accordingly, resetting them whenever the target is
lost.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .adapt import (
    MAPPING_CLASSIC,
    MAPPING_NARROW,
    RESET_FRACTION,
    FIXED_FRAC_COGNITIVE,
    FIXED_FRAC_SOCIAL,
    AdaptionState,
    ApsoParams,
    aos_apso_adapt_fractions,
    apso_adapt_fractions,
    classify_state,
    evolutionary_factor,
    translate_fractions,
)
from .objective import SampleHistory, capture_sample, integral_visibility, update_history
from .rng import RngStream, SwarmRng
from .scene import Scene
from .swarm import Vec2, as_vec2

BY_INDEX = "by-index"
BY_PROJECTION = "by-projection"

BRANCH_DEFAULT = "default"
BRANCH_PSO = "pso"


@dataclass
class AosParams:
    """All knobs of the swarm-search stepper.

    c3 is the scan advance per step, c4 the line slot spacing and minimal
    sample distance, c5 the gain pulling particles onto their slots. c_s and
    c_c are the fixed social/cognitive weights of the non-adaptive variants;
    left unset they derive from c4 via the fixed fractional factors.
    """

    c3: float = 5.0
    c4: float = 5.0
    c5: float = 1.0
    c_s: Optional[float] = None
    c_c: Optional[float] = None
    visibility_threshold: float = 0.05
    n: int = 10
    scatter_iterations: int = 10
    scatter_gain: Optional[float] = None  # defaults to c4**2 / 4
    line_ordering: str = BY_PROJECTION
    leader_stabilized: bool = False
    gamma: float = 0.9  # deceleration factor of the multiplicative scheme
    delta: float = 0.1  # acceleration rate of the additive scheme
    drone_speed: float = 10.0  # m/s
    min_step_time: float = 0.01  # s, keeps the clock strictly increasing

    def __post_init__(self):
        if self.c4 <= 0:
            raise ValueError("line spacing c4 must be positive")
        if self.n < 2:
            raise ValueError("swarm size n must be at least 2")
        if self.scatter_iterations < 1:
            raise ValueError("scatter_iterations must be a positive integer")
        if not 0 < self.visibility_threshold < 1:
            raise ValueError("visibility threshold must lie in (0, 1)")
        if self.drone_speed <= 0:
            raise ValueError("drone speed must be positive")
        if self.min_step_time <= 0:
            raise ValueError("minimum step time must be positive")
        if self.line_ordering not in (BY_INDEX, BY_PROJECTION):
            raise ValueError(f"unknown line ordering {self.line_ordering!r}")
        if self.scatter_gain is None:
            self.scatter_gain = self.c4**2 / 4.0
        if self.c_s is None:
            self.c_s = self.c4 * FIXED_FRAC_SOCIAL
        if self.c_c is None:
            self.c_c = self.c_s * FIXED_FRAC_COGNITIVE
        if not self.c_s > self.c_c:
            raise ValueError("the social weight must exceed the cognitive weight")
        if self.c_s + self.c_c > self.c4:
            raise ValueError("social + cognitive weight must not exceed c4")


@dataclass(frozen=True)
class VariantSpec:
    """Which mechanisms a named strategy variant enables."""

    key: str
    leader_stabilized: bool
    adaptive: bool
    mapping: Optional[str] = None
    scheme: Optional[str] = None  # "decay" (multiplicative) or "rate" (additive)


VARIANTS = {
    "aos-pso": VariantSpec("aos-pso", False, False),
    "aos-pso-stabilized": VariantSpec("aos-pso-stabilized", True, False),
    "aos-apso-tuned": VariantSpec("aos-apso-tuned", True, True, MAPPING_NARROW, "decay"),
    "aos-apso-untuned": VariantSpec("aos-apso-untuned", True, True, MAPPING_CLASSIC, "rate"),
}


def resolve_variant(variant) -> VariantSpec:
    if isinstance(variant, VariantSpec):
        return variant
    try:
        return VARIANTS[variant]
    except KeyError:
        known = ", ".join(sorted(VARIANTS))
        raise ValueError(f"unknown variant {variant!r}; known variants: {known}") from None


@dataclass
class SwarmState:
    """The whole mutable state of one run, passed through the step loop."""

    positions: np.ndarray  # (n, 2)
    velocities: np.ndarray  # (n, 2)
    scan_direction: Vec2
    leader: Optional[int] = None
    adaption: Optional[AdaptionState] = None
    last_sighting: Optional[Vec2] = None
    sim_time: float = 0.0


@dataclass
class StepMetrics:
    """Everything recorded about one step."""

    sim_time: float  # clock when the samples were captured
    dt: float
    branch: str
    visibility: float
    e_f: float
    state: Optional[str]
    c_s_eff: float
    c_c_eff: float
    leader_index: int
    positions: np.ndarray
    frac_social: float
    frac_cognitive: float
    leader_scatter_displacement: float
    new_visibility: float
    history_visibility: float


def perpendicular(direction: Vec2) -> Vec2:
    """The direction rotated by +90 degrees (counterclockwise)."""
    return np.array([-direction[1], direction[0]])


def initial_swarm_state(params: AosParams, start, scan_direction, variant) -> SwarmState:
    """Swarm assembled on the scan line around the start position, at rest."""
    variant = resolve_variant(variant)
    sd = as_vec2(scan_direction)
    norm = np.linalg.norm(sd)
    if norm == 0:
        raise ValueError("scan direction must be a nonzero vector")
    sd = sd / norm
    w = perpendicular(sd)
    offsets = params.c4 * (np.arange(params.n) - (params.n - 1) / 2.0)
    positions = as_vec2(start) + offsets[:, None] * w
    adaption = None
    if variant.adaptive:
        adaption = AdaptionState(gamma=params.gamma, mapping=variant.mapping)
    return SwarmState(
        positions=positions,
        velocities=np.zeros_like(positions),
        scan_direction=sd,
        adaption=adaption,
    )


def default_line_positions(state: SwarmState, params: AosParams) -> np.ndarray:
    """Per-particle scan-line slot targets.

    Slots sit at spacing c4 along the perpendicular of the scanning
    direction, centered on the swarm centroid. By-index ordering sends
    particle i to slot i; by-projection ordering matches the slot order to
    the order of the particles' projections onto the line, which minimizes
    the projected travel and avoids path crossings.
    """
    n = len(state.positions)
    w = perpendicular(state.scan_direction)
    centroid = state.positions.mean(axis=0)
    offsets = params.c4 * (np.arange(n) - (n - 1) / 2.0)
    slots = centroid + offsets[:, None] * w
    if params.line_ordering == BY_INDEX:
        return slots
    projections = state.positions @ w
    order = np.argsort(projections, kind="stable")  # ties resolved by index
    targets = np.empty_like(slots)
    targets[order] = slots
    return targets


def default_update(state: SwarmState, params: AosParams) -> SwarmState:
    """Scan-line branch: advance along the scanning direction, pull onto slots.

    In adaptive runs the fractional factors are reset to their initial value,
    re-creating the start situation whenever the target is lost.
    """
    targets = default_line_positions(state, params)
    velocities = params.c3 * state.scan_direction + params.c5 * (targets - state.positions)
    adaption = state.adaption
    if adaption is not None:
        adaption = replace(adaption, frac_social=RESET_FRACTION, frac_cognitive=RESET_FRACTION)
    return replace(
        state,
        positions=state.positions + velocities,
        velocities=velocities,
        leader=None,
        adaption=adaption,
    )


def pso_like_update(
    state: SwarmState,
    params: AosParams,
    rng: SwarmRng,
    c_c: Optional[float] = None,
    c_s: Optional[float] = None,
) -> np.ndarray:
    """Velocity proposals for the leader-following branch.

    Every particle gets a random kick of length c_c; non-leaders add a unit
    pull of length c_s toward the leader. The leader chases nobody, so its
    social term vanishes and its speed is exactly c_c. A particle sitting
    exactly on the leader has no defined pull direction and keeps only the
    kick.
    """
    cc = params.c_c if c_c is None else c_c
    cs = params.c_s if c_s is None else c_s
    g = state.positions[state.leader]
    velocities = np.zeros_like(state.positions)
    for i in range(len(state.positions)):
        velocities[i] = cc * rng.particles[i].unit_vector()
        if i != state.leader:
            d = g - state.positions[i]
            dist = float(np.linalg.norm(d))
            if dist > 0.0:
                velocities[i] += cs * d / dist
    return velocities


def _min_pairwise_distance(positions: np.ndarray) -> float:
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    off = ~np.eye(len(positions), dtype=bool)
    return float(dist[off].min())


def _pair_direction(seed: int, i: int, j: int) -> np.ndarray:
    # Deterministic separation direction for a coincident pair, derived from
    # the run seed and the pair's indices so reruns reproduce it exactly.
    return RngStream(seed).split("scatter-pair", i, j).unit_vector()


def rutherford_scatter(
    positions,
    leader: Optional[int],
    params: AosParams,
    stabilized: Optional[bool] = None,
    pair_seed: int = 0,
    return_info: bool = False,
):
    """Iterated inverse-square repulsion enforcing the minimal sample distance.

    Forces are computed from the current positions and applied to all
    particles simultaneously; the loop then recomputes from the moved
    positions, up to scatter_iterations times, exiting early once every pair
    is at least c4 apart. There is no upper cutoff: every pair closer than c4
    repels. With leader stabilization the leader never moves and the force
    every other particle receives from it is doubled.

    Coincident pairs have no defined force direction; they are separated by
    c4/2 each along a deterministic direction derived from pair_seed.
    """
    pos = np.array(positions, dtype=float)
    n = len(pos)
    stab = params.leader_stabilized if stabilized is None else stabilized
    gain = params.scatter_gain
    iterations = 0
    converged = True
    if n >= 2:
        converged = False
        for _ in range(params.scatter_iterations):
            if _min_pairwise_distance(pos) >= params.c4:
                converged = True
                break
            diff = pos[:, None, :] - pos[None, :, :]
            dist = np.linalg.norm(diff, axis=-1)
            off = ~np.eye(n, dtype=bool)
            active = off & (dist > 0.0) & (dist < params.c4)
            with np.errstate(divide="ignore", invalid="ignore"):
                weight = np.where(active, gain / np.where(active, dist, 1.0) ** 3, 0.0)
            if stab and leader is not None:
                weight[:, leader] *= 2.0  # forces sourced from the leader double
            displacement = (weight[:, :, None] * diff).sum(axis=1)

            zero_i, zero_j = np.nonzero(off & (dist == 0.0))
            for i, j in zip(zero_i, zero_j):
                if i >= j:
                    continue
                direction = _pair_direction(pair_seed, int(i), int(j))
                push = params.c4 / 2.0
                displacement[i] += (2.0 if stab and j == leader else 1.0) * push * direction
                displacement[j] -= (2.0 if stab and i == leader else 1.0) * push * direction

            if stab and leader is not None:
                displacement[leader] = 0.0
            pos = pos + displacement
            iterations += 1
        else:
            converged = _min_pairwise_distance(pos) >= params.c4
    if return_info:
        return pos, iterations, converged
    return pos


def update_scan_direction(state: SwarmState) -> SwarmState:
    """Re-aim the scanning direction from the swarm centroid at the leader.

    The leader's position is remembered as the last sighting; if it coincides
    with the centroid the direction is left unchanged.
    """
    g = state.positions[state.leader].copy()
    d = g - state.positions.mean(axis=0)
    norm = float(np.linalg.norm(d))
    sd = state.scan_direction if norm == 0.0 else d / norm
    return replace(state, scan_direction=sd, last_sighting=g)


def _effective_weights(
    variant: VariantSpec, adaption: Optional[AdaptionState], params: AosParams
) -> Tuple[float, float]:
    if variant.adaptive:
        return translate_fractions(adaption, params.c4)
    return params.c_s, params.c_c


def step(
    state: SwarmState,
    scene: Scene,
    history: SampleHistory,
    params: AosParams,
    rng: SwarmRng,
    variant,
) -> Tuple[SwarmState, SampleHistory, StepMetrics]:
    """Advance the swarm by one full update.

    Captures at all current positions enter the history first; the branch is
    chosen by the best fused visibility over the current positions. The
    simulated clock advances by the largest velocity magnitude divided by the
    drone speed (drones fly in parallel; the slowest arrival bounds the
    step), floored at min_step_time so the clock always moves.
    """
    variant = resolve_variant(variant)
    capture_time = state.sim_time
    samples = [capture_sample(scene, p) for p in state.positions]
    new_visibility = integral_visibility(samples)
    history = update_history(history, samples)
    history_visibility = integral_visibility(history.retained)
    # evaluate() for each particle, reusing this step's deterministic captures
    scores = np.array(
        [integral_visibility(history.retained + [s]) for s in samples]
    )
    visibility = float(scores.max())

    if visibility < params.visibility_threshold:
        new_state = default_update(state, params)
        c_s_eff, c_c_eff = _effective_weights(variant, new_state.adaption, params)
        e_f = float("nan")
        state_label = None
        leader_index = -1
        leader_displacement = 0.0
    else:
        leader = int(np.argmax(scores))
        e_f = evolutionary_factor(state.positions, leader)
        adaption = state.adaption
        state_label = None
        if variant.adaptive:
            state_label = classify_state(e_f, adaption.prev_state, adaption.mapping)
            if variant.scheme == "decay":
                adaption = aos_apso_adapt_fractions(state_label, adaption)
            else:
                adaption = apso_adapt_fractions(
                    state_label, adaption, ApsoParams(delta=params.delta)
                )
            c_s_eff, c_c_eff = translate_fractions(adaption, params.c4)
        else:
            c_s_eff, c_c_eff = params.c_s, params.c_c
        if not (c_s_eff > c_c_eff and c_s_eff + c_c_eff <= params.c4):
            raise RuntimeError(
                f"effective weights violate the swarm constraints: "
                f"c_s={c_s_eff}, c_c={c_c_eff}, c4={params.c4}"
            )
        moved = replace(state, leader=leader, adaption=adaption)
        velocities = pso_like_update(moved, params, rng, c_c=c_c_eff, c_s=c_s_eff)
        proposed = state.positions + velocities
        scattered = rutherford_scatter(
            proposed,
            leader,
            params,
            stabilized=variant.leader_stabilized,
            pair_seed=rng.seed,
        )
        leader_displacement = float(np.linalg.norm(scattered[leader] - proposed[leader]))
        new_state = replace(moved, positions=scattered, velocities=velocities)
        new_state = update_scan_direction(new_state)
        leader_index = leader

    max_speed = float(np.linalg.norm(new_state.velocities, axis=1).max())
    dt = max(max_speed / params.drone_speed, params.min_step_time)
    new_state = replace(new_state, sim_time=state.sim_time + dt)

    adaption = new_state.adaption
    metrics = StepMetrics(
        sim_time=capture_time,
        dt=dt,
        branch=BRANCH_DEFAULT if leader_index < 0 else BRANCH_PSO,
        visibility=visibility,
        e_f=e_f,
        state=state_label,
        c_s_eff=c_s_eff,
        c_c_eff=c_c_eff,
        leader_index=leader_index,
        positions=new_state.positions.copy(),
        frac_social=adaption.frac_social if adaption else float("nan"),
        frac_cognitive=adaption.frac_cognitive if adaption else float("nan"),
        leader_scatter_displacement=leader_displacement,
        new_visibility=new_visibility,
        history_visibility=history_visibility,
    )
    return new_state, history, metrics
