"""Evolutionary-state machinery for adaptive parameter control.

The evolutionary factor measures how peripheral the current best particle is
within the swarm; it is classified into one of four states, which in turn
drives one of two parameter-adaption schemes:

* the classic additive scheme on weights in a clamped band, and
* a multiplicative scheme on fractional factors in the open unit interval,
  built so that the swarm-search weight constraints (social > cognitive,
  social + cognitive <= line spacing) hold by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

EXPLORATION = "exploration"
EXPLOITATION = "exploitation"
CONVERGENCE = "convergence"
JUMPING_OUT = "jumping out"
STATES = (EXPLORATION, EXPLOITATION, CONVERGENCE, JUMPING_OUT)

# State-mapping flavors: the narrow mapping uses lower band edges than the
# classic one, so the adaptive swarm reaches exploitation/convergence sooner.
MAPPING_NARROW = "narrow"
MAPPING_CLASSIC = "classic"

RESET_FRACTION = 0.5
# Fractional factors equivalent to the fixed weights of the non-adaptive
# strategy: c_s = c4 * 10/21 and c_c = c_s / 2.
FIXED_FRAC_SOCIAL = 10.0 / 21.0
FIXED_FRAC_COGNITIVE = 0.5


def mean_pairwise_distance(positions, i: int) -> float:
    """Mean Euclidean distance from particle i to every other particle."""
    pos = np.asarray(positions, float)
    n = len(pos)
    if n < 2:
        raise ValueError("mean pairwise distance needs at least two particles")
    d = np.linalg.norm(pos - pos[i], axis=1)
    return float(d.sum() / (n - 1))  # the i==i term is zero and drops out


def evolutionary_factor(positions, best: int) -> float:
    """Normalized non-centrality of the best particle, in [0, 1].

    0 means the best particle has the smallest mean distance to the rest of
    the swarm (maximally central), 1 the largest (maximally peripheral).
    A fully symmetric swarm (all mean distances equal) maps to 0.
    """
    pos = np.asarray(positions, float)
    n = len(pos)
    if n < 2:
        raise ValueError("evolutionary factor needs at least two particles")
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.linalg.norm(diff, axis=-1).sum(axis=1) / (n - 1)
    d_min = float(d.min())
    d_max = float(d.max())
    if d_max == d_min:
        return 0.0
    return float((d[best] - d_min) / (d_max - d_min))


def classify_state(e_f: float, prev: str, mapping: str = MAPPING_NARROW) -> str:
    """Map an evolutionary factor to a state.

    In the bands where two states overlap, the previous state breaks the tie
    so the states are traversed in their intended order rather than flapping
    with the factor's noise.
    """
    if mapping == MAPPING_NARROW:
        if e_f < 0.025:
            return CONVERGENCE
        if e_f < 0.1:
            return EXPLOITATION if prev in (EXPLOITATION, EXPLORATION) else CONVERGENCE
        if e_f < 0.15:
            return EXPLOITATION
        if e_f < 0.25:
            return EXPLORATION if prev in (EXPLORATION, JUMPING_OUT) else EXPLOITATION
        if e_f < 0.5:
            return EXPLORATION
        if e_f < 0.6:
            return JUMPING_OUT if prev in (JUMPING_OUT, CONVERGENCE) else EXPLORATION
        return JUMPING_OUT
    if mapping == MAPPING_CLASSIC:
        if e_f < 0.2:
            return CONVERGENCE
        if e_f < 0.3:
            return EXPLOITATION if prev in (EXPLOITATION, EXPLORATION) else CONVERGENCE
        if e_f < 0.4:
            return EXPLOITATION
        if e_f < 0.6:
            return EXPLORATION if prev in (EXPLORATION, JUMPING_OUT) else EXPLOITATION
        if e_f < 0.7:
            return EXPLORATION
        if e_f < 0.9:
            return JUMPING_OUT if prev in (JUMPING_OUT, CONVERGENCE) else EXPLORATION
        return JUMPING_OUT
    raise ValueError(f"unknown state mapping {mapping!r}")


def adapt_inertia(e_f: float) -> float:
    """Sigmoid inertia weight: 0.4 for a tight swarm, rising toward ~0.9."""
    return 1.0 / (1.0 + 1.5 * math.exp(-2.6 * e_f))


@dataclass
class ApsoParams:
    """Knobs of the classic additive adaption scheme."""

    delta: float = 0.1  # acceleration rate
    clamp_lo: float = 1.5
    clamp_hi: float = 2.5
    sum_cap: float = 4.0

    def __post_init__(self):
        if not 0.05 <= self.delta <= 0.1:
            raise ValueError("acceleration rate delta must lie in [0.05, 0.1]")
        if not self.clamp_lo < self.clamp_hi:
            raise ValueError("clamp_lo must be below clamp_hi")


def apso_adapt_factors(
    state: str, c_c: float, c_s: float, params: Optional[ApsoParams] = None
) -> Tuple[float, float]:
    """One additive adaption step on the (cognitive, social) weight pair.

    Exploration pulls cognition up and social attraction down at the full
    rate, exploitation does the same at half rate, convergence nudges both up
    at half rate, and jumping out reverses exploration. The pair is then
    clamped into the allowed band and rescaled if its sum exceeds the cap.
    """
    p = params or ApsoParams()
    d = p.delta
    if state == EXPLORATION:
        c_c, c_s = c_c + d, c_s - d
    elif state == EXPLOITATION:
        c_c, c_s = c_c + d / 2, c_s - d / 2
    elif state == CONVERGENCE:
        c_c, c_s = c_c + d / 2, c_s + d / 2
    elif state == JUMPING_OUT:
        c_c, c_s = c_c - d, c_s + d
    else:
        raise ValueError(f"unknown evolutionary state {state!r}")
    c_c = min(max(c_c, p.clamp_lo), p.clamp_hi)
    c_s = min(max(c_s, p.clamp_lo), p.clamp_hi)
    total = c_c + c_s
    if total > p.sum_cap:
        scale = p.sum_cap / total
        c_c *= scale
        c_s *= scale
    return c_c, c_s


@dataclass
class AdaptionState:
    """Adaptive-run state threaded through the step loop (a value, not shared).

    frac_social and frac_cognitive live in the open interval (0, 1); gamma is
    the multiplicative deceleration factor; prev_state feeds the overlap-band
    tie-breaks of the next classification.
    """

    frac_social: float = RESET_FRACTION
    frac_cognitive: float = RESET_FRACTION
    gamma: float = 0.9
    prev_state: str = EXPLORATION
    mapping: str = MAPPING_NARROW

    def __post_init__(self):
        if not 0.0 < self.frac_social < 1.0:
            raise ValueError("frac_social must lie in the open interval (0, 1)")
        if not 0.0 < self.frac_cognitive < 1.0:
            raise ValueError("frac_cognitive must lie in the open interval (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in the open interval (0, 1)")


def _pull_up(c: float, gamma: float) -> float:
    return 1.0 - gamma * (1.0 - c)


def _pull_down(c: float, gamma: float) -> float:
    return gamma * c


def _normalize_fractions(frac_social: float, frac_cognitive: float) -> Tuple[float, float]:
    # Restores social + cognitive <= spacing with the minimal change: shrink
    # only the social fraction. The ulp loop absorbs rounding spill-over.
    if frac_social * (1.0 + frac_cognitive) > 1.0:
        frac_social = 1.0 / (1.0 + frac_cognitive)
        while frac_social * (1.0 + frac_cognitive) > 1.0:
            frac_social = math.nextafter(frac_social, 0.0)
    return frac_social, frac_cognitive


def aos_apso_adapt_fractions(state: str, adapt: AdaptionState) -> AdaptionState:
    """One multiplicative adaption step on the fractional factors.

    Increases pull a fraction toward 1 (c <- 1 - gamma*(1 - c)), decreases
    pull it toward 0 (c <- gamma*c); both map (0,1) into (0,1). Half-strength
    updates use the midpoint (1+gamma)/2 so they step less far than full ones.
    The per-state directions match the additive scheme.
    """
    g = adapt.gamma
    g_half = (1.0 + g) / 2.0
    fc = adapt.frac_cognitive
    fs = adapt.frac_social
    if state == EXPLORATION:
        fc, fs = _pull_up(fc, g), _pull_down(fs, g)
    elif state == EXPLOITATION:
        fc, fs = _pull_up(fc, g_half), _pull_down(fs, g_half)
    elif state == CONVERGENCE:
        fc, fs = _pull_up(fc, g_half), _pull_up(fs, g_half)
    elif state == JUMPING_OUT:
        fc, fs = _pull_down(fc, g), _pull_up(fs, g)
    else:
        raise ValueError(f"unknown evolutionary state {state!r}")
    fs, fc = _normalize_fractions(fs, fc)
    return replace(adapt, frac_social=fs, frac_cognitive=fc, prev_state=state)


def apso_adapt_fractions(
    state: str, adapt: AdaptionState, params: Optional[ApsoParams] = None
) -> AdaptionState:
    """The classic additive scheme transported onto the fractional factors.

    Dividing the additive scheme's rate, clamp band, and sum cap by the cap
    itself moves it from weight scale onto fraction scale: rate delta/cap and
    band [lo/cap, hi/cap]. Keeping the update inside the fraction machinery
    preserves the weight constraints that the raw additive scheme cannot
    guarantee on its own.
    """
    p = params or ApsoParams()
    d = p.delta / p.sum_cap
    lo = p.clamp_lo / p.sum_cap
    hi = p.clamp_hi / p.sum_cap
    fc = adapt.frac_cognitive
    fs = adapt.frac_social
    if state == EXPLORATION:
        fc, fs = fc + d, fs - d
    elif state == EXPLOITATION:
        fc, fs = fc + d / 2, fs - d / 2
    elif state == CONVERGENCE:
        fc, fs = fc + d / 2, fs + d / 2
    elif state == JUMPING_OUT:
        fc, fs = fc - d, fs + d
    else:
        raise ValueError(f"unknown evolutionary state {state!r}")
    fc = min(max(fc, lo), hi)
    fs = min(max(fs, lo), hi)
    fs, fc = _normalize_fractions(fs, fc)
    return replace(adapt, frac_social=fs, frac_cognitive=fc, prev_state=state)


def translate_fractions(adapt: AdaptionState, c4: float) -> Tuple[float, float]:
    """Turn fractional factors into (social, cognitive) weights in meters.

    c_s = c4 * frac_social and c_c = c_s * frac_cognitive, which makes
    c_c < c_s immediate and c_s + c_c <= c4 follow from the normalization.
    The ulp loops keep both guarantees exact under float rounding.
    """
    if c4 <= 0:
        raise ValueError("line spacing c4 must be positive")
    c_s = c4 * adapt.frac_social
    c_c = c_s * adapt.frac_cognitive
    while c_c >= c_s:
        c_c = math.nextafter(c_c, 0.0)
    while c_s + c_c > c4:
        c_c = math.nextafter(c_c, 0.0)
    return c_s, c_c
