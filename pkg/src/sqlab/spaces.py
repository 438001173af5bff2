"""Weighted norms on sampled fields: Lebesgue, Morrey, oscillation, maximal.

Ball-local quantities all ride on the ball-restricted trapezoid rule, so a
ball's discrete measure is exact for grid-aligned radii and subsets of a
ball inherit the ball's own weights.  Morrey and oscillation norms report
the achieving ball, not just the value, for diagnosis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import GridSpec, SampledField, grid_weights
from .weights import Ball, WeightSpec, ball_nodes

__all__ = [
    "MorreyParams",
    "NormReport",
    "lebesgue_norm",
    "ball_average",
    "morrey_norm",
    "bmo_oscillation",
    "bmo_norm",
    "weighted_maximal",
]


@dataclass(frozen=True)
class MorreyParams:
    """Integrability p >= 1 and locality exponent kappa in (0, 1)."""

    p: float
    kappa: float

    def __post_init__(self) -> None:
        if self.p < 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")


@dataclass
class NormReport:
    """A ball-indexed norm: the value, the profile, and where it is attained."""

    value: float
    per_ball: np.ndarray
    achieving_ball: Ball
    achieving_index: int
    family_id: str

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "per_ball": [float(v) for v in self.per_ball],
            "achieving_ball": {
                "center": list(self.achieving_ball.center),
                "radius": self.achieving_ball.radius,
                "index": self.achieving_index,
            },
            "family_id": self.family_id,
        }


def _family_balls(family) -> tuple:
    if hasattr(family, "balls"):
        return tuple(family.balls), family.family_id
    balls = tuple(family)
    if not balls:
        raise ValueError("ball family is empty")
    return balls, "custom"


def _weight_values(w: Optional[WeightSpec], grid: GridSpec) -> np.ndarray:
    if w is None:
        return np.ones(grid.n_nodes)
    return w.sample(grid)


def lebesgue_norm(f: SampledField, p: float, w: Optional[WeightSpec] = None) -> float:
    """(sum_i q_i |f_i|^p w_i)^{1/p} over the whole box."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    q = grid_weights(f.grid)
    wv = _weight_values(w, f.grid)
    total = float(np.sum(q * np.abs(f.values) ** p * wv))
    return total ** (1.0 / p)


def ball_average(f: SampledField, ball: Ball) -> float:
    """Mean of f over the ball under the ball-restricted trapezoid rule."""
    idx, q = ball_nodes(f.grid, ball)
    mass = float(np.sum(q))
    if mass <= 0.0:
        raise ValueError(f"ball {ball} has empty intersection with the grid")
    return float(np.sum(q * f.values[idx])) / mass


def morrey_norm(
    f: SampledField,
    params: MorreyParams,
    w: Optional[WeightSpec],
    family,
) -> NormReport:
    """sup_B (w(B)^{-kappa} sum_B q^B |f|^p w)^{1/p} over the family.

    The per-ball profile and the first achieving ball are reported alongside
    the value; ties resolve to the earliest ball in family order.
    """
    balls, family_id = _family_balls(family)
    wv = _weight_values(w, f.grid)
    per_ball = np.zeros(len(balls))
    for i, ball in enumerate(balls):
        idx, q = ball_nodes(f.grid, ball)
        mass = float(np.sum(q * wv[idx]))
        if not mass > 0.0:
            raise ValueError(f"weighted measure of {ball} is not positive")
        local = float(np.sum(q * np.abs(f.values[idx]) ** params.p * wv[idx]))
        per_ball[i] = (local / mass**params.kappa) ** (1.0 / params.p)
    k = int(np.argmax(per_ball))
    return NormReport(
        value=float(per_ball[k]),
        per_ball=per_ball,
        achieving_ball=balls[k],
        achieving_index=k,
        family_id=family_id,
    )


def bmo_oscillation(b: SampledField, ball: Ball, p: float = 1.0) -> float:
    """(mean over B of |b - b_B|^p)^{1/p} with b_B the ball average."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    idx, q = ball_nodes(b.grid, ball)
    mass = float(np.sum(q))
    if mass <= 0.0:
        raise ValueError(f"ball {ball} has empty intersection with the grid")
    avg = float(np.sum(q * b.values[idx])) / mass
    osc = float(np.sum(q * np.abs(b.values[idx] - avg) ** p)) / mass
    return osc ** (1.0 / p)


def bmo_norm(b: SampledField, family) -> NormReport:
    """sup_B of the mean oscillation over the family, with the profile."""
    balls, family_id = _family_balls(family)
    per_ball = np.array([bmo_oscillation(b, ball) for ball in balls])
    k = int(np.argmax(per_ball))
    return NormReport(
        value=float(per_ball[k]),
        per_ball=per_ball,
        achieving_ball=balls[k],
        achieving_index=k,
        family_id=family_id,
    )


def weighted_maximal(
    f: SampledField, w: Optional[WeightSpec], family
) -> SampledField:
    """Node-wise sup over containing family balls of the weighted average.

    M(f)(x) = max over balls B with x in B of (1/w(B)) sum_B q^B |f| w.
    Every node must lie in at least one family ball; an uncovered node is an
    error, because a silent zero there would understate the maximal field.
    """
    balls, _ = _family_balls(family)
    grid = f.grid
    wv = _weight_values(w, grid)
    out = np.zeros(grid.n_nodes)
    covered = np.zeros(grid.n_nodes, dtype=bool)
    for ball in balls:
        idx, q = ball_nodes(grid, ball)
        if idx.size == 0:
            continue
        mass = float(np.sum(q * wv[idx]))
        if not mass > 0.0:
            raise ValueError(f"weighted measure of {ball} is not positive")
        avg = float(np.sum(q * np.abs(f.values[idx]) * wv[idx])) / mass
        out[idx] = np.maximum(out[idx], avg)
        covered[idx] = True
    if not covered.all():
        missing = int(np.nonzero(~covered)[0][0])
        raise ValueError(
            f"node {missing} at {grid.nodes()[missing]} lies in no family ball; "
            "the maximal field needs a covering family"
        )
    return SampledField(grid, out)
