"""Muckenhoupt-style weight machinery on sampled grids.

Weights are analytic specs (constant, power |x - x0|^gamma, piecewise
constant) sampled onto a grid.  Power weights are cell-averaged on the cell
containing the singularity, so negative exponents stay integrable and
positive ones stay strictly positive.  Ball-local quantities use the
trapezoid rule restricted to the ball's node set; subsets of a ball inherit
the ball's weights, which keeps every Hölder-based comparison exact at the
discrete level.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _si

from .grid import GridSpec, _axis
from .reports import InequalityReport, digest_of

__all__ = [
    "WeightSpec",
    "dual_weight",
    "Ball",
    "BallFamily",
    "ball_nodes",
    "weighted_measure",
    "ball_volume",
    "ApReport",
    "ap_characteristic",
    "rh_quotient",
    "rh_constant",
    "DoublingReport",
    "doubling_report",
    "subset_ratio_check",
]

_KINDS = ("constant", "power", "piecewise_constant")


@dataclass(frozen=True)
class WeightSpec:
    """Analytic weight: w(x) = level, |x - center|^gamma, or a step profile.

    Piecewise-constant weights vary along one axis; ``levels`` has one more
    entry than ``breaks`` and a node exactly on a break takes the upper piece.
    """

    kind: str
    level: float = 1.0
    gamma: float = 0.0
    center: tuple = (0.0,)
    breaks: tuple = ()
    levels: tuple = ()
    axis: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "constant" and not self.level > 0:
            raise ValueError("constant weight level must be positive")
        if self.kind == "piecewise_constant":
            if len(self.levels) != len(self.breaks) + 1:
                raise ValueError("need len(levels) == len(breaks) + 1")
            if any(not lv > 0 for lv in self.levels):
                raise ValueError("piecewise weight levels must be positive")
            if list(self.breaks) != sorted(self.breaks):
                raise ValueError("breaks must be sorted")

    @classmethod
    def constant_weight(cls, level: float = 1.0) -> "WeightSpec":
        return cls(kind="constant", level=float(level))

    @classmethod
    def power(cls, gamma: float, center=(0.0,)) -> "WeightSpec":
        return cls(kind="power", gamma=float(gamma), center=tuple(float(c) for c in center))

    @classmethod
    def piecewise(cls, breaks, levels, axis: int = 0) -> "WeightSpec":
        return cls(
            kind="piecewise_constant",
            breaks=tuple(float(b) for b in breaks),
            levels=tuple(float(v) for v in levels),
            axis=int(axis),
        )

    def is_admissible(self, p: float, dim: int) -> bool:
        """Power-weight exponent window -dim < gamma < dim (p - 1)."""
        if self.kind != "power":
            return True
        return -dim < self.gamma < dim * (p - 1.0)

    def sample(self, grid: GridSpec, power: float = 1.0) -> np.ndarray:
        """Samples of w^power, cell-averaged on the singular cell."""
        return _sample_weight(self, grid, float(power))

    def to_json(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "level": self.level}
        if self.kind == "power":
            return {"kind": "power", "gamma": self.gamma, "center": list(self.center)}
        return {
            "kind": "piecewise_constant",
            "breaks": list(self.breaks),
            "levels": list(self.levels),
            "axis": self.axis,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightSpec":
        kind = obj.get("kind")
        if kind == "constant":
            return cls.constant_weight(obj["level"])
        if kind == "power":
            return cls.power(obj["gamma"], obj.get("center", (0.0,)))
        if kind == "piecewise_constant":
            return cls.piecewise(obj["breaks"], obj["levels"], obj.get("axis", 0))
        raise ValueError(f"unknown weight kind in JSON: {kind!r}")


def dual_weight(w: WeightSpec, p: float) -> WeightSpec:
    """The conjugate-exponent weight w^(1 - p'), p' = p/(p-1)."""
    if not p > 1:
        raise ValueError(f"need p > 1, got {p}")
    s = 1.0 - p / (p - 1.0)  # = -1/(p-1)
    if w.kind == "constant":
        return WeightSpec.constant_weight(w.level**s)
    if w.kind == "power":
        return WeightSpec.power(w.gamma * s, w.center)
    return WeightSpec.piecewise(w.breaks, tuple(v**s for v in w.levels), w.axis)


def _corner_power_integral(wx: float, hy: float, g: float) -> float:
    # integral of (x^2 + y^2)^(g/2) over [0,wx] x [0,hy]; singular corner at 0
    if wx <= 0.0 or hy <= 0.0:
        return 0.0
    if g <= -2.0:
        return math.inf
    phi0 = math.atan2(hy, wx)

    def along_x(theta: float) -> float:
        return (wx / math.cos(theta)) ** (g + 2.0) / (g + 2.0)

    def along_y(theta: float) -> float:
        return (hy / math.sin(theta)) ** (g + 2.0) / (g + 2.0)

    v1, _ = _si.quad(along_x, 0.0, phi0, epsabs=1e-13, epsrel=1e-12)
    v2, _ = _si.quad(along_y, phi0, math.pi / 2.0, epsabs=1e-13, epsrel=1e-12)
    return v1 + v2


def _cell_average_power_1d(lo: float, hi: float, x0: float, g: float) -> float:
    if g <= -1.0:
        return math.inf
    left = abs(x0 - lo) ** (g + 1.0)
    right = abs(hi - x0) ** (g + 1.0)
    return (left + right) / ((g + 1.0) * (hi - lo))


def _cell_average_power_2d(cell, x0, g: float) -> float:
    (lo0, hi0), (lo1, hi1) = cell
    total = 0.0
    for wx in (x0[0] - lo0, hi0 - x0[0]):
        for hy in (x0[1] - lo1, hi1 - x0[1]):
            total += _corner_power_integral(wx, hy, g)
    area = (hi0 - lo0) * (hi1 - lo1)
    return total / area


def _sample_weight(w: WeightSpec, grid: GridSpec, power: float) -> np.ndarray:
    pts = grid.nodes()
    if w.kind == "constant":
        return np.full(grid.n_nodes, w.level**power)
    if w.kind == "piecewise_constant":
        levels = np.asarray(w.levels, dtype=np.float64) ** power
        coord = pts[:, w.axis]
        idx = np.searchsorted(np.asarray(w.breaks), coord, side="right")
        return levels[idx]
    # power weight |x - x0|^(gamma * power)
    g = w.gamma * power
    x0 = np.asarray(w.center, dtype=np.float64)
    if x0.size != grid.dim:
        raise ValueError(f"weight center has dim {x0.size}, grid has {grid.dim}")
    diff = pts - x0[None, :]
    r = np.sqrt(np.sum(diff * diff, axis=1)) if grid.dim == 2 else np.abs(diff[:, 0])
    safe = np.where(r > 0.0, r, 1.0)
    vals = safe**g
    vals[r == 0.0] = math.inf if g < 0 else (1.0 if g == 0 else 0.0)
    # exact average over any node cell containing the singular point
    half = grid.spacing / 2.0
    L = grid.half_width
    near = np.all(np.abs(diff) <= half + 1e-12, axis=1)
    for i in np.nonzero(near)[0]:
        cell = []
        inside = True
        for d in range(grid.dim):
            lo = max(pts[i, d] - half, -L)
            hi = min(pts[i, d] + half, L)
            if not (lo <= x0[d] <= hi):
                inside = False
                break
            cell.append((lo, hi))
        if not inside:
            continue
        if grid.dim == 1:
            vals[i] = _cell_average_power_1d(cell[0][0], cell[0][1], x0[0], g)
        else:
            vals[i] = _cell_average_power_2d(cell, x0, g)
    return vals


@dataclass(frozen=True)
class Ball:
    """Closed ball B(center, radius); membership is the node-center test."""

    center: tuple
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def contained_in_box(self, grid: GridSpec) -> bool:
        return all(
            abs(c) + self.radius <= grid.half_width + 1e-9 for c in self.center
        )


def _run_weights(count: int, spacing: float) -> np.ndarray:
    # trapezoid restricted to a contiguous node run; a singleton keeps the
    # full cell weight so measures stay positive
    w = np.full(count, spacing)
    if count >= 2:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


@functools.lru_cache(maxsize=16384)
def _ball_nodes_cached(grid: GridSpec, center: tuple, radius: float):
    ax = _axis(grid)
    eps = 1e-9
    if grid.dim == 1:
        c = center[0]
        lo = np.searchsorted(ax, c - radius - eps, side="left")
        hi = np.searchsorted(ax, c + radius + eps, side="right") - 1
        if hi < lo:
            return np.empty(0, dtype=np.int64), np.empty(0)
        idx = np.arange(lo, hi + 1, dtype=np.int64)
        return idx, _run_weights(idx.size, grid.spacing)
    c0, c1 = center
    n = grid.points
    r2 = (radius + eps) ** 2
    rows = np.nonzero(np.abs(ax - c0) <= radius + eps)[0]
    idx_list = []
    wy_list = []
    row_of = []
    col_of = []
    for i in rows:
        chord2 = r2 - (ax[i] - c0) ** 2
        if chord2 < 0:
            continue
        chord = math.sqrt(chord2)
        j0 = np.searchsorted(ax, c1 - chord, side="left")
        j1 = np.searchsorted(ax, c1 + chord, side="right") - 1
        if j1 < j0:
            continue
        js = np.arange(j0, j1 + 1, dtype=np.int64)
        idx_list.append(i * n + js)
        wy_list.append(_run_weights(js.size, grid.spacing))
        row_of.append(np.full(js.size, i, dtype=np.int64))
        col_of.append(js)
    if not idx_list:
        return np.empty(0, dtype=np.int64), np.empty(0)
    idx = np.concatenate(idx_list)
    wy = np.concatenate(wy_list)
    ii = np.concatenate(row_of)
    jj = np.concatenate(col_of)
    # column runs: per column j the member rows are contiguous (disc is convex)
    wx = np.full(idx.size, grid.spacing)
    for j in np.unique(jj):
        sel = np.nonzero(jj == j)[0]
        ri = ii[sel]
        run_lo, run_hi = ri.min(), ri.max()
        if sel.size >= 2:
            wx[sel[ri == run_lo]] *= 0.5
            wx[sel[ri == run_hi]] *= 0.5
    w = wx * wy  # (fx * spacing) * (fy * spacing): per-node product-trapezoid cell
    order = np.argsort(idx, kind="stable")
    return idx[order], w[order]


def ball_nodes(grid: GridSpec, ball: Ball):
    """Node indices and restricted-trapezoid weights for a ball.

    Returns (indices, weights) in ascending node order.  Per axis, the
    endpoints of each contiguous run of member nodes carry half weight.
    """
    idx, w = _ball_nodes_cached(grid, tuple(ball.center), float(ball.radius))
    return idx, w.copy()


def ball_volume(ball: Ball, grid: GridSpec) -> float:
    _, w = ball_nodes(grid, ball)
    if w.size == 0:
        raise ValueError(f"ball {ball} contains no grid nodes")
    return float(np.sum(w))


def weighted_measure(w: WeightSpec, ball: Ball, grid: GridSpec) -> float:
    """w(B) = sum of ball weights times weight samples over member nodes."""
    idx, q = ball_nodes(grid, ball)
    if idx.size == 0:
        raise ValueError(f"ball {ball} contains no grid nodes")
    return float(np.sum(q * w.sample(grid)[idx]))


@dataclass(frozen=True)
class BallFamily:
    """Finite surrogate for 'all balls': dyadic radii on a coarse lattice."""

    balls: tuple
    rule_id: str
    params: dict = field(compare=False)
    k_max: int
    root_index: int
    family_id: str

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    @property
    def root_ball(self) -> Ball:
        return self.balls[self.root_index]

    def doubling_eligible(self, grid: GridSpec, k: int):
        """Indices of balls whose 2^(k+1) enlargement stays in the box."""
        f = 2.0 ** (k + 1)
        return [
            i for i, b in enumerate(self.balls)
            if b.scaled(f).contained_in_box(grid)
        ]

    @classmethod
    def dyadic(
        cls,
        grid: GridSpec,
        radius_base: float | None = None,
        levels: int = 7,
        center_step: float | None = None,
        k_max: int = 3,
    ) -> "BallFamily":
        L = grid.half_width
        base = grid.spacing if radius_base is None else float(radius_base)
        step = L / 4.0 if center_step is None else float(center_step)
        radii = [base * 2.0**j for j in range(levels) if base * 2.0**j <= L + 1e-12]
        if not radii:
            raise ValueError("no admissible radii: radius_base exceeds the box")
        balls = []
        for r in radii:
            reach = L - r
            if reach < 0:
                continue
            k_hi = int(math.floor(reach / step + 1e-9))
            cs = sorted({round(k * step, 12) for k in range(-k_hi, k_hi + 1)}
                        | {round(-reach, 12), round(reach, 12)})
            if grid.dim == 1:
                centers = [(c,) for c in cs]
            else:
                centers = [(a, b) for a in cs for b in cs]
            balls.extend(Ball(c, r) for c in centers)
        balls.sort(key=lambda b: (b.radius, b.center))
        root = max(
            (i for i, b in enumerate(balls) if all(c == 0.0 for c in b.center)),
            key=lambda i: balls[i].radius,
        )
        params = {
            "radius_base": base,
            "levels": levels,
            "center_step": step,
            "k_max": k_max,
            "grid": [grid.dim, grid.half_width, grid.points],
        }
        return cls(
            balls=tuple(balls),
            rule_id="dyadic_lattice",
            params=params,
            k_max=k_max,
            root_index=root,
            family_id=digest_of(params),
        )


@dataclass
class ApReport:
    """Per-ball A_p products and their family supremum."""

    p: float
    per_ball: list
    supremum: float
    overflow: bool
    family_id: str

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "ball_count": len(self.per_ball),
            "per_ball": self.per_ball,
            "supremum": self.supremum,
            "overflow": self.overflow,
            "family_id": self.family_id,
        }


def ap_characteristic(
    w: WeightSpec, p: float, family: BallFamily, grid: GridSpec
) -> ApReport:
    """Family A_p characteristic: sup_B (avg_B w) (avg_B w^(-1/(p-1)))^(p-1).

    The conjugate factor is sampled as its own power weight (cell-averaged at
    the singular cell), which dominates the pointwise power by Jensen and
    keeps the Hölder-average bound exact.  Non-integrable exponents produce
    an infinite product and set the overflow flag.
    """
    if not p > 1:
        raise ValueError(f"need p > 1, got {p}")
    ws = w.sample(grid)
    sigma = w.sample(grid, power=-1.0 / (p - 1.0))
    products = []
    for ball in family:
        idx, q = ball_nodes(grid, ball)
        vol = float(np.sum(q))
        avg_w = float(np.sum(q * ws[idx])) / vol
        avg_sigma = float(np.sum(q * sigma[idx])) / vol
        products.append(avg_w * avg_sigma ** (p - 1.0))
    overflow = any(not math.isfinite(v) for v in products)
    sup = math.inf if overflow else max(products)
    return ApReport(p, products, sup, overflow, family.family_id)


def rh_quotient(w: WeightSpec, r: float, ball: Ball, grid: GridSpec) -> float:
    """Per-ball reverse-Hölder quotient (avg_B w^r)^(1/r) / avg_B w."""
    if not r > 1:
        raise ValueError(f"need r > 1, got {r}")
    idx, q = ball_nodes(grid, ball)
    vol = float(np.sum(q))
    avg_w = float(np.sum(q * w.sample(grid)[idx])) / vol
    avg_wr = float(np.sum(q * w.sample(grid, power=r)[idx])) / vol
    return avg_wr ** (1.0 / r) / avg_w


def rh_constant(w: WeightSpec, r: float, family: BallFamily, grid: GridSpec) -> float:
    """Family reverse-Hölder constant: the supremum of per-ball quotients."""
    return max(rh_quotient(w, r, b, grid) for b in family)


@dataclass
class DoublingReport:
    p: float
    entries: list
    max_ratio: float
    max_normalized: float

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "entries": self.entries,
            "max_ratio": self.max_ratio,
            "max_normalized": self.max_normalized,
        }


def doubling_report(
    w: WeightSpec,
    p: float,
    family: BallFamily,
    grid: GridSpec,
    factors=(2.0,),
) -> DoublingReport:
    """Measure growth w(lambda B) / w(B) against the lambda^(dim p) rate.

    Every requested (ball, factor) pair must keep lambda B inside the box;
    a violation is an error naming the offending ball.
    """
    entries = []
    for i, ball in enumerate(family):
        for lam in factors:
            big = ball.scaled(lam)
            if not big.contained_in_box(grid):
                raise ValueError(
                    f"enlarged ball {big} leaves the box (family ball #{i})"
                )
            ratio = weighted_measure(w, big, grid) / weighted_measure(w, ball, grid)
            normalized = ratio / lam ** (grid.dim * p)
            entries.append(
                {"ball_index": i, "factor": lam, "ratio": ratio, "normalized": normalized}
            )
    return DoublingReport(
        p=p,
        entries=entries,
        max_ratio=max(e["ratio"] for e in entries),
        max_normalized=max(e["normalized"] for e in entries),
    )


def subset_ratio_check(
    w: WeightSpec, r: float, ball: Ball, subsets, grid: GridSpec
) -> list:
    """w(E)/w(B) <= C_rh(B) (|E|/|B|)^((r-1)/r) for node subsets E of B.

    Subsets inherit the ball's restricted-trapezoid weights, so the bound is
    an exact finite-dimensional Hölder inequality; the constant is this
    ball's own reverse-Hölder quotient.
    """
    idx, q = ball_nodes(grid, ball)
    pos = {int(n): k for k, n in enumerate(idx)}
    ws = w.sample(grid)[idx]
    wB = float(np.sum(q * ws))
    volB = float(np.sum(q))
    c_rh = rh_quotient(w, r, ball, grid)
    theta = (r - 1.0) / r
    out = []
    for E in subsets:
        E = np.asarray(E, dtype=np.int64)
        if E.size and not all(int(n) in pos for n in E):
            raise ValueError("subset contains nodes outside the ball")
        sel = np.asarray([pos[int(n)] for n in E], dtype=np.int64)
        wE = float(np.sum(q[sel] * ws[sel])) if sel.size else 0.0
        volE = float(np.sum(q[sel])) if sel.size else 0.0
        lhs = wE / wB
        rhs = c_rh * (volE / volB) ** theta
        out.append(
            InequalityReport(
                check="subset_ratio",
                digest=digest_of(
                    {"ball": [ball.center, ball.radius], "n": int(E.size), "r": r}
                ),
                lhs=lhs,
                rhs=rhs,
                constant=c_rh,
                constant_provenance="per-ball reverse-Holder quotient",
                tol=1e-10,
                detail={"subset_size": int(E.size), "ball_nodes": int(idx.size)},
            )
        )
    return out
