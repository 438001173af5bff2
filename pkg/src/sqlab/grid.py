"""Sampling substrate: uniform grids, trapezoid quadrature, interpolation,
rescaled convolution, and the geometric time ladder.

Everything downstream (weights, norms, square functions, verification suites)
consumes the same grid, the same quadrature weights, and the same fixed
row-major summation order, so that discrete inequalities are checked with one
shared rule on both sides.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "QuadratureRule",
    "SampledField",
    "TimeLadder",
    "integrate",
    "interpolate",
    "convolve_scaled",
    "field_to_csv",
    "field_from_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid on the closed box [-half_width, half_width]^dim.

    ``points`` is the node count per axis and must be odd so the origin is a
    node.  Node order is row-major: in two dimensions node ``i * points + j``
    sits at ``(axis[i], axis[j])``.
    """

    dim: int
    half_width: float
    points: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.points < 3 or self.points % 2 == 0:
            raise ValueError(f"points must be odd and >= 3, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def n_nodes(self) -> int:
        return self.points**self.dim

    @property
    def axis(self) -> np.ndarray:
        return _axis(self)

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape (n_nodes, dim), row-major order."""
        return _nodes(self)

    def refine(self) -> "GridSpec":
        """Halve the spacing (same box): points -> 2*points - 1."""
        return GridSpec(self.dim, self.half_width, 2 * self.points - 1)


@functools.lru_cache(maxsize=64)
def _axis(grid: GridSpec) -> np.ndarray:
    ax = np.linspace(-grid.half_width, grid.half_width, grid.points)
    ax.flags.writeable = False
    return ax


@functools.lru_cache(maxsize=64)
def _nodes(grid: GridSpec) -> np.ndarray:
    ax = _axis(grid)
    if grid.dim == 1:
        out = ax.reshape(-1, 1)
    else:
        xx, yy = np.meshgrid(ax, ax, indexing="ij")
        out = np.stack([xx.ravel(), yy.ravel()], axis=1)
    out.flags.writeable = False
    return out


@functools.lru_cache(maxsize=64)
def _axis_trapezoid(grid: GridSpec) -> np.ndarray:
    w = np.full(grid.points, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    w.flags.writeable = False
    return w


@functools.lru_cache(maxsize=64)
def _node_weights(grid: GridSpec) -> np.ndarray:
    wa = _axis_trapezoid(grid)
    if grid.dim == 1:
        w = wa.copy()
    else:
        w = np.multiply.outer(wa, wa).ravel()
    w.flags.writeable = False
    return w


@dataclass(frozen=True)
class QuadratureRule:
    """Product-trapezoid weights for a grid; weights sum to the box volume."""

    grid: GridSpec
    weights: np.ndarray = field(repr=False)

    @classmethod
    def product_trapezoid(cls, grid: GridSpec) -> "QuadratureRule":
        w = _node_weights(grid)
        volume = (2.0 * grid.half_width) ** grid.dim
        if abs(float(np.sum(w)) - volume) > 1e-12 * max(1.0, volume):
            raise AssertionError("trapezoid weights do not sum to the box volume")
        return cls(grid, w)


def grid_weights(grid: GridSpec) -> np.ndarray:
    """Shared per-node quadrature weights (read-only view)."""
    return _node_weights(grid)


@dataclass
class SampledField:
    """Function samples on a grid's nodes, flat row-major float64.

    Evaluation outside the box is defined as 0 (compact-support convention).
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64).ravel())
        if v.size != self.grid.n_nodes:
            raise ValueError(
                f"expected {self.grid.n_nodes} samples for {self.grid}, got {v.size}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        self.values = v

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "SampledField":
        pts = grid.nodes()
        if grid.dim == 1:
            vals = np.asarray(fn(pts[:, 0]), dtype=np.float64)
        else:
            vals = np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=np.float64)
        return cls(grid, vals)

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "SampledField":
        return cls(grid, np.full(grid.n_nodes, float(value)))

    def scaled(self, c: float) -> "SampledField":
        return SampledField(self.grid, c * self.values)

    def __mul__(self, other: "SampledField") -> "SampledField":
        if other.grid != self.grid:
            raise ValueError("pointwise product requires matching grids")
        return SampledField(self.grid, self.values * other.values)


def integrate(f: SampledField) -> float:
    """Trapezoid integral over the box, fixed row-major summation order."""
    return float(np.sum(_node_weights(f.grid) * f.values))


def _interp_many(f: SampledField, pts: np.ndarray) -> np.ndarray:
    """Multilinear interpolation at points, exactly 0 outside the closed box."""
    g = f.grid
    if g.dim == 1:
        x = pts.reshape(-1)
        out = np.interp(x, _axis(g), f.values, left=0.0, right=0.0)
        # np.interp clamps at the endpoints; enforce zero strictly outside
        out = np.where(np.abs(x) > g.half_width, 0.0, out)
        return out
    x = pts[:, 0]
    y = pts[:, 1]
    h = g.spacing
    L = g.half_width
    n = g.points
    fx = (x + L) / h
    fy = (y + L) / h
    i0 = np.clip(np.floor(fx).astype(np.int64), 0, n - 2)
    j0 = np.clip(np.floor(fy).astype(np.int64), 0, n - 2)
    tx = fx - i0
    ty = fy - j0
    vals = f.values.reshape(n, n)
    v00 = vals[i0, j0]
    v01 = vals[i0, j0 + 1]
    v10 = vals[i0 + 1, j0]
    v11 = vals[i0 + 1, j0 + 1]
    out = (
        v00 * (1 - tx) * (1 - ty)
        + v01 * (1 - tx) * ty
        + v10 * tx * (1 - ty)
        + v11 * tx * ty
    )
    inside = (np.abs(x) <= L) & (np.abs(y) <= L)
    return np.where(inside, out, 0.0)


def interpolate(f: SampledField, x) -> float:
    """Value of the field at a point (multilinear inside, 0 outside)."""
    pt = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if pt.shape[1] != f.grid.dim:
        pt = pt.reshape(1, f.grid.dim)
    return float(_interp_many(f, pt)[0])


def _check_kernel(f: SampledField, phi: SampledField) -> None:
    if phi.grid.half_width != 1.0:
        raise ValueError("kernel must be sampled on the unit box [-1, 1]^dim")
    if phi.grid.dim != f.grid.dim:
        raise ValueError("kernel and field dimensions differ")


def convolve_batch(
    f: SampledField, phi: SampledField, t: float, ys: np.ndarray
) -> np.ndarray:
    """(f * phi_t)(y) for a batch of points y, one quadrature rule.

    phi_t(x) = t^{-dim} phi(x / t); after the substitution u = (y - z)/t the
    integral becomes sum_i q_i phi(u_i) f(y - t u_i) on the kernel grid, with
    f read off by multilinear interpolation.  Row results are bit-identical
    to single-point calls because both paths share this implementation.
    """
    _check_kernel(f, phi)
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"scale t must be positive and finite, got {t}")
    ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    u = phi.grid.nodes()  # (m^dim, dim)
    qphi = _node_weights(phi.grid) * phi.values
    # sample points: (n_y, m^dim, dim)
    pts = ys[:, None, :] - t * u[None, :, :]
    flat = pts.reshape(-1, f.grid.dim)
    fv = _interp_many(f, flat).reshape(ys.shape[0], u.shape[0])
    return np.sum(fv * qphi[None, :], axis=1)


def convolve_scaled(f: SampledField, phi: SampledField, t: float, y) -> float:
    """Quadrature approximation of (f * phi_t)(y) at a single point."""
    y = np.asarray(y, dtype=np.float64).reshape(1, f.grid.dim)
    return float(convolve_batch(f, phi, t, y)[0])


@dataclass(frozen=True)
class TimeLadder:
    """Geometric scale ladder t_k = t_min * r^k with constant dlog t."""

    t_min: float
    t_max: float
    levels: int

    def __post_init__(self) -> None:
        if not (0 < self.t_min < self.t_max):
            raise ValueError(
                f"need 0 < t_min < t_max, got [{self.t_min}, {self.t_max}]"
            )
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")

    @property
    def nodes(self) -> np.ndarray:
        return _ladder_nodes(self)

    @property
    def dlog(self) -> float:
        """Constant log-spacing; the discrete dt/t weight per level."""
        return math.log(self.t_max / self.t_min) / (self.levels - 1)

    def validate_for(self, grid: GridSpec) -> None:
        """Ladder must resolve the grid: t_min >= spacing, t_max <= 2L."""
        if self.t_min < grid.spacing - 1e-12:
            raise ValueError(
                f"t_min={self.t_min} below grid spacing {grid.spacing}"
            )
        if self.t_max > 2.0 * grid.half_width + 1e-12:
            raise ValueError(
                f"t_max={self.t_max} exceeds 2 * half_width = {2 * grid.half_width}"
            )


@functools.lru_cache(maxsize=64)
def _ladder_nodes(ladder: TimeLadder) -> np.ndarray:
    k = np.arange(ladder.levels)
    t = ladder.t_min * np.exp(k * ladder.dlog)
    t[-1] = ladder.t_max  # pin the endpoint against rounding
    t.flags.writeable = False
    return t


def field_to_csv(f: SampledField, path) -> None:
    """Write a field as CSV: header x1[,x2],value; 17 significant digits."""
    pts = f.grid.nodes()
    cols = [f"x{i + 1}" for i in range(f.grid.dim)] + ["value"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row, v in zip(pts, f.values):
            writer.writerow([f"{c:.17g}" for c in row] + [f"{v:.17g}"])


def field_from_csv(path) -> SampledField:
    """Read a field CSV produced by field_to_csv, rebuilding its grid."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader if row]
    dim = len(header) - 1
    if dim not in (1, 2) or header[-1] != "value":
        raise ValueError(f"unrecognized field CSV header: {header}")
    data = np.asarray(rows, dtype=np.float64)
    coords, vals = data[:, :dim], data[:, dim]
    points = int(round(data.shape[0] ** (1.0 / dim)))
    half_width = float(np.max(np.abs(coords)))
    grid = GridSpec(dim, half_width, points)
    if not np.allclose(grid.nodes(), coords, atol=1e-12, rtol=0.0):
        raise ValueError("CSV node coordinates are not a row-major uniform grid")
    return SampledField(grid, vals)
