"""The discrete kernel class and the per-node intrinsic supremum.

A test kernel lives on the unit box [-1,1]^dim at resolution m: it vanishes
where |u| >= 1, has zero quadrature mean, and satisfies the alpha-Hölder
bound |phi_i - phi_j| <= |u_i - u_j|^alpha on EVERY node pair.  The supremum
of |(f * phi_t)(y)| over this polytope is a finite linear program; because the
feasible set is symmetric under negation, a single maximization yields the
absolute supremum.

Three evaluation modes:

* ``lp``          exact discrete supremum (HiGHS dual simplex, residuals
                  verified to 1e-9 on every constraint),
* ``dictionary``  certified lower bound from a fixed versioned dictionary of
                  feasible kernels (fast path for whole fields),
* ``radial_lp``   exact supremum over the radial sub-polytope (lower bound
                  for the full class; useful in two dimensions).
"""

from __future__ import annotations

import functools
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .grid import (
    GridSpec,
    SampledField,
    TimeLadder,
    _node_weights,
    interpolate,
)
from .grid import _interp_many

__all__ = [
    "HolderClassSpec",
    "KernelProgram",
    "SolveResult",
    "SolverError",
    "assemble_program",
    "solve_program",
    "dictionary_kernels",
    "a_alpha",
    "modulated_a_alpha",
    "AalphaField",
    "a_alpha_field",
    "dictionary_responses",
    "support_inside_box",
]

DICTIONARY_VERSION = 1
_MODES = ("lp", "dictionary", "radial_lp")


@dataclass(frozen=True)
class HolderClassSpec:
    """Kernel class parameters: Hölder exponent, grid resolution, mode."""

    alpha: float
    m: int
    mode: str = "lp"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.m % 2 == 0:
            raise ValueError(f"kernel resolution m must be odd, got {self.m}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")

    def kernel_grid(self, dim: int) -> GridSpec:
        floor = 33 if dim == 1 else 17
        if self.m < floor:
            raise ValueError(f"m must be >= {floor} in dim {dim}, got {self.m}")
        return GridSpec(dim, 1.0, self.m)

    def spec_hash(self, dim: int) -> str:
        blob = f"{self.alpha!r}:{self.m}:{self.mode}:{dim}:dictv{DICTIONARY_VERSION}"
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class SolverError(RuntimeError):
    """Solve failed; carries the best value and a gap estimate if known."""

    def __init__(self, message: str, best: float = math.nan, gap: float = math.inf):
        super().__init__(message)
        self.best = best
        self.gap = gap


@dataclass(frozen=True)
class _ClassGeometry:
    kgrid: GridSpec
    q: np.ndarray
    u: np.ndarray
    pinned: np.ndarray
    interior: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    pair_rhs: np.ndarray
    bound: np.ndarray
    A_ub: sp.csr_matrix
    b_ub: np.ndarray
    A_eq: sp.csr_matrix
    n_pairs_total: int


@functools.lru_cache(maxsize=16)
def _geometry(alpha: float, m: int, dim: int) -> _ClassGeometry:
    kgrid = GridSpec(dim, 1.0, m)
    u = kgrid.nodes()
    q = _node_weights(kgrid)
    rad = np.sqrt(np.sum(u * u, axis=1))
    pinned = rad >= 1.0 - 1e-12
    interior = np.nonzero(~pinned)[0]
    v = interior.size
    a, b = np.triu_indices(v, k=1)
    du = u[interior[a]] - u[interior[b]]
    rhs = np.sum(du * du, axis=1) ** (0.5 * alpha)
    # |phi_i| <= dist(u_i, pinned set)^alpha covers every interior-pinned pair
    diff = u[interior][:, None, :] - u[pinned][None, :, :]
    bound = np.min(np.sqrt(np.sum(diff * diff, axis=2)), axis=1) ** alpha
    P = a.size
    rows = np.concatenate([np.repeat(np.arange(P), 2), np.repeat(np.arange(P, 2 * P), 2)])
    cols = np.concatenate([np.stack([a, b], 1).ravel()] * 2)
    data = np.concatenate([np.tile([1.0, -1.0], P), np.tile([-1.0, 1.0], P)])
    A_ub = sp.csr_matrix((data, (rows, cols)), shape=(2 * P, v))
    b_ub = np.concatenate([rhs, rhs])
    A_eq = sp.csr_matrix(q[interior][None, :])
    n_total = kgrid.n_nodes * (kgrid.n_nodes - 1) // 2
    return _ClassGeometry(
        kgrid=kgrid,
        q=q,
        u=u,
        pinned=pinned,
        interior=interior,
        pair_a=a,
        pair_b=b,
        pair_rhs=rhs,
        bound=bound,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        n_pairs_total=n_total,
    )


@dataclass
class KernelProgram:
    """Finite LP for one (y, t): objective over the kernel polytope.

    The constraint set covers all C(m^dim, 2) node pairs: interior-interior
    pairs as explicit rows, interior-pinned pairs through the distance bound
    (the minimum over pinned partners), pinned-pinned pairs trivially (both
    variables are fixed to zero).
    """

    spec: HolderClassSpec
    dim: int
    c_full: np.ndarray
    y: tuple
    t: float

    @property
    def geometry(self) -> _ClassGeometry:
        return _geometry(self.spec.alpha, self.spec.m, self.dim)

    @property
    def n_pairs_total(self) -> int:
        return self.geometry.n_pairs_total


def assemble_program(
    f: SampledField, y, t: float, spec: HolderClassSpec
) -> KernelProgram:
    """Objective coefficients c_i = q_i f(y - t u_i) on the kernel grid.

    These realize (f * phi_t)(y) = sum_i c_i phi_i after the substitution
    u = (y - z) / t, which absorbs the t^{-dim} normalization of phi_t.
    """
    dim = f.grid.dim
    kgrid = spec.kernel_grid(dim)
    geo = _geometry(spec.alpha, spec.m, dim)
    y = np.asarray(y, dtype=np.float64).reshape(dim)
    pts = y[None, :] - t * geo.u
    fv = _interp_many(f, pts)
    return KernelProgram(spec=spec, dim=dim, c_full=geo.q * fv, y=tuple(y), t=t)


@dataclass
class SolveResult:
    value: float
    extremizer: SampledField
    residuals: dict
    stats: dict


def _residual_report(geo: _ClassGeometry, phi: np.ndarray) -> dict:
    x = phi[geo.interior]
    pair = np.abs(x[geo.pair_a] - x[geo.pair_b]) - geo.pair_rhs
    bound = np.abs(x) - geo.bound
    return {
        "pair": float(np.max(pair)) if pair.size else 0.0,
        "bound": float(np.max(bound)) if bound.size else 0.0,
        "mean": abs(float(np.sum(geo.q[geo.interior] * x))),
        "support": float(np.max(np.abs(phi[geo.pinned]))) if geo.pinned.any() else 0.0,
    }


_LP_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-9,
}


def solve_program(prog: KernelProgram) -> SolveResult:
    """Maximize the objective over the kernel polytope (HiGHS dual simplex).

    By negation symmetry the maximum equals the absolute supremum.  The
    returned point is re-verified: residual <= 1e-9 on every constraint
    (after a homogeneous rescale repair if the solver sits slightly outside),
    and the reported value is the verified point's objective.
    """
    geo = prog.geometry
    c = prog.c_full[geo.interior]
    if not np.any(c):
        zero = SampledField(geo.kgrid, np.zeros(geo.kgrid.n_nodes))
        return SolveResult(0.0, zero, _residual_report(geo, zero.values),
                           {"iterations": 0, "trivial": True})
    res = linprog(
        -c,
        A_ub=geo.A_ub,
        b_ub=geo.b_ub,
        A_eq=geo.A_eq,
        b_eq=np.zeros(1),
        bounds=np.stack([-geo.bound, geo.bound], axis=1),
        method="highs-ds",
        options=_LP_OPTIONS,
    )
    if res.status == 1:
        raise SolverError(
            "iteration limit exceeded",
            best=float(-res.fun) if res.fun is not None else math.nan,
        )
    if res.status != 0:
        raise SolverError(f"solver failed with status {res.status}: {res.message}")
    x = np.asarray(res.x, dtype=np.float64)
    # homogeneous repair: every constraint scales with phi, so a uniform
    # shrink removes any tolerance-level violation without a re-solve
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = [
            np.max(np.abs(x[geo.pair_a] - x[geo.pair_b]) / geo.pair_rhs)
            if geo.pair_rhs.size
            else 0.0,
            np.max(np.abs(x) / geo.bound) if geo.bound.size else 0.0,
        ]
    worst = max(float(r) for r in ratios)
    if worst > 1.0:
        x = x * ((1.0 - 1e-12) / worst)
    phi = np.zeros(geo.kgrid.n_nodes)
    phi[geo.interior] = x
    residuals = _residual_report(geo, phi)
    if max(residuals["pair"], residuals["bound"], residuals["mean"]) > 1e-9:
        raise SolverError(f"verified residuals exceed 1e-9: {residuals}")
    value = float(np.sum(c * x))
    return SolveResult(
        value=value,
        extremizer=SampledField(geo.kgrid, phi),
        residuals=residuals,
        stats={"iterations": int(res.nit), "trivial": False},
    )


def _solve_radial(prog: KernelProgram) -> float:
    """Exact supremum over radial kernels: a lower bound for the full class."""
    geo = prog.geometry
    rad = np.sqrt(np.sum(geo.u * geo.u, axis=1))
    interior_rad = rad[geo.interior]
    classes, inverse = np.unique(interior_rad, return_inverse=True)
    v = classes.size
    c = np.zeros(v)
    np.add.at(c, inverse, prog.c_full[geo.interior])
    qcls = np.zeros(v)
    np.add.at(qcls, inverse, geo.q[geo.interior])
    if not np.any(c):
        return 0.0
    a, b = np.triu_indices(v, k=1)
    rhs = np.abs(classes[a] - classes[b]) ** prog.spec.alpha
    P = a.size
    rows = np.concatenate([np.repeat(np.arange(P), 2), np.repeat(np.arange(P, 2 * P), 2)])
    cols = np.concatenate([np.stack([a, b], 1).ravel()] * 2)
    data = np.concatenate([np.tile([1.0, -1.0], P), np.tile([-1.0, 1.0], P)])
    A_ub = sp.csr_matrix((data, (rows, cols)), shape=(2 * P, v))
    bound = (1.0 - classes) ** prog.spec.alpha
    res = linprog(
        -c,
        A_ub=A_ub,
        b_ub=np.concatenate([rhs, rhs]),
        A_eq=sp.csr_matrix(qcls[None, :]),
        b_eq=np.zeros(1),
        bounds=np.stack([-bound, bound], axis=1),
        method="highs-ds",
        options=_LP_OPTIONS,
    )
    if res.status != 0:
        raise SolverError(f"radial solve failed with status {res.status}")
    return float(np.sum(c * res.x))


# ---------------------------------------------------------------------------
# dictionary mode


def _holder_normalize(values: np.ndarray, geo: _ClassGeometry) -> np.ndarray:
    """Scale a candidate onto the polytope (all constraints are homogeneous)."""
    x = values[geo.interior]
    worst = 0.0
    if geo.pair_rhs.size:
        worst = float(np.max(np.abs(x[geo.pair_a] - x[geo.pair_b]) / geo.pair_rhs))
    if geo.bound.size:
        worst = max(worst, float(np.max(np.abs(x) / geo.bound)))
    if worst > 0.0:
        values = values * ((1.0 - 1e-12) / worst)
    return values


@functools.lru_cache(maxsize=16)
def dictionary_kernels(alpha: float, m: int, dim: int):
    """Fixed, versioned dictionary of feasible kernels (names and samples).

    Odd tent profiles at five scales plus zero-meaned even bump differences
    at four scales (both sign-axes in two dimensions).  Every entry is
    normalized onto the kernel polytope and its feasibility re-verified, so
    dictionary values are certified lower bounds for the LP supremum.
    """
    geo = _geometry(alpha, m, dim)
    u = geo.u
    rad = np.sqrt(np.sum(u * u, axis=1))
    entries = []

    def tent(rho: np.ndarray) -> np.ndarray:
        return np.where(rho < 1.0, np.minimum(rho, 1.0 - rho), 0.0)

    def cos_bump(rho: np.ndarray, s: float) -> np.ndarray:
        return np.where(rho < s, np.cos(np.pi * rho / (2.0 * s)) ** 2, 0.0)

    axes = range(dim)
    for s in (1.0, 0.75, 0.5, 0.25, 0.125):
        prof = 2.0 ** (alpha - 1.0) * s**alpha * tent(rad / s) ** alpha
        for ax in axes:
            entries.append((f"odd_tent_s{s}_ax{ax}", -np.sign(u[:, ax]) * prof))
    base = cos_bump(rad, 1.0)
    base_mean = float(np.sum(geo.q * base))
    for s in (0.2, 0.4, 0.6, 0.8):
        inner = cos_bump(rad, s)
        coef = float(np.sum(geo.q * inner)) / base_mean
        entries.append((f"even_ring_s{s}", inner - coef * base))

    out = []
    for name, vals in entries:
        vals = np.where(geo.pinned, 0.0, vals)
        vals = _holder_normalize(vals, geo)
        rep = _residual_report(geo, vals)
        if max(rep["pair"], rep["bound"], rep["mean"], rep["support"]) > 1e-9:
            raise AssertionError(f"dictionary entry {name} infeasible: {rep}")
        vals.flags.writeable = False
        out.append((name, vals))
    return tuple(out)


def support_inside_box(grid: GridSpec, ys: np.ndarray, t: float) -> np.ndarray:
    """Whether the rescaled kernel support B(y, t) stays inside the box."""
    ys = np.atleast_2d(ys)
    return np.all(np.abs(ys) + t <= grid.half_width + 1e-12, axis=1)


def _conv_matrix(f: SampledField, kgrid: GridSpec, t: float, ys: np.ndarray) -> np.ndarray:
    u = kgrid.nodes()
    pts = ys[:, None, :] - t * u[None, :, :]
    return _interp_many(f, pts.reshape(-1, f.grid.dim)).reshape(ys.shape[0], u.shape[0])


def dictionary_responses(
    f: SampledField, ladder: TimeLadder, spec: HolderClassSpec
) -> np.ndarray:
    """Responses (f * phi_t)(y) for each dictionary kernel, level, and node.

    Shape (n_kernels, levels, n_nodes).  Columns where the rescaled support
    leaves the box are zeroed (truncation convention), matching single-point
    calls bit for bit: both paths share the sample matrix and the same
    fixed-order reduction.
    """
    dim = f.grid.dim
    kgrid = spec.kernel_grid(dim)
    geo = _geometry(spec.alpha, spec.m, dim)
    kernels = dictionary_kernels(spec.alpha, spec.m, dim)
    qphis = [geo.q * vals for _, vals in kernels]
    nodes = f.grid.nodes()
    t_nodes = ladder.nodes
    out = np.zeros((len(kernels), t_nodes.size, f.grid.n_nodes))
    for k, t in enumerate(t_nodes):
        inside = support_inside_box(f.grid, nodes, float(t))
        if not inside.any():
            continue
        fv = _conv_matrix(f, kgrid, float(t), nodes)
        for d, qphi in enumerate(qphis):
            resp = np.sum(fv * qphi[None, :], axis=1)
            out[d, k] = np.where(inside, resp, 0.0)
    return out


def _a_alpha_point(f: SampledField, y: np.ndarray, t: float, spec: HolderClassSpec) -> float:
    if not support_inside_box(f.grid, y[None, :], t)[0]:
        return 0.0
    if spec.mode == "dictionary":
        dim = f.grid.dim
        kgrid = spec.kernel_grid(dim)
        geo = _geometry(spec.alpha, spec.m, dim)
        fv = _conv_matrix(f, kgrid, t, y[None, :])
        best = 0.0
        for _, vals in dictionary_kernels(spec.alpha, spec.m, dim):
            qphi = geo.q * vals
            best = max(best, abs(float(np.sum(fv * qphi[None, :], axis=1)[0])))
        return best
    prog = assemble_program(f, y, t, spec)
    if spec.mode == "radial_lp":
        return abs(_solve_radial(prog))
    return abs(solve_program(prog).value)


def a_alpha(f: SampledField, y, t: float, spec: HolderClassSpec) -> float:
    """sup over the kernel class of |(f * phi_t)(y)| in the requested mode.

    Returns 0 where the rescaled kernel support leaves the sampling box
    (documented truncation: values there would read the box edge, not f).
    Dictionary and radial modes are lower bounds for the LP supremum.
    """
    y = np.asarray(y, dtype=np.float64).reshape(f.grid.dim)
    return _a_alpha_point(f, y, float(t), spec)


def modulated_a_alpha(
    b: SampledField, f: SampledField, x, y, t: float, spec: HolderClassSpec
) -> float:
    """sup over kernels of |int (b(x) - b(z)) phi_t(y - z) f(z) dz|.

    The objective splits as b(x) c(f) - c(b f): both coefficient vectors are
    assembled once, and the inner supremum is solved per output point x.
    Adding a constant to b leaves the value unchanged (exact cancellation).
    """
    x = np.asarray(x, dtype=np.float64).reshape(f.grid.dim)
    y = np.asarray(y, dtype=np.float64).reshape(f.grid.dim)
    t = float(t)
    if not support_inside_box(f.grid, y[None, :], t)[0]:
        return 0.0
    beta = interpolate(b, x)
    bf = b * f
    if spec.mode == "dictionary":
        dim = f.grid.dim
        kgrid = spec.kernel_grid(dim)
        geo = _geometry(spec.alpha, spec.m, dim)
        fv_f = _conv_matrix(f, kgrid, t, y[None, :])
        fv_bf = _conv_matrix(bf, kgrid, t, y[None, :])
        best = 0.0
        for _, vals in dictionary_kernels(spec.alpha, spec.m, dim):
            qphi = geo.q * vals
            rf = float(np.sum(fv_f * qphi[None, :], axis=1)[0])
            rbf = float(np.sum(fv_bf * qphi[None, :], axis=1)[0])
            best = max(best, abs(beta * rf - rbf))
        return best
    p1 = assemble_program(f, y, t, spec)
    p2 = assemble_program(bf, y, t, spec)
    prog = KernelProgram(
        spec=spec,
        dim=f.grid.dim,
        c_full=beta * p1.c_full - p2.c_full,
        y=tuple(y),
        t=t,
    )
    if spec.mode == "radial_lp":
        return abs(_solve_radial(prog))
    return abs(solve_program(prog).value)


@dataclass
class AalphaField:
    """The intrinsic supremum on every (node, ladder level) pair.

    ``values`` has shape (levels, n_nodes), row-major node order; every
    square-function quadrature downstream consumes one shared instance.
    """

    grid: GridSpec
    ladder: TimeLadder
    spec: HolderClassSpec
    values: np.ndarray
    mode: str
    spec_hash: str
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = (self.ladder.levels, self.grid.n_nodes)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")
        if np.any(self.values < 0):
            raise ValueError("intrinsic supremum values must be nonnegative")


def a_alpha_field(
    f: SampledField,
    ladder: TimeLadder,
    spec: HolderClassSpec,
    threads: int = 1,
) -> AalphaField:
    """Evaluate the intrinsic supremum at every node and ladder level."""
    ladder.validate_for(f.grid)
    dim = f.grid.dim
    if spec.mode == "dictionary":
        resp = dictionary_responses(f, ladder, spec)
        values = np.max(np.abs(resp), axis=0)
        stats = {"mode": spec.mode, "solves": 0, "kernels": resp.shape[0]}
    else:
        nodes = f.grid.nodes()
        t_nodes = ladder.nodes
        values = np.zeros((t_nodes.size, f.grid.n_nodes))
        solves = 0

        def level_row(k: int) -> np.ndarray:
            t = float(t_nodes[k])
            row = np.zeros(f.grid.n_nodes)
            for j in range(f.grid.n_nodes):
                row[j] = _a_alpha_point(f, nodes[j], t, spec)
            return row

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(level_row, range(t_nodes.size)))
        else:
            rows = [level_row(k) for k in range(t_nodes.size)]
        for k, row in enumerate(rows):
            values[k] = row
            solves += f.grid.n_nodes
        stats = {"mode": spec.mode, "solves": solves}
    return AalphaField(
        grid=f.grid,
        ladder=ladder,
        spec=spec,
        values=values,
        mode=spec.mode,
        spec_hash=spec.spec_hash(dim),
        stats=stats,
    )
