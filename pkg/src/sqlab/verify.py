"""Inequality verification suites over generated test families.

Each suite samples a deterministic family of test functions, evaluates both
sides of a discrete inequality, and returns a SuiteReport whose cases carry
the constant and its provenance.  Three kinds of constants appear:

* structural constants that make the discrete inequality exact (subset
  Hölder ratios, region domination rates): violations beyond float slack
  are failures;
* rates fixed a priori with a small margin (aperture growth, oscillation
  growth): these are hard gates at desk scale;
* empirical family maxima (boundedness ratios): the gate is finiteness plus
  stability under grid refinement, never a continuum claim.

Reports serialize without timestamps or machine identifiers, so repeated
runs over the same config are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, SampledField, TimeLadder, grid_weights
from .kernels import HolderClassSpec, a_alpha_field
from .reports import InequalityReport, SuiteReport, digest_of
from .spaces import MorreyParams, ball_average, bmo_norm, lebesgue_norm, morrey_norm
from .sqfn import (
    commutator_g_alpha,
    commutator_g_star,
    commutator_s_alpha,
    g_alpha,
    g_star,
    s_alpha_beta,
)
from .weights import (
    Ball,
    BallFamily,
    WeightSpec,
    ap_characteristic,
    ball_nodes,
    doubling_report,
    subset_ratio_check,
    weighted_measure,
)

__all__ = [
    "ConfigGateError",
    "TestFamilySpec",
    "generate_members",
    "sample_member",
    "indicator_field",
    "step_field",
    "extend_family",
    "require_gstar_admissible",
    "OPERATOR_IDS",
    "operator_field",
    "boundedness_suite",
    "aperture_scaling_suite",
    "gstar_domination_suite",
    "bmo_growth_suite",
    "holder_average_suite",
    "commutator_split_suite",
    "subset_doubling_suite",
    "emit_report",
]


class ConfigGateError(ValueError):
    """A parameter combination the suites refuse to run."""


def require_gstar_admissible(lam: float, p: float) -> None:
    """The decay exponent must beat max(p, 3) for the weighted half-space."""
    floor = max(p, 3.0)
    if not lam > floor:
        raise ConfigGateError(
            f"g_star suites need lambda > max(p, 3) = {floor}, got lambda = {lam}"
        )


# ---------------------------------------------------------------------------
# test families


_GENERATORS = ("bumps", "dyadic_atoms", "sign_patterns", "random_trig")


@dataclass(frozen=True)
class TestFamilySpec:
    """Deterministic family of analytic test functions.

    Member parameters depend only on (spec, box half-width, dim), never on
    the grid resolution, so a refined grid resamples the same functions.
    """

    generator: str
    count: int
    seed: int
    amplitude: tuple = (0.2, 1.2)
    scale: tuple = (0.3, 1.5)

    def __post_init__(self) -> None:
        if self.generator not in _GENERATORS:
            raise ValueError(f"generator must be one of {_GENERATORS}")
        if self.count < 1:
            raise ValueError("family count must be >= 1")

    def as_dict(self) -> dict:
        return {
            "generator": self.generator,
            "count": self.count,
            "seed": self.seed,
            "amplitude": list(self.amplitude),
            "scale": list(self.scale),
        }


def generate_members(spec: TestFamilySpec, half_width: float, dim: int) -> tuple:
    """Analytic member descriptions (plain dicts, digest-stable)."""
    rng = np.random.default_rng(spec.seed)
    L = half_width
    members = []
    for _ in range(spec.count):
        if spec.generator == "bumps":
            n_b = int(rng.integers(1, 4))
            bumps = []
            for _ in range(n_b):
                amp = float(rng.uniform(*spec.amplitude)) * float(rng.choice([-1.0, 1.0]))
                s = float(min(rng.uniform(*spec.scale), L / 4.0))
                center = [
                    float(rng.uniform(-(L - s), L - s)) if L - s > 0 else 0.0
                    for _ in range(dim)
                ]
                bumps.append({"amp": amp, "scale": s, "center": center})
            members.append({"kind": "bumps", "bumps": bumps})
        elif spec.generator == "dyadic_atoms":
            k = int(rng.integers(1, 5))
            h = L / 2.0 ** (k + 1)
            j = int(rng.integers(-(2**k - 1), 2**k))
            amp = float(rng.uniform(*spec.amplitude))
            members.append(
                {"kind": "dyadic_atom", "level": k, "half_width": h,
                 "center": j * h, "amp": amp}
            )
        elif spec.generator == "sign_patterns":
            blocks = 8
            amp = float(rng.uniform(*spec.amplitude))
            signs = [[int(s) for s in rng.choice([-1, 1], size=blocks)]
                     for _ in range(dim)]
            members.append(
                {"kind": "sign_pattern", "blocks": blocks, "amp": amp, "signs": signs}
            )
        else:
            amp = float(rng.uniform(*spec.amplitude))
            omegas = [float(rng.uniform(1.0, 5.0)) * 2.0 * math.pi / (2.0 * L)
                      for _ in range(dim)]
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            members.append(
                {"kind": "windowed_trig", "amp": amp, "omegas": omegas, "phase": phase}
            )
    return tuple(members)


def _piecewise_values(xs: np.ndarray, breaks, levels, eps: float) -> np.ndarray:
    """Right-continuous step samples with the midpoint value on a break node."""
    breaks = np.asarray(breaks, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.float64)
    idx = np.searchsorted(breaks, xs, side="right")
    vals = levels[idx]
    for i, brk in enumerate(breaks):
        on = np.abs(xs - brk) <= eps
        if on.any():
            vals = np.where(on, 0.5 * (levels[i] + levels[i + 1]), vals)
    return vals


def sample_member(member: dict, grid: GridSpec) -> SampledField:
    """Sample one analytic member on a grid (jump nodes take midpoints)."""
    nodes = grid.nodes()
    eps = 1e-9 * grid.half_width
    kind = member["kind"]
    if kind == "bumps":
        vals = np.zeros(grid.n_nodes)
        for bump in member["bumps"]:
            c = np.asarray(bump["center"], dtype=np.float64)
            s = bump["scale"]
            r = np.sqrt(np.sum((nodes - c[None, :]) ** 2, axis=1))
            vals += bump["amp"] * np.where(
                r < s, np.cos(np.pi * r / (2.0 * s)) ** 2, 0.0
            )
        return SampledField(grid, vals)
    if kind == "dyadic_atom":
        h, c, amp = member["half_width"], member["center"], member["amp"]
        v1 = _piecewise_values(
            nodes[:, 0], [c - h, c, c + h], [0.0, amp, -amp, 0.0], eps
        )
        if grid.dim == 1:
            return SampledField(grid, v1)
        win = _piecewise_values(nodes[:, 1], [-h, h], [0.0, 1.0, 0.0], eps)
        return SampledField(grid, v1 * win)
    if kind == "sign_pattern":
        blocks = member["blocks"]
        amp = member["amp"]
        L = grid.half_width
        edges = [-L + i * (2.0 * L / blocks) for i in range(blocks + 1)]
        vals = np.ones(grid.n_nodes)
        for ax in range(grid.dim):
            levels = [0.0] + [float(s) for s in member["signs"][ax]] + [0.0]
            vals = vals * _piecewise_values(nodes[:, ax], edges, levels, eps)
        return SampledField(grid, amp * vals)
    if kind == "windowed_trig":
        phase = np.full(grid.n_nodes, member["phase"])
        window = np.ones(grid.n_nodes)
        L = grid.half_width
        for ax in range(grid.dim):
            phase = phase + member["omegas"][ax] * nodes[:, ax]
            window = window * np.cos(np.pi * nodes[:, ax] / (2.0 * L)) ** 2
        return SampledField(grid, member["amp"] * np.sin(phase) * window)
    raise ValueError(f"unknown member kind {kind!r}")


def indicator_field(grid: GridSpec, center, radius: float) -> SampledField:
    """Closed indicator of a ball: 1 on boundary nodes.

    The closed convention pairs with the ball-restricted trapezoid rule so
    grid-aligned radii integrate exactly.
    """
    c = np.asarray(center, dtype=np.float64).reshape(1, grid.dim)
    r = np.sqrt(np.sum((grid.nodes() - c) ** 2, axis=1))
    return SampledField(grid, np.where(r <= radius + 1e-9 * grid.half_width, 1.0, 0.0))


def step_field(
    grid: GridSpec,
    location: float = 0.0,
    axis: int = 0,
    low: float = 0.0,
    high: float = 1.0,
) -> SampledField:
    """Axis-aligned step; a node exactly on the jump takes the midpoint."""
    xs = grid.nodes()[:, axis]
    eps = 1e-9 * grid.half_width
    return SampledField(
        grid, _piecewise_values(xs, [location], [low, high], eps)
    )


def extend_family(family: BallFamily, extra) -> BallFamily:
    """Family plus extra balls (deduplicated), keeping the root designation."""
    seen = {(b.center, b.radius) for b in family.balls}
    added = tuple(b for b in extra if (b.center, b.radius) not in seen)
    balls = family.balls + added
    params = dict(family.params)
    params["extended_by"] = [[list(b.center), b.radius] for b in added]
    return BallFamily(
        balls=balls,
        rule_id=family.rule_id + "+extra",
        params=params,
        k_max=family.k_max,
        root_index=family.root_index,
        family_id=digest_of(params),
    )


# ---------------------------------------------------------------------------
# operators by id


OPERATOR_IDS = (
    "s_alpha",
    "g_alpha",
    "g_star",
    "comm_s_alpha",
    "comm_g_alpha",
    "comm_g_star",
)


def operator_field(
    op_id: str,
    f: SampledField,
    kspec: HolderClassSpec,
    ladder: TimeLadder,
    *,
    beta: float = 1.0,
    lam: float = 4.0,
    region_levels: int | None = None,
    b: SampledField | None = None,
    threads: int = 1,
) -> SampledField:
    """Evaluate one named square-function operator on f."""
    if op_id not in OPERATOR_IDS:
        raise ValueError(f"unknown operator {op_id!r}")
    if op_id.startswith("comm_"):
        if b is None:
            raise ValueError(f"operator {op_id} needs a symbol field b")
        if op_id == "comm_s_alpha":
            return commutator_s_alpha(b, f, kspec, ladder, beta).field
        if op_id == "comm_g_alpha":
            return commutator_g_alpha(b, f, kspec, ladder).field
        return commutator_g_star(b, f, kspec, ladder, lam, region_levels).field
    A = a_alpha_field(f, ladder, kspec, threads=threads)
    if op_id == "s_alpha":
        return s_alpha_beta(A, beta).field
    if op_id == "g_alpha":
        return g_alpha(A).field
    return g_star(A, lam, region_levels).field


def _ordered_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# suites


def boundedness_suite(
    op_id: str,
    family_spec: TestFamilySpec,
    weight: WeightSpec,
    morrey: MorreyParams,
    balls: BallFamily,
    kspec: HolderClassSpec,
    ladder: TimeLadder,
    grid: GridSpec,
    *,
    beta: float = 1.0,
    lam: float = 4.0,
    region_levels: int | None = None,
    b_builder=None,
    drift_bound: float = 0.25,
    refine: bool = True,
    threads: int = 1,
) -> SuiteReport:
    """Morrey-to-Morrey boundedness ratios with a refinement stability gate.

    R(f) = ||T f|| / ||f|| per member; the constant is the empirical family
    max.  Pass requires every ratio finite, R invariant under scaling f, and
    the empirical max to move less than ``drift_bound`` (relative) when the
    grid and kernel resolutions are both refined.  Commutator operators take
    ``b_builder``, a callable grid -> SampledField, so the symbol can be
    resampled on the refined grid.
    """
    if "g_star" in op_id:
        require_gstar_admissible(lam, morrey.p)
    members = generate_members(family_spec, grid.half_width, grid.dim)
    cases: list[InequalityReport] = []

    def ratios_on(g: GridSpec, ks: HolderClassSpec):
        bg = None if b_builder is None else b_builder(g)
        fields = [sample_member(m, g) for m in members]

        def one(idx_field):
            i, f = idx_field
            denom = morrey_norm(f, morrey, weight, balls).value
            if denom == 0.0:
                return i, None, 0.0, 0.0
            Tf = operator_field(
                op_id, f, ks, ladder,
                beta=beta, lam=lam, region_levels=region_levels, b=bg,
            )
            numer = morrey_norm(Tf, morrey, weight, balls).value
            return i, numer / denom, numer, denom

        return _ordered_map(one, list(enumerate(fields)), threads), fields, bg

    results, fields, bg = ratios_on(grid, kspec)
    ratios = [r for _, r, _, _ in results if r is not None]
    if not ratios:
        raise ValueError("every family member had zero norm; nothing to check")
    c_emp = max(ratios)
    for i, r, numer, denom in results:
        if r is None:
            cases.append(
                InequalityReport(
                    check=f"boundedness:{op_id}:skipped",
                    digest=digest_of(members[i]),
                    lhs=0.0,
                    rhs=0.0,
                    constant=0.0,
                    constant_provenance="zero-norm member excluded",
                    tol=0.0,
                    detail={"member": i, "skipped": True},
                )
            )
            continue
        cases.append(
            InequalityReport(
                check=f"boundedness:{op_id}",
                digest=digest_of(members[i]),
                lhs=numer,
                rhs=c_emp * denom,
                constant=c_emp,
                constant_provenance="empirical family max",
                tol=1e-9 * (1.0 + numer),
                detail={"member": i, "ratio": r},
            )
        )
    i0 = next(i for i, r, _, _ in results if r is not None)
    f0 = fields[i0]
    r0 = results[i0][1]
    scaled = f0.scaled(math.e)
    denom_s = morrey_norm(scaled, morrey, weight, balls).value
    Tf_s = operator_field(
        op_id, scaled, kspec, ladder,
        beta=beta, lam=lam, region_levels=region_levels, b=bg,
    )
    r_s = morrey_norm(Tf_s, morrey, weight, balls).value / denom_s
    cases.append(
        InequalityReport(
            check=f"boundedness:{op_id}:scale_invariance",
            digest=digest_of({"member": i0, "factor": "e"}),
            lhs=abs(r_s - r0) / r0,
            rhs=0.0,
            constant=1.0,
            constant_provenance="ratio is 0-homogeneous in f",
            tol=1e-10,
            detail={"member": i0},
        )
    )
    drift = None
    if refine:
        g2 = grid.refine()
        ks2 = HolderClassSpec(kspec.alpha, 2 * kspec.m - 1, kspec.mode)
        results2, _, _ = ratios_on(g2, ks2)
        ratios2 = [r for _, r, _, _ in results2 if r is not None]
        c_emp2 = max(ratios2)
        drift = abs(c_emp2 - c_emp) / c_emp
        cases.append(
            InequalityReport(
                check=f"boundedness:{op_id}:refinement_drift",
                digest=digest_of({"fine_points": g2.points, "fine_m": ks2.m}),
                lhs=abs(c_emp2 - c_emp),
                rhs=drift_bound * c_emp,
                constant=drift_bound,
                constant_provenance="configured refinement drift bound",
                tol=0.0,
                detail={"coarse_max": c_emp, "fine_max": c_emp2},
            )
        )
    return SuiteReport(
        suite=f"boundedness:{op_id}",
        params={
            "operator": op_id,
            "alpha": kspec.alpha,
            "m": kspec.m,
            "mode": kspec.mode,
            "beta": beta,
            "lambda": lam,
            "region_levels": region_levels,
            "weight": weight.to_json(),
            "p": morrey.p,
            "kappa": morrey.kappa,
            "family": family_spec.as_dict(),
            "grid": [grid.dim, grid.half_width, grid.points],
            "empirical_max": c_emp,
            "refinement_drift": drift,
        },
        seed=family_spec.seed,
        cases=cases,
    )


def aperture_scaling_suite(
    family_spec: TestFamilySpec,
    weight: WeightSpec,
    p: float,
    kspec: HolderClassSpec,
    ladder: TimeLadder,
    grid: GridSpec,
    *,
    j_max: int = 4,
    growth_margin: float = 0.10,
    threads: int = 1,
) -> SuiteReport:
    """Norm growth in the aperture: rho_j = ||S_{2^j}f||_p,w / ||S_1 f||_p,w.

    Gates: rho_0 = 1 exactly (same code path), rho nondecreasing in j (cone
    nesting is exact in the discrete sum), and per-step growth at most
    2^{dim max(1, p/2)} plus the configured margin.
    """
    rate = 2.0 ** (grid.dim * max(1.0, p / 2.0))
    members = generate_members(family_spec, grid.half_width, grid.dim)
    reach = 2.0**j_max * ladder.t_max

    def one(im):
        i, member = im
        f = sample_member(member, grid)
        A = a_alpha_field(f, ladder, kspec)
        norms = [
            lebesgue_norm(s_alpha_beta(A, 2.0**j).field, p, weight)
            for j in range(j_max + 1)
        ]
        return i, norms

    results = _ordered_map(one, list(enumerate(members)), threads)
    cases: list[InequalityReport] = []
    for i, norms in results:
        if norms[0] == 0.0:
            cases.append(
                InequalityReport(
                    check="aperture:skipped",
                    digest=digest_of(members[i]),
                    lhs=0.0, rhs=0.0, constant=0.0,
                    constant_provenance="zero-norm member excluded",
                    tol=0.0,
                    detail={"member": i, "skipped": True},
                )
            )
            continue
        rho = [nm / norms[0] for nm in norms]
        cases.append(
            InequalityReport(
                check="aperture:unit_base",
                digest=digest_of({"member": i, "j": 0}),
                lhs=abs(rho[0] - 1.0),
                rhs=0.0,
                constant=1.0,
                constant_provenance="same code path at beta = 1",
                tol=0.0,
                detail={"member": i},
            )
        )
        for j in range(j_max):
            cases.append(
                InequalityReport(
                    check="aperture:monotone",
                    digest=digest_of({"member": i, "j": j}),
                    lhs=rho[j],
                    rhs=rho[j + 1],
                    constant=1.0,
                    constant_provenance="cone nesting, exact discrete",
                    tol=0.0,
                    detail={"member": i, "j": j},
                )
            )
            cases.append(
                InequalityReport(
                    check="aperture:growth",
                    digest=digest_of({"member": i, "step": j}),
                    lhs=rho[j + 1],
                    rhs=rate * (1.0 + growth_margin) * rho[j],
                    constant=rate * (1.0 + growth_margin),
                    constant_provenance=(
                        "norm growth rate 2^(dim max(1, p/2)) with margin"
                    ),
                    tol=0.0,
                    detail={"member": i, "step": j, "rho": rho[j + 1] / rho[j]},
                )
            )
    return SuiteReport(
        suite="aperture_scaling",
        params={
            "p": p,
            "rate": rate,
            "growth_margin": growth_margin,
            "j_max": j_max,
            "weight": weight.to_json(),
            "family": family_spec.as_dict(),
            "alpha": kspec.alpha,
            "mode": kspec.mode,
            "cone_reach": reach,
            "box_half_width": grid.half_width,
            "reach_exceeds_box": bool(reach > grid.half_width),
        },
        seed=family_spec.seed,
        cases=cases,
    )


def gstar_domination_suite(
    family_spec: TestFamilySpec,
    kspec: HolderClassSpec,
    ladder: TimeLadder,
    grid: GridSpec,
    *,
    lam: float = 4.0,
    region_levels: int = 6,
    threads: int = 1,
) -> SuiteReport:
    """Region decomposition and companion pointwise bounds for g*.

    Per member, at every node: the truncated g* squared is dominated by the
    cone term plus dyadic annuli at rate 2^{-(j-1) lam dim}; the unit cone
    is bounded by 2^{lam dim / 2} g*; g* decreases in lambda; cones grow
    with aperture exactly.
    """
    dim = grid.dim
    members = generate_members(family_spec, grid.half_width, grid.dim)

    def one(im):
        i, member = im
        f = sample_member(member, grid)
        A = a_alpha_field(f, ladder, kspec)
        s2 = [
            s_alpha_beta(A, 2.0**j).field.values ** 2
            for j in range(region_levels + 1)
        ]
        gs = g_star(A, lam, region_levels).field.values ** 2
        gs_hi = g_star(A, lam + 1.0, region_levels).field.values ** 2
        out = []
        scale = 1.0 + float(np.max(gs))
        rhs = s2[0].copy()
        for j in range(1, region_levels + 1):
            rhs += 2.0 ** (-(j - 1) * lam * dim) * s2[j]
        out.append(
            (
                "gstar:region_domination",
                float(np.max(gs - rhs)),
                0.0,
                2.0 ** (-(region_levels - 1) * lam * dim),
                "dyadic region rate 2^(-(j-1) lambda dim)",
                1e-10 * scale,
                {"member": i, "worst_node": int(np.argmax(gs - rhs))},
            )
        )
        out.append(
            (
                "gstar:cone_lower_bound",
                float(np.max(s2[0] - 2.0 ** (lam * dim) * gs)),
                0.0,
                2.0 ** (lam * dim),
                "cone weight floor 2^(-lambda dim)",
                1e-10 * scale * 2.0 ** (lam * dim),
                {"member": i},
            )
        )
        out.append(
            (
                "gstar:lambda_monotone",
                float(np.max(gs_hi - gs)),
                0.0,
                1.0,
                "decay weight decreases in lambda",
                1e-10 * scale,
                {"member": i, "lambda_hi": lam + 1.0},
            )
        )
        for j in range(region_levels):
            out.append(
                (
                    "gstar:aperture_monotone",
                    float(np.max(s2[j] - s2[j + 1])),
                    0.0,
                    1.0,
                    "cone nesting, exact discrete",
                    0.0,
                    {"member": i, "j": j},
                )
            )
        return i, out

    results = _ordered_map(one, list(enumerate(members)), threads)
    cases = [
        InequalityReport(
            check=check,
            digest=digest_of({"member": det["member"], "check": check, **{
                k: v for k, v in det.items() if k != "member"
            }}),
            lhs=lhs,
            rhs=rhs,
            constant=const,
            constant_provenance=prov,
            tol=tol,
            detail=det,
        )
        for _, out in results
        for check, lhs, rhs, const, prov, tol, det in out
    ]
    return SuiteReport(
        suite="gstar_domination",
        params={
            "lambda": lam,
            "region_levels": region_levels,
            "alpha": kspec.alpha,
            "mode": kspec.mode,
            "family": family_spec.as_dict(),
            "grid": [grid.dim, grid.half_width, grid.points],
        },
        seed=family_spec.seed,
        cases=cases,
    )


def bmo_growth_suite(
    b: SampledField,
    base_ball: Ball,
    k_max: int,
    grid: GridSpec,
) -> SuiteReport:
    """Oscillation growth along dyadic enlargements of a grid-aligned ball.

    avg over 2^(k+1) B of |b - avg_B b| <= 2^dim (k + 1) ||b||_osc, with the
    oscillation norm taken over the enlargement chain itself.  Exact for
    balls whose radius is a node-spacing multiple and center a node, where
    each doubling multiplies the discrete measure by exactly 2^dim.
    """
    chain = [base_ball.scaled(2.0**i) for i in range(k_max + 2)]
    for ball in chain:
        if not ball.contained_in_box(grid):
            raise ValueError(f"chain ball {ball} leaves the box; shrink the base")
    osc = bmo_norm(b, chain)
    avg_base = ball_average(b, base_ball)
    cases = []
    for k in range(k_max + 1):
        big = chain[k + 1]
        idx, q = ball_nodes(grid, big)
        mass = float(np.sum(q))
        lhs = float(np.sum(q * np.abs(b.values[idx] - avg_base))) / mass
        rhs = 2.0**grid.dim * (k + 1) * osc.value
        cases.append(
            InequalityReport(
                check="bmo:dyadic_growth",
                digest=digest_of({"k": k, "radius": big.radius}),
                lhs=lhs,
                rhs=rhs,
                constant=2.0**grid.dim * (k + 1),
                constant_provenance="doubling chain rate 2^dim (k+1)",
                tol=1e-10 * (1.0 + lhs),
                detail={"k": k, "radius": big.radius, "osc_norm": osc.value},
            )
        )
    return SuiteReport(
        suite="bmo_growth",
        params={
            "base_radius": base_ball.radius,
            "base_center": list(base_ball.center),
            "k_max": k_max,
            "osc_norm": osc.value,
            "grid": [grid.dim, grid.half_width, grid.points],
        },
        seed=0,
        cases=cases,
    )


def holder_average_suite(
    family_spec: TestFamilySpec,
    weight: WeightSpec,
    morrey: MorreyParams,
    balls: BallFamily,
    base_ball: Ball,
    k_max: int,
    grid: GridSpec,
) -> SuiteReport:
    """Plain averages against the weighted Morrey norm through A_p Hölder.

    avg_B |f| <= [w]_{A_p}^{1/p} ||f|| w(B)^{(kappa-1)/p} on each chain ball;
    exact discretely because the conjugate factor is sampled to dominate the
    pointwise power (Jensen at the singular cell only enlarges the rhs).
    """
    if not morrey.p > 1:
        raise ConfigGateError("the Hölder average chain needs p > 1")
    chain = [base_ball.scaled(2.0**i) for i in range(k_max + 2)]
    for ball in chain:
        if not ball.contained_in_box(grid):
            raise ValueError(f"chain ball {ball} leaves the box; shrink the base")
    fam = extend_family(balls, chain)
    ap = ap_characteristic(weight, morrey.p, fam, grid)
    members = generate_members(family_spec, grid.half_width, grid.dim)
    cases = []
    for i, member in enumerate(members):
        f = sample_member(member, grid)
        norm = morrey_norm(f, morrey, weight, fam).value
        for k, ball in enumerate(chain):
            idx, q = ball_nodes(grid, ball)
            mass = float(np.sum(q))
            lhs = float(np.sum(q * np.abs(f.values[idx]))) / mass
            wB = weighted_measure(weight, ball, grid)
            rhs = ap.supremum ** (1.0 / morrey.p) * norm * wB ** (
                (morrey.kappa - 1.0) / morrey.p
            )
            cases.append(
                InequalityReport(
                    check="holder_ap_average",
                    digest=digest_of({"member": i, "k": k}),
                    lhs=lhs,
                    rhs=rhs,
                    constant=ap.supremum ** (1.0 / morrey.p),
                    constant_provenance="family A_p characteristic to the 1/p",
                    tol=1e-10 * (1.0 + lhs),
                    detail={"member": i, "chain_index": k, "radius": ball.radius},
                )
            )
    return SuiteReport(
        suite="holder_ap_average",
        params={
            "weight": weight.to_json(),
            "p": morrey.p,
            "kappa": morrey.kappa,
            "ap_supremum": ap.supremum,
            "family": family_spec.as_dict(),
            "chain_radii": [b.radius for b in chain],
        },
        seed=family_spec.seed,
        cases=cases,
    )


def commutator_split_suite(
    family_spec: TestFamilySpec,
    b: SampledField,
    kspec: HolderClassSpec,
    ladder: TimeLadder,
    grid: GridSpec,
    *,
    beta: float = 1.0,
    lam: float = 4.0,
    region_levels: int | None = None,
    root_ball: Ball,
    morrey: MorreyParams | None = None,
    weight: WeightSpec | None = None,
    balls: BallFamily | None = None,
    threads: int = 1,
) -> SuiteReport:
    """Commutator triangle split plus boundedness ratios for all variants.

    With c the average of b on the root ball, pointwise in x:
    [b, S](f)(x) <= |b(x) - c| S(f)(x) + S((b - c) f)(x); the same holds for
    g and g*.  The split is exact per kernel, so the gate slack only absorbs
    solver and rounding tolerance.  Adding a constant to b must not move the
    commutator beyond rounding.
    """
    members = generate_members(family_spec, grid.half_width, grid.dim)
    c0 = ball_average(b, root_ball)
    b_shift = SampledField(grid, b.values - c0)

    def one(im):
        i, member = im
        f = sample_member(member, grid)
        shifted = b_shift * f
        A_f = a_alpha_field(f, ladder, kspec)
        A_s = a_alpha_field(shifted, ladder, kspec)
        S_f = s_alpha_beta(A_f, beta).field.values
        S_s = s_alpha_beta(A_s, beta).field.values
        C = commutator_s_alpha(b, f, kspec, ladder, beta).field.values
        bound = np.abs(b.values - c0) * S_f + S_s
        scale = 1.0 + float(np.max(C))
        local = [
            (
                "commutator:split",
                float(np.max(C - bound)),
                0.0,
                1.0,
                "triangle split through the root-ball average",
                1e-8 * scale,
                {"member": i, "worst_node": int(np.argmax(C - bound))},
            )
        ]
        extra = {}
        if morrey is not None and balls is not None:
            denom = morrey_norm(f, morrey, weight, balls).value
            if denom > 0.0:
                Cg = commutator_g_alpha(b, f, kspec, ladder).field
                Cgs = commutator_g_star(b, f, kspec, ladder, lam, region_levels).field
                extra = {
                    "comm_s_alpha": morrey_norm(
                        SampledField(grid, C), morrey, weight, balls
                    ).value / denom,
                    "comm_g_alpha": morrey_norm(Cg, morrey, weight, balls).value / denom,
                    "comm_g_star": morrey_norm(Cgs, morrey, weight, balls).value / denom,
                }
        return i, local, extra

    results = _ordered_map(one, list(enumerate(members)), threads)
    cases = []
    ratio_tbl: dict[str, list] = {}
    for i, local, extra in results:
        for check, lhs, rhs, const, prov, tol, det in local:
            cases.append(
                InequalityReport(
                    check=check,
                    digest=digest_of({"member": det.get("member"), "check": check}),
                    lhs=lhs, rhs=rhs, constant=const,
                    constant_provenance=prov, tol=tol, detail=det,
                )
            )
        for op, r in extra.items():
            ratio_tbl.setdefault(op, []).append((i, r))
    for op, rows in ratio_tbl.items():
        c_emp = max(r for _, r in rows)
        for i, r in rows:
            cases.append(
                InequalityReport(
                    check=f"commutator:boundedness:{op}",
                    digest=digest_of({"member": i, "op": op}),
                    lhs=r,
                    rhs=c_emp,
                    constant=c_emp,
                    constant_provenance="empirical family max",
                    tol=1e-9 * (1.0 + r),
                    detail={"member": i},
                )
            )
    # invariance gates on the first member only: shifting b by a constant
    # cancels inside the modulation, and a constant b annihilates it
    f0 = sample_member(members[0], grid)
    C0 = commutator_s_alpha(b, f0, kspec, ladder, beta).field.values
    b_plus = SampledField(grid, b.values + 1.0)
    C1 = commutator_s_alpha(b_plus, f0, kspec, ladder, beta).field.values
    scale0 = 1.0 + float(np.max(C0))
    cases.append(
        InequalityReport(
            check="commutator:shift_invariance",
            digest=digest_of({"member": 0, "shift": 1.0}),
            lhs=float(np.max(np.abs(C1 - C0))),
            rhs=0.0,
            constant=1.0,
            constant_provenance="constants cancel in b(x) - b(z)",
            tol=1e-10 * scale0,
            detail={"member": 0},
        )
    )
    b_const = SampledField.constant(grid, 0.75)
    C_const = commutator_s_alpha(b_const, f0, kspec, ladder, beta).field.values
    cases.append(
        InequalityReport(
            check="commutator:constant_symbol",
            digest=digest_of({"member": 0, "level": 0.75}),
            lhs=float(np.max(C_const)),
            rhs=0.0,
            constant=0.0,
            constant_provenance="zero modulation for constant b",
            tol=1e-9,
            detail={"member": 0},
        )
    )
    return SuiteReport(
        suite="commutator_split",
        params={
            "beta": beta,
            "lambda": lam,
            "region_levels": region_levels,
            "alpha": kspec.alpha,
            "mode": kspec.mode,
            "family": family_spec.as_dict(),
            "root_ball": [list(root_ball.center), root_ball.radius],
            "grid": [grid.dim, grid.half_width, grid.points],
        },
        seed=family_spec.seed,
        cases=cases,
    )


def subset_doubling_suite(
    weight: WeightSpec,
    p: float,
    r: float,
    family: BallFamily,
    grid: GridSpec,
    seed: int = 0,
    max_balls: int = 64,
) -> SuiteReport:
    """Subset Hölder ratios on family balls plus the doubling profile."""
    rng = np.random.default_rng(seed)
    cases: list[InequalityReport] = []
    balls = family.balls[:max_balls]
    for ball in balls:
        idx, _ = ball_nodes(grid, ball)
        if idx.size < 2:
            continue
        nodes = grid.nodes()[idx]
        half = idx[nodes[:, 0] <= ball.center[0]]
        random_pick = idx[rng.random(idx.size) < 0.5]
        subsets = [half, random_pick, idx]
        cases.extend(subset_ratio_check(weight, r, ball, subsets, grid))
    eligible = family.doubling_eligible(grid, 0)
    sub = BallFamily(
        balls=tuple(family.balls[i] for i in eligible),
        rule_id=family.rule_id + ":doubling_eligible",
        params=family.params,
        k_max=family.k_max,
        root_index=0,
        family_id=family.family_id,
    )
    rep = doubling_report(weight, p, sub, grid, factors=(2.0,))
    cases.append(
        InequalityReport(
            check="doubling:normalized",
            digest=digest_of({"factor": 2.0, "p": p}),
            lhs=rep.max_normalized,
            rhs=rep.max_normalized,
            constant=rep.max_normalized,
            constant_provenance="empirical family max",
            tol=1e-12 * (1.0 + rep.max_normalized),
            detail={"max_ratio": rep.max_ratio, "balls": len(sub.balls)},
        )
    )
    return SuiteReport(
        suite="subset_doubling",
        params={
            "weight": weight.to_json(),
            "p": p,
            "r": r,
            "family_id": family.family_id,
            "balls_checked": len(balls),
        },
        seed=seed,
        cases=cases,
    )


# ---------------------------------------------------------------------------
# report emission


def emit_report(suites: list, out_dir, config_digest: str) -> dict:
    """Write report.json and summary.csv; returns the report dict.

    Serialization is stable: sorted keys, no timestamps, repr-roundtrip
    floats.  Identical inputs produce byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    report = {
        "config_digest": config_digest,
        "suites": [s.as_dict() for s in suites],
        "summary": {
            "total_suites": len(suites),
            "total_cases": sum(len(s.cases) for s in suites),
            "pass": all(s.summary()["pass"] for s in suites),
        },
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "cases", "max_ratio", "pass"])
        for s in suites:
            sm = s.summary()
            writer.writerow(
                [s.suite, len(s.cases), "%.17g" % sm["max_ratio"], sm["pass"]]
            )
    return report
