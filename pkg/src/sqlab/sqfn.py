"""Square functions over a shared intrinsic-supremum field.

Every operator here consumes one AalphaField A(y, t_k) and differs only in
how it aggregates over the half-space: cone integral (aperture beta), the
diagonal y = x, or the fully weighted half-space with dyadic region
truncation.  The time integral is the geometric-ladder sum with constant
dlog t weight; the spatial integral is the global trapezoid rule with the
explicit t^{-dim} density.

Commutator variants replace A by the modulated supremum
G(x; y, t) = sup_phi |int (b(x) - b(z)) phi_t(y - z) f(z) dz|, evaluated
through the split b(x) c(f) - c(b f).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    SampledField,
    TimeLadder,
    field_to_csv,
    grid_weights,
)
from .kernels import (
    AalphaField,
    HolderClassSpec,
    KernelProgram,
    _solve_radial,
    assemble_program,
    dictionary_responses,
    solve_program,
    support_inside_box,
)

__all__ = [
    "SqfnResult",
    "s_alpha_beta",
    "g_alpha",
    "g_star",
    "commutator_s_alpha",
    "commutator_g_alpha",
    "commutator_g_star",
]


@dataclass
class SqfnResult:
    """A square-function field plus the metadata needed to reproduce it."""

    field: SampledField
    operator: str
    params: dict
    ladder: TimeLadder
    kernel_hash: str
    mode: str

    def sidecar(self) -> dict:
        return {
            "operator": self.operator,
            "params": self.params,
            "ladder": {
                "t_min": self.ladder.t_min,
                "t_max": self.ladder.t_max,
                "levels": self.ladder.levels,
            },
            "kernel_spec": self.kernel_hash,
            "mode": self.mode,
            "truncation": {
                "support": "contributions vanish where B(y, t) leaves the box",
                "region_levels": self.params.get("region_levels"),
            },
        }

    def write(self, base_path) -> None:
        """CSV of the field next to a JSON sidecar: base.csv, base.json."""
        import json

        base = str(base_path)
        field_to_csv(self.field, base + ".csv")
        with open(base + ".json", "w") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _chunk_rows(n: int) -> int:
    # keep chunk x n distance blocks around 4M doubles
    return max(1, min(n, 4_000_000 // max(n, 1)))


def _pairwise_dist(rows: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    d = rows[:, None, :] - nodes[None, :, :]
    return np.sqrt(np.sum(d * d, axis=2))


def s_alpha_beta(A: AalphaField, beta: float = 1.0) -> SqfnResult:
    """Cone square function: aperture beta, strict cone |x - y| < beta t.

    S(x)^2 = sum_k dlog t_k^{-dim} sum_{|x-y| < beta t_k} q_y A(y, t_k)^2.
    """
    if not beta > 0:
        raise ValueError(f"aperture beta must be positive, got {beta}")
    grid = A.grid
    q = grid_weights(grid)
    nodes = grid.nodes()
    t = A.ladder.nodes
    dlog = A.ladder.dlog
    dim = grid.dim
    n = grid.n_nodes
    out = np.zeros(n)
    for lo in range(0, n, _chunk_rows(n)):
        hi = min(lo + _chunk_rows(n), n)
        D = _pairwise_dist(nodes[lo:hi], nodes)
        acc = np.zeros(hi - lo)
        for k in range(t.size):
            tk = float(t[k])
            contrib = q * A.values[k] ** 2
            inside = D < beta * tk
            acc += (dlog * tk**-dim) * np.sum(
                np.where(inside, contrib[None, :], 0.0), axis=1
            )
        out[lo:hi] = acc
    return SqfnResult(
        field=SampledField(grid, np.sqrt(out)),
        operator="s_alpha_beta",
        params={"alpha": A.spec.alpha, "beta": beta},
        ladder=A.ladder,
        kernel_hash=A.spec_hash,
        mode=A.mode,
    )


def g_alpha(A: AalphaField) -> SqfnResult:
    """Diagonal square function: g(x)^2 = sum_k dlog A(x, t_k)^2."""
    grid = A.grid
    dlog = A.ladder.dlog
    out = np.zeros(grid.n_nodes)
    for k in range(A.ladder.levels):
        out += dlog * A.values[k] ** 2
    return SqfnResult(
        field=SampledField(grid, np.sqrt(out)),
        operator="g_alpha",
        params={"alpha": A.spec.alpha},
        ladder=A.ladder,
        kernel_hash=A.spec_hash,
        mode=A.mode,
    )


def g_star(A: AalphaField, lam: float, region_levels: int | None = None) -> SqfnResult:
    """Half-space square function with decay weight (t / (t + |x-y|))^{lam dim}.

    With ``region_levels`` = J the spatial sum is truncated to |x - y| < 2^J t,
    the union of the central cone and J dyadic annular regions.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    grid = A.grid
    q = grid_weights(grid)
    nodes = grid.nodes()
    t = A.ladder.nodes
    dlog = A.ladder.dlog
    dim = grid.dim
    n = grid.n_nodes
    out = np.zeros(n)
    for lo in range(0, n, _chunk_rows(n)):
        hi = min(lo + _chunk_rows(n), n)
        D = _pairwise_dist(nodes[lo:hi], nodes)
        acc = np.zeros(hi - lo)
        for k in range(t.size):
            tk = float(t[k])
            contrib = q * A.values[k] ** 2
            W = (tk / (tk + D)) ** (lam * dim)
            if region_levels is not None:
                W = np.where(D < 2.0**region_levels * tk, W, 0.0)
            acc += (dlog * tk**-dim) * np.sum(W * contrib[None, :], axis=1)
        out[lo:hi] = acc
    return SqfnResult(
        field=SampledField(grid, np.sqrt(out)),
        operator="g_star",
        params={"alpha": A.spec.alpha, "lambda": lam, "region_levels": region_levels},
        ladder=A.ladder,
        kernel_hash=A.spec_hash,
        mode=A.mode,
    )


# ---------------------------------------------------------------------------
# commutators


def _modulated_lp_value(prog1, prog2, beta: float, spec: HolderClassSpec) -> float:
    prog = KernelProgram(
        spec=spec,
        dim=prog1.dim,
        c_full=beta * prog1.c_full - prog2.c_full,
        y=prog1.y,
        t=prog1.t,
    )
    if spec.mode == "radial_lp":
        return abs(_solve_radial(prog))
    return abs(solve_program(prog).value)


def _commutator_field(
    b: SampledField,
    f: SampledField,
    spec: HolderClassSpec,
    ladder: TimeLadder,
    kind: str,
    beta: float = 1.0,
    lam: float = 0.0,
    region_levels: int | None = None,
) -> np.ndarray:
    """Shared quadrature for the three commutator square functions."""
    grid = f.grid
    ladder.validate_for(grid)
    if b.grid != grid:
        raise ValueError("b and f must share a grid")
    q = grid_weights(grid)
    nodes = grid.nodes()
    t = ladder.nodes
    dlog = ladder.dlog
    dim = grid.dim
    n = grid.n_nodes
    bx = b.values
    out = np.zeros(n)

    if spec.mode == "dictionary":
        Rf = dictionary_responses(f, ladder, spec)
        Rbf = dictionary_responses(b * f, ladder, spec)
        nd = Rf.shape[0]
        for lo in range(0, n, _chunk_rows(n)):
            hi = min(lo + _chunk_rows(n), n)
            D = None if kind == "g" else _pairwise_dist(nodes[lo:hi], nodes)
            acc = np.zeros(hi - lo)
            for k in range(t.size):
                tk = float(t[k])
                if kind == "g":
                    G = np.zeros(hi - lo)
                    for d in range(nd):
                        G = np.maximum(
                            G, np.abs(bx[lo:hi] * Rf[d, k, lo:hi] - Rbf[d, k, lo:hi])
                        )
                    acc += dlog * G**2
                    continue
                G = np.zeros((hi - lo, n))
                for d in range(nd):
                    G = np.maximum(
                        G, np.abs(bx[lo:hi, None] * Rf[d, k][None, :] - Rbf[d, k][None, :])
                    )
                contrib = q[None, :] * G**2
                if kind == "s":
                    inside = D < beta * tk
                    acc += (dlog * tk**-dim) * np.sum(
                        np.where(inside, contrib, 0.0), axis=1
                    )
                else:
                    W = (tk / (tk + D)) ** (lam * dim)
                    if region_levels is not None:
                        W = np.where(D < 2.0**region_levels * tk, W, 0.0)
                    acc += (dlog * tk**-dim) * np.sum(W * contrib, axis=1)
            out[lo:hi] = acc
        return np.sqrt(out)

    # LP modes: assemble the two coefficient vectors once per (y, t), then
    # solve per output point x (the objective depends on x through b(x) only)
    bf = b * f
    for k in range(t.size):
        tk = float(t[k])
        inside_t = support_inside_box(grid, nodes, tk)
        for j in range(n):
            if not inside_t[j]:
                continue
            if kind == "g":
                xs = np.array([j])
            elif kind == "s":
                dist = np.sqrt(np.sum((nodes - nodes[j]) ** 2, axis=1))
                xs = np.nonzero(dist < beta * tk)[0]
            else:
                dist = np.sqrt(np.sum((nodes - nodes[j]) ** 2, axis=1))
                if region_levels is not None:
                    xs = np.nonzero(dist < 2.0**region_levels * tk)[0]
                else:
                    xs = np.arange(n)
            if xs.size == 0:
                continue
            p1 = assemble_program(f, nodes[j], tk, spec)
            p2 = assemble_program(bf, nodes[j], tk, spec)
            for i in xs:
                val = _modulated_lp_value(p1, p2, float(bx[i]), spec)
                if kind == "g":
                    out[i] += dlog * val**2
                elif kind == "s":
                    out[i] += dlog * tk**-dim * q[j] * val**2
                else:
                    dij = float(np.sqrt(np.sum((nodes[i] - nodes[j]) ** 2)))
                    w = (tk / (tk + dij)) ** (lam * dim)
                    out[i] += dlog * tk**-dim * w * q[j] * val**2
    return np.sqrt(out)


def commutator_s_alpha(
    b: SampledField,
    f: SampledField,
    spec: HolderClassSpec,
    ladder: TimeLadder,
    beta: float = 1.0,
) -> SqfnResult:
    """Cone square function of the commutator modulation [b, .]."""
    if not beta > 0:
        raise ValueError(f"aperture beta must be positive, got {beta}")
    values = _commutator_field(b, f, spec, ladder, "s", beta=beta)
    return SqfnResult(
        field=SampledField(f.grid, values),
        operator="comm_s_alpha",
        params={"alpha": spec.alpha, "beta": beta},
        ladder=ladder,
        kernel_hash=spec.spec_hash(f.grid.dim),
        mode=spec.mode,
    )


def commutator_g_alpha(
    b: SampledField,
    f: SampledField,
    spec: HolderClassSpec,
    ladder: TimeLadder,
) -> SqfnResult:
    """Diagonal square function of the commutator modulation."""
    values = _commutator_field(b, f, spec, ladder, "g")
    return SqfnResult(
        field=SampledField(f.grid, values),
        operator="comm_g_alpha",
        params={"alpha": spec.alpha},
        ladder=ladder,
        kernel_hash=spec.spec_hash(f.grid.dim),
        mode=spec.mode,
    )


def commutator_g_star(
    b: SampledField,
    f: SampledField,
    spec: HolderClassSpec,
    ladder: TimeLadder,
    lam: float,
    region_levels: int | None = None,
) -> SqfnResult:
    """Weighted half-space square function of the commutator modulation."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    values = _commutator_field(
        b, f, spec, ladder, "gstar", lam=lam, region_levels=region_levels
    )
    return SqfnResult(
        field=SampledField(f.grid, values),
        operator="comm_g_star",
        params={"alpha": spec.alpha, "lambda": lam, "region_levels": region_levels},
        ladder=ladder,
        kernel_hash=spec.spec_hash(f.grid.dim),
        mode=spec.mode,
    )
