"""Command-line front end: sqfn | norms | weights | verify | extremizer.

One JSON config drives every subcommand; missing sections take defaults, so
``sqlab verify --out reports`` runs the full default suite stack.  Exit
codes: 0 success, 1 verification or runtime failure, 2 configuration error.

Threading never changes results: worker counts only spread per-member work,
and reports carry no machine or timing information, so a run with
``--threads 8`` writes byte-identical files to a serial run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .grid import GridSpec, SampledField, TimeLadder, field_from_csv, field_to_csv
from .kernels import (
    HolderClassSpec,
    SolverError,
    a_alpha_field,
    assemble_program,
    solve_program,
)
from .reports import digest_of
from .spaces import MorreyParams, bmo_norm, lebesgue_norm, morrey_norm, weighted_maximal
from .sqfn import (
    commutator_g_alpha,
    commutator_g_star,
    commutator_s_alpha,
    g_alpha,
    g_star,
    s_alpha_beta,
)
from .verify import (
    ConfigGateError,
    OPERATOR_IDS,
    TestFamilySpec,
    aperture_scaling_suite,
    bmo_growth_suite,
    boundedness_suite,
    commutator_split_suite,
    emit_report,
    generate_members,
    gstar_domination_suite,
    holder_average_suite,
    indicator_field,
    require_gstar_admissible,
    sample_member,
    step_field,
    subset_doubling_suite,
)
from .weights import (
    Ball,
    BallFamily,
    WeightSpec,
    ap_characteristic,
    doubling_report,
    dual_weight,
    rh_constant,
)

__all__ = ["main", "RunConfig", "DEFAULT_CONFIG"]

SUITE_NAMES = (
    "boundedness",
    "aperture",
    "gstar_domination",
    "bmo_growth",
    "holder_average",
    "commutator_split",
    "subset_doubling",
)

DEFAULT_CONFIG: dict = {
    "grid": {"dim": 1, "half_width": 4.0, "points": 257},
    "ladder": {"t_min": None, "t_max": 2.0, "levels": 24},
    "kernel": {"alpha": 0.5, "m": 65, "mode": "dictionary"},
    "cone": {"beta": 1.0},
    "gstar": {"lambda": 4.0, "region_levels": 6},
    "weight": {"kind": "power", "gamma": 0.5, "center": [0.0]},
    "morrey": {"p": 2.0, "kappa": 0.5},
    "rh": {"r": 2.0},
    "balls": {"radius_base": None, "levels": 7, "center_step": None, "k_max": 3},
    "family": {
        "generator": "bumps",
        "count": 50,
        "seed": 7,
        "amplitude": [0.2, 1.2],
        "scale": [0.3, 1.5],
    },
    "bfield": {"kind": "step", "location": 0.0, "axis": 0, "low": 0.0, "high": 1.0},
    "chain": {"base_radius": None, "k_max": 4},
    "aperture": {"j_max": 4, "growth_margin": 0.10},
    "drift_bound": 0.25,
    "refine": True,
    "suites": list(SUITE_NAMES),
    "operators": ["s_alpha", "g_alpha", "g_star", "comm_s_alpha"],
    "input": {"type": "family_member", "index": 0},
    "sqfn": {"operator": "s_alpha"},
    "extremizer": {"points": [[0.0]], "scales": [1.0]},
    "threads": 1,
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _merge(defaults: dict, override: dict) -> dict:
    out = {}
    for key, base in defaults.items():
        if key in override and isinstance(base, dict) and isinstance(override[key], dict):
            merged = dict(base)
            merged.update(override[key])
            out[key] = merged
        elif key in override:
            out[key] = override[key]
        else:
            out[key] = json.loads(json.dumps(base))
    unknown = sorted(set(override) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return out


class RunConfig:
    """Validated run configuration with constructed domain objects."""

    def __init__(self, raw: dict):
        cfg = _merge(DEFAULT_CONFIG, raw)
        self.raw = cfg
        try:
            g = cfg["grid"]
            self.grid = GridSpec(int(g["dim"]), float(g["half_width"]), int(g["points"]))
            lad = cfg["ladder"]
            t_min = lad["t_min"]
            t_min = self.grid.spacing if t_min is None else float(t_min)
            self.ladder = TimeLadder(t_min, float(lad["t_max"]), int(lad["levels"]))
            self.ladder.validate_for(self.grid)
            k = cfg["kernel"]
            self.kernel = HolderClassSpec(float(k["alpha"]), int(k["m"]), str(k["mode"]))
            self.kernel.kernel_grid(self.grid.dim)
            self.beta = float(cfg["cone"]["beta"])
            if not self.beta > 0:
                raise ConfigError(f"cone aperture must be positive, got {self.beta}")
            self.lam = float(cfg["gstar"]["lambda"])
            self.region_levels = int(cfg["gstar"]["region_levels"])
            self.weight = WeightSpec.from_json(cfg["weight"])
            m = cfg["morrey"]
            self.morrey = MorreyParams(float(m["p"]), float(m["kappa"]))
            self.rh_r = float(cfg["rh"]["r"])
            if not self.rh_r > 1:
                raise ConfigError(f"reverse-Hölder exponent must exceed 1, got {self.rh_r}")
            b = cfg["balls"]
            self.balls = BallFamily.dyadic(
                self.grid,
                radius_base=b["radius_base"],
                levels=int(b["levels"]),
                center_step=b["center_step"],
                k_max=int(b["k_max"]),
            )
            fam = cfg["family"]
            self.family = TestFamilySpec(
                generator=str(fam["generator"]),
                count=int(fam["count"]),
                seed=int(fam["seed"]),
                amplitude=tuple(fam["amplitude"]),
                scale=tuple(fam["scale"]),
            )
            ch = cfg["chain"]
            base_r = ch["base_radius"]
            self.chain_base = Ball(
                (0.0,) * self.grid.dim,
                self.grid.half_width / 32.0 if base_r is None else float(base_r),
            )
            self.chain_k_max = int(ch["k_max"])
            ap = cfg["aperture"]
            self.aperture_j_max = int(ap["j_max"])
            self.aperture_margin = float(ap["growth_margin"])
            self.drift_bound = float(cfg["drift_bound"])
            self.refine = bool(cfg["refine"])
            self.suites = list(cfg["suites"])
            for name in self.suites:
                if name not in SUITE_NAMES:
                    raise ConfigError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
            self.operators = list(cfg["operators"])
            for op in self.operators:
                if op not in OPERATOR_IDS:
                    raise ConfigError(f"unknown operator {op!r}; choose from {OPERATOR_IDS}")
            self.threads = int(cfg["threads"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad config structure: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        # gates that span sections
        needs_gstar = "g_star" in self.operators or "comm_g_star" in self.operators
        if ("boundedness" in self.suites and needs_gstar) or (
            "gstar_domination" in self.suites
        ):
            try:
                require_gstar_admissible(self.lam, self.morrey.p)
            except ConfigGateError as exc:
                raise ConfigError(str(exc)) from exc
        if not self.weight.is_admissible(self.morrey.p, self.grid.dim):
            raise ConfigError(
                f"weight exponent outside the admissible window for p={self.morrey.p}, "
                f"dim={self.grid.dim}"
            )

    @property
    def digest(self) -> str:
        semantic = {k: v for k, v in self.raw.items() if k != "threads"}
        return digest_of(semantic)

    def b_field(self, grid: GridSpec) -> SampledField:
        spec = self.raw["bfield"]
        kind = spec.get("kind", "step")
        if kind == "step":
            return step_field(
                grid,
                location=float(spec.get("location", 0.0)),
                axis=int(spec.get("axis", 0)),
                low=float(spec.get("low", 0.0)),
                high=float(spec.get("high", 1.0)),
            )
        if kind == "csv":
            return field_from_csv(spec["path"])
        raise ConfigError(f"unknown bfield kind {kind!r}")

    def input_field(self) -> SampledField:
        spec = self.raw["input"]
        kind = spec.get("type", "family_member")
        if kind == "family_member":
            members = generate_members(self.family, self.grid.half_width, self.grid.dim)
            idx = int(spec.get("index", 0))
            if not 0 <= idx < len(members):
                raise ConfigError(f"family member index {idx} out of range")
            return sample_member(members[idx], self.grid)
        if kind == "indicator":
            return indicator_field(
                self.grid, spec.get("center", [0.0] * self.grid.dim),
                float(spec["radius"]),
            )
        if kind == "step":
            return step_field(
                self.grid,
                location=float(spec.get("location", 0.0)),
                axis=int(spec.get("axis", 0)),
                low=float(spec.get("low", 0.0)),
                high=float(spec.get("high", 1.0)),
            )
        if kind == "csv":
            return field_from_csv(spec["path"])
        raise ConfigError(f"unknown input type {kind!r}")


def _resolve_threads(flag: int | None, cfg: RunConfig) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("SQLAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"SQLAB_THREADS must be an integer, got {env!r}") from exc
    return max(1, cfg.threads)


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_weights(cfg: RunConfig, out_dir: str, threads: int) -> int:
    w, p, grid = cfg.weight, cfg.morrey.p, cfg.grid
    ap = ap_characteristic(w, p, cfg.balls, grid)
    rh = rh_constant(w, cfg.rh_r, cfg.balls, grid)
    eligible = cfg.balls.doubling_eligible(grid, 0)
    sub = BallFamily(
        balls=tuple(cfg.balls.balls[i] for i in eligible),
        rule_id=cfg.balls.rule_id + ":doubling_eligible",
        params=cfg.balls.params,
        k_max=cfg.balls.k_max,
        root_index=0,
        family_id=cfg.balls.family_id,
    )
    doubling = doubling_report(w, p, sub, grid, factors=(2.0,))
    out = {
        "weight": w.to_json(),
        "dual_weight": dual_weight(w, p).to_json() if p > 1 else None,
        "admissible": w.is_admissible(p, grid.dim),
        "p": p,
        "ap": ap.as_dict(),
        "rh": {"r": cfg.rh_r, "constant": rh},
        "doubling": doubling.as_dict(),
        "family_id": cfg.balls.family_id,
        "ball_count": len(cfg.balls),
    }
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "weights.json"), out)
    print(f"A_p supremum {ap.supremum:.6g} over {len(cfg.balls)} balls "
          f"(overflow={ap.overflow}); RH constant {rh:.6g}")
    return 0


def _cmd_norms(cfg: RunConfig, out_dir: str, threads: int) -> int:
    f = cfg.input_field()
    b = cfg.b_field(cfg.grid)
    leb = lebesgue_norm(f, cfg.morrey.p, cfg.weight)
    mor = morrey_norm(f, cfg.morrey, cfg.weight, cfg.balls)
    osc = bmo_norm(b, cfg.balls)
    maximal = weighted_maximal(f, cfg.weight, cfg.balls)
    out = {
        "lebesgue": {"p": cfg.morrey.p, "value": leb},
        "morrey": mor.as_dict(),
        "bmo_of_b": osc.as_dict(),
        "maximal_sup": float(maximal.values.max()),
        "weight": cfg.weight.to_json(),
    }
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "norms.json"), out)
    print(f"Lebesgue {leb:.6g}; Morrey {mor.value:.6g} "
          f"(ball #{mor.achieving_index}); BMO(b) {osc.value:.6g}")
    return 0


def _cmd_sqfn(cfg: RunConfig, out_dir: str, threads: int) -> int:
    op = cfg.raw["sqfn"]["operator"]
    if op not in OPERATOR_IDS:
        raise ConfigError(f"unknown operator {op!r}; choose from {OPERATOR_IDS}")
    if "g_star" in op:
        require_gstar_admissible(cfg.lam, cfg.morrey.p)
    f = cfg.input_field()
    if op.startswith("comm_"):
        b = cfg.b_field(cfg.grid)
        if op == "comm_s_alpha":
            result = commutator_s_alpha(b, f, cfg.kernel, cfg.ladder, cfg.beta)
        elif op == "comm_g_alpha":
            result = commutator_g_alpha(b, f, cfg.kernel, cfg.ladder)
        else:
            result = commutator_g_star(
                b, f, cfg.kernel, cfg.ladder, cfg.lam, cfg.region_levels
            )
    else:
        A = a_alpha_field(f, cfg.ladder, cfg.kernel, threads=threads)
        if op == "s_alpha":
            result = s_alpha_beta(A, cfg.beta)
        elif op == "g_alpha":
            result = g_alpha(A)
        else:
            result = g_star(A, cfg.lam, cfg.region_levels)
    os.makedirs(out_dir, exist_ok=True)
    result.write(os.path.join(out_dir, f"sqfn_{op}"))
    v = result.field.values
    print(f"{op}: field max {float(v.max()):.6g}, "
          f"support nodes {int((v > 0).sum())}/{v.size}")
    return 0


def _cmd_extremizer(cfg: RunConfig, out_dir: str, threads: int) -> int:
    f = cfg.input_field()
    spec = HolderClassSpec(cfg.kernel.alpha, cfg.kernel.m, "lp")
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    ex = cfg.raw["extremizer"]
    pairs = [(pt, sc) for pt in ex["points"] for sc in ex["scales"]]
    for i, (pt, sc) in enumerate(pairs):
        prog = assemble_program(f, pt, float(sc), spec)
        sol = solve_program(prog)
        field_to_csv(sol.extremizer, os.path.join(out_dir, f"extremizer_{i}.csv"))
        entries.append(
            {
                "point": list(map(float, pt)),
                "scale": float(sc),
                "value": sol.value,
                "residuals": sol.residuals,
                "iterations": sol.stats["iterations"],
            }
        )
        print(f"extremizer {i}: value {sol.value:.9g} at y={pt}, t={sc}")
    _write_json(
        os.path.join(out_dir, "extremizer.json"),
        {"alpha": spec.alpha, "m": spec.m, "entries": entries},
    )
    return 0


def _build_suites(cfg: RunConfig, threads: int) -> list:
    suites = []
    for name in cfg.suites:
        if name == "boundedness":
            for op in cfg.operators:
                suites.append(
                    boundedness_suite(
                        op, cfg.family, cfg.weight, cfg.morrey, cfg.balls,
                        cfg.kernel, cfg.ladder, cfg.grid,
                        beta=cfg.beta, lam=cfg.lam,
                        region_levels=cfg.region_levels,
                        b_builder=cfg.b_field if op.startswith("comm_") else None,
                        drift_bound=cfg.drift_bound, refine=cfg.refine,
                        threads=threads,
                    )
                )
        elif name == "aperture":
            suites.append(
                aperture_scaling_suite(
                    cfg.family, cfg.weight, cfg.morrey.p, cfg.kernel,
                    cfg.ladder, cfg.grid,
                    j_max=cfg.aperture_j_max, growth_margin=cfg.aperture_margin,
                    threads=threads,
                )
            )
        elif name == "gstar_domination":
            suites.append(
                gstar_domination_suite(
                    cfg.family, cfg.kernel, cfg.ladder, cfg.grid,
                    lam=cfg.lam, region_levels=cfg.region_levels, threads=threads,
                )
            )
        elif name == "bmo_growth":
            suites.append(
                bmo_growth_suite(
                    cfg.b_field(cfg.grid), cfg.chain_base, cfg.chain_k_max, cfg.grid
                )
            )
        elif name == "holder_average":
            suites.append(
                holder_average_suite(
                    cfg.family, cfg.weight, cfg.morrey, cfg.balls,
                    cfg.chain_base, cfg.chain_k_max, cfg.grid,
                )
            )
        elif name == "commutator_split":
            suites.append(
                commutator_split_suite(
                    cfg.family, cfg.b_field(cfg.grid), cfg.kernel, cfg.ladder,
                    cfg.grid,
                    beta=cfg.beta, lam=cfg.lam, region_levels=cfg.region_levels,
                    root_ball=cfg.balls.root_ball, morrey=cfg.morrey,
                    weight=cfg.weight, balls=cfg.balls, threads=threads,
                )
            )
        elif name == "subset_doubling":
            suites.append(
                subset_doubling_suite(
                    cfg.weight, cfg.morrey.p, cfg.rh_r, cfg.balls, cfg.grid,
                    seed=cfg.family.seed,
                )
            )
    return suites


def _cmd_verify(cfg: RunConfig, out_dir: str, threads: int, serial_audit: bool) -> int:
    suites = _build_suites(cfg, threads)
    report = emit_report(suites, out_dir, cfg.digest)
    for s in suites:
        sm = s.summary()
        status = "PASS" if sm["pass"] else "FAIL"
        print(f"{s.suite}: {status} ({len(s.cases)} cases, "
              f"max_ratio {sm['max_ratio']:.6g})")
    mismatches = 0
    if serial_audit:
        audit = _build_suites(cfg, threads=1)
        for threaded, serial in zip(suites, audit):
            a = json.dumps(threaded.as_dict(), sort_keys=True)
            s = json.dumps(serial.as_dict(), sort_keys=True)
            if a != s:
                mismatches += 1
        print(f"serial audit: {mismatches} mismatches across {len(suites)} suites")
    if mismatches:
        return 1
    return 0 if report["summary"]["pass"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqlab",
        description="Desk-scale checks for intrinsic square functions on sampled data",
    )
    parser.add_argument("command", choices=["sqfn", "norms", "weights", "verify", "extremizer"])
    parser.add_argument("--config", help="JSON config path; defaults apply when omitted")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (overrides SQLAB_THREADS and config)")
    parser.add_argument("--serial-audit", action="store_true",
                        help="verify only: recompute serially and compare bitwise")
    args = parser.parse_args(argv)
    try:
        raw = {}
        if args.config is not None:
            with open(args.config) as fh:
                raw = json.load(fh)
        cfg = RunConfig(raw)
        threads = _resolve_threads(args.threads, cfg)
    except (ConfigError, ConfigGateError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "weights":
            return _cmd_weights(cfg, args.out, threads)
        if args.command == "norms":
            return _cmd_norms(cfg, args.out, threads)
        if args.command == "sqfn":
            return _cmd_sqfn(cfg, args.out, threads)
        if args.command == "extremizer":
            return _cmd_extremizer(cfg, args.out, threads)
        return _cmd_verify(cfg, args.out, threads, args.serial_audit)
    except (ConfigError, ConfigGateError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
