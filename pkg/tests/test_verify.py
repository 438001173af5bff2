"""Test families, parameter gates, and the inequality suites end to end."""

import json

import numpy as np
import pytest

from sqlab import TestFamilySpec as FamilySpec
from sqlab import (
    Ball,
    BallFamily,
    ConfigGateError,
    GridSpec,
    HolderClassSpec,
    MorreyParams,
    SampledField,
    TimeLadder,
    WeightSpec,
    aperture_scaling_suite,
    bmo_growth_suite,
    boundedness_suite,
    commutator_split_suite,
    emit_report,
    extend_family,
    generate_members,
    gstar_domination_suite,
    holder_average_suite,
    indicator_field,
    operator_field,
    require_gstar_admissible,
    sample_member,
    step_field,
    subset_doubling_suite,
)

GRID = GridSpec(1, 4.0, 65)
LADDER = TimeLadder(GRID.spacing, 2.0, 4)
KSPEC = HolderClassSpec(0.5, 33, "dictionary")
SMALL_FAMILY = FamilySpec("bumps", 3, 7)


def suite_passes(report) -> bool:
    return report.summary()["pass"]


class TestFamilies:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            FamilySpec("hats", 3, 7)
        with pytest.raises(ValueError):
            FamilySpec("bumps", 0, 7)

    @pytest.mark.parametrize(
        "gen", ["bumps", "dyadic_atoms", "sign_patterns", "random_trig"]
    )
    def test_generators_produce_sampleable_members(self, gen):
        members = generate_members(FamilySpec(gen, 4, 3), 4.0, 1)
        assert len(members) == 4
        for m in members:
            f = sample_member(m, GRID)
            assert np.all(np.isfinite(f.values))
            assert np.any(f.values)

    def test_members_are_deterministic(self):
        a = generate_members(SMALL_FAMILY, 4.0, 1)
        b = generate_members(SMALL_FAMILY, 4.0, 1)
        assert a == b
        c = generate_members(FamilySpec("bumps", 3, 8), 4.0, 1)
        assert a != c

    def test_members_are_grid_independent(self):
        # member parameters depend on the box only; refining the grid must
        # resample the same function, matching on shared nodes exactly
        fine = GRID.refine()
        for gen in ("bumps", "dyadic_atoms", "random_trig"):
            for m in generate_members(FamilySpec(gen, 3, 5), 4.0, 1):
                coarse_vals = sample_member(m, GRID).values
                fine_vals = sample_member(m, fine).values
                assert np.array_equal(fine_vals[::2], coarse_vals), gen

    def test_bumps_vanish_at_box_edge(self):
        for m in generate_members(FamilySpec("bumps", 5, 2), 4.0, 1):
            f = sample_member(m, GRID)
            assert f.values[0] == 0.0 and f.values[-1] == 0.0

    def test_2d_members(self):
        g2 = GridSpec(2, 2.0, 33)
        for gen in ("bumps", "dyadic_atoms", "sign_patterns"):
            m = generate_members(FamilySpec(gen, 2, 4), 2.0, 2)[0]
            f = sample_member(m, g2)
            assert f.values.size == g2.n_nodes and np.any(f.values)


class TestFieldBuilders:
    def test_indicator_is_closed(self, grid257):
        f = indicator_field(grid257, (0.0,), 1.0)
        x = grid257.nodes()[:, 0]
        assert f.values[np.isclose(x, 1.0)] == 1.0
        assert f.values[np.isclose(x, 1.0 + grid257.spacing)] == 0.0

    def test_step_takes_midpoint_on_jump(self, grid257):
        b = step_field(grid257, low=0.0, high=1.0)
        x = grid257.nodes()[:, 0]
        assert b.values[np.isclose(x, 0.0)] == 0.5
        assert b.values[x > 0.1].min() == 1.0 and b.values[x < -0.1].max() == 0.0


class TestGatesAndDispatch:
    def test_gstar_gate(self):
        require_gstar_admissible(4.0, 2.0)
        require_gstar_admissible(3.5, 2.0)
        with pytest.raises(ConfigGateError):
            require_gstar_admissible(3.0, 2.0)
        with pytest.raises(ConfigGateError):
            require_gstar_admissible(4.0, 5.0)
        assert issubclass(ConfigGateError, ValueError)

    def test_operator_dispatch_errors(self):
        f = sample_member(generate_members(SMALL_FAMILY, 4.0, 1)[0], GRID)
        with pytest.raises(ValueError, match="unknown operator"):
            operator_field("riesz", f, KSPEC, LADDER)
        with pytest.raises(ValueError, match="symbol"):
            operator_field("comm_s_alpha", f, KSPEC, LADDER)

    def test_operator_dispatch_matches_direct_call(self):
        from sqlab import a_alpha_field, s_alpha_beta

        f = sample_member(generate_members(SMALL_FAMILY, 4.0, 1)[0], GRID)
        via_id = operator_field("s_alpha", f, KSPEC, LADDER)
        direct = s_alpha_beta(a_alpha_field(f, LADDER, KSPEC)).field
        assert np.array_equal(via_id.values, direct.values)


class TestExtendFamily:
    def test_dedup_and_new_id(self):
        fam = BallFamily.dyadic(GRID)
        existing = fam.balls[0]
        out = extend_family(fam, [existing, Ball((0.0,), 3.3)])
        assert len(out) == len(fam) + 1
        assert out.family_id != fam.family_id
        assert out.root_ball == fam.root_ball

    def test_noop_extension_keeps_balls(self):
        fam = BallFamily.dyadic(GRID)
        out = extend_family(fam, [])
        assert out.balls == fam.balls


class TestSuites:
    def test_boundedness_passes_and_reports_drift(self):
        rep = boundedness_suite(
            "s_alpha",
            SMALL_FAMILY,
            WeightSpec.power(0.5),
            MorreyParams(2.0, 0.5),
            BallFamily.dyadic(GRID),
            KSPEC,
            LADDER,
            GRID,
        )
        assert suite_passes(rep)
        assert rep.params["empirical_max"] > 0
        assert rep.params["refinement_drift"] is not None
        checks = {c.check for c in rep.cases}
        assert "boundedness:s_alpha:scale_invariance" in checks
        assert "boundedness:s_alpha:refinement_drift" in checks

    def test_boundedness_commutator_resamples_symbol(self):
        rep = boundedness_suite(
            "comm_s_alpha",
            FamilySpec("bumps", 2, 7),
            WeightSpec.power(0.5),
            MorreyParams(2.0, 0.5),
            BallFamily.dyadic(GRID),
            KSPEC,
            LADDER,
            GRID,
            b_builder=lambda g: step_field(g),
            refine=True,
        )
        assert suite_passes(rep)

    def test_boundedness_gstar_requires_admissible_lambda(self):
        with pytest.raises(ConfigGateError):
            boundedness_suite(
                "g_star",
                SMALL_FAMILY,
                WeightSpec.power(0.5),
                MorreyParams(2.0, 0.5),
                BallFamily.dyadic(GRID),
                KSPEC,
                LADDER,
                GRID,
                lam=2.0,
            )

    def test_boundedness_tight_drift_bound_fails_honestly(self):
        rep = boundedness_suite(
            "s_alpha",
            FamilySpec("bumps", 2, 7),
            WeightSpec.power(0.5),
            MorreyParams(2.0, 0.5),
            BallFamily.dyadic(GRID),
            KSPEC,
            LADDER,
            GRID,
            drift_bound=1e-12,
        )
        drift_cases = [c for c in rep.cases if c.check.endswith("refinement_drift")]
        assert drift_cases and not drift_cases[0].passed
        assert not suite_passes(rep)

    def test_aperture_unit_base_and_monotone(self):
        rep = aperture_scaling_suite(
            SMALL_FAMILY,
            WeightSpec.power(0.5),
            2.0,
            KSPEC,
            LADDER,
            GRID,
            j_max=3,
        )
        assert suite_passes(rep)
        unit = [c for c in rep.cases if c.check == "aperture:unit_base"]
        assert unit and all(c.lhs == 0.0 and c.tol == 0.0 for c in unit)
        assert any(c.check == "aperture:growth" for c in rep.cases)

    def test_gstar_domination(self):
        rep = gstar_domination_suite(
            FamilySpec("bumps", 3, 7),
            KSPEC,
            LADDER,
            GRID,
            lam=4.0,
            region_levels=4,
        )
        assert suite_passes(rep)
        checks = {c.check for c in rep.cases}
        assert "gstar:region_domination" in checks
        assert "gstar:cone_lower_bound" in checks
        assert "gstar:lambda_monotone" in checks

    def test_bmo_growth_exact_chain(self, grid257):
        rep = bmo_growth_suite(step_field(grid257), Ball((0.0,), 0.125), 4, grid257)
        assert suite_passes(rep)
        assert all(c.constant == 2.0 * (k + 1) for k, c in enumerate(rep.cases))

    def test_bmo_growth_rejects_escaping_chain(self, grid257):
        with pytest.raises(ValueError, match="leaves the box"):
            bmo_growth_suite(step_field(grid257), Ball((0.0,), 1.0), 4, grid257)

    def test_holder_average(self, grid257):
        rep = holder_average_suite(
            FamilySpec("bumps", 3, 7),
            WeightSpec.power(0.5),
            MorreyParams(2.0, 0.5),
            BallFamily.dyadic(grid257),
            Ball((0.0,), 0.125),
            4,
            grid257,
        )
        assert suite_passes(rep)

    def test_holder_average_needs_p_above_one(self, grid257):
        with pytest.raises(ConfigGateError):
            holder_average_suite(
                SMALL_FAMILY,
                WeightSpec.power(0.5),
                MorreyParams(1.0, 0.5),
                BallFamily.dyadic(grid257),
                Ball((0.0,), 0.125),
                2,
                grid257,
            )

    def test_commutator_split(self):
        rep = commutator_split_suite(
            FamilySpec("bumps", 2, 7),
            step_field(GRID),
            KSPEC,
            LADDER,
            GRID,
            root_ball=Ball((0.0,), 2.0),
            morrey=MorreyParams(2.0, 0.5),
            weight=WeightSpec.power(0.5),
            balls=BallFamily.dyadic(GRID),
        )
        assert suite_passes(rep)
        checks = {c.check for c in rep.cases}
        assert "commutator:split" in checks
        assert "commutator:shift_invariance" in checks
        assert "commutator:constant_symbol" in checks

    def test_subset_doubling(self, grid257):
        rep = subset_doubling_suite(
            WeightSpec.power(0.5),
            2.0,
            2.0,
            BallFamily.dyadic(grid257),
            grid257,
        )
        assert suite_passes(rep)
        assert any(c.check == "doubling:normalized" for c in rep.cases)


class TestEmitReport:
    def test_deterministic_bytes_and_content(self, grid257, tmp_path):
        suites = [
            bmo_growth_suite(step_field(grid257), Ball((0.0,), 0.125), 3, grid257)
        ]
        d1, d2 = tmp_path / "a", tmp_path / "b"
        rep = emit_report(suites, d1, "cfg123")
        emit_report(suites, d2, "cfg123")
        assert (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes()
        assert (d1 / "summary.csv").read_bytes() == (d2 / "summary.csv").read_bytes()
        assert rep["summary"]["pass"] is True
        assert rep["config_digest"] == "cfg123"
        on_disk = json.loads((d1 / "report.json").read_text())
        assert on_disk == rep
        header = (d1 / "summary.csv").read_text().splitlines()[0]
        assert header == "suite,cases,max_ratio,pass"
