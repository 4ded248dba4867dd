import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abmetric import classifier as C
from abmetric.errors import (
    DegenerateAngular,
    InsufficientSamples,
    NotPolynomial,
    PreconditionNotMet,
    RankDeficient,
    ZeroBeta,
)
from abmetric.fixtures import builtin
from abmetric.geometry import MetricField, OneFormField, beta_data, beta_tensors
from abmetric.scalars import PhiSpec, s_grid

RANDERS = PhiSpec.randers()
ALL_PHI = [PhiSpec.riemannian(), PhiSpec.randers(), PhiSpec.power(1), PhiSpec.power(2),
           PhiSpec.quadratic(), PhiSpec.randers_type(1.0, 0.5, 0.3)]


def unit_directions(count, n=2):
    t = np.linspace(0, 2 * np.pi, count, endpoint=False)
    Y = np.stack([np.cos(t), np.sin(t)], axis=1)
    return Y if n == 2 else np.column_stack([Y, np.zeros((count, n - 2))])


class TestFits:
    def test_exact_isotropic(self):
        Y = unit_directions(8)
        F = 1 + 0.3 * Y[:, 0]
        fit = C.isotropic_s_fit(3 * 0.5 * F, F, 2)
        assert fit.verdict and fit.c == pytest.approx(0.5, abs=1e-14)

    def test_linear_term_breaks_isotropy(self):
        Y = unit_directions(8)
        F = 1 + 0.3 * Y[:, 0]
        S = 1.5 * F + 0.2 * Y[:, 1]
        assert not C.isotropic_s_fit(S, F, 2).verdict
        weak = C.weak_isotropic_s_fit(S, F, Y, 2)
        assert weak.verdict
        assert weak.c == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(weak.eta, [0.0, 0.2], atol=1e-12)

    def test_zero_data(self):
        Y = unit_directions(8)
        fit = C.isotropic_s_fit(np.zeros(8), np.ones(8), 2)
        assert fit.verdict and fit.c == 0.0 and fit.residual == 0.0

    def test_insufficient(self):
        with pytest.raises(InsufficientSamples):
            C.isotropic_s_fit([1.0, 2.0], [1.0, 1.0], 2)

    def test_rank_deficient(self):
        Y = np.tile([1.0, 0.0], (6, 1))
        with pytest.raises(RankDeficient):
            C.weak_isotropic_s_fit(np.ones(6), np.ones(6), Y, 2)

    def test_e_zero(self):
        Y = unit_directions(6)
        h = np.array([np.eye(2) - np.outer(y, y) for y in Y])
        fit = C.isotropic_e_fit(np.zeros((6, 2, 2)), h, np.ones(6), 2, Y)
        assert fit.verdict and fit.c == 0.0

    def test_e_exact(self):
        Y = unit_directions(6)
        h = np.array([np.eye(2) - np.outer(y, y) for y in Y])
        F = np.full(6, 2.0)
        fit = C.isotropic_e_fit(1.5 * 0.25 * h / 2.0, h, F, 2, Y)
        assert fit.c == pytest.approx(0.25, abs=1e-14) and fit.verdict

    def test_degenerate_angular(self):
        Y = unit_directions(6)
        with pytest.raises(DegenerateAngular):
            C.isotropic_e_fit(np.zeros((6, 2, 2)), np.zeros((6, 2, 2)), np.ones(6), 2, Y)

    def test_to_dict(self):
        d = C.isotropic_s_fit(np.ones(5), np.ones(5), 2).to_dict()
        assert set(d) == {"kind", "c", "eta", "residual", "tolerance", "verdict", "samples"}


class TestFixtureFits:
    def test_shifted_volume_recovers_eta(self):
        fx = builtin("shifted_n2")
        x = fx.points[0]
        ss = C.sample_set(fx, x)
        weak = C.weak_isotropic_s_fit(ss.S, ss.F, ss.Y, 2)
        assert weak.verdict
        assert weak.c == pytest.approx(0.0, abs=1e-8)
        np.testing.assert_allclose(weak.eta, [-0.3, 0.2], atol=1e-8)

    def test_funk_isotropic_e(self):
        fx = builtin("funk_n2")
        ss = C.sample_set(fx, fx.points[0])
        fit = C.isotropic_e_fit(ss.E, ss.h, ss.F, 2, ss.Y)
        assert fit.verdict and fit.c == pytest.approx(0.5, abs=2e-3)

    def test_funk_oracle_e(self):
        fx = builtin("funk_n2")
        ss = C.sample_set(fx, fx.points[0], e_source="oracle")
        fit = C.isotropic_e_fit(ss.E, ss.h, ss.F, 2, ss.Y)
        assert fit.verdict and fit.c == pytest.approx(0.5, abs=2e-3)

    @pytest.mark.parametrize("name", ["funk_n2", "funk_n3", "parallel_n2", "linear_randers_n2",
                                      "nonzerosij_n2", "shifted_n2", "flat_power2_n3"])
    def test_nesting_and_implication(self, name):
        fx = builtin(name)
        iso, weak, iso_e = C.fits_for(C.sample_set(fx, fx.points[0]), fx.n)
        if iso.verdict:
            assert weak.verdict
            assert abs(weak.c - iso.c) <= 1e-8
            assert np.linalg.norm(weak.eta) <= 1e-6
            assert iso_e.verdict
            assert abs(iso_e.c - iso.c) <= 1e-3

    @pytest.mark.parametrize("name", ["funk_n2", "linear_randers_n2", "linear_randers_n3",
                                      "nonzerosij_n2"])
    def test_randers_verdicts_agree(self, name):
        fx = builtin(name)
        iso, _, iso_e = C.fits_for(C.sample_set(fx, fx.points[0]), fx.n)
        assert iso.verdict == iso_e.verdict


class TestBetaForm:
    def test_parallel(self):
        bd = beta_data(MetricField.euclidean(2), OneFormField.constant([0.3, 0.1]), [0, 0], [1, 0])
        assert C.beta_form_check(bd).case == "case_ii"

    def test_gradient_field(self):
        bd = beta_data(MetricField.euclidean(3), OneFormField.linear(0.1 * np.eye(3)),
                       [0.3, 0.2, 0.1], [1, 0, 0])
        assert C.beta_form_check(bd).case == "neither"

    @given(st.floats(min_value=-2.0, max_value=2.0).filter(lambda e: abs(e) > 1e-3),
           st.lists(st.floats(min_value=-0.5, max_value=0.5), min_size=3, max_size=3))
    @settings(max_examples=30, deadline=None)
    def test_injected_round_trip(self, eps, b):
        b_i = np.array(b)
        if np.linalg.norm(b_i) < 0.05:
            b_i = np.array([0.3, 0.0, 0.1])
        a = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 1.5]])
        b2 = float(b_i @ np.linalg.solve(a, b_i))
        r = eps * (b2 * a - np.outer(b_i, b_i))
        res = C.beta_form_check(beta_tensors(a, b_i, r, [1.0, 0.0, 0.0]))
        assert res.case == "case_i"
        assert res.epsilon == pytest.approx(eps, abs=1e-10)

    def test_injected_with_rotation_is_not_case_i(self):
        a, b_i = np.eye(2), np.array([0.4, 0.0])
        r = 0.5 * (0.16 * a - np.outer(b_i, b_i))
        s = np.array([[0.0, 0.3], [-0.3, 0.0]])
        assert C.beta_form_check(beta_tensors(a, b_i, r + s, [1.0, 0.0])).case == "neither"

    def test_funk_is_neither(self):
        fx = builtin("funk_n2")
        bd = beta_data(fx.metric, fx.form, fx.points[0], [1.0, 0.0])
        assert C.beta_form_check(bd).case == "neither"

    def test_zero_beta(self):
        bd = beta_data(MetricField.euclidean(2), OneFormField.constant([0.0, 0.0]), [0, 0], [1, 0])
        with pytest.raises(ZeroBeta):
            C.beta_form_check(bd)


class TestOdeResiduals:
    def test_phi_relation_riemannian(self):
        assert C.phi_relation_residual(PhiSpec.riemannian(), 0.0, 0.25, 2) == 0.0

    @pytest.mark.parametrize("n", [2, 3])
    def test_phi_relation_randers_k_zero(self, n):
        grid = s_grid(0.25)
        assert C.phi_relation_residual(RANDERS, 0.0, 0.25, n, grid) == pytest.approx((n + 1) * (1 + grid[-1]),
                                                                              rel=1e-13)

    def test_phi_relation_scan_randers_unsatisfied(self):
        res = C.phi_relation_scan(RANDERS, 0.25, 2)
        assert not res.satisfied and res.residual > 0.1

    def test_phi_relation_scan_riemannian(self):
        res = C.phi_relation_scan(PhiSpec.riemannian(), 0.25, 2)
        assert res.satisfied and res.argmin[0] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("phi", ALL_PHI)
    def test_q_ode_trivial(self, phi):
        assert C.q_ode_residual(phi, 0.0, 0.0, 3) == 0.0

    @pytest.mark.parametrize("k2,k", [(0.5, 1.0), (2.0, -0.7)])
    def test_q_ode_linear_q(self, k2, k):
        phi = PhiSpec.randers_type(1.0, k2, 0.0)
        assert C.q_ode_residual(phi, k, -k * k2, 3) <= 1e-8
        assert C.q_ode_residual(phi, k, 0.0, 3) > 1e-3

    def test_q_ode_randers(self):
        grid = np.linspace(-0.4, 0.4, 9)
        assert C.q_ode_residual(RANDERS, 1.0, 0.0, 2, grid) == pytest.approx(3.0, abs=1e-12)

    def test_q_ode_scan(self):
        res = C.q_ode_scan(PhiSpec.randers_type(1.0, 0.5, 0.0), 3)
        assert res.satisfied
        k, eps = res.argmin
        assert eps == pytest.approx(-0.5 * k, abs=1e-6)

    def test_shifted_q(self):
        out = C.shifted_q_residual(PhiSpec.quadratic(), 0.0, 0.0, 2)
        assert out.residual == 0.0 and out.forced == 0.0
        out = C.shifted_q_residual(PhiSpec.randers_type(1.0, 0.5, 0.0), 1.0, -0.5, 3)
        assert out.residual <= 1e-10 and out.forced == pytest.approx(0.0, abs=1e-12)


class TestDecomposition:
    def test_randers_quartic_vanishes(self):
        for s in (-0.2, 0.0, 0.3):
            dec = C.b2_decompose("eq", RANDERS, s, 2, {"k": 0.5, "eps": 0.3, "nu": 0.3, "c": 0.0})
            assert abs(dec.coeffs[2]) <= 1e-10

    def test_quadratic_omega4_vanishes(self):
        dec = C.b2_decompose("EQ", PhiSpec.quadratic(), 0.0, 2, {"lam": 0.4, "delta": 0.4})
        assert abs(dec.coeffs[2]) <= 1e-10

    @pytest.mark.parametrize("phi", ALL_PHI)
    @pytest.mark.parametrize("n", [2, 3])
    def test_identities(self, phi, n):
        worst = C.decomposition_identities(phi, n, np.linspace(-0.3, 0.3, 7))
        assert max(worst.values()) <= 1e-8, worst

    def test_xi02_matches_identity(self):
        s = 0.2
        dec = C.b2_decompose("eq", PhiSpec.power(1), s, 3, {"k": 0.7, "eps": -0.4, "nu": -0.4})
        ref = C.xi02_closed(PhiSpec.power(1), s, 3, 0.7, -0.4)
        assert dec.coeffs[0] + dec.coeffs[1] * s * s == pytest.approx(ref, rel=1e-8)

    def test_detects_higher_degree(self, monkeypatch):
        original = C.eq_value
        monkeypatch.setattr(C, "eq_value", lambda phi, s, b2, n, **kw: original(phi, s, b2, n, **kw) + b2**3)
        with pytest.raises(NotPolynomial):
            C.b2_decompose("eq", RANDERS, 0.1, 2, {"k": 1.0})

    def test_unknown_expression(self):
        with pytest.raises(ValueError):
            C.b2_decompose("xx", RANDERS, 0.1, 2)


class TestResidualSuites:
    def test_riemannian_all_zero(self):
        pair = C.weak_isotropy_residuals(PhiSpec.riemannian(), 0, 0, 0, 0, 0, 0.25, 2)
        assert pair.first == 0.0 and pair.second == 0.0
        pair = C.volume_weak_isotropy_residuals(PhiSpec.riemannian(), 0, 0, 0, 0, 0.25, 2)
        assert pair.first == 0.0 and pair.second == pytest.approx(0.0, abs=1e-9)

    def test_randers_zero_parameters(self):
        assert C.weak_isotropy_residuals(RANDERS, 0, 0, 0, 0, 0, 0.25, 2).first == 0.0

    def test_randers_xi_not_constant(self):
        pair = C.weak_isotropy_residuals(RANDERS, 0, 0, 0, 0, 0, 0.25, 2)
        assert pair.second > 0.1
        grid = s_grid(0.25)
        xi = -3 * (0.25 + grid) / (1 + grid)
        assert pair.second == pytest.approx(0.5 * (xi.max() - xi.min()), rel=1e-12)

    def test_explicit_lambda(self):
        pair = C.weak_isotropy_residuals(RANDERS, 0, 0, 0.0, 0, 0, 0.25, 2, lam=0.0)
        assert pair.second == pytest.approx(max(abs(-3 * (0.25 + s) / (1 + s)) for s in s_grid(0.25)))

    def test_sign_probe_single_convention_per_form(self):
        out = C.sign_convention_probe()
        assert {v["satisfying"] for v in out.values()} <= {"plus", "minus"}
        assert out["ka_minus_eps_bb"]["satisfying"] == "plus"
        assert out["ka_minus_eps_bb_plus_rb"]["satisfying"] == "minus"


class TestUpsilonBranch:
    def test_randers(self):
        assert C.upsilon_branch(RANDERS, 0.25, 2).branch == "upsilon_nonzero"

    def test_riemannian(self):
        br = C.upsilon_branch(PhiSpec.riemannian(), 0.25, 2)
        assert br.branch == "upsilon_zero" and br.mu == 0.0 and br.advisory is None

    def test_quadratic(self):
        assert C.upsilon_branch(PhiSpec.quadratic(), 0.25, 2).branch == "upsilon_nonzero"


class TestIsotropyEquivalence:
    def test_parallel(self):
        fx = builtin("parallel_n2")
        verdict, (iso, iso_e) = C.isotropy_equivalence(fx, fx.points[0])
        assert verdict == "equivalent" and iso.verdict and iso_e.verdict
        assert iso.c == 0.0 and iso_e.c == 0.0

    def test_funk(self):
        fx = builtin("funk_n2")
        verdict, (iso, iso_e) = C.isotropy_equivalence(fx, fx.points[0])
        assert verdict == "equivalent"
        assert iso.c == pytest.approx(0.5, abs=1e-3) and iso_e.c == pytest.approx(0.5, abs=1e-3)

    def test_rotation_field(self):
        fx = builtin("nonzerosij_n2")
        verdict, (iso, iso_e) = C.isotropy_equivalence(fx, fx.points[0])
        assert verdict == "equivalent" and not iso.verdict and not iso_e.verdict

    @pytest.mark.parametrize("name", ["riemannian_n2", "shifted_n2"])
    def test_constant_xi(self, name):
        fx = builtin(name)
        assert C.isotropy_equivalence(fx, fx.points[0])[0] == "inconclusive_constant_xi"

    def test_violation_is_reported(self):
        fx = builtin("funk_n2")
        ss = C.sample_set(fx, fx.points[0])
        tampered = C.SampleSet(ss.x, ss.Y, ss.F, ss.S, ss.E * 1.5, ss.h, ss.b2)
        assert C.isotropy_equivalence(fx, fx.points[0], tampered)[0] == "violation"


class TestNonzeroUpsilon:
    def test_riemannian_precondition(self):
        fx = builtin("riemannian_n2")
        with pytest.raises(PreconditionNotMet):
            C.nonzero_upsilon_check(fx, fx.points[0])
        rep = C.nonzero_upsilon_check(fx, fx.points[0], strict=False)
        assert rep.status == "precondition_not_met" and "Xi is constant" in rep.reasons

    def test_randers_precondition(self):
        fx = builtin("funk_n2")
        rep = C.nonzero_upsilon_check(fx, fx.points[0], strict=False)
        assert "phi is Randers-type" in rep.reasons

    def test_parallel_power(self):
        fx = builtin("parallel_n2")
        rep = C.nonzero_upsilon_check(fx, fx.points[0])
        assert rep.status == "fails" and rep.beta_form["case"] == "case_ii"
        assert rep.profile_residual == 0.0


def test_classify_report():
    fx = builtin("funk_n2")
    rep = C.classify(fx, fx.points[0]).to_dict()
    assert rep["equivalence_verdict"] == "equivalent"
    assert rep["beta_form_case"] == "neither"
    assert rep["randers_type"] == pytest.approx([1.0, 0.0, 1.0])
    assert rep["fits"]["isotropic_S"]["verdict"]
