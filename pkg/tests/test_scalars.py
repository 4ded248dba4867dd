import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from abmetric.errors import DomainError, OutOfDomain
from abmetric.scalars import (
    PhiSpec,
    bh_factor,
    is_constant,
    phi_eval,
    phi_validate,
    randers_type_detect,
    scalar_pack,
    scalar_profile,
    variation,
    xi_profile,
)

S, B2 = sp.symbols("s b2")


def symbolic_pack(phi_expr, n):
    """Reference scalars built directly from their defining formulas."""
    d1 = sp.diff(phi_expr, S)
    Q = d1 / (phi_expr - S * d1)
    Q1, Q2 = sp.diff(Q, S), sp.diff(Q, S, 2)
    Delta = 1 + S * Q + (B2 - S**2) * Q1
    Phi = -(Q - S * Q1) * (n * Delta + 1 + S * Q) - (B2 - S**2) * (1 + S * Q) * Q2
    Psi = Q1 / (2 * Delta)
    return {
        "Q": Q,
        "Delta": Delta,
        "Phi": Phi,
        "Psi": Psi,
        "Omega": Phi / (2 * Delta**2),
        "Theta": (Q - S * Q1) / (2 * Delta),
        "Xi": (B2 * Q + S) * Phi / Delta**2,
        "Upsilon": sp.diff(S * Phi / Delta**2 - 2 * Psi * B2, S),
    }


class TestPhiEval:
    def test_randers(self):
        d = phi_eval(PhiSpec.randers(), 0.2, 2).derivatives()
        assert d == pytest.approx([1.2, 1.0, 0.0], abs=1e-15)

    def test_power_two(self):
        d = phi_eval(PhiSpec.power(2), 0.0, 3).derivatives()
        assert d == pytest.approx([1, 3, 6, 6], rel=1e-14)

    def test_quadratic(self):
        d = phi_eval(PhiSpec.quadratic(), 0.2, 2).derivatives()
        assert d == pytest.approx([1.04, 0.4, 2.0], rel=1e-14)


class TestPhiValidate:
    def test_randers_passes(self):
        rep = phi_validate(PhiSpec.randers(), 0.9)
        assert rep.passed and rep.min_phi == pytest.approx(0.1, abs=1e-12)

    @pytest.mark.parametrize("bmax", [0.1, 0.5, 0.99])
    def test_riemannian_passes(self, bmax):
        assert phi_validate(PhiSpec.riemannian(), bmax).passed

    def test_negative_regularity_fails(self):
        rep = phi_validate(PhiSpec.taylor([1.0, 0.0, -5.0], 0.5), 0.45)
        assert not rep.passed and rep.min_regularity < 0

    def test_bad_bmax(self):
        with pytest.raises(ValueError):
            phi_validate(PhiSpec.randers(), 1.5)


class TestScalarPack:
    def test_randers_at_zero(self):
        p = scalar_pack(PhiSpec.randers(), 0.0, 0.25, 2)
        expected = dict(Q=1, Delta=1, Phi=-3, Psi=0, Omega=-1.5, Theta=0.5, Xi=-0.75, Upsilon=-3)
        for name, value in expected.items():
            assert p.d(name) == pytest.approx(value, abs=1e-12), name

    def test_randers_at_point(self):
        p = scalar_pack(PhiSpec.randers(), 0.2, 0.25, 2)
        assert p.d("Delta") == pytest.approx(1.2, abs=1e-12)
        assert p.d("Phi") == pytest.approx(-3.6, abs=1e-12)
        assert p.d("Xi") == pytest.approx(-1.125, abs=1e-12)
        assert p.d("Upsilon") == pytest.approx(-3 / 1.44, abs=1e-12)

    @pytest.mark.parametrize("s,b2,n", [(0.0, 0.1, 2), (0.3, 0.5, 3), (-0.6, 0.81, 5)])
    def test_riemannian_all_zero(self, s, b2, n):
        p = scalar_pack(PhiSpec.riemannian(), s, b2, n)
        for name in ("Q", "Phi", "Psi", "Xi", "Upsilon"):
            assert p.d(name) == 0.0
        assert p.d("Delta") == 1.0

    def test_quadratic_at_zero(self):
        p = scalar_pack(PhiSpec.quadratic(), 0.0, 0.25, 2)
        assert p.d("Q") == pytest.approx(0.0, abs=1e-15)
        assert p.d("Q", 1) == pytest.approx(2.0, abs=1e-14)
        assert p.d("Delta") == pytest.approx(1.5, abs=1e-14)
        assert p.d("Phi") == pytest.approx(0.0, abs=1e-14)
        assert p.d("Psi") == pytest.approx(2 / 3, abs=1e-14)
        assert p.d("Xi") == pytest.approx(0.0, abs=1e-14)
        assert abs(scalar_pack(PhiSpec.quadratic(), 0.1, 0.25, 2).d("Phi")) > 1e-3

    def test_out_of_cone(self):
        with pytest.raises(OutOfDomain):
            scalar_pack(PhiSpec.randers(), 0.6, 0.25, 2)

    @pytest.mark.parametrize("name,phi_expr,phi", [
        ("randers", 1 + S, PhiSpec.randers()),
        ("power1", (1 + S) ** 2, PhiSpec.power(1)),
        ("power2", (1 + S) ** 3, PhiSpec.power(2)),
        ("quadratic", 1 + S**2, PhiSpec.quadratic()),
        ("randers_type", sp.sqrt(1 + sp.Rational(1, 2) * S**2) + sp.Rational(3, 10) * S,
         PhiSpec.randers_type(1.0, 0.5, 0.3)),
    ])
    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_symbolic_reference(self, name, phi_expr, phi, n):
        ref = symbolic_pack(phi_expr, n)
        fns = {k: sp.lambdify((S, B2), v, "math") for k, v in ref.items()}
        b2 = 0.25
        for s in np.linspace(-0.45, 0.45, 21):
            for frac in (1.0, 1.3, 2.0, 2.5, 3.0):
                b2v = min(max(b2, float(s * s) * frac + 1e-3), 0.8)
                p = scalar_pack(phi, float(s), b2v, n)
                for key, fn in fns.items():
                    want = fn(float(s), b2v)
                    assert p.d(key) == pytest.approx(want, rel=1e-10, abs=1e-11), (key, s, b2v)

    def test_randers_upsilon_negative(self):
        for s in np.linspace(-0.45, 0.45, 19):
            assert scalar_pack(PhiSpec.randers(), float(s), 0.25, 3).d("Upsilon") < 0

    @given(st.floats(min_value=-0.45, max_value=0.45), st.integers(min_value=2, max_value=6))
    @settings(max_examples=60, deadline=None)
    def test_randers_closed_forms(self, s, n):
        p = scalar_pack(PhiSpec.randers(), s, 0.25, n)
        assert p.d("Q") == pytest.approx(1.0, abs=1e-13)
        assert p.d("Delta") == pytest.approx(1 + s, rel=1e-13)
        assert p.d("Phi") == pytest.approx(-(n + 1) * (1 + s), rel=1e-12)
        assert p.d("Xi") == pytest.approx(-(n + 1) * (0.25 + s) / (1 + s), rel=1e-12, abs=1e-13)
        assert p.d("Upsilon") == pytest.approx(-(n + 1) / (1 + s) ** 2, rel=1e-12)


class TestProfiles:
    def test_randers_variation(self):
        grid = np.linspace(-0.4, 0.4, 81)
        rep = xi_profile(PhiSpec.randers(), 0.25, 2, grid)
        xi = -3 * (0.25 + grid) / (1 + grid)
        assert not rep.constant
        assert rep.variation == pytest.approx(variation(xi), rel=1e-12)
        assert rep.variation >= 1.0

    @pytest.mark.parametrize("phi", [PhiSpec.power(1), PhiSpec.quadratic()])
    def test_other_families_non_constant(self, phi):
        assert not xi_profile(phi, 0.25, 2, np.linspace(-0.4, 0.4, 81)).constant

    def test_riemannian_constant_and_flagged(self):
        rep = xi_profile(PhiSpec.riemannian(), 0.25, 2, np.linspace(-0.4, 0.4, 81))
        assert rep.constant and rep.max_abs == 0.0 and rep.flags

    def test_scalar_profile_derivative(self):
        grid = np.linspace(-0.3, 0.3, 7)
        rep = scalar_profile(PhiSpec.randers(), 0.25, 2, grid, "Delta", k=1)
        assert np.allclose(rep.values, 1.0) and rep.constant

    def test_is_constant(self):
        assert is_constant([2.0, 2.0 + 1e-12])
        assert not is_constant([2.0, 2.1])


class TestRandersTypeDetect:
    def test_randers(self):
        assert randers_type_detect(PhiSpec.randers()) == pytest.approx((1.0, 0.0, 1.0))

    def test_quadratic_rejected(self):
        assert randers_type_detect(PhiSpec.quadratic()) is None
        assert abs(1 + 0.16 - math.sqrt(1 + 2 * 0.16)) > 1e-4

    def test_round_trip(self):
        k = randers_type_detect(PhiSpec.randers_type(2.0, 0.5, -1.0))
        assert k == pytest.approx((2.0, 0.5, -1.0), abs=1e-12)

    def test_power_rejected(self):
        assert randers_type_detect(PhiSpec.power(1)) is None


def polar_area(phi, b, count=20000):
    """Area of {y : alpha(y) phi(b y1 / alpha(y)) < 1} in the Euclidean plane."""
    t = np.linspace(0.0, 2 * math.pi, count, endpoint=False)
    r = 1.0 / np.asarray(phi.evaluate(b * np.cos(t)), dtype=float)
    return 0.5 * float(np.mean(r**2)) * 2 * math.pi


class TestBHFactor:
    @pytest.mark.parametrize("b", [0.0, 0.3, 0.7])
    def test_riemannian(self, b):
        T, dlog = bh_factor(PhiSpec.riemannian(), b, 3)
        assert T == pytest.approx(1.0, abs=1e-14) and dlog == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("phi,n", [(PhiSpec.power(2), 3), (PhiSpec.randers(), 2),
                                       (PhiSpec.randers_type(1.5, 0.2, 0.1), 4)])
    def test_b_zero(self, phi, n):
        T, _ = bh_factor(phi, 0.0, n)
        assert T == pytest.approx(float(phi.evaluate(0.0)) ** n, rel=1e-13)

    def test_randers_plane_matches_polar_area(self):
        T, _ = bh_factor(PhiSpec.randers(), 0.5, 2)
        assert T == pytest.approx(math.pi / polar_area(PhiSpec.randers(), 0.5), abs=1e-6)
        assert T < 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_randers_closed_form(self, n):
        b = 0.4
        T, dlog = bh_factor(PhiSpec.randers(), b, n)
        assert T == pytest.approx((1 - b * b) ** ((n + 1) / 2), rel=1e-12)
        assert dlog == pytest.approx(-(n + 1) * b / (1 - b * b), rel=1e-7)

    def test_power_plane_matches_polar_area(self):
        phi = PhiSpec.power(1)
        T, _ = bh_factor(phi, 0.3, 2)
        assert T == pytest.approx(math.pi / polar_area(phi, 0.3), rel=1e-9)

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            bh_factor(PhiSpec.randers(), 1.0, 2)
