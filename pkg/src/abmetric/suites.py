"""Verification suites: every check records its value, tolerance and outcome."""
from dataclasses import dataclass

import numpy as np

from .curvature import ClosedEvaluator, closed_divergence_fd, analyze_point, sigma_bh
from .geometry import adapted_frame, beta_data, db_check, transform_special
from .oracle import SOracle, sigma_bh_oracle
from .tolerances import DEFAULT

LAMBDAS = (0.5, 2.0, 3.0)


@dataclass
class Check:
    suite: str
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def to_dict(self):
        return {"suite": self.suite, "name": self.name, "value": float(self.value),
                "tolerance": float(self.tolerance), "pass": self.passed}


def _rel(a, b, floor=1e-300):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.abs(b).max()), floor)
    return float(np.abs(a - b).max() / scale)


def _worst(checks):
    """Collapse per-sample checks to the worst case per (suite, name)."""
    out = {}
    for c in checks:
        key = (c.suite, c.name)
        if key not in out or c.value > out[key].value or not np.isfinite(c.value):
            out[key] = c
    return list(out.values())


def oracle_suite(fixture, samples, tol=DEFAULT):
    closed = ClosedEvaluator(fixture)
    so = SOracle(fixture)
    checks = []
    for x, y in samples:
        rep = analyze_point(fixture, x, y, closed, so)
        g_scale = max(np.abs(rep.G_oracle).max(), 1e-12 * float(y @ y))
        checks.append(Check("oracle", "spray_rel", float(np.abs(rep.G_closed - rep.G_oracle).max() / g_scale),
                            tol.spray_rel))
        # S is a difference of the divergence and the volume term; scale by the larger
        s_scale = max(abs(rep.S_oracle), abs(rep.divG_oracle), abs(rep.divG_oracle - rep.S_oracle), 1e-300)
        checks.append(Check("oracle", "s_rel", abs(rep.S_closed - rep.S_oracle) / s_scale, tol.s_rel))
        e_err = float(np.abs(rep.E_closed - rep.E_oracle).max() / (1 + np.linalg.norm(rep.E_oracle)))
        checks.append(Check("oracle", "e_entrywise", e_err, tol.e_rel))
        div_closed = closed_divergence_fd(closed, x, y)
        checks.append(Check("identity", "divergence_closed_vs_rhs", abs(div_closed - rep.divG_closed_rhs),
                            tol.divergence_abs))
        checks.append(Check("identity", "divergence_oracle_vs_rhs", abs(rep.divG_oracle - rep.divG_closed_rhs),
                            tol.divergence_abs))
        yn = float(np.linalg.norm(y))
        # unit floor: E vanishes identically on several fixtures
        for label, E in (("E_oracle_y", rep.E_oracle), ("E_closed_y", rep.E_closed)):
            scale = max(float(np.linalg.norm(E)), 1.0) * yn
            checks.append(Check("euler", label, float(np.linalg.norm(E @ y)) / scale, tol.euler_rel))
        hn = np.linalg.norm(rep.h)
        checks.append(Check("euler", "h_y", float(np.linalg.norm(rep.h @ y)) / (hn * yn), tol.euler_rel))
        checks.append(Check("euler", "E_symmetric", float(np.abs(rep.E_closed - rep.E_closed.T).max()),
                            tol.closed))
    return _worst(checks)


def homogeneity_suite(fixture, samples, tol=DEFAULT):
    closed = ClosedEvaluator(fixture)
    checks = []
    for x, y in samples:
        G = closed.spray(x, y)
        S = closed.S(x, y)
        E, _ = closed.E(x, y)
        for lam in LAMBDAS:
            ly = lam * y
            checks.append(Check("homogeneity", "G_degree2", _rel(closed.spray(x, ly), lam**2 * G, 1e-12),
                                tol.homogeneity_rel))
            checks.append(Check("homogeneity", "S_degree1",
                                abs(closed.S(x, ly) - lam * S) / max(abs(lam * S), 1e-12), tol.homogeneity_rel))
            checks.append(Check("homogeneity", "E_degree_minus1",
                                _rel(closed.E(x, ly)[0], E / lam, 1e-12), tol.homogeneity_rel))
    return _worst(checks)


def geometry_suite(fixture, samples, tol=DEFAULT):
    checks = []
    for x, y in samples:
        bd = beta_data(fixture.metric, fixture.form, x, y)
        for name, val in bd.identity_residuals().items():
            checks.append(Check("geometry", name, float(val), 1e-12))
        if bd.b2 > 0:
            checks.append(Check("geometry", "db_check", float(db_check(fixture.metric, fixture.form, x, y)), 1e-6))
            frame = adapted_frame(fixture.metric, fixture.form, x)
            for name, val in frame.residuals(bd.a, bd.b_i).items():
                checks.append(Check("geometry", f"frame_{name}", float(val), 1e-12))
            if bd.s**2 < bd.b2 * (1 - 1e-6):
                sd = transform_special(bd, frame)
                for name, val in sd.residuals.items():
                    checks.append(Check("geometry", f"special_{name}", float(val), 1e-10))
    return _worst(checks)


def volume_suite(fixture, points, tol=DEFAULT):
    checks = []
    if fixture.n > 3:
        return checks
    for x in points:
        closed = sigma_bh(fixture, x)
        checks.append(Check("volume", "sigma_bh_vs_indicatrix",
                            abs(closed - sigma_bh_oracle(fixture, x)) / closed, 1e-6))
    return _worst(checks)


def verify_fixture(fixture, count=20, seed=0, tol=DEFAULT, oracle=True):
    samples = fixture.samples(count, seed)
    checks = geometry_suite(fixture, samples, tol) + homogeneity_suite(fixture, samples, tol)
    checks += volume_suite(fixture, fixture.points, tol)
    if oracle:
        checks += oracle_suite(fixture, samples, tol)
    return checks
