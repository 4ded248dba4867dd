"""Closed-form sprays, S-curvature and E-curvature of (alpha, beta)-metrics.

All y-dependence is handled algebraically; s-derivatives come from the jets
in :class:`~abmetric.scalars.ScalarPack`.  The from-definition counterparts
live in :mod:`abmetric.oracle`.
"""
from dataclasses import dataclass

import numpy as np

from .geometry import beta_data, christoffel, metric_inverse
from .scalars import bh_factor, scalar_pack

E_VARIANTS = ("corrected", "printed")


def alpha_spray(metric, x, y, gamma=None):
    """Gbar^i = 1/2 Gamma^i_jk y^j y^k."""
    if gamma is None:
        gamma = christoffel(metric, x)
    y = np.asarray(y, dtype=float)
    return 0.5 * np.einsum("ijk,j,k->i", gamma, y, y)


def pack_at(phi, bd, n):
    """Scalar pack at the (s, b^2) of a BetaData sample."""
    s = bd.s
    # guard against s^2 > b^2 from roundoff when y is parallel to b
    b2 = max(bd.b2, s * s)
    return scalar_pack(phi, s, b2, n)


def finsler_spray_closed(pack, bd, Gbar):
    """G^i = Gbar^i + alpha Q s^i_0 + {r_00 - 2 Q alpha s_0}(Theta y^i / alpha + Psi b^i)."""
    alpha = bd.alpha
    Q = pack.Q.value
    common = bd.r_00 - 2.0 * Q * alpha * bd.s_0
    return (
        np.asarray(Gbar)
        + alpha * Q * bd.s_i0
        + pack.Theta.value * common * bd.y / alpha
        + pack.Psi.value * common * bd.b_up
    )


def log_sigma_alpha_derivative(gamma, y):
    """y^m d_m ln sqrt(det a) = y^m Gamma^k_km."""
    return float(np.einsum("kkm,m->", gamma, y))


def divergence_closed(pack, bd, dlog_sigma_alpha):
    """dG^m/dy^m = y^m d_m ln sigma_alpha + 2 Psi (r_0 + s_0) - Omega (r_00/alpha - 2 Q s_0)."""
    return (
        dlog_sigma_alpha
        + 2.0 * pack.Psi.value * (bd.r_0 + bd.s_0)
        - pack.Omega.value * (bd.r_00 / bd.alpha - 2.0 * pack.Q.value * bd.s_0)
    )


def s_curvature_closed(pack, bd, dlogf_db):
    """S with respect to the Busemann-Hausdorff volume.

    ``dlogf_db`` is f'(b)/f(b) from :func:`~abmetric.scalars.bh_factor`.  At
    b = 0 the volume term drops (r_0 + s_0 = b db vanishes with b).
    """
    b = bd.b
    vol_term = dlogf_db / b if b > 0 else 0.0
    return (2.0 * pack.Psi.value - vol_term) * (bd.r_0 + bd.s_0) - pack.Omega.value * (
        bd.r_00 / bd.alpha - 2.0 * pack.Q.value * bd.s_0
    )


def e_coefficients(pack, bd, variant="corrected"):
    """The eleven block coefficients C1..C11 of the E-curvature.

    ``variant="printed"`` reproduces the coefficients exactly as commonly
    printed, where C1-C4 carry r_0 in the Omega-family terms and C2 opens
    with Psi''; ``"corrected"`` uses r_00 there and Psi', which is what
    differentiating S twice actually produces.
    """
    if variant not in E_VARIANTS:
        raise ValueError(f"unknown E variant {variant!r}")
    a = bd.alpha
    s = pack.s
    D = pack.Delta.value
    D2 = D * D
    P = pack.Phi.value
    Q, Q1, Q2 = (pack.Q.derivative(k) for k in range(3))
    Ps1, Ps2 = pack.Psi.derivative(1), pack.Psi.derivative(2)
    O1, O2 = pack.Omega.derivative(1), pack.Omega.derivative(2)
    r0, s0 = bd.r_0, bd.s_0
    if variant == "corrected":
        w = bd.r_00  # multiplies every Omega-family term
        lead2 = Ps1
    else:
        w = r0
        lead2 = Ps2

    C = {}
    C["C1"] = (
        P * a * Q2 * s0
        + 2 * a * D2 * Ps2 * r0
        - D2 * O2 * w
        + 2 * D2 * a * O2 * Q * s0
        + 4 * D2 * a * O1 * Q1 * s0
        + 2 * a * D2 * Ps2 * s0
    ) / (2 * a**3 * D2)
    C["C2"] = -(
        2 * a * D2 * lead2 * s0
        - 2 * O1 * D2 * w
        + 2 * O1 * D2 * a * Q * s0
        - D2 * O2 * s * w
        + 2 * D2 * a * O2 * s * Q * s0
        + 4 * D2 * a * O1 * Q1 * s0 * s
        + 2 * a * D2 * Ps1 * r0
        + 2 * a * D2 * Ps2 * s * r0
        + 2 * a * D2 * Ps2 * s * s0
        + P * a * Q1 * s0
        + P * a * Q2 * s0 * s
    ) / (2 * a**4 * D2)
    C["C3"] = (
        4 * D2 * s**2 * O2 * a * Q * s0
        - 2 * D2 * s**2 * O2 * w
        + 12 * a * D2 * Ps1 * s * r0
        + 12 * a * D2 * Ps1 * s * s0
        + 4 * a * D2 * Ps2 * s**2 * r0
        + 4 * a * D2 * Ps2 * s**2 * s0
        + 8 * D2 * s**2 * O1 * a * Q1 * s0
        + 2 * P * a * Q2 * s0 * s**2
        - 10 * O1 * D2 * s * w
        + 12 * O1 * D2 * s * a * Q * s0
        + 6 * P * a * Q1 * s0 * s
        - 3 * P * w
    ) / (4 * a**5 * D2)
    C["C4"] = -(
        4 * a * D2 * Ps1 * s * s0
        - P * w
        - 2 * O1 * D2 * s * w
        + 4 * O1 * D2 * s * a * Q * s0
        + 4 * a * D2 * Ps1 * s * r0
        + 2 * P * a * Q1 * s0 * s
    ) / (4 * a**3 * D2)
    C["C5"] = -O1 / a**2
    C["C6"] = (2 * D2 * s * O1 + P) / (2 * a**3 * D2)
    C["C7"] = -P / (2 * a * D2)
    C["C8"] = (2 * O1 * D2 * Q + 2 * D2 * Ps1 + P * Q1) / (2 * a * D2)
    C["C9"] = -s / a * C["C8"]
    C["C10"] = Ps1 / a
    C["C11"] = -s / a * C["C10"]
    return {k: float(v) for k, v in C.items()}


def _sym(u, v):
    return np.outer(u, v) + np.outer(v, u)


def e_blocks(bd):
    """The tensor blocks multiplying C1..C11; y_i is lowered with a_ij."""
    b = bd.b_i
    yl = bd.a @ bd.y
    return {
        "C1": np.outer(b, b),
        "C2": _sym(b, yl),
        "C3": np.outer(yl, yl),
        "C4": bd.a,
        "C5": _sym(bd.r_i0, b),
        "C6": _sym(bd.r_i0, yl),
        "C7": bd.r_ij,
        "C8": _sym(bd.s_i, b),
        "C9": _sym(bd.s_i, yl),
        "C10": _sym(bd.r_i, b),
        "C11": _sym(bd.r_i, yl),
    }


def e_curvature_closed(pack, bd, variant="corrected"):
    C = e_coefficients(pack, bd, variant)
    blocks = e_blocks(bd)
    E = sum(C[k] * blocks[k] for k in C)
    return E, C


class ClosedEvaluator:
    """Closed-form quantities of a fixture at arbitrary (x, y).

    Caches the per-point data that does not depend on y.
    """

    def __init__(self, fixture):
        self.fixture = fixture
        self._point_cache = {}

    def point(self, x):
        key = tuple(np.asarray(x, dtype=float))
        if key not in self._point_cache:
            fx = self.fixture
            x = np.asarray(x, dtype=float)
            a = fx.metric.a(x)
            a_inv = metric_inverse(a)
            gamma = christoffel(fx.metric, x, a_inv)
            b = fx.form.b(x)
            bnorm = float(np.sqrt(b @ a_inv @ b))
            T, dlogf = bh_factor(fx.phi, bnorm, fx.n)
            psi, dpsi = fx.shift(x)
            self._point_cache[key] = {
                "gamma": gamma,
                "b": bnorm,
                "T": T,
                "dlogf_db": dlogf,
                "sigma_bh": float(np.sqrt(np.linalg.det(a))) * T * float(np.exp(psi)),
                "dpsi": dpsi,
            }
            if len(self._point_cache) > 256:
                self._point_cache.pop(next(iter(self._point_cache)))
        return self._point_cache[key]

    def beta(self, x, y):
        return beta_data(self.fixture.metric, self.fixture.form, x, y)

    def pack(self, bd):
        return pack_at(self.fixture.phi, bd, self.fixture.n)

    def spray(self, x, y):
        pt = self.point(x)
        bd = self.beta(x, y)
        Gbar = alpha_spray(self.fixture.metric, x, y, pt["gamma"])
        return finsler_spray_closed(self.pack(bd), bd, Gbar)

    def divergence(self, x, y):
        pt = self.point(x)
        bd = self.beta(x, y)
        return divergence_closed(self.pack(bd), bd, log_sigma_alpha_derivative(pt["gamma"], bd.y))

    def S(self, x, y):
        pt = self.point(x)
        bd = self.beta(x, y)
        S = s_curvature_closed(self.pack(bd), bd, pt["dlogf_db"])
        return S - float(pt["dpsi"] @ bd.y)

    def E(self, x, y, variant="corrected"):
        bd = self.beta(x, y)
        return e_curvature_closed(self.pack(bd), bd, variant)


def sigma_bh(fixture, x):
    """sqrt(det a) * f(b), times exp(psi) when the fixture shifts its volume form."""
    x = np.asarray(x, dtype=float)
    a = fixture.metric.a(x)
    b = fixture.form.b(x)
    bnorm = float(np.sqrt(b @ metric_inverse(a) @ b))
    T, _ = bh_factor(fixture.phi, bnorm, fixture.n)
    psi, _ = fixture.shift(x)
    return float(np.sqrt(np.linalg.det(a))) * T * float(np.exp(psi))


def closed_divergence_fd(evaluator, x, y, rel_step=1e-4):
    """Trace of dG/dy for the closed spray: central differences, one Richardson level."""
    y = np.asarray(y, dtype=float)
    h = rel_step * float(np.linalg.norm(y))
    total = 0.0
    for m in range(len(y)):
        e = np.zeros(len(y))
        e[m] = 1.0

        def central(step):
            return (evaluator.spray(x, y + step * e)[m] - evaluator.spray(x, y - step * e)[m]) / (2 * step)

        total += (4 * central(h / 2) - central(h)) / 3
    return float(total)


@dataclass
class CurvatureReport:
    x: np.ndarray
    y: np.ndarray
    F: float
    G_closed: np.ndarray
    G_oracle: np.ndarray
    divG_oracle: float
    divG_closed_rhs: float
    S_closed: float
    S_oracle: float
    E_closed: np.ndarray
    E_oracle: np.ndarray
    g: np.ndarray
    h: np.ndarray
    tau: float
    sigma_bh: float
    C: dict

    def to_dict(self):
        def m(a):
            return [[float(v) for v in row] for row in np.atleast_2d(a)]

        return {
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "F": float(self.F),
            "G_closed": [float(v) for v in self.G_closed],
            "G_oracle": [float(v) for v in self.G_oracle],
            "divG_oracle": float(self.divG_oracle),
            "divG_closed_rhs": float(self.divG_closed_rhs),
            "S_closed": float(self.S_closed),
            "S_oracle": float(self.S_oracle),
            "S_delta": float(abs(self.S_closed - self.S_oracle)),
            "E_closed": m(self.E_closed),
            "E_oracle": m(self.E_oracle),
            "E_delta": float(np.abs(self.E_closed - self.E_oracle).max()),
            "g": m(self.g),
            "h": m(self.h),
            "tau": float(self.tau),
            "sigma_bh": float(self.sigma_bh),
            "C": {k: float(v) for k, v in self.C.items()},
        }


def analyze_point(fixture, x, y, closed=None, s_oracle=None, variant="corrected"):
    """Closed form and oracle side by side at one (x, y)."""
    from .oracle import SOracle, angular_metric, distortion, e_curvature_oracle, fundamental_tensor

    closed = closed or ClosedEvaluator(fixture)
    s_oracle = s_oracle or SOracle(fixture)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    E_c, C = closed.E(x, y, variant)
    g = fundamental_tensor(lambda v: fixture.F(x, v), y)
    sigma = sigma_bh(fixture, x)
    return CurvatureReport(
        x=x,
        y=y,
        F=fixture.F(x, y),
        G_closed=closed.spray(x, y),
        G_oracle=s_oracle.spray.spray(x, y),
        divG_oracle=s_oracle.spray.divergence(x, y),
        divG_closed_rhs=closed.divergence(x, y),
        S_closed=closed.S(x, y),
        S_oracle=s_oracle(x, y),
        E_closed=E_c,
        E_oracle=e_curvature_oracle(s_oracle, x, y),
        g=g,
        h=angular_metric(g, y),
        tau=distortion(g, sigma),
        sigma_bh=sigma,
        C=C,
    )
