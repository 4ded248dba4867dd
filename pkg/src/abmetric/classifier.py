"""Isotropy fits and the decision procedures built on the scalar pack."""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DegenerateAngular,
    InsufficientSamples,
    NotPolynomial,
    PreconditionNotMet,
    RankDeficient,
    ZeroBeta,
)
from .scalars import (
    bh_factor,
    randers_type_detect,
    s_grid,
    scalar_pack,
    scalar_profile,
    variation,
    xi_profile,
)
from .tolerances import DEFAULT

KINDS = ("isotropic_S", "weak_isotropic_S", "isotropic_E")
VERDICTS = ("equivalent", "inconclusive_constant_xi", "violation")


@dataclass
class IsotropyFit:
    kind: str
    c: float
    eta: np.ndarray
    residual: float
    tolerance: float
    samples: int

    @property
    def verdict(self):
        return bool(self.residual <= self.tolerance)

    def to_dict(self):
        return {
            "kind": self.kind,
            "c": float(self.c),
            "eta": [float(v) for v in self.eta],
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "verdict": self.verdict,
            "samples": int(self.samples),
        }


def _relative(resid_norm, *scales):
    scale = max(scales)
    if scale == 0.0:
        return 0.0
    return float(resid_norm / scale)


# --- S and E fits --------------------------------------------------------------

def isotropic_s_fit(S, F, n, tol=DEFAULT.s_fit):
    """Least-squares c in S = (n+1) c F over samples sharing one base point."""
    S = np.asarray(S, dtype=float)
    F = np.asarray(F, dtype=float)
    if len(S) < n + 2:
        raise InsufficientSamples(f"need at least {n + 2} samples, got {len(S)}")
    basis = (n + 1) * F
    c = float(basis @ S / (basis @ basis))
    resid = np.linalg.norm(S - c * basis)
    rel = _relative(resid, np.linalg.norm(S), np.linalg.norm(c * basis))
    return IsotropyFit("isotropic_S", c, np.zeros(n), rel, tol, len(S))


def weak_isotropic_s_fit(S, F, Y, n, tol=DEFAULT.s_fit):
    """Joint least squares for S = (n+1) c F + eta_i y^i."""
    S = np.asarray(S, dtype=float)
    F = np.asarray(F, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if len(S) < n + 2:
        raise InsufficientSamples(f"need at least {n + 2} samples, got {len(S)}")
    A = np.column_stack([(n + 1) * F, Y])
    coef, _, rank, sv = np.linalg.lstsq(A, S, rcond=None)
    if rank < n + 1 or sv[-1] <= 1e-12 * sv[0]:
        raise RankDeficient("directions do not separate F from the linear forms")
    model = A @ coef
    rel = _relative(np.linalg.norm(S - model), np.linalg.norm(S), np.linalg.norm(model))
    return IsotropyFit("weak_isotropic_S", float(coef[0]), coef[1:], rel, tol, len(S))


def _check_angular(h, y):
    w = np.linalg.eigvalsh(0.5 * (h + h.T))
    scale = max(abs(w).max(), 1e-300)
    if np.sum(w > 1e-10 * scale) < len(y) - 1:
        raise DegenerateAngular("angular metric is degenerate on the complement of y")


def isotropic_e_fit(E, h, F, n, Y=None, tol=DEFAULT.e_fit):
    """Least-squares c in E = ((n+1)/2) c F^{-1} h over all entries and samples."""
    E = np.asarray(E, dtype=float)
    h = np.asarray(h, dtype=float)
    F = np.asarray(F, dtype=float)
    if Y is not None:
        for hk, yk in zip(h, np.asarray(Y, dtype=float)):
            _check_angular(hk, yk)
    basis = 0.5 * (n + 1) * h / F[:, None, None]
    c = float(np.sum(basis * E) / np.sum(basis * basis))
    resid = np.linalg.norm(E - c * basis)
    rel = _relative(resid, np.linalg.norm(E), np.linalg.norm(c * basis))
    return IsotropyFit("isotropic_E", c, np.zeros(n), rel, tol, len(E))


# --- conditions on beta --------------------------------------------------------

@dataclass
class BetaFormResult:
    case: str
    epsilon: float = None
    r_norm: float = 0.0
    s_j_norm: float = 0.0
    fit_residual: float = None

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items()}


def beta_form_check(bd, tol_zero=DEFAULT.beta_zero, tol_fit=DEFAULT.beta_fit):
    """Classify beta as r = s_j = 0, r = eps (b^2 a - b b) with s_j = 0, or neither."""
    if bd.b2 <= 0.0:
        raise ZeroBeta("b = 0 at this point")
    r_norm = float(np.linalg.norm(bd.r_ij))
    sj = float(np.linalg.norm(bd.s_i))
    if r_norm <= tol_zero and sj <= tol_zero:
        return BetaFormResult("case_ii", None, r_norm, sj)
    T = bd.b2 * bd.a - np.outer(bd.b_i, bd.b_i)
    eps = float(np.sum(T * bd.r_ij) / np.sum(T * T))
    fit = _relative(np.linalg.norm(bd.r_ij - eps * T), r_norm)
    if fit <= tol_fit and sj <= tol_zero:
        return BetaFormResult("case_i", eps, r_norm, sj, fit)
    return BetaFormResult("neither", eps, r_norm, sj, fit)


# --- ODE residual suites -----------------------------------------------------

def _grid(b2, grid, phi=None):
    if grid is not None:
        return np.asarray(grid, dtype=float)
    return s_grid(b2, b0=phi.b0 if phi is not None else None)


def _packs(phi, b2, n, grid):
    return [scalar_pack(phi, float(s), b2, n) for s in grid]


def phi_relation_residual(phi, k, b2, n, grid=None):
    """max |Phi + 2(n+1) k phi Delta^2 / (b^2 - s^2)| over the grid."""
    grid = _grid(b2, grid, phi)
    out = 0.0
    for s, p in zip(grid, _packs(phi, b2, n, grid)):
        val = p.Phi.value + 2 * (n + 1) * k * p.phi.value * p.Delta.value**2 / (b2 - s * s)
        out = max(out, abs(val))
    return out


@dataclass
class ScanResult:
    argmin: tuple
    residual: float
    satisfied: bool

    def to_dict(self):
        return {"argmin": [float(v) for v in self.argmin], "residual": float(self.residual),
                "satisfied": self.satisfied}


def _scan_1d(fn, lo, hi, count, tol):
    ks = np.linspace(lo, hi, count)
    vals = np.array([fn(k) for k in ks])
    i = int(np.argmin(vals))
    a, b = ks[max(i - 1, 0)], ks[min(i + 1, count - 1)]
    if 0 < i < count - 1:
        # V-shaped minimum: only golden section resolves it below sqrt(eps)
        res = minimize_scalar(fn, bracket=(a, ks[i], b), method="golden", options={"xtol": 1e-15})
    else:
        res = minimize_scalar(fn, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    best = (res.x, res.fun) if res.fun < vals[i] else (ks[i], vals[i])
    return ScanResult((float(best[0]),), float(best[1]), bool(best[1] <= tol))


def phi_relation_scan(phi, b2, n, grid=None, k_range=(-5.0, 5.0), count=201, tol=DEFAULT.closed):
    """Coarse grid plus bounded refinement for the constant k."""
    grid = _grid(b2, grid, phi)
    packs = _packs(phi, b2, n, grid)
    Phi = np.array([p.Phi.value for p in packs])
    w = np.array([2 * (n + 1) * p.phi.value * p.Delta.value**2 for p in packs]) / (b2 - grid**2)
    return _scan_1d(lambda k: float(np.max(np.abs(Phi + k * w))), *k_range, count, tol)


def _q_table(phi, grid):
    rows = []
    for s in grid:
        d = phi.jet(float(s), 4).derivatives()
        p0, p1 = d[0], d[1]
        den = p0 - s * p1
        # Q and Q' from phi, phi', phi''
        Q = p1 / den
        Q1 = p0 * d[2] / den**2
        rows.append((Q, Q1))
    return np.array(rows)


def q_ode_residual(phi, k, eps, n, grid=None):
    """max |(n-1)(k - eps s^2)(Q - sQ') + 2kQ + 2 eps s|."""
    grid = _grid(0.25, grid, phi)
    Q, Q1 = _q_table(phi, grid).T
    return float(np.max(np.abs((n - 1) * (k - eps * grid**2) * (Q - grid * Q1) + 2 * k * Q + 2 * eps * grid)))


def q_ode_scan(phi, n, grid=None, count=361, tol=DEFAULT.closed):
    """Scan unit-norm (k, eps) = (cos t, sin t); the equation is homogeneous in them."""
    grid = _grid(0.25, grid, phi)
    fn = lambda t: q_ode_residual(phi, math.cos(t), math.sin(t), n, grid)
    res = _scan_1d(fn, 0.0, math.pi, count, tol)
    t = res.argmin[0]
    return ScanResult((math.cos(t), math.sin(t)), res.residual, res.satisfied)


@dataclass
class ShiftedQResult:
    residual: float
    forced: float
    q0: float

    def to_dict(self):
        return dict(self.__dict__)


def shifted_q_residual(phi, k, eps, n, grid=None):
    """Residual with Q~ = Q - s Q'(0), plus k Q'(0) + eps and Q(0)."""
    grid = _grid(0.25, grid, phi)
    Q, Q1 = _q_table(phi, grid).T
    q0, q10 = _q_table(phi, [0.0])[0]
    Qt = Q - grid * q10
    Qt1 = Q1 - q10
    lhs = (n - 1) * (k - eps * grid**2) * (Qt - grid * Qt1) + 2 * k * Qt + 2 * (k * q10 + eps) * grid
    return ShiftedQResult(float(np.max(np.abs(lhs))), float(k * q10 + eps), float(q0))


# --- b^2 decomposition ---------------------------------------------------------

@dataclass
class Decomposition:
    expr: str
    s: float
    coeffs: tuple
    nodes: tuple
    check_residual: float

    def to_dict(self):
        return {"expr": self.expr, "s": self.s, "coeffs": [float(c) for c in self.coeffs],
                "nodes": list(self.nodes), "check_residual": self.check_residual}


def eq_value(phi, s, b2, n, k=0.0, eps=0.0, c=0.0, nu=0.0):
    p = scalar_pack(phi, s, b2, n)
    D2 = p.Delta.value**2
    return D2 * (
        -2 * s * (k - eps * b2) * p.Psi.value
        + (k - eps * s * s) * p.Omega.value
        + (n + 1) * c * p.phi.value
        - s * nu
    )


def EQ_value(phi, s, b2, n, lam=0.0, delta=0.0):
    p = scalar_pack(phi, s, b2, n)
    D2 = p.Delta.value**2
    ratio = p.Phi.value / D2
    return D2 * (-2 * p.Psi.value - p.Q.value * ratio - lam * (s * ratio - 2 * p.Psi.value * b2) - delta)


def b2_decompose(expr, phi, s, n, params=None, nodes=None, tol=DEFAULT.decomposition_rel):
    """Coefficients of expr = C0 + C2 b^2 + C4 b^4 from three b^2 nodes; a fourth node checks the degree."""
    params = dict(params or {})
    if expr == "eq":
        fn = lambda b2: eq_value(phi, s, b2, n, **{k: params.get(k, 0.0) for k in ("k", "eps", "c", "nu")})
    elif expr == "EQ":
        fn = lambda b2: EQ_value(phi, s, b2, n, **{k: params.get(k, 0.0) for k in ("lam", "delta")})
    else:
        raise ValueError(f"unknown expression {expr!r}")
    if nodes is None:
        nodes = tuple(s * s + d for d in (0.05, 0.15, 0.3, 0.45))
    xs = np.array(nodes[:3])
    vals = np.array([fn(x) for x in xs])
    coeffs = np.linalg.solve(np.vander(xs, 3, increasing=True), vals)
    x4 = nodes[3]
    actual = fn(x4)
    predicted = coeffs @ np.array([1.0, x4, x4 * x4])
    scale = max(abs(actual), np.abs(vals).max(), np.abs(coeffs).max(), 1e-300)
    rel = float(abs(actual - predicted) / scale)
    if rel > tol:
        raise NotPolynomial(f"{expr} is not quadratic in b^2 at s = {s}: 4th-node residual {rel:.3g}")
    return Decomposition(expr, float(s), tuple(float(c) for c in coeffs), tuple(nodes), rel)


def _q_pack(phi, s):
    p = scalar_pack(phi, s, s * s + 0.1, 2)
    return p.Q.value, p.Q.derivative(1), p.Q.derivative(2)


def xi4_closed(phi, s, n, eps=0.0, nu=0.0, c=0.0):
    """{(eps - nu) s + (n+1) c phi} phi^2 phi''^2 / (phi - s phi')^4."""
    d = phi.jet(s, 3).derivatives()
    return ((eps - nu) * s + (n + 1) * c * d[0]) * d[0] ** 2 * d[2] ** 2 / (d[0] - s * d[1]) ** 4


def xi02_closed(phi, s, n, k=0.0, eps=0.0):
    """Xi_0 + Xi_2 s^2 once eps = nu and c = 0."""
    Q, Q1, _ = _q_pack(phi, s)
    return -0.5 * (1 + s * Q) * ((n - 1) * (k - eps * s * s) * (Q - s * Q1) + 2 * k * Q + 2 * eps * s)


def omega4_closed(phi, s, lam=0.0, delta=0.0):
    _, Q1, _ = _q_pack(phi, s)
    return Q1**2 * (lam - delta)


def omega02_closed(phi, s, n, lam=0.0):
    """Omega_0 + Omega_2 s^2 once delta = lambda."""
    Q, Q1, _ = _q_pack(phi, s)
    return (1 + s * Q) * ((n + 1) * Q * (Q - s * Q1) - Q1 + lam * (n * s * (Q - s * Q1) - 1))


def decomposition_identities(phi, n, s_values, k=0.7, eps=-0.4, lam=0.6):
    """Max relative mismatch of the four closed-form coefficient identities."""
    worst = {"xi4": 0.0, "xi02": 0.0, "omega4": 0.0, "omega02": 0.0}
    for s in s_values:
        s = float(s)
        for nu, c in ((eps, 0.0), (0.3, 0.2)):
            dec = b2_decompose("eq", phi, s, n, {"k": k, "eps": eps, "c": c, "nu": nu})
            ref = xi4_closed(phi, s, n, eps, nu, c)
            worst["xi4"] = max(worst["xi4"], abs(dec.coeffs[2] - ref) / max(1.0, abs(ref)))
        dec = b2_decompose("eq", phi, s, n, {"k": k, "eps": eps, "c": 0.0, "nu": eps})
        got = dec.coeffs[0] + dec.coeffs[1] * s * s
        ref = xi02_closed(phi, s, n, k, eps)
        worst["xi02"] = max(worst["xi02"], abs(got - ref) / max(1.0, abs(ref)))
        for delta in (lam, 0.1):
            dec = b2_decompose("EQ", phi, s, n, {"lam": lam, "delta": delta})
            ref = omega4_closed(phi, s, lam, delta)
            worst["omega4"] = max(worst["omega4"], abs(dec.coeffs[2] - ref) / max(1.0, abs(ref)))
        dec = b2_decompose("EQ", phi, s, n, {"lam": lam, "delta": lam})
        got = dec.coeffs[0] + dec.coeffs[1] * s * s
        ref = omega02_closed(phi, s, n, lam)
        worst["omega02"] = max(worst["omega02"], abs(got - ref) / max(1.0, abs(ref)))
    return worst


# --- residual suites for the weak-isotropy equations ---------------------------

@dataclass
class ResidualPair:
    first: float
    second: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"first": self.first, "second": self.second, **self.details}


def weak_isotropy_residuals(phi, k, eps, mu, nu, c, b2, n, grid=None, lam=None):
    """Residuals of (k - eps s^2) Omega = {nu + (k - eps b^2) mu} s - (n+1) c phi
    and Xi = b^2 (mu + lam).

    With ``lam=None`` the second residual is the best achievable by any
    constant, i.e. half the variation of Xi over the grid.
    """
    grid = _grid(b2, grid, phi)
    packs = _packs(phi, b2, n, grid)
    r1 = max(
        abs((k - eps * s * s) * p.Omega.value - ((nu + (k - eps * b2) * mu) * s - (n + 1) * c * p.phi.value))
        for s, p in zip(grid, packs)
    )
    xi = np.array([p.Xi.value for p in packs])
    if lam is None:
        r2 = 0.5 * variation(xi)
        details = {"best_mu_plus_lambda": float(0.5 * (xi.max() + xi.min()) / b2)}
    else:
        r2 = float(np.max(np.abs(xi - b2 * (mu + lam))))
        details = {}
    return ResidualPair(float(r1), float(r2), details)


def volume_weak_isotropy_residuals(phi, k, eps, c, lam, b2, n, grid=None, eta_over_s=0.0):
    """Residuals of the two s-ODEs with nu and delta taken from the volume factor."""
    grid = _grid(b2, grid, phi)
    b = math.sqrt(b2)
    _, dlogf = bh_factor(phi, b, n)
    nu = -dlogf / b * (k - eps * b2)
    delta = -dlogf / b * (1 - lam * b2) - eta_over_s
    r1 = r2 = 0.0
    for s, p in zip(grid, _packs(phi, b2, n, grid)):
        D2 = p.Delta.value**2
        r1 = max(r1, abs(-2 * s * (k - eps * b2) * p.Psi.value + (k - eps * s * s) * p.Omega.value
                         + (n + 1) * c * p.phi.value - s * nu))
        r2 = max(r2, abs(-2 * p.Psi.value - p.Q.value * p.Phi.value / D2
                         - lam * (s * p.Phi.value / D2 - 2 * p.Psi.value * b2) - delta))
    return ResidualPair(float(r1), float(r2), {"nu": float(nu), "delta": float(delta)})


def frame_equation_residual(phi, b2, n, r11, k, c, t1, grid=None):
    """s(s Omega - 2 Psi b^2) r11 + (n+1) c b^2 phi + k Omega (b^2 - s^2) - b s t1."""
    grid = _grid(b2, grid, phi)
    b = math.sqrt(b2)
    out = 0.0
    for s, p in zip(grid, _packs(phi, b2, n, grid)):
        val = (s * (s * p.Omega.value - 2 * p.Psi.value * b2) * r11 + (n + 1) * c * b2 * p.phi.value
               + k * p.Omega.value * (b2 - s * s) - b * s * t1)
        out = max(out, abs(val))
    return out


def sign_convention_probe(phi=None, b2=0.25, n=2, c=0.5, tol=DEFAULT.closed):
    """Which sign of r11 = +-(k - eps b^2) satisfies the frame equation for each tensor form.

    The probe uses a Randers metric with r_ij = 2c(a_ij - b_i b_j) and s_ij = 0,
    which has isotropic S-curvature with constant c.  In an adapted frame
    r_AB = 2c delta_AB and r_11 = 2c(1 - b^2).  Reading (k, eps) off the
    tensor as ``k a - eps b b`` or as ``k a - eps b b + (r_i b_j + r_j b_i)/b^2``
    gives different eps; for each reading both signs are tried.
    """
    from .scalars import PhiSpec

    phi = phi or PhiSpec.randers()
    b = math.sqrt(b2)
    _, dlogf = bh_factor(phi, b, n)
    r11 = 2 * c * (1 - b2)
    k = 2 * c
    forms = {
        # r_11 = k - eps b^2
        "ka_minus_eps_bb": (k - r11) / b2,
        # r_11 = k - eps b^2 + 2 r_11
        "ka_minus_eps_bb_plus_rb": (k + r11) / b2,
    }
    out = {}
    for form, eps in forms.items():
        res = {}
        for sign, label in ((1.0, "plus"), (-1.0, "minus")):
            r11_conv = sign * (k - eps * b2)
            res[label] = frame_equation_residual(phi, b2, n, r11_conv, k, c, -dlogf * r11_conv)
        ok = [label for label, v in res.items() if v <= tol]
        out[form] = {"epsilon": eps, "residuals": res,
                     "satisfying": ok[0] if len(ok) == 1 else ("both" if ok else "none")}
    return out


# --- branch logic --------------------------------------------------------------

@dataclass
class UpsilonBranch:
    branch: str
    variation: float
    mu: float = None
    advisory: str = None

    def to_dict(self):
        return dict(self.__dict__)


def upsilon_branch(phi, b2, n, grid=None, tol=DEFAULT.closed):
    """Constancy of s Phi/Delta^2 - 2 Psi b^2 decides the Upsilon = 0 branch."""
    grid = _grid(b2, grid, phi)
    vals = np.array([
        s * p.Phi.value / p.Delta.value**2 - 2 * p.Psi.value * b2
        for s, p in zip(grid, _packs(phi, b2, n, grid))
    ])
    var = variation(vals)
    if var <= tol * max(1.0, float(np.abs(vals).max())):
        advisory = None
        if randers_type_detect(phi) is None:
            advisory = "Upsilon vanishes for a non-Randers-type phi: any fixture with db != 0 is inconsistent"
        return UpsilonBranch("upsilon_zero", float(var), float(vals.mean() / b2), advisory)
    return UpsilonBranch("upsilon_nonzero", float(var))


# --- pointwise sample sets -----------------------------------------------------

@dataclass
class SampleSet:
    """Closed-form S, E, h, F over unit-alpha directions at one base point."""

    x: np.ndarray
    Y: np.ndarray
    F: np.ndarray
    S: np.ndarray
    E: np.ndarray
    h: np.ndarray
    b2: float


def sample_set(fixture, x, count=None, seed=0, e_source="closed"):
    from .curvature import ClosedEvaluator
    from .fixtures import direction_set
    from .oracle import SOracle, angular_metric, e_curvature_oracle, fundamental_tensor

    x = np.asarray(x, dtype=float)
    count = count or 4 * fixture.n
    Y = direction_set(fixture.metric, x, count, seed)
    ce = ClosedEvaluator(fixture)
    so = SOracle(fixture) if e_source == "oracle" else None
    F, S, E, H = [], [], [], []
    for y in Y:
        F.append(fixture.F(x, y))
        S.append(ce.S(x, y))
        E.append(e_curvature_oracle(so, x, y) if so else ce.E(x, y)[0])
        g = fundamental_tensor(lambda v: fixture.F(x, v), y)
        H.append(angular_metric(g, y))
    bd = ce.beta(x, Y[0])
    return SampleSet(x, np.array(Y), np.array(F), np.array(S), np.array(E), np.array(H), float(bd.b2))


def fits_for(samples, n, tol=DEFAULT):
    iso = isotropic_s_fit(samples.S, samples.F, n, tol.s_fit)
    weak = weak_isotropic_s_fit(samples.S, samples.F, samples.Y, n, tol.s_fit)
    iso_e = isotropic_e_fit(samples.E, samples.h, samples.F, n, samples.Y, tol.e_fit)
    return iso, weak, iso_e


def isotropy_equivalence(fixture, x, samples=None, tol=DEFAULT):
    """Compare isotropic S and isotropic E verdicts when Xi is not constant."""
    samples = samples or sample_set(fixture, x)
    if samples.b2 == 0.0:
        return "inconclusive_constant_xi", None
    prof = xi_profile(fixture.phi, samples.b2, fixture.n, tol=tol.closed)
    iso, _, iso_e = fits_for(samples, fixture.n, tol)
    if prof.constant:
        return "inconclusive_constant_xi", (iso, iso_e)
    if iso.verdict and iso_e.verdict and abs(iso.c - iso_e.c) <= tol.c_match:
        return "equivalent", (iso, iso_e)
    if not iso.verdict and not iso_e.verdict:
        return "equivalent", (iso, iso_e)
    return "violation", (iso, iso_e)


@dataclass
class NonzeroUpsilonReport:
    status: str
    beta_form: dict = None
    profile_residual: float = None
    epsilon: float = None
    c: float = None
    reasons: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def nonzero_upsilon_check(fixture, x, samples=None, tol=DEFAULT, strict=True):
    """Check r = eps(b^2 a - b b), s_j = 0 and eps (b^2 - s^2) Omega = -(n+1) c phi.

    With ``strict`` a failed precondition raises; otherwise the residuals are
    still computed and the unmet preconditions listed.
    """
    from .curvature import ClosedEvaluator

    samples = samples or sample_set(fixture, x)
    phi, n = fixture.phi, fixture.n
    reasons = []
    if xi_profile(phi, samples.b2, n, tol=tol.closed).constant:
        reasons.append("Xi is constant")
    if randers_type_detect(phi) is not None:
        reasons.append("phi is Randers-type")
    if upsilon_branch(phi, samples.b2, n, tol=tol.closed).branch == "upsilon_zero":
        reasons.append("Upsilon vanishes")
    weak = weak_isotropic_s_fit(samples.S, samples.F, samples.Y, n, tol.s_fit)
    if not weak.verdict:
        reasons.append("not of weak isotropic S-curvature")
    if reasons and strict:
        raise PreconditionNotMet("; ".join(reasons))
    bd = ClosedEvaluator(fixture).beta(x, samples.Y[0])
    l23 = beta_form_check(bd, tol.beta_zero, tol.beta_fit)
    eps = l23.epsilon if l23.epsilon is not None else 0.0
    c = isotropic_s_fit(samples.S, samples.F, n, tol.s_fit).c
    grid = _grid(samples.b2, None, phi)
    res = max(
        abs(eps * (samples.b2 - s * s) * p.Omega.value + (n + 1) * c * p.phi.value)
        for s, p in zip(grid, _packs(phi, samples.b2, n, grid))
    )
    status = "precondition_not_met" if reasons else ("holds" if l23.case == "case_i" and res <= tol.closed else "fails")
    return NonzeroUpsilonReport(status, l23.to_dict(), float(res), eps, c, reasons)


@dataclass
class ClassificationReport:
    fixture: str
    x: list
    b2: float
    xi_constant: bool
    upsilon_zero: bool
    randers_type: tuple
    beta_form_case: str
    fits: dict
    equivalence_verdict: str
    xi_variation: float

    def to_dict(self):
        return {
            "fixture": self.fixture,
            "x": [float(v) for v in self.x],
            "b2": self.b2,
            "xi_constant": self.xi_constant,
            "xi_variation": self.xi_variation,
            "upsilon_zero": self.upsilon_zero,
            "randers_type": list(self.randers_type) if self.randers_type else None,
            "beta_form_case": self.beta_form_case,
            "fits": {k: v.to_dict() for k, v in self.fits.items()},
            "equivalence_verdict": self.equivalence_verdict,
        }


def classify(fixture, x, count=None, seed=0, tol=DEFAULT):
    from .curvature import ClosedEvaluator

    x = np.asarray(x, dtype=float)
    samples = sample_set(fixture, x, count, seed)
    phi, n = fixture.phi, fixture.n
    iso, weak, iso_e = fits_for(samples, n, tol)
    fits = {"isotropic_S": iso, "weak_isotropic_S": weak, "isotropic_E": iso_e}
    if samples.b2 == 0.0:
        return ClassificationReport(fixture.name, list(x), 0.0, True, True, None, "neither",
                                    fits, "inconclusive_constant_xi", 0.0)
    prof = xi_profile(phi, samples.b2, n, tol=tol.closed)
    verdict, _ = isotropy_equivalence(fixture, x, samples, tol)
    bd = ClosedEvaluator(fixture).beta(x, samples.Y[0])
    return ClassificationReport(
        fixture.name,
        list(x),
        samples.b2,
        bool(prof.constant),
        upsilon_branch(phi, samples.b2, n, tol=tol.closed).branch == "upsilon_zero",
        randers_type_detect(phi),
        beta_form_check(bd, tol.beta_zero, tol.beta_fit).case,
        fits,
        verdict,
        float(prof.variation),
    )
