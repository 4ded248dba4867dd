"""phi-profiles and the scalar functions of (s, b^2) built from them.

For ``F = alpha * phi(s)``, ``s = beta / alpha`` the curvature formulas are
driven by

    Q     = phi' / (phi - s phi')
    Delta = 1 + s Q + (b^2 - s^2) Q'
    Phi   = -(Q - s Q') (n Delta + 1 + s Q) - (b^2 - s^2)(1 + s Q) Q''
    Psi   = Q' / (2 Delta)
    Omega = Phi / (2 Delta^2)
    Theta = (Q - s Q') / (2 Delta)
    Xi    = (b^2 Q + s) Phi / Delta^2
    Upsilon = d/ds [ s Phi / Delta^2 - 2 Psi b^2 ]      (b^2 held fixed)

Every one of them is carried as a :class:`~abmetric.jet.Jet` in ``s`` so that
their s-derivatives are exact.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import jet as J
from .errors import Degenerate, DivisionByZeroJet, DomainError, OutOfDomain, QuadratureFailure

FAMILIES = ("riemannian", "randers", "power", "quadratic", "randers_type", "taylor")
CONSTANCY_TOL = 1e-8
PROFILE_POINTS = 201
BH_NODES = 64


@dataclass(frozen=True)
class PhiSpec:
    """A phi-profile ``phi(s)`` on ``(-b0, b0)``.

    ``params`` holds ``(m,)`` for ``power``, ``(k1, k2, k3)`` for
    ``randers_type`` and the polynomial coefficients for ``taylor``.
    """

    family: str
    params: tuple = ()
    b0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity = {"riemannian": 0, "randers": 0, "power": 1, "quadratic": 0, "randers_type": 3}
        if self.family not in FAMILIES:
            raise ValueError(f"unknown phi family {self.family!r}")
        if self.family in arity and len(self.params) != arity[self.family]:
            raise ValueError(
                f"phi family {self.family!r} takes {arity[self.family]} parameters, "
                f"got {len(self.params)}"
            )
        if self.family == "taylor" and not self.params:
            raise ValueError("taylor phi needs at least one coefficient")
        if self.family == "randers_type" and self.params[0] <= 0:
            raise ValueError("randers_type needs k1 > 0")
        if not self.b0 > 0:
            raise ValueError("b0 must be positive")
        # Kropina-like profiles: the framework needs s to range through 0.
        if not self.evaluate(0.0) > 0:
            raise ValueError(f"phi(0) = {self.evaluate(0.0)} must be positive")

    @classmethod
    def riemannian(cls, b0=1.0):
        return cls("riemannian", (), b0)

    @classmethod
    def randers(cls, b0=1.0):
        return cls("randers", (), b0)

    @classmethod
    def power(cls, m, b0=1.0):
        return cls("power", (m,), b0)

    @classmethod
    def quadratic(cls, b0=1.0):
        return cls("quadratic", (), b0)

    @classmethod
    def randers_type(cls, k1, k2, k3, b0=1.0):
        return cls("randers_type", (k1, k2, k3), b0)

    @classmethod
    def taylor(cls, coeffs, radius):
        return cls("taylor", tuple(coeffs), radius)

    @property
    def label(self):
        if self.family == "power":
            return f"power(m={self.params[0]:g})"
        if self.family == "randers_type":
            return "randers_type({:g}, {:g}, {:g})".format(*self.params)
        if self.family == "taylor":
            return "taylor({})".format(", ".join(f"{c:g}" for c in self.params))
        return self.family

    def to_dict(self):
        return {"family": self.family, "params": list(self.params), "b0": self.b0}

    def evaluate(self, s, xp=np):
        """phi on plain numbers or arrays of module ``xp`` (numpy or jax.numpy)."""
        fam = self.family
        if fam == "riemannian":
            return 1.0 + 0.0 * s
        if fam == "randers":
            return 1.0 + s
        if fam == "power":
            return (1.0 + s) ** (self.params[0] + 1.0)
        if fam == "quadratic":
            return 1.0 + s * s
        if fam == "randers_type":
            k1, k2, k3 = self.params
            return k1 * xp.sqrt(1.0 + k2 * s * s) + k3 * s
        out = 0.0 * s
        for c in reversed(self.params):
            out = out * s + c
        return out

    def jet(self, s, order=J.DEFAULT_ORDER):
        if abs(s) >= self.b0:
            raise OutOfDomain(f"|s| = {abs(s)} outside the phi domain (b0 = {self.b0})")
        t = J.jet_var(s, order)
        fam = self.family
        if fam == "riemannian":
            return J.jet_const(1.0, order, s)
        if fam == "randers":
            return 1.0 + t
        if fam == "power":
            return (1.0 + t) ** (self.params[0] + 1.0)
        if fam == "quadratic":
            return 1.0 + t * t
        if fam == "randers_type":
            k1, k2, k3 = self.params
            return k1 * J.sqrt(1.0 + k2 * t * t) + k3 * t
        out = J.jet_const(0.0, order, s)
        for c in reversed(self.params):
            out = out * t + c
        return out


def phi_eval(phi, s, order=J.DEFAULT_ORDER):
    return phi.jet(s, order)


@dataclass
class ValidationReport:
    passed: bool
    min_phi: float
    min_regularity: float
    worst_phi_at: float
    worst_regularity_at: tuple
    bmax: float
    grid_n: int

    def to_dict(self):
        return {
            "passed": self.passed,
            "min_phi": self.min_phi,
            "min_regularity": self.min_regularity,
            "worst_phi_at": self.worst_phi_at,
            "worst_regularity_at": list(self.worst_regularity_at),
            "bmax": self.bmax,
            "grid_n": self.grid_n,
        }


def phi_validate(phi, bmax, grid_n=41):
    """Check ``phi > 0`` and ``phi - s phi' + (b^2 - s^2) phi'' > 0`` on a grid.

    The grid covers ``|s| <= b <= bmax``.
    """
    if not 0 < bmax <= phi.b0:
        raise ValueError(f"need 0 < bmax <= b0 = {phi.b0}, got {bmax}")
    # stay strictly inside the open domain when bmax == b0
    edge = bmax if bmax < phi.b0 else bmax * (1 - 1e-9)
    s_vals = np.linspace(-edge, edge, 2 * grid_n + 1)
    b_vals = np.linspace(0.0, bmax, grid_n + 1)
    min_phi, at_phi = math.inf, 0.0
    min_reg, at_reg = math.inf, (0.0, 0.0)
    for s in s_vals:
        d = phi.jet(float(s), 2).derivatives()
        if d[0] < min_phi:
            min_phi, at_phi = float(d[0]), float(s)
        for b in b_vals:
            if b < abs(s):
                continue
            reg = d[0] - s * d[1] + (b * b - s * s) * d[2]
            if reg < min_reg:
                min_reg, at_reg = float(reg), (float(s), float(b))
        reg = d[0] - s * d[1] + (bmax * bmax - s * s) * d[2]
        if reg < min_reg:
            min_reg, at_reg = float(reg), (float(s), float(bmax))
    return ValidationReport(
        passed=bool(min_phi > 0 and min_reg > 0),
        min_phi=min_phi,
        min_regularity=min_reg,
        worst_phi_at=at_phi,
        worst_regularity_at=at_reg,
        bmax=float(bmax),
        grid_n=int(grid_n),
    )


@dataclass(frozen=True)
class ScalarPack:
    s: float
    b2: float
    n: int
    phi: J.Jet
    Q: J.Jet
    Delta: J.Jet
    Phi: J.Jet
    Psi: J.Jet
    Omega: J.Jet
    Theta: J.Jet
    Xi: J.Jet
    Upsilon: J.Jet

    NAMES = ("Q", "Delta", "Phi", "Psi", "Omega", "Theta", "Xi", "Upsilon")

    def d(self, name, k=0):
        """k-th s-derivative of the named scalar."""
        return getattr(self, name).derivative(k)

    def row(self):
        out = {"s": self.s, "b2": self.b2, "n": self.n, "phi": self.phi.value}
        out["dQ"] = self.Q.derivative(1)
        for name in self.NAMES:
            out[name] = getattr(self, name).value
        return out


def scalar_pack(phi, s, b2, n, order=J.DEFAULT_ORDER):
    """All derived scalars as jets in ``s`` at fixed ``(b^2, n)``."""
    if n < 2:
        raise ValueError("dimension n must be >= 2")
    if order < 5:
        raise ValueError("scalar_pack needs jet order >= 5")
    if s * s > b2 * (1 + 1e-12) + 1e-300:
        raise OutOfDomain(f"s^2 = {s * s} exceeds b^2 = {b2}")
    if b2 >= phi.b0**2:
        raise OutOfDomain(f"b = {math.sqrt(b2)} outside the phi domain (b0 = {phi.b0})")
    t = J.jet_var(s, order)
    p = phi.jet(s, order)
    p1 = p.deriv()
    den = p - t * p1
    if den.value <= 0:
        raise Degenerate(f"phi - s phi' = {den.value} <= 0 at s = {s}")
    try:
        Q = p1 / den
    except DivisionByZeroJet as exc:
        raise Degenerate(str(exc)) from exc
    Q1 = Q.deriv()
    Q2 = Q1.deriv()
    cone = b2 - t * t
    one_sQ = 1.0 + t * Q
    Delta = one_sQ + cone * Q1
    if Delta.value <= 0:
        raise Degenerate(f"Delta = {Delta.value} <= 0 at s = {s}, b^2 = {b2}")
    Phi = -(Q - t * Q1) * (n * Delta + one_sQ) - cone * one_sQ * Q2
    Delta2 = Delta * Delta
    Psi = Q1 / (2.0 * Delta)
    Omega = Phi / (2.0 * Delta2)
    Theta = (Q - t * Q1) / (2.0 * Delta)
    Xi = (b2 * Q + t) * Phi / Delta2
    Upsilon = (t * Phi / Delta2 - 2.0 * b2 * Psi).deriv()
    return ScalarPack(float(s), float(b2), int(n), p, Q, Delta, Phi, Psi, Omega, Theta, Xi, Upsilon)


def s_grid(b2, count=PROFILE_POINTS, fraction=0.95, b0=None):
    """Symmetric grid strictly inside ``|s| < b`` (and ``|s| < b0``)."""
    half = fraction * math.sqrt(b2)
    if b0 is not None:
        half = min(half, fraction * b0)
    return np.linspace(-half, half, count)


def variation(values):
    values = np.asarray(values, dtype=float)
    return float(values.max() - values.min())


def is_constant(values, tol=CONSTANCY_TOL):
    values = np.asarray(values, dtype=float)
    return variation(values) <= tol * (1.0 + float(np.abs(values).max()))


@dataclass
class ProfileReport:
    name: str
    s: np.ndarray
    values: np.ndarray
    variation: float
    max_abs: float
    constant: bool
    tol: float = CONSTANCY_TOL
    flags: list = field(default_factory=list)

    def to_dict(self, include_values=False):
        out = {
            "name": self.name,
            "points": int(len(self.s)),
            "s_min": float(self.s[0]),
            "s_max": float(self.s[-1]),
            "variation": self.variation,
            "max_abs": self.max_abs,
            "constant": self.constant,
            "tol": self.tol,
            "flags": list(self.flags),
        }
        if include_values:
            out["values"] = [float(v) for v in self.values]
        return out


def scalar_profile(phi, b2, n, grid=None, name="Xi", k=0, tol=CONSTANCY_TOL):
    if grid is None:
        grid = s_grid(b2, b0=phi.b0)
    grid = np.asarray(grid, dtype=float)
    vals = np.array([scalar_pack(phi, float(s), b2, n).d(name, k) for s in grid])
    report = ProfileReport(
        name=name,
        s=grid,
        values=vals,
        variation=variation(vals),
        max_abs=float(np.abs(vals).max()),
        constant=is_constant(vals, tol),
        tol=tol,
    )
    return report


def xi_profile(phi, b2, n, grid=None, tol=CONSTANCY_TOL):
    """Xi over an s-grid with a constancy verdict.

    A profile that vanishes identically is flagged: Xi = 0 forces Phi = 0,
    which characterizes Riemannian (alpha, beta)-metrics.
    """
    report = scalar_profile(phi, b2, n, grid, "Xi", tol=tol)
    if report.max_abs <= tol:
        phi_vals = [scalar_pack(phi, float(s), b2, n).Phi.value for s in report.s]
        if max(abs(v) for v in phi_vals) <= tol:
            report.flags.append("riemannian: Phi vanishes identically")
    return report


def randers_type_detect(phi, grid_n=PROFILE_POINTS, tol=1e-9):
    """Return ``(k1, k2, k3)`` if phi = k1 sqrt(1 + k2 s^2) + k3 s on the grid."""
    d = phi.jet(0.0, 2).derivatives()
    k1, k3 = float(d[0]), float(d[1])
    if k1 <= 0:
        return None
    k2 = float(d[2]) / k1
    s = np.linspace(-0.95 * phi.b0, 0.95 * phi.b0, grid_n)
    inside = 1.0 + k2 * s * s
    if np.any(inside <= 0):
        return None
    vals = np.asarray(phi.evaluate(s), dtype=float)
    resid = np.abs(vals - k1 * np.sqrt(inside) - k3 * s)
    if np.all(resid <= tol * (1.0 + np.abs(vals))):
        return (k1, k2, k3)
    return None


_GL_CACHE = {}


def _gauss_nodes(count):
    if count not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(count)
        t = 0.5 * math.pi * (x + 1.0)
        _GL_CACHE[count] = (t, 0.5 * math.pi * w)
    return _GL_CACHE[count]


def volume_ratio(phi, b, n, nodes=BH_NODES):
    """f(b) = int sin^(n-2) t dt / int sin^(n-2) t phi(b cos t)^(-n) dt over [0, pi]."""
    t, w = _gauss_nodes(nodes)
    vals = np.asarray(phi.evaluate(b * np.cos(t)), dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise QuadratureFailure(f"phi(b cos t) <= 0 at some node for b = {b}")
    weight = np.sin(t) ** (n - 2)
    return float(np.sum(w * weight) / np.sum(w * weight * vals ** (-float(n))))


def bh_factor(phi, b, n, nodes=BH_NODES):
    """Busemann-Hausdorff factor ``T = f(b)`` and ``f'(b)/f(b)``.

    ``f = sigma_BH / sigma_alpha``.  The log-derivative uses central
    differences with step ``1e-4 * max(1, b)`` and one Richardson level.
    """
    if not 0 <= b < phi.b0:
        raise DomainError(f"b = {b} outside [0, b0 = {phi.b0})")
    T = volume_ratio(phi, b, n, nodes)
    h = 1e-4 * max(1.0, b)

    def central(step):
        return (
            math.log(volume_ratio(phi, b + step, n, nodes))
            - math.log(volume_ratio(phi, b - step, n, nodes))
        ) / (2.0 * step)

    dlog = (4.0 * central(h / 2.0) - central(h)) / 3.0
    return T, dlog
