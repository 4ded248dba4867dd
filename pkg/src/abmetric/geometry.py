"""Riemannian substrate: alpha = sqrt(a_ij y^i y^j), beta = b_i y^i.

Index conventions used throughout the package:

* ``da[i, j, k] = d a_ij / d x^k``
* ``db[i, j]    = d b_i  / d x^j``
* ``gamma[k, i, j] = Gamma^k_ij``
* ``bcov[i, j] = b_{i|j} = d_j b_i - b_k Gamma^k_ij``
"""
from dataclasses import dataclass, field
import math

import numpy as np
import sympy as sp

from .errors import OutOfCone, SingularMetric, ZeroBeta

COND_LIMIT = 1e12


def coordinate_symbols(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def _fd_jacobian(fn, x, shape):
    """Central-difference Jacobian, step 1e-6 * (1 + |x|), last axis = x index."""
    x = np.asarray(x, dtype=float)
    h = 1e-6 * (1.0 + float(np.linalg.norm(x)))
    out = np.empty(shape + (len(x),))
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        out[..., k] = (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h)
    return out


class _SymbolicMixin:
    """Shared lambdify plumbing for fields given as sympy expressions."""

    def _setup_symbolic(self, expr, symbols):
        self.expr = expr
        self.symbols = tuple(symbols)
        self._value_fn = sp.lambdify([self.symbols], expr, "numpy")
        jac = sp.Array([[sp.diff(e, xk) for xk in self.symbols] for e in expr])
        self._jac_fn = sp.lambdify([self.symbols], jac, "numpy")

    def jax_fn(self):
        """The field as a jax-traceable callable of ``x``."""
        if self.expr is None:
            raise NotImplementedError("jax evaluation needs a symbolic field")
        if getattr(self, "_jax_fn", None) is None:
            self._jax_fn = sp.lambdify([self.symbols], self.expr, "jax")
        return self._jax_fn


class MetricField(_SymbolicMixin):
    """Riemannian metric ``a(x)`` with first derivatives.

    Either pass ``expr`` (a sympy Matrix in ``symbols``), giving analytic
    derivatives, or a callable ``a`` with an optional callable ``da``; without
    ``da`` central differences are used.
    """

    def __init__(self, n, a=None, da=None, *, expr=None, symbols=None, kind="custom"):
        self.n = int(n)
        self.kind = kind
        self.expr = None
        self._jax_fn = None
        if expr is not None:
            expr = sp.Matrix(expr)
            if expr.shape != (n, n):
                raise ValueError(f"metric expression must be {n}x{n}")
            self._setup_symbolic(expr, symbols or coordinate_symbols(n))
            self._a = lambda x: np.array(self._value_fn(tuple(x)), dtype=float).reshape(n, n)
            flat = self._jac_fn
            self._da = lambda x: np.array(flat(tuple(x)), dtype=float).reshape(n * n, n).reshape(n, n, n)
        else:
            if a is None:
                raise ValueError("need either expr or a callable a(x)")
            self._a = lambda x: np.asarray(a(x), dtype=float)
            self._da = da
        self.analytic = expr is not None or da is not None

    def a(self, x):
        return self._a(np.asarray(x, dtype=float))

    def da(self, x):
        x = np.asarray(x, dtype=float)
        if self._da is None:
            return _fd_jacobian(self.a, x, (self.n, self.n))
        return np.asarray(self._da(x), dtype=float)

    def describe(self):
        out = {"kind": self.kind, "n": self.n}
        if self.expr is not None:
            out["expr"] = [[str(e) for e in row] for row in self.expr.tolist()]
        return out

    @classmethod
    def euclidean(cls, n):
        return cls(n, expr=sp.eye(n), kind="euclidean")

    @classmethod
    def diagonal(cls, entries, symbols=None):
        n = len(entries)
        syms = symbols or coordinate_symbols(n)
        loc = {str(s): s for s in syms}
        diag = [sp.sympify(e, locals=loc) if isinstance(e, str) else e for e in entries]
        return cls(n, expr=sp.diag(*diag), symbols=syms, kind="diagonal")

    @classmethod
    def conformal(cls, factor, n, symbols=None):
        syms = symbols or coordinate_symbols(n)
        loc = {str(s): s for s in syms}
        f = sp.sympify(factor, locals=loc) if isinstance(factor, str) else factor
        return cls(n, expr=f * sp.eye(n), symbols=syms, kind="conformal")

    @classmethod
    def funk_ball(cls, n):
        """alpha of the Funk metric on the unit ball: ((1-|x|^2)|y|^2 + <x,y>^2)/(1-|x|^2)^2."""
        syms = coordinate_symbols(n)
        X = sp.Matrix(syms)
        q = 1 - (X.T * X)[0]
        expr = (q * sp.eye(n) + X * X.T) / q**2
        return cls(n, expr=expr, symbols=syms, kind="funk_ball")


class OneFormField(_SymbolicMixin):
    """1-form ``b(x)`` with first derivatives ``db[i, j] = d_j b_i``."""

    def __init__(self, n, b=None, db=None, *, expr=None, symbols=None, kind="custom"):
        self.n = int(n)
        self.kind = kind
        self.expr = None
        self._jax_fn = None
        if expr is not None:
            expr = sp.Matrix(expr).reshape(n, 1)
            self._setup_symbolic(expr, symbols or coordinate_symbols(n))
            self._b = lambda x: np.array(self._value_fn(tuple(x)), dtype=float).reshape(n)
            flat = self._jac_fn
            self._db = lambda x: np.array(flat(tuple(x)), dtype=float).reshape(n, n)
        else:
            if b is None:
                raise ValueError("need either expr or a callable b(x)")
            self._b = lambda x: np.asarray(b(x), dtype=float)
            self._db = db
        self.analytic = expr is not None or db is not None

    def b(self, x):
        return self._b(np.asarray(x, dtype=float))

    def db(self, x):
        x = np.asarray(x, dtype=float)
        if self._db is None:
            return _fd_jacobian(self.b, x, (self.n,))
        return np.asarray(self._db(x), dtype=float)

    def describe(self):
        out = {"kind": self.kind, "n": self.n}
        if self.expr is not None:
            out["expr"] = [str(e) for e in self.expr]
        return out

    @classmethod
    def constant(cls, vector):
        n = len(vector)
        return cls(n, expr=sp.Matrix([sp.nsimplify(v) if isinstance(v, str) else v for v in vector]), kind="constant")

    @classmethod
    def linear(cls, matrix, offset=None):
        """b_i = M_ij x^j (+ offset_i)."""
        M = sp.Matrix(matrix)
        n = M.shape[0]
        syms = coordinate_symbols(n)
        expr = M * sp.Matrix(syms)
        if offset is not None:
            expr = expr + sp.Matrix(offset)
        return cls(n, expr=expr, symbols=syms, kind="linear")

    @classmethod
    def funk_ball(cls, n):
        syms = coordinate_symbols(n)
        X = sp.Matrix(syms)
        q = 1 - (X.T * X)[0]
        return cls(n, expr=X / q, symbols=syms, kind="funk_ball")

    @classmethod
    def from_expressions(cls, entries, symbols=None):
        n = len(entries)
        syms = symbols or coordinate_symbols(n)
        loc = {str(s): s for s in syms}
        expr = sp.Matrix([sp.sympify(e, locals=loc) for e in entries])
        return cls(n, expr=expr, symbols=syms, kind="expression")


def metric_inverse(a):
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise SingularMetric("metric is not positive definite") from None
    if np.linalg.cond(a) > COND_LIMIT:
        raise SingularMetric(f"metric condition number {np.linalg.cond(a):.3g}")
    return np.linalg.inv(a)


def christoffel(metric, x, a_inv=None):
    """Gamma^k_ij = 1/2 a^kl (d_i a_jl + d_j a_il - d_l a_ij); returns gamma[k, i, j]."""
    a = metric.a(x)
    if a_inv is None:
        a_inv = metric_inverse(a)
    da = metric.da(x)
    # lowered[l, i, j] = d_i a_jl + d_j a_il - d_l a_ij
    lowered = np.einsum("jli->lij", da) + np.einsum("ilj->lij", da) - np.einsum("ijl->lij", da)
    return 0.5 * np.einsum("kl,lij->kij", a_inv, lowered)


@dataclass
class BetaData:
    """beta-derivation tensors and their contractions at (x, y)."""

    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    a_inv: np.ndarray
    b_i: np.ndarray  # covariant components
    b_up: np.ndarray  # b^i = a^ij b_j
    b2: float
    bcov: np.ndarray  # b_{i|j}
    r_ij: np.ndarray
    s_ij: np.ndarray
    r_i: np.ndarray  # r_j = b^i r_ij
    s_i: np.ndarray  # s_j = b^i s_ij
    r_i0: np.ndarray
    s_i0: np.ndarray  # s^i_0 = a^ih s_hj y^j
    r_0: float
    s_0: float
    r_00: float
    alpha: float
    beta: float

    @property
    def b(self):
        return math.sqrt(self.b2)

    @property
    def s(self):
        """The ratio beta / alpha (not to be confused with s_ij)."""
        return self.beta / self.alpha

    @property
    def y_low(self):
        return self.a @ self.y

    def identity_residuals(self):
        """How well the stored contractions reproduce from the tensors."""
        y = self.y
        return {
            "symmetry_r": float(np.abs(self.r_ij - self.r_ij.T).max()),
            "antisymmetry_s": float(np.abs(self.s_ij + self.s_ij.T).max()),
            "decomposition": float(np.abs(self.r_ij + self.s_ij - self.bcov).max()),
            "s_b": abs(float(self.s_i @ self.b_up)),
            "r_0": abs(float(self.r_i @ y) - self.r_0),
            "s_0": abs(float(self.s_i @ y) - self.s_0),
            "r_00": abs(float(y @ self.r_ij @ y) - self.r_00),
        }


def covariant_derivative(metric, form, x, gamma=None):
    b = form.b(x)
    if gamma is None:
        gamma = christoffel(metric, x)
    return form.db(x) - np.einsum("k,kij->ij", b, gamma)


def beta_tensors(a, b_i, bcov, y):
    """BetaData from raw tensors; used directly when r_ij, s_ij are injected."""
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("direction y must be nonzero")
    a_inv = metric_inverse(a)
    r = 0.5 * (bcov + bcov.T)
    s = 0.5 * (bcov - bcov.T)
    b_up = a_inv @ b_i
    b2 = float(b_i @ b_up)
    r_i = b_up @ r
    s_i = b_up @ s
    return BetaData(
        x=np.zeros(len(y)),
        y=y,
        a=a,
        a_inv=a_inv,
        b_i=np.asarray(b_i, dtype=float),
        b_up=b_up,
        b2=b2,
        bcov=bcov,
        r_ij=r,
        s_ij=s,
        r_i=r_i,
        s_i=s_i,
        r_i0=r @ y,
        s_i0=a_inv @ (s @ y),
        r_0=float(r_i @ y),
        s_0=float(s_i @ y),
        r_00=float(y @ r @ y),
        alpha=math.sqrt(float(y @ a @ y)),
        beta=float(b_i @ y),
    )


def beta_data(metric, form, x, y):
    x = np.asarray(x, dtype=float)
    a = metric.a(x)
    a_inv = metric_inverse(a)
    gamma = christoffel(metric, x, a_inv)
    bcov = covariant_derivative(metric, form, x, gamma)
    bd = beta_tensors(a, form.b(x), bcov, y)
    bd.x = x
    return bd


def b_norm(metric, form, x):
    a = metric.a(x)
    b = form.b(x)
    return math.sqrt(float(b @ np.linalg.solve(a, b)))


def db_check(metric, form, x, y, h=1e-5):
    """|y^m d_m b - (r_0 + s_0)/b| with the left side by central differences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    bd = beta_data(metric, form, x, y)
    if bd.b2 == 0:
        raise ZeroBeta("db_check needs b > 0")

    def central(step):
        return (b_norm(metric, form, x + step * y) - b_norm(metric, form, x - step * y)) / (2 * step)

    fd = (4.0 * central(h / 2) - central(h)) / 3.0
    return abs(fd - (bd.r_0 + bd.s_0) / bd.b)


@dataclass
class AdaptedFrame:
    """Columns of ``E`` are an a-orthonormal frame whose first vector is b^i/b."""

    E: np.ndarray
    b: float

    def residuals(self, a, b_i):
        n = len(b_i)
        target = np.zeros(n)
        target[0] = self.b
        return {
            "orthonormality": float(np.abs(self.E.T @ a @ self.E - np.eye(n)).max()),
            "b_alignment": float(np.abs(self.E.T @ b_i - target).max()),
        }


def adapted_frame(metric, form, x):
    x = np.asarray(x, dtype=float)
    return adapted_frame_from(metric.a(x), form.b(x))


def adapted_frame_from(a, b_i):
    n = len(b_i)
    b_up = np.linalg.solve(a, b_i)
    b2 = float(b_i @ b_up)
    if b2 <= 0.0:
        raise ZeroBeta("b = 0: the special coordinates need b > 0")
    b = math.sqrt(b2)
    vecs = [b_up / b]
    for k in range(n):
        if len(vecs) == n:
            break
        v = np.zeros(n)
        v[k] = 1.0
        for _ in range(2):  # second pass re-orthogonalizes
            for u in vecs:
                v = v - (u @ a @ v) * u
        norm = math.sqrt(max(float(v @ a @ v), 0.0))
        if norm < 1e-8:
            continue
        v = v / norm
        lead = v[np.flatnonzero(np.abs(v) > 1e-14)[0]]
        if lead < 0:
            v = -v
        vecs.append(v)
    return AdaptedFrame(E=np.column_stack(vecs), b=b)


@dataclass
class SpecialData:
    s: float
    b: float
    alpha_bar: float
    y_frame: np.ndarray
    r11: float
    r1A: np.ndarray
    s1A: np.ndarray
    rAB: np.ndarray
    bar_r10: float
    bar_s10: float
    bar_r00: float
    bar_r0: float
    bar_s0: float
    residuals: dict = field(default_factory=dict)


def transform_special(bd, frame, s=None):
    """Express the beta data in the adapted frame and check the frame identities.

    With ``s`` given, the direction is rebuilt from its transverse part
    ``u^A`` as ``y^1 = s * alpha_bar / sqrt(b^2 - s^2)``.
    """
    E = frame.E
    b = frame.b
    y_frame = np.linalg.solve(E, bd.y)
    u = y_frame[1:]
    alpha_bar = float(np.linalg.norm(u))
    if s is None:
        s = bd.s
    if s * s >= b * b:
        raise OutOfCone(f"s^2 = {s * s} must be below b^2 = {b * b}")
    root = math.sqrt(b * b - s * s)
    y_frame = np.concatenate([[s * alpha_bar / root], u])
    y = E @ y_frame

    r_f = E.T @ bd.r_ij @ E
    s_f = E.T @ bd.s_ij @ E
    r_vec = E.T @ bd.r_i
    s_vec = E.T @ bd.s_i
    r11 = float(r_f[0, 0])
    r1A = r_f[0, 1:]
    s1A = s_f[0, 1:]
    rAB = r_f[1:, 1:]
    bar_r10 = float(r1A @ u)
    bar_s10 = float(s1A @ u)
    bar_r00 = float(u @ rAB @ u)
    bar_r0 = float(r_vec[1:] @ u)
    bar_s0 = float(s_vec[1:] @ u)

    alpha = math.sqrt(float(y @ bd.a @ y))
    beta = float(bd.b_i @ y)
    r_0 = float(bd.r_i @ y)
    s_0 = float(bd.s_i @ y)
    r_00 = float(y @ bd.r_ij @ y)
    res = {
        "s_1": abs(float(s_vec[0])),
        "r_1": abs(float(r_vec[0]) - b * r11),
        "r_A": float(np.abs(r_vec[1:] - b * r1A).max(initial=0.0)),
        "s_A": float(np.abs(s_vec[1:] - b * s1A).max(initial=0.0)),
        "alpha": abs(alpha - b * alpha_bar / root),
        "beta": abs(beta - b * s * alpha_bar / root),
        "r_0": abs(r_0 - (s * b * r11 * alpha_bar / root + b * bar_r10)),
        "s_0": abs(s_0 - b * bar_s10) + abs(s_0 - bar_s0),
        "r_00": abs(
            r_00
            - (s * s * alpha_bar**2 / (b * b - s * s) * r11 + 2 * s * alpha_bar / root * bar_r10 + bar_r00)
        ),
    }
    return SpecialData(
        s=float(s),
        b=b,
        alpha_bar=alpha_bar,
        y_frame=y_frame,
        r11=r11,
        r1A=r1A,
        s1A=s1A,
        rAB=rAB,
        bar_r10=bar_r10,
        bar_s10=bar_s10,
        bar_r00=bar_r00,
        bar_r0=bar_r0,
        bar_s0=bar_s0,
        residuals=res,
    )
