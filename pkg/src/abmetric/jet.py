"""Truncated univariate Taylor arithmetic ("jets").

A :class:`Jet` stores the normalized Taylor coefficients ``c_k = f^(k)(s0)/k!``
of a scalar function of ``s`` at a base point ``s0``, truncated at a fixed
order.  Arithmetic on jets propagates exact derivatives, which is how every
s-derivative of phi, Q, Delta, Phi, Psi and Omega is obtained.

The coefficient kernels come from the compiled ``_jetcore`` extension when it
is importable and from ``_jetcore_py`` otherwise.  Set ``ABMETRIC_PURE_PYTHON=1``
to force the fallback.
"""
import math
import os

import numpy as np

from .errors import DivisionByZeroJet, DomainError

if os.environ.get("ABMETRIC_PURE_PYTHON"):
    from . import _jetcore_py as kernels
else:
    try:
        from . import _jetcore as kernels
    except ImportError:  # pragma: no cover - depends on the build
        from . import _jetcore_py as kernels

BACKEND = "cython" if kernels.__name__.endswith("_jetcore") else "python"

DEFAULT_ORDER = 6
DIV_EPS = 1e-12


def _is_scalar(x):
    return isinstance(x, (int, float, np.floating, np.integer))


class Jet:
    """Immutable truncated Taylor series in one variable."""

    __slots__ = ("coeffs", "basepoint")

    def __init__(self, coeffs, basepoint=0.0):
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError(f"non-finite jet coefficients {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "basepoint", float(basepoint))

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    def __reduce__(self):
        return (Jet, (self.coeffs, self.basepoint))

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k):
        if not 0 <= k <= self.order:
            raise IndexError(f"derivative {k} outside jet order {self.order}")
        return math.factorial(k) * self.coeffs[k]

    def derivatives(self):
        return np.array([math.factorial(k) * c for k, c in enumerate(self.coeffs)])

    def deriv(self):
        """Jet of f' (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        c = self.coeffs
        return Jet([(k + 1) * c[k + 1] for k in range(self.order)], self.basepoint)

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[: order + 1], self.basepoint)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r}, basepoint={self.basepoint!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Jet)
            and self.coeffs == other.coeffs
            and self.basepoint == other.basepoint
        )

    def __hash__(self):
        return hash((self.coeffs, self.basepoint))

    # -- arithmetic ---------------------------------------------------------

    def _constant(self, c):
        return Jet((float(c),) + (0.0,) * self.order, self.basepoint)

    def _align(self, other):
        if _is_scalar(other):
            return self, self._constant(other)
        if not isinstance(other, Jet):
            return NotImplemented, NotImplemented
        if other.basepoint != self.basepoint:
            raise ValueError(
                f"jet basepoints differ: {self.basepoint} vs {other.basepoint}"
            )
        m = min(self.order, other.order)
        return self.truncate(m), other.truncate(m)

    def __add__(self, other):
        a, b = self._align(other)
        if a is NotImplemented:
            return NotImplemented
        return Jet([x + y for x, y in zip(a.coeffs, b.coeffs)], a.basepoint)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(other)
        if a is NotImplemented:
            return NotImplemented
        return Jet([x - y for x, y in zip(a.coeffs, b.coeffs)], a.basepoint)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet([-x for x in self.coeffs], self.basepoint)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if _is_scalar(other):
            return Jet([x * other for x in self.coeffs], self.basepoint)
        a, b = self._align(other)
        if a is NotImplemented:
            return NotImplemented
        return Jet(kernels.mul(a.coeffs, b.coeffs), a.basepoint)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            if other == 0:
                raise DivisionByZeroJet("division of a jet by zero")
            return Jet([x / other for x in self.coeffs], self.basepoint)
        a, b = self._align(other)
        if a is NotImplemented:
            return NotImplemented
        if abs(b.coeffs[0]) < DIV_EPS * (1.0 + abs(a.coeffs[0])):
            raise DivisionByZeroJet(
                f"denominator leading coefficient {b.coeffs[0]!r} is degenerate"
            )
        return Jet(kernels.div(a.coeffs, b.coeffs), a.basepoint)

    def __rtruediv__(self, other):
        return self._constant(other) / self

    def __pow__(self, r):
        if isinstance(r, (int, np.integer)) or (
            _is_scalar(r) and float(r).is_integer() and abs(r) < 64
        ):
            r = int(r)
            if r < 0:
                return 1.0 / (self ** (-r))
            result = self._constant(1.0)
            base = self
            while r:
                if r & 1:
                    result = result * base
                base = base * base
                r >>= 1
            return result
        if self.coeffs[0] <= 0.0:
            raise DomainError(
                f"non-integer power {r} of a jet with leading coefficient "
                f"{self.coeffs[0]}"
            )
        return Jet(kernels.powr(self.coeffs, float(r)), self.basepoint)


def sqrt(a):
    if a.coeffs[0] <= 0.0:
        raise DomainError(f"sqrt of a jet with leading coefficient {a.coeffs[0]}")
    return Jet(kernels.sqrt(a.coeffs), a.basepoint)


def exp(a):
    return Jet(kernels.exp(a.coeffs), a.basepoint)


def log(a):
    if a.coeffs[0] <= 0.0:
        raise DomainError(f"log of a jet with leading coefficient {a.coeffs[0]}")
    return Jet(kernels.log(a.coeffs), a.basepoint)


def jet_var(s0, order=DEFAULT_ORDER):
    """The identity function ``s -> s`` expanded at ``s0``."""
    if order < 1:
        raise ValueError("jet_var needs order >= 1")
    if not math.isfinite(s0):
        raise DomainError(f"non-finite base point {s0!r}")
    return Jet((s0, 1.0) + (0.0,) * (order - 1), s0)


def jet_const(c, order=DEFAULT_ORDER, s0=0.0):
    return Jet((c,) + (0.0,) * order, s0)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def jet_arith(a, b, op):
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    return fn(a, b)


def jet_elem(a, fn, r=None):
    if fn == "pow":
        if r is None:
            raise ValueError("pow needs an exponent")
        return a ** r
    if fn == "sqrt":
        return sqrt(a)
    if fn == "exp":
        return exp(a)
    if fn in ("ln", "log"):
        return log(a)
    raise ValueError(f"unknown elementary function {fn!r}")


_FD_STEP = {0: 1e-3, 1: 4e-2, 2: 6e-2, 3: 8e-2, 4: 8e-2}
_FD_LEVELS = 2


def _central(f, s0, k, h):
    total = 0.0
    for j in range(k + 1):
        total += (-1) ** j * math.comb(k, j) * f(s0 + (k / 2.0 - j) * h)
    return total / h**k


def jet_fd_check(f, s0, k, h=None, levels=_FD_LEVELS):
    """Richardson-extrapolated central difference estimate of ``f^(k)(s0)``.

    Central differences at ``h, h/2, ..., h/2**levels`` are combined into an
    ``O(h**(2 levels + 2))`` estimate.  Returns ``(estimate, error_indicator)``
    where the indicator is the change contributed by the last level.
    """
    if not 0 <= k <= 4:
        raise ValueError("jet_fd_check supports derivative orders 0..4")
    if k == 0:
        return float(f(s0)), 0.0
    if h is None:
        h = _FD_STEP[k]
    row = [_central(f, s0, k, h / 2.0**i) for i in range(levels + 1)]
    gap = 0.0
    for m in range(1, levels + 1):
        factor = 4.0**m
        prev = row
        row = [(factor * prev[i + 1] - prev[i]) / (factor - 1.0) for i in range(len(prev) - 1)]
        gap = abs(row[-1] - prev[-1])
    return row[0], gap
