"""Fixtures: an (alpha, beta)-metric on a coordinate patch plus probe points.

The built-in catalog covers the three profiles of the motivating example
(Randers, powers of 1 + s, 1 + s^2), a Riemannian control, a Randers-type
profile, the Funk metric on the unit ball, a parallel 1-form and a 1-form
with a nonzero antisymmetric derivative.
"""
from dataclasses import dataclass, field
import math

import numpy as np
import sympy as sp
from scipy.stats import norm, qmc

from .geometry import MetricField, OneFormField, coordinate_symbols
from .scalars import PhiSpec


@dataclass
class Fixture:
    name: str
    metric: MetricField
    form: OneFormField
    phi: PhiSpec
    points: list
    directions: int = 0
    radius: float = 0.05
    volume_shift: object = None  # sympy expression psi(x); sigma -> sigma * exp(psi)
    notes: str = ""
    _shift_fns: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.metric.n != self.form.n:
            raise ValueError("metric and 1-form dimensions differ")
        self.points = [np.asarray(p, dtype=float) for p in self.points]
        for p in self.points:
            if p.shape != (self.n,):
                raise ValueError(f"probe point {p} is not {self.n}-dimensional")
        if not self.directions:
            self.directions = 4 * self.n

    @property
    def n(self):
        return self.metric.n

    def F(self, x, y):
        a = self.metric.a(x)
        b = self.form.b(x)
        y = np.asarray(y, dtype=float)
        alpha = math.sqrt(float(y @ a @ y))
        return alpha * float(self.phi.evaluate((b @ y) / alpha))

    def shift(self, x):
        """(psi(x), grad psi(x)) of the volume-form shift; zeros when absent."""
        if self.volume_shift is None:
            return 0.0, np.zeros(self.n)
        if self._shift_fns is None:
            syms = coordinate_symbols(self.n)
            psi = sp.sympify(self.volume_shift, locals={str(s): s for s in syms})
            grad = [sp.diff(psi, s) for s in syms]
            self._shift_fns = (
                sp.lambdify([syms], psi, "numpy"),
                sp.lambdify([syms], grad, "numpy"),
            )
        x = tuple(np.asarray(x, dtype=float))
        return float(self._shift_fns[0](x)), np.asarray(self._shift_fns[1](x), dtype=float)

    def samples(self, count=20, seed=0):
        """Deterministic (x, y) pairs: x near the probe points, y on the unit sphere."""
        sampler = qmc.Halton(d=2 * self.n, scramble=True, seed=seed)
        u = sampler.random(count)
        out = []
        for j in range(count):
            center = self.points[j % len(self.points)]
            x = center + self.radius * (2.0 * u[j, : self.n] - 1.0)
            z = norm.ppf(np.clip(u[j, self.n :], 1e-6, 1 - 1e-6))
            if np.linalg.norm(z) < 1e-3:
                z = np.ones(self.n)
            out.append((x, z / np.linalg.norm(z)))
        return out

    def describe(self):
        out = {
            "name": self.name,
            "n": self.n,
            "alpha": self.metric.describe(),
            "beta": self.form.describe(),
            "phi": self.phi.to_dict(),
            "points": [[float(v) for v in p] for p in self.points],
            "directions": int(self.directions),
        }
        if self.volume_shift is not None:
            out["volume_shift"] = str(self.volume_shift)
        if self.notes:
            out["notes"] = self.notes
        return out


def direction_set(metric, x, count, seed=0, axes=True):
    """``count`` unit-alpha directions from a scrambled Halton sequence.

    With ``axes`` the alpha-normalized +-e_i are prepended so that every
    coordinate direction is represented.
    """
    a = metric.a(x)
    n = len(a)
    L = np.linalg.cholesky(a)
    dirs = []
    if axes:
        for i in range(n):
            for sign in (1.0, -1.0):
                e = np.zeros(n)
                e[i] = sign
                dirs.append(e / math.sqrt(float(e @ a @ e)))
    u = qmc.Halton(d=n, scramble=True, seed=seed).random(count)
    z = norm.ppf(np.clip(u, 1e-6, 1 - 1e-6))
    for row in z:
        if np.linalg.norm(row) < 1e-3:
            row = np.ones(n)
        w = np.linalg.solve(L.T, row / np.linalg.norm(row))
        dirs.append(w)
    return dirs


_LINEAR_2 = [[0.12, 0.25], [-0.08, 0.15]]
_LINEAR_3 = [[0.1, 0.2, 0.0], [-0.05, 0.15, 0.1], [0.02, 0.0, 0.12]]
_OFFSET_2 = [0.2, 0.1]
_OFFSET_3 = [0.15, 0.1, -0.05]


def _linear(n):
    if n == 2:
        return OneFormField.linear(_LINEAR_2, _OFFSET_2)
    return OneFormField.linear(_LINEAR_3, _OFFSET_3)


def _points(n):
    if n == 2:
        return [[0.3, 0.2], [-0.2, 0.4]]
    return [[0.3, 0.2, -0.1], [-0.2, 0.1, 0.3]]


def _build(name):
    parts = name.split("_")
    n = int(parts[-1][1:]) if parts[-1].startswith("n") and parts[-1][1:].isdigit() else 2
    if name.startswith("flat_"):
        profile = parts[1]
        phi = {
            "randers": PhiSpec.randers(),
            "power1": PhiSpec.power(1),
            "power2": PhiSpec.power(2),
            "quadratic": PhiSpec.quadratic(),
        }[profile]
        return Fixture(
            name,
            MetricField.euclidean(n),
            OneFormField.constant([0.3, 0.2] + [0.1] * (n - 2)),
            phi,
            _points(n),
            notes="trivial (parallel) 1-form on flat alpha",
        )
    if name.startswith("linear_"):
        profile = parts[1]
        phi = {
            "randers": PhiSpec.randers(),
            "power1": PhiSpec.power(1),
            "power2": PhiSpec.power(2),
            "quadratic": PhiSpec.quadratic(),
        }[profile]
        return Fixture(name, MetricField.euclidean(n), _linear(n), phi, _points(n),
                       notes="generic linear 1-form: nonzero r_ij and s_ij")
    if name.startswith("conformal_"):
        return Fixture(
            name,
            MetricField.conformal("exp(2*x1/5)", n),
            _linear(n),
            PhiSpec.power(2),
            _points(n),
            notes="curved alpha, generic 1-form",
        )
    if name.startswith("riemannian_"):
        return Fixture(
            name,
            MetricField.conformal("exp(2*x1/5)", n),
            _linear(n),
            PhiSpec.riemannian(),
            _points(n),
            notes="phi = 1: F = alpha regardless of beta",
        )
    if name.startswith("randerstype_"):
        return Fixture(name, MetricField.euclidean(n), _linear(n),
                       PhiSpec.randers_type(1.0, 0.5, 0.3), _points(n))
    if name.startswith("funk_"):
        pts = [[0.3, 0.2], [-0.25, 0.35]] if n == 2 else [[0.3, 0.2, -0.1], [-0.2, 0.1, 0.3]]
        return Fixture(name, MetricField.funk_ball(n), OneFormField.funk_ball(n),
                       PhiSpec.randers(), pts, notes="Funk metric on the unit ball")
    if name.startswith("parallel_"):
        return Fixture(name, MetricField.euclidean(n),
                       OneFormField.constant([0.3, 0.2] + [0.1] * (n - 2)),
                       PhiSpec.power(1), _points(n), notes="r_ij = s_ij = 0")
    if name.startswith("nonzerosij_"):
        syms = coordinate_symbols(n)
        entries = [0] * n
        entries[1] = syms[0]
        return Fixture(name, MetricField.euclidean(n),
                       OneFormField.from_expressions(entries),
                       PhiSpec.randers(), [[0.3, 0.7] + [0.0] * (n - 2)],
                       radius=0.0, notes="b = (0, x1): b_{2|1} = 1 only")
    if name.startswith("shifted_"):
        return Fixture(name, MetricField.euclidean(n),
                       OneFormField.constant([0.3, 0.2] + [0.1] * (n - 2)),
                       PhiSpec.riemannian(), _points(n),
                       volume_shift="3*x1/10 - x2/5",
                       notes="Riemannian with shifted volume form: S is a 1-form")
    raise KeyError(f"unknown built-in fixture {name!r}")


BUILTIN_NAMES = (
    "flat_randers_n2", "flat_power1_n2", "flat_power2_n2", "flat_quadratic_n2",
    "flat_randers_n3", "flat_power1_n3", "flat_power2_n3", "flat_quadratic_n3",
    "linear_randers_n2", "linear_randers_n3", "linear_power1_n2", "linear_power1_n3",
    "linear_quadratic_n2", "linear_quadratic_n3",
    "conformal_power2_n3", "riemannian_n2", "randerstype_n2",
    "funk_n2", "funk_n3", "parallel_n2", "nonzerosij_n2", "shifted_n2",
)

GROUPS = {
    "profiles": [n for n in BUILTIN_NAMES if n.startswith("flat_")],
    "oracle": ["linear_randers_n2", "linear_randers_n3", "linear_power1_n2",
               "linear_power1_n3", "linear_quadratic_n2", "linear_quadratic_n3"],
    "equivalence": ["parallel_n2", "funk_n2", "nonzerosij_n2"]
    + [n for n in BUILTIN_NAMES if n.startswith("flat_")],
    "all": list(BUILTIN_NAMES),
}

_CACHE = {}


def builtin(name):
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown built-in fixture {name!r}")
    if name not in _CACHE:
        _CACHE[name] = _build(name)
    return _CACHE[name]


def catalog(group="all"):
    return [builtin(name) for name in GROUPS[group]]
