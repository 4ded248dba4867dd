"""Fixture configuration files.

An INI-style grammar: ``[section]`` headers, ``key = value`` lines, ``#`` or
``;`` comments on their own line.  Lists are comma separated; matrices and
point lists separate rows with ``;``.

::

    [fixture]
    name = funk_like
    n = 2
    # include = funk_n2          (start from a built-in fixture)

    [alpha]
    kind = euclidean              # euclidean | diagonal | conformal | funk_ball
    # entries = 1, x1**2          (diagonal)
    # factor = exp(2*x1)          (conformal)

    [beta]
    kind = linear                 # constant | linear | funk_ball | expressions
    matrix = 0.1, 0; 0, 0.1
    # offset = 0.2, 0
    # vector = 0.3, 0             (constant)
    # entries = 0, x1             (expressions)

    [phi]
    family = power                # riemannian | randers | power | quadratic | randers_type | taylor
    m = 1
    # k1, k2, k3                  (randers_type); coeffs, radius (taylor)

    [probe]
    points = 0.3, 0.2; -0.2, 0.4
    directions = 8
    grid = 81
    b2 = 0.25                     # scalars command only
    s = 0.2                       # scalars command only
    # volume_shift = 3*x1/10      (psi in sigma -> sigma * exp(psi))

    [tolerances]
    s_fit = 1e-6                  # any field of the tolerance record

    [catalog]
    include = profiles           # a built-in group, or
    # fixtures = funk_n2, parallel_n2
"""
import configparser
import dataclasses
from dataclasses import dataclass, field
import math

import numpy as np
import sympy as sp

from .errors import ParseError, ValidationError
from .fixtures import BUILTIN_NAMES, GROUPS, Fixture, builtin
from .geometry import MetricField, OneFormField, coordinate_symbols
from .scalars import FAMILIES, PhiSpec
from .tolerances import DEFAULT, Tolerances

SECTIONS = ("fixture", "alpha", "beta", "phi", "probe", "tolerances", "catalog")
ALPHA_KINDS = ("euclidean", "diagonal", "conformal", "funk_ball")
BETA_KINDS = ("constant", "linear", "funk_ball", "expressions")


@dataclass
class ProbeConfig:
    points: list = None
    directions: int = None
    grid: int = 81
    b2: float = None
    s: float = None


@dataclass
class RunConfig:
    fixtures: list
    probe: ProbeConfig
    tolerances: Tolerances = DEFAULT
    overrides: dict = field(default_factory=dict)


def _floats(text, key):
    try:
        return [float(sp.sympify(v)) for v in text.split(",") if v.strip()]
    except (sp.SympifyError, TypeError, ValueError):
        raise ValidationError(key, f"expected a comma-separated list of numbers, got {text!r}") from None


def _rows(text, key):
    return [_floats(row, key) for row in text.split(";") if row.strip()]


def _float(text, key):
    vals = _floats(text, key)
    if len(vals) != 1:
        raise ValidationError(key, f"expected one number, got {text!r}")
    return vals[0]


def _int(text, key, minimum=1):
    try:
        v = int(text)
    except ValueError:
        raise ValidationError(key, f"expected an integer, got {text!r}") from None
    if v < minimum:
        raise ValidationError(key, f"must be >= {minimum}")
    return v


def _read(text):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("content before the first [section] header", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ParseError(f"expected 'key = value', got {line.strip()!r}", lineno) from None
    for name in parser.sections():
        if name not in SECTIONS:
            raise ParseError(f"unknown section [{name}]", _line_of(text, f"[{name}]"))
    return parser


def _line_of(text, needle):
    for i, line in enumerate(text.splitlines(), 1):
        if line.strip().startswith(needle):
            return i
    return None


def _phi(sec):
    family = sec.get("family", "").strip()
    if family not in FAMILIES:
        raise ValidationError("phi.family", f"expected one of {', '.join(FAMILIES)}, got {family!r}")
    need = {"power": ("m",), "randers_type": ("k1", "k2", "k3"), "taylor": ("coeffs", "radius")}.get(family, ())
    for key in need:
        if key not in sec:
            raise ValidationError(f"phi.{key}", f"required for family {family!r}")
    try:
        if family == "power":
            return PhiSpec.power(_float(sec["m"], "phi.m"))
        if family == "randers_type":
            return PhiSpec.randers_type(*(_float(sec[k], f"phi.{k}") for k in need))
        if family == "taylor":
            return PhiSpec.taylor(_floats(sec["coeffs"], "phi.coeffs"), _float(sec["radius"], "phi.radius"))
        return getattr(PhiSpec, family)()
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError("phi", str(exc)) from None


def _alpha(sec, n):
    kind = sec.get("kind", "euclidean").strip()
    try:
        if kind == "euclidean":
            return MetricField.euclidean(n)
        if kind == "diagonal":
            entries = [e.strip() for e in sec.get("entries", "").split(",") if e.strip()]
            if len(entries) != n:
                raise ValidationError("alpha.entries", f"expected {n} entries")
            return MetricField.diagonal(entries)
        if kind == "conformal":
            if "factor" not in sec:
                raise ValidationError("alpha.factor", "required for kind 'conformal'")
            return MetricField.conformal(sec["factor"], n)
        if kind == "funk_ball":
            return MetricField.funk_ball(n)
    except sp.SympifyError as exc:
        raise ValidationError("alpha", f"cannot parse expression: {exc}") from None
    raise ValidationError("alpha.kind", f"expected one of {', '.join(ALPHA_KINDS)}, got {kind!r}")


def _beta(sec, n):
    kind = sec.get("kind", "").strip()
    if kind == "constant":
        vec = _floats(sec.get("vector", ""), "beta.vector")
        if len(vec) != n:
            raise ValidationError("beta.vector", f"expected {n} components")
        return OneFormField.constant(vec)
    if kind == "linear":
        M = _rows(sec.get("matrix", ""), "beta.matrix")
        if len(M) != n or any(len(r) != n for r in M):
            raise ValidationError("beta.matrix", f"expected an {n}x{n} matrix")
        offset = _floats(sec["offset"], "beta.offset") if "offset" in sec else None
        if offset is not None and len(offset) != n:
            raise ValidationError("beta.offset", f"expected {n} components")
        return OneFormField.linear(M, offset)
    if kind == "funk_ball":
        return OneFormField.funk_ball(n)
    if kind == "expressions":
        entries = [e.strip() for e in sec.get("entries", "").split(",") if e.strip()]
        if len(entries) != n:
            raise ValidationError("beta.entries", f"expected {n} entries")
        try:
            return OneFormField.from_expressions(entries)
        except sp.SympifyError as exc:
            raise ValidationError("beta.entries", f"cannot parse expression: {exc}") from None
    raise ValidationError("beta.kind", f"expected one of {', '.join(BETA_KINDS)}, got {kind!r}")


def _probe(sec):
    p = ProbeConfig()
    if sec is None:
        return p
    if "points" in sec:
        p.points = _rows(sec["points"], "probe.points")
    if "directions" in sec:
        p.directions = _int(sec["directions"], "probe.directions", 2)
    if "grid" in sec:
        p.grid = _int(sec["grid"], "probe.grid", 3)
    if "b2" in sec:
        p.b2 = _float(sec["b2"], "probe.b2")
        if p.b2 < 0:
            raise ValidationError("probe.b2", "must be non-negative")
    if "s" in sec:
        p.s = _float(sec["s"], "probe.s")
    return p


def _tolerances(sec):
    if sec is None:
        return {}
    known = DEFAULT.to_dict()
    out = {}
    for key, val in sec.items():
        if key not in known:
            raise ValidationError(f"tolerances.{key}", f"unknown tolerance; known: {', '.join(known)}")
        v = _float(val, f"tolerances.{key}")
        if not v > 0:
            raise ValidationError(f"tolerances.{key}", "must be positive")
        out[key] = v
    return out


def _validate_points(fx):
    for i, x in enumerate(fx.points):
        if len(x) != fx.n:
            raise ValidationError("probe.points", f"point {i} has {len(x)} coordinates, expected {fx.n}")
        if fx.metric.kind == "funk_ball" or fx.form.kind == "funk_ball":
            if float(np.dot(x, x)) >= 1.0:
                raise ValidationError("probe.points", f"point {i} lies outside the unit ball")
        a = fx.metric.a(x)
        if not np.all(np.isfinite(a)) or np.linalg.eigvalsh(0.5 * (a + a.T)).min() <= 0:
            raise ValidationError("alpha", f"metric is not positive definite at point {i}")
        b = fx.form.b(x)
        bnorm = math.sqrt(float(b @ np.linalg.solve(a, b)))
        if bnorm >= fx.phi.b0:
            raise ValidationError("beta", f"|beta| = {bnorm:.6g} at point {i} is outside the phi domain")


def parse_config(text):
    """Parse config text into a :class:`RunConfig`."""
    parser = _read(text)
    sec = lambda name: parser[name] if parser.has_section(name) else None
    probe = _probe(sec("probe"))
    overrides = _tolerances(sec("tolerances"))
    fixtures = []

    cat = sec("catalog")
    if cat is not None:
        if "include" in cat:
            group = cat["include"].strip()
            if group not in GROUPS:
                raise ValidationError("catalog.include", f"expected one of {', '.join(GROUPS)}, got {group!r}")
            names = list(GROUPS[group])
        else:
            names = [v.strip() for v in cat.get("fixtures", "").split(",") if v.strip()]
        for name in names:
            if name not in BUILTIN_NAMES:
                raise ValidationError("catalog.fixtures", f"unknown built-in fixture {name!r}")
            fixtures.append(dataclasses.replace(builtin(name)))

    fsec = sec("fixture")
    if fsec is not None:
        if "include" in fsec:
            name = fsec["include"].strip()
            if name not in BUILTIN_NAMES:
                raise ValidationError("fixture.include", f"unknown built-in fixture {name!r}")
            base = builtin(name)
            fx = Fixture(fsec.get("name", base.name), base.metric, base.form, base.phi,
                         [list(p) for p in base.points], base.directions, base.radius,
                         base.volume_shift, base.notes)
        else:
            n = _int(fsec.get("n", ""), "fixture.n", 2)
            for required in ("beta", "phi"):
                if not parser.has_section(required):
                    raise ValidationError(required, f"section [{required}] is required")
            metric = _alpha(sec("alpha") or {}, n)
            form = _beta(sec("beta"), n)
            phi = _phi(sec("phi"))
            points = probe.points or [[0.0] * n]
            shift = sec("probe").get("volume_shift") if sec("probe") is not None else None
            if shift is not None:
                try:
                    sp.sympify(shift, locals={str(s): s for s in coordinate_symbols(n)})
                except sp.SympifyError:
                    raise ValidationError("probe.volume_shift", f"cannot parse {shift!r}") from None
            try:
                fx = Fixture(fsec.get("name", "custom"), metric, form, phi, points, volume_shift=shift)
            except ValidationError:
                raise
            except ValueError as exc:
                raise ValidationError("probe.points", str(exc)) from None
        if probe.points is not None:
            fx.points = [np.asarray(p, dtype=float) for p in probe.points]
            if any(p.shape != (fx.n,) for p in fx.points):
                raise ValidationError("probe.points", f"every point needs {fx.n} coordinates")
        if probe.directions is not None:
            fx.directions = probe.directions
        fixtures.append(fx)

    if not fixtures:
        raise ValidationError("fixture", "config defines no fixture and no catalog")
    for fx in fixtures:
        _validate_points(fx)
    return RunConfig(fixtures, probe, DEFAULT.with_overrides(**overrides), overrides)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
