"""Curvature invariants and isotropy classification for (alpha, beta)-metrics.

The oracle layer (:mod:`abmetric.oracle`) imports jax and is loaded on demand.
"""
from importlib.metadata import PackageNotFoundError, version as _version

from .errors import AbmetricError
from .geometry import MetricField, OneFormField, beta_data, christoffel
from .jet import BACKEND, Jet, jet_var
from .scalars import PhiSpec, bh_factor, scalar_pack, xi_profile
from .curvature import ClosedEvaluator, sigma_bh
from .fixtures import Fixture, builtin, catalog

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

__all__ = [
    "AbmetricError",
    "BACKEND",
    "ClosedEvaluator",
    "Fixture",
    "Jet",
    "MetricField",
    "OneFormField",
    "PhiSpec",
    "beta_data",
    "bh_factor",
    "builtin",
    "catalog",
    "christoffel",
    "jet_var",
    "scalar_pack",
    "sigma_bh",
    "xi_profile",
]
