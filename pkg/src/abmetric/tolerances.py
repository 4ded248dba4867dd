"""Central tolerance record."""
from dataclasses import dataclass, replace, asdict


@dataclass(frozen=True)
class Tolerances:
    s_fit: float = 1e-6
    e_fit: float = 1e-4
    closed: float = 1e-8
    c_match: float = 1e-3
    spray_rel: float = 1e-7
    s_rel: float = 1e-5
    e_rel: float = 1e-4
    divergence_abs: float = 1e-6
    homogeneity_rel: float = 1e-8
    euler_rel: float = 1e-6
    beta_zero: float = 1e-10
    beta_fit: float = 1e-8
    decomposition_rel: float = 1e-8

    def with_overrides(self, **kw):
        unknown = set(kw) - set(asdict(self))
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **kw)

    def to_dict(self):
        return asdict(self)


PROFILES = {
    # S fits on closed-form values only
    "strict": Tolerances(s_fit=1e-8),
    # S fits that pass through a finite-difference oracle
    "fd": Tolerances(),
}
DEFAULT = PROFILES["fd"]


def profile(name):
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}") from None
