"""Central tolerance configuration.

All float comparisons in the verification battery draw from one profile so
reports are reproducible and thresholds live in a single place.  ``exact``
means zero tolerance (rational arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TolProfile:
    name: str
    algebraic: float = 1e-10      # pointwise exterior/structure algebra
    geometric: float = 1e-9       # differential-geometric pipelines
    ode: float = 1e-6             # closed-form tracking of integrated flows
    tight: float = 1e-11          # double-route and module-membership residuals
    spectral: float = 0.0         # exact rational certificates


PROFILES = {
    "default": TolProfile("default"),
    "strict": TolProfile("strict", algebraic=1e-12, geometric=1e-11, ode=1e-8, tight=1e-13),
    "loose": TolProfile("loose", algebraic=1e-8, geometric=1e-7, ode=1e-4, tight=1e-9),
}


def profile(name: str = "default") -> TolProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}") from None
