"""Numeric tolerances and thread-cap configuration.

All "equals zero" decisions in the package go through a Tolerances
instance so that every pipeline stage agrees on what counts as zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

#: Default tolerance for generic float comparisons (residuals of exact
#: identities; float accumulation over <= 1e4-term sums).
EPS_NUM = 1e-9

#: Membership threshold for the Aubry set and the zero-cost edge set.
#: Self-barrier values are differences of near-cancelling sums, so this
#: is looser than EPS_NUM and configurable separately.
EPS_AUBRY = 1e-7

#: Tolerance on linear-programming optimal values (duality gaps etc.).
EPS_DUAL = 1e-7

#: Mass threshold below which a coupling entry counts as solver dust.
EPS_MASS = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Bundle of the four numeric tolerances used throughout."""

    eps_num: float = EPS_NUM
    eps_aubry: float = EPS_AUBRY
    eps_dual: float = EPS_DUAL
    eps_mass: float = EPS_MASS

    def __post_init__(self):
        for name in ("eps_num", "eps_aubry", "eps_dual", "eps_mass"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


DEFAULT_TOLERANCES = Tolerances()


def max_threads() -> int:
    """Thread cap for row-parallel kernel operations.

    Controlled by the TROPIKAM_THREADS environment variable; defaults to
    the machine CPU count.  Always at least 1.
    """
    raw = os.environ.get("TROPIKAM_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)
