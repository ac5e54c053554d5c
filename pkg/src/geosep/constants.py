"""Dimension-dependent constants used by the separator pipelines.

The sphere pipeline budget is Sigma = C_d * (sum_S deg(S)^(1/(d-1)))^(1-1/d)
and the per-stage accounting needs three constants tied together by a small
set of inequalities. We take the weakest values that satisfy all of them
with the center-anchored 2-approximate inner ball (which doubles the
covering radius, hence 8^d where an exact minimal ball would give 4^d):

    c_d   = 8^-(d+1)                       balance slack
    Cp_d  = max(1, (2^(d+1) sigma_d / tau_(d-1))^(1/(d-1)))
    C_d   = max(5, 4^(1-1/d) c_d^(-1/d), (8 Cp_d)^((d-1)/d))

All inequalities are assert-checked at construction; a violation raises
InternalConsistencyError because it would invalidate the per-stage budget
assertions downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InternalConsistencyError, ValidationError
from .geometry import MAX_DIMENSION, MIN_DIMENSION

# Multiplier for the sampled-anchor count ceil(SAMPLE_MULT * 9^d). Chosen so
# a full run at the d=2 round cap keeps overall success above 1/2 even with
# a retry budget of 1: (1 - e^-4)^33 > 0.5.
SAMPLE_MULT = 4.0


def unit_ball_volume(k: int) -> float:
    """tau_k, the k-volume of the unit ball in R^k."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def unit_sphere_area(k: int) -> float:
    """sigma_k, the (k-1)-volume of the unit sphere in R^k."""
    if k < 1:
        raise ValidationError("k must be positive")
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def round_cap(c: float) -> int:
    """Max balancing rounds ceil(log_c(2/3)) for a c-balanced round function."""
    if not 0.0 < c < 1.0:
        raise ValidationError(f"balance constant must lie in (0, 1), got {c}")
    return math.ceil(math.log(2.0 / 3.0) / math.log(c) - 1e-12)


@dataclass(frozen=True)
class Constants:
    """Derived constants for dimension d, validated on construction."""

    d: int
    c_d: float = field(init=False)
    C_d: float = field(init=False)
    Cp_d: float = field(init=False)
    sample_count: int = field(init=False)
    covering_min_n: int = field(init=False)

    def __post_init__(self):
        d = self.d
        if not (MIN_DIMENSION <= d <= MAX_DIMENSION):
            raise ValidationError(
                f"dimension {d} outside supported range [{MIN_DIMENSION}, {MAX_DIMENSION}]"
            )
        c = 8.0 ** -(d + 1)
        cp = max(1.0, (2.0 ** (d + 1) * unit_sphere_area(d) / unit_ball_volume(d - 1)) ** (1.0 / (d - 1)))
        big = max(5.0, 4.0 ** (1.0 - 1.0 / d) * c ** (-1.0 / d), (8.0 * cp) ** ((d - 1.0) / d))
        object.__setattr__(self, "c_d", c)
        object.__setattr__(self, "Cp_d", cp)
        object.__setattr__(self, "C_d", big)
        object.__setattr__(self, "sample_count", math.ceil(SAMPLE_MULT * 9.0**d))
        # smallest n with 8^d (4 c_d + 1/n) <= 1 - 4 c_d, the covering
        # constraint under the 2-approximate anchor
        denom = 1.0 - 4.0 * c * (1.0 + 8.0**d)
        if denom <= 0.0:
            raise InternalConsistencyError("covering constraint unsatisfiable for any n")
        object.__setattr__(self, "covering_min_n", math.ceil(8.0**d / denom))
        self._check()

    def _check(self) -> None:
        d, c, cp, big = self.d, self.c_d, self.Cp_d, self.C_d
        slack = 1e-12
        checks = [
            cp >= (2.0 ** (d + 1) * unit_sphere_area(d) / unit_ball_volume(d - 1)) ** (1.0 / (d - 1)) - slack,
            big >= 5.0 - slack,
            big >= 4.0 ** (1.0 - 1.0 / d) * c ** (-1.0 / d) - slack,
            big >= (8.0 * cp) ** ((d - 1.0) / d) - slack,
            8.0**d * (4.0 * c + 1.0 / self.covering_min_n) <= 1.0 - 4.0 * c + slack,
        ]
        if not all(checks):
            raise InternalConsistencyError(f"constant inequalities violated for d={d}: {checks}")

    def tau(self, k: int) -> float:
        return unit_ball_volume(k)

    def sigma(self, k: int) -> float:
        return unit_sphere_area(k)

    def sigma_budget(self, degrees) -> float:
        """The separator budget C_d * (sum deg^(1/(d-1)))^(1-1/d)."""
        import numpy as np

        deg = np.asarray(degrees, dtype=np.float64)
        s = float(np.sum(deg ** (1.0 / (self.d - 1))))
        return self.C_d * s ** (1.0 - 1.0 / self.d)


def constants_for(d: int) -> Constants:
    return Constants(d)
