"""Tagged extended-real values.

Costs live in [0, +inf] and slopes in [-inf, +inf).  Both are represented as
explicit tagged values rather than sentinel floats so that "infinite" can
never be confused with "very large" downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Cost:
    """A value in [0, +inf]; construct via ``Cost.finite(x)`` or ``Cost.INF``."""

    is_finite: bool
    _value: float = 0.0

    INF: "Cost" = None  # type: ignore[assignment]  # set below

    @staticmethod
    def finite(x: float) -> "Cost":
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"finite cost required, got {x}")
        if x < 0.0:
            raise ValueError(f"costs are nonnegative, got {x}")
        return Cost(True, x)

    @property
    def value(self) -> float:
        if not self.is_finite:
            raise ValueError("infinite cost has no finite value")
        return self._value

    def __float__(self) -> float:
        return self._value if self.is_finite else math.inf

    def __repr__(self) -> str:
        return f"Cost({self._value!r})" if self.is_finite else "Cost.INF"


Cost.INF = Cost(False, math.inf)


@dataclass(frozen=True)
class Slope:
    """A directional-derivative value in [-inf, +inf)."""

    is_finite: bool
    _value: float = 0.0

    NEG_INF: "Slope" = None  # type: ignore[assignment]  # set below

    @staticmethod
    def finite(x: float) -> "Slope":
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"finite slope required, got {x}")
        return Slope(True, x)

    @property
    def value(self) -> float:
        if not self.is_finite:
            raise ValueError("divergent slope has no finite value")
        return self._value

    def __float__(self) -> float:
        return self._value if self.is_finite else -math.inf

    def __repr__(self) -> str:
        return f"Slope({self._value!r})" if self.is_finite else "Slope.NEG_INF"


Slope.NEG_INF = Slope(False, -math.inf)
