"""
Truncated formal power series with exact rational coefficients, and the
rational generating functions of the iterated k-Lucas / k-Fibonacci transforms.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from errors import InternalInconsistencyError
from recurrences import SequenceSpec
from transform import TransformParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerSeries:
    """sum_{i < order} coeffs[i] * x^i; nothing past the truncation order is ever read."""
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a power series needs order >= 1")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_polynomial(cls, values: Iterable[Union[int, Fraction]], order: int) -> "PowerSeries":
        """Pad with zeros or truncate `values` to exactly `order` coefficients."""
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        padded = list(values)[:order]
        padded.extend([0] * (order - len(padded)))
        return cls(tuple(Fraction(v) for v in padded))

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls.from_polynomial([1], order)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        return series_mul(self, other)


def series_mul(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Truncated Cauchy product; both operands must share the same order."""
    if f.order != g.order:
        raise ValueError(f"mismatched orders: {f.order} and {g.order}")
    n = f.order
    out = [sum((f[i] * g[j - i] for i in range(j + 1)), Fraction(0)) for j in range(n)]
    return PowerSeries(tuple(out))


def series_inverse(f: PowerSeries) -> PowerSeries:
    """
    Reciprocal by forward substitution: h_0 = 1/f_0 and
    h_j = -(sum_{i=1}^{j} f_i h_{j-i}) / f_0.
    """
    if f[0] == 0:
        raise ValueError("series with zero constant term has no reciprocal")
    inv0 = 1 / f[0]
    h: List[Fraction] = [inv0]
    for j in range(1, f.order):
        acc = sum((f[i] * h[j - i] for i in range(1, j + 1)), Fraction(0))
        h.append(-acc * inv0)
    return PowerSeries(tuple(h))


def rational_function(numerator: Sequence[int], denominator: Sequence[int], count: int) -> List[Fraction]:
    """First `count` Maclaurin coefficients of numerator(x) / denominator(x)."""
    num = PowerSeries.from_polynomial(numerator, count)
    den = PowerSeries.from_polynomial(denominator, count)
    return list(series_mul(num, series_inverse(den)).coeffs)


def gf_expand(params: TransformParams, count: int) -> List[Fraction]:
    """
    Coefficients of (2 - (2r+k)x) / (1 - (2r+k)x + (r^2+kr-1)x^2), the
    generating function of the r-fold k-Lucas transform.

    Coefficients are returned as Fractions; callers assert integrality at the
    boundary with integral_coefficients.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return rational_function([2, -params.trace], [1, -params.trace, params.det], count)


def fibonacci_gf_expand(params: TransformParams, count: int) -> List[Fraction]:
    """Coefficients of x / (1 - (2r+k)x + (r^2+kr-1)x^2), the r-fold k-Fibonacci transform."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return rational_function([0, 1], [1, -params.trace, params.det], count)


def spec_gf(spec: SequenceSpec, count: int) -> List[Fraction]:
    """Generating function of any order-2 recurrence: (x0 + (x1 - p*x0)x) / (1 - p*x - q*x^2)."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return rational_function([spec.x0, spec.x1 - spec.p * spec.x0], [1, -spec.p, -spec.q], count)


def integral_coefficients(coeffs: Sequence[Fraction]) -> List[int]:
    """Convert coefficients to int, raising if any has a denominator other than 1."""
    out = []
    for i, c in enumerate(coeffs):
        if c.denominator != 1:
            logger.error(f"Non-integral series coefficient at index {i}: {c}")
            raise InternalInconsistencyError(f"coefficient {i} is not integral: {c}")
        out.append(c.numerator)
    return out
