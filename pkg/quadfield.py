"""
Exact arithmetic in the quadratic field Q(sqrt(D)).

Elements are a + b*sqrt(D) with rational a, b and a positive non-square
radicand D, so the (a, b) pair is unique and equality is field-wise. Used to
evaluate Binet-type closed forms with no floating point anywhere.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Tuple, Union

from errors import InternalInconsistencyError
from transform import TransformParams

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def _check_radicand(d: int) -> int:
    if d <= 0:
        raise ValueError(f"radicand must be positive, got {d}")
    root = isqrt(d)
    if root * root == d:
        raise ValueError(f"radicand must not be a perfect square, got {d} = {root}^2")
    return d


@dataclass(frozen=True)
class QuadElement:
    """a + b*sqrt(d)."""
    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        _check_radicand(self.d)
        # Fraction normalizes on construction; coerce ints so equality stays structural
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def rational(cls, value: Scalar, d: int) -> "QuadElement":
        return cls(Fraction(value), Fraction(0), d)

    def _coerce(self, other) -> "QuadElement":
        if isinstance(other, QuadElement):
            if other.d != self.d:
                raise ValueError(f"mismatched radicands: {self.d} and {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement.rational(other, self.d)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElement(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElement(self.a - other.a, self.b - other.b, self.d)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return QuadElement(-self.a, -self.b, self.d)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return quad_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return quad_mul(self, other.inverse())

    def __pow__(self, n: int):
        return quad_pow(self, n)

    def conj(self) -> "QuadElement":
        return QuadElement(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """x * conj(x) = a^2 - d*b^2."""
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        """x + conj(x) = 2a."""
        return 2 * self.a

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            # only zero has norm zero when d is not a square
            raise ZeroDivisionError("inverse of zero in Q(sqrt(d))")
        return QuadElement(self.a / n, -self.b / n, self.d)

    def is_rational(self) -> bool:
        return self.b == 0

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.d})"


def quad_mul(x: QuadElement, y: QuadElement) -> QuadElement:
    """(a + b*sqrt(d))(c + e*sqrt(d)) = (ac + be*d) + (ae + bc)*sqrt(d)."""
    if x.d != y.d:
        raise ValueError(f"mismatched radicands: {x.d} and {y.d}")
    return QuadElement(x.a * y.a + x.b * y.b * x.d, x.a * y.b + x.b * y.a, x.d)


def quad_pow(x: QuadElement, n: int) -> QuadElement:
    """Exact n-th power by binary powering; x^0 is 1."""
    if n < 0:
        raise ValueError(f"exponent must be nonnegative, got {n}")
    result = QuadElement.rational(1, x.d)
    base = x
    while n:
        if n & 1:
            result = quad_mul(result, base)
        base = quad_mul(base, base)
        n >>= 1
    return result


def base_roots(k: int) -> Tuple[QuadElement, QuadElement]:
    """alpha, beta = (k +- sqrt(k^2 + 4)) / 2, the k-Fibonacci / k-Lucas roots."""
    params = TransformParams(k=k, r=0)
    half = Fraction(1, 2)
    return (
        QuadElement(Fraction(k, 2), half, params.disc),
        QuadElement(Fraction(k, 2), -half, params.disc),
    )


def char_roots(params: TransformParams) -> Tuple[QuadElement, QuadElement]:
    """
    Roots of lambda^2 - (2r+k)*lambda + (r^2+kr-1) = 0 over D = k^2 + 4.

    Returns:
        tuple: (lambda1, lambda2) = ((2r+k) +- sqrt(k^2+4)) / 2
    """
    half = Fraction(1, 2)
    centre = Fraction(params.trace, 2)
    lam1 = QuadElement(centre, half, params.disc)
    lam2 = QuadElement(centre, -half, params.disc)
    if (lam2 != lam1.conj() or lam1.trace() != params.trace
            or quad_mul(lam1, lam2) != QuadElement.rational(params.det, params.disc)):
        logger.error(f"Characteristic roots for k={params.k}, r={params.r} failed the trace/det check")
        raise InternalInconsistencyError(f"roots for {params} do not reproduce trace and det")
    return lam1, lam2


def _as_integer(value: QuadElement, what: str) -> int:
    if not value.is_rational() or value.a.denominator != 1:
        logger.error(f"Non-integral result for {what}: {value}")
        raise InternalInconsistencyError(f"{what} is not an integer: {value}")
    return value.a.numerator


def binet_term(params: TransformParams, n: int) -> int:
    """
    Term n of the r-fold k-Lucas transform as lambda1^n + lambda2^n.

    Both roots are alpha + r and beta + r, so this is
    (alpha + r)^n + (beta + r)^n evaluated exactly.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    lam1, lam2 = char_roots(params)
    return _as_integer(quad_pow(lam1, n) + quad_pow(lam2, n), f"binet term n={n} for {params}")


def fibonacci_binet_term(params: TransformParams, n: int) -> int:
    """Term n of the r-fold k-Fibonacci transform as (lambda1^n - lambda2^n) / (lambda1 - lambda2)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    lam1, lam2 = char_roots(params)
    value = (quad_pow(lam1, n) - quad_pow(lam2, n)) / (lam1 - lam2)
    return _as_integer(value, f"fibonacci binet term n={n} for {params}")


def binet_partial_sum(params: TransformParams, n: int) -> int:
    """Sum of Lucas-transform terms 0..n-1 as the two geometric sums (lambda^n - 1) / (lambda - 1)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    total = QuadElement.rational(0, params.disc)
    for lam in char_roots(params):
        # lambda is irrational, so lambda - 1 is never zero
        total = total + (quad_pow(lam, n) - 1) / (lam - 1)
    return _as_integer(total, f"binet partial sum n={n} for {params}")
