"""
Binomial transform and its r-fold iteration.

The brute-force route applies b_n = sum_{i<=n} C(n, i) x_i to a finite prefix
r times. The closed-form route builds the order-2 recurrence the r-fold
transform of a k-Lucas or k-Fibonacci sequence obeys:

    y_{n+1} = (2r + k) y_n - (r^2 + kr - 1) y_{n-1}
"""

import logging
from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator

from recurrences import SequenceSpec

logger = logging.getLogger(__name__)


class TransformParams(BaseModel):
    """The pair (k, r) and the recurrence coefficients derived from it."""
    model_config = ConfigDict(frozen=True)

    k: int = Field(description="Sequence parameter, nonzero")
    r: int = Field(ge=0, description="Number of binomial transforms applied")

    @field_validator("k")
    @classmethod
    def _k_nonzero(cls, value: int) -> int:
        if value == 0:
            raise ValueError("k must be nonzero")
        return value

    @property
    def trace(self) -> int:
        return 2 * self.r + self.k

    @property
    def det(self) -> int:
        return self.r * self.r + self.k * self.r - 1

    @property
    def disc(self) -> int:
        """trace^2 - 4*det, which is k^2 + 4 for every r."""
        return self.k * self.k + 4


def binomial_row(n: int) -> List[int]:
    """C(n, 0) ... C(n, n) via C(n, j+1) = C(n, j) * (n - j) / (j + 1)."""
    row = [1]
    for j in range(n):
        row.append(row[-1] * (n - j) // (j + 1))
    return row


def binomial_transform(prefix: Sequence[int]) -> List[int]:
    """
    Binomial transform of a finite prefix.

    Output term n only reads input terms 0..n, so a length-m prefix maps to a
    length-m prefix.

    Args:
        prefix: x_0 ... x_{m-1}

    Returns:
        list[int]: b_0 ... b_{m-1} with b_n = sum_{i=0}^{n} C(n, i) x_i
    """
    out: List[int] = []
    for n in range(len(prefix)):
        row = binomial_row(n)
        out.append(sum(c * x for c, x in zip(row, prefix)))
    return out


def iterate_transform(prefix: Sequence[int], r: int) -> List[int]:
    """Apply the binomial transform r times; r=0 returns a copy of the input."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    logger.debug(f"Applying binomial transform {r} times to {len(prefix)} terms")
    out = list(prefix)
    for _ in range(r):
        out = binomial_transform(out)
    return out


def transform_levels(prefix: Sequence[int], r: int) -> List[List[int]]:
    """Levels 0..r of the iterated transform; level 0 is the input itself."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    levels = [list(prefix)]
    for _ in range(r):
        levels.append(binomial_transform(levels[-1]))
    return levels


def iterated_lucas_spec(params: TransformParams) -> SequenceSpec:
    """Recurrence of the r-fold transform of k-Lucas: y_0 = 2, y_1 = 2r + k."""
    return SequenceSpec(p=params.trace, q=-params.det, x0=2, x1=params.trace)


def iterated_fibonacci_spec(params: TransformParams) -> SequenceSpec:
    """Recurrence of the r-fold transform of k-Fibonacci: y_0 = 0, y_1 = 1."""
    return SequenceSpec(p=params.trace, q=-params.det, x0=0, x1=1)


def b2_closed_form(params: TransformParams) -> int:
    """Term 2 of the r-fold k-Lucas transform: k^2 + 2rk + 2r^2 + 2."""
    k, r = params.k, params.r
    return k * k + 2 * r * k + 2 * r * r + 2


def lemma_step(level_r_prefix: Sequence[int], level_r_minus_1_prefix: Sequence[int], n: int) -> int:
    """
    Term n+1 of level r from term n of level r and level r-1:

        y^(r)_{n+1} = y^(r)_n + sum_{j=0}^{n} C(n, j) y^(r-1)_{j+1}

    Args:
        level_r_prefix: Level r terms, at least n+1 of them
        level_r_minus_1_prefix: Level r-1 terms, at least n+2 of them
        n: Index to step from

    Returns:
        int: The level r term at index n+1
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if len(level_r_prefix) < n + 1:
        raise ValueError(f"level r prefix needs {n + 1} terms, got {len(level_r_prefix)}")
    if len(level_r_minus_1_prefix) < n + 2:
        raise ValueError(f"level r-1 prefix needs {n + 2} terms, got {len(level_r_minus_1_prefix)}")
    row = binomial_row(n)
    return level_r_prefix[n] + sum(c * level_r_minus_1_prefix[j + 1] for j, c in enumerate(row))
