"""
Closed-form identities of the iterated k-Lucas transform, their brute-force
counterparts, and a grid verifier that checks any of them over ranges of
(k, r, n) and produces a VerificationReport.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from errors import DegenerateDenominatorError, InternalInconsistencyError
from quadfield import binet_partial_sum, binet_term, fibonacci_binet_term
from recurrences import SequenceSpec, k_fibonacci_spec, k_lucas_spec, term_at, terms
from series import fibonacci_gf_expand, gf_expand, rational_function
from transform import (
    TransformParams,
    b2_closed_form,
    iterate_transform,
    iterated_fibonacci_spec,
    iterated_lucas_spec,
    lemma_step,
    transform_levels,
)

logger = logging.getLogger(__name__)


class IdentityId(str, Enum):
    ORACLE_LUCAS = "oracle-lucas"
    ORACLE_FIBONACCI = "oracle-fibonacci"
    LEMMA = "lemma"
    BINET = "binet"
    GF = "gf"
    SUM = "sum"
    RELATION = "relation"
    B2_CLOSED_FORM = "b2-closed-form"
    SPECIALIZE_R1 = "specialize-r1"
    SUM_BINET = "sum-binet"
    BINET_FIBONACCI = "binet-fibonacci"
    GF_FIBONACCI = "gf-fibonacci"


class Grid(BaseModel):
    """Inclusive bounds of a verification grid."""
    model_config = ConfigDict(frozen=True)

    k_min: int = Field(description="Smallest k")
    k_max: int = Field(description="Largest k")
    r_min: int = Field(description="Smallest r")
    r_max: int = Field(description="Largest r")
    n_max: int = Field(description="Largest n")

    @field_serializer("k_min", "k_max", "r_min", "r_max", "n_max", when_used="json")
    def _decimal(self, value: int) -> str:
        return str(value)


class Counterexample(BaseModel):
    """A grid point where the two sides of an identity disagree."""
    model_config = ConfigDict(frozen=True)

    k: int = Field(description="k at the failing point")
    r: int = Field(description="r at the failing point")
    n: int = Field(description="n at the failing point")
    expected: str = Field(description="Reference side, as a decimal (or p/q) string")
    actual: str = Field(description="Checked side, as a decimal (or p/q) string")

    @field_serializer("k", "r", "n", when_used="json")
    def _decimal(self, value: int) -> str:
        return str(value)


class VerificationReport(BaseModel):
    """Outcome of running one identity over a grid."""
    model_config = ConfigDict(frozen=True)

    identity: IdentityId = Field(description="Identity that was checked")
    grid: Grid = Field(description="Grid bounds")
    passed: int = Field(ge=0, description="Points where the identity held")
    failed: int = Field(ge=0, description="Points where it did not")
    skipped: int = Field(ge=0, description="Points whose precondition did not hold")
    first_counterexample: Optional[Counterexample] = Field(
        default=None, description="First failure in (k, r, n) grid order"
    )

    @model_validator(mode="after")
    def _counterexample_iff_failed(self) -> "VerificationReport":
        if (self.failed == 0) != (self.first_counterexample is None):
            raise ValueError("first_counterexample must be present exactly when failed > 0")
        return self

    @field_serializer("passed", "failed", "skipped", when_used="json")
    def _decimal(self, value: int) -> str:
        return str(value)


class Skip(Exception):
    """A grid cell or point whose precondition does not hold."""


# One outcome per grid point: (n, expected, actual)
Outcome = Tuple[int, object, object]
Checker = Callable[[TransformParams, int], Iterator[Outcome]]


def sum_direct(params: TransformParams, n: int) -> int:
    """Literal sum of terms 0..n-1 of the r-fold k-Lucas transform."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return sum(terms(iterated_lucas_spec(params), n))


def sum_denominator(params: TransformParams) -> int:
    """r^2 + kr - k - 2r, i.e. (lambda1 - 1)(lambda2 - 1)."""
    k, r = params.k, params.r
    return r * r + k * r - k - 2 * r


def sum_closed_form(params: TransformParams, n: int) -> int:
    """
    Sum of terms 0..n-1 of the r-fold k-Lucas transform:

        ((r^2+kr-1) y_{n-1} - y_n - k - 2r + 2) / (r^2+kr-k-2r)

    Raises:
        DegenerateDenominatorError: when r^2+kr-k-2r is zero
        InternalInconsistencyError: when the division leaves a remainder
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    denominator = sum_denominator(params)
    if denominator == 0:
        raise DegenerateDenominatorError(f"r^2+kr-k-2r vanishes for k={params.k}, r={params.r}")
    spec = iterated_lucas_spec(params)
    numerator = params.det * term_at(spec, n - 1) - term_at(spec, n) - params.k - 2 * params.r + 2
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise InternalInconsistencyError(
            f"partial sum numerator {numerator} not divisible by {denominator} at k={params.k}, r={params.r}, n={n}"
        )
    return quotient


def lucas_from_fibonacci(params: TransformParams, n: int) -> int:
    """Lucas-transform term n as c_{n+1} - (r^2+kr-1) c_{n-1} over the Fibonacci transform."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    c = terms(iterated_fibonacci_spec(params), n + 2)
    return c[n + 1] - params.det * c[n - 1]


# Checkers. Each takes one (k, r) cell and yields an outcome per n.

def _check_oracle_lucas(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    brute = iterate_transform(terms(k_lucas_spec(params.k), n_max + 1), params.r)
    closed = terms(iterated_lucas_spec(params), n_max + 1)
    for n in range(n_max + 1):
        yield n, brute[n], closed[n]


def _check_oracle_fibonacci(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    brute = iterate_transform(terms(k_fibonacci_spec(params.k), n_max + 1), params.r)
    closed = terms(iterated_fibonacci_spec(params), n_max + 1)
    for n in range(n_max + 1):
        yield n, brute[n], closed[n]


def _check_lemma(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    if params.r < 1:
        raise Skip("the lemma needs r >= 1")
    levels = transform_levels(terms(k_lucas_spec(params.k), n_max + 2), params.r)
    upper, lower = levels[params.r], levels[params.r - 1]
    for n in range(n_max + 1):
        yield n, upper[n + 1], lemma_step(upper, lower, n)


def _check_binet(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    closed = terms(iterated_lucas_spec(params), n_max + 1)
    for n in range(n_max + 1):
        yield n, closed[n], _binet_or_report(binet_term, params, n)


def _check_binet_fibonacci(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    closed = terms(iterated_fibonacci_spec(params), n_max + 1)
    for n in range(n_max + 1):
        yield n, closed[n], _binet_or_report(fibonacci_binet_term, params, n)


def _binet_or_report(fn, params: TransformParams, n: int):
    try:
        return fn(params, n)
    except InternalInconsistencyError as e:
        return f"non-integral: {e}"


def _check_gf(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    closed = terms(iterated_lucas_spec(params), n_max + 1)
    for n, coeff in enumerate(gf_expand(params, n_max + 1)):
        yield n, closed[n], _integral_or_fraction(coeff)


def _check_gf_fibonacci(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    closed = terms(iterated_fibonacci_spec(params), n_max + 1)
    for n, coeff in enumerate(fibonacci_gf_expand(params, n_max + 1)):
        yield n, closed[n], _integral_or_fraction(coeff)


def _integral_or_fraction(coeff):
    # a non-integral coefficient never equals an int, so it surfaces as a failure
    return coeff.numerator if coeff.denominator == 1 else coeff


def _check_sum(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    if sum_denominator(params) == 0:
        raise Skip("degenerate partial-sum denominator")
    prefix = terms(iterated_lucas_spec(params), n_max + 1)
    running = 0
    for n in range(1, n_max + 1):
        running += prefix[n - 1]
        yield n, running, sum_closed_form(params, n)


def _check_sum_binet(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    prefix = terms(iterated_lucas_spec(params), n_max + 1)
    running = 0
    for n in range(1, n_max + 1):
        running += prefix[n - 1]
        yield n, running, _binet_or_report(binet_partial_sum, params, n)


def _check_relation(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    spec = iterated_lucas_spec(params)
    for n in range(1, n_max + 1):
        yield n, term_at(spec, n), lucas_from_fibonacci(params, n)


def _check_b2_closed_form(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    brute = iterate_transform(terms(k_lucas_spec(params.k), 3), params.r)
    spot = [2, params.trace, b2_closed_form(params)]
    for n in range(min(2, n_max) + 1):
        yield n, brute[n], spot[n]


def r1_lucas_spec(k: int) -> SequenceSpec:
    """The single binomial transform of k-Lucas: y_{n+1} = (2+k) y_n - k y_{n-1}, y_0 = 2, y_1 = k+2."""
    return SequenceSpec(p=2 + k, q=-k, x0=2, x1=k + 2)


def _check_specialize_r1(params: TransformParams, n_max: int) -> Iterator[Outcome]:
    """The r=1 forms: recurrence (2+k, -k), sum, relation, generating function and root."""
    if params.r != 1:
        raise Skip("r=1 specialization only")
    k = params.k
    b = terms(r1_lucas_spec(k), n_max + 2)
    c = terms(iterated_fibonacci_spec(params), n_max + 2)
    brute = iterate_transform(terms(k_lucas_spec(k), n_max + 2), 1)
    gf = rational_function([2, -(2 + k)], [1, -(2 + k), k], n_max + 1)
    running = 0
    for n in range(n_max + 1):
        if n >= 1:
            running += b[n - 1]
        checks = [(brute[n], b[n]), (b[n], _integral_or_fraction(gf[n]))]
        if n >= 1:
            checks.append((running, b[n] - k * b[n - 1] + k))
            checks.append((b[n], c[n + 1] - k * c[n - 1]))
        expected, actual = next(((e, a) for e, a in checks if e != a), checks[0])
        yield n, expected, actual


CHECKERS: Dict[IdentityId, Checker] = {
    IdentityId.ORACLE_LUCAS: _check_oracle_lucas,
    IdentityId.ORACLE_FIBONACCI: _check_oracle_fibonacci,
    IdentityId.LEMMA: _check_lemma,
    IdentityId.BINET: _check_binet,
    IdentityId.GF: _check_gf,
    IdentityId.SUM: _check_sum,
    IdentityId.RELATION: _check_relation,
    IdentityId.B2_CLOSED_FORM: _check_b2_closed_form,
    IdentityId.SPECIALIZE_R1: _check_specialize_r1,
    IdentityId.SUM_BINET: _check_sum_binet,
    IdentityId.BINET_FIBONACCI: _check_binet_fibonacci,
    IdentityId.GF_FIBONACCI: _check_gf_fibonacci,
}

# First point of each identity's n range
_N_START = {IdentityId.SUM: 1, IdentityId.RELATION: 1, IdentityId.SUM_BINET: 1}


def parse_identity(name: Union[str, IdentityId]) -> IdentityId:
    try:
        return IdentityId(name)
    except ValueError:
        known = ", ".join(i.value for i in IdentityId)
        raise ValueError(f"Unknown identity '{name}'. Available: {known}") from None


class _CellResult(BaseModel):
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_counterexample: Optional[Counterexample] = None


def _run_cell(identity: IdentityId, params: TransformParams, n_max: int) -> _CellResult:
    checker = CHECKERS[identity]
    cell = _CellResult()
    start = _N_START.get(identity, 0)
    if identity == IdentityId.B2_CLOSED_FORM:
        points = min(2, n_max) + 1
    else:
        points = max(0, n_max - start + 1)
    try:
        outcomes = list(checker(params, n_max))
    except Skip as e:
        logger.debug(f"{identity.value}: skipping k={params.k}, r={params.r}: {e}")
        cell.skipped = points
        return cell
    for n, expected, actual in outcomes:
        if expected == actual:
            cell.passed += 1
            continue
        cell.failed += 1
        if cell.first_counterexample is None:
            cell.first_counterexample = Counterexample(
                k=params.k, r=params.r, n=n, expected=str(expected), actual=str(actual)
            )
    return cell


def verify_grid(
    identity: Union[str, IdentityId],
    k_range: range,
    r_range: range,
    n_max: int,
    workers: int = 1,
) -> VerificationReport:
    """
    Check one identity at every (k, r, n) point of a grid.

    k = 0 is dropped from the grid. Cells are evaluated in (k, r) order, so
    the first counterexample is the same for any number of workers.

    Args:
        identity: Identity id or its name
        k_range: Values of k
        r_range: Values of r, all nonnegative
        n_max: Largest index checked
        workers: Threads used to evaluate (k, r) cells

    Returns:
        VerificationReport: Pass/fail/skip counts and the first counterexample
    """
    identity = parse_identity(identity)
    if len(k_range) == 0 or len(r_range) == 0:
        raise ValueError("k and r ranges must be non-empty")
    if r_range[0] < 0 or r_range[-1] < 0:
        raise ValueError("r must be nonnegative")
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")

    cells = [TransformParams(k=k, r=r) for k in k_range if k != 0 for r in r_range]
    if not cells:
        raise ValueError(f"k range {min(k_range)}..{max(k_range)} has no nonzero k")
    logger.info(f"Verifying {identity.value} over {len(cells)} cells, n_max={n_max}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _run_cell(identity, p, n_max), cells))
    else:
        results = [_run_cell(identity, p, n_max) for p in cells]

    passed = sum(c.passed for c in results)
    failed = sum(c.failed for c in results)
    skipped = sum(c.skipped for c in results)
    first = next((c.first_counterexample for c in results if c.first_counterexample), None)
    if first is not None:
        logger.warning(
            f"{identity.value} fails at k={first.k}, r={first.r}, n={first.n}: "
            f"expected {first.expected}, got {first.actual}"
        )

    return VerificationReport(
        identity=identity,
        grid=Grid(
            k_min=min(k_range), k_max=max(k_range),
            r_min=min(r_range), r_max=max(r_range),
            n_max=n_max,
        ),
        passed=passed,
        failed=failed,
        skipped=skipped,
        first_counterexample=first,
    )


def report_lines(report: VerificationReport) -> List[str]:
    """Line-oriented text form of a report."""
    g = report.grid
    lines = [
        f"identity: {report.identity.value}",
        f"grid: k={g.k_min}..{g.k_max} r={g.r_min}..{g.r_max} n<={g.n_max}",
        f"passed: {report.passed}",
        f"failed: {report.failed}",
        f"skipped: {report.skipped}",
    ]
    ce = report.first_counterexample
    if ce is not None:
        lines.append(f"counterexample: k={ce.k} r={ce.r} n={ce.n} expected={ce.expected} actual={ce.actual}")
    lines.append("status: " + ("VERIFIED" if report.failed == 0 else "FALSIFIED"))
    return lines
