"""
Second-order linear recurrence sequences with exact integer terms.

A sequence is x_{n+1} = p*x_n + q*x_{n-1} with initial terms x0, x1. Terms are
produced either by linear iteration or by powering the companion matrix
[[p, q], [1, 0]], optionally modulo m.
"""

from typing import Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

# Row-major 2x2 matrix (a, b, c, d) == [[a, b], [c, d]]
Matrix = Tuple[int, int, int, int]

IDENTITY: Matrix = (1, 0, 0, 1)


class SequenceSpec(BaseModel):
    """Order-2 linear recurrence x_{n+1} = p*x_n + q*x_{n-1}."""
    model_config = ConfigDict(frozen=True)

    p: int = Field(description="Coefficient of x_n")
    q: int = Field(description="Coefficient of x_{n-1}")
    x0: int = Field(description="Term at index 0")
    x1: int = Field(description="Term at index 1")


class Modulus(BaseModel):
    """Modulus for residue computations; residues lie in [0, m-1]."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=2, description="Modulus, at least 2")


def _require_nonzero_k(k: int) -> int:
    if k == 0:
        raise ValueError("k must be nonzero: k=0 makes k^2+4 a perfect square and the sequence degenerate")
    return k


def k_lucas_spec(k: int) -> SequenceSpec:
    """k-Lucas numbers: L_{k,n+1} = k*L_{k,n} + L_{k,n-1}, L_0 = 2, L_1 = k."""
    _require_nonzero_k(k)
    return SequenceSpec(p=k, q=1, x0=2, x1=k)


def k_fibonacci_spec(k: int) -> SequenceSpec:
    """k-Fibonacci numbers: same recurrence as k-Lucas with F_0 = 0, F_1 = 1."""
    _require_nonzero_k(k)
    return SequenceSpec(p=k, q=1, x0=0, x1=1)


class Preset(BaseModel):
    """Named specialization of a sequence family."""
    model_config = ConfigDict(frozen=True)

    family: str = Field(description="Underlying family: k-lucas or k-fibonacci")
    k: int = Field(description="Fixed value of k")


PRESETS: Dict[str, Preset] = {
    "lucas": Preset(family="k-lucas", k=1),
    "pell-lucas": Preset(family="k-lucas", k=2),
    "fibonacci": Preset(family="k-fibonacci", k=1),
    "pell": Preset(family="k-fibonacci", k=2),
}

FAMILIES = ("k-lucas", "k-fibonacci")


def terms(spec: SequenceSpec, count: int) -> List[int]:
    """
    First `count` terms x_0 ... x_{count-1}, by direct iteration.

    Args:
        spec: Sequence to iterate
        count: Number of terms; 0 gives an empty list

    Returns:
        list[int]: Exactly `count` terms
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    out: List[int] = []
    prev, cur = spec.x0, spec.x1
    for _ in range(count):
        out.append(prev)
        prev, cur = cur, spec.p * cur + spec.q * prev
    return out


def terms_mod(spec: SequenceSpec, count: int, m: Union[int, Modulus]) -> List[int]:
    """First `count` residues of the sequence modulo m."""
    mod = _modulus(m)
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    p, q = spec.p % mod, spec.q % mod
    prev, cur = spec.x0 % mod, spec.x1 % mod
    out: List[int] = []
    for _ in range(count):
        out.append(prev)
        prev, cur = cur, (p * cur + q * prev) % mod
    return out


def term_at_iterative(spec: SequenceSpec, n: int) -> int:
    """Term n by linear iteration in constant memory."""
    _require_index(n)
    prev, cur = spec.x0, spec.x1
    for _ in range(n):
        prev, cur = cur, spec.p * cur + spec.q * prev
    return prev


def term_at_mod_iterative(spec: SequenceSpec, n: int, m: Union[int, Modulus]) -> int:
    """Term n modulo m by linear iteration in constant memory."""
    _require_index(n)
    mod = _modulus(m)
    p, q = spec.p % mod, spec.q % mod
    prev, cur = spec.x0 % mod, spec.x1 % mod
    for _ in range(n):
        prev, cur = cur, (p * cur + q * prev) % mod
    return prev


def _mat_mul(x: Matrix, y: Matrix, mod: int = 0) -> Matrix:
    a, b, c, d = x
    e, f, g, h = y
    out = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    if mod:
        return tuple(v % mod for v in out)  # type: ignore[return-value]
    return out


def _mat_pow(base: Matrix, n: int, mod: int = 0) -> Matrix:
    """Binary powering, most significant bit first."""
    result = IDENTITY
    for bit in bin(n)[2:]:
        result = _mat_mul(result, result, mod)
        if bit == "1":
            result = _mat_mul(result, base, mod)
    return result


def companion_matrix(spec: SequenceSpec) -> Matrix:
    """[[p, q], [1, 0]]: maps (x_n, x_{n-1}) to (x_{n+1}, x_n)."""
    return (spec.p, spec.q, 1, 0)


def term_at(spec: SequenceSpec, n: int) -> int:
    """
    Term n via the n-th power of the companion matrix, O(log n) multiplies.

    M^n applied to (x1, x0) gives (x_{n+1}, x_n); the second row is all that
    is needed.
    """
    _require_index(n)
    _, _, c, d = _mat_pow(companion_matrix(spec), n)
    return c * spec.x1 + d * spec.x0


def term_at_mod(spec: SequenceSpec, n: int, m: Union[int, Modulus]) -> int:
    """Term n modulo m via modular companion-matrix powering; result in [0, m-1]."""
    _require_index(n)
    mod = _modulus(m)
    _, _, c, d = _mat_pow(companion_matrix(spec), n, mod)
    return (c * spec.x1 + d * spec.x0) % mod


def window_ok(spec: SequenceSpec, values: List[int]) -> bool:
    """True when every adjacent triple of `values` obeys the recurrence."""
    return all(
        values[i] == spec.p * values[i - 1] + spec.q * values[i - 2]
        for i in range(2, len(values))
    )


def _require_index(n: int) -> None:
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")


def _modulus(m: Union[int, Modulus]) -> int:
    if isinstance(m, Modulus):
        return m.m
    return Modulus(m=m).m
