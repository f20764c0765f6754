#!/usr/bin/env python3
"""
Router class for the kbinomial command-line commands.
"""

import logging
import sys
import time
from typing import List, Optional, TextIO, Tuple

from pydantic import BaseModel, ConfigDict, Field

from bfile import BFileCache, format_bfile, read_bfile
from identities import IdentityId, VerificationReport, report_lines, verify_grid
from recurrences import (
    FAMILIES,
    PRESETS,
    SequenceSpec,
    term_at,
    term_at_iterative,
    term_at_mod,
    term_at_mod_iterative,
    terms,
)
from transform import TransformParams, iterated_fibonacci_spec, iterated_lucas_spec

FORMATS = ("plain", "csv", "json", "bfile")
METHODS = ("iterate", "matrix")


class SequenceDump(BaseModel):
    """Structured form of an emitted sequence; terms are decimal strings."""
    model_config = ConfigDict(frozen=True)

    family: str = Field(description="k-lucas or k-fibonacci")
    k: int = Field(description="Sequence parameter")
    r: int = Field(description="Number of binomial transforms")
    terms: List[str] = Field(description="Terms from index 0, as decimal strings")


class BenchRow(BaseModel):
    """Timings for one index of the bench schedule; only built once both methods agree."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(description="Index of the computed term")
    iterate_seconds: Optional[float] = Field(default=None, description="Best time of linear iteration")
    matrix_seconds: Optional[float] = Field(default=None, description="Best time of matrix powering")
    digits: int = Field(description="Decimal digits of the term (or residue)")


def doubling_schedule(n_max: int) -> List[int]:
    """1, 2, 4, ... up to n_max, ending with n_max itself; [0] when n_max is 0."""
    if n_max < 0:
        raise ValueError(f"n-max must be nonnegative, got {n_max}")
    if n_max == 0:
        return [0]
    schedule = []
    n = 1
    while n <= n_max:
        schedule.append(n)
        n *= 2
    if schedule[-1] != n_max:
        schedule.append(n_max)
    return schedule


class Router:
    """
    Router class for handling sequence, verification and benchmark commands.
    """

    def __init__(self, config: dict, logger: logging.Logger = None, out: TextIO = None):
        """
        Initialize the Router.

        Args:
            config: Configuration dictionary
            logger: Logger instance (optional)
            out: Stream for command output (defaults to stdout at call time)
        """
        self.config = config or {}
        self.logger = logger or logging.getLogger(__name__)
        self._out = out

    @property
    def out(self) -> TextIO:
        return self._out or sys.stdout

    def _write(self, text: str):
        self.out.write(text)
        self.out.flush()

    def resolve_family(self, family: str, k: Optional[int]) -> Tuple[str, int]:
        """Map a preset name to its family and k; plain families need an explicit k."""
        if family in PRESETS:
            preset = PRESETS[family]
            if k is not None and k != preset.k:
                raise ValueError(f"--family {family} fixes k={preset.k}, got --k {k}")
            return preset.family, preset.k
        if family not in FAMILIES:
            raise ValueError(f"Unknown family '{family}'. Available: {', '.join(FAMILIES + tuple(PRESETS))}")
        if k is None:
            raise ValueError(f"--k is required for --family {family}")
        return family, k

    def sequence_spec(self, family: str, k: Optional[int], r: int) -> Tuple[str, TransformParams, SequenceSpec]:
        family, k = self.resolve_family(family, k)
        params = TransformParams(k=k, r=r)
        if family == "k-lucas":
            return family, params, iterated_lucas_spec(params)
        return family, params, iterated_fibonacci_spec(params)

    def compute_terms(self, spec: SequenceSpec, count: int, method: str) -> List[int]:
        if count < 0:
            raise ValueError(f"count must be nonnegative, got {count}")
        if method == "iterate":
            return terms(spec, count)
        if method == "matrix":
            return [term_at(spec, n) for n in range(count)]
        raise ValueError(f"Unknown method '{method}'. Available: {', '.join(METHODS)}")

    def compute_term(self, spec: SequenceSpec, n: int, method: str, mod: Optional[int] = None) -> int:
        if method == "iterate":
            return term_at_iterative(spec, n) if mod is None else term_at_mod_iterative(spec, n, mod)
        if method == "matrix":
            return term_at(spec, n) if mod is None else term_at_mod(spec, n, mod)
        raise ValueError(f"Unknown method '{method}'. Available: {', '.join(METHODS)}")

    def format_terms(self, values: List[int], fmt: str, family: str, params: TransformParams) -> str:
        if fmt == "plain":
            return " ".join(str(v) for v in values) + "\n"
        if fmt == "csv":
            return ",".join(str(v) for v in values) + "\n"
        if fmt == "bfile":
            return format_bfile(values)
        if fmt == "json":
            dump = SequenceDump(family=family, k=params.k, r=params.r, terms=[str(v) for v in values])
            return dump.model_dump_json() + "\n"
        raise ValueError(f"Unknown format '{fmt}'. Available: {', '.join(FORMATS)}")

    def emit(self, family: str, k: Optional[int], r: int, count: int, fmt: str, method: str) -> int:
        """Write `count` terms of the r-fold transform of a family."""
        family, params, spec = self.sequence_spec(family, k, r)
        self.logger.info(f"emit {family} k={params.k} r={params.r} count={count} via {method}")
        values = self.compute_terms(spec, count, method)
        self._write(self.format_terms(values, fmt, family, params))
        return 0

    def term(self, family: str, k: Optional[int], r: int, n: int, mod: Optional[int], method: str) -> int:
        """Write a single term, optionally reduced modulo `mod`."""
        if n < 0:
            raise ValueError(f"n must be nonnegative, got {n}")
        family, params, spec = self.sequence_spec(family, k, r)
        self._write(f"{self.compute_term(spec, n, method, mod)}\n")
        return 0

    def verify(self, identity: str, k_range: range, r_range: range, n_max: int, as_json: bool,
               workers: int = 1) -> int:
        """Run a verification grid; exit 0 when verified, 1 when falsified."""
        report: VerificationReport = verify_grid(identity, k_range, r_range, n_max, workers=workers)
        if as_json:
            self._write(report.model_dump_json() + "\n")
        else:
            self._write("".join(line + "\n" for line in report_lines(report)))
        return 0 if report.failed == 0 else 1

    def bench(self, family: str, k: Optional[int], r: int, n_max: int, method: str,
              mod: Optional[int] = None, repeats: int = 3) -> int:
        """
        Time term computation over a doubling schedule of indices.

        Both methods are always evaluated and compared before any timing is
        reported; `method` only selects which timings are shown.
        """
        family, params, spec = self.sequence_spec(family, k, r)
        if method not in METHODS + ("both",):
            raise ValueError(f"Unknown method '{method}'. Available: {', '.join(METHODS + ('both',))}")
        if repeats < 1:
            raise ValueError(f"repeats must be positive, got {repeats}")
        schedule = doubling_schedule(n_max)

        values = {}
        for n in schedule:
            iterated = self.compute_term(spec, n, "iterate", mod)
            powered = self.compute_term(spec, n, "matrix", mod)
            values[n] = (iterated, powered)
        disagreements = [n for n, (a, b) in values.items() if a != b]
        if disagreements:
            n = disagreements[0]
            self.logger.warning(f"methods disagree at n={n}: iterate={values[n][0]} matrix={values[n][1]}")
            self._write(f"methods disagree at n={n}: iterate={values[n][0]} matrix={values[n][1]}\n")
            return 1

        rows = []
        for n in schedule:
            timings = {}
            for m in METHODS:
                if method in (m, "both"):
                    timings[m] = self._best_time(spec, n, m, mod, repeats)
            rows.append(BenchRow(
                n=n,
                iterate_seconds=timings.get("iterate"),
                matrix_seconds=timings.get("matrix"),
                digits=len(str(abs(values[n][0]))),
            ))
        for line in self._generate_table(rows, family, params, mod):
            self._write(line + "\n")
        return 0

    def _best_time(self, spec: SequenceSpec, n: int, method: str, mod: Optional[int], repeats: int) -> float:
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            self.compute_term(spec, n, method, mod)
            best = min(best, time.perf_counter() - start)
        return best

    def _generate_table(self, rows: List[BenchRow], family: str, params: TransformParams,
                        mod: Optional[int]) -> List[str]:
        """Generate tabular representation of bench results."""
        title = f"{family} k={params.k} r={params.r}" + (f" mod {mod}" if mod is not None else "")
        table_lines = [title]
        header = f"{'n':>10} {'iterate (s)':>14} {'matrix (s)':>14} {'digits':>8} {'check':>6}"
        table_lines.append(header)
        table_lines.append("-" * len(header))
        for row in rows:
            it = f"{row.iterate_seconds:.6f}" if row.iterate_seconds is not None else "-"
            mx = f"{row.matrix_seconds:.6f}" if row.matrix_seconds is not None else "-"
            table_lines.append(f"{row.n:>10} {it:>14} {mx:>14} {row.digits:>8} {'ok':>6}")
        return table_lines

    def check(self, family: str, k: Optional[int], r: int, bfile: Optional[str], name: Optional[str],
              method: str = "iterate") -> int:
        """Compare a stored b-file against the computed family; exit 1 on the first mismatch."""
        if (bfile is None) == (name is None):
            raise ValueError("give exactly one of --bfile or --name")
        if bfile is not None:
            stored = read_bfile(bfile)
            source = bfile
        else:
            cache = BFileCache(self.config.get('folders', {}).get('bfiles', 'data/bfiles'))
            stored = cache.get(name)
            if stored is None:
                raise ValueError(f"b-file '{name}' not found. Available: {cache.names()}")
            source = name
        family, params, spec = self.sequence_spec(family, k, r)
        computed = self.compute_terms(spec, len(stored), method)
        for n, (want, got) in enumerate(zip(computed, stored)):
            if want != got:
                self.logger.warning(f"{source} differs from {family} k={params.k} r={params.r} at n={n}")
                self._write(f"mismatch at n={n}: expected {want}, found {got}\n")
                return 1
        self._write(f"ok: {len(stored)} terms match {family} k={params.k} r={params.r}\n")
        return 0

    def list_catalog(self) -> int:
        """Print families, presets and identity ids."""
        lines = ["Families:"]
        lines += [f"  - {f}" for f in FAMILIES]
        lines.append("Presets:")
        lines += [f"  - {name}: {p.family} k={p.k}" for name, p in PRESETS.items()]
        lines.append("Identities:")
        lines += [f"  - {i.value}" for i in IdentityId]
        self._write("".join(line + "\n" for line in lines))
        return 0
