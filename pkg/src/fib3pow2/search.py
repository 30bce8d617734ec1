"""Exhaustive exact search for |F(n) + F(m) + F(l) - 2**a| < 2**(a/2).

Tuples are canonical: ``n >= m >= l >= 2`` (``F(1) = F(2)`` so index 1 adds
no new values) and ``a >= 1``. The inequality is tested as
``(S - 2**a)**2 < 2**a`` over the integers, which is exact because
``S - 2**a`` is an integer.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from .fibseq import TABLE, fib
from .linforms import a_range_for_n

WINDOW_PAD = 2


@dataclass(frozen=True, order=True)
class Solution:
    n: int
    m: int
    l: int
    a: int

    def __post_init__(self):
        if not (self.n >= self.m >= self.l >= 2 and self.a >= 1):
            raise ValueError(f"non-canonical tuple {self.astuple()}")

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.m, self.l, self.a)


class Check(NamedTuple):
    ok: bool
    margin: int  # 2**a - (S - 2**a)**2; positive iff the inequality holds


def check_solution(n: int, m: int, l: int, a: int) -> Check:
    if min(n, m, l, a) < 1:
        raise ValueError("indices and exponent must be positive")
    p = 1 << a
    d = fib(n) + fib(m) + fib(l) - p
    margin = p - d * d
    return Check(margin > 0, margin)


def _a_candidates(n: int) -> range:
    if n < 4:
        return range(1, 4 + WINDOW_PAD)
    lo, hi = a_range_for_n(n)
    return range(max(1, lo - WINDOW_PAD), hi + WINDOW_PAD + 1)


def _solutions_for_n(n: int) -> list[tuple[int, int, int, int]]:
    out = []
    F = TABLE
    fn = F[n]
    for a in _a_candidates(n):
        p = 1 << a
        r = math.isqrt(p - 1)  # |S - p| < 2**(a/2)  <=>  |S - p| <= r
        for m in range(2, n + 1):
            target = p - fn - F[m]
            if target + r < 1:
                break
            for l in F.index_range(target - r - 1, target + r + 1, 2, m):
                d = fn + F[m] + F[l] - p
                if d * d < p:
                    out.append((n, m, l, a))
    return out


def enumerate_solutions(n_max: int, jobs: int = 1) -> list[Solution]:
    """All canonical solutions with ``n <= n_max``, sorted."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if n_max > TABLE.N:
        raise ValueError(f"n_max above the precomputed table ({TABLE.N})")
    ns = range(2, n_max + 1)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_solutions_for_n, ns, chunksize=16))
    else:
        parts = [_solutions_for_n(n) for n in ns]
    return sorted(Solution(*t) for part in parts for t in part)


def enumerate_oracle(n_max: int) -> set[tuple[int, int, int, int]]:
    """Slow independent enumeration: every triple, every ``a`` with
    ``2**a <= 2 S``."""
    out = set()
    for n in range(2, n_max + 1):
        for m in range(2, n + 1):
            for l in range(2, m + 1):
                s = fib(n) + fib(m) + fib(l)
                a = 1
                while (1 << a) <= 2 * s:
                    d = s - (1 << a)
                    if d * d < (1 << a):
                        out.add((n, m, l, a))
                    a += 1
    return out


# -- appendix table -------------------------------------------------------

def shipped_table() -> Path:
    return Path(str(resources.files("fib3pow2") / "data" / "table1.csv"))


class TableFormatError(ValueError):
    pass


def read_table(path) -> list[tuple[int, int, int, int]]:
    """Rows of a ``n,m,l,a`` CSV file, in file order (duplicates kept)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["n", "m", "l", "a"]:
            raise TableFormatError(f"{path}: expected header n,m,l,a, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise TableFormatError(f"{path}:{lineno}: expected 4 fields")
            try:
                t = tuple(int(c) for c in row)
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: non-integer field") from None
            try:
                Solution(*t)
            except ValueError as e:
                raise TableFormatError(f"{path}:{lineno}: {e}") from None
            rows.append(t)
    return rows


def write_table(solutions, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "l", "a"])
        for s in solutions:
            w.writerow(s.astuple() if isinstance(s, Solution) else s)


@dataclass
class TableDiff:
    table_count: int
    search_count: int
    missing: list = field(default_factory=list)  # found by search, absent from table
    extra: list = field(default_factory=list)  # in table, not found by search
    duplicates: list = field(default_factory=list)
    not_solutions: list = field(default_factory=list)  # table rows failing the inequality

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "table_count": self.table_count,
            "search_count": self.search_count,
            "missing": [list(t) for t in self.missing],
            "extra": [list(t) for t in self.extra],
            "duplicates": [list(t) for t in self.duplicates],
            "not_solutions": [list(t) for t in self.not_solutions],
        }


def verify_table(path=None, n_max: int = 550, solutions=None) -> TableDiff:
    """Compare a table file with the exhaustive search as sets."""
    rows = read_table(path or shipped_table())
    seen, dups = set(), []
    for t in rows:
        if t in seen:
            dups.append(t)
        seen.add(t)
    if solutions is None:
        solutions = enumerate_solutions(n_max)
    found = {s.astuple() for s in solutions}
    return TableDiff(
        table_count=len(seen),
        search_count=len(found),
        missing=sorted(found - seen),
        extra=sorted(seen - found),
        duplicates=dups,
        not_solutions=sorted(t for t in seen if not check_solution(*t).ok),
    )
