"""Fibonacci numbers as exact big integers, plus the growth-bound checks."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

from .quadfield import _fib_pair, alpha_pow, qf_make

TABLE_SIZE = 600


@dataclass(frozen=True)
class FibTable:
    """Dense table ``F(0) .. F(N)``; read-only after construction."""

    N: int
    values: tuple[int, ...] = field(repr=False)

    @classmethod
    def build(cls, N: int = TABLE_SIZE) -> FibTable:
        vals = [0, 1]
        while len(vals) <= N:
            vals.append(vals[-1] + vals[-2])
        return cls(N, tuple(vals[: N + 1]))

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self):
        return self.N + 1

    def index_range(self, lo: int, hi: int, start: int, stop: int) -> range:
        """Indices ``k`` in ``[start, stop]`` with ``lo < F(k) < hi``.

        Only valid where the table is strictly increasing (``start >= 2``).
        """
        i = bisect_right(self.values, lo, start, stop + 1)
        j = bisect_left(self.values, hi, start, stop + 1)
        return range(i, j)


TABLE = FibTable.build()


def fib(n: int) -> int:
    if n < 0:
        raise ValueError("fib is defined for n >= 0")
    if n <= TABLE.N:
        return TABLE[n]
    return _fib_pair(n)[0]


@dataclass
class GrowthReport:
    n_max: int
    ok: bool
    checked: int
    violation: tuple[str, int] | None = None


def check_growth_bounds(n_max: int, ctx=None) -> GrowthReport:
    """Check ``alpha**(n-2) <= F(n) <= alpha**(n-1)`` for ``n >= 1`` and
    ``0.38 alpha**n <= F(n) <= 0.48 alpha**n`` for ``n >= 2``.

    Equality is detected exactly in the field; strict cases are decided by
    interval separation.
    """
    from .realint import PrecisionContext, decide_less, from_quad

    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    ctx = ctx or PrecisionContext()
    lower, upper = Fraction(38, 100), Fraction(48, 100)
    checked = 0

    def leq(lhs, rhs):
        # lhs, rhs are exact field elements
        if lhs == rhs:
            return True
        return decide_less(lambda b: from_quad(lhs, b), lambda b: from_quad(rhs, b), ctx)

    for n in range(1, n_max + 1):
        fn = qf_make(fib(n), 0)
        if not leq(alpha_pow(n - 2), fn):
            return GrowthReport(n_max, False, checked, ("alpha^(n-2) <= F(n)", n))
        if not leq(fn, alpha_pow(n - 1)):
            return GrowthReport(n_max, False, checked, ("F(n) <= alpha^(n-1)", n))
        if n > 1:
            an = alpha_pow(n)
            if not leq(an * lower, fn):
                return GrowthReport(n_max, False, checked, ("0.38 alpha^n <= F(n)", n))
            if not leq(fn, an * upper):
                return GrowthReport(n_max, False, checked, ("F(n) <= 0.48 alpha^n", n))
        checked += 1
    return GrowthReport(n_max, True, checked)
