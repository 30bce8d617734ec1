"""Certified continued fractions of registered irrational constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .realint import IRRATIONAL, PrecisionContext, Undecidable, const_eval

DEPTH_CAP = 200


@dataclass(frozen=True)
class ContFrac:
    """Partial quotients ``a_0..a_N`` and convergents ``p_k/q_k``."""

    name: str
    quotients: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    bits: int = 0

    @classmethod
    def from_quotients(cls, name: str, quotients, bits: int = 0) -> ContFrac:
        p, q = [], []
        p2, p1, q2, q1 = 0, 1, 1, 0
        for a in quotients:
            p2, p1 = p1, a * p1 + p2
            q2, q1 = q1, a * q1 + q2
            p.append(p1)
            q.append(q1)
        return cls(name, tuple(quotients), tuple(p), tuple(q), bits)

    def __len__(self):
        return len(self.quotients)

    def convergent(self, k: int) -> Fraction:
        return Fraction(self.p[k], self.q[k])


def _certified_quotients(lo: Fraction, hi: Fraction, limit: int) -> list[int]:
    """Quotients shared by every real in ``[lo, hi]``.

    A quotient is accepted only when the current tail interval sits strictly
    inside ``(a, a + 1)``; the tail is then ``1/(x - a)`` mapped endpoint-wise.
    """
    out = []
    while len(out) < limit:
        a = math.floor(lo)
        if not (a < lo and hi < a + 1):
            break
        out.append(a)
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return out


@lru_cache(maxsize=64)
def _expand_at(name: str, bits: int, limit: int) -> tuple[int, ...]:
    x = const_eval(name, bits)
    return tuple(_certified_quotients(x.lo, x.hi, limit))


def cf_expand(name: str, k: int, ctx: PrecisionContext | None = None) -> ContFrac:
    """First ``k`` partial quotients of the constant ``name``, escalating precision."""
    if name not in IRRATIONAL:
        raise ValueError(f"{name!r} is not a registered irrational constant")
    if not 1 <= k <= DEPTH_CAP:
        raise ValueError(f"k must be in 1..{DEPTH_CAP}")
    ctx = ctx or PrecisionContext(bits=512)
    for bits in ctx.schedule():
        qs = _expand_at(name, bits, k)
        if len(qs) >= k:
            return ContFrac.from_quotients(name, qs[:k], bits)
    raise Undecidable(f"could not certify {k} quotients of {name} below {ctx.bits_max} bits")


def cf_first_q_exceeding(name: str, bound: int, ctx: PrecisionContext | None = None,
                         depth: int = DEPTH_CAP) -> tuple[int, int, int]:
    """Smallest ``k`` with ``q_k > bound``, with ``p_k`` and ``q_k``."""
    if bound < 1:
        raise ValueError("bound must be positive")
    if name not in IRRATIONAL:
        raise ValueError(f"{name!r} is not a registered irrational constant")
    ctx = ctx or PrecisionContext(bits=512)
    for bits in ctx.schedule():
        cf = ContFrac.from_quotients(name, _expand_at(name, bits, depth), bits)
        for i, q in enumerate(cf.q):
            if q > bound:
                return i, cf.p[i], q
        if len(cf) >= depth:
            raise Undecidable(f"no convergent of {name} with q > {bound} within depth {depth}")
    raise Undecidable(f"q > {bound} for {name} not reached below {ctx.bits_max} bits")


@dataclass(frozen=True)
class LegendreBound:
    """``|x - r/s| > 1/((a_M + 2) s**2)`` for ``0 < s < M``."""

    M: int
    N: int
    a_M: int
    argmax: int

    def __call__(self, s) -> Fraction:
        return Fraction(1, (self.a_M + 2)) / (Fraction(s) ** 2)


def legendre_lower_bound(name: str, M: int, ctx: PrecisionContext | None = None) -> LegendreBound:
    """Legendre criterion data for the constant ``name`` and bound ``M``.

    ``N`` is the least index with ``q_N > M`` (so ``M = 1`` gives ``N = 1``
    for any constant with ``q_0 = 1``); ``a_M`` is the largest quotient among
    ``a_0..a_N`` and ``argmax`` its first index.
    """
    if M < 1:
        raise ValueError("M must be positive")
    N, _, _ = cf_first_q_exceeding(name, M, ctx)
    cf = cf_expand(name, N + 1, ctx)
    head = cf.quotients[: N + 1]
    aM = max(head)
    return LegendreBound(M, N, aM, head.index(aM))
