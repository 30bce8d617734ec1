"""Certified interval reals with rational endpoints.

Endpoints are ``Fraction`` values (dyadic after rounding). Every operation
returns an interval guaranteed to contain the exact image of its inputs;
transcendental functions are evaluated in fixed point with an explicit error
budget and then widened by that budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

from .quadfield import ALPHA, QuadElement, alpha_pow, qf_decompose_pow2_alpha, qf_psi

GUARD = 16


class Undecidable(ArithmeticError):
    """Intervals never separated before the precision ceiling."""


class Ambiguous(ArithmeticError):
    """Interval straddles an integer or half-integer; retry at higher precision."""


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = 256
    bits_max: int = 65536

    def __post_init__(self):
        if self.bits < 8:
            raise ValueError("bits must be at least 8")
        if self.bits > self.bits_max:
            raise ValueError("bits exceeds bits_max")

    def schedule(self):
        """Working precisions: bits, 2*bits, ... up to bits_max."""
        b = self.bits
        while b <= self.bits_max:
            yield b
            b *= 2


def _floor_to(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic with ~``bits`` significant bits that is <= x."""
    if x == 0:
        return x
    num, den = x.numerator, x.denominator
    shift = bits - (abs(num).bit_length() - den.bit_length())
    if shift >= 0:
        if den & (den - 1) == 0 and den <= (1 << shift):
            return x
        return Fraction((num << shift) // den, 1 << shift)
    return Fraction((num // (den << -shift)) << -shift)


def _ceil_to(x: Fraction, bits: int) -> Fraction:
    return -_floor_to(-x, bits)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (str, Decimal)):
        return Fraction(Decimal(v))
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True, slots=True)
class IntervalReal:
    """Closed interval ``[lo, hi]`` known to contain some exact real."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _to_fraction(self.lo), _to_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, v) -> IntervalReal:
        v = _to_fraction(v)
        return cls(v, v)

    @classmethod
    def coerce(cls, v) -> IntervalReal:
        if isinstance(v, IntervalReal):
            return v
        if isinstance(v, QuadElement):
            return from_quad(v, 256)
        return cls.exact(v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, v) -> bool:
        if isinstance(v, IntervalReal):
            return self.lo <= v.lo and v.hi <= self.hi
        v = _to_fraction(v)
        return self.lo <= v <= self.hi

    def positive(self) -> bool:
        return self.lo > 0

    def negative(self) -> bool:
        return self.hi < 0

    def rounded(self, bits: int) -> IntervalReal:
        return IntervalReal(_floor_to(self.lo, bits), _ceil_to(self.hi, bits))

    def __add__(self, other):
        o = IntervalReal.coerce(other)
        return IntervalReal(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return IntervalReal(-self.hi, -self.lo)

    def __sub__(self, other):
        o = IntervalReal.coerce(other)
        return IntervalReal(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return IntervalReal.coerce(other) - self

    def __mul__(self, other):
        o = IntervalReal.coerce(other)
        if o.is_exact() and o.lo >= 0:
            return IntervalReal(self.lo * o.lo, self.hi * o.lo)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return IntervalReal(min(p), max(p))

    __rmul__ = __mul__

    def reciprocal(self) -> IntervalReal:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return IntervalReal(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * IntervalReal.coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return IntervalReal.coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return (self ** -k).reciprocal()
        if k % 2 == 0 and self.lo < 0 < self.hi:
            return IntervalReal(0, max(self.lo ** k, self.hi ** k))
        a, b = self.lo ** k, self.hi ** k
        return IntervalReal(min(a, b), max(a, b))

    def abs(self) -> IntervalReal:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return IntervalReal(0, max(-self.lo, self.hi))

    def log(self, bits: int) -> IntervalReal:
        if self.lo <= 0:
            raise ValueError("log of an interval reaching zero or below")
        if self.is_exact():
            return IntervalReal(*_log_rational(self.lo, bits))
        return IntervalReal(_log_rational(self.lo, bits)[0], _log_rational(self.hi, bits)[1])

    def exp(self, bits: int) -> IntervalReal:
        lo, _ = _exp_rational(self.lo, bits)
        _, hi = _exp_rational(self.hi, bits)
        return IntervalReal(lo, hi)

    def sqrt(self, bits: int) -> IntervalReal:
        if self.lo < 0:
            raise ValueError("sqrt of a negative interval")
        return IntervalReal(_sqrt_rational(self.lo, bits)[0], _sqrt_rational(self.hi, bits)[1])

    def floor(self) -> int:
        """``floor`` of the enclosed value, or Ambiguous if not determined."""
        f = math.floor(self.lo)
        if math.floor(self.hi) != f:
            raise Ambiguous("interval straddles an integer")
        return f

    def decimal_bounds(self, digits: int = 40) -> tuple[str, str]:
        """Outward-rounded decimal strings for the endpoints."""
        return _to_decimal(self.lo, digits, ROUND_FLOOR), _to_decimal(self.hi, digits, ROUND_CEILING)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        lo, hi = self.decimal_bounds(20)
        return f"IntervalReal[{lo}, {hi}]"


def _to_decimal(x: Fraction, digits: int, rounding) -> str:
    ctx = Context(prec=digits, rounding=rounding)
    d = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return str(d)


Producer = Callable[[int], IntervalReal]
Operand = Union[IntervalReal, Producer, int, Fraction]


# -- fixed-point kernels ---------------------------------------------------

def _atanh_fixed(num: int, den: int, p: int) -> tuple[int, int]:
    """``(S, E)`` with ``|atanh(num/den) * 2**p - S| <= E``; needs |num/den| <= 1/4."""
    neg = num < 0
    num = abs(num)
    P = (num << p) // den
    z2n, z2d = num * num, den * den
    S = 0
    j = 0
    while P > 0:
        S += P // (2 * j + 1)
        P = P * z2n // z2d
        j += 1
    # P_j is off by at most j+1 ulps; each term adds <= 2 ulps of error and
    # the discarded tail is below (j+1)/(1 - z^2) < 2(j+1).
    E = 4 * (j + 1) + 2
    return (-S if neg else S), E


@lru_cache(maxsize=64)
def _log2_fixed(p: int) -> tuple[int, int]:
    S, E = _atanh_fixed(1, 3, p)
    return 2 * S, 2 * E


def _log_rational(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ``log(x)`` for rational ``x > 0``, absolute error ~2**-bits."""
    if x == 1:
        return Fraction(0), Fraction(0)
    num, den = x.numerator, x.denominator
    k = num.bit_length() - den.bit_length()
    if k >= 0:
        yn, yd = num, den << k
    else:
        yn, yd = num << -k, den
    if 2 * yn >= 3 * yd:
        yd <<= 1
        k += 1
    elif 4 * yn < 3 * yd:
        yn <<= 1
        k -= 1
    # y in [3/4, 3/2), z = (y-1)/(y+1) in [-1/7, 1/5]
    p = bits + GUARD + abs(k).bit_length()
    S, E = _atanh_fixed(yn - yd, yn + yd, p)
    S, E = 2 * S, 2 * E
    if k:
        L, LE = _log2_fixed(p)
        S += k * L
        E += abs(k) * LE
    scale = 1 << p
    return Fraction(S - E, scale), Fraction(S + E, scale)


def _exp_rational(r: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ``exp(r)`` with relative error ~2**-bits."""
    if r == 0:
        return Fraction(1), Fraction(1)
    mag = abs(r.numerator).bit_length() - r.denominator.bit_length()
    j = max(0, mag + 10)
    p = bits + GUARD + j
    tn, td = r.numerator, r.denominator << j  # |t| <= 2**-9
    term = 1 << p
    S = 0
    i = 0
    while term != 0:
        S += term
        i += 1
        term = (term * tn) // (td * i)
    E = 2 * (i + 2)
    lo, hi = Fraction(S - E, 1 << p), Fraction(S + E, 1 << p)
    wb = bits + GUARD + j
    for _ in range(j):
        lo = _floor_to(lo * lo, wb)
        hi = _ceil_to(hi * hi, wb)
    return lo, hi


def _sqrt_rational(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if x == 0:
        return Fraction(0), Fraction(0)
    num, den = x.numerator, x.denominator
    p = bits + GUARD + max(0, den.bit_length() - num.bit_length()) // 2
    s = math.isqrt((num * den) << (2 * p))
    scale = den << p
    if s * s == (num * den) << (2 * p):
        v = Fraction(s, scale)
        return v, v
    return Fraction(s, scale), Fraction(s + 1, scale)


# -- constants -------------------------------------------------------------

def from_quad(e: QuadElement, bits: int) -> IntervalReal:
    """Enclosure of the real value of a field element, relative width ~2**-bits."""
    if e.y == 0:
        return IntervalReal.exact(e.x)
    D = math.lcm(e.x.denominator, e.y.denominator)
    X = e.x.numerator * (D // e.x.denominator)
    Y = e.y.numerator * (D // e.y.denominator)
    # value = (2X + Y + Y*sqrt5) / (2D)
    k = bits + GUARD
    u = 2 * X + Y
    while True:
        s = math.isqrt((5 * Y * Y) << (2 * k))
        scale = 1 << k
        if Y > 0:
            lo, hi = u * scale + s, u * scale + s + 1
        else:
            lo, hi = u * scale - s - 1, u * scale - s
        if (lo > 0 or hi < 0) and (hi - lo) << bits <= min(abs(lo), abs(hi)):
            return IntervalReal(Fraction(lo, scale * 2 * D), Fraction(hi, scale * 2 * D))
        k *= 2


@lru_cache(maxsize=256)
def _log2(bits: int) -> IntervalReal:
    return IntervalReal(*_log_rational(Fraction(2), bits))


@lru_cache(maxsize=256)
def _alpha(bits: int) -> IntervalReal:
    return from_quad(ALPHA, bits + GUARD)


@lru_cache(maxsize=256)
def _log_alpha(bits: int) -> IntervalReal:
    return _alpha(bits).log(bits + GUARD).rounded(bits + GUARD)


@lru_cache(maxsize=256)
def _log_sqrt5(bits: int) -> IntervalReal:
    lo, hi = _log_rational(Fraction(5), bits + 1)
    return IntervalReal(lo / 2, hi / 2)


@lru_cache(maxsize=256)
def _gamma(bits: int) -> IntervalReal:
    return (_log2(bits + GUARD) / _log_alpha(bits + GUARD)).rounded(bits + GUARD)


@lru_cache(maxsize=256)
def _mu_sqrt5(bits: int) -> IntervalReal:
    return (_log_sqrt5(bits + GUARD) / _log_alpha(bits + GUARD)).rounded(bits + GUARD)


def log_quad(e: QuadElement, bits: int) -> IntervalReal:
    """``log`` of a positive field element; exact zero when ``e == 1``."""
    if e == QuadElement.coerce(1):
        return IntervalReal.exact(0)
    return from_quad(e, bits + GUARD).log(bits + GUARD)


@lru_cache(maxsize=131072)
def _mu_psi(t: int, s: int, bits: int) -> IntervalReal:
    psi = qf_psi(t, s)
    dec = qf_decompose_pow2_alpha(psi)
    if dec is not None:
        # psi = alpha**r / 2**k, so log(psi)/log(alpha) = r - k gamma
        r, k = dec
        return IntervalReal.exact(r) if k == 0 else (r - _gamma(bits + GUARD) * k).rounded(bits + GUARD)
    return mu_log_route(psi, bits)


def mu_log_route(e: QuadElement, bits: int) -> IntervalReal:
    """``log(e)/log(alpha)`` by direct logarithms, ignoring any exact structure."""
    lp = log_quad(e, bits)
    if lp.is_exact() and lp.lo == 0:
        return lp
    return (lp / _log_alpha(bits + GUARD)).rounded(bits + GUARD)


_NAMED = {
    "log2": _log2,
    "logAlpha": _log_alpha,
    "logSqrt5": _log_sqrt5,
    "gamma": _gamma,
    "mu": _mu_sqrt5,
    "alpha": _alpha,
    "sqrt5": lambda bits: IntervalReal(*_sqrt_rational(Fraction(5), bits + GUARD)),
    "sqrt2": lambda bits: IntervalReal(*_sqrt_rational(Fraction(2), bits + GUARD)),
    "logAlpha/log2": lambda bits: _gamma(bits).reciprocal().rounded(bits + GUARD),
}

# Constants whose irrationality the continued-fraction code may rely on.
IRRATIONAL = {"gamma", "mu", "sqrt5", "sqrt2", "alpha", "logAlpha/log2"}


def const_eval(name: str, ctx: PrecisionContext | int | None = None, *args) -> IntervalReal:
    """Enclosure of a registered constant.

    ``name`` is one of ``log2, logAlpha, logSqrt5, gamma, mu, alpha, sqrt5,
    sqrt2, logAlpha/log2`` or the parametrised ``mu_psi`` (``t, s``) and
    ``alphaPow`` (``k``).
    """
    bits = ctx if isinstance(ctx, int) else (ctx or PrecisionContext()).bits
    if name == "mu_psi":
        t, s = args
        return _mu_psi(t, s, bits)
    if name == "alphaPow":
        (k,) = args
        return from_quad(alpha_pow(k), bits)
    try:
        return _NAMED[name](bits)
    except KeyError:
        raise KeyError(f"unknown constant {name!r}") from None


def producer(name: str, *args) -> Producer:
    return lambda bits: const_eval(name, bits, *args)


def _as_producer(v: Operand) -> Producer:
    if callable(v):
        return v
    iv = IntervalReal.coerce(v)
    return lambda bits: iv


def decide_less(a: Operand, b: Operand, ctx: PrecisionContext | None = None) -> bool:
    """Truth of ``a < b``, escalating precision until the enclosures separate."""
    ctx = ctx or PrecisionContext()
    fa, fb = _as_producer(a), _as_producer(b)
    for bits in ctx.schedule():
        ia, ib = fa(bits), fb(bits)
        if ia.hi < ib.lo:
            return True
        if ib.hi <= ia.lo:
            return False
    raise Undecidable(f"no separation up to {ctx.bits_max} bits")


def dist_nearest_int(x: IntervalReal, hull: bool = False) -> IntervalReal:
    """Enclosure of the distance from ``x`` to the nearest integer.

    If ``[lo, hi]`` contains an integer or half-integer the distance is not
    monotone there: by default Ambiguous is raised (the caller escalates
    precision); with ``hull=True`` the coarser but still valid enclosure
    ``[0, max]`` or ``[min, 1/2]`` is returned instead.
    """
    if x.width >= Fraction(1, 4):
        raise ValueError("interval too wide for nearest-integer distance")
    if x.is_exact():
        v = x.lo
        return IntervalReal.exact(abs(v - round(v)))
    dl = abs(x.lo - round(x.lo))
    dh = abs(x.hi - round(x.hi))
    if math.ceil(2 * x.lo) <= math.floor(2 * x.hi):
        if not hull:
            raise Ambiguous("interval straddles an integer or half-integer")
        if math.ceil(x.lo) <= math.floor(x.hi):
            return IntervalReal(0, max(dl, dh))
        return IntervalReal(min(dl, dh), Fraction(1, 2))
    return IntervalReal(min(dl, dh), max(dl, dh))


def certified(fn: Callable[[int], IntervalReal], ctx: PrecisionContext | None = None,
              accept: Callable[[IntervalReal], bool] | None = None) -> tuple[IntervalReal, int]:
    """Evaluate ``fn`` at escalating precision until ``accept`` holds and no
    Ambiguous is raised; returns the interval and the precision used."""
    ctx = ctx or PrecisionContext()
    for bits in ctx.schedule():
        try:
            v = fn(bits)
        except Ambiguous:
            continue
        if accept is None or accept(v):
            return v, bits
    raise Undecidable(f"no certified value up to {ctx.bits_max} bits")
