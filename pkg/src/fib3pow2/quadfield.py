"""Exact arithmetic in the real quadratic field Q(sqrt 5).

Elements are stored as ``x + y*alpha`` with rational ``x, y`` and
``alpha = (1 + sqrt 5)/2``. The basis ``{1, alpha}`` keeps powers of alpha
integral: ``alpha**n = F(n-1) + F(n)*alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational


@dataclass(frozen=True, slots=True)
class QuadElement:
    """The element ``x + y*alpha`` of Q(sqrt 5)."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        # Fraction is already reduced with a positive denominator, so field
        # equality is dataclass equality.
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def coerce(cls, v) -> QuadElement:
        if isinstance(v, QuadElement):
            return v
        if isinstance(v, (int, Rational)):
            return cls(Fraction(v), Fraction(0))
        raise TypeError(f"cannot coerce {type(v).__name__} to QuadElement")

    def __add__(self, other):
        try:
            o = QuadElement.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElement(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(-self.x, -self.y)

    def __sub__(self, other):
        try:
            o = QuadElement.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElement(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return QuadElement.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QuadElement.coerce(other)
        except TypeError:
            return NotImplemented
        return qf_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QuadElement.coerce(other)
        except TypeError:
            return NotImplemented
        return qf_mul(self, o.inverse())

    def __rtruediv__(self, other):
        return QuadElement.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        return qf_pow(self, k)

    def norm(self) -> Fraction:
        """``self * conj(self)``, a rational number."""
        # (x + y a)(x + y b) with a + b = 1, ab = -1
        return self.x * self.x + self.x * self.y - self.y * self.y

    def conj(self) -> QuadElement:
        return qf_conj(self)

    def inverse(self) -> QuadElement:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("zero has no inverse in Q(sqrt 5)")
        c = self.conj()
        return QuadElement(c.x / nrm, c.y / nrm)

    def is_rational(self) -> bool:
        return self.y == 0

    def sign(self) -> int:
        """Sign of the real embedding (alpha > 0), decided exactly."""
        # x + y*alpha = (2x + y + y*sqrt5)/2; compare u = 2x + y with -y*sqrt5.
        u = 2 * self.x + self.y
        v = self.y
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return 1 if v > 0 else -1
        if (u > 0) == (v > 0):
            return 1 if u > 0 else -1
        # opposite signs: the one with the larger square wins
        if u * u > 5 * v * v:
            return 1 if u > 0 else -1
        return 1 if v > 0 else -1

    def __lt__(self, other):
        return (self - QuadElement.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - QuadElement.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - QuadElement.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - QuadElement.coerce(other)).sign() >= 0

    def __float__(self):
        return float(self.x) + float(self.y) * (1 + 5 ** 0.5) / 2

    def __repr__(self):
        return f"QuadElement({self.x} + {self.y}*alpha)"


def qf_make(x, y) -> QuadElement:
    return QuadElement(Fraction(x), Fraction(y))


ZERO = qf_make(0, 0)
ONE = qf_make(1, 0)
TWO = qf_make(2, 0)
ALPHA = qf_make(0, 1)
BETA = qf_make(1, -1)
SQRT5 = qf_make(-1, 2)


def qf_mul(a: QuadElement, b: QuadElement) -> QuadElement:
    # alpha^2 = alpha + 1
    yy = a.y * b.y
    return QuadElement(a.x * b.x + yy, a.x * b.y + a.y * b.x + yy)


def qf_conj(a: QuadElement) -> QuadElement:
    """Image under alpha -> beta = 1 - alpha."""
    return QuadElement(a.x + a.y, -a.y)


def _fib_pair(n: int) -> tuple[int, int]:
    """(F(n), F(n+1)) by fast doubling, n >= 0."""
    if n == 0:
        return 0, 1
    f, g = _fib_pair(n >> 1)
    c = f * (2 * g - f)
    d = f * f + g * g
    if n & 1:
        return d, c + d
    return c, d


def alpha_pow(k: int) -> QuadElement:
    """Exact ``alpha**k`` for any integer ``k``."""
    if k >= 0:
        if k == 0:
            return ONE
        f, g = _fib_pair(k - 1)  # F(k-1), F(k)
        return qf_make(f, g)
    # alpha^-1 = -beta, so alpha^-k = (-1)^k beta^k = (-1)^k (F(k+1) - F(k) alpha)
    f, g = _fib_pair(-k)  # F(k), F(k+1)
    sgn = -1 if (-k) & 1 else 1
    return qf_make(sgn * g, -sgn * f)


def qf_pow(a: QuadElement, k: int) -> QuadElement:
    if k < 0:
        if a.norm() == 0:
            raise ZeroDivisionError("negative power of a non-invertible element")
        return qf_pow(a.inverse(), -k)
    if a == ALPHA:
        return alpha_pow(k)
    result = ONE
    base = a
    while k:
        if k & 1:
            result = qf_mul(result, base)
        k >>= 1
        if k:
            base = qf_mul(base, base)
    return result


@lru_cache(maxsize=65536)
def qf_psi(t: int, s: int) -> QuadElement:
    """``sqrt5 / (1 + alpha**-t + alpha**-s)`` exactly."""
    if t < 0 or s < 0:
        raise ValueError("psi is defined for non-negative gaps")
    denom = ONE + alpha_pow(-t) + alpha_pow(-s)
    return SQRT5 / denom


def qf_decompose_pow2_alpha(e: QuadElement, r_max: int = 64,
                            s_max: int = 64) -> tuple[int, int] | None:
    """Find ``(r, s)`` with ``e * 2**s == alpha**r``, ``|r| <= r_max``,
    ``|s| <= s_max``, or return None.

    The norm pins ``s`` (``N(e) * 4**s = (-1)**r``), so only ``r`` is searched.
    """
    nrm = e.norm()
    if nrm == 0:
        return None
    num, den = abs(nrm.numerator), nrm.denominator
    # |N(e)| must be 4**-s
    if num == 1 and den & (den - 1) == 0 and (den.bit_length() - 1) % 2 == 0:
        s = (den.bit_length() - 1) // 2
    elif den == 1 and num & (num - 1) == 0 and (num.bit_length() - 1) % 2 == 0:
        s = -((num.bit_length() - 1) // 2)
    else:
        return None
    if abs(s) > s_max:
        return None
    scaled = e * Fraction(2) ** s
    for r in range(-r_max, r_max + 1):
        if alpha_pow(r) == scaled:
            return r, s
    return None
