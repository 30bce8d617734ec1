"""Heights, the Matveev bound evaluator and the first (huge) bounds on n and a.

Matveev's theorem is taken as given; this module only evaluates its
conclusion and the chain of inequalities built on it, every step decided
with certified intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .quadfield import SQRT5, alpha_pow, qf_conj
from .realint import IntervalReal, PrecisionContext, const_eval, decide_less

MATVEEV_FLOOR = Fraction(16, 100)

# Constants as printed in the source argument; every one is audited as an
# upper bound of the value our own arithmetic produces.
PRINTED = {
    "A1": Fraction(14, 10),
    "A2": Fraction(5, 10),
    "A3_sqrt5": Fraction(17, 10),
    "C_lambda1": Fraction(14 * 10**11),
    "C_lambda2": Fraction(231 * 10**10),
    "C_min": Fraction(24 * 10**11),
    "C_case12": Fraction(686 * 10**22),
    "case12_a": 9 * 10**28,
    "case12_n": Fraction(187 * 10**27),
    "case3_a": Fraction(384 * 10**12),
    "case3_n": Fraction(553 * 10**12),
    "a_bound": 9 * 10**28,
    "n_bound": Fraction(187 * 10**27),
}


def _iv(x) -> IntervalReal:
    return IntervalReal.coerce(x)


def _log_int(n: int, bits: int) -> IntervalReal:
    return IntervalReal.exact(n).log(bits)


@dataclass(frozen=True)
class MatveevInput:
    """Data for Matveev's bound; ``B=None`` leaves the ``(1 + log B)`` factor out."""

    t: int
    D: int
    A: tuple
    B: int | None = None

    def __post_init__(self):
        if self.t < 1 or self.D < 1:
            raise ValueError("t and D must be positive")
        if len(self.A) != self.t:
            raise ValueError("need one A_i per logarithm")
        if self.B is not None and self.B < 1:
            raise ValueError("B must be at least 1")
        for a in self.A:
            a = _iv(a)
            if a.lo < MATVEEV_FLOOR:
                raise ValueError(f"A_i must be at least {MATVEEV_FLOOR}")


def matveev_coefficient(inp: MatveevInput, bits: int = 256) -> IntervalReal:
    """``1.4 * 30**(t+3) * t**4.5 * D**2 * (1 + log D) * prod(A)``."""
    t, D = inp.t, inp.D
    t45 = IntervalReal.exact(t ** 4) * IntervalReal.exact(t).sqrt(bits)
    one_log_d = 1 + _log_int(D, bits)
    c = IntervalReal.exact(Fraction(14, 10) * 30 ** (t + 3) * D * D) * t45 * one_log_d
    for a in inp.A:
        c = c * _iv(a)
    return c.rounded(bits)


def matveev_exponent(inp: MatveevInput, bits: int = 256) -> IntervalReal:
    """Enclosure of the exponent in ``|Lambda| > exp(-E)``."""
    c = matveev_coefficient(inp, bits)
    if inp.B is None:
        return c
    return (c * (1 + _log_int(inp.B, bits))).rounded(bits)


def log_height_rational(p: int, q: int, bits: int = 256) -> IntervalReal:
    """``h(p/q) = log max(|p|, q)`` for reduced ``p/q``."""
    if q <= 0:
        raise ValueError("denominator must be positive")
    if math.gcd(p, q) != 1:
        raise ValueError("p/q must be reduced")
    return _log_int(max(abs(p), q), bits)


def log_height(leading: int, conjugates: list[IntervalReal], bits: int = 256) -> IntervalReal:
    """Logarithmic height from the leading coefficient of the minimal
    polynomial and enclosures of all conjugates."""
    total = _log_int(leading, bits)
    for z in conjugates:
        za = z.abs()
        if za.lo >= 1:
            total = total + za.log(bits)
        elif za.hi > 1:
            total = total + IntervalReal(0, za.log(bits).hi)
    return total / len(conjugates)


def log_height_named(sym: str, bits: int = 256) -> IntervalReal:
    """Height of ``alpha`` (root of x^2 - x - 1) or ``sqrt5`` (root of x^2 - 5)."""
    if sym == "alpha":
        return const_eval("logAlpha", bits) / 2
    if sym == "sqrt5":
        return const_eval("logSqrt5", bits)
    raise KeyError(sym)


def height_gamma3_upper(dm: int, dl: int, bits: int = 256) -> tuple[IntervalReal, IntervalReal]:
    """Upper bound ``log(4 sqrt5) + (dm + dl) log(alpha)/2`` for the height of
    ``(1 + alpha**-dm + alpha**-dl)/sqrt5`` and the Matveev parameter
    ``A3 = 5 + (dm + dl) log(alpha)``."""
    if dm < 0 or dl < 0:
        raise ValueError("gaps must be non-negative")
    la = const_eval("logAlpha", bits)
    h = IntervalReal.exact(16 * 5).log(bits) / 2 + la * Fraction(dm + dl, 2)
    A3 = 5 + la * (dm + dl)
    return h, A3


# -- relation between n and a ---------------------------------------------

def _c(bits):
    return const_eval("logAlpha/log2", bits)


def _d(bits):
    # log(0.38)/log(2)
    return IntervalReal.exact(Fraction(38, 100)).log(bits) / const_eval("log2", bits)


def a_window(n: int, bits: int = 256) -> tuple[IntervalReal, IntervalReal]:
    """``(n c + d - 1, n c + 1)`` with ``c = log(alpha)/log 2``, ``d = log(0.38)/log 2``."""
    c = _c(bits)
    return c * n + _d(bits) - 1, c * n + 1


def a_range_for_n(n: int, bits: int = 256) -> tuple[int, int]:
    """Integer range that must contain ``a`` for a solution with largest index ``n``."""
    if n < 4:
        raise ValueError("the a-window needs n >= 4")
    lo, hi = a_window(n, bits)
    a_lo = max(1, math.floor(lo.lo) + 1)
    a_hi = math.ceil(hi.hi) - 1
    if a_hi >= n:
        raise AssertionError(f"a < n fails for n={n}")
    return a_lo, a_hi


def solve_decreasing_threshold(pred: Callable[[int], bool], start: int = 1,
                               limit: int = 10**40) -> int:
    """Least ``N >= start`` with ``pred(n)`` for all ``n >= N``.

    ``pred`` must be monotone (false then true) from ``start`` on.
    """
    if pred(start):
        return start
    lo, hi = start, max(2 * start, start + 1)
    while not pred(hi):
        lo = hi
        hi *= 2
        if hi > limit:
            raise ValueError(f"no threshold below {limit}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- first bounds ---------------------------------------------------------

@dataclass
class AuditEntry:
    name: str
    statement: str
    verdict: str  # pass | fail | discrepancy
    values: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self, digits: int = 40) -> dict:
        vals = {}
        for k, v in self.values.items():
            if isinstance(v, IntervalReal):
                lo, hi = v.decimal_bounds(digits)
                vals[k] = {"lo": lo, "hi": hi}
            elif isinstance(v, Fraction):
                vals[k] = str(v) if v.denominator != 1 else str(v.numerator)
            else:
                vals[k] = v
        d = {"name": self.name, "statement": self.statement, "verdict": self.verdict, "values": vals}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class BoundReport:
    a_bound: int
    n_bound: int
    case_tag: str
    audit: list[AuditEntry]
    cases: dict
    constants: dict

    @property
    def ok(self) -> bool:
        return all(e.verdict != "fail" for e in self.audit)

    def to_dict(self, digits: int = 40) -> dict:
        consts = {}
        for k, v in self.constants.items():
            lo, hi = v.decimal_bounds(digits)
            consts[k] = {"value": str(float(v.mid)), "lo": lo, "hi": hi}
        return {
            "a_bound": self.a_bound,
            "n_bound": self.n_bound,
            "case_tag": self.case_tag,
            "cases": self.cases,
            "constants": consts,
            "audit": [e.to_dict(digits) for e in self.audit],
            "ok": self.ok,
        }


def _le(a, b, ctx) -> bool:
    """Certified ``a <= b`` for values known to differ."""
    return not decide_less(b, a, ctx)


def _check(audit, name, statement, ok, **values):
    audit.append(AuditEntry(name, statement, "pass" if ok else "fail", values))
    return ok


def case12_threshold(K, bits: int = 256, ctx: PrecisionContext | None = None) -> tuple[int, int]:
    """Largest possible ``(n, a)`` when ``(a/2 - 1) log 2 < K log(n)**2`` and
    ``a > n c + d - 1``."""
    ctx = ctx or PrecisionContext(bits)
    l2 = const_eval("log2", bits)
    K = _iv(K)

    def no_solution(n: int) -> bool:
        lo, _ = a_window(n, bits)
        lhs = ((lo / 2) - 1) * l2
        rhs = K * _log_int(n, bits) ** 2
        return decide_less(rhs, lhs, ctx)

    N = solve_decreasing_threshold(no_solution, start=3)
    n_max = N - 1
    return n_max, _a_max_for(n_max, bits)


def case3_threshold(K, bits: int = 256, ctx: PrecisionContext | None = None) -> tuple[int, int]:
    """Largest possible ``(n, a)`` when ``(n - a) log alpha < K log n`` and
    ``n - a > n (1 - c) - 1``."""
    ctx = ctx or PrecisionContext(bits)
    la = const_eval("logAlpha", bits)
    c = _c(bits)
    K = _iv(K)

    def no_solution(n: int) -> bool:
        lhs = ((1 - c) * n - 1) * la
        rhs = K * _log_int(n, bits)
        return decide_less(rhs, lhs, ctx)

    N = solve_decreasing_threshold(no_solution, start=3)
    n_max = N - 1
    return n_max, _a_max_for(n_max, bits)


def _a_max_for(n_max: int, bits: int) -> int:
    # a < n c + 1 and a < n
    _, hi = a_window(n_max, bits)
    return min(math.ceil(hi.hi) - 1, n_max - 1)


def lambda1_nonzero(n: int, m: int, l: int, a: int) -> bool:
    """``alpha**n + alpha**m + alpha**l != 2**a sqrt5`` exactly."""
    return alpha_pow(n) + alpha_pow(m) + alpha_pow(l) != SQRT5 * 2 ** a


def lambda2_nonzero(n: int, a: int) -> bool:
    """``2**a != alpha**n / sqrt5`` exactly."""
    return alpha_pow(n) != SQRT5 * 2 ** a


def check_lambda1_nonzero(n_max: int, bits: int = 256) -> bool:
    """``lambda1_nonzero`` for all ``4 <= n <= n_max``, ``m, l <= n`` and every
    ``a`` in the window for ``n``."""
    pw = [alpha_pow(k) for k in range(n_max + 1)]
    for n in range(4, n_max + 1):
        lo, hi = a_range_for_n(n, bits)
        targets = {SQRT5 * 2 ** a for a in range(lo, hi + 1)}
        for m in range(2, n + 1):
            head = pw[n] + pw[m]
            for l in range(2, m + 1):
                if head + pw[l] in targets:
                    return False
    return True


def check_lambda2_nonzero(n_max: int, a_max: int) -> bool:
    targets = {SQRT5 * 2 ** a for a in range(a_max + 1)}
    return not any(alpha_pow(n) in targets for n in range(1, n_max + 1))


def matveev_constants(bits: int = 256) -> dict[str, IntervalReal]:
    """Collapsed Matveev constants for both linear forms (``1 + log n`` is
    replaced by ``2 log n``, valid for ``n >= 3``)."""
    l3 = _log_int(3, bits)
    base = matveev_coefficient(MatveevInput(3, 2, (PRINTED["A1"], PRINTED["A2"], Fraction(1))), bits)
    C1 = base * 2
    C2 = base * 2 * PRINTED["A3_sqrt5"]
    two_sqrt5 = (const_eval("sqrt5", bits) * 2).log(bits)
    Kmin = C2 + two_sqrt5 / l3
    K12 = C1 * (Kmin * 2 + IntervalReal.exact(5) / l3)
    return {"C_lambda1": C1.rounded(bits), "C_lambda2": C2.rounded(bits),
            "C_min": Kmin.rounded(bits), "C_case12": K12.rounded(bits)}


def derive_first_bounds(ctx: PrecisionContext | None = None) -> BoundReport:
    """Three-case analysis giving the first bounds on ``a`` and ``n``.

    Every printed constant of the source argument is checked to dominate the
    constant our arithmetic produces; the reported bounds are the certified
    ones. Where a printed bound does not follow from the printed constants,
    the audit records a ``discrepancy``.
    """
    ctx = ctx or PrecisionContext()
    bits = ctx.bits
    audit: list[AuditEntry] = []
    la = const_eval("logAlpha", bits)
    l2 = const_eval("log2", bits)

    # heights and Matveev parameters
    h2 = log_height_rational(2, 1, bits)
    _check(audit, "A1", "A1 = 1.4 >= max(2 h(2), |log 2|, 0.16)",
           _le(h2 * 2, PRINTED["A1"], ctx), h=h2)
    ha = log_height_named("alpha", bits)
    _check(audit, "A2", "A2 = 0.5 >= max(2 h(alpha), |log alpha|, 0.16)",
           _le(ha * 2, PRINTED["A2"], ctx) and _le(la, PRINTED["A2"], ctx), h=ha)
    hs = log_height_named("sqrt5", bits)
    _check(audit, "A3(sqrt5)", "A3 = 1.7 >= max(2 h(sqrt5), |log sqrt5|, 0.16)",
           _le(hs * 2, PRINTED["A3_sqrt5"], ctx), h=hs)
    _check(audit, "log-collapse", "1 + log n < 2 log n for n >= 3 (log 3 > 1)",
           decide_less(1, _log_int(3, bits), ctx))

    K = matveev_constants(bits)
    for key in ("C_lambda1", "C_lambda2", "C_min", "C_case12"):
        _check(audit, key, f"certified {key} <= printed {PRINTED[key]}",
               _le(K[key], PRINTED[key], ctx), certified=K[key], printed=PRINTED[key])

    # nonvanishing of both linear forms, exact in the field
    _check(audit, "lambda1-nonzero", "alpha^n + alpha^m + alpha^l != 2^a sqrt5, n <= 80",
           check_lambda1_nonzero(80, bits))
    _check(audit, "lambda2-nonzero", "2^a != alpha^n / sqrt5, n, a <= 200",
           check_lambda2_nonzero(200, 200))
    # structural reason for both: conjugation sends sqrt5 to -sqrt5
    _check(audit, "conjugate-sqrt5", "conj(sqrt5) = -sqrt5", qf_conj(SQRT5) == -SQRT5)

    # Cases 1-2
    n12, a12 = case12_threshold(K["C_case12"], bits, ctx)
    n12p, a12p = case12_threshold(PRINTED["C_case12"], bits, ctx)
    _check(audit, "case12", "certified case 1-2 bounds within printed a < 9e28, n < 1.87e29",
           a12 < PRINTED["case12_a"] and n12 < PRINTED["case12_n"], n_max=n12, a_max=a12)
    _check(audit, "case12-replay", "printed constant 6.86e24 implies a < 9e28, n < 1.87e29",
           a12p < PRINTED["case12_a"] and n12p < PRINTED["case12_n"], n_max=n12p, a_max=a12p)

    # Case 3
    n3, a3 = case3_threshold(K["C_min"], bits, ctx)
    n3p, a3p = case3_threshold(PRINTED["C_min"], bits, ctx)
    _check(audit, "case3", "certified case 3 bounds within printed a < 3.84e14, n < 5.53e14",
           a3 < PRINTED["case3_a"] and n3 < PRINTED["case3_n"], n_max=n3, a_max=a3)
    replay_ok = a3p < PRINTED["case3_a"] and n3p < PRINTED["case3_n"]
    audit.append(AuditEntry(
        "case3-replay", "printed constant 2.4e12 implies a < 3.84e14, n < 5.53e14",
        "pass" if replay_ok else "discrepancy", {"n_max": n3p, "a_max": a3p},
        "" if replay_ok else
        "the rounded 2.4e12 only gives the larger bounds shown; the unrounded "
        "constant gives the printed ones, so later stages are unaffected"))

    a_bound, n_bound = max(a12, a3), max(n12, n3)
    _check(audit, "combined", "a < 9e28 and n < 1.87e29 in all cases",
           a_bound < PRINTED["a_bound"] and n_bound < PRINTED["n_bound"],
           a_bound=a_bound, n_bound=n_bound)

    cases = {
        "case12": {"n_max": n12, "a_max": a12, "printed_constant_n_max": n12p,
                   "printed_constant_a_max": a12p},
        "case3": {"n_max": n3, "a_max": a3, "printed_constant_n_max": n3p,
                  "printed_constant_a_max": a3p},
    }
    consts = dict(K)
    consts.update({"logAlpha": la, "log2": l2, "logAlpha/log2": _c(bits)})
    return BoundReport(a_bound, n_bound, "combined", audit, cases, consts)
