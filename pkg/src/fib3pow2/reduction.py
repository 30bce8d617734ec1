"""Dujella-Petho reduction and the two reduction stages.

Stage 1 cuts the Matveev bound on ``a`` down to a bound on the smallest of
``n-m, n-l, n-a``; stage 2 sweeps every pair of gaps and turns each into a
small bound on ``n``. Gap pairs where ``psi`` is exactly ``alpha**r / 2**s``
make the reduction degenerate and are finished with Legendre's criterion.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .contfrac import cf_expand, cf_first_q_exceeding, legendre_lower_bound
from .linforms import PRINTED, AuditEntry, BoundReport, a_window, matveev_constants, solve_decreasing_threshold
from .quadfield import qf_decompose_pow2_alpha, qf_psi
from .realint import (Ambiguous, IntervalReal, PrecisionContext, Undecidable, const_eval,
                      decide_less, dist_nearest_int, mu_log_route)

RETRIES = 10
DEEP_RETRIES = 80  # second attempt for non-special pairs close to a special limit
SEARCH_CAP = 550
STAGE1_M = PRINTED["a_bound"]
PRINTED_GAP = 157
PRINTED_A_AFTER = 393 * 10**13
PRINTED_SPECIAL_N = 112
PRINTED_SPECIAL = frozenset({(0, 3), (1, 1), (1, 5), (3, 0), (3, 4), (4, 3), (5, 1), (7, 8), (8, 7)})

Producer = Callable[[int], IntervalReal]


# -- named reals used as mu, A, B -----------------------------------------

def _named(name: str) -> Producer:
    table = {
        "4sqrt5/logAlpha": lambda b: (const_eval("sqrt5", b) * 4 / const_eval("logAlpha", b)).rounded(b + 16),
        "4/logAlpha": lambda b: (IntervalReal.exact(4) / const_eval("logAlpha", b)).rounded(b + 16),
        "alpha": lambda b: const_eval("alpha", b),
        "sqrt2": lambda b: const_eval("sqrt2", b),
        "mu": lambda b: const_eval("mu", b),
        "gamma": lambda b: const_eval("gamma", b),
        "logSqrt5/logAlpha": lambda b: const_eval("mu", b),
        "log2/logAlpha": lambda b: const_eval("gamma", b),
    }
    if name in table:
        return table[name]
    m = re.fullmatch(r"mu_psi\((\d+),\s*(\d+)\)", name)
    if m:
        t, s = int(m.group(1)), int(m.group(2))
        return lambda b: const_eval("mu_psi", b, t, s)
    try:
        v = Fraction(name)
    except ValueError:
        raise KeyError(f"unknown real {name!r}") from None
    iv = IntervalReal.exact(v)
    return lambda b: iv


def real_expr(name: str) -> Producer:
    """Producer for a named real (``mu``, ``mu_psi(t,s)``, ``4/logAlpha``,
    ``sqrt2``, ...) or a rational literal."""
    return _named(name)


GAMMA_ALIASES = {"gamma": "gamma", "log2/logAlpha": "gamma"}


@dataclass(frozen=True)
class ReductionInstance:
    """Data for ``0 < |u gamma - v + mu| < A B**-w`` with ``u <= M``."""

    gamma: str
    mu: Producer
    A: Producer
    B: Producer
    M: int
    label: str = ""

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be positive")
        bits = 64
        if not self.A(bits).lo > 0:
            raise ValueError("A must be positive")
        if not self.B(bits).lo > 1:
            raise ValueError("B must exceed 1")


@dataclass
class ReductionOutcome:
    convergent_index: int
    q: int
    epsilon: IntervalReal | None
    w_bound: int | None
    failure_reason: str | None = None
    bits: int = 0
    tried: list = field(default_factory=list)
    w_real: IntervalReal | None = None

    @property
    def ok(self) -> bool:
        return self.w_bound is not None

    @property
    def printed_index(self) -> int:
        return self.convergent_index + 1


def _epsilon(inst: ReductionInstance, q: int, bits: int) -> IntervalReal:
    g = const_eval(GAMMA_ALIASES.get(inst.gamma, inst.gamma), bits)
    dg = dist_nearest_int(g * q)
    dm = dist_nearest_int(inst.mu(bits) * q, hull=True)
    return dm - dg * inst.M


def dp_reduce(inst: ReductionInstance, ctx: PrecisionContext | None = None,
              retries: int = RETRIES) -> ReductionOutcome:
    """Apply the reduction lemma with the first convergent ``q > 6M``.

    On success ``w_bound`` is the least integer ``W`` such that no solution
    has ``w >= W``. A certified ``epsilon <= 0`` moves on to the next
    convergent, at most ``retries`` times.
    """
    ctx = ctx or PrecisionContext()
    gname = GAMMA_ALIASES.get(inst.gamma, inst.gamma)
    k0, _, _ = cf_first_q_exceeding(gname, 6 * inst.M, ctx)
    tried = []
    reason = "epsilon_nonpositive"
    last_eps = None
    for k in range(k0, k0 + retries + 1):
        try:
            q = cf_expand(gname, k + 1, ctx).q[k]
        except Undecidable:
            reason = "precision"
            break
        tried.append(k)
        eps = None
        for bits in ctx.schedule():
            try:
                e = _epsilon(inst, q, bits)
            except Ambiguous:
                continue
            if e.lo > 0 or e.hi <= 0:
                eps = e
                break
        if eps is None:
            reason = "precision"
            last_eps = None
            break
        last_eps = eps
        if eps.lo > 0:
            A, B = inst.A(bits), inst.B(bits)
            x = (A * q / eps).log(bits) / B.log(bits)
            W = math.ceil(x.hi)
            return ReductionOutcome(k, q, eps, W, None, bits, tried, x)
    k = tried[-1] if tried else k0
    return ReductionOutcome(k, cf_expand(gname, k + 1, ctx).q[k], last_eps, None, reason, 0, tried)


def lemma_consistent(inst: ReductionInstance, out: ReductionOutcome, bits: int = 256) -> bool:
    """At ``w = w_bound`` the lemma's hypothesis ``A B**-w <= epsilon/q`` holds."""
    if not out.ok:
        return False
    A, B = inst.A(bits), inst.B(bits)
    lhs = A.log(bits) - B.log(bits) * out.w_bound
    rhs = (out.epsilon / out.q).log(bits)
    return lhs.hi <= rhs.lo


# -- stage 1 ---------------------------------------------------------------

def stage1_instance(M: int) -> ReductionInstance:
    return ReductionInstance("gamma", real_expr("mu"), real_expr("4sqrt5/logAlpha"),
                             real_expr("alpha"), M, "stage1")


@dataclass
class Stage1Result:
    M: int
    outcome: ReductionOutcome
    gap_bound: int | None
    n_branch_max: int | None  # largest n allowed by the n - a < gap branch
    a_bound_after: int | None
    n_bound_after: int | None
    replay_a_bound_after: int | None
    audit: list

    @property
    def ok(self) -> bool:
        return self.gap_bound is not None and all(e.verdict != "fail" for e in self.audit)


def _gap_consequence_threshold(C1, gap: int, bits: int, ctx) -> tuple[int, int]:
    """Largest ``(n, a)`` with ``(a/2 - 1) log 2 < C1 log n (5 + 2 gap log alpha)``."""
    la = const_eval("logAlpha", bits)
    l2 = const_eval("log2", bits)
    A3 = 5 + la * (2 * gap)
    K = IntervalReal.coerce(C1) * A3

    def no_solution(n: int) -> bool:
        lo, _ = a_window(n, bits)
        lhs = (lo / 2 - 1) * l2
        rhs = K * IntervalReal.exact(n).log(bits)
        return decide_less(rhs, lhs, ctx)

    N = solve_decreasing_threshold(no_solution, start=3)
    n_max = N - 1
    _, hi = a_window(n_max, bits)
    return n_max, min(math.ceil(hi.hi) - 1, n_max - 1)


def stage1_reduce(first: BoundReport | None = None, M: int | None = None,
                  ctx: PrecisionContext | None = None) -> Stage1Result:
    """Reduce with ``M`` (default: the printed ``9e28``, checked against
    ``first.a_bound``) and derive the follow-up bound on ``a``.

    Returns the gap bound ``W`` (every solution has ``min(n-m, n-l, n-a) < W``)
    and the bound on ``a`` obtained by putting ``n-m, n-l <= W-1`` back into
    the first Matveev inequality.
    """
    ctx = ctx or PrecisionContext()
    bits = ctx.bits
    audit: list[AuditEntry] = []
    M = STAGE1_M if M is None else M
    if first is not None:
        ok = first.a_bound <= M
        audit.append(AuditEntry("M-covers-a", "first-bound a_bound <= M", "pass" if ok else "fail",
                                {"a_bound": first.a_bound, "M": M}))
    inst = stage1_instance(M)
    out = dp_reduce(inst, ctx)
    if not out.ok:
        audit.append(AuditEntry("reduction", "epsilon > 0 for some convergent q > 6M", "fail",
                                {"reason": out.failure_reason, "tried": out.tried}))
        return Stage1Result(M, out, None, None, None, None, None, audit)
    W = out.w_bound
    audit.append(AuditEntry("reduction", "epsilon > 0 with the first convergent q > 6M", "pass",
                            {"index": out.convergent_index, "printed_index": out.printed_index,
                             "q": str(out.q), "epsilon": out.epsilon, "w_real": out.w_real, "W": W}))
    audit.append(AuditEntry("lemma-consistency", "A B^-W <= epsilon / q",
                            "pass" if lemma_consistent(inst, out, bits) else "fail"))
    claim_ok = W <= PRINTED_GAP
    audit.append(AuditEntry("claim-gap", "W <= 157", "pass" if claim_ok else "discrepancy", {"W": W}))

    # branch n - a < W: n (1 - c) - 1 < n - a <= W - 1
    c = const_eval("logAlpha/log2", bits)
    n_branch = math.ceil((IntervalReal.exact(W) / (1 - c)).hi) - 1
    audit.append(AuditEntry("branch-n-a", "n - a < W forces n below the search cap",
                            "pass" if n_branch <= SEARCH_CAP else "fail", {"n_max": n_branch}))
    # n - l < W implies n - m < W since m >= l; the printed argument then
    # bounds both gaps by W - 1 in the first Matveev inequality.
    K = matveev_constants(bits)
    n_after, a_after = _gap_consequence_threshold(K["C_lambda1"], W - 1, bits, ctx)
    _, a_replay = _gap_consequence_threshold(PRINTED["C_lambda1"], W - 1, bits, ctx)
    audit.append(AuditEntry("a-after", "(a/2 - 1) log 2 < C1 log n (5 + 2(W-1) log alpha)", "pass",
                            {"n_max": n_after, "a_max": a_after, "printed_constant_a_max": a_replay}))
    ok = a_after < PRINTED_A_AFTER
    audit.append(AuditEntry(
        "claim-a-after", "a < 3.93e15", "pass" if ok else "discrepancy", {"a_max": a_after},
        "" if ok else "the printed 3.93e15 does not follow from the printed inequality with "
                      "both gaps <= W-1; the larger certified bound is carried forward"))
    return Stage1Result(M, out, W, n_branch, a_after, n_after, a_replay, audit)


# -- stage 2 ---------------------------------------------------------------

@dataclass
class PairResult:
    t: int
    s: int
    special: bool
    decomposition: tuple[int, int] | None
    outcome: ReductionOutcome
    n_max: int | None
    deep: bool = False  # needed the deeper retry budget


def stage2_instance(t: int, s: int, M: int) -> ReductionInstance:
    # mu by plain logarithms, so degeneracy shows up numerically and can be
    # compared with the exact decomposition
    psi = qf_psi(t, s)
    return ReductionInstance("gamma", lambda b: mu_log_route(psi, b), real_expr("4/logAlpha"),
                             real_expr("sqrt2"), M, f"stage2({t},{s})")


def _n_from_a_bound(W: int, bits: int) -> int:
    """Largest ``n`` with ``n c + d - 1 < a <= W - 1``."""
    lo_at_1, _ = a_window(1, bits)  # c + d - 1
    c = const_eval("logAlpha/log2", bits)
    d_minus_1 = lo_at_1 - c
    return math.ceil(((W - 1 - d_minus_1) / c).hi) - 1


def reduce_pair(t: int, s: int, M: int, ctx: PrecisionContext | None = None) -> PairResult:
    ctx = ctx or PrecisionContext()
    dec = qf_decompose_pow2_alpha(qf_psi(t, s))
    inst = stage2_instance(t, s, M)
    out = dp_reduce(inst, ctx)
    deep = False
    if not out.ok and dec is None and out.failure_reason == "epsilon_nonpositive":
        # psi(2, s) -> alpha and psi(6, s) -> alpha**3/2 as s grows, so
        # ||mu q|| stays tiny until q is far past 6M
        out = dp_reduce(inst, ctx, retries=DEEP_RETRIES)
        deep = True
    n_max = _n_from_a_bound(out.w_bound, ctx.bits) if out.ok else None
    return PairResult(t, s, dec is not None, dec, out, n_max, deep)


def _row(args) -> list[PairResult]:
    t, gap_max, M, ctx = args
    return [reduce_pair(t, s, M, ctx) for s in range(t, gap_max + 1)]


@dataclass
class SweepResult:
    gap_max: int
    M: int
    pairs: dict
    special_pairs: list
    numeric_nonpositive: list
    failures: list

    @property
    def n_max(self) -> int:
        return max(p.n_max for p in self.pairs.values() if p.n_max is not None)

    @property
    def matches_expected(self) -> bool:
        grid = {(t, s) for (t, s) in PRINTED_SPECIAL if t <= self.gap_max and s <= self.gap_max}
        return set(self.special_pairs) == grid

    @property
    def ok(self) -> bool:
        return (not self.failures and set(self.special_pairs) == set(self.numeric_nonpositive)
                and self.n_max <= SEARCH_CAP)


def stage2_sweep(gap_max: int, M: int, ctx: PrecisionContext | None = None,
                 jobs: int = 1) -> SweepResult:
    """Reduce every gap pair ``(t, s)`` in ``{0..gap_max}**2``.

    ``psi`` is symmetric, so pairs with ``t <= s`` are computed and mirrored.
    A pair is special when ``psi(t, s) * 2**s' = alpha**r'`` exactly; the
    reduction must then report ``epsilon <= 0``, and for every other pair it
    must succeed.
    """
    ctx = ctx or PrecisionContext()
    work = [(t, gap_max, M, ctx) for t in range(gap_max + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_row, work))
    else:
        rows = [_row(w) for w in work]
    pairs = {}
    for row in rows:
        for p in row:
            pairs[(p.t, p.s)] = p
            if p.t != p.s:
                pairs[(p.s, p.t)] = PairResult(p.s, p.t, p.special, p.decomposition, p.outcome,
                                               p.n_max, p.deep)
    pairs = dict(sorted(pairs.items()))
    special = sorted(k for k, p in pairs.items() if p.special)
    nonpos = sorted(k for k, p in pairs.items()
                    if not p.outcome.ok and p.outcome.failure_reason == "epsilon_nonpositive")
    failures = sorted(k for k, p in pairs.items() if not p.special and not p.outcome.ok)
    return SweepResult(gap_max, M, pairs, special, nonpos, failures)


def deep_pairs(res: SweepResult) -> list:
    return sorted(k for k, p in res.pairs.items() if p.deep)


# -- degenerate pairs ------------------------------------------------------

@dataclass
class SpecialResult:
    t: int
    s: int
    r: int  # psi = alpha**r / 2**s2
    s2: int
    a_M: int
    legendre_N: int
    n_max: int


def special_case_bound(t: int, s: int, M: int, ctx: PrecisionContext | None = None) -> SpecialResult:
    """Bound ``n`` for a degenerate pair via Legendre's criterion.

    With ``psi = alpha**r / 2**s2`` the form is ``|(a - s2) gamma - (n - r)|``,
    bounded below by ``1/((a_M + 2)(a - s2))`` and above by
    ``(4/log alpha) 2**(-a/2)``; ``a`` is traded for ``n`` on both sides.
    """
    ctx = ctx or PrecisionContext()
    bits = ctx.bits
    dec = qf_decompose_pow2_alpha(qf_psi(t, s))
    if dec is None:
        raise ValueError(f"psi({t},{s}) has no exact alpha-power/2-power form")
    r, s2 = dec
    leg = legendre_lower_bound("gamma", M, ctx)
    la = const_eval("logAlpha", bits)
    l2 = const_eval("log2", bits)
    logA = (IntervalReal.exact(4) / la).log(bits)

    def no_solution(n: int) -> bool:
        lo, hi = a_window(n, bits)  # n c + d - 1 < a < n c + 1
        u_max = hi - s2
        rhs = logA + (u_max * (leg.a_M + 2)).log(bits)
        lhs = lo / 2 * l2
        return decide_less(rhs, lhs, ctx)

    N = solve_decreasing_threshold(no_solution, start=max(4, r + 2))
    return SpecialResult(t, s, r, s2, leg.a_M, leg.N, N - 1)


# -- full pipeline ---------------------------------------------------------

SCHEMA = "fib3pow2-certificate/1"
EXPECTED_COUNT = 214
DIGITS = 40


def _int(v: int):
    """JSON-safe integer: large values become decimal strings."""
    return v if abs(v) < 2**53 else str(v)


def _iv(x: IntervalReal | None, digits: int = DIGITS):
    if x is None:
        return None
    lo, hi = x.decimal_bounds(digits)
    return {"value": f"{float(x.mid):.17g}", "lo": lo, "hi": hi}


@dataclass(frozen=True)
class ProofConfig:
    n_max: int = SEARCH_CAP
    bits: int = 256
    bits_max: int = 65536
    expect_count: int = EXPECTED_COUNT
    tighten: bool = False
    m_override: int | None = None  # stage-2 M; must not undercut the derived bound
    table: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.bits > self.bits_max:
            raise ValueError("bits must not exceed bits_max")


@dataclass
class ProofCertificate:
    config: ProofConfig
    stages: list
    commentary: list

    @property
    def verdict(self) -> str:
        return "PASS" if all(s["verdict"] == "pass" for s in self.stages) else "FAIL"

    @property
    def failing_stages(self) -> list:
        return [s["name"] for s in self.stages if s["verdict"] != "pass"]

    def stage(self, name: str) -> dict:
        return next(s for s in self.stages if s["name"] == name)

    def to_dict(self) -> dict:
        c = self.config
        return {
            "schema": SCHEMA,
            "verdict": self.verdict,
            "failing_stages": self.failing_stages,
            "config": {"n_max": c.n_max, "bits": c.bits, "bits_max": c.bits_max,
                       "expect_count": c.expect_count, "tighten": c.tighten,
                       "m_override": None if c.m_override is None else _int(c.m_override)},
            "commentary": self.commentary,
            "stages": self.stages,
        }

    def to_json(self) -> str:
        import json
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=True) + "\n"


def _stage(name, inputs, constants, verdict, refs, results, note=""):
    d = {"name": name, "inputs": inputs, "constants": constants, "verdict": verdict,
         "refs": refs, "results": results}
    if note:
        d["note"] = note
    return d


def _search_stage(cfg: ProofConfig) -> tuple[dict, list]:
    from .search import enumerate_solutions, verify_table
    sols = enumerate_solutions(cfg.n_max, jobs=cfg.jobs)
    diff = verify_table(cfg.table, cfg.n_max, sols)
    count = len(sols)
    ok = count == cfg.expect_count
    res = {
        "count": count,
        "expected_count": cfg.expect_count,
        "max_n": max(s.n for s in sols),
        "max_a": max(s.a for s in sols),
        "solutions": [list(s.astuple()) for s in sols],
        "table": diff.to_dict(),
    }
    note = "" if ok else f"search found {count} solutions, expected {cfg.expect_count}"
    return _stage("search", {"n_max": cfg.n_max}, {}, "pass" if ok else "fail",
                  ["brute-force search"], res, note), sols


def _first_stage(ctx) -> tuple[dict, BoundReport]:
    from .linforms import derive_first_bounds
    rep = derive_first_bounds(ctx)
    d = rep.to_dict(DIGITS)
    consts = d.pop("constants")
    d["a_bound"], d["n_bound"] = _int(rep.a_bound), _int(rep.n_bound)
    for case in d["cases"].values():
        for k, v in case.items():
            case[k] = _int(v)
    d.pop("ok")
    return _stage("first-bound", {}, consts, "pass" if rep.ok else "fail",
                  ["Matveev's theorem", "Binet formula", "growth bounds for F_n"], d), rep


def _stage1_stage(rep: BoundReport, cfg: ProofConfig, ctx) -> tuple[dict, Stage1Result]:
    M = rep.a_bound if cfg.tighten else STAGE1_M
    r = stage1_reduce(rep, M, ctx)
    o = r.outcome
    bits = ctx.bits
    inst = stage1_instance(M)
    consts = {"gamma": _iv(const_eval("gamma", bits)), "mu": _iv(inst.mu(bits)),
              "A": _iv(inst.A(bits)), "B": _iv(inst.B(bits)),
              "C_lambda1": _iv(matveev_constants(bits)["C_lambda1"])}
    res = {
        "convergent_index": o.convergent_index, "printed_index": o.printed_index,
        "tried": o.tried, "q": _int(o.q), "epsilon": _iv(o.epsilon),
        "w_real": _iv(o.w_real), "gap_bound": r.gap_bound,
        "n_branch_max": r.n_branch_max, "a_bound_after": _int(r.a_bound_after) if r.a_bound_after else None,
        "n_bound_after": _int(r.n_bound_after) if r.n_bound_after else None,
        "printed_constant_a_bound_after": _int(r.replay_a_bound_after) if r.replay_a_bound_after else None,
        "audit": [e.to_dict(DIGITS) for e in r.audit],
    }
    inputs = {"gamma": "log2/logAlpha", "mu": "logSqrt5/logAlpha", "A": "4sqrt5/logAlpha",
              "B": "alpha", "M": _int(M), "M_source": "first-bound" if cfg.tighten else "printed",
              "retries": RETRIES}
    return _stage("stage1", inputs, consts, "pass" if r.ok else "fail",
                  ["Dujella-Petho reduction lemma", "Matveev's theorem"], res), r


def _stage2_stage(r1: Stage1Result, cfg: ProofConfig, ctx) -> tuple[dict, SweepResult]:
    M = cfg.m_override if cfg.m_override is not None else r1.a_bound_after
    covers = M >= r1.a_bound_after
    sw = stage2_sweep(r1.gap_bound, M, ctx, jobs=cfg.jobs)
    pairs = []
    for (t, s), p in sw.pairs.items():
        if t > s:
            continue
        o = p.outcome
        pairs.append({
            "t": t, "s": s, "special": p.special,
            "decomposition": list(p.decomposition) if p.decomposition else None,
            "convergent_index": o.convergent_index, "q": _int(o.q),
            "epsilon": None if o.epsilon is None else dict(zip(("lo", "hi"), o.epsilon.decimal_bounds(30))),
            "w_bound": o.w_bound, "failure_reason": o.failure_reason,
            "n_max": p.n_max, "deep": p.deep,
        })
    res = {
        "special_pairs": [list(k) for k in sw.special_pairs],
        "numeric_nonpositive": [list(k) for k in sw.numeric_nonpositive],
        "failures": [list(k) for k in sw.failures],
        "matches_printed_special_set": sw.matches_expected,
        "deep_retry_pairs": len(deep_pairs(sw)),
        "n_max": sw.n_max,
        "M_covers_stage1": covers,
        "pairs": pairs,
    }
    inputs = {"gamma": "log2/logAlpha", "mu": "mu_psi(t,s)", "A": "4/logAlpha", "B": "sqrt2",
              "M": _int(M), "M_source": "override" if cfg.m_override is not None else "stage1",
              "gap_max": r1.gap_bound, "grid": "t, s in 0..gap_max, t <= s mirrored",
              "retries": RETRIES, "deep_retries": DEEP_RETRIES}
    consts = {"4/logAlpha": _iv(real_expr("4/logAlpha")(ctx.bits)),
              "sqrt2": _iv(const_eval("sqrt2", ctx.bits))}
    ok = sw.ok and covers
    return _stage("stage2", inputs, consts, "pass" if ok else "fail",
                  ["Dujella-Petho reduction lemma"], res), sw


def _special_stage(sw: SweepResult, ctx) -> tuple[dict, list]:
    out = [special_case_bound(t, s, sw.M, ctx) for (t, s) in sw.special_pairs]
    leg = legendre_lower_bound("gamma", sw.M, ctx)
    cf = cf_expand("gamma", leg.N + 1, ctx)
    n_max = max((x.n_max for x in out), default=0)
    res = {
        "legendre": {"M": _int(leg.M), "N": leg.N, "printed_N": leg.N + 1, "a_M": leg.a_M,
                     "argmax": leg.argmax, "quotients": list(cf.quotients)},
        "pairs": [{"t": x.t, "s": x.s, "r": x.r, "s2": x.s2, "n_max": x.n_max} for x in out],
        "n_max": n_max,
        "within_printed_112": n_max < PRINTED_SPECIAL_N,
    }
    ok = n_max <= SEARCH_CAP
    return _stage("special", {"M": _int(sw.M)}, {}, "pass" if ok else "fail",
                  ["Legendre criterion", "exact decomposition of psi"], res), out


COMMENTARY = [
    "Every solution with n > search cap is excluded branch by branch; stage bounds "
    "are inclusive upper bounds on the variable named.",
    "Logical gap carried over from the source argument: the first reduction only bounds "
    "min(n-m, n-l, n-a), yet the follow-up bound on a and the sweep assume both n-m and "
    "n-l are below the gap bound. The procedure is followed literally.",
    f"Reduction retry policy: on certified epsilon <= 0 advance up to {RETRIES} further "
    f"convergents; non-special stage-2 pairs that still fail get {DEEP_RETRIES}.",
    "Stage 2 uses the bound on a derived by stage 1 as M (not the printed 3.93e15, which "
    "does not follow from the printed inequality).",
]


def run_full_proof(cfg: ProofConfig | None = None) -> ProofCertificate:
    """Search, first bounds, both reductions and the degenerate pairs.

    The verdict is PASS only if every stage passes, including the search
    returning exactly ``cfg.expect_count`` solutions. A stage that runs out
    of precision fails and ends the pipeline.
    """
    cfg = cfg or ProofConfig()
    ctx = PrecisionContext(cfg.bits, cfg.bits_max)
    stages = []
    commentary = list(COMMENTARY)
    st, _ = _search_stage(cfg)
    stages.append(st)
    steps = [("first-bound", lambda prev: _first_stage(ctx)),
             ("stage1", lambda prev: _stage1_stage(prev, cfg, ctx)),
             ("stage2", lambda prev: _stage2_stage(prev, cfg, ctx)),
             ("special", lambda prev: _special_stage(prev, ctx))]
    prev = None
    for name, step in steps:
        try:
            st, prev = step(prev)
        except (Undecidable, Ambiguous) as e:
            stages.append(_stage(name, {}, {}, "fail", [], {"failure_reason": "precision"}, str(e)))
            break
        stages.append(st)
        if st["verdict"] != "pass" and name != "first-bound":
            break
    else:
        s1 = stages[2]["results"]
        cap = cfg.n_max
        bounds = {"stage1_n_minus_a_branch": s1["n_branch_max"],
                  "stage2_nonspecial": stages[3]["results"]["n_max"],
                  "special": stages[4]["results"]["n_max"]}
        ok = all(v <= cap for v in bounds.values())
        stages.append(_stage("conclusion", {"search_cap": cap}, {}, "pass" if ok else "fail",
                             ["main theorem"], {"branch_n_max": bounds,
                                                "all_below_cap": ok}))
    return ProofCertificate(cfg, stages, commentary)
