"""Acceptance criteria, checked literally.

Each test prints one ``ACCEPTANCE <k>: PASS|FAIL`` line (visible in the
pytest output) before asserting. Criteria 1, 2, 5 and 9 quote numbers that
the exact computation does not reproduce; they fail here by design.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from fib3pow2.checker import check_certificate
from fib3pow2.contfrac import cf_expand, legendre_lower_bound
from fib3pow2.fibseq import check_growth_bounds, fib
from fib3pow2.linforms import PRINTED, derive_first_bounds
from fib3pow2.quadfield import ALPHA, ONE, SQRT5, alpha_pow, qf_decompose_pow2_alpha, qf_psi
from fib3pow2.realint import IntervalReal, PrecisionContext, const_eval
from fib3pow2.reduction import PRINTED_SPECIAL, special_case_bound, stage1_reduce, stage2_sweep
from fib3pow2.search import enumerate_oracle, enumerate_solutions, read_table, shipped_table

NINE = sorted(PRINTED_SPECIAL)


def report(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def search_550():
    t = time.perf_counter()
    sols = enumerate_solutions(550)
    return sols, time.perf_counter() - t


def test_criterion_1_search(capsys, search_550):
    sols, secs = search_550
    found = {s.astuple() for s in sols}
    table = set(read_table(shipped_table()))
    ok = (len(found) == 214 and max(s.n for s in sols) <= 42 and max(s.a for s in sols) <= 28
          and found == table and secs < 10)
    report(capsys, 1, ok, f"count={len(found)} (expected 214), max n={max(s.n for s in sols)}, "
                          f"max a={max(s.a for s in sols)}, table equal={found == table}, {secs:.1f}s")


def test_criterion_2_spot_rows(capsys, search_550):
    found = {s.astuple() for s in search_550[0]}
    rows = ([(42, 29, i, 28) for i in range(2, 23)] + [(23, 19, i, 15) for i in range(2, 12)]
            + [(11, 9, i, 7) for i in range(2, 9)])
    absent = [r for r in rows if r not in found]
    report(capsys, 2, not absent and len(rows) == 38, f"absent: {absent}")


def test_criterion_3_contfrac(capsys):
    a = cf_expand("gamma", 40, PrecisionContext(512))
    b = cf_expand("gamma", 40, PrecisionContext(2048))
    M = 393 * 10**13
    # printed subscripts are one above the 0-based convergent index
    q34, q35 = a.q[33], a.q[34]
    leg = legendre_lower_bound("gamma", M)
    ok = (a.quotients == b.quotients and list(a.quotients[:5]) == [1, 2, 3, 1, 2]
          and q34 < M < q35 and leg.a_M == 134 and leg.argmax == 17)
    report(capsys, 3, ok, f"head={list(a.quotients[:5])}, q34={q34}, q35={q35}, "
                          f"a_M={leg.a_M} at {leg.argmax}")


def test_criterion_4_first_bounds(capsys):
    rep = derive_first_bounds()
    c = rep.constants
    checks = {
        "C_lambda1 <= 1.4e12": c["C_lambda1"].hi <= PRINTED["C_lambda1"],
        "C_lambda2 <= 2.31e12": c["C_lambda2"].hi <= PRINTED["C_lambda2"],
        "C_case12 <= 6.86e24": c["C_case12"].hi <= PRINTED["C_case12"],
        "case3 a <= 3.84e14": rep.cases["case3"]["a_max"] <= PRINTED["case3_a"],
        "case3 n <= 5.53e14": rep.cases["case3"]["n_max"] <= PRINTED["case3_n"],
        "a <= 9e28": rep.a_bound <= PRINTED["a_bound"],
        "n <= 1.87e29": rep.n_bound <= PRINTED["n_bound"],
    }
    bad = [k for k, v in checks.items() if not v]
    report(capsys, 4, not bad, f"a < {rep.a_bound:.4e}, n < {rep.n_bound:.4e} "
                               f"(strictly smaller than printed); failing: {bad}")


def test_criterion_5_stage1(capsys):
    t = time.perf_counter()
    r = stage1_reduce(derive_first_bounds())
    secs = time.perf_counter() - t
    o = r.outcome
    ok = (r.gap_bound is not None and r.gap_bound <= 157 and o.printed_index == 69
          and r.a_bound_after <= 393 * 10**13 and secs < 60)
    report(capsys, 5, ok, f"gap bound={r.gap_bound} at printed index {o.printed_index}; "
                          f"a-bound after={r.a_bound_after:.4e} (printed 3.93e15); {secs:.1f}s")


def test_criterion_6_sweep(capsys, certificate):
    s2 = certificate.stage("stage2")["results"]
    pipeline_ok = s2["special_pairs"] == [list(p) for p in NINE] and not s2["failures"] \
        and s2["n_max"] <= 550
    printed = stage2_sweep(157, 393 * 10**13)
    printed_ok = printed.special_pairs == NINE and printed.ok
    report(capsys, 6, pipeline_ok and printed_ok,
           f"specials={len(s2['special_pairs'])}, max n={s2['n_max']} (derived M), "
           f"max n={printed.n_max} (printed M 3.93e15)")


def test_criterion_7_special_pairs(capsys, stage1):
    exact = (qf_psi(1, 1) == ONE and qf_psi(3, 0) == ONE and qf_psi(4, 3) == ALPHA
             and qf_psi(5, 1) == alpha_pow(2) / 2 and qf_psi(8, 7) == alpha_pow(3) / 2
             and all(qf_decompose_pow2_alpha(qf_psi(*p)) is not None for p in NINE))
    bounds = {M: max(special_case_bound(*p, M).n_max for p in NINE)
              for M in (393 * 10**13, stage1.a_bound_after)}
    ok = exact and all(v <= 112 for v in bounds.values())
    report(capsys, 7, ok, f"exact psi values={exact}, n bounds by M={bounds}")


def test_criterion_8_properties(capsys):
    beta = lambda n: alpha_pow(-n) * (-1) ** n
    results = {
        "binet<=500": all(alpha_pow(n) - beta(n) == SQRT5 * fib(n) for n in range(501)),
        "cassini<=1000": all(fib(n - 1) * fib(n + 1) - fib(n) ** 2 == (-1) ** n
                             for n in range(1, 1001)),
        "growth<=550": check_growth_bounds(550).ok,
    }
    rng = random.Random(7)
    lemma = True
    for _ in range(1000):
        x = IntervalReal.exact(Fraction(rng.randrange(1, 5 * 10**6), 10**6))
        lemma &= (x.exp(96) - 1 - x).lo > 0
        y = IntervalReal.exact(-Fraction(rng.randrange(1, 693000), 10**6))
        e1 = (y.exp(96) - 1).abs()
        lemma &= e1.hi < Fraction(1, 2) and (e1 * 2 - y.abs()).lo > 0
    results["exp-lemma x1000"] = lemma
    mono = True
    for name in ("log2", "logAlpha", "logSqrt5", "gamma", "mu"):
        a, b, c = (const_eval(name, bits) for bits in (96, 192, 384))
        mono &= a.lo <= b.lo <= c.lo <= c.hi <= b.hi <= a.hi
    results["refinement"] = mono
    cf = cf_expand("gamma", 80)
    results["determinant"] = all(cf.p[k] * cf.q[k - 1] - cf.p[k - 1] * cf.q[k] == (-1) ** (k - 1)
                                 for k in range(1, 80))
    results["oracle@100"] = {s.astuple() for s in enumerate_solutions(100)} == enumerate_oracle(100)
    bad = [k for k, v in results.items() if not v]
    report(capsys, 8, not bad, f"suites={sorted(results)}; failing={bad}")


def test_criterion_9_prove(capsys, default_certificate, certificate):
    d = json.loads(default_certificate.to_json())
    rep = check_certificate(d, shipped_table())
    ok = d["verdict"] == "PASS" and rep.ok
    alt = check_certificate(json.loads(certificate.to_json()), shipped_table()).ok
    report(capsys, 9, ok, f"default verdict={d['verdict']} (failing {d['failing_stages']}), "
                          f"checker ok={rep.ok}; with expected count 225: verdict="
                          f"{certificate.verdict}, checker ok={alt}")
