from fractions import Fraction

import mpmath
import pytest

from fib3pow2.quadfield import qf_decompose_pow2_alpha, qf_psi
from fib3pow2.realint import PrecisionContext, Undecidable, const_eval, mu_log_route
from fib3pow2.reduction import (PRINTED_SPECIAL, ReductionInstance, deep_pairs, dp_reduce, lemma_consistent,
                                real_expr, reduce_pair, special_case_bound, stage1_instance,
                                stage2_instance, stage2_sweep)

Q68 = 14385737929335598761951193326873
A_AFTER = 23120543301331557  # certified follow-up bound on a
M_PRINTED = 393 * 10**13


def _eps_oracle(mu, q, M):
    with mpmath.workdps(120):
        phi = (1 + mpmath.sqrt(5)) / 2
        g = mpmath.log(2) / mpmath.log(phi)
        d = lambda x: abs(x - mpmath.nint(x))
        return d(mu(mpmath.log(phi)) * q) - M * d(g * q)


def test_stage1_instance():
    out = dp_reduce(stage1_instance(9 * 10**28))
    assert out.ok and out.convergent_index == 68 and out.printed_index == 69 and out.q == Q68
    assert out.w_bound == 157
    eps = _eps_oracle(lambda la: mpmath.log(mpmath.sqrt(5)) / la, Q68, 9 * 10**28)
    with mpmath.workdps(120):
        lo = mpmath.mpf(out.epsilon.lo.numerator) / out.epsilon.lo.denominator
        hi = mpmath.mpf(out.epsilon.hi.numerator) / out.epsilon.hi.denominator
        assert lo - mpmath.mpf(10) ** -60 <= eps <= hi + mpmath.mpf(10) ** -60
    assert lemma_consistent(stage1_instance(9 * 10**28), out)


def test_small_and_large_M():
    assert dp_reduce(stage1_instance(10)).w_bound == 18
    assert dp_reduce(stage1_instance(1)).w_bound == 14
    base = dp_reduce(stage1_instance(9 * 10**28))
    big = dp_reduce(stage1_instance(10**30))  # same convergent, smaller epsilon
    assert big.convergent_index == 68 and big.w_bound == 157
    assert big.w_real.lo > base.w_real.hi
    assert dp_reduce(stage1_instance(10**31)).w_bound == 163


@pytest.mark.parametrize("inst", [stage1_instance, lambda M: stage2_instance(2, 2, M),
                                  lambda M: stage2_instance(10, 20, M)])
def test_monotone_in_M(inst):
    ws = [dp_reduce(inst(M)).w_bound for M in (1, 10, 10**4, 10**10, 10**16, 10**25)]
    assert ws == sorted(ws)


def test_mu_zero_fails():
    inst = ReductionInstance("gamma", real_expr("0"), real_expr("4sqrt5/logAlpha"),
                             real_expr("alpha"), 10**6)
    out = dp_reduce(inst)
    assert not out.ok and out.failure_reason == "epsilon_nonpositive"
    assert len(out.tried) == 11 and out.epsilon.hi < 0


def test_precision_failure():
    out = dp_reduce(stage1_instance(9 * 10**28), PrecisionContext(200, 200))
    assert out.ok  # 200 bits suffice
    with pytest.raises(Undecidable):
        dp_reduce(stage1_instance(9 * 10**28), PrecisionContext(128, 128))


def test_instance_validation():
    for A, B, M in (("0", "alpha", 5), ("4/logAlpha", "1", 5), ("4/logAlpha", "alpha", 0)):
        with pytest.raises(ValueError):
            ReductionInstance("gamma", real_expr("mu"), real_expr(A), real_expr(B), M)
    with pytest.raises(KeyError):
        real_expr("pi")


def test_stage1(stage1):
    assert stage1.ok and stage1.gap_bound == 157
    assert stage1.n_branch_max == 513
    assert stage1.a_bound_after == A_AFTER
    verdicts = {e.name: e.verdict for e in stage1.audit}
    assert verdicts["claim-gap"] == "pass" and verdicts["claim-a-after"] == "discrepancy"


def test_pair_2_2():
    p = reduce_pair(2, 2, A_AFTER)
    assert not p.special and p.outcome.ok and p.n_max <= 550


def test_near_degenerate_pairs_need_deep_retry():
    p = reduce_pair(2, 140, A_AFTER)
    assert p.deep and p.outcome.ok and p.n_max <= 550
    with mpmath.workdps(60):
        phi = (1 + mpmath.sqrt(5)) / 2
        assert abs(mpmath.sqrt(5) / (1 + phi ** -2 + phi ** -140) - phi) < mpmath.mpf(10) ** -28


@pytest.mark.parametrize("ts", sorted(PRINTED_SPECIAL))
def test_special_pairs_numeric_and_exact(ts):
    dec = qf_decompose_pow2_alpha(qf_psi(*ts))
    assert dec is not None
    out = dp_reduce(stage2_instance(*ts, M_PRINTED))
    assert out.failure_reason == "epsilon_nonpositive" and out.epsilon.hi <= 0
    # log(psi)/log(alpha) = r - s' gamma, so the form rewrites exactly
    r, s2 = dec
    lr = mu_log_route(qf_psi(*ts), 256)
    assert (lr - (r - const_eval("gamma", 256) * s2)).abs().hi < Fraction(1, 2**200)


def test_psi_values():
    assert qf_decompose_pow2_alpha(qf_psi(4, 3)) == (1, 0)
    assert qf_decompose_pow2_alpha(qf_psi(8, 7)) == (3, 1)
    assert qf_decompose_pow2_alpha(qf_psi(5, 1)) == (2, 1)


@pytest.mark.parametrize("ts", sorted(PRINTED_SPECIAL))
@pytest.mark.parametrize("M", [M_PRINTED, A_AFTER])
def test_special_case_bound(ts, M):
    res = special_case_bound(*ts, M)
    assert res.n_max < 112
    assert res.a_M == 134


def test_special_case_bound_rejects_regular_pair():
    with pytest.raises(ValueError):
        special_case_bound(2, 2, M_PRINTED)


def test_small_sweep():
    sw = stage2_sweep(12, A_AFTER)
    assert sw.special_pairs == sorted(PRINTED_SPECIAL)
    assert sw.numeric_nonpositive == sw.special_pairs
    assert sw.ok and sw.matches_expected and not deep_pairs(sw)
    assert sw.pairs[(3, 7)].outcome.w_bound == sw.pairs[(7, 3)].outcome.w_bound


@pytest.mark.slow
def test_full_sweep_printed_M():
    sw = stage2_sweep(157, M_PRINTED)
    assert sw.ok and sw.special_pairs == sorted(PRINTED_SPECIAL)
    assert sw.n_max <= 550
