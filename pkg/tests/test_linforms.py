from fractions import Fraction

import pytest

from fib3pow2.linforms import (PRINTED, MatveevInput, a_range_for_n, case3_threshold, check_lambda1_nonzero,
                               derive_first_bounds, height_gamma3_upper, lambda1_nonzero,
                               lambda2_nonzero, log_height, log_height_named, log_height_rational,
                               matveev_coefficient, matveev_constants, solve_decreasing_threshold)
from fib3pow2.realint import IntervalReal, const_eval

# certified values (frozen from an independent mpmath evaluation)
C1 = Fraction("1357637886548.294114938388")
A_BOUND = 80999492091798649457149159816
N_BOUND = 116673295722239764172547702074


@pytest.fixture(scope="module")
def report():
    return derive_first_bounds()


def test_matveev_input_validation():
    with pytest.raises(ValueError):
        MatveevInput(2, 1, (1,))
    with pytest.raises(ValueError):
        MatveevInput(1, 1, (Fraction(1, 10),))
    with pytest.raises(ValueError):
        MatveevInput(0, 1, ())


def test_matveev_coefficient_t1():
    # 1.4 * 30^4 * 1 * 1 * (1 + 0) * 1
    c = matveev_coefficient(MatveevInput(1, 1, (1,)))
    assert c.contains(Fraction(14, 10) * 30 ** 4)


def test_heights():
    assert log_height_rational(2, 1).contains(const_eval("log2", 256).mid)
    with pytest.raises(ValueError):
        log_height_rational(2, 4)
    ha = log_height_named("alpha")
    general = log_height(1, [const_eval("alpha", 256), IntervalReal.exact(1) - const_eval("alpha", 256)])
    assert (ha - general).abs().hi < Fraction(1, 10**50)
    h, A3 = height_gamma3_upper(0, 0)
    assert float(h) == pytest.approx(2.1910133, rel=1e-7)  # log(4 sqrt5)
    assert A3.contains(5)


def test_constants(report):
    K = matveev_constants()
    assert abs(K["C_lambda1"].mid - C1) < Fraction(1, 10**12)
    for key in ("C_lambda1", "C_lambda2", "C_min", "C_case12"):
        assert K[key].hi <= PRINTED[key]


def test_a_window():
    assert a_range_for_n(4) == (1, 3)
    assert a_range_for_n(11) == (6, 8)
    assert a_range_for_n(42) == (27, 30)
    with pytest.raises(ValueError):
        a_range_for_n(3)


def test_nonvanishing():
    assert check_lambda1_nonzero(60)
    assert lambda1_nonzero(10, 5, 3, 7)
    assert lambda2_nonzero(5, 2)


def test_threshold_search():
    assert solve_decreasing_threshold(lambda n: n >= 1000) == 1000
    assert solve_decreasing_threshold(lambda n: True, start=7) == 7
    with pytest.raises(ValueError):
        solve_decreasing_threshold(lambda n: False, limit=10**6)


def test_first_bounds(report):
    assert report.ok
    assert (report.a_bound, report.n_bound) == (A_BOUND, N_BOUND)
    assert report.a_bound < PRINTED["a_bound"] and report.n_bound < PRINTED["n_bound"]
    verdicts = {e.name: e.verdict for e in report.audit}
    assert verdicts["case3-replay"] == "discrepancy"
    assert all(v == "pass" for k, v in verdicts.items() if k != "case3-replay")


def test_case3_replay_numbers():
    n, a = case3_threshold(PRINTED["C_min"])
    assert n > PRINTED["case3_n"]  # 5.5374e14: the rounded constant overshoots
    n2, a2 = case3_threshold(matveev_constants()["C_min"])
    assert n2 < PRINTED["case3_n"] and a2 < PRINTED["case3_a"]
