import pytest
from hypothesis import given, settings, strategies as st

from fib3pow2.fibseq import TABLE, FibTable, check_growth_bounds, fib
from fib3pow2.quadfield import SQRT5, alpha_pow


def _recurrence(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_small_values():
    assert fib(10) == 55
    assert fib(2) == 1 and fib(1) == 1 and fib(0) == 0
    assert fib(42) == _recurrence(42) == 267914296


def test_table_matches_recurrence_and_fast_doubling():
    assert all(TABLE[k] == _recurrence(k) for k in range(0, 601, 7))
    assert fib(1000) == _recurrence(1000)


@given(st.integers(0, 500))
def test_binet_in_the_field(n):
    # alpha**n - beta**n = F(n) sqrt5 with beta = -1/alpha
    beta_n = alpha_pow(-n) * (-1) ** n
    assert alpha_pow(n) - beta_n == SQRT5 * fib(n)


@given(st.integers(1, 1000))
def test_cassini(n):
    assert fib(n - 1) * fib(n + 1) - fib(n) ** 2 == (-1) ** n


def test_index_range():
    # values strictly between 10 and 60: 13, 21, 34, 55
    assert list(TABLE.index_range(10, 60, 2, 100)) == [7, 8, 9, 10]
    assert list(TABLE.index_range(0, 2, 2, 100)) == [2]  # F(2) = 1, F(1) excluded by start
    assert list(TABLE.index_range(10, 60, 2, 9)) == [7, 8, 9]  # stop is inclusive


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        fib(-1)


def test_growth_bounds_to_550():
    rep = check_growth_bounds(550)
    assert rep.ok and rep.violation is None


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 120))
def test_growth_bounds_prefixes(n):
    assert check_growth_bounds(n).ok


def test_growth_bounds_at_n2():
    # 0.38 alpha^2 = 0.994... <= 1 <= 1.256... = 0.48 alpha^2
    a2 = float(alpha_pow(2))
    assert 0.38 * a2 <= 1 <= 0.48 * a2
    assert check_growth_bounds(2).ok


def test_table_build_size():
    assert len(FibTable.build(30)) == 31
