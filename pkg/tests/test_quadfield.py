from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fib3pow2.quadfield import (ALPHA, BETA, ONE, SQRT5, ZERO, QuadElement, alpha_pow, qf_conj,
                                qf_decompose_pow2_alpha, qf_make, qf_mul, qf_pow, qf_psi)

rationals = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)
elements = st.builds(QuadElement, rationals, rationals)


def test_constructors():
    assert qf_make(0, 1) == ALPHA
    assert qf_make(-1, 2) == SQRT5
    assert qf_make(1, -1) == BETA
    assert qf_make(Fraction(2, 4), 0) == qf_make(Fraction(1, 2), 0)


def test_products():
    assert qf_mul(ALPHA, ALPHA) == qf_make(1, 1)
    assert qf_mul(ALPHA, BETA) == qf_make(-1, 0)
    assert qf_mul(SQRT5, SQRT5) == qf_make(5, 0)


def test_conjugation():
    assert qf_conj(ALPHA) == BETA
    assert qf_conj(SQRT5) == -SQRT5
    assert qf_conj(qf_make(Fraction(3, 7), 0)) == qf_make(Fraction(3, 7), 0)


def test_alpha_powers():
    assert alpha_pow(10) == qf_make(34, 55)
    assert alpha_pow(0) == ONE
    assert alpha_pow(-1) == qf_make(-1, 1)
    assert qf_pow(ALPHA, -7) * alpha_pow(7) == ONE


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        qf_pow(ZERO, -1)


@given(elements)
def test_conj_involution_and_rational_norm(e):
    assert qf_conj(qf_conj(e)) == e
    prod = e * qf_conj(e)
    assert prod.y == 0 and prod.x == e.norm()


@given(elements, elements)
def test_norm_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()


@given(st.integers(-300, 300), st.integers(-300, 300))
def test_alpha_pow_homomorphism(i, j):
    assert alpha_pow(i) * alpha_pow(j) == alpha_pow(i + j)


def test_psi_table():
    assert qf_psi(1, 1) == ONE
    assert qf_psi(3, 0) == ONE
    assert qf_psi(4, 3) == ALPHA
    assert qf_psi(5, 1) == alpha_pow(2) / 2
    assert qf_psi(8, 7) == alpha_pow(3) / 2
    assert qf_psi(2, 5) == qf_psi(5, 2)
    with pytest.raises(ValueError):
        qf_psi(-1, 0)


@pytest.mark.parametrize("ts, rs", [((1, 1), (0, 0)), ((3, 0), (0, 0)), ((0, 3), (0, 0)),
                                    ((4, 3), (1, 0)), ((3, 4), (1, 0)), ((5, 1), (2, 1)),
                                    ((1, 5), (2, 1)), ((8, 7), (3, 1)), ((7, 8), (3, 1)),
                                    ((2, 1), None), ((0, 0), None)])
def test_decompose(ts, rs):
    assert qf_decompose_pow2_alpha(qf_psi(*ts), 20, 20) == rs


def test_decomposition_scan_agrees_with_search_over_radii():
    for t in range(12):
        for s in range(12):
            e = qf_psi(t, s)
            brute = [(r, k) for r in range(-20, 21) for k in range(-20, 21)
                     if e * Fraction(2) ** k == alpha_pow(r)]
            assert qf_decompose_pow2_alpha(e, 20, 20) == (brute[0] if brute else None)


def test_exact_sign_and_order():
    assert SQRT5 > 2 and SQRT5 < Fraction(9, 4)
    assert (ALPHA - Fraction(1618, 1000)).sign() == 1
    assert (BETA + Fraction(618, 1000)).sign() == -1
    assert float(ALPHA) == pytest.approx(1.6180339887)
