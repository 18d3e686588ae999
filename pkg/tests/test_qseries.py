from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from eigenlab.qseries import ApproxValue, poch_finite, poch_infinite, truncation_index

mpmath.mp.dps = 40


def mp_poch_inf(q):
    # (1/q; 1/q)_inf = prod_{i>=1} (1 - q^-i)
    return mpmath.qp(mpmath.mpf(1) / q, mpmath.mpf(1) / q)


def test_finite_products_exact():
    assert poch_finite(2, 0) == 1
    assert poch_finite(2, 1) == Fraction(1, 2)
    assert poch_finite(2, 3) == Fraction(1, 2) * Fraction(3, 4) * Fraction(7, 8)
    assert poch_finite(4, 1) == Fraction(3, 4)


def test_finite_rejects_bad_input():
    with pytest.raises(ValueError):
        poch_finite(2, -1)
    with pytest.raises(ValueError):
        poch_finite(1, 3)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9, 25])
@pytest.mark.parametrize("eps", [1e-6, 1e-12])
def test_infinite_bracket_contains_reference(q, eps):
    v = poch_infinite(q, eps)
    ref = mp_poch_inf(q)
    assert abs(mpmath.mpf(v.value) - ref) <= v.err
    assert v.err <= eps


def test_known_values():
    assert poch_infinite(2).contains(0.2887880950866024)
    assert abs(float(poch_infinite(2).value) - 0.288788) < 1e-6
    assert abs(float(1 / poch_infinite(2).value) - 3.462746) < 1e-6


def test_truncation_index_grows_with_precision():
    assert truncation_index(2, 1e-3) < truncation_index(2, 1e-9)


def test_bad_eps():
    with pytest.raises(ValueError):
        poch_infinite(2, 0.0)


def test_exact_arithmetic_stays_exact():
    a = ApproxValue(Fraction(1, 3))
    b = a * 3 - Fraction(1, 2)
    assert b.exact and b.value == Fraction(1, 2)
    assert (a / a).value == 1


def test_error_rejected():
    with pytest.raises(ValueError):
        ApproxValue(1.0, -1e-3)
    with pytest.raises(ZeroDivisionError):
        ApproxValue(1.0) / ApproxValue(0.0, 1e-3)


finite = st.floats(-100, 100, allow_nan=False)
errs = st.floats(0, 1e-3)


@given(finite, errs, finite, errs, st.floats(-1, 1), st.floats(-1, 1),
       st.sampled_from(["+", "-", "*", "/"]))
def test_interval_arithmetic_is_sound(x, ex, y, ey, tx, ty, op):
    a, b = ApproxValue(x, ex), ApproxValue(y, ey)
    # any point inside both intervals maps into the result interval
    xs = mpmath.mpf(x) + mpmath.mpf(tx) * ex
    ys = mpmath.mpf(y) + mpmath.mpf(ty) * ey
    if op == "/" and abs(y) <= ey + 1e-9:
        return
    r = {"+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b, "/": lambda: a / b}[op]()
    exact = {"+": xs + ys, "-": xs - ys, "*": xs * ys, "/": xs / ys if ys else None}[op]
    assert abs(exact - mpmath.mpf(r.value)) <= r.err
