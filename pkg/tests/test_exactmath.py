import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aperiodic.exactmath import QuadExact, as_quad, exact_det, rational_kernel_vector

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def q5(a, b=0):
    return QuadExact(a, b, 5)


def test_basic_arithmetic_matches_floats():
    x = q5(Fraction(1, 2), Fraction(1, 2))   # golden ratio
    y = q5(1, -1)
    for expr, ref in [
        (x + y, float(x) + float(y)),
        (x - y, float(x) - float(y)),
        (x * y, float(x) * float(y)),
        (x / y, float(x) / float(y)),
    ]:
        assert math.isclose(float(expr), ref, rel_tol=1e-12)


def test_golden_ratio_identity():
    tau = q5(Fraction(1, 2), Fraction(1, 2))
    assert tau * tau == tau + 1


def test_sign_mixed_components():
    # a > 0 > b with a^2 vs b^2 D on both sides
    assert q5(3, -1).sign() == 1          # 9 > 5
    assert q5(2, -1).sign() == -1         # 4 < 5
    assert q5(-3, 1).sign() == -1
    assert q5(-2, 1).sign() == 1
    assert q5(0, 0).sign() == 0
    assert (q5(Fraction(5, 2)) - q5(0, Fraction(1, 1))).sign() == 1  # 2.5 > sqrt5


def test_comparisons_and_abs():
    assert q5(1, 0) < q5(0, 1)
    assert abs(q5(-1, -1)) == q5(1, 1)
    assert q5(2) <= 2 and q5(2) >= 2


def test_mixed_radicand_rejected():
    with pytest.raises(ValueError):
        q5(1) + QuadExact(1, 0, 2)


def test_float_components_rejected():
    with pytest.raises(TypeError):
        QuadExact(0.5, 0, 5)


@given(a1=rationals, b1=rationals, a2=rationals, b2=rationals)
@settings(max_examples=150, deadline=None)
def test_field_ops_consistent_with_float(a1, b1, a2, b2):
    x, y = q5(a1, b1), q5(a2, b2)
    assert math.isclose(float(x * y), float(x) * float(y),
                        rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(float(x + y), float(x) + float(y),
                        rel_tol=1e-9, abs_tol=1e-9)
    # exact sign agrees with the float sign away from cancellation noise
    if abs(float(x) - float(y)) > 1e-7:
        assert (x < y) == (float(x) < float(y))


@given(a=rationals, b=rationals)
@settings(max_examples=100, deadline=None)
def test_division_roundtrip(a, b):
    x = q5(a, b)
    if x.is_zero():
        return
    assert (x / x) == 1
    assert x * (1 / x) == 1


def test_as_quad_forms():
    assert as_quad("1/2", 5) == q5(Fraction(1, 2))
    assert as_quad(("1/2", "-1/2"), 5) == q5(Fraction(1, 2), Fraction(-1, 2))
    assert as_quad(3, 5) == q5(3)
    with pytest.raises(TypeError):
        as_quad(object(), 5)


def test_exact_det_golden_basis():
    tau = q5(Fraction(1, 2), Fraction(1, 2))
    tau_c = q5(Fraction(1, 2), Fraction(-1, 2))
    one = q5(1)
    det = exact_det([[one, tau], [one, tau_c]])
    assert det == q5(0, -1)            # -sqrt(5)
    assert abs(det) == q5(0, 1)


def test_exact_det_singular():
    one = q5(1)
    assert exact_det([[one, one], [one, one]]).is_zero()


def test_rational_kernel_vector():
    # x + 0*y = 0 has kernel (0, 1)
    vec = rational_kernel_vector([[Fraction(1), Fraction(0)]])
    assert vec is not None and vec[0] == 0 and vec[1] != 0
    # full-rank square system has no kernel
    assert rational_kernel_vector([[Fraction(1), Fraction(0)],
                                   [Fraction(0), Fraction(1)]]) is None
    vec = rational_kernel_vector([[Fraction(1, 2), Fraction(1, 3)]])
    assert vec is not None
    assert Fraction(1, 2) * vec[0] + Fraction(1, 3) * vec[1] == 0
