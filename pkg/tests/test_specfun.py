import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pa_spectra.specfun import (
    gamma_ratio,
    gen_binom_half,
    kummer_m,
    ln_gamma_signed,
    rgamma,
    tricomi_u,
)
from pa_spectra.trap import solve_trap_x

off_pole = st.floats(-30.0, 30.0).filter(lambda x: abs(x - round(x)) > 1e-3 or x > 0.5)


@given(x=off_pole)
def test_gamma_recurrence(x):
    # Gamma(x+1) = x Gamma(x)
    lhs = ln_gamma_signed(x + 1.0)
    rhs = ln_gamma_signed(x)
    assert lhs.sign == rhs.sign * (1 if x > 0 else -1)
    assert lhs.log_magnitude - rhs.log_magnitude == pytest.approx(math.log(abs(x)), abs=1e-12 * max(1.0, abs(lhs.log_magnitude)))


@given(x=st.floats(0.01, 0.99))
def test_gamma_reflection(x):
    # Gamma(x) Gamma(1-x) = pi / sin(pi x)
    prod = ln_gamma_signed(x) * ln_gamma_signed(1.0 - x)
    assert prod.value == pytest.approx(math.pi / math.sin(math.pi * x), rel=1e-12)


def test_gamma_signs_and_poles():
    assert ln_gamma_signed(-0.5).sign == -1
    assert ln_gamma_signed(-1.5).sign == 1
    with pytest.raises(ValueError):
        ln_gamma_signed(-2.0)
    assert rgamma(-3.0) == 0.0
    assert gamma_ratio(5.5, 4.5) == pytest.approx(4.5, rel=1e-14)


@pytest.mark.parametrize("a,b,x", [(0.3, 1.5, 2.0), (-2.7, 1.5, 10.0), (1.2, 0.5, 50.0), (-0.5, 1.5, 0.1)])
def test_kummer_against_mpmath(a, b, x):
    assert kummer_m(a, b, x) == pytest.approx(float(mpmath.hyp1f1(a, b, x)), rel=1e-12)


@pytest.mark.parametrize("a", [0.1, -0.25, -1.7, -3.2, 2.5, -0.999])
@pytest.mark.parametrize("x", [0.01, 0.5, 1.9, 2.1, 8.0, 40.0, 150.0])
def test_tricomi_against_mpmath(a, x):
    ref = float(mpmath.hyperu(a, 1.5, x))
    assert tricomi_u(a, 1.5, x) == pytest.approx(ref, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("n", range(6))
def test_terminating_u_is_exact(n):
    # U(-n, 3/2, x) = (-1)^n (3/2)_n M(-n, 3/2, x), a polynomial of degree n
    x = np.array([0.3, 1.0, 4.0, 25.0])
    poly = sum(
        math.comb(n, k) * math.prod(1.5 + j for j in range(k, n)) * (-x) ** k * (-1) ** n
        for k in range(n + 1)
    )
    got = tricomi_u(-n, 1.5, x)
    assert np.allclose(got, poly, rtol=1e-13, atol=0)


def test_tricomi_domain():
    with pytest.raises(ValueError):
        tricomi_u(0.5, 1.5, 0.0)
    with pytest.raises(ValueError):
        tricomi_u(0.5, 2.0, 1.0)


def test_gen_binom_half_values():
    assert gen_binom_half(0) == 1.0
    assert gen_binom_half(1) == pytest.approx(1.5, rel=1e-15)
    assert gen_binom_half(2) == pytest.approx(1.875, rel=1e-14)
    with pytest.raises(ValueError):
        gen_binom_half(-1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_gen_binom_half_matches_root_slope(n):
    h = 1e-6
    slope = (solve_trap_x(n, h) - solve_trap_x(n, -h)) / (2 * h)
    assert slope == pytest.approx(math.sqrt(2.0 / math.pi) * gen_binom_half(n), abs=1e-4)
