import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from riesz_mellin.gamma import gamma, log_gamma, right_angle_symbol, right_angle_symbol_logabs


@given(st.floats(-4.7, 6), st.floats(-40, 40))
def test_gamma_against_mpmath(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-3 and round(x) <= 0:
        return
    ref = complex(mpmath.gamma(z))
    assert abs(gamma(z) - ref) <= 1e-12 * abs(ref)


def test_log_gamma_large_imaginary():
    z = complex(0.3, 500.0)
    ref = complex(mpmath.loggamma(z))
    assert abs(np.exp(log_gamma(z) - ref) - 1) < 1e-12


def test_right_angle_symbol_at_zero():
    assert right_angle_symbol(0.0) == pytest.approx(float(mpmath.gamma(0.25) ** 2 / mpmath.sqrt(mpmath.pi)), rel=1e-14)


def test_logabs_consistent():
    lam = complex(0.1, 30.0)
    assert right_angle_symbol_logabs(lam) == pytest.approx(np.log(abs(right_angle_symbol(lam))), rel=1e-12)
