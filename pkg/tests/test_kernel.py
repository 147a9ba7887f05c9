import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_mellin.errors import DomainError
from riesz_mellin.kernel import (exact_series_coefficients, gegenbauer_coefficients, kernel_eval,
                                 kernel_log, pole_decomposition, series_coefficients)

angles = st.floats(0.05, np.pi - 0.05)


def test_right_angle_closed_form():
    # at alpha = pi/2 the kernel is tau^(1/4) / sqrt(1 + tau)
    assert kernel_eval(np.pi / 2, 1.0) == pytest.approx(2 ** -0.5, rel=1e-15)
    for tau in [1e-3, 0.3, 7.0, 1e4]:
        assert kernel_eval(np.pi / 2, tau) == pytest.approx(tau ** 0.25 / np.sqrt(1 + tau), rel=1e-13)


def test_quarter_angle_at_one():
    assert kernel_eval(np.pi / 4, 1.0) == pytest.approx(2 ** -0.25, rel=1e-15)


@pytest.mark.parametrize("alpha, tau", [(0.0, 1.0), (np.pi, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_domain_errors(alpha, tau):
    with pytest.raises(DomainError):
        kernel_eval(alpha, tau)


@given(angles, st.floats(-8, 8))
def test_inversion_symmetry(alpha, t):
    tau = np.exp(t)
    assert kernel_eval(alpha, tau) == pytest.approx(kernel_eval(alpha, 1 / tau), rel=1e-13)


@given(angles, st.floats(0.01, 100.0), st.floats(0.01, 100.0))
@settings(max_examples=200)
def test_distance_factorization(theta, s, t):
    # points s e_+ and t e_- on rays at angle 2 theta
    d = np.sqrt(s * s + t * t - 2 * s * t * np.cos(2 * theta))
    assert d ** -0.5 == pytest.approx(kernel_eval(theta, s / t) * (s * t) ** -0.25, rel=1e-12)


def test_log_form_matches():
    t = np.linspace(-5, 5, 11)
    assert np.allclose(kernel_log(0.7, t), [kernel_eval(0.7, np.exp(x)) for x in t], rtol=1e-14)


def test_right_angle_coefficients():
    # cos(pi) = -1: C_n^(1/4)(-1) = (-1)^n (1/2)_n / n!
    c = series_coefficients(np.pi / 2, 6).coefficients
    ref = [(-1) ** n * float(mpmath.rf(0.5, n) / mpmath.factorial(n)) for n in range(6)]
    assert np.allclose(c, ref, rtol=1e-14)


def test_quarter_angle_coefficients():
    assert np.allclose(series_coefficients(np.pi / 4, 4).coefficients, [1.0, 0.0, -0.25, 0.0], atol=1e-15)


@given(angles)
@settings(max_examples=30)
def test_coefficients_bounded_and_exact(alpha):
    c = gegenbauer_coefficients(alpha, 40)
    assert np.all(np.abs(c) <= 1.0 + 1e-14)
    exact = np.array([float(x) for x in exact_series_coefficients(alpha, 12)])
    assert np.allclose(c[:12], exact, rtol=1e-12, atol=1e-14)


def test_series_against_kernel():
    ser = series_coefficients(1.1, 30)
    tau = np.array([0.01, 0.05, 0.1, 0.2])
    exact = np.array([kernel_eval(1.1, x) for x in tau])
    assert np.all(np.abs(ser.partial_sum(tau) - exact) <= ser.tail_bound(tau) + 1e-15)


@pytest.mark.parametrize("alpha", [np.pi / 6, np.pi / 3, 2.5])
def test_pole_decomposition_identity(alpha):
    pd = pole_decomposition(alpha, 3)
    tau = np.exp(np.linspace(-6, 6, 41))
    exact = np.array([kernel_eval(alpha, x) for x in tau])
    total = pd.head(tau) + pd.head(1 / tau) + pd.remainder(tau)
    assert np.max(np.abs(total - exact) / exact) < 1e-13


def test_remainder_small_near_zero():
    pd = pole_decomposition(0.8, 3)
    tau = np.array([1e-4, 1e-3])
    assert np.all(np.abs(pd.remainder(tau)) < 10 * tau ** 3.25)


def test_series_csv_export(tmp_path):
    s = series_coefficients(np.pi / 3, 5)
    s.to_csv(tmp_path / "k.csv")
    rows = (tmp_path / "k.csv").read_text().splitlines()
    assert rows[0] == "q,coefficient"
    got = np.array([float(r.split(",")[1]) for r in rows[1:]])
    assert np.array_equal(got, s.coefficients)
