import numpy as np
import pytest

from riesz_mellin.quadrature import (Bump, composite_gauss, cutoff, gauss_legendre, radial_cutoff,
                                     smoothstep, smoothstep_derivative)


def test_gauss_exact_for_polynomials():
    x, w = gauss_legendre(8, 0.0, 2.0)
    assert np.sum(w * x ** 15) == pytest.approx(2 ** 16 / 16, rel=1e-14)


def test_composite_gauss_length():
    x, w = composite_gauss(np.array([0.0, 0.5, 3.0]), 6)
    assert len(x) == 12 and np.sum(w) == pytest.approx(3.0)


def test_smoothstep_limits_and_derivative():
    assert smoothstep(0.0) == 0.0 and smoothstep(1.0) == 1.0
    t = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    fd = (smoothstep(t + h) - smoothstep(t - h)) / (2 * h)
    assert np.allclose(fd, smoothstep_derivative(t), atol=1e-7)


def test_cutoff_profile():
    assert cutoff(np.array([0.0, 0.2]))[0] == 1.0
    assert cutoff(np.array([0.25]))[0] == 1.0 and cutoff(np.array([0.75]))[0] == 0.0
    r = np.array([0.0, 0.2, 0.25, 0.5, 0.6])
    assert np.allclose(radial_cutoff(r, 1.0), [1, 1, 1, 0, 0])


def test_bump_support_and_scaling():
    b = Bump(1.5, 0.5, 2.0)
    assert b.support == (1.0, 2.0)
    assert b(np.array([0.9, 2.1])).tolist() == [0.0, 0.0]
    assert b(1.5) == pytest.approx(2.0 * np.exp(-1.0))
    s = b.scaled(2.0)
    assert s(0.75) == pytest.approx(b(1.5))
    assert b.times(3.0)(1.2) == pytest.approx(3 * b(1.2))


def test_random_bump_ranges(rng):
    for _ in range(20):
        b = Bump.random(rng)
        lo, hi = b.support
        assert 0 < lo < hi and 0.5 <= b.amplitude <= 2.0
