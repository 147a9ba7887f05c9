import numpy as np
import pytest
import scipy.integrate as si
from hypothesis import given, settings, strategies as st

from riesz_mellin.errors import HardyWeightError
from riesz_mellin.mellin import GridFunction
from riesz_mellin.quadrature import Bump
from riesz_mellin.sobolev import (continuity_modulus_estimate, dual_norm, geometric_nodes, gram_matrices,
                                  halfline_space, interval_space, l2_norm, mass_matrix,
                                  mellin_half_seminorm, mellin_slobodeckii_sq, polygon_space,
                                  slobodeckii_matrix, slobodeckii_seminorm, tilde_half_norm)
from riesz_mellin.geometry import build_boundary


def _hat_norm(center, h, backend=None):
    x = np.linspace(center - 4 * h, center + 4 * h, 9)
    sp = interval_space(x, whole_line=True)
    v = np.zeros(sp.n_dofs)
    v[3] = 1.0  # node 4, the center
    return slobodeckii_seminorm(v, sp, backend)


def test_hat_position_and_scale_invariant(backend):
    ref = _hat_norm(0.0, 0.1, backend)
    assert _hat_norm(3.7, 0.1, backend) == pytest.approx(ref, rel=1e-8)
    assert _hat_norm(0.0, 0.05, backend) == pytest.approx(ref, rel=1e-10)
    # closed form for the hat on the real line
    assert ref ** 2 == pytest.approx(8 * np.log(2.0), rel=1e-8)


def test_linear_function_on_interval():
    sp = interval_space(np.linspace(0, 1, 9))
    assert slobodeckii_seminorm(sp.interpolate(lambda p: p[..., 0]), sp) == pytest.approx(1.0, rel=1e-8)
    assert slobodeckii_seminorm(lambda p: p[..., 0], sp) == pytest.approx(1.0, rel=1e-8)


def test_constant_on_closed_boundary_is_zero():
    sp = polygon_space(build_boundary([[0, 0], [1, 0], [1, 1], [0, 1]]), 32)
    assert slobodeckii_seminorm(np.ones(sp.n_dofs), sp) < 1e-7


def test_mass_row_sums():
    sp = interval_space(np.linspace(0, 1, 9))
    rows = mass_matrix(sp).sum(axis=1)
    h = 1 / 8
    assert np.allclose(rows, [h / 2] + [h] * 7 + [h / 2])


def test_gram_properties(backend):
    sp = halfline_space(geometric_nodes(1e-2, 10.0, 8))
    G = gram_matrices(sp, "tilde", backend)
    for X in (G.M, G.S, G.S_tilde):
        assert np.max(np.abs(X - X.T)) < 1e-14 * np.abs(X).max()
        np.linalg.cholesky(X)
    assert np.linalg.eigvalsh(G.S - G.M).min() > -1e-10


def test_single_hat_consistency():
    sp = interval_space(np.linspace(0, 1, 9), whole_line=True)
    G = gram_matrices(sp)
    v = np.zeros(sp.n_dofs)
    v[3] = 1.0
    direct = slobodeckii_seminorm(v, sp) ** 2 + l2_norm(v, sp) ** 2
    assert G.S[3, 3] == pytest.approx(direct, rel=1e-12)


def test_tilde_against_independent_oracle():
    b = Bump(0.75, 0.25, 1.0)
    sp = halfline_space(geometric_nodes(1e-3, 4.0, 400))
    f = lambda p: b(p[..., 0])
    got = tilde_half_norm(f, sp)
    slob = mellin_slobodeckii_sq(GridFunction.from_bump(b))
    hardy = si.quad(lambda x: b(x) ** 2 / x, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
    l2 = si.quad(lambda x: b(x) ** 2, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
    assert got == pytest.approx(np.sqrt(slob + 2 * hardy + l2), rel=1e-6)


def test_tilde_hardy_bound():
    b = Bump(1.5, 0.5, 1.0)
    sp = halfline_space(geometric_nodes(1e-2, 4.0, 100))
    v = sp.interpolate(lambda p: b(p[..., 0]))
    from riesz_mellin.sobolev import hardy_integral
    assert hardy_integral(v, sp) <= l2_norm(v, sp) ** 2


def test_hardy_error_at_origin():
    sp = halfline_space(np.linspace(0, 1, 5), dof_at_origin=True)
    v = np.zeros(sp.n_dofs)
    v[0] = 1.0
    with pytest.raises(HardyWeightError):
        tilde_half_norm(v, sp)
    with pytest.raises(HardyWeightError):
        gram_matrices(sp, "tilde")


def test_norm_monotonicity(rng):
    sp = halfline_space(geometric_nodes(1e-2, 10.0, 10))
    G = gram_matrices(sp, "tilde")
    for _ in range(10):
        v = rng.standard_normal(sp.n_dofs)
        assert v @ G.S @ v <= v @ G.S_tilde @ v


def test_mellin_half_seminorm_zero_and_scaling():
    b = Bump(1.5, 0.5, 1.0)
    assert mellin_half_seminorm(GridFunction.from_bump(b.times(0.0))) == 0.0
    a = mellin_half_seminorm(GridFunction.from_bump(b))
    assert mellin_half_seminorm(GridFunction.from_bump(b.scaled(2.0))) == pytest.approx(a, rel=1e-9)


def test_slobodeckii_mellin_multiplier_matches_quadrature():
    b = Bump(1.2, 0.4, 1.0)
    sp = halfline_space(geometric_nodes(1e-3, 8.0, 400))
    quad = slobodeckii_seminorm(lambda p: b(p[..., 0]), sp) ** 2
    assert quad == pytest.approx(mellin_slobodeckii_sq(GridFunction.from_bump(b)), rel=1e-6)


def test_estimator_cases():
    M = np.eye(3)
    assert continuity_modulus_estimate(M, M, M) == pytest.approx(1.0)
    assert continuity_modulus_estimate(np.zeros((3, 3)), M, M) == 0.0
    # M = I, S = diag(1, 4), A = I: the largest eigenvalue of S is 4
    assert continuity_modulus_estimate(np.eye(2), np.eye(2), np.diag([1.0, 4.0])) == pytest.approx(2.0)


def test_estimator_needs_spd():
    with pytest.raises(np.linalg.LinAlgError):
        continuity_modulus_estimate(np.eye(2), np.eye(2), np.diag([1.0, -1.0]))


def test_dual_norm_cauchy_schwarz(rng):
    sp = interval_space(np.linspace(0, 1, 17), whole_line=True)
    G = gram_matrices(sp)
    for _ in range(10):
        v = rng.standard_normal(sp.n_dofs)
        assert dual_norm(v, G.M, G.S) * np.sqrt(v @ G.S @ v) >= v @ G.M @ v * (1 - 1e-12)
