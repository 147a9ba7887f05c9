import numpy as np
import pytest

from riesz_mellin.errors import AssemblyError, GridError, SupportError
from riesz_mellin.geometry import build_boundary, build_cover
from riesz_mellin.mellin import GridFunction, LogGrid, weighted_norm
from riesz_mellin.quadrature import Bump, radial_cutoff
from riesz_mellin.riesz import (apply_corner_difference, assemble_riesz, corner_continuity_ratio,
                                corner_form_direct, corner_identity_check, difference_ratio,
                                localized_form, localized_forms, relative_l2_difference,
                                theta_inverse, theta_map, theta_norm_ratio)
from riesz_mellin.sobolev import BoundaryFESpace, interval_space, polygon_space

L_SHAPE = [[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]]


def test_theta_map_round_trip():
    g = LogGrid.from_r(0.5, 3.0, 51)
    p = GridFunction.from_callable(Bump(1.5, 0.5, 1.0), g)
    q = GridFunction.from_callable(Bump(1.2, 0.3, 2.0), g)
    u = theta_map(p, q, None)
    assert np.allclose(u.plus.values, (p.values + q.values) / np.sqrt(2))
    pp, qq = theta_inverse(u)
    assert np.allclose(pp.values, p.values) and np.allclose(qq.values, q.values)


def test_theta_map_grid_mismatch():
    p = GridFunction(LogGrid.from_r(0.5, 3.0, 51), np.zeros(51))
    q = GridFunction(LogGrid.from_r(0.5, 3.0, 52), np.zeros(52))
    with pytest.raises(GridError):
        theta_map(p, q, None)


def test_corner_form_positive():
    b = Bump(1.5, 0.5, 1.0)
    assert corner_form_direct(np.pi / 2, 1, b, b) > 0


def test_corner_form_needs_compact_support():
    with pytest.raises(SupportError):
        corner_form_direct(1.0, 1, Bump(0.5, 0.5, 1.0), Bump(1.0, 0.5, 1.0))


def test_sign_difference_identity(rng):
    for _ in range(5):
        theta = rng.uniform(0.1, 3.0)
        p, q = Bump.random(rng), Bump.random(rng)
        plus = corner_form_direct(np.pi / 2, 1, p, q) - corner_form_direct(theta, 1, p, q)
        minus = corner_form_direct(np.pi / 2, -1, p, q) - corner_form_direct(theta, -1, p, q)
        # the K_0 parts cancel; with kernels K_0 +- K_theta the two differences are opposite
        assert plus == pytest.approx(-minus, abs=1e-10)


@pytest.mark.parametrize("theta, cut", [(np.pi / 3, False), (np.pi / 3, True), (2.6, True)])
def test_corner_identity(theta, cut, rng):
    fs = [Bump.random(rng) for _ in range(4)]
    chi = (lambda r: radial_cutoff(r, 3.0)) if cut else None
    lhs, rhs, res = corner_identity_check(theta, *fs, chi=chi)
    assert res < 1e-8 * abs(lhs)


def test_corner_identity_zero():
    assert corner_identity_check(1.0, 0, 0, 0, 0) == (0.0, 0.0, 0.0)


def test_corner_difference_paths_agree(rng):
    b = Bump.random(rng)
    v1 = apply_corner_difference(np.pi / 4, b, "direct")
    v2 = apply_corner_difference(np.pi / 4, b, "mellin")
    assert relative_l2_difference(v2, v1) < 1e-6


def test_corner_difference_vanishes_at_right_angle():
    v = apply_corner_difference(np.pi / 2, Bump(1.5, 0.5, 1.0))
    assert np.all(v.values == 0)


def test_corner_difference_weighted_norms():
    v = apply_corner_difference(np.pi / 4, Bump(1.5, 0.5, 1.0))
    for beta in (0.1, 0.25, 0.4):
        assert np.isfinite(weighted_norm(v, -beta)) and weighted_norm(v, -beta) > 0


def test_collinear_elements_oracle():
    sp = interval_space(np.array([0.0, 1.0, 2.0]))
    A = assemble_riesz(None, sp).matrix
    # the hats sum to 1, so the entries sum to the constant-constant integral over [0,2]^2
    assert A.sum() == pytest.approx(8 * 2 ** 1.5 / 3, rel=1e-12)
    single = assemble_riesz(None, interval_space(np.array([0.0, 1.0]))).matrix
    assert single.sum() == pytest.approx(8 / 3, rel=1e-12)
    assert (A.sum() - 2 * single.sum()) / 2 == pytest.approx(8 * (np.sqrt(2) - 1) / 3, rel=1e-12)


def test_assembly_symmetric_positive(backend):
    b = build_boundary(L_SHAPE)
    op = assemble_riesz(b, polygon_space(b, 60), backend)
    assert op.asymmetry < 1e-10 * np.abs(op.matrix).max()
    assert np.max(np.abs(op.matrix - op.matrix.T)) < 1e-14
    assert np.all(op.matrix > 0)


def test_assembly_rejects_degenerate_element():
    nodes = np.array([[0.0, 0.0], [1e-17, 0.0], [1.0, 0.0]])
    sp = BoundaryFESpace(nodes, np.array([[0, 1], [1, 2]]), np.arange(3))
    with pytest.raises(AssemblyError):
        assemble_riesz(None, sp)


@pytest.fixture(scope="module")
def square_setup():
    b = build_boundary([[0, 0], [1, 0], [1, 1], [0, 1]])
    sp = polygon_space(b, 40)
    return assemble_riesz(b, sp), build_cover(b, 0.3)


def test_localized_forms_telescope(square_setup, rng):
    op, pou = square_setup
    u, v = rng.standard_normal(op.space.n_dofs), rng.standard_normal(op.space.n_dofs)
    F = localized_forms(op, pou, u, v)
    full = v @ op.matrix @ u
    assert abs(F.sum() - full) < 1e-8 * abs(full)


def test_localized_form_entries(square_setup, rng):
    op, pou = square_setup
    u = rng.standard_normal(op.space.n_dofs)
    assert localized_form(op, pou, 0, 1, u, np.zeros_like(u)) == 0.0
    # corner disks 0 and 2 sit at opposite corners: disjoint closures, smooth kernel
    val = localized_form(op, pou, 0, 2, u, u)
    assert np.isfinite(val)
    F = localized_forms(op, pou, u, u, [0, 2])
    assert F[0, 1] == pytest.approx(val)


def test_continuity_ratio_right_angle_is_zero():
    chi = lambda r: radial_cutoff(r, 4.0)
    assert corner_continuity_ratio(np.pi / 2, chi, 5).ratio == 0.0


def test_continuity_ratio_homogeneous():
    chi = lambda r: radial_cutoff(r, 4.0)
    b = Bump(1.0, 0.5, 1.0)
    assert difference_ratio(np.pi / 4, chi, b.times(2.0)) == pytest.approx(difference_ratio(np.pi / 4, chi, b), rel=1e-12)


def test_continuity_ratio_records_seed():
    chi = lambda r: radial_cutoff(r, 4.0)
    cr = corner_continuity_ratio(np.pi / 4, chi, 6, seed=10)
    assert 10 <= cr.seed < 16 and cr.ratio == max(cr.ratios)


def test_theta_norm_ratio_bounded():
    r = theta_norm_ratio(np.pi / 3, Bump(1.0, 0.5, 1.0), Bump(1.5, 0.5, 0.7), per_decade=30)
    assert 0.5 < r < 2.0


def test_matrix_market_export(tmp_path):
    import scipy.io as sio
    from riesz_mellin.sobolev import gram_matrices
    b = build_boundary([[0, 0], [1, 0], [1, 1], [0, 1]])
    sp = polygon_space(b, 16)
    op = assemble_riesz(b, sp)
    back = sio.mmread(op.write_mm(tmp_path / "A.mtx"))
    assert np.array_equal(np.asarray(back), op.matrix)
    paths = gram_matrices(sp).write_mm(tmp_path / "norms")
    assert {p.rsplit("/", 1)[1] for p in paths} >= {"M.mtx", "S.mtx", "slobodeckii.mtx"}
