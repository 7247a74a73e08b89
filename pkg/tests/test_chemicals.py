import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemofv.chemicals import (ChemicalOperators, solve_elliptic_chemical, solve_nonlocal_chemical,
                               step_parabolic_chemical)
from chemofv.mesh import Mesh, build_ball_mesh, build_box_mesh
from chemofv.operators import stiffness_matrix

MESH = build_ball_mesh(2, 1.0, 0.15)


def single_cell():
    return Mesh(dim=1, centers=np.zeros((1, 1)), volumes=np.array([0.5]),
                owner=np.zeros(0, dtype=np.int64), neighbor=np.zeros(0, dtype=np.int64),
                areas=np.zeros(0), normals=np.zeros((0, 1)), dists=np.zeros(0),
                spacing=np.array([0.5]), h=0.5)


def test_constant_production():
    z = solve_elliptic_chemical(np.ones(MESH.n_cells), lambda u: 2 * u, MESH).x
    np.testing.assert_allclose(z, 2.0, rtol=1e-8)


def test_single_cell_is_algebraic():
    m = single_cell()
    assert solve_elliptic_chemical(np.array([3.0]), lambda u: u ** 2, m).x[0] == pytest.approx(9.0)


def test_parabolic_decay():
    u = np.zeros(MESH.n_cells)
    z = step_parabolic_chemical(np.full(MESH.n_cells, 4.0), u, lambda s: s, MESH, dt=0.25).x
    np.testing.assert_allclose(z, 4.0 / 1.25, rtol=1e-8)


def test_parabolic_fixed_point():
    u = np.random.default_rng(0).random(MESH.n_cells)
    ops = ChemicalOperators(MESH, tol=1e-12)
    z = solve_elliptic_chemical(u, np.sqrt, MESH, ops).x
    z1 = step_parabolic_chemical(z, u, np.sqrt, MESH, 0.1, ops).x
    np.testing.assert_allclose(z1, z, atol=1e-9)


def test_parabolic_large_dt_is_elliptic():
    u = np.random.default_rng(1).random(MESH.n_cells)
    ops = ChemicalOperators(MESH, tol=1e-12)
    z_ell = solve_elliptic_chemical(u, np.sqrt, MESH, ops).x
    z_par = step_parabolic_chemical(np.zeros(MESH.n_cells), u, np.sqrt, MESH, 1e6, ops).x
    np.testing.assert_allclose(z_par, z_ell, atol=1e-5)


def test_parabolic_bad_dt():
    with pytest.raises(ValueError):
        step_parabolic_chemical(np.zeros(MESH.n_cells), np.zeros(MESH.n_cells), np.sqrt, MESH, 0.0)


def test_nonlocal_zero_mean_and_pinv():
    m = build_box_mesh(1, 1.0, 4)
    u = np.array([2.0, 0.0, 0.0, 2.0])
    z = solve_nonlocal_chemical(u, lambda s: s, m, ChemicalOperators(m, tol=1e-12)).x
    assert abs(m.volumes @ z) < 1e-12
    s = u - u.mean()
    ref = np.linalg.pinv(stiffness_matrix(m).toarray()) @ (m.volumes * s)
    np.testing.assert_allclose(z, ref, atol=1e-10)


def test_nonlocal_constant_density_gives_zero():
    z = solve_nonlocal_chemical(np.full(MESH.n_cells, 3.0), lambda s: s, MESH).x
    np.testing.assert_allclose(z, 0.0, atol=1e-12)


def test_cache_is_per_mesh():
    with pytest.raises(ValueError):
        solve_elliptic_chemical(np.ones(MESH.n_cells), np.sqrt, MESH,
                                ChemicalOperators(build_box_mesh(1, 1.0, 4)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_nonnegative_and_comparison(seed):
    rng = np.random.default_rng(seed)
    u1 = rng.random(MESH.n_cells) * 5
    u2 = u1 + rng.random(MESH.n_cells)
    ops = ChemicalOperators(MESH, tol=1e-12)
    z1 = solve_elliptic_chemical(u1, lambda s: s ** 1.5, MESH, ops).x
    z2 = solve_elliptic_chemical(u2, lambda s: s ** 1.5, MESH, ops).x
    assert z1.min() >= -1e-10
    assert np.all(z2 >= z1 - 1e-9)
