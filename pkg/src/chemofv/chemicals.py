"""Chemical signals from the current cell density.

Three structural cases: screened elliptic (tau=0), backward-Euler parabolic
(tau=1) and the mean-corrected Poisson problem of the nonlocal model, whose
solution is a zero-mean deviation.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
import scipy.sparse as sps

from .linalg import Solution, solve_spd, solve_zero_mean
from .mesh import Mesh
from .operators import stiffness_matrix

Production = Callable[[np.ndarray], np.ndarray]


class ChemicalOperators:
    """Per-mesh cache of the constant-coefficient matrices."""

    def __init__(self, mesh: Mesh, tol: float = 1e-9):
        self.mesh = mesh
        self.tol = tol
        self.laplace = stiffness_matrix(mesh)
        self.mass = sps.diags(mesh.volumes)
        self.helmholtz = (self.laplace + self.mass).tocsr()
        self._parabolic: dict[float, sps.csr_matrix] = {}

    def parabolic(self, dt: float) -> sps.csr_matrix:
        if dt not in self._parabolic:
            self._parabolic[dt] = (self.helmholtz + self.mass / dt).tocsr()
        return self._parabolic[dt]


def _ops(mesh: Mesh, ops: ChemicalOperators | None) -> ChemicalOperators:
    if ops is None:
        return ChemicalOperators(mesh)
    if ops.mesh is not mesh:
        raise ValueError("operator cache was built for a different mesh")
    return ops


def solve_elliptic_chemical(u, f: Production, mesh: Mesh, ops: ChemicalOperators | None = None,
                            x0=None) -> Solution:
    """(-Lap + 1) z = f(u) with zero-flux boundaries."""
    ops = _ops(mesh, ops)
    s = f(np.asarray(u, dtype=float))
    sol = solve_spd(ops.helmholtz, mesh.volumes * s, tol=ops.tol, x0=x0)
    return sol


def step_parabolic_chemical(z_old, u, f: Production, mesh: Mesh, dt: float,
                            ops: ChemicalOperators | None = None) -> Solution:
    """One backward-Euler step of z_t = Lap z - z + f(u)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ops = _ops(mesh, ops)
    z_old = np.asarray(z_old, dtype=float)
    rhs = mesh.volumes * (z_old / dt + f(np.asarray(u, dtype=float)))
    return solve_spd(ops.parabolic(dt), rhs, tol=ops.tol, x0=z_old)


def solve_nonlocal_chemical(u, f: Production, mesh: Mesh, ops: ChemicalOperators | None = None,
                            x0=None) -> Solution:
    """-Lap z = f(u) - mean(f(u)), normalised to zero volume-weighted mean."""
    ops = _ops(mesh, ops)
    s = f(np.asarray(u, dtype=float))
    vol = mesh.volumes
    s = s - (vol @ s) / vol.sum()
    return solve_zero_mean(ops.laplace, vol * s, vol, tol=ops.tol, x0=x0)
