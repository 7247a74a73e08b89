"""
Chemical signals
================

Screened elliptic, backward-Euler parabolic and mean-corrected Poisson
signals from a given cell density.
"""
import numpy as np

from chemofv import build_ball_mesh
from chemofv.chemicals import (ChemicalOperators, solve_elliptic_chemical,
                               step_parabolic_chemical, solve_nonlocal_chemical)

mesh = build_ball_mesh(2, 1.0, 0.05)
ops = ChemicalOperators(mesh, tol=1e-10)
r2 = np.sum(mesh.centers ** 2, axis=1)
u = 500 * np.exp(-35 * r2)

v = solve_elliptic_chemical(u, lambda s: s, mesh, ops)
print(f"elliptic: max v = {v.x.max():.3f} in {v.iterations} CG iterations")

# the parabolic signal relaxes towards the elliptic one
z = np.zeros(mesh.n_cells)
for step in range(50):
    z = step_parabolic_chemical(z, u, lambda s: s, mesh, dt=0.1, ops=ops).x
print("parabolic after t=5, distance to elliptic:", np.abs(z - v.x).max())

# nonlocal signal: a zero-mean deviation
d = solve_nonlocal_chemical(u, lambda s: s, mesh, ops)
print("nonlocal: mean", mesh.volumes @ d.x / mesh.domain_volume, " max", d.x.max())
