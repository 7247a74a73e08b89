"""Discrete spatial operators on cell fields.

Face quantities are oriented owner -> neighbor and are integrated over the
face: a face value is ``area * F.n`` for the vector field ``F`` it samples.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sps

from .mesh import Mesh
from .params import ModelParams


def _check(values, mesh: Mesh, what: str = "field") -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_cells,):
        raise ValueError(f"{what} has shape {values.shape}, mesh has {mesh.n_cells} cells")
    return values


def face_diffusivity(u: np.ndarray, mesh: Mesh, m1: float) -> np.ndarray:
    """Harmonic mean of (u+1)**(m1-1) over the two cells of each face."""
    d = np.power(u + 1.0, m1 - 1.0)
    di, dj = d[mesh.owner], d[mesh.neighbor]
    return 2.0 * di * dj / (di + dj)


def diffusive_flux(u, mesh: Mesh, m1: float) -> np.ndarray:
    u = _check(u, mesh)
    grad = (u[mesh.neighbor] - u[mesh.owner]) / mesh.dists
    return mesh.areas * face_diffusivity(u, mesh, m1) * grad


def transported_density(u: np.ndarray, m: float) -> np.ndarray:
    return u * np.power(u + 1.0, m - 1.0)


def face_velocity(potential, mesh: Mesh, sign: int, coeff: float) -> np.ndarray:
    potential = _check(potential, mesh, "potential")
    return sign * coeff * (potential[mesh.neighbor] - potential[mesh.owner]) / mesh.dists


def upwind_chemotactic_flux(u, potential, mesh: Mesh, sign: int, m: float,
                            coeff: float) -> np.ndarray:
    """Mass flux ``sign*coeff*g(u)*grad(potential)`` with g(u)=u(u+1)^(m-1) upwinded.

    ``sign=+1`` is attraction (up the gradient), ``sign=-1`` repulsion.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    u = _check(u, mesh)
    vel = face_velocity(potential, mesh, sign, coeff)
    upwind = np.where(vel >= 0, mesh.owner, mesh.neighbor)
    return mesh.areas * vel * transported_density(u[upwind], m)


def divergence(flux, mesh: Mesh) -> np.ndarray:
    """Cell average of the divergence; the owner gains ``+flux``, the neighbor loses it."""
    flux = np.asarray(flux, dtype=float)
    if flux.shape != (mesh.n_faces,):
        raise ValueError(f"flux has shape {flux.shape}, mesh has {mesh.n_faces} faces")
    out = np.bincount(mesh.owner, weights=flux, minlength=mesh.n_cells)
    out -= np.bincount(mesh.neighbor, weights=flux, minlength=mesh.n_cells)
    return out / mesh.volumes


def gradient_magnitude(u, mesh: Mesh) -> np.ndarray:
    """Euclidean norm of the least-squares cell gradient.

    Cells whose neighbor offsets do not span all axes (too few neighbors, or
    all neighbors along one axis on a staircase boundary) fall back to the
    largest absolute one-sided difference quotient.
    """
    u = _check(u, mesh)
    dim, nc = mesh.dim, mesh.n_cells
    r = mesh.centers[mesh.neighbor] - mesh.centers[mesh.owner]
    du = u[mesh.neighbor] - u[mesh.owner]

    # r and du flip sign together from the neighbor's side, so r r^T and r du agree
    normal = np.zeros((nc, dim, dim))
    rhs = np.zeros((nc, dim))
    outer = r[:, :, None] * r[:, None, :]
    for cells in (mesh.owner, mesh.neighbor):
        np.add.at(normal, cells, outer)
        np.add.at(rhs, cells, r * du[:, None])

    count = np.bincount(mesh.owner, minlength=nc) + np.bincount(mesh.neighbor, minlength=nc)
    scale = mesh.h ** 2
    det = np.linalg.det(normal / scale)
    good = (count >= dim) & (np.abs(det) > 1e-10)

    out = np.zeros(nc)
    if good.any():
        g = np.linalg.solve(normal[good], rhs[good][:, :, None])[:, :, 0]
        out[good] = np.linalg.norm(g, axis=1)
    bad = ~good
    if bad.any():
        slope = np.abs(du) / mesh.dists
        fallback = np.zeros(nc)
        np.maximum.at(fallback, mesh.owner, slope)
        np.maximum.at(fallback, mesh.neighbor, slope)
        out[bad] = fallback[bad]
    return out


def upwind_gradient_magnitude(u, mesh: Mesh) -> np.ndarray:
    """Rouy-Tourin norm: per axis the larger one-sided slope, then Euclidean.

    Exact for affine fields on interior cells like the least-squares
    gradient, but nonzero at a discrete extremum, where the symmetric
    least-squares fit vanishes.
    """
    u = _check(u, mesh)
    slope = np.abs(u[mesh.neighbor] - u[mesh.owner]) / mesh.dists
    axis = np.argmax(np.abs(mesh.normals), axis=1)
    per_axis = np.zeros((mesh.n_cells, mesh.dim))
    np.maximum.at(per_axis, (mesh.owner, axis), slope)
    np.maximum.at(per_axis, (mesh.neighbor, axis), slope)
    return np.sqrt(np.sum(per_axis ** 2, axis=1))


def source_eval(u, grad_mag, params: ModelParams) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return (params.lambda_ * np.power(u, params.rho) - params.mu * np.power(u, params.k)
            - params.c * np.power(np.asarray(grad_mag, dtype=float), params.gamma))


def stiffness_matrix(mesh: Mesh, face_coeff=None) -> sps.csr_matrix:
    """Volume-integrated ``-div(D grad .)``: sum of T_f (e_i - e_j)(e_i - e_j)^T.

    Symmetric positive semidefinite with the constants as nullspace on a
    connected mesh.
    """
    t = mesh.areas / mesh.dists
    if face_coeff is not None:
        t = t * face_coeff
    i, j, nc = mesh.owner, mesh.neighbor, mesh.n_cells
    diag = np.bincount(i, weights=t, minlength=nc) + np.bincount(j, weights=t, minlength=nc)
    rows = np.concatenate([i, j, np.arange(nc)])
    cols = np.concatenate([j, i, np.arange(nc)])
    vals = np.concatenate([-t, -t, diag])
    return sps.csr_matrix((vals, (rows, cols)), shape=(nc, nc))
