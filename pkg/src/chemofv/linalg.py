"""Jacobi-preconditioned conjugate gradients, plain and mean-deflated."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class NoConvergence(SolverError):
    pass


class IndefiniteOperator(SolverError):
    pass


class IncompatibleRHS(SolverError):
    pass


@dataclass
class Solution:
    x: np.ndarray
    iterations: int
    residual: float

    def csv(self, label: str) -> str:
        return f"{label},{self.iterations},{self.residual:.3e}"


def _pcg(A, b, x0, tol, max_iter, project_x=None, project_r=None) -> Solution:
    bnorm = np.linalg.norm(b)
    n = len(b)
    if bnorm == 0.0:
        return Solution(np.zeros(n), 0, 0.0)
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise IndefiniteOperator("indefinite operator: nonpositive diagonal entry")
    inv_d = 1.0 / diag

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if project_x is not None:
        x = project_x(x)
    r = b - A @ x
    if project_r is not None:
        r = project_r(r)
    res = np.linalg.norm(r) / bnorm
    if res <= tol:
        return Solution(x, 0, res)
    z = inv_d * r
    p = z.copy()
    rz = r @ z
    for it in range(1, max_iter + 1):
        Ap = A @ p
        curv = p @ Ap
        if curv <= 0:
            raise IndefiniteOperator(f"indefinite operator: p^T A p = {curv:.3e} at iteration {it}")
        step = rz / curv
        x += step * p
        r -= step * Ap
        if project_x is not None:
            x = project_x(x)
        if project_r is not None:
            r = project_r(r)
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            # recompute to guard against drift of the recursive residual
            true_r = b - A @ x
            res = np.linalg.norm(true_r) / bnorm
            if res <= tol:
                return Solution(x, it, res)
            r = true_r if project_r is None else project_r(true_r)
        z = inv_d * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NoConvergence(f"no convergence after {max_iter} iterations (residual {res:.3e})")


def solve_spd(A: sps.spmatrix, b, tol: float = 1e-9, max_iter: int | None = None,
              x0=None) -> Solution:
    """Solve ``A x = b`` for symmetric positive definite ``A``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = sps.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    if max_iter is None:
        max_iter = 10 * len(b)
    return _pcg(A, b, x0, tol, max_iter)


def solve_zero_mean(A: sps.spmatrix, b, volumes, tol: float = 1e-9,
                    max_iter: int | None = None, x0=None) -> Solution:
    """Solve the singular Neumann problem ``A x = b`` with sum(volumes * x) = 0.

    ``A`` must have the constants as its nullspace, so ``b`` must sum to
    zero. Iterates are projected back onto the zero-mean subspace after
    every update and residuals onto the range of ``A``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = sps.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    vol = np.asarray(volumes, dtype=float)
    total = vol.sum()
    bmax = np.abs(b).max() if len(b) else 0.0
    if abs(b.mean()) > 1e-8 * bmax:
        raise IncompatibleRHS(f"incompatible right-hand side: mean {b.mean():.3e}")
    if max_iter is None:
        max_iter = 10 * len(b)

    def project_x(x):
        return x - (vol @ x) / total

    def project_r(r):
        return r - r.mean()

    sol = _pcg(A, project_r(b), x0, tol, max_iter, project_x, project_r)
    sol.x = project_x(sol.x)
    return sol
