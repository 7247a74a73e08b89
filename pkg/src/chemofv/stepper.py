"""IMEX time stepping for the coupled density/chemical system.

Each step solves the chemicals from the old density first, then one linear
system for the new density: diffusion, death and gradient damping implicit
(all on the diagonal or in an M-matrix), chemotaxis and growth explicit.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sps

from .chemicals import (ChemicalOperators, solve_elliptic_chemical, solve_nonlocal_chemical,
                        step_parabolic_chemical)
from .diagnostics import TimeSeries, detect_blowup
from .linalg import solve_spd
from .mesh import Mesh, build_ball_mesh, build_box_mesh
from .operators import (divergence, face_diffusivity, face_velocity, gradient_magnitude,
                        stiffness_matrix, upwind_chemotactic_flux,
                        upwind_gradient_magnitude)
from .params import ModelParams

log = logging.getLogger(__name__)


_GRADIENTS = {"upwind": upwind_gradient_magnitude, "lsq": gradient_magnitude}


class StepRejected(RuntimeError):
    def __init__(self, message, t, cell=None, face=None, courant=None):
        super().__init__(message)
        self.t = t
        self.cell = cell
        self.face = face
        self.courant = courant


@dataclass
class State:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    t: float = 0.0
    step_index: int = 0


@dataclass
class RunConfig:
    params: ModelParams
    mesh: dict = field(default_factory=lambda: {"kind": "box", "dim": 1, "lengths": [1.0],
                                                "cells": [16]})
    dt: float = 1e-3
    t_end: float = 1e-2
    u0: str = "constant(1)"
    v0: Optional[str] = None
    w0: Optional[str] = None
    output_every: int = 1
    snapshot_every: int = 0
    growth_factor: float = 100.0
    window: int = 20
    plateau_tol: float = 0.02
    stop_on_blowup: bool = True
    cfl_max: float = 0.9
    eps_damp: float = 1e-8
    chem_tol: float = 1e-9
    density_tol: float = 1e-12
    seed: int = 0
    damping_gradient: str = "upwind"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > self.dt:
            raise ValueError("t_end must exceed dt")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")
        if self.damping_gradient not in _GRADIENTS:
            raise ValueError(f"damping_gradient must be one of {sorted(_GRADIENTS)}")

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @property
    def n_steps(self) -> int:
        return math.ceil(self.t_end / self.dt - 1e-9)


def build_mesh(spec: dict) -> Mesh:
    kind = spec.get("kind", "box")
    dim = int(spec["dim"])
    if kind == "box":
        return build_box_mesh(dim, spec["lengths"], spec["cells"])
    if kind == "ball":
        return build_ball_mesh(dim, float(spec.get("radius", 1.0)), float(spec["h"]))
    raise ValueError(f"unknown mesh kind {kind!r}")


_SAFE = {name: getattr(np, name) for name in
         ("exp", "sin", "cos", "tanh", "sqrt", "abs", "log", "pi", "maximum", "minimum", "where")}


def initial_condition(mesh: Mesh, preset: str) -> np.ndarray:
    """Cell-centre values of a named preset or an expression in x, y, z, r."""
    preset = preset.strip()
    x = mesh.centers
    r2 = np.sum(x ** 2, axis=1)
    if preset == "gauss3d":
        if mesh.dim != 3:
            raise ValueError("gauss3d needs a 3D mesh")
        u = 500.0 * np.exp(-35.0 * r2)
    elif preset == "gauss2d":
        if mesh.dim != 2:
            raise ValueError("gauss2d needs a 2D mesh")
        u = 500.0 * np.exp(-35.0 * r2)
    elif m := re.fullmatch(r"constant\(\s*([^)]+)\s*\)", preset):
        u = np.full(mesh.n_cells, float(m.group(1)))
    elif preset.startswith("expr:"):
        names = dict(_SAFE)
        for a, name in enumerate("xyz"[:mesh.dim]):
            names[name] = x[:, a]
        names["r"] = np.sqrt(r2)
        u = np.broadcast_to(eval(preset[5:], {"__builtins__": {}}, names),
                            (mesh.n_cells,)).astype(float)
    else:
        raise ValueError(f"unknown preset {preset!r}")
    if np.any(u < 0) or not np.all(np.isfinite(u)):
        raise ValueError(f"initial condition {preset!r} must be finite and nonnegative")
    return u


@dataclass
class StepInfo:
    clamped_mass: float
    solver_iters: int
    damping_residual: float
    max_courant: float
    solver_log: list


class Stepper:
    """Mesh-bound operator cache plus the step itself."""

    def __init__(self, cfg: RunConfig, mesh: Optional[Mesh] = None):
        self.cfg = cfg
        self.params = cfg.params
        self.mesh = mesh if mesh is not None else build_mesh(cfg.mesh)
        self.ops = ChemicalOperators(self.mesh, tol=cfg.chem_tol)

    # -- chemicals ---------------------------------------------------------
    def chemicals(self, u, v_old, w_old, first: bool = False):
        p, mesh = self.params, self.mesh
        sols = []

        def solve(f, z_old, active):
            if not active:
                return np.zeros(mesh.n_cells)
            if p.nonlocal_:
                sol = solve_nonlocal_chemical(u, f, mesh, self.ops, x0=z_old)
            elif p.tau == 0 or first:
                sol = solve_elliptic_chemical(u, f, mesh, self.ops, x0=z_old)
            else:
                sol = step_parabolic_chemical(z_old, u, f, mesh, self.cfg.dt, self.ops)
            sols.append(sol)
            return sol.x

        # a chemical with zero sensitivity is decoupled from u; skip its solve
        v = solve(p.production_v, v_old, p.chi > 0)
        w = solve(p.production_w, w_old, p.xi > 0)
        return v, w, sols

    def initial_state(self) -> State:
        cfg, mesh = self.cfg, self.mesh
        u = initial_condition(mesh, cfg.u0)
        v, w, _ = self.chemicals(u, None, None, first=True)
        if self.params.tau == 1 and not self.params.nonlocal_:
            if cfg.v0 is not None:
                v = initial_condition(mesh, cfg.v0)
            if cfg.w0 is not None:
                w = initial_condition(mesh, cfg.w0)
        return State(u=u, v=v, w=w, t=0.0, step_index=0)

    # -- density -------------------------------------------------------------
    def convective_outflow(self, u, v, w):
        """Explicit upwind chemotactic divergence and the cell Courant numbers."""
        p, mesh, dt = self.params, self.mesh, self.cfg.dt
        conv = np.zeros(mesh.n_cells)
        courant = np.zeros(mesh.n_cells)
        face_cfl = np.zeros(mesh.n_faces)
        for pot, sign, m, coeff in ((v, 1, p.m2, p.chi), (w, -1, p.m3, p.xi)):
            if coeff == 0:
                continue
            flux = upwind_chemotactic_flux(u, pot, mesh, sign, m, coeff)
            conv += divergence(flux, mesh)
            vel = face_velocity(pot, mesh, sign, coeff)
            up = np.where(vel >= 0, mesh.owner, mesh.neighbor)
            # outflow per unit mass of the upwind cell: A |V| (u+1)^(m-1)
            rate = mesh.areas * np.abs(vel) * np.power(u[up] + 1.0, m - 1.0)
            courant += np.bincount(up, weights=rate, minlength=mesh.n_cells) * dt / mesh.volumes
            face_cfl = np.maximum(face_cfl, np.abs(vel) * dt / mesh.dists)
        return conv, courant, face_cfl

    def step(self, state: State) -> tuple[State, StepInfo]:
        p, mesh, cfg = self.params, self.mesh, self.cfg
        dt, vol = cfg.dt, mesh.volumes
        u_old = state.u

        v, w, chem_sols = self.chemicals(u_old, state.v, state.w)

        conv, courant, face_cfl = self.convective_outflow(u_old, v, w)
        worst = int(np.argmax(courant)) if len(courant) else 0
        if len(courant) and courant[worst] > cfg.cfl_max:
            faces = np.nonzero((mesh.owner == worst) | (mesh.neighbor == worst))[0]
            face = int(faces[np.argmax(face_cfl[faces])]) if len(faces) else None
            raise StepRejected(
                f"step rejected at t={state.t:.6g}: Courant number {courant[worst]:.3g} > "
                f"{cfg.cfl_max} in cell {worst} (face {face})",
                t=state.t, cell=worst, face=face, courant=float(courant[worst]))

        grad = _GRADIENTS[cfg.damping_gradient](u_old, mesh) if p.c > 0 else np.zeros(mesh.n_cells)
        damp_rate = p.c * np.power(grad, p.gamma)
        safe_u = np.maximum(u_old, cfg.eps_damp)
        absorption = damp_rate / safe_u
        damping_residual = float(vol @ (damp_rate * (1.0 - u_old / safe_u)))
        death = p.mu * np.power(u_old, p.k - 1.0)

        stiff = stiffness_matrix(mesh, face_diffusivity(u_old, mesh, p.m1))
        lhs = stiff + sps.diags(vol * (1.0 / dt + absorption + death))
        rhs = vol * (u_old / dt - conv + p.lambda_ * np.power(u_old, p.rho))
        sol = solve_spd(lhs, rhs, tol=cfg.density_tol, x0=u_old)

        # constant-mode correction: the stiffness part has zero column sums, so
        # this zeroes sum(rhs - lhs u) and the discrete mass budget closes to roundoff
        u_new = sol.x + (rhs.sum() - (lhs @ sol.x).sum()) / (lhs @ np.ones(mesh.n_cells)).sum()
        neg = u_new < 0
        clamped = float(-(vol[neg] @ u_new[neg])) if neg.any() else 0.0
        if neg.any():
            u_new = np.where(neg, 0.0, u_new)

        solver_log = [s.csv(name) for name, s in zip(("v", "w"), chem_sols)]
        solver_log.append(sol.csv("u"))
        info = StepInfo(clamped_mass=clamped,
                        solver_iters=sol.iterations + sum(s.iterations for s in chem_sols),
                        damping_residual=damping_residual,
                        max_courant=float(courant.max()) if len(courant) else 0.0,
                        solver_log=solver_log)
        new = State(u=u_new, v=v, w=w, t=(state.step_index + 1) * dt,
                    step_index=state.step_index + 1)
        return new, info


def imex_step(state: State, cfg: RunConfig, stepper: Optional[Stepper] = None):
    """Advance one step; returns ``(new_state, StepInfo)``."""
    stepper = stepper or Stepper(cfg)
    return stepper.step(state)


def _record(series: TimeSeries, state: State, vol, clamped, iters):
    series.append(state.t, state.u.max(), state.u.min(), vol @ state.u,
                  state.v.max(), state.w.max(), clamped, iters)


def run_simulation(cfg: RunConfig, mesh: Optional[Mesh] = None, on_snapshot=None,
                   stepper: Optional[Stepper] = None):
    """Step until ``t_end``, a detected plateau blow-up, or a rejected step.

    Returns ``(final_state, series)``; ``series.solver_log`` holds CSV lines
    ``step,chemical,iterations,residual``.
    """
    stepper = stepper or Stepper(cfg, mesh)
    vol = stepper.mesh.volumes
    state = stepper.initial_state()
    series = TimeSeries()
    _record(series, state, vol, 0.0, 0)
    if on_snapshot is not None and cfg.snapshot_every:
        on_snapshot(state)
    clamped_acc = 0.0
    iters_acc = 0
    for _ in range(cfg.n_steps):
        try:
            state_next, info = stepper.step(state)
        except StepRejected as exc:
            log.info("%s", exc)
            series.rejected_at = exc.t
            series.rejection = str(exc)
            if len(series) == 0 or series.t[-1] < state.t:
                _record(series, state, vol, clamped_acc, iters_acc)
            break
        state = state_next
        clamped_acc = max(clamped_acc, info.clamped_mass)
        iters_acc += info.solver_iters
        series.solver_log += [f"{state.step_index},{line}" for line in info.solver_log]
        series.damping_residual.append(info.damping_residual)
        if state.step_index % cfg.output_every == 0 or state.step_index == cfg.n_steps:
            _record(series, state, vol, clamped_acc, iters_acc)
            clamped_acc = 0.0
            iters_acc = 0
            if cfg.stop_on_blowup and len(series) >= cfg.window + 1:
                verdict = detect_blowup(series, cfg.growth_factor, cfg.window, cfg.plateau_tol)
                if verdict.blew_up:
                    log.info("plateau blow-up detected at t=%g; stopping", state.t)
                    break
        if on_snapshot is not None and cfg.snapshot_every and \
                state.step_index % cfg.snapshot_every == 0:
            on_snapshot(state)
    return state, series
