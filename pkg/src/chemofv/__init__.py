"""Finite-volume simulation of attraction-repulsion chemotaxis with gradient damping."""
from .chemicals import solve_elliptic_chemical, solve_nonlocal_chemical, step_parabolic_chemical
from .diagnostics import BlowupVerdict, TimeSeries, compare_blowup_times, detect_blowup
from .linalg import solve_spd, solve_zero_mean
from .mesh import Mesh, build_ball_mesh, build_box_mesh
from .operators import (diffusive_flux, divergence, gradient_magnitude, source_eval,
                        upwind_chemotactic_flux, upwind_gradient_magnitude)
from .params import (GnExponents, ModelParams, RegimeReport, check_gamma_condition,
                     compute_theta_cap, find_pbar, gn_exponents, mass_bound, regime_report,
                     verify_gn_inequalities)
from .stepper import RunConfig, State, imex_step, initial_condition, run_simulation

__version__ = "0.1.0"
