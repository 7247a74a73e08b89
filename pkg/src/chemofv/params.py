"""Model coefficients and closed-form regime quantities.

The boundedness threshold for the damping exponent, the uniform mass bound
and the Gagliardo-Nirenberg type exponents used in the L^p bootstrap all
live here as pure functions of :class:`ModelParams`.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Production = Callable[[np.ndarray], np.ndarray]


class DegenerateExponent(ValueError):
    """A denominator or an exponent argument vanished."""


@dataclass(frozen=True)
class ModelParams:
    n: int = 2
    tau: int = 0
    nonlocal_: bool = False
    chi: float = 1.0
    xi: float = 1.0
    lambda_: float = 1.0
    mu: float = 1.0
    c: float = 0.0
    rho: float = 1.0
    k: float = 1.1
    gamma: float = 2.0
    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    f1_coeff: float = 1.0
    f2_lo: float = 1.0
    f2_hi: float = 1.0
    # optional plug-in production laws; default to u**alpha and u**beta
    f1: Optional[Production] = field(default=None, compare=False, repr=False)
    f2: Optional[Production] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"n must be 1, 2 or 3, got {self.n}")
        if self.tau not in (0, 1):
            raise ValueError(f"tau must be 0 or 1, got {self.tau}")
        if self.chi < 0 or self.xi < 0:
            raise ValueError("chi and xi must be nonnegative")
        if self.lambda_ < 0 or self.mu < 0 or self.c < 0:
            raise ValueError("lambda, mu and c must be nonnegative")
        if not self.k >= self.rho >= 1:
            raise ValueError(f"need k >= rho >= 1, got k={self.k}, rho={self.rho}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not (self.f1_coeff >= self.f2_lo > 0 and self.f2_hi >= self.f2_lo):
            raise ValueError("production bounds need k1, k3 >= k2 > 0")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def production_v(self, u: np.ndarray) -> np.ndarray:
        if self.f1 is not None:
            return self.f1(u)
        return np.power(u, self.alpha)

    def production_w(self, u: np.ndarray) -> np.ndarray:
        if self.f2 is not None:
            return self.f2(u)
        return np.power(u, self.beta)

    def scalar_items(self) -> dict:
        """Numeric fields in declaration order (plug-in callables excluded)."""
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                if f.name not in ("f1", "f2")}


@dataclass
class RegimeReport:
    theta_cap: float
    gamma_ok: bool
    mass_bound: Optional[float]
    notes: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"theta_cap = {self.theta_cap!r}",
                 f"gamma_ok = {str(self.gamma_ok).lower()}",
                 f"mass_bound = {'none' if self.mass_bound is None else repr(self.mass_bound)}"]
        lines += [f"note = {note}" for note in self.notes]
        return "\n".join(lines) + "\n"

    def csv_header(self, params: ModelParams) -> str:
        return ",".join(list(params.scalar_items()) + ["theta_cap", "gamma_ok", "mass_bound"])

    def csv_row(self, params: ModelParams) -> str:
        values = [str(v) for v in params.scalar_items().values()]
        values += [repr(self.theta_cap), str(self.gamma_ok).lower(),
                   "" if self.mass_bound is None else repr(self.mass_bound)]
        return ",".join(values)


@dataclass(frozen=True)
class GnExponents:
    theta: float
    sigma: float
    theta_bar: float
    sigma_bar: float
    theta_hat: float
    sigma_hat: float
    theta_tilde: float
    theta_under: float
    sigma_under: float


def compute_theta_cap(params: ModelParams) -> float:
    """Lower threshold for gamma: max(1, n/(n+1)(m2+alpha), tau n/(n+1)(m3+beta))."""
    r = params.n / (params.n + 1)
    return max(1.0, r * (params.m2 + params.alpha), params.tau * r * (params.m3 + params.beta))


def check_gamma_condition(params: ModelParams) -> bool:
    return compute_theta_cap(params) < params.gamma <= 2


def mass_bound(params: ModelParams, initial_mass: float, domain_volume: float) -> float:
    """Uniform-in-time bound on the total mass, valid when k > rho."""
    if not params.k > params.rho:
        raise ValueError("mass bound requires k>rho")
    if initial_mass < 0 or domain_volume <= 0:
        raise ValueError("need initial_mass >= 0 and domain_volume > 0")
    d = params.k - params.rho
    if params.lambda_ == 0:
        return float(initial_mass)
    if params.mu == 0:
        return math.inf
    # (lambda/mu |Omega|^d)^(1/d) written to avoid overflow for small d
    logistic = (params.lambda_ / params.mu) ** (1.0 / d) * domain_volume
    return max(float(initial_mass), logistic)


def gn_exponents(params: ModelParams, p: float, q: float) -> GnExponents:
    if p <= 1 or q <= 1:
        raise ValueError("need p > 1 and q > 1")
    g, n = params.gamma, params.n
    a = (p + g - 1) / g
    denom = a - 1 / g + 1 / n
    args = (p + params.m2 + params.alpha - 1, p + params.m3 + params.beta - 1)
    if denom == 0 or p + g - 1 == 0:
        raise DegenerateExponent("degenerate exponent: vanishing denominator")
    if min(args) <= 0:
        raise DegenerateExponent(f"degenerate exponent: nonpositive argument {min(args)}")
    pa, pb = args

    def ratio(d: float) -> float:
        return (a - a / d) / denom

    return GnExponents(
        theta=ratio(p),
        sigma=p * g / (p + g - 1),
        theta_bar=ratio(pa),
        sigma_bar=g * pa / (p + g - 1),
        theta_hat=ratio(pb),
        sigma_hat=g * pb / (p + g - 1),
        theta_tilde=ratio(params.beta),
        theta_under=ratio(q),
        sigma_under=g * (p + q) / (p + g - 1),
    )


def _unit(x: float) -> bool:
    return bool(0 < x < 1)


def verify_gn_inequalities(e: GnExponents, params: ModelParams, beta_gt_one: bool) -> list[bool]:
    """The ten open-interval memberships, in table order.

    The theta_tilde pair (entries 6 and 7) is always evaluated; callers
    only require it when ``beta_gt_one``.
    """
    g = params.gamma
    return [
        _unit(e.theta),
        _unit(e.sigma * e.theta / g),
        _unit(e.theta_bar),
        _unit(e.sigma_bar * e.theta_bar / g),
        _unit(e.theta_hat),
        _unit(e.sigma_hat * e.theta_hat / g),
        _unit(e.theta_tilde),
        _unit(e.sigma_hat * e.theta_tilde / g),
        _unit(e.theta_under),
        _unit(e.sigma_under * e.theta_under / g),
    ]


def required_hold(e: GnExponents, params: ModelParams) -> bool:
    flags = verify_gn_inequalities(e, params, params.beta > 1)
    if params.beta <= 1:
        flags = flags[:6] + flags[8:]
    return all(flags)


def default_q(params: ModelParams) -> float:
    return max(params.beta, params.m3 + params.beta - 1) + 1


def find_pbar(params: ModelParams, q: Optional[float] = None, p_max: float = 1e6,
              ratio: float = 1.1, window: int = 10, strict: bool = True) -> Optional[float]:
    """Smallest grid point 2*ratio**j past which the required inequalities stay true.

    The scan always uses both chemical terms of the threshold (the parabolic
    case). With ``strict`` a violated gamma condition raises; otherwise the
    scan runs anyway and typically returns None.
    """
    full = params.replace(tau=1)
    if strict and not check_gamma_condition(full):
        raise ValueError("precondition violated: gamma condition fails with tau=1")
    if q is None:
        q = default_q(params)

    grid = []
    p = 2.0
    while p <= p_max:
        grid.append(p)
        p *= ratio
    ok = []
    for p in grid:
        try:
            ok.append(required_hold(gn_exponents(params, p, q), params))
        except DegenerateExponent:
            ok.append(False)
    # a candidate needs `window` confirmations beyond it, which may run past p_max
    for i, p in enumerate(grid):
        if not ok[i]:
            continue
        tail = ok[i + 1:i + 1 + window]
        extra = window - len(tail)
        if all(tail) and all(_holds_at(params, p * ratio ** (len(tail) + j + 1), q)
                             for j in range(extra)):
            return p
    return None


def _holds_at(params: ModelParams, p: float, q: float) -> bool:
    try:
        return required_hold(gn_exponents(params, p, q), params)
    except DegenerateExponent:
        return False


def regime_report(params: ModelParams, initial_mass: Optional[float] = None,
                  domain_volume: Optional[float] = None) -> RegimeReport:
    cap = compute_theta_cap(params)
    ok = check_gamma_condition(params)
    r = params.n / (params.n + 1)
    notes = [
        f"Theta = max(1, {r * (params.m2 + params.alpha):.6g}, "
        f"{params.tau * r * (params.m3 + params.beta):.6g}) = {cap:.6g}",
        f"{cap:.6g} < gamma={params.gamma:g} <= 2 is {'satisfied' if ok else 'violated'}",
    ]
    bound = None
    if params.k > params.rho and initial_mass is not None and domain_volume is not None:
        bound = mass_bound(params, initial_mass, domain_volume)
        notes.append(f"mass bound M = {bound:.6g} (k={params.k:g} > rho={params.rho:g})")
    elif not params.k > params.rho:
        notes.append("no mass bound: k == rho")
    return RegimeReport(theta_cap=cap, gamma_ok=ok, mass_bound=bound, notes=notes)
