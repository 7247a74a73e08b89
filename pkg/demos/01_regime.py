"""
Which damping exponents keep the density bounded?
=================================================

The boundedness threshold Theta depends only on the dimension and on the
attraction/repulsion exponents. A damping exponent gamma in (Theta, 2]
is in the bounded regime.
"""
import numpy as np

from chemofv import ModelParams, compute_theta_cap, check_gamma_condition, regime_report
from chemofv.params import find_pbar, gn_exponents, verify_gn_inequalities, default_q

# 3D, linear sensitivity and production: Theta = 3/4 * 2 = 1.5
p3 = ModelParams(n=3, m2=1, alpha=1, tau=0, chi=5, xi=0)
print("3D threshold:", compute_theta_cap(p3))

# 2D attraction-repulsion with alpha=1.5: Theta = 2/3 * 2.5 = 5/3
p2 = ModelParams(n=2, m2=1, alpha=1.5, tau=0)
print("2D threshold:", compute_theta_cap(p2))

for gamma in (1.1, 1.4, 1.75, 2.0):
    print(f"  gamma={gamma}: bounded regime = {check_gamma_condition(p3.replace(gamma=gamma))}")

# a full report, including the L1 bound on the unit ball for u0 of mass 13.4
print(regime_report(p3.replace(gamma=1.75, c=1e-3), initial_mass=13.4,
                    domain_volume=4 / 3 * np.pi).to_text())

# The interpolation exponents used in the boundedness argument all lie in
# (0, 1) once p is large enough. find_pbar locates a stable such p.
p = ModelParams(n=2, tau=1, m2=0.5, m3=0.2, alpha=1.0, beta=1.3, gamma=1.9)
pbar = find_pbar(p)
e = gn_exponents(p, 2 * pbar, default_q(p))
print("p_bar =", pbar)
print("exponents at 2*p_bar:", e)
print("all in (0, 1):", all(verify_gn_inequalities(e, p, beta_gt_one=True)))
