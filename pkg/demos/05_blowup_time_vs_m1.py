"""
Nonlinear diffusion delays collapse
===================================

Runs the 2D attraction-repulsion preset for three diffusion exponents and
compares the estimated blow-up times. A few minutes on one core.
"""
from chemofv.config import preset
from chemofv.diagnostics import compare_blowup_times, detect_blowup
from chemofv.stepper import run_simulation

base = preset("fig4")
verdicts = []
for m1 in base.sweep["m1"]:
    cfg = base.run.replace(params=base.run.params.replace(m1=m1))
    _, series = run_simulation(cfg)
    verdict = detect_blowup(series)
    print(f"m1={m1}: {verdict.rationale}")
    verdicts.append((f"m1={m1}", verdict))

report = compare_blowup_times(verdicts, declared=base.sweep["m1"])
print(report.to_text())
