"""
Chemotactic collapse and its suppression
========================================

Runs the 3D collapse preset and its damped counterpart, then plots max u
over time. About half a minute on one core.
"""
from pathlib import Path

from chemofv.config import preset
from chemofv.diagnostics import detect_blowup
from chemofv.io import svg_line_plot
from chemofv.stepper import run_simulation

curves = []
for name in ("fig1", "fig2a"):
    cfg = preset(name).run
    state, series = run_simulation(cfg)
    verdict = detect_blowup(series)
    print(f"{name}: c={cfg.params.c} gamma={cfg.params.gamma} -> {verdict.rationale}")
    curves.append((f"{name} (c={cfg.params.c:g}, gamma={cfg.params.gamma:g})",
                   series.t, series.max_u))

out = Path("collapse.svg")
out.write_text(svg_line_plot(curves, title="max u, 3D ball"))
print("wrote", out)
