"""Command-line entry point: ``chemofv {regime,run,sweep,presets}``."""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import PRESETS, ConfigError, ParsedConfig, config_to_text, load_config, preset
from .diagnostics import detect_blowup
from .io import svg_line_plot, write_series_csv, write_vtk
from .params import regime_report
from .stepper import RunConfig, Stepper, initial_condition, run_simulation

log = logging.getLogger("chemofv")


def _load(args) -> ParsedConfig:
    overrides = getattr(args, "override", None) or []
    if getattr(args, "preset", None):
        base = config_to_text(*_preset_parts(args.preset))
        return load_config(base, overrides)
    if not args.config:
        raise ConfigError("need --config or --preset")
    return load_config(Path(args.config).read_text(), overrides)


def _preset_parts(name):
    p = preset(name)
    return p.run, p.sweep, p.name


def verdict_for(cfg: RunConfig, series):
    return detect_blowup(series, cfg.growth_factor, cfg.window, cfg.plateau_tol)


def run_case(cfg: RunConfig, out: Path, name: str = "", sweep: dict | None = None):
    """Run one configuration and write every artefact into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.echo").write_text(config_to_text(cfg, sweep, name))
    stepper = Stepper(cfg)
    mesh = stepper.mesh
    log.info("mesh %s", mesh.summary())

    def snapshot(state):
        write_vtk(mesh, out / f"snapshot_{state.step_index:06d}.vtk",
                  {"u": state.u, "v": state.v, "w": state.w}, title=f"t={state.t!r}")

    state, series = run_simulation(cfg, on_snapshot=snapshot, stepper=stepper)
    verdict = verdict_for(cfg, series)
    write_series_csv(series, out / "series.csv")
    (out / "verdict.txt").write_text(verdict.to_text())
    (out / "solver.csv").write_text("step,chemical,iterations,residual\n"
                                    + "".join(line + "\n" for line in series.solver_log))
    (out / "maxu.svg").write_text(svg_line_plot([(name or "max u", series.t, series.max_u)],
                                                title=name or "max u over time"))
    return series, verdict


def cmd_regime(args) -> int:
    try:
        parsed = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = parsed.run
    initial_mass = volume = None
    if args.with_mass:
        mesh = Stepper(cfg).mesh
        u0 = initial_condition(mesh, cfg.u0)
        initial_mass, volume = float(mesh.volumes @ u0), mesh.domain_volume
    report = regime_report(cfg.params, initial_mass, volume)
    sys.stdout.write(report.to_text())
    return 0 if report.gamma_ok else 2


def cmd_run(args) -> int:
    try:
        parsed = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _, verdict = run_case(parsed.run, Path(args.out), parsed.name)
    print(verdict.to_text(), end="")
    return 0


def _sweep_one(job):
    index, cfg_text, out = job
    parsed = load_config(cfg_text)
    try:
        series, verdict = run_case(parsed.run, Path(out), parsed.name)
        return index, verdict, series.t.tolist(), series.max_u.tolist(), ""
    except Exception as exc:  # recorded in the row; the sweep carries on
        return index, None, [], [], f"{type(exc).__name__}: {exc}"


def sweep_jobs(parsed: ParsedConfig, out: Path):
    axes = parsed.sweep
    if not axes:
        raise ConfigError("sweep needs a [sweep] section or a preset with sweep axes")
    names = list(axes)
    jobs, combos = [], []
    for i, combo in enumerate(itertools.product(*(axes[n] for n in names))):
        changes = dict(zip(names, combo))
        cfg = parsed.run.replace(params=parsed.run.params.replace(**changes))
        label = "_".join(f"{k}={v:g}" for k, v in changes.items())
        jobs.append((i, config_to_text(cfg, name=label), str(out / f"run_{i:03d}")))
        combos.append((label, changes, cfg))
    return jobs, combos


def cmd_sweep(args) -> int:
    try:
        parsed = _load(args)
        out = Path(args.out)
        jobs, combos = sweep_jobs(parsed, out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.echo").write_text(config_to_text(parsed.run, parsed.sweep, parsed.name))
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(job) for job in jobs]
    results.sort(key=lambda r: r[0])

    param_names = list(parsed.run.params.scalar_items())
    lines = [",".join(param_names + ["blew_up", "peak", "t_max", "error"])]
    curves = []
    for (index, verdict, t, m, error), (label, _, cfg) in zip(results, combos):
        values = [str(v) for v in cfg.params.scalar_items().values()]
        if verdict is None:
            values += ["", "", "", error.replace(",", ";")]
        else:
            values += [str(verdict.blew_up).lower(), repr(verdict.peak_value),
                       "" if verdict.t_max_estimate is None else repr(verdict.t_max_estimate), ""]
            curves.append((label, t, m))
        lines.append(",".join(values))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    (out / "sweep.svg").write_text(svg_line_plot(curves, title=parsed.name or "sweep"))
    print((out / "sweep.csv").read_text(), end="")
    return 0


def cmd_presets(args) -> int:
    for name, (_, sweep, desc) in PRESETS.items():
        axes = f" [sweep: {', '.join(sweep)}]" if sweep else ""
        print(f"{name:12s} {desc}{axes}")
    if args.show:
        print()
        print(config_to_text(*_preset_parts(args.show)), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemofv", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="built-in configuration")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        if out:
            p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("regime", help="print the regime report; exit 2 if gamma fails")
    common(p, out=False)
    p.add_argument("--with-mass", action="store_true",
                   help="build the mesh to evaluate the mass bound")
    p.set_defaults(func=cmd_regime)
    p = sub.add_parser("run", help="run one simulation")
    common(p)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", help="run the Cartesian product of sweep axes")
    common(p)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("presets", help="list built-in presets")
    p.add_argument("--show", choices=sorted(PRESETS), help="print one preset's config")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
