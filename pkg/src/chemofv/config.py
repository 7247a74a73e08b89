"""Flat ``key = value`` run configurations and the built-in figure presets.

A config has sections ``[params]``, ``[mesh]``, ``[run]``, ``[output]`` and
optionally ``[sweep]`` (comma-separated value lists for ModelParams fields).
``#`` starts a comment. :func:`config_to_text` writes a config that parses
back to an identical :class:`RunConfig`.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .params import ModelParams
from .stepper import RunConfig


class ConfigError(ValueError):
    pass


# Reference meshes are simplicial with diameter h; the Cartesian width with the
# same cell measure as a regular simplex of edge h is h*(measure factor).
SIMPLEX_WIDTH_FACTOR = {2: math.sqrt(math.sqrt(3) / 4), 3: (1 / (6 * math.sqrt(2))) ** (1 / 3)}
COARSEN = 2.0

_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(ModelParams) if f.name not in ("f1", "f2")}
_RUN_KEYS = {"dt", "t_end", "u0", "v0", "w0", "cfl_max", "eps_damp", "chem_tol", "density_tol",
             "seed", "damping_gradient"}
_OUTPUT_KEYS = {"output_every", "snapshot_every", "growth_factor", "window", "plateau_tol",
                "stop_on_blowup"}
_MESH_KEYS = {"kind", "dim", "radius", "h", "lengths", "cells"}
_ALIASES = {"lambda": "lambda_", "nonlocal": "nonlocal_"}


@dataclass
class ParsedConfig:
    run: RunConfig
    sweep: dict = field(default_factory=dict)   # field name -> list of values
    name: str = ""


def parse_sections(text: str) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {raw!r}")
            current = line[1:-1].strip()
            if current not in ("params", "mesh", "run", "output", "sweep", "meta"):
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside of any section")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        sections[current][key] = (value, lineno)
    return sections


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _param_value(name: str, text: str):
    f = _PARAM_FIELDS[name]
    if f.type in ("int", int):
        return int(text)
    if f.type in ("bool", bool):
        return _bool(text)
    return float(text)


def _convert(section: str, key: str, value: str, lineno: int):
    try:
        if section == "params":
            return _param_value(key, value)
        if section == "mesh":
            if key == "kind":
                return value
            if key == "dim":
                return int(value)
            if key in ("lengths",):
                return [float(s) for s in value.split(",")]
            if key == "cells":
                return [int(s) for s in value.split(",")]
            return float(value)
        if key in ("u0", "v0", "w0", "damping_gradient"):
            return None if value.lower() == "none" else value
        if key in ("seed", "output_every", "snapshot_every", "window"):
            return int(value)
        if key == "stop_on_blowup":
            return _bool(value)
        return float(value)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None


def load_config(text: str, overrides=()) -> ParsedConfig:
    sections = parse_sections(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        sect, _, key = key.rpartition(".")
        key = _ALIASES.get(key, key)
        if not sect:
            sect = ("params" if key in _PARAM_FIELDS else "mesh" if key in _MESH_KEYS
                    else "run" if key in _RUN_KEYS else "output" if key in _OUTPUT_KEYS else "")
            if not sect:
                raise ConfigError(f"override {item!r}: unknown key")
        sections.setdefault(sect, {})[key] = (value, 0)

    allowed = {"params": set(_PARAM_FIELDS), "mesh": _MESH_KEYS, "run": _RUN_KEYS,
               "output": _OUTPUT_KEYS, "sweep": set(_PARAM_FIELDS), "meta": {"name"}}
    values: dict = {s: {} for s in allowed}
    for sect, items in sections.items():
        for key, (value, lineno) in items.items():
            key = _ALIASES.get(key, key)
            if key not in allowed[sect]:
                raise ConfigError(f"line {lineno}: unknown key {key!r} in [{sect}]")
            if sect == "sweep":
                try:
                    values[sect][key] = [_param_value(key, v.strip()) for v in value.split(",")]
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: bad sweep values: {exc}") from None
            elif sect == "meta":
                values[sect][key] = value
            else:
                values[sect][key] = _convert(sect, key, value, lineno)

    try:
        params = ModelParams(**values["params"])
        mesh = dict(values["mesh"]) or None
        run_kwargs = {**values["run"], **values["output"]}
        if mesh is not None:
            run_kwargs["mesh"] = mesh
        cfg = RunConfig(params=params, **run_kwargs)
        if cfg.mesh.get("dim") not in (None, params.n):
            raise ValueError(f"mesh dim {cfg.mesh.get('dim')} differs from n={params.n}")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return ParsedConfig(run=cfg, sweep=values["sweep"], name=values["meta"].get("name", ""))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def config_to_text(cfg: RunConfig, sweep: dict | None = None, name: str = "") -> str:
    out = []
    if name:
        out += ["[meta]", f"name = {name}", ""]
    out.append("[params]")
    out += [f"{k} = {_fmt(v)}" for k, v in cfg.params.scalar_items().items()]
    out += ["", "[mesh]"]
    out += [f"{k} = {_fmt(v)}" for k, v in cfg.mesh.items()]
    out += ["", "[run]"]
    for key in sorted(_RUN_KEYS):
        value = getattr(cfg, key)
        out.append(f"{key} = {'none' if value is None else _fmt(value)}")
    out += ["", "[output]"]
    out += [f"{key} = {_fmt(getattr(cfg, key))}" for key in sorted(_OUTPUT_KEYS)]
    if sweep:
        out += ["", "[sweep]"]
        out += [f"{k} = {_fmt(v)}" for k, v in sweep.items()]
    return "\n".join(out) + "\n"


def simplex_width(dim: int, simplex_h: float, coarsen: float = COARSEN) -> float:
    return simplex_h * SIMPLEX_WIDTH_FACTOR[dim] * coarsen


def _fig1(**changes) -> RunConfig:
    params = ModelParams(n=3, tau=0, chi=5.0, xi=0.0, k=1.1).replace(**changes)
    return RunConfig(params=params,
                     mesh={"kind": "ball", "dim": 3, "radius": 1.0, "h": simplex_width(3, 4.4e-2)},
                     dt=1e-5 * COARSEN, t_end=3e-3, u0="gauss3d")


def _fig3(**changes) -> RunConfig:
    params = ModelParams(n=2, tau=0, chi=1.0, xi=1.0, alpha=1.5, k=1.1).replace(**changes)
    # dt is 8x below the proportionally coarsened 2e-6; larger steps hit the
    # Courant limit before the 100x growth, see README
    return RunConfig(params=params,
                     mesh={"kind": "ball", "dim": 2, "radius": 1.0, "h": simplex_width(2, 1.37e-2)},
                     dt=2.5e-7, t_end=3e-4, u0="gauss2d")


def _equilibrium() -> RunConfig:
    params = ModelParams(n=2, chi=0.0, xi=0.0, c=0.0, lambda_=1.0, mu=1.0)
    return RunConfig(params=params, mesh={"kind": "box", "dim": 2, "lengths": [1.0, 1.0],
                                          "cells": [16, 16]},
                     dt=1e-3, t_end=1.0, u0="constant(1)", window=20)


def _diffusion() -> RunConfig:
    params = ModelParams(n=2, chi=0.0, xi=0.0, c=0.0, lambda_=0.0, mu=0.0, k=1.0)
    return RunConfig(params=params, mesh={"kind": "ball", "dim": 2, "radius": 1.0, "h": 0.0324},
                     dt=1e-4, t_end=0.1, u0="gauss2d")


# calibrated on the default resolution: the suppressing c sits between
# 0.01 and 0.1 for gamma=1.4 and between 1 and 3 for gamma=1.1
FIG2B_LARGE_C = 1.0
FIG2C_LARGE_C = 10.0

PRESETS = {
    "equilibrium": (_equilibrium, None, "constant state u=1 with lambda=mu (fixed point)"),
    "diffusion": (_diffusion, None, "pure diffusion on a ~3000-cell disk (mass conservation)"),
    "fig1": (_fig1, None, "3D ball, chi=5, xi=0, c=0: chemotactic collapse"),
    "fig2a": (lambda: _fig1(c=1e-3, gamma=1.75), {"c": [0.0, 1e-3, 1e-2, 1e-1, 1.0]},
              "fig1 with gamma=1.75 > 1.5: any c>0 keeps u bounded"),
    "fig2b": (lambda: _fig1(c=1e-3, gamma=1.4), {"c": [0.0, 1e-3, 1e-2, 1e-1, FIG2B_LARGE_C]},
              "fig1 with gamma=1.4: small c collapses, large c suppresses"),
    "fig2c": (lambda: _fig1(c=1e-3, gamma=1.1), {"c": [0.0, 1e-3, 1e-1, 1.0, FIG2C_LARGE_C]},
              "fig1 with gamma=1.1: suppression needs a larger c"),
    "fig3": (_fig3, None, "2D disk attraction-repulsion, alpha=1.5, c=0: collapse"),
    "fig4": (_fig3, {"m1": [0.5, 1.0, 1.5]}, "fig3 swept over m1: blow-up time grows with m1"),
    "fig5": (lambda: _fig3(c=1e-3), {"gamma": [1.1, 1.4, 1.75]},
             "fig3 with c=1e-3 swept over gamma"),
}


def preset(name: str) -> ParsedConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    build, sweep, _ = PRESETS[name]
    return ParsedConfig(run=build(), sweep=dict(sweep or {}), name=name)


def preset_text(name: str) -> str:
    p = preset(name)
    return config_to_text(p.run, p.sweep, p.name)
