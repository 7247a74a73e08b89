import xml.etree.ElementTree as ET

import numpy as np
import pytest

from chemofv.cli import main
from chemofv.config import (PRESETS, ConfigError, config_to_text, load_config, preset, preset_text,
                            simplex_width)
from chemofv.diagnostics import BlowupVerdict, TimeSeries
from chemofv.io import read_series_csv, svg_line_plot, write_series_csv, write_vtk
from chemofv.mesh import build_ball_mesh, build_box_mesh

CHEAP = """
[meta]
name = cheap
[params]
n = 1
chi = 1.0     # attraction
xi = 0.5
c = 0.01
gamma = 1.8
[mesh]
kind = box
dim = 1
lengths = 1.0
cells = 12
[run]
dt = 1e-3
t_end = 5e-3
u0 = expr:1 + x
[output]
snapshot_every = 5
"""


def test_series_csv_round_trip(tmp_path):
    s = TimeSeries()
    s.append(0.0, 1 / 3, 0.1, 2.0, 0.5, 0.0, 0.0, 0)
    s.append(1e-3, 2 / 3, 0.2, 2.0, 0.6, 0.0, 1e-17, 42)
    write_series_csv(s, tmp_path / "s.csv")
    back = read_series_csv(tmp_path / "s.csv")
    assert back.rows == s.rows
    (tmp_path / "bad.csv").write_text("a,b\n")
    with pytest.raises(ValueError):
        read_series_csv(tmp_path / "bad.csv")


@pytest.mark.parametrize("mesh,nv,ctype", [(build_box_mesh(1, 1.0, 4), 2, "3"),
                                           (build_ball_mesh(2, 1.0, 0.2), 4, "8"),
                                           (build_box_mesh(3, [1, 1, 1], [2, 3, 2]), 8, "11")])
def test_vtk_structure(tmp_path, mesh, nv, ctype):
    u = np.arange(mesh.n_cells, dtype=float)
    write_vtk(mesh, tmp_path / "m.vtk", {"u": u, "v": 2 * u})
    lines = (tmp_path / "m.vtk").read_text().splitlines()
    assert lines[0].startswith("# vtk DataFile") and lines[2] == "ASCII"
    i = lines.index(next(l for l in lines if l.startswith("CELLS")))
    assert lines[i] == f"CELLS {mesh.n_cells} {mesh.n_cells * (nv + 1)}"
    j = lines.index(f"CELL_TYPES {mesh.n_cells}")
    assert set(lines[j + 1:j + 1 + mesh.n_cells]) == {ctype}
    k = lines.index("SCALARS v double 1")
    np.testing.assert_allclose([float(x) for x in lines[k + 2:k + 2 + mesh.n_cells]], 2 * u)


def test_vtk_rejects_wrong_length(tmp_path):
    m = build_box_mesh(1, 1.0, 4)
    with pytest.raises(ValueError):
        write_vtk(m, tmp_path / "m.vtk", {"u": np.zeros(3)})


def test_svg_is_well_formed():
    svg = svg_line_plot([("a<b", [0, 1, 2], [1, 10, 100]), ("zero", [0, 1], [0, 0])], title="t&t")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 1
    ET.fromstring(svg_line_plot([], logy=False))


def test_config_round_trip():
    parsed = load_config(CHEAP)
    again = load_config(config_to_text(parsed.run, {"c": [0.0, 0.1]}, parsed.name))
    assert again.run == parsed.run and again.name == "cheap" and again.sweep == {"c": [0.0, 0.1]}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_round_trip(name):
    p = preset(name)
    back = load_config(preset_text(name))
    assert back.run == p.run and back.sweep == p.sweep


def test_overrides_and_aliases():
    parsed = load_config(CHEAP, ["lambda=2.5", "run.dt=2e-4", "window=7"])
    assert parsed.run.params.lambda_ == 2.5 and parsed.run.dt == 2e-4 and parsed.run.window == 7


@pytest.mark.parametrize("text,match", [("[params]\nchi 1\n", "line 2"),
                                        ("[params]\nbogus = 1\n", "unknown key"),
                                        ("[nowhere]\n", "unknown section"),
                                        ("chi = 1\n", "outside"),
                                        ("[params]\nchi = abc\n", "bad value"),
                                        ("[params]\nn = 2\n[mesh]\ndim = 3\n", "differs")])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        load_config(text)


def test_simplex_width():
    # equal cell measure: width^2 = sqrt(3)/4 h^2 before coarsening
    assert (simplex_width(2, 0.1, coarsen=1) ** 2) == pytest.approx(np.sqrt(3) / 4 * 0.01)
    assert (simplex_width(3, 0.1, coarsen=1) ** 3) == pytest.approx(1e-3 / (6 * np.sqrt(2)))


def test_regime_exit_codes(tmp_path, capsys):
    assert main(["regime", "--preset", "fig2a"]) == 0
    out = capsys.readouterr().out
    assert "theta_cap = 1.5" in out and "gamma_ok = true" in out
    assert main(["regime", "--preset", "fig2b"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("[params]\nchi = oops\n")
    assert main(["regime", "--config", str(bad)]) == 1


def test_run_writes_artefacts(tmp_path):
    cfg = tmp_path / "cheap.cfg"
    cfg.write_text(CHEAP)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"config.echo", "series.csv", "verdict.txt", "solver.csv", "maxu.svg"} <= names
    assert {"snapshot_000000.vtk", "snapshot_000005.vtk"} <= names
    series = read_series_csv(out / "series.csv")
    assert len(series) == 6
    BlowupVerdict.from_text((out / "verdict.txt").read_text())

    # determinism: rerunning from the echoed config reproduces the series exactly
    again = tmp_path / "again"
    assert main(["run", "--config", str(out / "config.echo"), "--out", str(again)]) == 0
    assert (again / "series.csv").read_text() == (out / "series.csv").read_text()


def test_sweep_product(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(CHEAP + "[sweep]\nchi = 0.5, 1.0, 2.0\nc = 0.0, 0.01, 0.1\n")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--workers", "2"]) == 0
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 9
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert {(float(r["chi"]), float(r["c"])) for r in rows} == \
        {(a, b) for a in (0.5, 1.0, 2.0) for b in (0.0, 0.01, 0.1)}
    assert all(r["error"] == "" for r in rows)
    ET.fromstring((out / "sweep.svg").read_text())


def test_sweep_without_axes_fails(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CHEAP)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_presets_listing(capsys):
    assert main(["presets", "--show", "fig4"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in PRESETS) and "m1 = 0.5, 1.0, 1.5" in out
