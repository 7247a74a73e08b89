"""Per-step diagnostics and the sup-norm plateau blow-up criterion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

COLUMNS = ("t", "max_u", "min_u", "mass", "max_v", "max_w", "clamped_mass", "solver_iters")


@dataclass
class TimeSeries:
    rows: list = field(default_factory=list)
    rejected_at: Optional[float] = None
    rejection: str = ""
    solver_log: list = field(default_factory=list)
    damping_residual: list = field(default_factory=list)

    def append(self, t, max_u, min_u, mass, max_v, max_w, clamped_mass, solver_iters):
        if self.rows and not t > self.rows[-1][0]:
            raise ValueError(f"time must increase: {t} after {self.rows[-1][0]}")
        self.rows.append((float(t), float(max_u), float(min_u), float(mass), float(max_v),
                          float(max_w), float(clamped_mass), int(solver_iters)))

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[COLUMNS.index(name)] for row in self.rows])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def max_u(self) -> np.ndarray:
        return self.column("max_u")


@dataclass
class BlowupVerdict:
    blew_up: bool
    t_max_estimate: Optional[float]
    peak_value: float
    rationale: str
    growth_factor: float = 100.0
    window: int = 20
    plateau_tol: float = 0.02

    def to_text(self) -> str:
        t_max = "none" if self.t_max_estimate is None else repr(self.t_max_estimate)
        return (f"blew_up = {str(self.blew_up).lower()}\n"
                f"t_max_estimate = {t_max}\n"
                f"peak_value = {self.peak_value!r}\n"
                f"growth_factor = {self.growth_factor!r}\n"
                f"window = {self.window}\n"
                f"plateau_tol = {self.plateau_tol!r}\n"
                f"rationale = {self.rationale}\n")

    @classmethod
    def from_text(cls, text: str) -> "BlowupVerdict":
        kv = dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)
        return cls(blew_up=kv["blew_up"] == "true",
                   t_max_estimate=None if kv["t_max_estimate"] == "none" else float(kv["t_max_estimate"]),
                   peak_value=float(kv["peak_value"]),
                   rationale=kv["rationale"],
                   growth_factor=float(kv["growth_factor"]),
                   window=int(kv["window"]),
                   plateau_tol=float(kv["plateau_tol"]))


def detect_blowup(series: TimeSeries, growth_factor: float = 100.0, window: int = 20,
                  plateau_tol: float = 0.02) -> BlowupVerdict:
    """Blow-up = growth by ``growth_factor`` followed by a sup-norm plateau.

    A plateau is ``window`` consecutive samples whose spread (max - min)
    relative to their max stays below ``plateau_tol``. The estimated blow-up
    time is the first sample of the first such window after the growth. A
    run stopped by a rejected step after the growth also counts, with the
    rejection time as estimate.
    """
    if len(series) == 0:
        raise ValueError("empty series")
    if growth_factor <= 1 or window < 3 or not 0 < plateau_tol < 1:
        raise ValueError("need growth_factor > 1, window >= 3, 0 < plateau_tol < 1")
    knobs = dict(growth_factor=growth_factor, window=window, plateau_tol=plateau_tol)
    t, m = series.t, series.max_u
    peak = float(m.max())
    threshold = growth_factor * m[0]
    above = np.nonzero(m > threshold)[0]
    if len(above) == 0:
        return BlowupVerdict(False, None, peak,
                             f"max_u grew {peak / m[0]:.3g}x < {growth_factor:g}x", **knobs)
    start = above[0]
    for i in range(start, len(m) - window + 1):
        w = m[i:i + window]
        if (w.max() - w.min()) / w.max() < plateau_tol:
            return BlowupVerdict(True, float(t[i]), peak,
                                 f"growth {peak / m[0]:.3g}x then plateau from t={t[i]:.6g}",
                                 **knobs)
    if series.rejected_at is not None:
        return BlowupVerdict(True, float(series.rejected_at), peak, "CFL collapse after growth",
                             **knobs)
    return BlowupVerdict(False, None, peak,
                         f"growth {peak / m[0]:.3g}x but no plateau of {window} samples", **knobs)


@dataclass
class ComparisonReport:
    order: list            # labels sorted by t_max_estimate
    times: dict            # label -> t_max_estimate
    matches_declared: bool
    equal: bool

    def to_text(self) -> str:
        lines = [f"{label} t_max={self.times[label]!r}" for label in self.order]
        lines.append(f"ordering = {'equal' if self.equal else 'strict'}")
        lines.append(f"matches_declared = {str(self.matches_declared).lower()}")
        return "\n".join(lines) + "\n"


class NotComparable(ValueError):
    pass


def compare_blowup_times(verdicts: Sequence[tuple], declared: Optional[Sequence] = None,
                         rel_tie: float = 1e-12) -> ComparisonReport:
    """Sort blown-up runs by estimated blow-up time.

    ``declared`` gives a parameter value per verdict; the report says whether
    the time ordering strictly follows it in ascending order.
    """
    if len(verdicts) < 2:
        raise ValueError("need at least two verdicts")
    for label, v in verdicts:
        if not v.blew_up:
            raise NotComparable(f"not comparable: run {label!r} did not blow up")
    times = {label: v.t_max_estimate for label, v in verdicts}
    order = sorted(times, key=lambda lb: times[lb])
    ts = [times[lb] for lb in order]
    equal = all(abs(a - b) <= rel_tie * max(abs(a), abs(b)) for a, b in zip(ts, ts[1:]))
    matches = False
    if declared is not None:
        pairs = sorted(zip(declared, [v.t_max_estimate for _, v in verdicts]))
        matches = all(b[1] > a[1] and b[0] > a[0] for a, b in zip(pairs, pairs[1:]))
    return ComparisonReport(order, times, matches, equal)
