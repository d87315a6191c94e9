"""Figures of merit, closed-form predictions and parameter sweeps."""
from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import TARGET_MINUS_3, PulseSchedule, rad_per_us_to_2pi_mhz
from .errors import StirapError, ValidationError
from .export import write_csv, write_json
from .invariant import lr_phase
from .propagator import DEFAULT_SCHEME, DEFAULT_STEPS, TimeGrid, Trajectory, propagate
from .protocols import Design, ProtocolSpec, design
from .quadrature import integrate_smooth

SWEEP_AXES = ("epsilon", "delta", "t_f", "delta_p", "delta_3")


@dataclass(frozen=True)
class RunMetrics:
    fidelity_complex: complex
    avg_rabi: float
    energy_cost: float
    peak_p2: float
    peak_rabi: float
    norm_drift: float = 0.0

    @property
    def fidelity_mag(self) -> float:
        return abs(self.fidelity_complex)

    @property
    def fidelity_phase(self) -> float:
        return float(np.angle(self.fidelity_complex))

    def to_dict(self) -> dict:
        return {
            "fidelity_re": self.fidelity_complex.real,
            "fidelity_im": self.fidelity_complex.imag,
            "fidelity_mag": self.fidelity_mag,
            "fidelity_phase": self.fidelity_phase,
            "final_p3": self.fidelity_mag**2,
            "avg_rabi_rad_per_us": self.avg_rabi,
            "avg_rabi_2pi_mhz": rad_per_us_to_2pi_mhz(self.avg_rabi),
            "energy_cost_rad_per_us": self.energy_cost,
            "energy_cost_2pi_mhz": rad_per_us_to_2pi_mhz(self.energy_cost),
            "peak_p2": self.peak_p2,
            "peak_rabi_rad_per_us": self.peak_rabi,
            "peak_rabi_2pi_mhz": rad_per_us_to_2pi_mhz(self.peak_rabi),
            "norm_drift": self.norm_drift,
        }


def fidelity(final: np.ndarray) -> complex:
    """Overlap ``<-3|Psi>`` with ``|-3> = (0, 0, -1)``."""
    return complex(np.vdot(TARGET_MINUS_3, final))


def avg_rabi(pulses: PulseSchedule) -> float:
    """Time-averaged Rabi frequency ``(1/t_f) int sqrt(Wp^2 + Ws^2) dt``."""
    return integrate_smooth(pulses.rabi_rms, 0.0, pulses.t_f) / pulses.t_f


def energy_cost(pulses: PulseSchedule) -> float:
    """``int (Wp^2 + Ws^2) dt`` over the pulse (no ``1/t_f`` factor)."""
    return integrate_smooth(lambda t: pulses.rabi_rms(t) ** 2, 0.0, pulses.t_f)


def protocol1_avg_rabi_closed(epsilon: float, t_f: float) -> float:
    return np.pi / np.tan(epsilon) / t_f


def protocol1_energy_cost_closed(epsilon: float, t_f: float) -> float:
    return (np.pi / np.tan(epsilon)) ** 2 / t_f


def multimode_fidelity(epsilon: float, alpha_plus: float) -> float:
    """Overlap with ``|-3>`` when ``|1>`` is driven by a trajectory with
    ``gamma = eps`` at both ends and ``beta: 0 -> pi/2``.

    ``F = cos^2 eps + sin^2 eps cos(alpha_+)``; the mode-0 phase is zero.
    """
    return float(np.cos(epsilon) ** 2 + np.sin(epsilon) ** 2 * np.cos(alpha_plus))


def protocol3_fidelity_closed(epsilon: float) -> float:
    """``1 - sin^2 eps (1 - cos(pi / (2 sin eps)))``."""
    s = np.sin(epsilon)
    return float(1.0 - s**2 * (1.0 - np.cos(np.pi / (2.0 * s))))


class Sensitivity(NamedTuple):
    domega_s: float
    domega_p: float
    dfidelity: float


def sensitivity_closed(epsilon: float, t: float, t_f: float) -> Sensitivity:
    """Epsilon derivatives of the protocol-1 pulses and of ``F = cos eps``.

    ``dWs/deps = -pi cos(pi t / 2 t_f) / (t_f sin^2 eps)`` and the pump
    derivative has the matching ``sin`` time profile.
    """
    pref = -np.pi / (t_f * np.sin(epsilon) ** 2)
    phase = np.pi * t / (2.0 * t_f)
    return Sensitivity(pref * np.cos(phase), pref * np.sin(phase), -np.sin(epsilon))


def run_metrics(pulses: PulseSchedule, traj: Trajectory, n_peak: int = 4001) -> RunMetrics:
    t = np.linspace(0.0, pulses.t_f, n_peak)
    return RunMetrics(
        fidelity_complex=fidelity(traj.final_state),
        avg_rabi=avg_rabi(pulses),
        energy_cost=energy_cost(pulses),
        peak_p2=float(np.max(traj.populations[:, 1])),
        peak_rabi=float(np.max(pulses.rabi_rms(t))),
        norm_drift=traj.norm_drift,
    )


@dataclass(frozen=True)
class RunSpec:
    """Everything needed to reproduce one design + propagation."""

    protocol: ProtocolSpec
    delta_p: float = 0.0
    delta_3: float = 0.0
    n_steps: int = DEFAULT_STEPS
    scheme: str = DEFAULT_SCHEME

    def with_axis(self, axis: str, value: float) -> "RunSpec":
        if axis in ("epsilon", "delta", "t_f"):
            return dataclasses.replace(self, protocol=dataclasses.replace(self.protocol, **{axis: value}))
        if axis in ("delta_p", "delta_3"):
            return dataclasses.replace(self, **{axis: value})
        raise ValidationError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def predicted_fidelity(d: Design) -> float:
    """Invariant-theory prediction of ``|<-3|Psi(t_f)>|`` on resonance.

    Mode-0 starts give ``cos eps``; bare ``|1>`` starts use the multi-mode
    formula with the quadrature Lewis-Riesenfeld phase.
    """
    eps = d.spec.epsilon
    if not d.pulses.resonant:
        return float("nan")
    if d.spec.initial_state_choice == "mode0":
        return float(np.cos(eps))
    alpha = lr_phase("+", d.angles, d.pulses, d.angles.t_f)
    return abs(multimode_fidelity(eps, alpha))


def evaluate(run: RunSpec) -> tuple[Design, Trajectory, RunMetrics]:
    d = design(run.protocol, run.delta_p, run.delta_3)
    traj = propagate(d.pulses, d.initial_state, TimeGrid(d.pulses.t_f, run.n_steps), scheme=run.scheme)
    return d, traj, run_metrics(d.pulses, traj)


METRIC_COLUMNS = (
    "fidelity_mag", "fidelity_re", "fidelity_im", "fidelity_predicted", "final_p3",
    "avg_rabi_rad_per_us", "avg_rabi_2pi_mhz", "energy_cost_rad_per_us", "energy_cost_2pi_mhz",
    "peak_p2", "peak_rabi_rad_per_us", "norm_drift",
)


def _sweep_row(axis: str, value: float, run: RunSpec) -> dict:
    row = {axis: value}
    try:
        d, _, m = evaluate(run)
        md = m.to_dict()
        md["fidelity_predicted"] = predicted_fidelity(d)
        row.update({k: md[k] for k in METRIC_COLUMNS})
        row["error"] = ""
    except StirapError as exc:
        row.update({k: float("nan") for k in METRIC_COLUMNS})
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


@dataclass
class SweepTable:
    axis: str
    values: np.ndarray
    rows: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return [self.axis, *METRIC_COLUMNS, "error"]

    @property
    def failed(self) -> list[dict]:
        return [r for r in self.rows if r["error"]]

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self, path):
        cols = self.columns
        return write_csv(path, cols, [[r[c] for c in cols] for r in self.rows])

    def to_json(self, path):
        return write_json(path, {"axis": self.axis, "columns": self.columns,
                                 "config": self.config, "rows": self.rows})


def sweep(template: RunSpec, axis: str, values, workers: int = 1) -> SweepTable:
    """One design + propagate + metrics evaluation per axis value.

    Rows come back in axis order whatever ``workers`` is.  A failing row keeps
    its error message and the sweep continues.
    """
    if axis not in SWEEP_AXES:
        raise ValidationError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) == 0 or np.any(np.diff(values) <= 0):
        raise ValidationError("sweep values must be a non-empty strictly increasing sequence")

    jobs = []
    for v in values:
        try:
            jobs.append(template.with_axis(axis, float(v)))
        except StirapError as exc:
            jobs.append(exc)

    def run_one(v, job):
        if isinstance(job, Exception):
            row = {axis: v, **{k: float("nan") for k in METRIC_COLUMNS}}
            row["error"] = f"{type(job).__name__}: {job}"
            return row
        return _sweep_row(axis, v, job)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [None if isinstance(j, Exception) else pool.submit(_sweep_row, axis, float(v), j)
                       for v, j in zip(values, jobs)]
            rows = [run_one(float(v), j) if f is None else f.result()
                    for v, j, f in zip(values, jobs, futures)]
    else:
        rows = [run_one(float(v), j) for v, j in zip(values, jobs)]
    return SweepTable(axis, values, rows)
