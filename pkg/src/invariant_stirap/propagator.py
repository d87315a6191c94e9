"""Time-dependent Schroedinger propagation, ``i dPsi/dt = H(t) Psi``.

Two exponential integrators are available:

``"magnus4"`` (default)
    fourth-order Magnus step from ``H`` at the two Gauss-Legendre nodes,
    ``exp(-i dt [(H1 + H2)/2 - i (sqrt(3) dt / 12) [H2, H1]])``.
``"midpoint"``
    ``exp(-i H(t_mid) dt)``, second order.

Every step is unitary to machine precision, so the norm is never
renormalized; its drift is a diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PulseSchedule, populations
from .errors import StepSizeError, ValidationError

DEFAULT_STEPS = 4000
SCHEMES = ("magnus4", "midpoint")
DEFAULT_SCHEME = "magnus4"
_GAUSS_OFFSET = np.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class TimeGrid:
    t_f: float
    n_steps: int = DEFAULT_STEPS
    sample_stride: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.t_f) and self.t_f > 0):
            raise ValidationError(f"t_f must be positive, got {self.t_f!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 100:
            raise ValidationError(f"n_steps must be an integer >= 100, got {self.n_steps!r}")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValidationError(f"sample_stride must be a positive integer, got {self.sample_stride!r}")

    @property
    def dt(self) -> float:
        return self.t_f / self.n_steps

    def sample_indices(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.sample_stride)
        if idx[-1] != self.n_steps:
            idx = np.append(idx, self.n_steps)
        return idx

    def refined(self, factor: int = 2) -> "TimeGrid":
        """Same sample times with ``factor`` times as many steps."""
        return TimeGrid(self.t_f, self.n_steps * factor, self.sample_stride * factor)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, 3)

    @property
    def populations(self) -> np.ndarray:
        return populations(self.states)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.sum(self.populations, axis=1) - 1.0)))

    def subsample(self, stride: int) -> "Trajectory":
        idx = np.arange(0, len(self.times), stride)
        if idx[-1] != len(self.times) - 1:
            idx = np.append(idx, len(self.times) - 1)
        return Trajectory(self.times[idx], self.states[idx])


def step_propagators(pulses: PulseSchedule, t_mid: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i H(t_mid) dt)`` for each midpoint, shape ``(n, 3, 3)``."""
    h = pulses.hamiltonian(t_mid)
    if pulses.resonant:
        # Spectrum {0, +-W/2} gives H^3 = (W/2)^2 H, so the exponential is a
        # quadratic polynomial in H.
        half_w = 0.5 * pulses.rabi_rms(t_mid)
        x = half_w * dt
        c1 = dt * np.sinc(x / np.pi)
        c2 = -0.5 * dt**2 * np.sinc(x / (2 * np.pi)) ** 2
        h2 = h @ h
        u = np.broadcast_to(np.eye(3, dtype=complex), h.shape).copy()
        u += -1j * c1[:, None, None] * h + c2[:, None, None] * h2
        return u
    return _expm_hermitian(h, dt)


def _expm_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * dt)
    return (v * phases[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def magnus4_propagators(pulses: PulseSchedule, t_start: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order Magnus step propagators for steps beginning at ``t_start``."""
    h1 = pulses.hamiltonian(t_start + (0.5 - _GAUSS_OFFSET) * dt)
    h2 = pulses.hamiltonian(t_start + (0.5 + _GAUSS_OFFSET) * dt)
    comm = h2 @ h1 - h1 @ h2
    h_eff = 0.5 * (h1 + h2) - 1j * (np.sqrt(3.0) * dt / 12.0) * comm
    h_eff = 0.5 * (h_eff + np.conj(np.swapaxes(h_eff, -1, -2)))
    return _expm_hermitian(h_eff, dt)


def propagate(pulses: PulseSchedule, initial: np.ndarray, grid: TimeGrid | None = None,
              tol: float | None = None, scheme: str = DEFAULT_SCHEME) -> Trajectory:
    """Evolve ``initial`` under ``pulses`` and return the sampled trajectory.

    If ``tol`` is given the run is repeated on a grid with twice the steps and
    :class:`StepSizeError` is raised when the two disagree by more than ``tol``.
    """
    if grid is None:
        grid = TimeGrid(pulses.t_f)
    if not np.isclose(grid.t_f, pulses.t_f, rtol=1e-12, atol=0):
        raise ValidationError(f"grid t_f={grid.t_f} does not match pulse t_f={pulses.t_f}")
    psi = np.asarray(initial, dtype=complex).reshape(3)
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValidationError("initial state is not normalized")

    if scheme not in SCHEMES:
        raise ValidationError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if tol is not None:
        err = convergence_check(pulses, psi, grid, scheme)
        if err > tol:
            raise StepSizeError(
                f"step-doubling deviation {err:.3g} exceeds tolerance {tol:.3g} at n_steps={grid.n_steps}"
            )

    dt = grid.dt
    t_start = np.arange(grid.n_steps) * dt
    if scheme == "magnus4":
        u = magnus4_propagators(pulses, t_start, dt)
    else:
        u = step_propagators(pulses, t_start + 0.5 * dt, dt)
    idx = grid.sample_indices()
    keep = np.zeros(grid.n_steps + 1, dtype=bool)
    keep[idx] = True

    states = np.empty((len(idx), 3), dtype=complex)
    states[0] = psi
    j = 1
    for k in range(grid.n_steps):
        psi = u[k] @ psi
        if keep[k + 1]:
            states[j] = psi
            j += 1
    return Trajectory(idx * dt, states)


def convergence_check(pulses: PulseSchedule, initial: np.ndarray, grid: TimeGrid,
                      scheme: str = DEFAULT_SCHEME) -> float:
    """Max amplitude difference between runs with ``n`` and ``2n`` steps."""
    coarse = propagate(pulses, initial, grid, scheme=scheme)
    fine = propagate(pulses, initial, grid.refined(2), scheme=scheme)
    return float(np.max(np.abs(coarse.states - fine.states)))
