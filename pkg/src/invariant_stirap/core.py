"""Bare-basis states, spin-1 algebra, Hamiltonians and the adiabatic frame.

Units: time in microseconds, frequencies in rad/us, hbar = 1.  States are
plain ``complex128`` arrays of shape ``(3,)`` over the bare basis
``|1>, |2>, |3>``; operators are ``(3, 3)`` arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegeneratePulse, ValidationError

TWO_PI = 2.0 * np.pi

#: Target state ``|-3> = (0, 0, -1)``.
TARGET_MINUS_3 = np.array([0.0, 0.0, -1.0], dtype=complex)
BARE_1 = np.array([1.0, 0.0, 0.0], dtype=complex)

NORM_TOL = 1e-12


def rad_per_us_to_2pi_mhz(value):
    """Express an angular frequency in rad/us as a multiple of 2*pi*MHz."""
    return value / TWO_PI


def two_pi_mhz_to_rad_per_us(value):
    return value * TWO_PI


def state_vector(c1, c2=0.0, c3=0.0, *, tol: float = NORM_TOL) -> np.ndarray:
    """Build a normalized three-level state, rejecting non-unit input."""
    psi = np.array([c1, c2, c3], dtype=complex)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise ValidationError(f"state norm^2 = {norm2!r}, expected 1")
    return psi


def populations(psi: np.ndarray) -> np.ndarray:
    return np.abs(psi) ** 2


def is_hermitian(op: np.ndarray, tol: float = 1e-14) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= tol)


def spin1_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-1 generators K1, K2, K3 in the Lambda-system basis.

    They satisfy ``[K1, K2] = i K3`` and cyclic permutations.
    """
    k1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    k2 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
    k3 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex)
    return k1, k2, k3


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hamiltonian_resonant(omega_p, omega_s) -> np.ndarray:
    """On-resonance Hamiltonian ``(omega_p K1 + omega_s K2) / 2``.

    Accepts scalars or equal-shape arrays; array input returns a stack of
    matrices with shape ``(..., 3, 3)``.
    """
    return hamiltonian_detuned(omega_p, omega_s, 0.0, 0.0)


def hamiltonian_detuned(omega_p, omega_s, delta_p, delta_3) -> np.ndarray:
    """RWA Hamiltonian with diagonal ``(0, delta_p, delta_3)``."""
    omega_p, omega_s, delta_p, delta_3 = np.broadcast_arrays(
        np.asarray(omega_p, dtype=float),
        np.asarray(omega_s, dtype=float),
        np.asarray(delta_p, dtype=float),
        np.asarray(delta_3, dtype=float),
    )
    h = np.zeros(omega_p.shape + (3, 3), dtype=complex)
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * omega_p
    h[..., 1, 2] = h[..., 2, 1] = 0.5 * omega_s
    h[..., 1, 1] = delta_p
    h[..., 2, 2] = delta_3
    return h


@dataclass(frozen=True)
class PulseSchedule:
    """Pump and Stokes Rabi frequencies on ``[0, t_f]``.

    ``omega_p`` and ``omega_s`` are vectorized callables of time (us)
    returning rad/us.  Detunings are constants in rad/us.
    """

    omega_p: Callable[[np.ndarray], np.ndarray]
    omega_s: Callable[[np.ndarray], np.ndarray]
    t_f: float
    delta_p: float = 0.0
    delta_3: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.t_f) and self.t_f > 0):
            raise ValidationError(f"t_f must be positive, got {self.t_f!r}")
        if not (np.isfinite(self.delta_p) and np.isfinite(self.delta_3)):
            raise ValidationError("detunings must be finite")
        t = np.linspace(0.0, self.t_f, 257)
        if not (np.all(np.isfinite(self.omega_p(t))) and np.all(np.isfinite(self.omega_s(t)))):
            raise ValidationError("pulses are not finite on [0, t_f]")

    @property
    def resonant(self) -> bool:
        return self.delta_p == 0.0 and self.delta_3 == 0.0

    def rabi_rms(self, t):
        return np.hypot(self.omega_p(t), self.omega_s(t))

    def hamiltonian(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return hamiltonian_detuned(self.omega_p(t), self.omega_s(t), self.delta_p, self.delta_3)

    def with_detunings(self, delta_p: float = 0.0, delta_3: float = 0.0) -> "PulseSchedule":
        return PulseSchedule(self.omega_p, self.omega_s, self.t_f, delta_p, delta_3)

    def stretched(self, factor: float) -> "PulseSchedule":
        """Same amplitudes played ``factor`` times slower (``t_f -> factor * t_f``)."""
        if factor <= 0:
            raise ValidationError("stretch factor must be positive")
        op, os_ = self.omega_p, self.omega_s
        return PulseSchedule(
            lambda t: op(np.asarray(t) / factor),
            lambda t: os_(np.asarray(t) / factor),
            self.t_f * factor,
            self.delta_p,
            self.delta_3,
        )

    def sample(self, n: int = 401) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = np.linspace(0.0, self.t_f, n)
        return t, np.asarray(self.omega_p(t), float), np.asarray(self.omega_s(t), float)


@dataclass(frozen=True)
class AdiabaticFrame:
    theta: float
    omega_rms: float
    eigenvalues: tuple[float, float, float]  # (E_0, E_+, E_-)
    n0: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray


def adiabatic_frame(omega_p: float, omega_s: float) -> AdiabaticFrame:
    """Instantaneous eigensystem of the resonant Hamiltonian.

    The dark state ``n0 = (cos t, 0, -sin t)`` has eigenvalue 0 and the
    bright states ``(sin t, +-1, cos t)/sqrt(2)`` have ``+-Omega/2``, with
    ``tan t = omega_p / omega_s``.
    """
    omega = float(np.hypot(omega_p, omega_s))
    if omega == 0.0:
        raise DegeneratePulse("mixing angle undefined: both Rabi frequencies are zero")
    theta = float(np.arctan2(omega_p, omega_s))
    c, s = np.cos(theta), np.sin(theta)
    r = 1.0 / np.sqrt(2.0)
    return AdiabaticFrame(
        theta=theta,
        omega_rms=omega,
        eigenvalues=(0.0, 0.5 * omega, -0.5 * omega),
        n0=np.array([c, 0.0, -s], dtype=complex),
        n_plus=np.array([r * s, r, r * c], dtype=complex),
        n_minus=np.array([r * s, -r, r * c], dtype=complex),
    )


def mixing_angle(pulses: PulseSchedule, t) -> np.ndarray:
    """Mixing angle along a time grid, unwrapped onto a continuous branch."""
    t = np.asarray(t, dtype=float)
    op, os_ = np.asarray(pulses.omega_p(t), float), np.asarray(pulses.omega_s(t), float)
    if np.any(np.hypot(op, os_) == 0.0):
        raise DegeneratePulse("mixing angle undefined where both pulses vanish")
    return np.unwrap(np.arctan2(op, os_))


def dark_state(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape + (3,), dtype=complex)
    out[..., 0] = np.cos(theta)
    out[..., 2] = -np.sin(theta)
    return out


def adiabaticity_ratio(theta_dot: float, omega_rms: float) -> float:
    """``|theta_dot| / |Omega|``; small values mean the adiabatic regime."""
    if omega_rms == 0:
        raise DegeneratePulse("adiabaticity ratio undefined for zero Rabi frequency")
    return abs(theta_dot) / abs(omega_rms)
