"""Lewis-Riesenfeld invariant of the resonant Lambda Hamiltonian.

The invariant is parametrized by two auxiliary angles ``gamma(t)`` and
``beta(t)``.  Its eigenvectors are used with the fixed phase convention

    phi_0   = (cos g cos b, -i sin g, -cos g sin b)
    phi_+-  = (sin g cos b +- i sin b, i cos g, -sin g sin b +- i cos b) / sqrt(2)

so that overlaps carry deterministic phases.  ``phi_0`` is an exact
solution of the Schroedinger equation (its phase stays 0), while ``phi_+-``
pick up the phases ``alpha_+- = -+ int (beta' sin g + (Wp sin b + Ws cos b) cos g / 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import PulseSchedule, commutator, spin1_operators
from .errors import ValidationError
from .quadrature import integrate_smooth

DEFAULT_OMEGA_0 = 1.0

_MODES = {0: 0, "0": 0, 1: 1, "+": 1, -1: -1, "-": -1}


@dataclass(frozen=True)
class AngleTrajectory:
    """Auxiliary angles and their analytic time derivatives on ``[0, t_f]``.

    All four callables must be vectorized over time.
    """

    gamma: Callable[[np.ndarray], np.ndarray]
    beta: Callable[[np.ndarray], np.ndarray]
    gamma_dot: Callable[[np.ndarray], np.ndarray]
    beta_dot: Callable[[np.ndarray], np.ndarray]
    t_f: float

    def __post_init__(self):
        if not (np.isfinite(self.t_f) and self.t_f > 0):
            raise ValidationError(f"t_f must be positive, got {self.t_f!r}")

    def __call__(self, t):
        """Return ``(gamma, beta, gamma_dot, beta_dot)`` sampled at ``t``."""
        t = np.asarray(t, dtype=float)
        out = []
        for f in (self.gamma, self.beta, self.gamma_dot, self.beta_dot):
            v = np.asarray(f(t), dtype=float)
            out.append(v if v.shape == t.shape else np.broadcast_to(v, t.shape).copy())
        return tuple(out)

    def derivative_defect(self, n: int = 100, rel_step: float = 1e-6) -> float:
        """Largest mismatch between stored derivatives and central differences.

        Measured relative to ``max(1, |derivative|)`` so vanishing derivatives
        are compared absolutely.
        """
        h = rel_step * self.t_f
        t = np.linspace(h, self.t_f - h, n)
        worst = 0.0
        for f, df in ((self.gamma, self.gamma_dot), (self.beta, self.beta_dot)):
            fd = (np.asarray(f(t + h), float) - np.asarray(f(t - h), float)) / (2 * h)
            exact = np.broadcast_to(np.asarray(df(t), float), t.shape)
            worst = max(worst, float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact)))))
        return worst


@dataclass(frozen=True)
class InvariantFrame:
    matrix: np.ndarray
    phi_0: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    omega_0: float

    @property
    def eigenvalues(self) -> tuple[float, float, float]:
        """Eigenvalues ``(0, +omega_0/2, -omega_0/2)`` of :attr:`matrix`.

        The normalized labels are 0 and +-1; the constructed operator carries
        the extra factor ``omega_0 / 2``.
        """
        return 0.0, 0.5 * self.omega_0, -0.5 * self.omega_0


@dataclass(frozen=True)
class ModeDecomposition:
    c_0: complex
    c_plus: complex
    c_minus: complex
    alpha_0: float = 0.0
    alpha_plus: float = 0.0
    alpha_minus: float = 0.0

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.c_0, self.c_plus, self.c_minus])

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def invariant_matrix(gamma, beta, omega_0: float = DEFAULT_OMEGA_0) -> np.ndarray:
    """``(omega_0/2)(cos g sin b K1 + cos g cos b K2 + sin g K3)``."""
    k1, k2, k3 = spin1_operators()
    g = np.asarray(gamma, dtype=float)[..., None, None]
    b = np.asarray(beta, dtype=float)[..., None, None]
    return 0.5 * omega_0 * (np.cos(g) * np.sin(b) * k1 + np.cos(g) * np.cos(b) * k2 + np.sin(g) * k3)


def invariant_eigenstates(gamma, beta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvectors ``(phi_0, phi_+, phi_-)``; array input gives shape ``(..., 3)``."""
    g = np.asarray(gamma, dtype=float)
    b = np.asarray(beta, dtype=float)
    cg, sg, cb, sb = np.cos(g), np.sin(g), np.cos(b), np.sin(b)
    r = 1.0 / np.sqrt(2.0)
    phi_0 = np.stack([cg * cb + 0j, -1j * sg, -cg * sb + 0j], axis=-1)
    phi_p = r * np.stack([sg * cb + 1j * sb, 1j * cg, -sg * sb + 1j * cb], axis=-1)
    phi_m = r * np.stack([sg * cb - 1j * sb, 1j * cg, -sg * sb - 1j * cb], axis=-1)
    return phi_0, phi_p, phi_m


def invariant_frame(gamma: float, beta: float, omega_0: float = DEFAULT_OMEGA_0) -> InvariantFrame:
    phi_0, phi_p, phi_m = invariant_eigenstates(gamma, beta)
    return InvariantFrame(invariant_matrix(gamma, beta, omega_0), phi_0, phi_p, phi_m, omega_0)


def commutator_defect(h: np.ndarray, inv: np.ndarray) -> float:
    """Frobenius norm of ``[H, I]``."""
    return float(np.linalg.norm(commutator(h, inv)))


def lr_phase_rate(angles: AngleTrajectory, pulses: PulseSchedule, t) -> np.ndarray:
    """Integrand of ``-alpha_+``: ``beta' sin g + (Wp sin b + Ws cos b) cos g / 2``."""
    g, b, _, bd = angles(t)
    wp = np.asarray(pulses.omega_p(np.asarray(t, float)), float)
    ws = np.asarray(pulses.omega_s(np.asarray(t, float)), float)
    return bd * np.sin(g) + 0.5 * (wp * np.sin(b) + ws * np.cos(b)) * np.cos(g)


def lr_phase(mode, angles: AngleTrajectory, pulses: PulseSchedule, t: float) -> float:
    """Lewis-Riesenfeld phase of invariant mode ``mode`` (0, '+' or '-') at time ``t``.

    ``alpha_0`` vanishes identically; ``alpha_+ = -alpha_-`` is obtained by
    adaptive quadrature of :func:`lr_phase_rate`.
    """
    try:
        sign = _MODES[mode]
    except (KeyError, TypeError):
        raise ValidationError(f"unknown invariant mode {mode!r}") from None
    if not 0.0 <= t <= angles.t_f * (1 + 1e-12):
        raise ValidationError(f"t={t!r} outside [0, t_f]")
    if sign == 0:
        return 0.0
    integral = integrate_smooth(lambda x: lr_phase_rate(angles, pulses, x), 0.0, float(t))
    return -sign * integral


def decompose(state: np.ndarray, gamma: float, beta: float,
              alphas: tuple[float, float, float] | None = None) -> ModeDecomposition:
    """Project ``state`` on the invariant eigenbasis: ``c_n = <phi_n|state>``."""
    phis = invariant_eigenstates(gamma, beta)
    c = [complex(np.vdot(phi, state)) for phi in phis]
    a = alphas if alphas is not None else (0.0, 0.0, 0.0)
    return ModeDecomposition(c[0], c[1], c[2], *a)


def invariance_defect(angles: AngleTrajectory, pulses: PulseSchedule, t,
                      omega_0: float = DEFAULT_OMEGA_0, rel_step: float = 1e-6) -> np.ndarray:
    """Norm of ``dI/dt = dI/dt|explicit - i[I, H]`` at each time in ``t``.

    The explicit derivative uses central differences of step ``rel_step * t_f``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    h = rel_step * angles.t_f
    g_hi, b_hi, _, _ = angles(t + h)
    g_lo, b_lo, _, _ = angles(t - h)
    g, b, _, _ = angles(t)
    di_dt = (invariant_matrix(g_hi, b_hi, omega_0) - invariant_matrix(g_lo, b_lo, omega_0)) / (2 * h)
    inv = invariant_matrix(g, b, omega_0)
    ham = pulses.hamiltonian(t)
    total = di_dt - 1j * (inv @ ham - ham @ inv)
    return np.linalg.norm(total, axis=(-2, -1))
