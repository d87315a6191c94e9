"""Inverse engineering of pump/Stokes pulses from auxiliary angle trajectories.

Given ``gamma(t)`` and ``beta(t)``, the auxiliary equations

    gamma' = (Wp cos b - Ws sin b) / 2
    beta'  = tan g (Ws cos b + Wp sin b) / 2

are inverted for the Rabi frequencies.  Three transfer protocols are built on
top of that:

1. constant ``gamma = eps`` and linear ``beta``, started in the invariant
   mode ``phi_0``;
2. quartic ``gamma`` peaking at ``delta`` and smoothstep ``beta`` so both
   pulses switch on and off smoothly, started in ``phi_0``;
3. the pulses of protocol 1 applied to the bare state ``|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as P

from .core import BARE_1, PulseSchedule
from .errors import InvalidDelta, InvalidEpsilon, SingularAngle, ValidationError
from .invariant import AngleTrajectory, invariant_eigenstates

SINGULAR_SIN_GAMMA = 1e-6
SINGULAR_SCAN_POINTS = 10_000
BC_TOL = 1e-10

InitialChoice = Literal["mode0", "bare1"]


def _check_epsilon(epsilon: float) -> None:
    if not (np.isfinite(epsilon) and 0.0 < epsilon < np.pi / 2):
        raise InvalidEpsilon(f"epsilon must lie in (0, pi/2), got {epsilon!r}")


def _check_delta(delta: float) -> None:
    if delta is None or not (np.isfinite(delta) and 0.0 < delta <= np.pi / 2):
        raise InvalidDelta(f"delta must lie in (0, pi/2], got {delta!r}")


def _check_tf(t_f: float) -> None:
    if not (np.isfinite(t_f) and t_f > 0):
        raise ValidationError(f"t_f must be positive, got {t_f!r}")


@dataclass(frozen=True)
class ProtocolSpec:
    kind: int
    epsilon: float
    t_f: float = 4.0
    delta: float | None = None
    initial_state_choice: InitialChoice | None = None

    def __post_init__(self):
        if self.kind not in (1, 2, 3):
            raise ValidationError(f"protocol kind must be 1, 2 or 3, got {self.kind!r}")
        _check_epsilon(self.epsilon)
        _check_tf(self.t_f)
        if self.kind == 2:
            _check_delta(self.delta)
        elif self.delta is not None:
            raise ValidationError("delta only applies to protocol 2")
        choice = self.initial_state_choice
        if choice is None:
            choice = "bare1" if self.kind == 3 else "mode0"
            object.__setattr__(self, "initial_state_choice", choice)
        if choice not in ("mode0", "bare1"):
            raise ValidationError(f"initial state must be 'mode0' or 'bare1', got {choice!r}")
        if self.kind == 3 and choice != "bare1":
            raise ValidationError("protocol 3 always starts from the bare state |1>")


@dataclass(frozen=True)
class PolynomialAnsatz:
    """Quartic ``gamma`` and cubic ``beta`` with coefficients in powers of ``t``."""

    gamma_coeffs: tuple[float, ...]
    beta_coeffs: tuple[float, ...]
    t_f: float

    def trajectory(self) -> AngleTrajectory:
        gc = np.asarray(self.gamma_coeffs)
        bc = np.asarray(self.beta_coeffs)
        return AngleTrajectory(
            gamma=_horner(gc),
            beta=_horner(bc),
            gamma_dot=_horner(P.polyder(gc)),
            beta_dot=_horner(P.polyder(bc)),
            t_f=self.t_f,
        )


def _horner(coeffs):
    # np.polyval-equivalent with low per-call overhead; quadrature calls it
    # thousands of times with scalar t.
    coeffs = [float(c) for c in coeffs[::-1]]

    def poly(t):
        t = np.asarray(t, dtype=float)
        acc = coeffs[0] + 0.0 * t
        for c in coeffs[1:]:
            acc = acc * t + c
        return acc

    return poly


@dataclass(frozen=True)
class Design:
    spec: ProtocolSpec
    angles: AngleTrajectory
    pulses: PulseSchedule
    initial_state: np.ndarray
    ansatz: PolynomialAnsatz | None = None


def synthesize_pulses(angles: AngleTrajectory, delta_p: float = 0.0, delta_3: float = 0.0) -> PulseSchedule:
    """Rabi frequencies that make ``angles`` an exact invariant trajectory.

    ``Ws = 2(b' cot g cos b - g' sin b)`` and ``Wp = 2(b' cot g sin b + g' cos b)``.
    """
    scan = np.linspace(0.0, angles.t_f, SINGULAR_SCAN_POINTS)
    sg = np.sin(np.broadcast_to(np.asarray(angles.gamma(scan), float), scan.shape))
    bad = np.abs(sg) < SINGULAR_SIN_GAMMA
    # a zero of sin(gamma) between scan points shows up as a sign change
    bad[1:] |= np.signbit(sg[1:]) != np.signbit(sg[:-1])
    if np.any(bad):
        t_bad = scan[np.argmax(bad)]
        raise SingularAngle(f"|sin(gamma)| < {SINGULAR_SIN_GAMMA:g} at t={t_bad:.6g}: cot(gamma) diverges")

    def omega_s(t):
        g, b, gd, bd = angles(t)
        return 2.0 * (bd * np.cos(g) / np.sin(g) * np.cos(b) - gd * np.sin(b))

    def omega_p(t):
        g, b, gd, bd = angles(t)
        return 2.0 * (bd * np.cos(g) / np.sin(g) * np.sin(b) + gd * np.cos(b))

    return PulseSchedule(omega_p, omega_s, angles.t_f, delta_p, delta_3)


def auxiliary_rates(pulses: PulseSchedule, gamma, beta, t) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``(gamma', beta')`` implied by the pulses at given angles."""
    t = np.asarray(t, float)
    wp = np.asarray(pulses.omega_p(t), float)
    ws = np.asarray(pulses.omega_s(t), float)
    gd = 0.5 * (wp * np.cos(beta) - ws * np.sin(beta))
    bd = 0.5 * np.tan(gamma) * (ws * np.cos(beta) + wp * np.sin(beta))
    return gd, bd


def protocol1_angles(epsilon: float, t_f: float) -> AngleTrajectory:
    _check_epsilon(epsilon)
    _check_tf(t_f)
    rate = np.pi / (2.0 * t_f)
    return AngleTrajectory(
        gamma=lambda t: np.full(np.shape(t), epsilon),
        beta=lambda t: rate * np.asarray(t, float),
        gamma_dot=lambda t: np.zeros(np.shape(t)),
        beta_dot=lambda t: np.full(np.shape(t), rate),
        t_f=t_f,
    )


def protocol1(epsilon: float, t_f: float) -> tuple[AngleTrajectory, PulseSchedule]:
    """Constant ``gamma = epsilon``, ``beta = pi t / (2 t_f)``.

    The pulses are sine/cosine ramps of amplitude ``(pi/t_f) cot(epsilon)``.
    """
    angles = protocol1_angles(epsilon, t_f)
    return angles, synthesize_pulses(angles)


def protocol2_ansatz(epsilon: float, delta: float, t_f: float) -> PolynomialAnsatz:
    """Solve the boundary-value systems for the quartic/cubic ansatz.

    Conditions, with ``s = t / t_f``: ``gamma(0) = gamma(1) = eps``,
    ``gamma'(0) = gamma'(1) = 0``, ``gamma(1/2) = delta``; ``beta(0) = 0``,
    ``beta(1) = pi/2``, ``beta'(0) = beta'(1) = 0``.
    """
    _check_epsilon(epsilon)
    _check_delta(delta)
    _check_tf(t_f)

    def value_row(s, deg):
        return [s**j for j in range(deg + 1)]

    def slope_row(s, deg):
        return [j * s ** (j - 1) if j else 0.0 for j in range(deg + 1)]

    a_gamma = np.array([value_row(0, 4), slope_row(0, 4), value_row(1, 4), slope_row(1, 4), value_row(0.5, 4)])
    gamma_s = np.linalg.solve(a_gamma, [epsilon, 0.0, epsilon, 0.0, delta])
    a_beta = np.array([value_row(0, 3), slope_row(0, 3), value_row(1, 3), slope_row(1, 3)])
    beta_s = np.linalg.solve(a_beta, [0.0, 0.0, np.pi / 2, 0.0])

    scale_g = t_f ** -np.arange(5.0)
    scale_b = t_f ** -np.arange(4.0)
    return PolynomialAnsatz(tuple(gamma_s * scale_g), tuple(beta_s * scale_b), t_f)


def protocol2(epsilon: float, delta: float, t_f: float) -> tuple[PolynomialAnsatz, AngleTrajectory, PulseSchedule]:
    ansatz = protocol2_ansatz(epsilon, delta, t_f)
    angles = ansatz.trajectory()
    return ansatz, angles, synthesize_pulses(angles)


def protocol3(epsilon: float, t_f: float) -> tuple[PulseSchedule, np.ndarray]:
    """Protocol-1 pulses with the bare state ``|1>`` as the initial state."""
    _, pulses = protocol1(epsilon, t_f)
    return pulses, BARE_1.copy()


def perfect_epsilon(n: int) -> float:
    """``epsilon`` for which protocol 3 transfers perfectly: ``1/sin(eps) = 4n``."""
    if int(n) != n or n < 1:
        raise ValidationError(f"N must be a positive integer, got {n!r}")
    return float(np.arcsin(1.0 / (4 * int(n))))


def design(spec: ProtocolSpec, delta_p: float = 0.0, delta_3: float = 0.0) -> Design:
    """Angles, pulses and initial state for a protocol spec."""
    ansatz = None
    if spec.kind == 2:
        ansatz, angles, pulses = protocol2(spec.epsilon, spec.delta, spec.t_f)
    else:
        angles, pulses = protocol1(spec.epsilon, spec.t_f)
    if delta_p or delta_3:
        pulses = pulses.with_detunings(delta_p, delta_3)
    if spec.initial_state_choice == "bare1":
        psi0 = BARE_1.copy()
    else:
        g0, b0, _, _ = angles(0.0)
        psi0 = invariant_eigenstates(g0, b0)[0]
    return Design(spec, angles, pulses, psi0, ansatz)


@dataclass(frozen=True)
class BoundaryCheck:
    name: str
    value: float
    target: float

    @property
    def residual(self) -> float:
        return abs(self.value - self.target)

    @property
    def passed(self) -> bool:
        return self.residual <= BC_TOL


@dataclass(frozen=True)
class BoundaryReport:
    kind: int
    checks: list[BoundaryCheck] = field(default_factory=list)
    gamma_range: tuple[float, float] = (np.nan, np.nan)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[BoundaryCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "protocol": self.kind,
            "ok": self.ok,
            "gamma_min": self.gamma_range[0],
            "gamma_max": self.gamma_range[1],
            "checks": [
                {"name": c.name, "value": c.value, "target": c.target,
                 "residual": c.residual, "passed": c.passed}
                for c in self.checks
            ],
        }


def validate_boundary_conditions(angles: AngleTrajectory, kind: int, epsilon: float,
                                 delta: float | None = None) -> BoundaryReport:
    """Residual of every boundary condition that applies to protocol ``kind``."""
    tf = angles.t_f
    g0, b0, gd0, bd0 = (float(x) for x in angles(0.0))
    g1, b1, gd1, bd1 = (float(x) for x in angles(tf))
    checks = [
        BoundaryCheck("gamma(0)", g0, epsilon),
        BoundaryCheck("gamma_dot(0)", gd0, 0.0),
        BoundaryCheck("gamma(t_f)", g1, epsilon),
        BoundaryCheck("gamma_dot(t_f)", gd1, 0.0),
        BoundaryCheck("beta(0)", b0, 0.0),
        BoundaryCheck("beta(t_f)", b1, np.pi / 2),
    ]
    if kind == 2:
        if delta is None:
            raise ValidationError("protocol 2 boundary check needs delta")
        gm = float(angles(0.5 * tf)[0])
        checks += [
            BoundaryCheck("gamma(t_f/2)", gm, delta),
            BoundaryCheck("beta_dot(0)", bd0, 0.0),
            BoundaryCheck("beta_dot(t_f)", bd1, 0.0),
        ]
    g = angles(np.linspace(0.0, tf, 1001))[0]
    return BoundaryReport(kind, checks, (float(g.min()), float(g.max())))
