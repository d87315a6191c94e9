import numpy as np
import pytest
from scipy.linalg import expm

from helpers import random_trajectory
from invariant_stirap.core import PulseSchedule, adiabatic_frame, dark_state, mixing_angle
from invariant_stirap.errors import StepSizeError, ValidationError
from invariant_stirap.export import TRAJECTORY_COLUMNS, read_csv, trajectory_rows, write_csv
from invariant_stirap.invariant import invariant_eigenstates, lr_phase
from invariant_stirap.propagator import (
    SCHEMES,
    TimeGrid,
    convergence_check,
    magnus4_propagators,
    propagate,
    step_propagators,
)
from invariant_stirap.protocols import ProtocolSpec, design, perfect_epsilon, protocol1, synthesize_pulses

TF = 4.0
ZERO = PulseSchedule(lambda t: 0 * np.asarray(t, float), lambda t: 0 * np.asarray(t, float), TF)


def mode_overlaps(angles, traj):
    g, b, _, _ = angles(traj.times)
    phis = invariant_eigenstates(g, b)
    return np.stack([np.einsum("ti,ti->t", phi.conj(), traj.states) for phi in phis], axis=1)


def test_time_grid():
    g = TimeGrid(4.0, 100, 30)
    np.testing.assert_array_equal(g.sample_indices(), [0, 30, 60, 90, 100])
    assert g.dt == 0.04
    with pytest.raises(ValidationError):
        TimeGrid(4.0, 99)
    with pytest.raises(ValidationError):
        TimeGrid(4.0, 100, 0)
    with pytest.raises(ValidationError):
        TimeGrid(-1.0)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_zero_pulses_leave_state_unchanged(scheme):
    psi0 = np.array([0.6, 0.8j, 0.0])
    tr = propagate(ZERO, psi0, TimeGrid(TF, 200, 10), scheme=scheme)
    np.testing.assert_allclose(tr.states, np.tile(psi0, (len(tr.times), 1)), atol=1e-15)
    assert convergence_check(ZERO, psi0, TimeGrid(TF, 200)) == 0.0


def test_resonant_step_matches_expm(rng):
    _, pulses = protocol1(0.3, TF)
    t = rng.uniform(0, TF, 5)
    u = step_propagators(pulses, t, 0.05)
    for k, tk in enumerate(t):
        np.testing.assert_allclose(u[k], expm(-1j * 0.05 * pulses.hamiltonian(tk)), atol=1e-14)


def test_detuned_step_matches_expm(rng):
    _, pulses = protocol1(0.3, TF)
    pulses = pulses.with_detunings(0.7, -0.4)
    t = rng.uniform(0, TF, 5)
    u = step_propagators(pulses, t, 0.05)
    for k, tk in enumerate(t):
        np.testing.assert_allclose(u[k], expm(-1j * 0.05 * pulses.hamiltonian(tk)), atol=1e-13)


def test_magnus_steps_are_unitary(rng):
    pulses = synthesize_pulses(random_trajectory(rng))
    u = magnus4_propagators(pulses, np.linspace(0, 3.9, 7), 0.1)
    for m in u:
        np.testing.assert_allclose(m.conj().T @ m, np.eye(3), atol=1e-13)


def test_constant_detuned_hamiltonian_exact():
    pulses = PulseSchedule(lambda t: 1.3 + 0 * np.asarray(t, float), lambda t: 0.4 + 0 * np.asarray(t, float),
                           TF, 0.5, -0.2)
    psi0 = np.array([1, 0, 0], dtype=complex)
    tr = propagate(pulses, psi0, TimeGrid(TF, 100))
    np.testing.assert_allclose(tr.final_state, expm(-1j * TF * pulses.hamiltonian(0.0)) @ psi0, atol=1e-12)


def test_protocol1_fidelity(p1_design):
    tr = propagate(p1_design.pulses, p1_design.initial_state)
    assert abs(tr.final_state[2]) == pytest.approx(np.cos(0.2), abs=1e-6)
    assert np.cos(0.2) == pytest.approx(0.980067, abs=1e-6)


@pytest.mark.parametrize("eps", [perfect_epsilon(1), 0.2527])
def test_protocol3_perfect_transfer(eps):
    d = design(ProtocolSpec(3, eps, TF))
    tr = propagate(d.pulses, d.initial_state)
    assert tr.populations[-1, 2] == pytest.approx(1.0, abs=1e-6)
    assert tr.populations[:, 1].max() > 0.01


def test_convergence_check_examples(p1_design):
    fine = convergence_check(p1_design.pulses, p1_design.initial_state, TimeGrid(TF, 2000))
    coarse = convergence_check(p1_design.pulses, p1_design.initial_state, TimeGrid(TF, 100))
    assert fine <= 1e-8
    assert coarse > fine


@pytest.mark.parametrize("scheme,expected_order", [("midpoint", 2), ("magnus4", 4)])
def test_order_of_accuracy(p2_design, scheme, expected_order):
    errs = [convergence_check(p2_design.pulses, p2_design.initial_state, TimeGrid(TF, n), scheme)
            for n in (200, 400, 800)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert min(ratios) >= 3.5
    assert np.log2(ratios[-1]) == pytest.approx(expected_order, abs=0.3)


def test_step_size_error(p1_design):
    with pytest.raises(StepSizeError):
        propagate(p1_design.pulses, p1_design.initial_state, TimeGrid(TF, 100), tol=1e-12)
    tr = propagate(p1_design.pulses, p1_design.initial_state, TimeGrid(TF, 2000), tol=1e-8)
    assert len(tr.times) == 2001


def test_rejects_unnormalized_and_mismatched_grid(p1_design):
    with pytest.raises(ValidationError):
        propagate(p1_design.pulses, np.array([1, 1, 0]))
    with pytest.raises(ValidationError):
        propagate(p1_design.pulses, p1_design.initial_state, TimeGrid(5.0))
    with pytest.raises(ValidationError):
        propagate(p1_design.pulses, p1_design.initial_state, scheme="rk4")


@pytest.mark.parametrize("eps", [0.02, 0.2, 0.6])
def test_norm_conservation(eps):
    d = design(ProtocolSpec(1, eps, TF, initial_state_choice="bare1"))
    for scheme in SCHEMES:
        assert propagate(d.pulses, d.initial_state, scheme=scheme).norm_drift <= 1e-8


def test_mode_amplitudes_conserved(p1_design, p2_design, rng):
    for d in (p1_design, p2_design):
        psi0 = np.array([0.6, 0.0, 0.8j])  # overlaps all three modes
        tr = propagate(d.pulses, psi0)
        c = np.abs(mode_overlaps(d.angles, tr))
        assert np.max(np.abs(c - c[0])) <= 1e-6
    angles = random_trajectory(rng)
    tr = propagate(synthesize_pulses(angles), np.array([1, 0, 0], dtype=complex))
    c = np.abs(mode_overlaps(angles, tr))
    assert np.max(np.abs(c - c[0])) <= 1e-6


def test_phase_tracking(p1_design):
    angles, pulses = p1_design.angles, p1_design.pulses
    psi0 = np.array([1, 0, 0], dtype=complex)
    tr = propagate(pulses, psi0, TimeGrid(TF, 4000, 500))
    c = mode_overlaps(angles, tr)
    tracked = np.unwrap(np.angle(c[:, 1] / c[0, 1]))
    predicted = [lr_phase("+", angles, pulses, t) for t in tr.times]
    np.testing.assert_allclose(tracked, predicted, atol=1e-4)


def test_dark_state_following_adiabatic_limit():
    _, pulses = protocol1(0.2, TF)
    slow = pulses.stretched(100)
    n0 = adiabatic_frame(float(slow.omega_p(0.0)), float(slow.omega_s(0.0))).n0
    tr = propagate(slow, n0)
    overlap = np.abs(np.einsum("ti,ti->t", dark_state(mixing_angle(slow, tr.times)).conj(), tr.states))
    assert overlap.min() >= 0.999


def test_trajectory_export(tmp_path, p1_design):
    tr = propagate(p1_design.pulses, p1_design.initial_state, TimeGrid(TF, 400, 40))
    path = write_csv(tmp_path / "traj.csv", TRAJECTORY_COLUMNS, trajectory_rows(tr))
    header, data = read_csv(path)
    assert header == ["t_us", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "p1", "p2", "p3"]
    assert data.shape == (11, 10)
    np.testing.assert_allclose(data[:, 7:], tr.populations, atol=1e-11)
    np.testing.assert_allclose(data[:, 1] ** 2 + data[:, 2] ** 2, data[:, 7], atol=1e-11)
