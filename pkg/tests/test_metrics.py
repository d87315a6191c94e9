import json

import numpy as np
import pytest
from scipy.integrate import simpson

from invariant_stirap.core import rad_per_us_to_2pi_mhz as to_mhz
from invariant_stirap.errors import ValidationError
from invariant_stirap.metrics import (
    RunSpec,
    avg_rabi,
    energy_cost,
    evaluate,
    fidelity,
    multimode_fidelity,
    predicted_fidelity,
    protocol1_avg_rabi_closed,
    protocol1_energy_cost_closed,
    protocol3_fidelity_closed,
    sensitivity_closed,
    sweep,
)
from invariant_stirap.protocols import ProtocolSpec, design, perfect_epsilon, protocol1, protocol2

TF = 4.0


def test_fidelity_sign_convention():
    assert fidelity(np.array([0, 0, -1])) == 1
    f = fidelity(np.array([0, 0, 1]))
    assert f == -1 and abs(f) == 1 and np.angle(f) == pytest.approx(np.pi)


@pytest.mark.parametrize("eps,omega_mhz,energy_mhz", [(0.2527, 0.48, 5.89), (0.2, 0.62, 9.56)])
def test_published_averages(eps, omega_mhz, energy_mhz):
    _, pulses = protocol1(eps, TF)
    assert to_mhz(avg_rabi(pulses)) == pytest.approx(omega_mhz, abs=0.01)
    assert to_mhz(energy_cost(pulses)) == pytest.approx(energy_mhz, abs=0.01)


def test_published_averages_high_fidelity():
    _, pulses = protocol1(0.02, TF)
    assert to_mhz(avg_rabi(pulses)) == pytest.approx(6.25, rel=5e-3)
    assert to_mhz(energy_cost(pulses)) == pytest.approx(981.49, rel=5e-3)


@pytest.mark.parametrize("eps", [0.02, 0.1, 0.2, 0.2527, 0.5])
def test_quadrature_matches_closed_forms(eps):
    _, pulses = protocol1(eps, TF)
    assert avg_rabi(pulses) == pytest.approx(protocol1_avg_rabi_closed(eps, TF), rel=1e-9)
    assert energy_cost(pulses) == pytest.approx(protocol1_energy_cost_closed(eps, TF), rel=1e-9)


@pytest.mark.parametrize("eps,delta", [(0.2, np.pi / 4), (0.002, 0.05), (0.02, np.pi / 2)])
def test_protocol2_averages_against_direct_integration(eps, delta):
    """Oracle: |W| = 2 sqrt(beta'^2 cot^2 gamma + gamma'^2) from the closed-form
    polynomials, integrated by composite Simpson on a fine grid."""
    _, _, pulses = protocol2(eps, delta, TF)
    t = np.linspace(0, TF, 200_001)
    s = t / TF
    g = eps + 16 * (delta - eps) * s**2 * (1 - s) ** 2
    gd = 32 * (delta - eps) / TF * s * (1 - s) * (1 - 2 * s)
    bd = 3 * np.pi / TF * (s - s**2)
    w2 = 4 * (bd**2 / np.tan(g) ** 2 + gd**2)
    assert avg_rabi(pulses) == pytest.approx(simpson(np.sqrt(w2), x=t) / TF, rel=1e-8)
    assert energy_cost(pulses) == pytest.approx(simpson(w2, x=t), rel=1e-8)


def test_protocol3_closed_form():
    assert protocol3_fidelity_closed(0.2527) == pytest.approx(1.0, abs=1e-4)
    assert protocol3_fidelity_closed(0.1253) == pytest.approx(1.0, abs=1e-4)
    assert protocol3_fidelity_closed(perfect_epsilon(3)) == pytest.approx(1.0, abs=1e-14)
    expected = 1 - np.sin(0.2) ** 2 * (1 - np.cos(np.pi / (2 * np.sin(0.2))))
    assert protocol3_fidelity_closed(0.2) == expected < 1


def test_protocol3_closed_form_against_propagation():
    _, traj, m = evaluate(RunSpec(ProtocolSpec(3, 0.2, TF)))
    assert m.fidelity_complex.real == pytest.approx(protocol3_fidelity_closed(0.2), abs=1e-4)
    assert abs(m.fidelity_complex.imag) < 1e-6


def test_multimode_formula_protocol2_bare_start():
    d, _, m = evaluate(RunSpec(ProtocolSpec(2, 0.15, TF, np.pi / 3, "bare1")))
    assert m.fidelity_mag == pytest.approx(predicted_fidelity(d), abs=1e-6)
    assert multimode_fidelity(0.3, 0.0) == pytest.approx(1.0)


def test_sensitivity_examples():
    eps, t_f = 0.2, TF
    s = sensitivity_closed(eps, t_f, t_f)
    assert s.domega_s == pytest.approx(0.0, abs=1e-14)
    s = sensitivity_closed(eps, 0.0, t_f)
    assert s.dfidelity == pytest.approx(-0.1987, abs=1e-4)
    assert s.domega_s == pytest.approx(-np.pi / (4 * np.sin(eps) ** 2))
    assert s.domega_p == 0.0


@pytest.mark.parametrize("eps", [0.05, 0.2, 0.9])
def test_sensitivity_against_finite_differences(eps):
    h = 1e-6
    t = np.linspace(0, TF, 9)
    _, hi = protocol1(eps + h, TF)
    _, lo = protocol1(eps - h, TF)
    fd_s = (hi.omega_s(t) - lo.omega_s(t)) / (2 * h)
    fd_p = (hi.omega_p(t) - lo.omega_p(t)) / (2 * h)
    an = [sensitivity_closed(eps, tk, TF) for tk in t]
    scale = np.pi / TF / np.sin(eps) ** 2
    np.testing.assert_allclose([a.domega_s for a in an], fd_s, rtol=1e-6, atol=1e-6 * scale)
    np.testing.assert_allclose([a.domega_p for a in an], fd_p, rtol=1e-6, atol=1e-6 * scale)
    fd_f = (np.cos(eps + 1e-5) - np.cos(eps - 1e-5)) / 2e-5
    assert sensitivity_closed(eps, 0, TF).dfidelity == pytest.approx(fd_f, abs=1e-8)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.3])
def test_fidelity_from_mode0(eps):
    _, _, m = evaluate(RunSpec(ProtocolSpec(1, eps, TF)))
    assert m.fidelity_mag == pytest.approx(np.cos(eps), abs=1e-6)
    assert 0 <= m.fidelity_mag <= 1 + 1e-10 and m.energy_cost >= 0


@pytest.mark.parametrize("delta", [np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2])
def test_protocol2_midpoint_population(delta):
    _, traj, m = evaluate(RunSpec(ProtocolSpec(2, 0.2, TF, delta)))
    mid = np.argmin(np.abs(traj.times - TF / 2))
    assert traj.times[mid] == TF / 2
    assert traj.populations[mid, 1] == pytest.approx(np.sin(delta) ** 2, abs=1e-6)
    assert m.peak_p2 == pytest.approx(np.sin(delta) ** 2, abs=1e-6)


def test_sweep_protocol3_oscillates():
    eps = np.linspace(0.1, 0.4, 31)
    table = sweep(RunSpec(ProtocolSpec(3, 0.2, TF)), "epsilon", eps)
    f = table.column("fidelity_mag")
    np.testing.assert_allclose(f, [abs(protocol3_fidelity_closed(e)) for e in eps], atol=1e-4)
    interior = np.flatnonzero((f[1:-1] > f[:-2]) & (f[1:-1] > f[2:])) + 1
    assert len(interior) >= 1
    assert min(abs(eps[interior[-1]] - perfect_epsilon(1)), abs(eps[interior[-1]] - perfect_epsilon(2))) <= 0.01


def test_sweep_energy_vs_delta():
    table = sweep(RunSpec(ProtocolSpec(2, 0.2, TF, 0.5)), "delta", [0.05, np.pi / 2])
    e = table.column("energy_cost_rad_per_us")
    assert e[1] < e[0]


def test_sweep_records_row_errors():
    table = sweep(RunSpec(ProtocolSpec(1, 0.2, TF)), "epsilon", [-0.1, 0.2, 2.0])
    assert [bool(r["error"]) for r in table.rows] == [True, False, True]
    assert "InvalidEpsilon" in table.rows[0]["error"]
    assert np.isnan(table.rows[0]["fidelity_mag"])


def test_sweep_validation():
    run = RunSpec(ProtocolSpec(1, 0.2, TF))
    with pytest.raises(ValidationError):
        sweep(run, "omega", [0.1, 0.2])
    with pytest.raises(ValidationError):
        sweep(run, "epsilon", [0.2, 0.1])


def test_sweep_parallel_matches_serial(tmp_path):
    run = RunSpec(ProtocolSpec(1, 0.2, TF), n_steps=400)
    vals = np.linspace(-0.3, 0.3, 5)
    serial = sweep(run, "delta_p", vals)
    parallel = sweep(run, "delta_p", vals, workers=2)
    serial.to_csv(tmp_path / "a.csv")
    parallel.to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    f = serial.column("fidelity_mag")
    assert f[2] == pytest.approx(np.cos(0.2), abs=1e-6)
    # detuning changes the fidelity smoothly and symmetrically
    assert f[1] == pytest.approx(f[3], abs=1e-9)
    assert abs(f[1] - f[2]) < abs(f[0] - f[2])


def test_sweep_json_export(tmp_path):
    table = sweep(RunSpec(ProtocolSpec(1, 0.2, TF), n_steps=200), "t_f", [2.0, 4.0])
    table.to_json(tmp_path / "s.json")
    data = json.loads((tmp_path / "s.json").read_text())
    assert data["axis"] == "t_f" and data["columns"][0] == "t_f"
    assert len(data["rows"]) == 2 and data["rows"][1]["t_f"] == 4.0
    assert data["rows"][0]["fidelity_predicted"] == pytest.approx(np.cos(0.2))
