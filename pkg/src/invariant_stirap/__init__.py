"""Invariant-based inverse engineering of fast population transfer in
resonant three-level Lambda systems."""

__version__ = "0.1.0"

from .core import (
    BARE_1,
    TARGET_MINUS_3,
    AdiabaticFrame,
    PulseSchedule,
    adiabatic_frame,
    adiabaticity_ratio,
    hamiltonian_detuned,
    hamiltonian_resonant,
    spin1_operators,
    state_vector,
)
from .invariant import (
    AngleTrajectory,
    InvariantFrame,
    ModeDecomposition,
    commutator_defect,
    decompose,
    invariant_eigenstates,
    invariant_frame,
    invariant_matrix,
    lr_phase,
)
from .metrics import (
    RunMetrics,
    RunSpec,
    SweepTable,
    avg_rabi,
    energy_cost,
    fidelity,
    protocol3_fidelity_closed,
    sensitivity_closed,
    sweep,
)
from .propagator import TimeGrid, Trajectory, convergence_check, propagate
from .protocols import (
    PolynomialAnsatz,
    ProtocolSpec,
    design,
    perfect_epsilon,
    protocol1,
    protocol2,
    protocol3,
    synthesize_pulses,
    validate_boundary_conditions,
)
