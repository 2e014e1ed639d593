"""Resonant CPHASE gates for two three-level qubits coupled to one resonator.

Simulates both gate protocols under the Jaynes-Cummings (RWA) and the full
counter-rotating Hamiltonian, and quantifies how the gate fidelity degrades
as the coupling strength grows toward the ultrastrong regime.
"""

from .hilbert import (
    LEVELS,
    SLOTS,
    HilbertSpace,
    Operator,
    State,
    Transition,
    annihilation_op,
    basis_index,
    basis_label,
    creation_op,
    embed,
    identity,
    inner_product,
    level_projector,
    number_op,
    transition_op,
)
from .hamiltonian import (
    DRIVE_TRANSITION,
    TRANSITIONS,
    CouplingSwitches,
    QubitEnergies,
    SystemParams,
    bare_hamiltonian,
    build_full,
    build_rwa,
    drive_hamiltonian,
    drive_interaction,
    excitation_number_op,
    tune_resonant,
)
from .evolve import (
    PropagationError,
    PropagationReport,
    amplitude_ode,
    propagate_const,
    propagate_timedep,
)
from .protocols import (
    CLASSICAL,
    MODELS,
    QUANTIZED,
    GateInput,
    Protocol,
    PulseStep,
    RunLog,
    StepLog,
    average_fidelity,
    basis_inputs,
    get_protocol,
    ideal_cphase,
    ideal_output,
    ideal_protocol_two_output,
    input_state,
    maximally_entangled_input,
    protocol_one,
    protocol_two,
    pulse_duration,
    run_protocol,
    run_protocol_with_log,
)
from .metrics import GateScore, gate_score, leakage, photon_tail, state_fidelity
from .sweep import (
    DEFAULT_GRID,
    ConvergenceError,
    SweepPlan,
    SweepRecord,
    converge_fock,
    evaluate_point,
    run_sweep,
    sweep_params,
)

__version__ = "0.1.0"
