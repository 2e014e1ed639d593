"""The two resonant CPHASE protocols as pulse schedules, plus the runner.

Protocol one uses three resonant qubit-resonator pulses:

    step            transition   coupling    pulse area
    mapping         g2 <-> e2    quantized   pi/2        |e2,0> -> -i |g2,1>
    cphase          e1 <-> a1    quantized   pi          |e1,1> -> - |e1,1>
    back mapping    g2 <-> e2    quantized   3 pi/2      |g2,1> -> +i |e2,0>

and phases the |e1,e2> component of the input by pi.  Protocol two replaces
the auxiliary-level trick with a classically driven rotation of qubit 1:

    mapping         g2 <-> e2    quantized   pi/2
    rotate 1        e1 <-> a1    classical   pi/2        |e1> -> -i |a1>
    cphase          g1 <-> e1    quantized   pi          |g1,1> -> - |g1,1>
    rotate 1 back   e1 <-> a1    classical   pi/2
    back mapping    g2 <-> e2    quantized   pi/2

and phases the |e1,g2> component by pi.

Frame convention: every step is propagated in the interaction picture of that
step's uncoupled (diagonal) Hamiltonian, with the phase clock reset at the
step start.  Concretely, a step of duration tau contributes
exp(+i H0 tau) exp(-i H tau) with H0 the diagonal part of the step
Hamiltonian.  Under the RWA each resonant step then reduces to a pure Rabi
rotation of its doublet, the schedules above realize the ideal gates exactly,
and level energies of uncoupled levels drop out altogether.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolve import PropagationError, PropagationReport, propagate_const, propagate_timedep
from .hamiltonian import (
    DRIVE_TRANSITION,
    TRANSITIONS,
    CouplingSwitches,
    SystemParams,
    build_full,
    build_rwa,
    tune_resonant,
)
from .hilbert import (
    HilbertSpace,
    Operator,
    State,
    basis_index,
    inner_product,
    transition_op,
)

__all__ = [
    "QUANTIZED",
    "CLASSICAL",
    "MODELS",
    "PulseStep",
    "Protocol",
    "GateInput",
    "protocol_one",
    "protocol_two",
    "get_protocol",
    "pulse_duration",
    "maximally_entangled_input",
    "basis_inputs",
    "input_state",
    "ideal_cphase",
    "ideal_protocol_two_output",
    "ideal_output",
    "StepLog",
    "RunLog",
    "run_protocol",
    "run_protocol_with_log",
    "average_fidelity",
]

QUANTIZED = "quantized"
CLASSICAL = "classical"
MODELS = ("rwa", "full")


@dataclass(frozen=True)
class PulseStep:
    """One resonant pulse: which transition, what kind of coupling, what area."""

    transition: str
    coupling_kind: str
    pulse_area: float
    label: str

    def __post_init__(self) -> None:
        if self.transition not in TRANSITIONS:
            raise ValueError(f"unknown transition {self.transition!r}")
        if self.coupling_kind not in (QUANTIZED, CLASSICAL):
            raise ValueError(f"coupling_kind must be quantized or classical, got {self.coupling_kind!r}")
        if self.coupling_kind == CLASSICAL and self.transition != "e1a1":
            raise ValueError("the classical drive only addresses e1 <-> a1")
        if self.pulse_area <= 0:
            raise ValueError(f"pulse_area must be positive, got {self.pulse_area}")


@dataclass(frozen=True)
class Protocol:
    """Ordered pulse schedule."""

    id: str
    steps: tuple[PulseStep, ...]

    @property
    def quantized_transitions(self) -> tuple[str, ...]:
        seen: list[str] = []
        for step in self.steps:
            if step.coupling_kind == QUANTIZED and step.transition not in seen:
                seen.append(step.transition)
        return tuple(seen)


def protocol_one() -> Protocol:
    return Protocol(
        id="I",
        steps=(
            PulseStep("g2e2", QUANTIZED, math.pi / 2, "mapping"),
            PulseStep("e1a1", QUANTIZED, math.pi, "cphase"),
            PulseStep("g2e2", QUANTIZED, 3 * math.pi / 2, "back mapping"),
        ),
    )


def protocol_two() -> Protocol:
    return Protocol(
        id="II",
        steps=(
            PulseStep("g2e2", QUANTIZED, math.pi / 2, "mapping"),
            PulseStep("e1a1", CLASSICAL, math.pi / 2, "rotate qubit 1"),
            PulseStep("g1e1", QUANTIZED, math.pi, "cphase"),
            PulseStep("e1a1", CLASSICAL, math.pi / 2, "rotate qubit 1 back"),
            PulseStep("g2e2", QUANTIZED, math.pi / 2, "back mapping"),
        ),
    )


def get_protocol(protocol_id: str) -> Protocol:
    if protocol_id == "I":
        return protocol_one()
    if protocol_id == "II":
        return protocol_two()
    raise ValueError(f"unknown protocol id {protocol_id!r}, expected 'I' or 'II'")


def pulse_duration(step: PulseStep, params: SystemParams) -> float:
    """Duration realizing the step's pulse area.

    The rate is the step's coupling strength: the bare g for quantized steps
    (all schedule steps swap with the n = 0 <-> 1 doublet, so the sqrt(n+1)
    enhancement is 1) and the Rabi frequency Omega for classical steps.
    """
    if step.coupling_kind == QUANTIZED:
        rate = params.coupling(step.transition)
    else:
        rate = params.drive_amp
    if rate <= 0:
        raise ValueError(f"step {step.label!r} has zero coupling rate")
    return step.pulse_area / rate


@dataclass(frozen=True)
class GateInput:
    """Coefficients of |g1,g2>, |g1,e2>, |e1,g2>, |e1,e2>; the mode starts in |0>."""

    b1: complex
    b2: complex
    b3: complex
    b4: complex

    def __post_init__(self) -> None:
        total = sum(abs(b) ** 2 for b in self.coefficients)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"input coefficients must be normalized, got |b|^2 = {total}")

    @property
    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.b1), complex(self.b2), complex(self.b3), complex(self.b4))

    @classmethod
    def normalized(cls, b1: complex, b2: complex, b3: complex, b4: complex) -> "GateInput":
        norm = math.sqrt(sum(abs(b) ** 2 for b in (b1, b2, b3, b4)))
        if norm == 0.0:
            raise ValueError("cannot normalize all-zero coefficients")
        return cls(b1 / norm, b2 / norm, b3 / norm, b4 / norm)


def maximally_entangled_input() -> GateInput:
    """Equal-weight superposition of the four computational states."""
    return GateInput(0.5, 0.5, 0.5, 0.5)


def basis_inputs() -> tuple[GateInput, ...]:
    """The four computational basis states as gate inputs."""
    rows = np.eye(4)
    return tuple(GateInput(*row) for row in rows)


_COMPUTATIONAL = (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e"))


def _computational_indices(space: HilbertSpace) -> tuple[int, int, int, int]:
    return tuple(basis_index(space, q1, q2, 0) for q1, q2 in _COMPUTATIONAL)


def input_state(gate_input: GateInput, space: HilbertSpace) -> State:
    amps = np.zeros(space.total_dim, dtype=complex)
    for idx, b in zip(_computational_indices(space), gate_input.coefficients):
        amps[idx] = b
    return State(space, amps)


def ideal_cphase(gate_input: GateInput, theta: float, space: HilbertSpace) -> State:
    """Ideal gate output: the |e1,e2> coefficient picks up exp(i theta)."""
    b1, b2, b3, b4 = gate_input.coefficients
    out = GateInput(b1, b2, b3, b4 * np.exp(1j * theta))
    return input_state(out, space)


def ideal_protocol_two_output(gate_input: GateInput, space: HilbertSpace) -> State:
    """Ideal protocol-two output: the |e1,g2> coefficient flips sign."""
    b1, b2, b3, b4 = gate_input.coefficients
    return input_state(GateInput(b1, b2, -b3, b4), space)


def ideal_output(protocol: Protocol, gate_input: GateInput, space: HilbertSpace) -> State:
    if protocol.id == "I":
        return ideal_cphase(gate_input, math.pi, space)
    if protocol.id == "II":
        return ideal_protocol_two_output(gate_input, space)
    raise ValueError(f"no ideal output defined for protocol {protocol.id!r}")


@dataclass(frozen=True)
class StepLog:
    label: str
    duration: float
    steps_taken: int
    norm_drift: float
    max_local_error: float
    renormalized: bool


@dataclass(frozen=True)
class RunLog:
    steps: tuple[StepLog, ...]

    @property
    def total_norm_drift(self) -> float:
        return sum(s.norm_drift for s in self.steps)


def _step_switches(
    protocol: Protocol, step: PulseStep, off_mode: str, delta_off: float
) -> CouplingSwitches:
    active = (step.transition,) if step.coupling_kind == QUANTIZED else ()
    inactive = tuple(t for t in protocol.quantized_transitions if t not in active)
    return CouplingSwitches(active=active, inactive=inactive, off_mode=off_mode, delta_off=delta_off)


def run_protocol_with_log(
    protocol: Protocol,
    params: SystemParams,
    model: str,
    gate_input: GateInput,
    space: HilbertSpace,
    *,
    off_mode: str = "hard",
    delta_off: float = 3.0,
    integrator_tol: float = 1e-12,
    norm_tol: float = 1e-8,
) -> tuple[State, RunLog]:
    """Run a schedule end to end; returns the final state and per-step diagnostics.

    ``model`` chooses between the RWA ("rwa") and counter-rotating ("full")
    Hamiltonians.  Driven steps are integrated in the lab frame, so drive and
    qubit-resonator counter-rotating terms coexist without extra frame
    bookkeeping.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    rwa = model == "rwa"
    builder = build_rwa if rwa else build_full
    state = input_state(gate_input, space)
    logs: list[StepLog] = []
    for step in protocol.steps:
        switches = _step_switches(protocol, step, off_mode, delta_off)
        if step.coupling_kind == QUANTIZED:
            tuned = tune_resonant(params, step.transition)
            h_step = builder(tuned, switches, space)
            tau = pulse_duration(step, tuned)
            try:
                report = propagate_const(h_step, tau, state, norm_tol=norm_tol)
            except PropagationError as exc:
                raise PropagationError(f"step {step.label!r}: {exc}") from exc
            diag = np.real(np.diag(h_step.matrix))
        else:
            tuned = tune_resonant(params, DRIVE_TRANSITION)
            h_static = builder(tuned, switches, space).matrix
            tr = transition_op(space, 1, "e", "a")
            om = tuned.drive_amp
            wl = tuned.drive_freq
            if rwa:
                plus, minus = tr.plus.matrix, tr.minus.matrix

                def h_of_t(t: float) -> Operator:
                    phase = om * np.exp(-1j * wl * t)
                    return Operator(space, h_static + phase * plus + np.conj(phase) * minus)

            else:
                sx = tr.x.matrix

                def h_of_t(t: float) -> Operator:
                    return Operator(space, h_static + (2.0 * om * np.cos(wl * t)) * sx)

            tau = pulse_duration(step, tuned)
            try:
                report = propagate_timedep(
                    h_of_t, 0.0, tau, state, tol=integrator_tol, norm_tol=norm_tol
                )
            except PropagationError as exc:
                raise PropagationError(f"step {step.label!r}: {exc}") from exc
            diag = np.real(np.diag(h_static))
        # Interaction picture of the step's uncoupled Hamiltonian: undo the
        # phases of the diagonal part (coupling and drive terms are purely
        # off-diagonal, so diag equals the bare energies).
        state = State(space, np.exp(1j * diag * tau) * report.final_state.amplitudes)
        logs.append(
            StepLog(
                label=step.label,
                duration=tau,
                steps_taken=report.steps_taken,
                norm_drift=report.norm_drift,
                max_local_error=report.max_local_error,
                renormalized=report.renormalized,
            )
        )
    return state, RunLog(tuple(logs))


def run_protocol(
    protocol: Protocol,
    params: SystemParams,
    model: str,
    gate_input: GateInput,
    space: HilbertSpace,
    **kwargs,
) -> State:
    """Run a schedule end to end and return the final state."""
    state, _ = run_protocol_with_log(protocol, params, model, gate_input, space, **kwargs)
    return state


def average_fidelity(
    protocol: Protocol,
    params: SystemParams,
    model: str,
    space: HilbertSpace,
    **kwargs,
) -> float:
    """Mean fidelity against the ideal output over the four computational basis
    states plus the maximally entangled input."""
    inputs = (*basis_inputs(), maximally_entangled_input())
    total = 0.0
    for gate_input in inputs:
        final = run_protocol(protocol, params, model, gate_input, space, **kwargs)
        ref = ideal_output(protocol, gate_input, space)
        total += abs(inner_product(ref, final)) ** 2
    return total / len(inputs)
