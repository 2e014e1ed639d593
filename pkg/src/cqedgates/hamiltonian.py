"""Qubit-resonator and drive Hamiltonians with per-step coupling switches.

Units: hbar = 1 and every energy is an angular frequency in multiples of the
resonator frequency (omega_r = 1.0 by default).  The full builders keep the
counter-rotating pieces (sigma+ a-dagger and sigma- a) of each coupling term;
the RWA builders keep only the excitation-conserving pieces (sigma+ a and
sigma- a-dagger), i.e. the Jaynes-Cummings form.

Coupling switching is modelled two ways.  In ``hard`` mode an inactive
coupling is removed outright (g set to zero).  In ``detuned`` mode the
coupling stays at full strength but the transition is parked ``delta_off``
above resonance, which is closer to how frequency-tunable qubits are actually
switched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hilbert import (
    LEVELS,
    HilbertSpace,
    Operator,
    annihilation_op,
    level_projector,
    number_op,
    transition_op,
)

__all__ = [
    "TRANSITIONS",
    "DRIVE_TRANSITION",
    "QubitEnergies",
    "SystemParams",
    "CouplingSwitches",
    "bare_hamiltonian",
    "build_full",
    "build_rwa",
    "drive_interaction",
    "drive_hamiltonian",
    "tune_resonant",
    "excitation_number_op",
]

# Quantized (qubit-resonator) couplings that the protocols switch on and off.
TRANSITIONS = ("g1e1", "e1a1", "g2e2")
# Classical drive on qubit 1's e <-> a transition.
DRIVE_TRANSITION = "drive_e1a1"

_TRANSITION_LEVELS = {
    "g1e1": (1, "g", "e"),
    "e1a1": (1, "e", "a"),
    "g2e2": (2, "g", "e"),
}


@dataclass(frozen=True)
class QubitEnergies:
    """Level energies of one qubit, strictly increasing g < e < a."""

    g: float = 0.0
    e: float = 1.0
    a: float = 2.0

    def __post_init__(self) -> None:
        if not self.g < self.e < self.a:
            raise ValueError(f"level energies must satisfy g < e < a, got {self}")

    def level(self, name: str) -> float:
        if name not in LEVELS:
            raise ValueError(f"unknown level {name!r}")
        return float(getattr(self, name))


@dataclass(frozen=True)
class SystemParams:
    """Frequencies and couplings of the two-qubit, one-mode system.

    ``drive_amp`` is the Rabi frequency of the classical field on qubit 1's
    e <-> a transition and ``drive_freq`` its carrier frequency.  The field
    amplitude and dipole moment never enter separately, only their product.
    """

    omega_r: float = 1.0
    qubit1: QubitEnergies = QubitEnergies()
    qubit2: QubitEnergies = QubitEnergies()
    g_g1e1: float = 0.0
    g_e1a1: float = 0.0
    g_g2e2: float = 0.0
    drive_amp: float = 0.0
    drive_freq: float = 1.0

    def __post_init__(self) -> None:
        if self.omega_r <= 0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")
        for name in ("g_g1e1", "g_e1a1", "g_g2e2", "drive_amp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.drive_freq <= 0:
            raise ValueError(f"drive_freq must be positive, got {self.drive_freq}")

    def coupling(self, transition: str) -> float:
        _check_transition(transition)
        return float(getattr(self, f"g_{transition}"))

    def transition_gap(self, transition: str) -> float:
        qubit, lower, upper = _transition_levels(transition)
        energies = self.qubit1 if qubit == 1 else self.qubit2
        return energies.level(upper) - energies.level(lower)

    def with_gap(self, transition: str, gap: float) -> "SystemParams":
        """Copy with one transition frequency changed, other gaps preserved."""
        qubit, lower, upper = _transition_levels(transition)
        q = self.qubit1 if qubit == 1 else self.qubit2
        if (lower, upper) == ("g", "e"):
            new = QubitEnergies(g=q.g, e=q.g + gap, a=q.g + gap + (q.a - q.e))
        else:
            new = QubitEnergies(g=q.g, e=q.e, a=q.e + gap)
        return replace(self, **{f"qubit{qubit}": new})


def _check_transition(transition: str) -> None:
    if transition not in TRANSITIONS:
        raise ValueError(f"unknown transition {transition!r}, expected one of {TRANSITIONS}")


def _transition_levels(transition: str) -> tuple[int, str, str]:
    _check_transition(transition)
    return _TRANSITION_LEVELS[transition]


@dataclass(frozen=True)
class CouplingSwitches:
    """Which quantized couplings are on during a step and how the rest are off."""

    active: tuple[str, ...] = ()
    inactive: tuple[str, ...] = ()
    off_mode: str = "hard"
    delta_off: float = 3.0

    def __post_init__(self) -> None:
        for name in (*self.active, *self.inactive):
            _check_transition(name)
        overlap = set(self.active) & set(self.inactive)
        if overlap:
            raise ValueError(f"transitions cannot be both active and inactive: {sorted(overlap)}")
        if self.off_mode not in ("hard", "detuned"):
            raise ValueError(f"off_mode must be 'hard' or 'detuned', got {self.off_mode!r}")
        if self.off_mode == "detuned" and self.delta_off <= 0:
            raise ValueError(f"delta_off must be positive in detuned mode, got {self.delta_off}")


def _effective_terms(
    params: SystemParams, switches: CouplingSwitches
) -> tuple[SystemParams, list[tuple[str, float]]]:
    """Parked level energies and the (transition, g) coupling terms to include."""
    terms = [(t, params.coupling(t)) for t in switches.active]
    parked = params
    if switches.off_mode == "detuned":
        for t in switches.inactive:
            parked = parked.with_gap(t, params.omega_r + switches.delta_off)
            terms.append((t, params.coupling(t)))
    return parked, terms


def bare_hamiltonian(params: SystemParams, space: HilbertSpace) -> Operator:
    """Uncoupled Hamiltonian: level energies plus omega_r * a-dagger a."""
    h = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for qubit, energies in ((1, params.qubit1), (2, params.qubit2)):
        for name in LEVELS:
            h += energies.level(name) * level_projector(space, qubit, name).matrix
    h += params.omega_r * number_op(space).matrix
    return Operator(space, h)


def build_full(params: SystemParams, switches: CouplingSwitches, space: HilbertSpace) -> Operator:
    """Hamiltonian with counter-rotating terms: g sigma^x (a + a-dagger) per coupling."""
    parked, terms = _effective_terms(params, switches)
    h = np.array(bare_hamiltonian(parked, space).matrix, copy=True)
    a = annihilation_op(space).matrix
    field = a + a.conj().T
    for name, g in terms:
        qubit, lower, upper = _transition_levels(name)
        tr = transition_op(space, qubit, lower, upper)
        h += g * (tr.x.matrix @ field)
    return Operator(space, h)


def build_rwa(params: SystemParams, switches: CouplingSwitches, space: HilbertSpace) -> Operator:
    """Jaynes-Cummings Hamiltonian: g (sigma+ a + sigma- a-dagger) per coupling."""
    parked, terms = _effective_terms(params, switches)
    h = np.array(bare_hamiltonian(parked, space).matrix, copy=True)
    a = annihilation_op(space).matrix
    for name, g in terms:
        qubit, lower, upper = _transition_levels(name)
        tr = transition_op(space, qubit, lower, upper)
        half = tr.plus.matrix @ a
        h += g * (half + half.conj().T)
    return Operator(space, h)


def drive_interaction(
    params: SystemParams, t: float, space: HilbertSpace, rwa: bool = False
) -> Operator:
    """Lab-frame coupling of the classical field to qubit 1's e <-> a transition.

    The full form is 2 Omega cos(omega_L t) sigma^x; under the RWA only the
    co-rotating halves sigma+ e^{-i omega_L t} and sigma- e^{+i omega_L t}
    survive.
    """
    tr = transition_op(space, 1, "e", "a")
    om = params.drive_amp
    wl = params.drive_freq
    if rwa:
        phase = np.exp(-1j * wl * t)
        mat = om * (phase * tr.plus.matrix + np.conj(phase) * tr.minus.matrix)
    else:
        mat = (2.0 * om * np.cos(wl * t)) * tr.x.matrix
    return Operator(space, mat)


def drive_hamiltonian(
    params: SystemParams,
    t: float,
    space: HilbertSpace,
    frame: str = "lab",
    rwa: bool = False,
) -> Operator:
    """Semiclassical Hamiltonian of the driven e <-> a transition of qubit 1.

    In the lab frame this is the two driven level energies plus the drive
    coupling.  In the frame rotating at the qubit transition frequency the
    energies are absorbed and the coupling carries explicit phases
    e^{-+ i (omega_L - omega_ea) t} (co-rotating) and
    e^{+- i (omega_L + omega_ea) t} (counter-rotating); ``rwa=True`` drops the
    counter-rotating pair.
    """
    if frame == "lab":
        mat = (
            params.qubit1.e * level_projector(space, 1, "e").matrix
            + params.qubit1.a * level_projector(space, 1, "a").matrix
            + drive_interaction(params, t, space, rwa=rwa).matrix
        )
        return Operator(space, mat)
    if frame == "rotating":
        tr = transition_op(space, 1, "e", "a")
        om = params.drive_amp
        delta = params.drive_freq - params.transition_gap("e1a1")
        total = params.drive_freq + params.transition_gap("e1a1")
        coeff = np.exp(-1j * delta * t)
        if not rwa:
            coeff = coeff + np.exp(1j * total * t)
        mat = om * (coeff * tr.plus.matrix + np.conj(coeff) * tr.minus.matrix)
        return Operator(space, mat)
    raise ValueError(f"frame must be 'lab' or 'rotating', got {frame!r}")


def tune_resonant(params: SystemParams, transition: str) -> SystemParams:
    """Set one transition frequency on resonance, leaving other gaps untouched.

    Quantized transitions are tuned to omega_r; the drive transition is tuned
    to the drive carrier frequency.
    """
    if transition == DRIVE_TRANSITION:
        return params.with_gap("e1a1", params.drive_freq)
    _check_transition(transition)
    return params.with_gap(transition, params.omega_r)


def excitation_number_op(space: HilbertSpace, transitions: tuple[str, ...]) -> Operator:
    """Excitation counter conserved by the RWA couplings named in *transitions*.

    Photons count one each; for every named transition the upper level counts
    one more excitation than the lower level.
    """
    weights = {1: dict.fromkeys(LEVELS, 0.0), 2: dict.fromkeys(LEVELS, 0.0)}
    ordered = sorted(transitions, key=lambda t: LEVELS.index(_transition_levels(t)[1]))
    for name in ordered:
        qubit, lower, upper = _transition_levels(name)
        weights[qubit][upper] = weights[qubit][lower] + 1.0
    mat = np.array(number_op(space).matrix, copy=True)
    for qubit, table in weights.items():
        for level, w in table.items():
            if w != 0.0:
                mat += w * level_projector(space, qubit, level).matrix
    return Operator(space, mat)
