"""Fidelity and leakage diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import State, basis_index, inner_product

__all__ = ["GateScore", "state_fidelity", "leakage", "photon_tail", "gate_score"]


@dataclass(frozen=True)
class GateScore:
    fidelity: float
    leakage: float
    photon_tail: float


def state_fidelity(reference: State, actual: State) -> float:
    """|<reference|actual>|^2.  Symmetric and insensitive to global phases."""
    return abs(inner_product(reference, actual)) ** 2


def _computational_population(state: State) -> float:
    total = 0.0
    for q1 in ("g", "e"):
        for q2 in ("g", "e"):
            idx = basis_index(state.space, q1, q2, 0)
            total += abs(state.amplitudes[idx]) ** 2
    return total


def leakage(state: State) -> float:
    """Population outside the computational subspace with the mode in vacuum."""
    return 1.0 - _computational_population(state)


def photon_tail(state: State) -> float:
    """Population in Fock levels n >= 2."""
    space = state.space
    grid = np.abs(np.asarray(state.amplitudes).reshape(3, 3, space.fock_dim)) ** 2
    return float(grid[:, :, 2:].sum())


def gate_score(reference: State, actual: State) -> GateScore:
    return GateScore(
        fidelity=state_fidelity(reference, actual),
        leakage=leakage(actual),
        photon_tail=photon_tail(actual),
    )
