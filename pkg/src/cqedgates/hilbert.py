"""Composite Hilbert space for two three-level qubits and one bosonic mode.

Each qubit has levels ``g``, ``e`` and the auxiliary level ``a``; the mode is a
Fock ladder truncated at ``fock_dim`` states.  The composite basis is ordered
as (qubit 1, qubit 2, photon number) with the photon index varying fastest:

    index = (q1 * 3 + q2) * fock_dim + n

All operators are dense complex matrices.  At the dimensions used here
(9 * fock_dim, a few hundred at most) dense algebra with LAPACK is faster and
far simpler than sparse bookkeeping.  Every object is immutable after
construction, so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LEVELS",
    "SLOTS",
    "HilbertSpace",
    "State",
    "Operator",
    "Transition",
    "basis_index",
    "basis_label",
    "identity",
    "annihilation_op",
    "creation_op",
    "number_op",
    "level_projector",
    "transition_op",
    "embed",
    "inner_product",
]

LEVELS = ("g", "e", "a")
SLOTS = ("qubit1", "qubit2", "mode")

_LEVEL_INDEX = {name: i for i, name in enumerate(LEVELS)}


def _level_index(level: str) -> int:
    try:
        return _LEVEL_INDEX[level]
    except KeyError:
        raise ValueError(f"unknown qubit level {level!r}, expected one of {LEVELS}") from None


def _qubit_axis(qubit: int) -> int:
    if qubit not in (1, 2):
        raise ValueError(f"qubit must be 1 or 2, got {qubit}")
    return qubit - 1


@dataclass(frozen=True)
class HilbertSpace:
    """Shape of the composite space: two qutrits and a truncated Fock ladder."""

    fock_dim: int
    qubit_levels: int = 3

    def __post_init__(self) -> None:
        if self.qubit_levels != 3:
            raise ValueError(f"qubit_levels is fixed at 3, got {self.qubit_levels}")
        if self.fock_dim < 2:
            raise ValueError(f"fock_dim must be at least 2, got {self.fock_dim}")

    @property
    def total_dim(self) -> int:
        return self.qubit_levels * self.qubit_levels * self.fock_dim

    def slot_dim(self, slot: str) -> int:
        if slot not in SLOTS:
            raise ValueError(f"unknown slot {slot!r}, expected one of {SLOTS}")
        return self.fock_dim if slot == "mode" else self.qubit_levels


@dataclass(frozen=True, eq=False)
class State:
    """Complex amplitude vector over the composite basis."""

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if amps.shape != (self.space.total_dim,):
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, "
                f"space needs {self.space.total_dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_basis(cls, space: HilbertSpace, q1_level: str, q2_level: str, n: int) -> "State":
        amps = np.zeros(space.total_dim, dtype=complex)
        amps[basis_index(space, q1_level, q2_level, n)] = 1.0
        return cls(space, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "State":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return State(self.space, self.amplitudes / n)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator on the composite space."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex, copy=True)
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, space needs ({d}, {d})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.abs(self.matrix).max()))
        return float(np.abs(self.matrix - self.matrix.conj().T).max()) <= tol * scale

    def apply(self, state: State) -> State:
        _check_same_space(self.space, state.space)
        return State(self.space, self.matrix @ state.amplitudes)

    def expectation(self, state: State) -> complex:
        _check_same_space(self.space, state.space)
        return complex(np.vdot(state.amplitudes, self.matrix @ state.amplitudes))

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_space(self.space, other.space)
        return Operator(self.space, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class Transition:
    """A single qubit transition: the swap term and its one-sided pieces.

    ``x`` is |upper><lower| + |lower><upper| (Hermitian), ``plus`` raises
    lower -> upper, ``minus`` lowers upper -> lower.
    """

    x: Operator
    plus: Operator
    minus: Operator


def _check_same_space(a: HilbertSpace, b: HilbertSpace) -> None:
    if a != b:
        raise ValueError(f"space mismatch: {a} vs {b}")


def basis_index(space: HilbertSpace, q1_level: str, q2_level: str, n: int) -> int:
    """Index of the product basis state |q1, q2, n> under the documented ordering."""
    i1 = _level_index(q1_level)
    i2 = _level_index(q2_level)
    n = int(n)
    if not 0 <= n < space.fock_dim:
        raise IndexError(f"photon number {n} outside 0..{space.fock_dim - 1}")
    return (i1 * space.qubit_levels + i2) * space.fock_dim + n


def basis_label(space: HilbertSpace, index: int) -> tuple[str, str, int]:
    """Inverse of :func:`basis_index`."""
    index = int(index)
    if not 0 <= index < space.total_dim:
        raise IndexError(f"basis index {index} outside 0..{space.total_dim - 1}")
    qq, n = divmod(index, space.fock_dim)
    i1, i2 = divmod(qq, space.qubit_levels)
    return LEVELS[i1], LEVELS[i2], n


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def _annihilation_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def annihilation_op(space: HilbertSpace) -> Operator:
    """Mode lowering operator a, with a|n> = sqrt(n) |n-1> and a|0> = 0."""
    return embed(_annihilation_matrix(space.fock_dim), "mode", space)


def creation_op(space: HilbertSpace) -> Operator:
    return annihilation_op(space).dagger()


def number_op(space: HilbertSpace) -> Operator:
    return embed(np.diag(np.arange(space.fock_dim, dtype=float)).astype(complex), "mode", space)


def level_projector(space: HilbertSpace, qubit: int, level: str) -> Operator:
    """|level><level| on the given qubit, identity elsewhere."""
    local = np.zeros((3, 3), dtype=complex)
    i = _level_index(level)
    local[i, i] = 1.0
    return embed(local, SLOTS[_qubit_axis(qubit)], space)


def transition_op(space: HilbertSpace, qubit: int, lower: str, upper: str) -> Transition:
    """Swap operator between two levels of one qubit, plus its one-sided pieces."""
    if lower == upper:
        raise ValueError(f"transition needs two distinct levels, got {lower!r} twice")
    lo = _level_index(lower)
    up = _level_index(upper)
    plus_local = np.zeros((3, 3), dtype=complex)
    plus_local[up, lo] = 1.0
    slot = SLOTS[_qubit_axis(qubit)]
    plus = embed(plus_local, slot, space)
    minus = embed(plus_local.conj().T, slot, space)
    return Transition(x=plus + minus, plus=plus, minus=minus)


def embed(local_op: np.ndarray, slot: str, space: HilbertSpace) -> Operator:
    """Kronecker embedding of a single-subsystem operator, consistent with basis_index."""
    local = np.asarray(local_op, dtype=complex)
    d = space.slot_dim(slot)
    if local.shape != (d, d):
        raise ValueError(f"local operator has shape {local.shape}, slot {slot!r} needs ({d}, {d})")
    factors = [
        np.eye(space.qubit_levels, dtype=complex),
        np.eye(space.qubit_levels, dtype=complex),
        np.eye(space.fock_dim, dtype=complex),
    ]
    factors[SLOTS.index(slot)] = local
    return Operator(space, np.kron(np.kron(factors[0], factors[1]), factors[2]))


def inner_product(x: State, y: State) -> complex:
    """<x|y>, conjugate-linear in the first argument."""
    _check_same_space(x.space, y.space)
    return complex(np.vdot(x.amplitudes, y.amplitudes))
