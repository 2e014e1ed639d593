"""State propagation under constant and explicitly time-dependent Hamiltonians.

Constant Hamiltonians are exponentiated exactly through a Hermitian
eigendecomposition, so the dominant code path (resonant pulse steps) carries
no integrator error.  Time-dependent Hamiltonians go through an embedded
Dormand-Prince 5(4) integrator with adaptive step control; a fixed-step
classic RK4 fallback is available for reproducibility studies.

Norm policy: drift of the state norm is always measured and reported.  If it
stays below ``norm_tol`` the state is rescaled and the rescaling is recorded
in the report; if it reaches ``norm_tol`` the propagation fails loudly.
Silent renormalization would mask truncation and step-size problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hilbert import Operator, State

__all__ = [
    "PropagationError",
    "PropagationReport",
    "propagate_const",
    "propagate_timedep",
    "amplitude_ode",
]


class PropagationError(RuntimeError):
    """Numerical failure during propagation (step underflow, norm drift, ...)."""


@dataclass(frozen=True, eq=False)
class PropagationReport:
    final_state: State
    norm_drift: float
    steps_taken: int
    max_local_error: float
    renormalized: bool = False


# Dormand-Prince 5(4) tableau.  The last row of A doubles as the 5th-order
# weights (FSAL: the 7th stage is the next step's first).
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_ERR = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


def _adaptive_rk45(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0: np.ndarray,
    tol: float,
    max_steps: int,
) -> tuple[np.ndarray, int, float]:
    """Integrate y' = f(t, y) from t0 to t1; returns (y1, accepted_steps, max_local_error)."""
    span = t1 - t0
    t = t0
    y = np.array(y0, dtype=complex, copy=True)
    if span == 0.0:
        return y, 0, 0.0

    k = [np.zeros_like(y) for _ in range(7)]
    k[0] = f(t, y)
    f_scale = float(np.linalg.norm(k[0]))
    y_scale = float(np.linalg.norm(y))
    h = min(span, 0.01 * (y_scale + tol) / (f_scale + tol))

    steps = 0
    attempts = 0
    max_err = 0.0
    tiny = 16.0 * np.finfo(float).eps
    while True:
        h = min(h, t1 - t)
        if h < tiny * max(abs(t), 1.0):
            raise PropagationError(
                f"step size underflow at t={t:.6g} (h={h:.3g}, {steps} steps accepted)"
            )
        for i in range(1, 6):
            yi = y + h * sum(aij * k[j] for j, aij in enumerate(_DP_A[i]))
            k[i] = f(t + _DP_C[i] * h, yi)
        # A's last row equals the 5th-order weights, so the 7th stage sits at
        # the candidate solution (FSAL).
        y5 = y + h * sum(aij * k[j] for j, aij in enumerate(_DP_A[6]))
        k[6] = f(t + h, y5)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_DP_ERR))
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y5)))
        err = float(np.sqrt(np.mean(np.abs(err_vec / scale) ** 2)))

        attempts += 1
        if attempts > max_steps:
            raise PropagationError(
                f"integration exceeded {max_steps} step attempts at t={t:.6g}"
            )

        if err <= 1.0:
            t += h
            y = y5
            k[0] = k[6]
            steps += 1
            max_err = max(max_err, float(np.linalg.norm(err_vec)))
            if t1 - t <= tiny * max(abs(t1), 1.0):
                return y, steps, max_err
        factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err ** -0.2
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))


def _fixed_rk4(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0: np.ndarray,
    step: float,
) -> tuple[np.ndarray, int]:
    span = t1 - t0
    y = np.array(y0, dtype=complex, copy=True)
    if span == 0.0:
        return y, 0
    n = max(1, math.ceil(span / step))
    h = span / n
    t = t0
    for _ in range(n):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + (h / 2) * k1)
        k3 = f(t + h / 2, y + (h / 2) * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y, n


def _require_hermitian(op: Operator, what: str) -> None:
    if not op.is_hermitian(1e-12):
        raise ValueError(f"{what} is not Hermitian within 1e-12 relative tolerance")


def _finish(
    space_state: State,
    y: np.ndarray,
    norm_in: float,
    norm_tol: float,
    steps: int,
    max_err: float,
) -> PropagationReport:
    norm_out = float(np.linalg.norm(y))
    drift = abs(norm_out - norm_in)
    if drift >= norm_tol:
        raise PropagationError(
            f"norm drift {drift:.3e} reached the tolerance {norm_tol:.3e} "
            f"after {steps} steps"
        )
    renormalized = drift > 1e-13
    if renormalized:
        y = y * (norm_in / norm_out)
    return PropagationReport(
        final_state=State(space_state.space, y),
        norm_drift=drift,
        steps_taken=steps,
        max_local_error=max_err,
        renormalized=renormalized,
    )


def propagate_const(
    H: Operator,
    duration: float,
    psi: State,
    *,
    norm_tol: float = 1e-9,
) -> PropagationReport:
    """Evolve psi under a constant Hermitian H for the given duration.

    Computes exp(-i H t) |psi> through an eigendecomposition, exact up to
    roundoff.
    """
    if H.space != psi.space:
        raise ValueError(f"space mismatch: {H.space} vs {psi.space}")
    if duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration}")
    _require_hermitian(H, "Hamiltonian")
    w, v = np.linalg.eigh(H.matrix)
    phases = np.exp(-1j * w * duration)
    y = v @ (phases * (v.conj().T @ psi.amplitudes))
    return _finish(psi, y, psi.norm(), norm_tol, steps=1, max_err=0.0)


def propagate_timedep(
    h_of_t: Callable[[float], Operator],
    t0: float,
    t1: float,
    psi: State,
    *,
    tol: float = 1e-9,
    norm_tol: float = 1e-9,
    max_steps: int = 2_000_000,
    fixed_step: float | None = None,
) -> PropagationReport:
    """Integrate the Schrodinger equation under H(t) from t0 to t1.

    ``tol`` controls the local error per step of the adaptive integrator.
    With ``fixed_step`` set, a classic RK4 with that step size is used instead
    and no local error estimate is available (reported as nan).
    """
    if t1 < t0:
        raise ValueError(f"t1 must not precede t0, got [{t0}, {t1}]")
    for t_check in (t0, t1):
        op = h_of_t(t_check)
        if op.space != psi.space:
            raise ValueError(f"space mismatch: {op.space} vs {psi.space}")
        _require_hermitian(op, f"H(t={t_check:.6g})")

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return -1j * (h_of_t(t).matrix @ y)

    if fixed_step is not None:
        if fixed_step <= 0:
            raise ValueError(f"fixed_step must be positive, got {fixed_step}")
        y, steps = _fixed_rk4(f, t0, t1, psi.amplitudes, fixed_step)
        max_err = float("nan")
    else:
        y, steps, max_err = _adaptive_rk45(f, t0, t1, psi.amplitudes, tol, max_steps)
    return _finish(psi, y, psi.norm(), norm_tol, steps, max_err)


def amplitude_ode(
    omega: float,
    omega_l: float,
    omega_ea: float,
    rwa: bool,
    t0: float,
    t1: float,
    c_e0: complex,
    c_a0: complex,
    *,
    tol: float = 1e-9,
    norm_tol: float = 1e-9,
    max_steps: int = 2_000_000,
) -> tuple[complex, complex]:
    """Rotating-frame amplitudes of a driven two-level transition.

    Integrates the coupled pair

        dC_e/dt = -i Omega (e^{+i (omega_L - omega_ea) t} + e^{-i (omega_L + omega_ea) t}) C_a
        dC_a/dt = -i Omega (e^{-i (omega_L - omega_ea) t} + e^{+i (omega_L + omega_ea) t}) C_e

    with ``rwa=True`` dropping the (omega_L + omega_ea) exponentials.  Serves
    as a small independent oracle for the driven steps of the full simulation.
    """
    norm0 = abs(c_e0) ** 2 + abs(c_a0) ** 2
    if abs(norm0 - 1.0) > 1e-9:
        raise ValueError(f"|C_e|^2 + |C_a|^2 must be 1, got {norm0}")
    delta = omega_l - omega_ea
    total = omega_l + omega_ea

    def f(t: float, y: np.ndarray) -> np.ndarray:
        coeff = np.exp(1j * delta * t)
        if not rwa:
            coeff = coeff + np.exp(-1j * total * t)
        return np.array(
            [-1j * omega * coeff * y[1], -1j * omega * np.conj(coeff) * y[0]],
            dtype=complex,
        )

    y0 = np.array([c_e0, c_a0], dtype=complex)
    y, steps, _ = _adaptive_rk45(f, t0, t1, y0, tol, max_steps)
    drift = abs(float(np.linalg.norm(y)) - 1.0)
    if drift >= norm_tol:
        raise PropagationError(
            f"amplitude norm drift {drift:.3e} reached the tolerance {norm_tol:.3e} "
            f"after {steps} steps"
        )
    return complex(y[0]), complex(y[1])
