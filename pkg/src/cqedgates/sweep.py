"""Fidelity sweeps over the normalized coupling strength and Fock-truncation
convergence checks."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .hamiltonian import SystemParams
from .hilbert import HilbertSpace, inner_product
from .metrics import leakage as state_leakage
from .protocols import (
    GateInput,
    get_protocol,
    ideal_output,
    maximally_entangled_input,
    run_protocol,
)
from .evolve import PropagationError

__all__ = [
    "DEFAULT_GRID",
    "ConvergenceError",
    "SweepPlan",
    "SweepRecord",
    "sweep_params",
    "evaluate_point",
    "run_sweep",
    "converge_fock",
]

# g / omega_r from 0.01 to 0.20 in steps of 0.005.
DEFAULT_GRID = tuple(round(0.01 + 0.005 * k, 3) for k in range(39))


class ConvergenceError(RuntimeError):
    """Fock truncation failed to converge below the dimension cap."""


@dataclass(frozen=True)
class SweepPlan:
    """One fidelity-versus-coupling curve: protocol, model and tolerances."""

    protocol_id: str = "I"
    model: str = "full"
    grid: tuple[float, ...] = DEFAULT_GRID
    gate_input: GateInput = maximally_entangled_input()
    fock_dim: int = 15
    off_mode: str = "hard"
    delta_off: float = 3.0
    drive_amp_ratio: float = 1.0
    integrator_tol: float = 1e-10
    norm_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.protocol_id not in ("I", "II"):
            raise ValueError(f"protocol_id must be 'I' or 'II', got {self.protocol_id!r}")
        if self.model not in ("rwa", "full"):
            raise ValueError(f"model must be 'rwa' or 'full', got {self.model!r}")
        if not self.grid:
            raise ValueError("grid must not be empty")
        for g in self.grid:
            if not 0.0 < g < 1.0:
                raise ValueError(f"grid values must lie in (0, 1), got {g}")
        if any(b >= a for a, b in zip(self.grid[1:], self.grid)):
            raise ValueError("grid values must be strictly increasing")
        if self.fock_dim < 2:
            raise ValueError(f"fock_dim must be at least 2, got {self.fock_dim}")
        if self.drive_amp_ratio <= 0:
            raise ValueError(f"drive_amp_ratio must be positive, got {self.drive_amp_ratio}")


@dataclass(frozen=True)
class SweepRecord:
    """One plotted point: coupling, fidelity against the ideal output, leakage."""

    g_over_omega_r: float
    fidelity: float
    leakage: float
    fock_dim: int
    wall_time: float
    error: str | None = None


def sweep_params(
    g: float, base: SystemParams | None = None, drive_amp_ratio: float = 1.0
) -> SystemParams:
    """System parameters for one sweep point: every coupling at strength g.

    The protocols use equal coupling strengths on all switched transitions and
    a drive Rabi frequency of ``drive_amp_ratio * g`` (1.0 by default, the
    equal-rate choice that makes quantized and classical pulses take the same
    time).
    """
    base = base if base is not None else SystemParams()
    return replace(
        base,
        g_g1e1=g,
        g_e1a1=g,
        g_g2e2=g,
        drive_amp=drive_amp_ratio * g,
    )


def _point_fidelity(plan: SweepPlan, g: float, fock_dim: int, base: SystemParams) -> tuple[float, float]:
    space = HilbertSpace(fock_dim)
    params = sweep_params(g, base=base, drive_amp_ratio=plan.drive_amp_ratio)
    protocol = get_protocol(plan.protocol_id)
    final = run_protocol(
        protocol,
        params,
        plan.model,
        plan.gate_input,
        space,
        off_mode=plan.off_mode,
        delta_off=plan.delta_off,
        integrator_tol=plan.integrator_tol,
        norm_tol=plan.norm_tol,
    )
    reference = ideal_output(protocol, plan.gate_input, space)
    fidelity = abs(inner_product(reference, final)) ** 2
    return fidelity, state_leakage(final)


def evaluate_point(
    plan: SweepPlan, g: float, fock_dim: int | None = None, base: SystemParams | None = None
) -> SweepRecord:
    """One sweep point; numerical failures are captured in the record."""
    n = plan.fock_dim if fock_dim is None else fock_dim
    base = base if base is not None else SystemParams()
    start = time.perf_counter()
    try:
        fidelity, leak = _point_fidelity(plan, g, n, base)
        err = None
    except PropagationError as exc:
        fidelity, leak, err = float("nan"), float("nan"), str(exc)
    return SweepRecord(
        g_over_omega_r=g,
        fidelity=fidelity,
        leakage=leak,
        fock_dim=n,
        wall_time=time.perf_counter() - start,
        error=err,
    )


def run_sweep(
    plan: SweepPlan, jobs: int = 1, base: SystemParams | None = None
) -> list[SweepRecord]:
    """Evaluate the whole grid; records come back in grid order.

    Points are independent pure computations, so ``jobs > 1`` evaluates them
    in a thread pool (LAPACK releases the GIL); the merge order and therefore
    the output is identical to the serial path.
    """
    if jobs <= 1:
        return [evaluate_point(plan, g, base=base) for g in plan.grid]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda g: evaluate_point(plan, g, base=base), plan.grid))


def converge_fock(
    plan: SweepPlan,
    g: float,
    start_n: int = 15,
    tol: float = 1e-4,
    cap: int = 256,
    base: SystemParams | None = None,
) -> tuple[int, float]:
    """Double the Fock dimension until the fidelity stops moving.

    Returns the smallest N with |F(N) - F(2N)| < tol and its fidelity.
    Raises :class:`ConvergenceError` if the next doubling would exceed *cap*.
    """
    if start_n < 4:
        raise ValueError(f"start_n must be at least 4, got {start_n}")
    if tol <= 0 and not math.isinf(tol):
        raise ValueError(f"tol must be positive, got {tol}")
    base = base if base is not None else SystemParams()
    n = start_n
    f_n, _ = _point_fidelity(plan, g, n, base)
    while True:
        if 2 * n > cap:
            raise ConvergenceError(
                f"fidelity at g={g} not converged below the Fock cap {cap} "
                f"(last N={n}, F={f_n:.6f})"
            )
        f_2n, _ = _point_fidelity(plan, g, 2 * n, base)
        if abs(f_n - f_2n) < tol:
            return n, f_n
        n, f_n = 2 * n, f_2n
