"""Command-line front end: run one gate, sweep the coupling, check truncation.

Exit codes: 0 on success, 1 on input or validation problems, 2 on numerical
failures.  Every output artifact starts with ``#``-prefixed lines echoing the
effective configuration, so results are self-describing; numbers are printed
with 9 significant digits and LF line endings, which makes repeated runs
byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import yaml

from .evolve import PropagationError
from .hamiltonian import QubitEnergies, SystemParams
from .protocols import GateInput
from .sweep import ConvergenceError, SweepPlan, SweepRecord, converge_fock, evaluate_point, run_sweep

__all__ = ["CliError", "build_parser", "main", "records_to_csv"]

CSV_HEADER = "g_over_omega_r,fidelity,leakage,fock_dim"

_DEFAULTS = {
    "protocol": 1,
    "model": "full",
    "fock_dim": 15,
    "off_mode": "hard",
    "delta_off": 3.0,
    "omega_r": 1.0,
    "qubit1": {"g": 0.0, "e": 1.0, "a": 2.0},
    "qubit2": {"g": 0.0, "e": 1.0, "a": 2.0},
    "drive_freq": 1.0,
    "drive_amp_ratio": 1.0,
    "integrator_tol": 1e-10,
    "norm_tol": 1e-6,
    "input": {"b1": 0.5, "b2": 0.5, "b3": 0.5, "b4": 0.5},
    "sweep_from": 0.01,
    "sweep_to": 0.20,
    "sweep_points": 39,
    "jobs": 1,
}

_CONFIG_KEYS = set(_DEFAULTS)


class CliError(Exception):
    """Invalid flags, unreadable config or out-of-range inputs."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003 - argparse hook
        raise CliError(message)


def _fmt(x: float) -> str:
    return f"{float(x):.9g}"


def _coeff(value) -> complex:
    """Config coefficients: a plain number or a [real, imag] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise CliError(f"complex coefficient needs [real, imag], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value), 0.0)


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise CliError(f"cannot read config {path!r}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CliError(f"config {path!r} must be a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merged_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in _DEFAULTS.items()}
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    overrides = {
        "protocol": getattr(args, "protocol", None),
        "model": getattr(args, "model", None),
        "fock_dim": getattr(args, "fock", None),
        "off_mode": getattr(args, "off_mode", None),
        "delta_off": getattr(args, "delta_off", None),
        "sweep_from": getattr(args, "sweep_from", None),
        "sweep_to": getattr(args, "sweep_to", None),
        "sweep_points": getattr(args, "sweep_points", None),
        "jobs": getattr(args, "jobs", None),
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def _base_params(cfg: dict) -> SystemParams:
    try:
        return SystemParams(
            omega_r=float(cfg["omega_r"]),
            qubit1=QubitEnergies(**{k: float(v) for k, v in cfg["qubit1"].items()}),
            qubit2=QubitEnergies(**{k: float(v) for k, v in cfg["qubit2"].items()}),
            drive_freq=float(cfg["drive_freq"]),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad system parameters: {exc}") from exc


def _gate_input(cfg: dict) -> GateInput:
    spec = cfg["input"]
    try:
        return GateInput(*(_coeff(spec[k]) for k in ("b1", "b2", "b3", "b4")))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad input coefficients: {exc}") from exc


def _plan(cfg: dict, grid: tuple[float, ...]) -> SweepPlan:
    try:
        return SweepPlan(
            protocol_id="I" if int(cfg["protocol"]) == 1 else "II",
            model=str(cfg["model"]),
            grid=grid,
            gate_input=_gate_input(cfg),
            fock_dim=int(cfg["fock_dim"]),
            off_mode=str(cfg["off_mode"]),
            delta_off=float(cfg["delta_off"]),
            drive_amp_ratio=float(cfg["drive_amp_ratio"]),
            integrator_tol=float(cfg["integrator_tol"]),
            norm_tol=float(cfg["norm_tol"]),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _check_g(g: float) -> float:
    if not 0.0 < g < 1.0:
        raise CliError(f"g/omega_r must lie strictly inside (0, 1), got {g}")
    return g


def config_header(cfg: dict, extra: dict | None = None) -> list[str]:
    """Deterministic ``# key = value`` lines echoing the effective configuration."""
    flat: dict[str, object] = {}
    for key, value in cfg.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                flat[f"{key}.{sub}"] = v
        else:
            flat[key] = value
    if extra:
        flat.update(extra)
    lines = []
    for key in sorted(flat):
        value = flat[key]
        if isinstance(value, complex):
            text = f"{_fmt(value.real)}{value.imag:+.9g}j"
        elif isinstance(value, float):
            text = _fmt(value)
        else:
            text = str(value)
        lines.append(f"# {key} = {text}")
    return lines


def records_to_csv(records: Sequence[SweepRecord], header_lines: Sequence[str] = ()) -> str:
    lines = list(header_lines)
    lines.append(CSV_HEADER)
    for r in records:
        lines.append(
            f"{_fmt(r.g_over_omega_r)},{_fmt(r.fidelity)},{_fmt(r.leakage)},{r.fock_dim}"
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    g = _check_g(float(args.g))
    plan = _plan(cfg, grid=(g,))
    record = evaluate_point(plan, g, base=_base_params(cfg))
    header = config_header(cfg, extra={"command": "run", "g": g})
    _emit(records_to_csv([record], header), args.out)
    print(
        f"protocol {plan.protocol_id}  model {plan.model}  "
        f"g/omega_r = {_fmt(g)}  fock_dim = {record.fock_dim}"
    )
    if record.error is not None:
        print(f"numerical failure: {record.error}", file=sys.stderr)
        return 2
    print(f"fidelity = {_fmt(record.fidelity)}")
    print(f"leakage  = {_fmt(record.leakage)}")
    print(f"wall time = {record.wall_time:.3f} s")
    return 0


def _sweep_grid(cfg: dict) -> tuple[float, ...]:
    lo = float(cfg["sweep_from"])
    hi = float(cfg["sweep_to"])
    points = int(cfg["sweep_points"])
    if points < 1:
        raise CliError(f"sweep needs at least one point, got {points}")
    if points == 1:
        values = [lo]
    else:
        if hi <= lo:
            raise CliError(f"sweep range must increase, got [{lo}, {hi}]")
        step = (hi - lo) / (points - 1)
        values = [lo + i * step for i in range(points)]
    # Snap to the 9 significant digits used in the output so the grid column
    # round-trips exactly.
    grid = tuple(float(f"{v:.9g}") for v in values)
    for g in grid:
        _check_g(g)
    return grid


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    grid = _sweep_grid(cfg)
    plan = _plan(cfg, grid=grid)
    records = run_sweep(plan, jobs=int(cfg["jobs"]), base=_base_params(cfg))
    header = config_header(cfg, extra={"command": "sweep"})
    _emit(records_to_csv(records, header), args.out)
    if args.plot_data:
        lines = list(header)
        lines += [f"{_fmt(r.g_over_omega_r)} {_fmt(r.fidelity)}" for r in records]
        with open(args.plot_data, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    failures = [r for r in records if r.error is not None]
    if failures:
        for r in failures:
            print(f"point g = {_fmt(r.g_over_omega_r)} failed: {r.error}", file=sys.stderr)
        return 2
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    g = _check_g(float(args.g))
    plan = _plan(cfg, grid=(g,))
    if args.start_n < 4:
        raise CliError(f"--start-n must be at least 4, got {args.start_n}")
    n, fidelity = converge_fock(
        plan, g, start_n=args.start_n, tol=args.tol, cap=args.cap, base=_base_params(cfg)
    )
    print(
        f"fidelity converged at fock_dim {n} "
        f"(|F(N) - F(2N)| < {_fmt(args.tol)} at g/omega_r = {_fmt(g)})"
    )
    print(f"N={n} F={_fmt(fidelity)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cqedgates", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p: argparse.ArgumentParser, with_model: bool = True) -> None:
        p.add_argument("--config", help="YAML config file; flags override its values")
        if with_model:
            p.add_argument("--protocol", type=int, choices=(1, 2), help="gate protocol")
            p.add_argument("--model", choices=("rwa", "full"), help="Hamiltonian model")
        p.add_argument("--fock", type=int, help="Fock truncation dimension")
        p.add_argument("--off-mode", choices=("hard", "detuned"), dest="off_mode",
                       help="how inactive couplings are switched off")
        p.add_argument("--delta-off", type=float, dest="delta_off",
                       help="detuning of parked transitions (units of omega_r)")

    p_run = sub.add_parser("run", help="run one protocol instance")
    common(p_run)
    p_run.add_argument("--g", type=float, required=True, help="coupling over omega_r, in (0, 1)")
    p_run.add_argument("--out", help="write the CSV record here instead of stdout")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="fidelity versus coupling strength")
    common(p_sweep)
    p_sweep.add_argument("--from", type=float, dest="sweep_from", help="first grid value")
    p_sweep.add_argument("--to", type=float, dest="sweep_to", help="last grid value")
    p_sweep.add_argument("--points", type=int, dest="sweep_points", help="grid size")
    p_sweep.add_argument("--jobs", type=int, help="parallel workers over grid points")
    p_sweep.add_argument("--out", help="write the CSV here instead of stdout")
    p_sweep.add_argument("--plot-data", dest="plot_data",
                         help="also write two-column g/omega_r vs fidelity data here")
    p_sweep.set_defaults(func=cmd_sweep)

    p_conv = sub.add_parser("converge", help="find a converged Fock dimension")
    common(p_conv)
    p_conv.add_argument("--g", type=float, required=True, help="coupling over omega_r, in (0, 1)")
    p_conv.add_argument("--start-n", type=int, default=15, dest="start_n",
                        help="initial Fock dimension (doubled until converged)")
    p_conv.add_argument("--tol", type=float, default=1e-4, help="|F(N) - F(2N)| threshold")
    p_conv.add_argument("--cap", type=int, default=256, help="largest Fock dimension to try")
    p_conv.set_defaults(func=cmd_converge)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            raise CliError("missing subcommand: run, sweep or converge")
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PropagationError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
