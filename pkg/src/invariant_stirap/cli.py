"""Command-line front end.

Subcommands ``design``, ``simulate``, ``sweep`` and ``reproduce-figure``
write plot-ready CSV/JSON into ``--out``.  Settings come from an optional
flat JSON config file (``--config``) overridden by flags; the resolved
config is echoed as ``config.json`` and embedded in every JSON output.

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .core import rad_per_us_to_2pi_mhz
from .errors import ConfigError, NumericalError, StirapError, ValidationError
from .export import PULSE_COLUMNS, TRAJECTORY_COLUMNS, pulse_rows, trajectory_rows, write_csv, write_json
from .metrics import RunSpec, avg_rabi, energy_cost, evaluate, predicted_fidelity, sweep
from .propagator import DEFAULT_SCHEME, DEFAULT_STEPS, SCHEMES
from .protocols import ProtocolSpec, design, protocol2, validate_boundary_conditions

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2

AXIS_KEYS = {"epsilon": "epsilon", "delta": "delta", "tf_us": "t_f",
             "detuning_p": "delta_p", "detuning_3": "delta_3"}

_ANGLE_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_number(text) -> float:
    """Float parser that also accepts multiples of pi such as ``pi/4`` or ``3*pi/8``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    s = str(text).strip()
    try:
        return float(s)
    except ValueError:
        pass
    m = _ANGLE_RE.match(s)
    if not m:
        raise ConfigError(f"cannot parse number {text!r}")
    coef = m.group(1)
    coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    denom = float(m.group(2)) if m.group(2) else 1.0
    return coef * np.pi / denom


@dataclass
class RunConfig:
    protocol: int = 1
    epsilon: float = 0.2
    delta: float | None = None
    tf_us: float = 4.0
    steps: int = DEFAULT_STEPS
    initial: str | None = None
    detuning_p: float = 0.0
    detuning_3: float = 0.0
    scheme: str = DEFAULT_SCHEME
    samples: int = 401
    stride: int = 10
    format: str = "both"
    axis: str | None = None
    values: list[float] | None = None
    workers: int = 1
    out: str = "out"

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def update(self, mapping: dict, source: str) -> None:
        for key, value in mapping.items():
            if key not in self.keys():
                raise ConfigError(f"{source}: unknown key {key!r}")
            if value is None:
                continue
            try:
                setattr(self, key, _coerce(key, value))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{source}: bad value for {key!r}: {exc}") from None

    def protocol_spec(self) -> ProtocolSpec:
        initial = self.initial
        return ProtocolSpec(self.protocol, self.epsilon, self.tf_us,
                            self.delta if self.protocol == 2 else None, initial)

    def run_spec(self) -> RunSpec:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.format not in ("csv", "json", "both"):
            raise ConfigError("format must be csv, json or both")
        return RunSpec(self.protocol_spec(), self.detuning_p, self.detuning_3, self.steps, self.scheme)

    def resolved(self) -> dict:
        """Config as a dict suitable for ``--config``; the output directory is left out."""
        d = dataclasses.asdict(self)
        d.pop("out")
        if d["initial"] is None:
            d["initial"] = self.protocol_spec().initial_state_choice
        return d


def _coerce(key: str, value):
    if key in ("protocol", "steps", "samples", "stride", "workers"):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"expected integer, got {value!r}")
        return int(value)
    if key in ("epsilon", "delta", "tf_us", "detuning_p", "detuning_3"):
        return parse_number(value)
    if key == "values":
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        return [parse_number(v) for v in value]
    return str(value)


def load_config_file(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object of key/value pairs")
    for key, value in data.items():
        if isinstance(value, (dict, list)) and key != "values":
            line = next((i + 1 for i, ln in enumerate(text.splitlines()) if f'"{key}"' in ln), "?")
            raise ConfigError(f"{path}:{line}: key {key!r} must be a scalar (flat config)")
    return data


def _range_values(text: str) -> list[float]:
    parts = [p for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError("--range expects start,stop,num")
    start, stop = parse_number(parts[0]), parse_number(parts[1])
    num = int(parts[2])
    return list(np.linspace(start, stop, num))


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg.update(load_config_file(args.config), str(args.config))
    flags = {
        "protocol": args.protocol, "epsilon": args.epsilon, "delta": args.delta, "tf_us": args.tf_us,
        "steps": args.steps, "initial": args.initial, "detuning_p": args.detuning_p,
        "detuning_3": args.detuning_3, "scheme": args.scheme, "samples": args.samples,
        "stride": args.stride, "format": args.format, "workers": args.workers, "out": args.out,
    }
    if hasattr(args, "axis"):
        flags["axis"] = args.axis
        if args.range:
            flags["values"] = _range_values(args.range)
        elif args.values:
            flags["values"] = args.values
    cfg.update(flags, "command line")
    if cfg.protocol == 2 and cfg.delta is None:
        raise ConfigError("protocol 2 needs --delta")
    return cfg


def _emit_table(out: Path, stem: str, columns, rows, fmt: str, extra: dict | None = None) -> None:
    if fmt in ("csv", "both"):
        write_csv(out / f"{stem}.csv", columns, rows)
    if fmt in ("json", "both"):
        payload = {"columns": list(columns), "rows": [list(r) for r in rows]}
        if extra:
            payload = {**extra, **payload}
        write_json(out / f"{stem}.json", payload)


def cmd_design(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    run = cfg.run_spec()
    d = design(run.protocol, run.delta_p, run.delta_3)
    report = validate_boundary_conditions(d.angles, run.protocol.kind, run.protocol.epsilon, run.protocol.delta)
    _emit_table(out, "pulses", PULSE_COLUMNS, pulse_rows(d.pulses, cfg.samples), cfg.format)
    t, wp, ws = d.pulses.sample(cfg.samples)
    peak = float(np.max(np.hypot(wp, ws)))
    summary = {
        "config": cfg.resolved(),
        "boundary_conditions": report.to_dict(),
        "peak_rabi_rad_per_us": peak,
        "peak_rabi_2pi_mhz": rad_per_us_to_2pi_mhz(peak),
        "endpoint_pulses": {"omega_p_0": wp[0], "omega_s_0": ws[0], "omega_p_tf": wp[-1], "omega_s_tf": ws[-1]},
    }
    if d.ansatz is not None:
        summary["gamma_coeffs"] = list(d.ansatz.gamma_coeffs)
        summary["beta_coeffs"] = list(d.ansatz.beta_coeffs)
    write_json(out / "design.json", summary)
    write_json(out / "config.json", cfg.resolved())
    for c in report.failures:
        print(f"boundary condition {c.name} failed: residual {c.residual:.3g}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_simulate(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    run = cfg.run_spec()
    d, traj, m = evaluate(run)
    _emit_table(out, "trajectory", TRAJECTORY_COLUMNS, trajectory_rows(traj.subsample(cfg.stride)), cfg.format)
    _emit_table(out, "pulses", PULSE_COLUMNS, pulse_rows(d.pulses, cfg.samples), cfg.format)
    mid = int(np.argmin(np.abs(traj.times - 0.5 * run.protocol.t_f)))
    metrics = m.to_dict()
    metrics["fidelity_predicted"] = predicted_fidelity(d)
    metrics["p2_midpoint"] = float(traj.populations[mid, 1])
    write_json(out / "metrics.json", {"config": cfg.resolved(), "metrics": metrics})
    write_json(out / "config.json", cfg.resolved())
    print(f"|F| = {m.fidelity_mag:.10f}  avg Rabi = 2pi x {rad_per_us_to_2pi_mhz(m.avg_rabi):.4f} MHz  "
          f"energy = 2pi x {rad_per_us_to_2pi_mhz(m.energy_cost):.4f} MHz")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.axis not in AXIS_KEYS:
        raise ConfigError(f"--axis must be one of {sorted(AXIS_KEYS)}")
    if not cfg.values:
        raise ConfigError("sweep needs --range start,stop,num or --values v1,v2,...")
    out = Path(cfg.out)
    table = sweep(cfg.run_spec(), AXIS_KEYS[cfg.axis], cfg.values, workers=cfg.workers)
    table.config = cfg.resolved()
    if cfg.format in ("csv", "both"):
        table.to_csv(out / "sweep.csv")
    if cfg.format in ("json", "both"):
        table.to_json(out / "sweep.json")
    write_json(out / "config.json", cfg.resolved())
    for row in table.failed:
        print(f"row {cfg.axis}={row[table.axis]:.6g} failed: {row['error']}", file=sys.stderr)
    return EXIT_NUMERICAL if table.failed else EXIT_OK


# Figure presets (fixed parameters per figure).
FIG_TF = 4.0
FIG_EPS = 0.2
FIG6_EPS = 0.2527
FIG4_EPSILONS = (0.2, 0.02, 0.002)
FIG4_DELTAS = np.linspace(0.05, np.pi / 2, 64)
FIG5_EPSILONS = np.linspace(0.05, 0.4, 100)


def figure4_table(epsilons=FIG4_EPSILONS, deltas=FIG4_DELTAS, t_f: float = FIG_TF):
    """Protocol-2 time-averaged Rabi frequency and energy cost versus delta."""
    columns = ["delta"]
    for eps in epsilons:
        columns += [f"avg_rabi_2pi_mhz_eps{eps:g}", f"energy_cost_2pi_mhz_eps{eps:g}"]
    rows = []
    for delta in deltas:
        row = [float(delta)]
        for eps in epsilons:
            _, _, pulses = protocol2(eps, float(delta), t_f)
            row += [rad_per_us_to_2pi_mhz(avg_rabi(pulses)), rad_per_us_to_2pi_mhz(energy_cost(pulses))]
        rows.append(row)
    return columns, rows


def figure5_table(epsilons=FIG5_EPSILONS, t_f: float = FIG_TF, steps: int = DEFAULT_STEPS, workers: int = 1):
    """Fidelity from ``|1>`` versus epsilon for protocols 1 and 2, with ``cos eps``."""
    p1 = sweep(RunSpec(ProtocolSpec(1, 0.2, t_f, None, "bare1"), n_steps=steps), "epsilon", epsilons, workers)
    p2 = sweep(RunSpec(ProtocolSpec(2, 0.2, t_f, np.pi / 4, "bare1"), n_steps=steps), "epsilon", epsilons, workers)
    columns = ["epsilon", "fidelity_protocol1_bare1", "fidelity_protocol1_closed",
               "fidelity_protocol2_bare1", "fidelity_protocol2_predicted", "fidelity_mode0_cos_eps"]
    rows = [
        [e, r1["fidelity_mag"], r1["fidelity_predicted"], r2["fidelity_mag"], r2["fidelity_predicted"], np.cos(e)]
        for e, r1, r2 in zip(epsilons, p1.rows, p2.rows)
    ]
    return columns, rows, p1.failed + p2.failed


def cmd_reproduce_figure(cfg: RunConfig, figure: int) -> int:
    out = Path(cfg.out) / f"fig{figure}"
    if figure in (2, 3, 6):
        base = {2: dict(protocol=1, epsilon=FIG_EPS), 3: dict(protocol=2, epsilon=FIG_EPS, delta=np.pi / 4),
                6: dict(protocol=3, epsilon=FIG6_EPS)}[figure]
        fields = dict(tf_us=FIG_TF, out=str(out), initial=None, delta=None, detuning_p=0.0, detuning_3=0.0)
        sub = dataclasses.replace(cfg, **{**fields, **base})
        return cmd_simulate(sub)
    if figure == 4:
        columns, rows = figure4_table()
        _emit_table(out, "fig4", columns, rows, cfg.format, {"config": {"protocol": 2, "tf_us": FIG_TF}})
        return EXIT_OK
    if figure == 5:
        columns, rows, failed = figure5_table(steps=cfg.steps, workers=cfg.workers)
        _emit_table(out, "fig5", columns, rows, cfg.format, {"config": {"tf_us": FIG_TF, "steps": cfg.steps}})
        return EXIT_NUMERICAL if failed else EXIT_OK
    raise ConfigError(f"no preset for figure {figure}; choose 2, 3, 4, 5 or 6")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON config file; flags override its keys")
    p.add_argument("--protocol", type=int, choices=(1, 2, 3))
    p.add_argument("--epsilon", help="boundary value of gamma (rad); accepts e.g. 'pi/16'")
    p.add_argument("--delta", help="protocol-2 midpoint gamma (rad); accepts e.g. 'pi/4'")
    p.add_argument("--tf-us", dest="tf_us", help="transfer time in microseconds")
    p.add_argument("--steps", type=int, help=f"propagation steps (default {DEFAULT_STEPS})")
    p.add_argument("--initial", choices=("mode0", "bare1"))
    p.add_argument("--detuning-p", dest="detuning_p", help="pump detuning, rad/us")
    p.add_argument("--detuning-3", dest="detuning_3", help="two-photon detuning, rad/us")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--samples", type=int, help="rows in the pulse export")
    p.add_argument("--stride", type=int, help="keep every n-th propagation step in the trajectory export")
    p.add_argument("--workers", type=int, help="parallel processes for sweeps")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--format", choices=("csv", "json", "both"))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invariant-stirap", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("design", "synthesize pulses and check boundary conditions"),
                        ("simulate", "propagate and report metrics")):
        _add_common(sub.add_parser(name, help=help_))
    p = sub.add_parser("sweep", help="scan one parameter")
    _add_common(p)
    p.add_argument("--axis", choices=sorted(AXIS_KEYS))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--range", help="start,stop,num (linspace)")
    g.add_argument("--values", help="comma-separated values")
    p = sub.add_parser("reproduce-figure", help="emit data for a figure preset")
    p.add_argument("figure", type=int, choices=(2, 3, 4, 5, 6))
    _add_common(p)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "design":
            return cmd_design(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_reproduce_figure(cfg, args.figure)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StirapError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
