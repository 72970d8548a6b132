"""Command-line front end.

Three commands (plus an alias) over the harness:

* ``run`` (alias ``trajectory``) -- one configuration, averaged MSD
  trajectory as CSV/JSON, with the theoretical curve alongside where
  the theory applies (lms, olbi).
* ``sweep`` -- steady-state MSD and sparsity across a parameter grid.
* ``theory`` -- closed-form stability bounds and steady states, and
  optionally the predicted transient curve.

Output is deterministic byte for byte for identical flags: floats are
written in shortest round-trip form, rows in fixed order, and every
file starts with ``#`` comment lines holding the resolved configuration
and seed needed to reproduce it.  Exit codes: 0 success, 1 bad
configuration or out-of-domain request, 2 all trials diverged.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness, theory
from .filters import ALGORITHMS, AlgoParams
from .synth import InputMode, make_scenario

OUTDIR_ENV = "SPARSELMS_OUTDIR"

_ALGO_FLAGS = ("gamma", "rho", "eps", "kappa", "alpha")


class _CliError(Exception):
    """Configuration problem; reported on stderr with exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for
    # all-trials-diverged, so route parse errors through _CliError.
    def error(self, message):
        raise _CliError(message)


def _fmt(value) -> str:
    """Shortest round-trip text for a cell; missing values are empty."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _db(value: float | None) -> float | None:
    if value is None:
        return None
    if value == 0.0:
        return float("-inf")
    return 10.0 * math.log10(value)


def _write(text: str, args) -> None:
    path = args.output
    if path is None:
        sys.stdout.write(text)
        return
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(config: dict, columns: list[str], rows: list[tuple], args) -> None:
    if args.format == "json":
        doc = {"config": config, "columns": columns, "rows": [list(r) for r in rows]}
        _write(json.dumps(doc, sort_keys=True) + "\n", args)
        return
    lines = [f"# {key}={_cfg_value(config[key])}" for key in sorted(config)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    _write("\n".join(lines) + "\n", args)


def _cfg_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_cfg_value(v) for v in value) + "]"
    return str(value)


def _algo_params(args) -> AlgoParams:
    extra = {
        name: getattr(args, name)
        for name in _ALGO_FLAGS
        if getattr(args, name) is not None
    }
    return AlgoParams(args.algo, args.delta, **extra)


def _run_spec(args) -> harness.RunSpec:
    return harness.RunSpec(
        n=args.n,
        k0=args.k0,
        algo=_algo_params(args),
        sigma_x2=args.sigma_x2,
        snr_db=args.snr_db,
        sigma_e2=args.sigma_e2,
        input_mode=InputMode(args.input_mode),
        steps=args.steps,
        trials=args.trials,
        sample_every=args.sample_every,
        steady_window=args.steady_window,
        master_seed=args.seed,
    )


def _spec_config(command: str, spec: harness.RunSpec, steps: int, sigma_e2: float) -> dict:
    algo = spec.algo
    config = {
        "command": command,
        "algo": algo.variant,
        "delta": algo.delta,
        "n": spec.n,
        "k0": spec.k0,
        "sigma_x2": spec.sigma_x2,
        "snr_db": spec.snr_db,
        "sigma_e2": sigma_e2,
        "input_mode": spec.input_mode.value,
        "steps": steps,
        "trials": spec.trials,
        "sample_every": spec.sample_every,
        "steady_window": harness._resolved_window(
            spec, len(harness._sample_steps(steps, spec.sample_every))
        ),
        "master_seed": spec.master_seed,
    }
    for name in _ALGO_FLAGS:
        value = getattr(algo, name)
        if value is not None:
            config[name] = value
    return config


def _theory_curve(spec: harness.RunSpec, scenario, steps: int) -> np.ndarray | None:
    """Predicted MSD at every step, where the theory covers the algorithm."""
    algo = spec.algo
    stats = theory.SystemStats(scenario.n, scenario.k0, scenario.sigma_x2, scenario.sigma_e2)
    d0 = float(np.dot(scenario.w_star, scenario.w_star))
    try:
        if algo.variant == "olbi" and algo.gamma > 0.0:
            return theory.instantaneous_msd_curve(
                scenario.w_star, algo.delta, algo.gamma, stats, steps
            ).values
        if algo.variant == "lms" or (algo.variant == "olbi" and algo.gamma == 0.0):
            return theory.iterate_msd_recursion(
                algo.delta, stats, stats.n, d0, steps
            )
    except ValueError:
        return None  # outside the stability domain; emit empty columns
    return None


def cmd_run(args) -> int:
    spec = _run_spec(args)
    scenario = harness.build_scenario(spec)
    steps = harness.resolve_steps(spec, scenario)
    traj = harness.run_experiment(spec, workers=args.threads)
    curve = _theory_curve(spec, scenario, steps)
    rows = []
    for i, step in enumerate(traj.steps_sampled):
        th = None if curve is None else float(curve[int(step)])
        rows.append(
            (int(step), float(traj.msd[i]), float(traj.msd_db[i]), th, _db(th))
        )
    config = _spec_config("run", spec, steps, scenario.sigma_e2)
    config["trials_used"] = traj.trials_used
    config["diverged_trials"] = traj.diverged_trials
    _emit(config, ["step", "msd", "msd_db", "theory_msd", "theory_msd_db"], rows, args)
    return 0


def cmd_sweep(args) -> int:
    spec = _run_spec(args)
    values = _sweep_values(args)
    result = harness.sweep(spec, args.param, values, workers=args.threads)
    rows = []
    for i, value in enumerate(result.param_values):
        sim = result.steady_msd_sim[i]
        th = result.steady_msd_theory[i]
        rows.append(
            (
                value,
                sim,
                _db(sim),
                th,
                _db(th),
                result.sparsity_sim[i],
                result.diverged_trials[i],
            )
        )
    scenario = harness.build_scenario(spec)
    config = _spec_config("sweep", spec, spec.steps or 0, scenario.sigma_e2)
    config["steps"] = spec.steps if spec.steps is not None else "auto"
    config["steady_window"] = spec.steady_window if spec.steady_window else "auto"
    config["param"] = result.swept_param
    config["values"] = result.param_values
    _emit(
        config,
        [
            "param_value",
            "steady_msd_sim",
            "steady_msd_sim_db",
            "steady_msd_theory",
            "steady_msd_theory_db",
            "mean_sparsity",
            "diverged_trials",
        ],
        rows,
        args,
    )
    return 0


def cmd_theory(args) -> int:
    stats = theory.SystemStats(args.n, args.k0, args.sigma_x2, args.sigma_e2)
    olbi_bound = theory.olbi_ms_stability_bound(stats)
    if not (0.0 < args.delta < olbi_bound):
        raise _CliError(
            f"delta={args.delta} is outside the OLBI mean-square stability "
            f"range (0, {olbi_bound}): no steady state exists"
        )
    olbi_msd = theory.olbi_steady_state_msd(args.delta, stats)
    lms_bound = theory.lms_ms_stability_bound(stats)
    lms_msd = (
        theory.lms_steady_state_msd(args.delta, stats)
        if args.delta < lms_bound
        else None
    )
    quantities = [
        ("mean_stability_bound", theory.lms_mean_stability_bound(args.sigma_x2)),
        ("olbi_ms_stability_bound", olbi_bound),
        ("lms_ms_stability_bound", lms_bound),
        ("olbi_steady_state_msd", olbi_msd),
        ("olbi_steady_state_msd_db", _db(olbi_msd)),
        ("lms_steady_state_msd", lms_msd),
        ("lms_steady_state_msd_db", _db(lms_msd)),
        ("msd_ratio_small_delta", theory.msd_ratio_small_delta(stats)),
    ]
    config = {
        "command": "theory",
        "n": args.n,
        "k0": args.k0,
        "sigma_x2": args.sigma_x2,
        "sigma_e2": args.sigma_e2,
        "delta": args.delta,
    }
    if not args.curve:
        _emit(config, ["quantity", "value"], quantities, args)
        return 0

    if args.gamma is None or not (args.gamma > 0.0):
        raise _CliError("--curve requires --gamma > 0")
    scenario = make_scenario(
        n=args.n,
        k0=args.k0,
        sigma_x2=args.sigma_x2,
        sigma_e2=args.sigma_e2,
        seed=[args.seed, 0],
    )
    horizon = args.horizon
    if horizon is None:
        min_mag = float(np.min(np.abs(scenario.w_star[scenario.w_star != 0.0])))
        horizon = max(
            1000, math.ceil(5.0 * args.gamma / (args.delta * min_mag * args.sigma_x2))
        )
    curve = theory.instantaneous_msd_curve(
        scenario.w_star, args.delta, args.gamma, stats, horizon
    )
    config.update({"gamma": args.gamma, "master_seed": args.seed, "horizon": horizon})
    for name, value in quantities:
        config[name] = value if value is not None else "absent"
    rows = [
        (t, float(curve.values[t]), _db(float(curve.values[t])))
        for t in range(horizon + 1)
    ]
    _emit(config, ["step", "theory_msd", "theory_msd_db"], rows, args)
    return 0


def _sweep_values(args) -> list[float]:
    if args.values is not None:
        try:
            return [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise _CliError(f"could not parse --values {args.values!r}")
    lo, hi, count = args.range if args.range else args.log_range
    count = int(count)
    if count < 1:
        raise _CliError("value count must be >= 1")
    if args.range:
        return [float(v) for v in np.linspace(lo, hi, count)]
    if lo <= 0 or hi <= 0:
        raise _CliError("--log-range endpoints must be positive")
    return [float(v) for v in np.geomspace(lo, hi, count)]


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default=None,
                   help=f"output file (default stdout); relative paths resolve "
                        f"under ${OUTDIR_ENV} when set")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--delta", type=float, required=True, help="learning rate")
    p.add_argument("--gamma", type=float, default=None, help="olbi threshold")
    p.add_argument("--rho", type=float, default=None, help="za/rza attraction strength")
    p.add_argument("--eps", type=float, default=None, help="rza attraction shape")
    p.add_argument("--kappa", type=float, default=None, help="l0 attraction strength")
    p.add_argument("--alpha", type=float, default=None, help="l0 attraction shape")
    p.add_argument("--n", type=int, required=True, help="filter length")
    p.add_argument("--k0", type=int, required=True, help="true support size")
    p.add_argument("--sigma-x2", type=float, default=1.0, help="input power")
    noise = p.add_mutually_exclusive_group(required=True)
    noise.add_argument("--snr-db", type=float, default=None)
    noise.add_argument("--sigma-e2", type=float, default=None, help="noise power")
    p.add_argument("--input-mode", choices=[m.value for m in InputMode],
                   default=InputMode.IID_VECTOR.value)
    p.add_argument("--steps", type=int, default=None,
                   help="steps per trial (default: 5x the predicted transient)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--steady-window", type=int, default=None,
                   help="tail points for the steady-state mean (default: last 10%%)")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--threads", type=int, default=1,
                   help="trial worker processes (0 = one per CPU)")
    _add_output_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparselms",
                     description="Sparse adaptive filtering benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="average one configuration into an MSD trajectory")
    _add_run_flags(p_run)
    p_run.set_defaults(handler=cmd_run)

    p_traj = sub.add_parser("trajectory", help="alias for run")
    _add_run_flags(p_traj)
    p_traj.set_defaults(handler=cmd_run)

    p_sweep = sub.add_parser("sweep", help="steady-state MSD across a parameter grid")
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=harness.SWEEPABLE)
    grid = p_sweep.add_mutually_exclusive_group(required=True)
    grid.add_argument("--values", default=None, help="comma-separated values")
    grid.add_argument("--range", nargs=3, type=float, default=None,
                      metavar=("LO", "HI", "COUNT"), help="linear grid")
    grid.add_argument("--log-range", nargs=3, type=float, default=None,
                      metavar=("LO", "HI", "COUNT"), help="geometric grid")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_th = sub.add_parser("theory", help="closed-form bounds and steady states")
    p_th.add_argument("--n", type=int, required=True)
    p_th.add_argument("--k0", type=int, required=True)
    p_th.add_argument("--sigma-x2", type=float, default=1.0)
    p_th.add_argument("--sigma-e2", type=float, default=1.0)
    p_th.add_argument("--delta", type=float, required=True)
    p_th.add_argument("--curve", action="store_true",
                      help="emit the predicted transient curve")
    p_th.add_argument("--gamma", type=float, default=None, help="threshold for --curve")
    p_th.add_argument("--seed", type=int, default=0,
                      help="seed for the drawn system behind --curve")
    p_th.add_argument("--horizon", type=int, default=None)
    _add_output_flags(p_th)
    p_th.set_defaults(handler=cmd_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except harness.AllTrialsDivergedError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
