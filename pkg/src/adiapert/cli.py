"""Command line for adiabatic evolution, geometric phases, gate arrays and annealing runs.

Every verb writes ``summary.json`` (deterministic for a given config, seed and
flags) and ``metadata.json`` (timestamps, versions, argv) into ``--out``;
``evolve`` adds ``timeseries.csv`` and ``sweep`` adds ``sweep.csv``.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import platform
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata

import numpy as np

from . import config as cfgmod
from .aqc import AqcInstance, random_instance, run_aqc
from .analysis import loglog_slope
from .errors import AdiabaticError, ConfigInvalid, PerturbativeRegimeViolated
from .exact import schrodinger_trajectory
from .gatearray import GateOp, GateSchedule, compose_and_measure, shor_bound
from .geomphase import berry_phase, phase_ledger, wrap_phase, wz_holonomy
from .perturb import first_order_trajectory, nonadiabatic_error

log = logging.getLogger("adiapert")

COMMANDS = ("evolve", "sweep", "berry", "holonomy", "gatearray", "aqc", "bound")
DEFAULT_TOLERANCE = 1e-10


def _cplx(z) -> dict:
    z = np.asarray(z, dtype=complex)
    return {"re": z.real.tolist(), "im": z.imag.tolist()}


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


# --- evolve -----------------------------------------------------------------


def _path_and_input(cfg, args, T=None):
    model = cfgmod.require(cfg, "model")
    T = T if T is not None else (args.T if getattr(args, "T", None) else None)
    path = cfgmod.build_path(model, cfg.get("schedule", {}), T, args.hbar_units)
    a0 = cfgmod.initial_amplitudes(cfg, path.frame(0.0))
    return path, a0


def cmd_evolve(cfg, args):
    path, a0 = _path_and_input(cfg, args)
    times = np.linspace(0.0, path.duration, cfg.get("points", 101))
    exact = schrodinger_trajectory(path, a0.state(), times, args.tolerance)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PerturbativeRegimeViolated)
        first = first_order_trajectory(path, a0, times)
        report = nonadiabatic_error(path, a0, gate_kind=cfg.get("gate_kind", _default_kind(a0)))
    rows = []
    for t, psi, r in zip(times, exact, first):
        row = {"t": t, "deviation_norm": float(np.linalg.norm(psi - r.zeroth)),
               "residual_norm": float(np.linalg.norm(psi - r.state)), "epsilon_norm": r.norm}
        for name, vec in (("exact", psi), ("zeroth", r.zeroth), ("first", r.state)):
            for k, z in enumerate(vec):
                row[f"{name}_{k}_re"], row[f"{name}_{k}_im"] = z.real, z.imag
        rows.append(row)
    result = {
        "model": path.name,
        "T": path.duration,
        "dim": path.dim,
        "final": {"exact": _cplx(exact[-1]), "zeroth": _cplx(first[-1].zeroth), "first": _cplx(first[-1].state)},
        "deviation_norm": rows[-1]["deviation_norm"],
        "error": report.to_dict(),
        "warnings": sorted({str(w.message) for w in caught}),
    }
    return result, {"timeseries.csv": rows}


def _default_kind(a0) -> str:
    return "wz" if any(len(a0.frame.blocks[n]) > 1 for n in a0.support()) else "berry"


# --- sweep ------------------------------------------------------------------


def _sweep_point(task):
    cfg, param, value, tolerance, units = task
    cfg = cfgmod.with_value(cfg, param, value)
    ns = argparse.Namespace(hbar_units=units, T=None)
    path, a0 = _path_and_input(cfg, ns)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbativeRegimeViolated)
        report = nonadiabatic_error(path, a0, gate_kind=cfg.get("gate_kind", _default_kind(a0)))
        zeroth = first_order_trajectory(path, a0, [path.duration])[-1].zeroth
    exact = schrodinger_trajectory(path, a0.state(), [0.0, path.duration], tolerance)[-1]
    row = {param: value, "epsilon_norm": report.norm,
           "deviation_norm": float(np.linalg.norm(exact - zeroth)), "estimate": report.estimate}
    support = a0.support()
    if len(support) == 1 and len(a0.frame.blocks[support[0]]) == 1 and path.closed:
        row["gamma"] = berry_phase(path, support[0])
    else:
        row["gamma"] = ""
    return row


def cmd_sweep(cfg, args):
    sweep = dict(cfg.get("sweep", {}))
    for key in ("param", "min", "max", "points"):
        if getattr(args, key, None) is not None:
            sweep[key] = getattr(args, key)
    if args.log:
        sweep["log"] = True
    for key in ("param", "min", "max", "points"):
        if key not in sweep:
            raise ConfigInvalid(f"missing required field 'sweep.{key}'")
    if sweep["points"] < 3:
        raise ConfigInvalid("invalid field 'sweep.points': need at least 3 points")
    lo, hi = float(sweep["min"]), float(sweep["max"])
    if sweep.get("log"):
        if lo <= 0 or hi <= 0:
            raise ConfigInvalid("invalid field 'sweep.min': log sweeps need positive bounds")
        values = np.geomspace(lo, hi, sweep["points"])
    else:
        values = np.linspace(lo, hi, sweep["points"])
    cfgmod.require(cfg, "model")
    tasks = [(cfg, sweep["param"], float(v), args.tolerance, args.hbar_units) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    result = {"param": sweep["param"], "points": len(rows), "log": bool(sweep.get("log", False))}
    if sweep["param"] == "T":
        fit = loglog_slope([r["T"] for r in rows], [r["deviation_norm"] for r in rows])
        result["deviation_slope"] = fit.slope
        fit = loglog_slope([r["T"] for r in rows], [r["epsilon_norm"] for r in rows])
        result["epsilon_slope"] = fit.slope
    return result, {"sweep.csv": rows}


# --- geometric phases ---------------------------------------------------------


def cmd_berry(cfg, args):
    path, _ = _path_and_input(cfg, args)
    ledger = phase_ledger(path)
    levels = []
    for n, size in enumerate(path.pattern()):
        entry = {"level": n, "degeneracy": size, "dynamic": ledger.dynamic[n]}
        if n in ledger.berry:
            entry["gamma"] = ledger.berry[n]
        else:
            entry["holonomy_eigenphases"] = np.sort(np.angle(np.linalg.eigvals(ledger.holonomy[n]))).tolist()
        levels.append(entry)
    result = {"model": path.name, "T": path.duration, "closed": path.closed, "levels": levels}
    if path.name == "nmr_single":
        theta = path.params.get("cone_angle")
        if theta is not None:
            result["solid_angle_half"] = float(wrap_phase(math.pi * (1 - math.cos(theta))))
    return result, {}


def cmd_holonomy(cfg, args):
    path, _ = _path_and_input(cfg, args)
    pattern = path.pattern()
    level = cfg.get("level")
    if level is None:
        level = next((n for n, k in enumerate(pattern) if k > 1), 0)
    if level >= len(pattern):
        raise ConfigInvalid(f"invalid field 'level': path has {len(pattern)} levels")
    v = wz_holonomy(path, level)
    phases = np.sort(np.angle(np.linalg.eigvals(v)))
    result = {
        "model": path.name,
        "T": path.duration,
        "level": level,
        "degeneracy": pattern[level],
        "holonomy": {"re": v.real.tolist(), "im": v.imag.tolist()},
        "eigenphases": phases.tolist(),
        "unitarity_error": float(np.max(np.abs(v.conj().T @ v - np.eye(len(v))))),
    }
    return result, {}


# --- gate arrays, AQC, bound ---------------------------------------------------


def cmd_gatearray(cfg, args):
    ga = cfgmod.require(cfg, "gatearray")
    n = ga["n_qubits"]
    rounds = []
    for r, gates in enumerate(ga["rounds"]):
        ops = []
        for j, g in enumerate(gates):
            sched = g.get("schedule", cfg.get("schedule", {}))
            try:
                path = cfgmod.build_path(g["model"], sched, None, args.hbar_units)
                ops.append(GateOp(path, tuple(g["qubits"]), g.get("kind", "berry"), g.get("name", "")))
            except ValueError as exc:
                raise ConfigInvalid(f"invalid field 'gatearray.rounds.{r}.{j}': {exc}") from exc
        rounds.append(ops)
    try:
        schedule = GateSchedule(rounds, n)
    except AdiabaticError as exc:
        raise ConfigInvalid(f"invalid field 'gatearray.rounds': {exc}") from exc
    rng = np.random.default_rng(args.seed)
    psi0 = cfgmod.register_state(ga.get("input", "zero"), n, rng)
    comp = compose_and_measure(schedule, psi0, tolerance=args.tolerance)
    result = {
        "n_qubits": n,
        "rounds": len(rounds),
        "sigma_measured": comp.sigma,
        "measured_by_round": comp.measured_by_round.tolist(),
        "budget": comp.budget.to_dict(),
        "second_order_residual": comp.second_order_residual,
    }
    return result, {}


def _aqc_point(task):
    inst_costs, n, T, shape, tolerance = task
    inst = AqcInstance(n, np.asarray(inst_costs))
    return run_aqc(inst, T, tolerance=tolerance, shape=shape).to_dict()


def cmd_aqc(cfg, args):
    opts = cfgmod.require(cfg, "aqc")
    n = opts["n"]
    rng = np.random.default_rng(args.seed)
    if "costs" in opts:
        if len(opts["costs"]) != 2 ** n:
            raise ConfigInvalid(f"invalid field 'aqc.costs': expected {2 ** n} entries")
        try:
            instances = [AqcInstance(n, np.asarray(opts["costs"], dtype=float))]
        except ValueError as exc:
            raise ConfigInvalid(f"invalid field 'aqc.costs': {exc}") from exc
    else:
        instances = [random_instance(n, rng, opts.get("min_gap", 0.1)) for _ in range(opts.get("instances", 1))]
    shape = opts.get("shape", "linear")
    tasks = []
    for inst in instances:
        T = opts.get("T") or 1.0 / (opts.get("ratio", 0.1) * inst.min_gap(shape))
        tasks.append((inst.costs.tolist(), n, float(T), shape, args.tolerance))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            runs = list(pool.map(_aqc_point, tasks))
    else:
        runs = [_aqc_point(t) for t in tasks]
    out = []
    for inst, task, run in zip(instances, tasks, runs):
        run.update({"T": task[2], "costs": inst.costs.tolist(), "minimizer": inst.bitstring(inst.minimizer),
                    "correct": run["readout"]["index"] == inst.minimizer})
        out.append(run)
    result = {"n": n, "shape": shape, "instances": out,
              "all_correct": all(r["correct"] for r in out)}
    return result, {}


def cmd_bound(cfg, args):
    if args.epsilon is None:
        raise ConfigInvalid("missing required field 'epsilon' (pass --epsilon)")
    m_max, n_max = shor_bound(args.epsilon)
    return {"epsilon": args.epsilon, "M_max": m_max, "N_max": n_max}, {}


HANDLERS = {
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "berry": cmd_berry,
    "holonomy": cmd_holonomy,
    "gatearray": cmd_gatearray,
    "aqc": cmd_aqc,
    "bound": cmd_bound,
}


# --- output -------------------------------------------------------------------


def write_csv(path, rows):
    fields = list(dict.fromkeys(k for r in rows for k in r))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration (\"schema\": 1)")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: current)")
    common.add_argument("--seed", type=_u64, default=0, help="64-bit seed for random instances and inputs")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes for sweeps")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="integrator rtol = atol")
    common.add_argument("--hbar-units", choices=("angular", "hz"), default="angular",
                        help="read model energies as angular (default) or cyclic frequencies")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="adiapert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("evolve", parents=[common], help="exact, zeroth- and first-order propagation")
    p.add_argument("--T", type=float, help="override schedule.T")
    p = sub.add_parser("sweep", parents=[common], help="scan T or a model parameter")
    p.add_argument("--param")
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--log", action="store_true")
    p = sub.add_parser("berry", parents=[common], help="Berry phases of a closed loop")
    p.add_argument("--T", type=float)
    p = sub.add_parser("holonomy", parents=[common], help="holonomy of a degenerate level")
    p.add_argument("--T", type=float)
    sub.add_parser("gatearray", parents=[common], help="compose a gate schedule and budget its error")
    sub.add_parser("aqc", parents=[common], help="adiabatic optimisation runs")
    p = sub.add_parser("bound", parents=[common], help="gate-count and factoring limits for a per-gate error")
    p.add_argument("--epsilon", type=float)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.time()
    try:
        if not 1e-13 <= args.tolerance <= 1e-6:
            raise ConfigInvalid(f"invalid field 'tolerance': {args.tolerance} outside [1e-13, 1e-6]")
        if args.config is not None:
            cfg = cfgmod.load_config(args.config)
        elif args.command == "bound":
            cfg = None
        else:
            raise ConfigInvalid("missing required option --config")
        result, files = HANDLERS[args.command](cfg, args)
        summary = {
            "schema": cfgmod.SCHEMA_VERSION,
            "command": args.command,
            "hbar_units": args.hbar_units,
            "seed": args.seed,
            "tolerance": args.tolerance,
            "config": cfg,
            "result": result,
        }
        cfgmod.validate_summary(summary)
        text = dumps(summary)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (AdiabaticError, ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        fh.write(text)
    for name, rows in files.items():
        write_csv(os.path.join(args.out, name), rows)
    meta = {
        "started": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - started, 3),
        "argv": list(sys.argv[1:] if argv is None else argv),
        "version": _version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    with open(os.path.join(args.out, "metadata.json"), "w") as fh:
        fh.write(dumps(meta))
    if args.command == "bound":
        print(dumps(result), end="")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
