"""Command-line entry point.

Every subcommand resolves a full RunConfig, computes its results in memory,
and only then writes the output directory (via a temporary sibling that is
renamed into place), so a failed run never leaves partial files behind.

Exit codes: 0 success, 2 invalid configuration or input, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import shutil
import sys
import tempfile
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from .checks import run_checks
from .config import COMMANDS, ConfigError, RunConfig, parse_config
from .grid import point_seed
from .hamiltonians import build_model
from .noise import (
    CalibrationMatrix,
    SingularCalibrationError,
    build_calibration_matrix,
    mitigate_counts,
)
from .observables import ground_truth_row
from .oracle import grid_ground_states, save_grid_states, solve_model
from .phasemap import SyndromeSettings, anomaly_sweep, discover_phases, train_restarts, vqe_warm_sweep
from .statevector import ShotHistogram, StateVector
from .variational import SPSAError, build_syndrome_circuit

log = logging.getLogger("vqad")

OUT_ENV = "VQAD_OUT"
VERSION = "0.1.0"


class RunError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# output helpers


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in row.items()})
    return buf.getvalue()


def write_artifacts(out_dir: Path, files: dict, extra_dirs: dict | None = None) -> None:
    """Write ``files`` (name -> str | bytes | JSON object) atomically into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.", dir=out_dir.parent))
    try:
        for name, content in files.items():
            path = tmp / name
            if isinstance(content, bytes):
                path.write_bytes(content)
            elif isinstance(content, str):
                path.write_text(content)
            else:
                path.write_text(json.dumps(content, indent=1) + "\n")
        for name, writer in (extra_dirs or {}).items():
            writer(tmp / name)
        if out_dir.exists():
            shutil.rmtree(out_dir)
        os.replace(tmp, out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def params_json(ansatz, cfg: RunConfig, params, final_cost, seed, trash=None, point=None) -> dict:
    model = cfg.model_params()
    return {
        "ansatz": ansatz,
        "L": cfg.L,
        "trash": list(trash) if trash is not None else [],
        "params": [float(x) for x in params],
        "final_cost": float(final_cost),
        "seed": int(seed),
        "model": {"name": cfg.model, **asdict(model), **({} if point is None else point)},
    }


def _point_dict(cfg: RunConfig, p) -> dict:
    return {cfg.grid.axis1: p[0], cfg.grid.axis2: p[1]}


def _settings(cfg: RunConfig) -> SyndromeSettings:
    s = cfg.syndrome
    return SyndromeSettings(trash=tuple(s.trash), train_shots=s.train_shots, eval_shots=s.eval_shots, restarts=s.restarts)


def _states(cfg: RunConfig):
    s = cfg.syndrome
    grid = cfg.grid_spec()
    template = cfg.model_params()
    if s.source == "vqe":
        sweep = vqe_warm_sweep(
            template, grid, cfg.spsa_config(), cfg.vqe.first_iters, cfg.vqe.later_iters, master_seed=cfg.seed
        )
        return {p: r.state for p, r in sweep.items()}
    sols = grid_ground_states(template, grid, s.symmetry_break, s.degeneracy_tol, cfg.workers)
    return {p: sol.state for p, sol in sols.items()}


def _train_state(cfg: RunConfig) -> StateVector:
    """Ground state at the training point (exact, or VQE when ``syndrome.source='vqe'``)."""
    grid = cfg.grid_spec()
    point = tuple(cfg.syndrome.train_point)
    model = grid.model_at(cfg.model_params(), point)
    if cfg.syndrome.source == "vqe":
        from .variational import run_vqe

        _, state = run_vqe(build_model(model), cfg.spsa_config(cfg.vqe.first_iters))
        return state
    return solve_model(model, cfg.syndrome.symmetry_break, cfg.syndrome.degeneracy_tol).state


def _train(cfg: RunConfig, state: StateVector):
    s = cfg.syndrome
    noise = cfg.noise_model()
    shots = s.train_shots or (1000 if noise is not None else None)
    return train_restarts(state, s.trash, cfg.spsa_config(), cfg.seed, tuple(s.train_point), s.restarts, shots, noise)


# --------------------------------------------------------------------------
# commands; each returns (files, seeds, extra_dirs)


def cmd_ground_truth(cfg: RunConfig):
    grid = cfg.grid_spec()
    s = cfg.syndrome
    sols = grid_ground_states(cfg.model_params(), grid, s.symmetry_break, s.degeneracy_tol, cfg.workers)
    rows = []
    for p in grid.points():
        obs = ground_truth_row(sols[p].state)
        rows.append({"axis1": p[0], "axis2": p[1], **obs, "energy": sols[p].energy})
    files = {"observables.csv": csv_text(("axis1", "axis2", "S", "O_CDW", "D_ES", "energy"), rows)}
    return files, {}, {"states": lambda d: save_grid_states(sols, grid, d)}


def cmd_vqe_sweep(cfg: RunConfig):
    grid = cfg.grid_spec()
    sweep = vqe_warm_sweep(
        cfg.model_params(), grid, cfg.spsa_config(), cfg.vqe.first_iters, cfg.vqe.later_iters, master_seed=cfg.seed
    )
    rows, params = [], []
    for p in grid.points():
        r = sweep[p]
        exact = solve_model(grid.model_at(cfg.model_params(), p)).energy
        obs = ground_truth_row(r.state)
        rows.append({"axis1": p[0], "axis2": p[1], "energy": r.energy, "exact_energy": exact, "S": obs["S"], "seed": r.seed})
        params.append(params_json("vqe", cfg, r.params, r.energy, r.seed, point=_point_dict(cfg, p)))
    files = {
        "vqe.csv": csv_text(("axis1", "axis2", "energy", "exact_energy", "S", "seed"), rows),
        "vqe_params.json": params,
    }
    return files, {"points": {repr(p): sweep[p].seed for p in grid.points()}}, None


def cmd_vqad_train(cfg: RunConfig):
    rec = _train(cfg, _train_state(cfg))
    trace = csv_text(("iteration", "cost"), [{"iteration": k, "cost": c} for k, c in enumerate(rec.cost_trace)])
    point = _point_dict(cfg, cfg.syndrome.train_point)
    files = {
        "trained_params.json": params_json("syndrome", cfg, rec.final_params, rec.converged_cost, rec.seed, cfg.syndrome.trash, point),
        "training_trace.csv": trace,
    }
    return files, {"train": rec.seed}, None


def _phasemap_files(cfg: RunConfig, pm) -> dict:
    files = {"phasemap.csv": csv_text(pm.CSV_COLUMNS, pm.rows())}
    trained = []
    for tp, rec in zip(pm.training_points, pm.records):
        trained.append(params_json("syndrome", cfg, rec.final_params, rec.converged_cost, rec.seed, cfg.syndrome.trash, _point_dict(cfg, tp)))
    files["trained_params.json"] = trained[0] if len(trained) == 1 else trained
    return files


def cmd_vqad_sweep(cfg: RunConfig):
    states = _states(cfg)
    pm = anomaly_sweep(
        cfg.model_params(),
        cfg.grid_spec(),
        cfg.syndrome.train_point,
        cfg.syndrome.source,
        _settings(cfg),
        cfg.noise_model(),
        cfg.spsa_config(),
        cfg.seed,
        states,
    )
    return _phasemap_files(cfg, pm), {"train": pm.records[0].seed}, None


def cmd_discover(cfg: RunConfig):
    states = _states(cfg)
    pm = discover_phases(
        cfg.model_params(),
        cfg.grid_spec(),
        cfg.syndrome.train_point,
        cfg.discover.threshold,
        cfg.discover.max_rounds,
        _settings(cfg),
        cfg.noise_model(),
        cfg.spsa_config(),
        cfg.seed,
        states,
    )
    files = _phasemap_files(cfg, pm)
    files["rounds.json"] = {
        "training_points": [list(p) for p in pm.training_points],
        "training_costs": [r.converged_cost for r in pm.records],
        "n_labels": len(set((pm.labels or {}).values())),
        "diagnostic": pm.diagnostic,
    }
    return files, {"train": [r.seed for r in pm.records]}, None


def _noise_or_fail(cfg: RunConfig):
    noise = cfg.noise_model()
    if noise is None or not noise.readout:
        raise ConfigError("this command needs readout error: set noise.readout or noise.readout_flip")
    return noise


def cmd_calibrate(cfg: RunConfig):
    noise = _noise_or_fail(cfg)
    shots = cfg.mitigate.calibration_shots
    cal = build_calibration_matrix(noise, cfg.syndrome.trash, shots, seed=cfg.seed, n_qubits=cfg.L)
    return {"calibration.json": cal.to_json()}, {"calibration": cfg.seed}, None


def cmd_mitigate(cfg: RunConfig):
    m = cfg.mitigate
    noise = cfg.noise_model()
    seeds = {}
    if m.counts is not None:
        try:
            raw = ShotHistogram.from_json(json.loads(Path(m.counts).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"mitigate.counts: {exc}") from exc
    else:
        # full pipeline: train at the training point, sample noisy trash outcomes
        noise = _noise_or_fail(cfg)
        state = _train_state(cfg)
        rec = _train(cfg, state)
        circuit, _ = build_syndrome_circuit(cfg.L, cfg.syndrome.trash)
        from .noise import noisy_execute

        seeds["sample"] = point_seed(cfg.seed, cfg.syndrome.train_point, "sample")
        raw = noisy_execute(state, circuit, rec.final_params, cfg.syndrome.trash, cfg.syndrome.eval_shots or 1000, noise, seeds["sample"])
        seeds["train"] = rec.seed
    if m.calibration is not None:
        try:
            cal = CalibrationMatrix.from_json(json.loads(Path(m.calibration).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"mitigate.calibration: {exc}") from exc
    else:
        noise = _noise_or_fail(cfg)
        cal = build_calibration_matrix(noise, raw.measured_qubits, m.calibration_shots, seed=cfg.seed, n_qubits=cfg.L)
        seeds["calibration"] = cfg.seed
    try:
        mit = mitigate_counts(raw, cal)
    except SingularCalibrationError as exc:
        raise RunError(str(exc)) from exc
    k = len(raw.measured_qubits)
    out = {
        "measured_qubits": list(raw.measured_qubits),
        "n_shots": raw.n_shots,
        "raw": {format(j, f"0{k}b"): float(p) for j, p in enumerate(mit.raw)},
        "mitigated": {format(j, f"0{k}b"): float(p) for j, p in enumerate(mit.probabilities)},
        "quasi_counts": mit.quasi_counts,
    }
    return {"mitigated.json": out, "raw_counts.json": raw.to_json(), "calibration.json": cal.to_json()}, seeds, None


def cmd_check(cfg: RunConfig):
    results = run_checks(cfg.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    files = {"check.json": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]}
    failed = [r.name for r in results if not r.passed]
    return files, {"check": cfg.seed}, None, failed


HANDLERS = {
    "ground-truth": cmd_ground_truth,
    "vqe-sweep": cmd_vqe_sweep,
    "vqad-train": cmd_vqad_train,
    "vqad-sweep": cmd_vqad_sweep,
    "discover": cmd_discover,
    "calibrate": cmd_calibrate,
    "mitigate": cmd_mitigate,
    "check": cmd_check,
}


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vqad", description="Anomaly-syndrome phase mapping on simulated quantum states.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file (a previous manifest.json also works)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (dotted paths allowed)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help=f"output directory (default: <${OUT_ENV} or runs>/<command>)")
        sp.add_argument("--workers", type=int)
        sp.add_argument("--shots", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args) -> RunConfig:
    overrides = [("command", args.command)] + list(args.set)
    for key in ("seed", "workers", "shots", "out"):
        if getattr(args, key) is not None:
            overrides.append((key, getattr(args, key)))
    cfg = parse_config(args.config, overrides)
    if cfg.out is None:
        cfg.out = str(Path(os.environ.get(OUT_ENV) or "runs") / cfg.command)
    return cfg


def manifest(cfg: RunConfig, seeds, wall: float, argv) -> dict:
    return {
        "config": cfg.to_json(),
        "seeds": {"master": cfg.seed, **seeds},
        "versions": {"vqad": VERSION, "python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__},
        "argv": list(argv),
        "wall_clock_seconds": round(wall, 3),
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
    except ConfigError as exc:
        print(f"vqad: configuration error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    failed = []
    try:
        result = HANDLERS[cfg.command](cfg)
        if len(result) == 4:
            files, seeds, extra, failed = result
        else:
            files, seeds, extra = result
        files["manifest.json"] = manifest(cfg, seeds, time.perf_counter() - start, argv)
        write_artifacts(Path(cfg.out), files, extra)
    except ConfigError as exc:
        print(f"vqad: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"vqad: I/O error on {exc.filename or cfg.out}: {exc.strerror or exc}", file=sys.stderr)
        return 3
    except (RunError, SPSAError, ValueError, np.linalg.LinAlgError, MemoryError) as exc:
        print(f"vqad: run failed: {exc}", file=sys.stderr)
        return 3
    if failed:
        print(f"vqad: failed checks: {', '.join(failed)}", file=sys.stderr)
        return 3
    print(f"wrote {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
