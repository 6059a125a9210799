"""Run configuration: JSON files plus ``key=value`` overrides, fully validated up front."""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .grid import GridSpec
from .hamiltonians import DEBHMParams, TLFIParams
from .noise import NoiseModel
from .statevector import MAX_QUBITS
from .variational import SPSAConfig, default_trash_count, default_trash_sites

COMMANDS = ("ground-truth", "vqe-sweep", "vqad-train", "vqad-sweep", "discover", "calibrate", "mitigate", "check")
MODELS = ("tlfi", "debhm")


class ConfigError(ValueError):
    pass


@dataclass
class GridConfig:
    axis1: str | None = None
    values1: list[float] | None = None
    axis2: str | None = None
    values2: list[float] | None = None


@dataclass
class SyndromeConfig:
    n_trash: int | None = None
    trash: list[int] | None = None
    train_shots: int | None = None
    eval_shots: int | None = 1000
    restarts: int = 4
    train_point: list[float] | None = None
    source: str = "oracle"
    symmetry_break: str | None = None
    degeneracy_tol: float = 0.0


@dataclass
class SPSABlock:
    max_iter: int = 500
    a: float | None = None
    c: float = 0.1
    A: float | None = None
    alpha: float = 0.602
    gamma: float = 0.101
    target_step: float = 0.1
    calibration_samples: int = 5


@dataclass
class VQEBlock:
    first_iters: int = 500
    later_iters: int = 200


@dataclass
class NoiseBlock:
    p1: float = 0.0
    p2: float = 0.0
    readout: list[list[float]] | None = None
    readout_flip: float = 0.0  # symmetric flip on every qubit when ``readout`` is not given


@dataclass
class DiscoverBlock:
    threshold: float | None = None
    max_rounds: int = 5


@dataclass
class MitigateBlock:
    counts: str | None = None
    calibration: str | None = None
    calibration_shots: int | None = 1000


@dataclass
class RunConfig:
    command: str = "vqad-sweep"
    model: str = "tlfi"
    L: int = 8
    J: float = 1.0
    g_x: float = 0.3
    g_z: float = 0.0
    boundary: str = "periodic"
    dJ: float = 0.0
    V: float = 0.0
    filling: int | None = None
    seed: int = 0
    shots: int | None = None
    workers: int = 1
    out: str | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    syndrome: SyndromeConfig = field(default_factory=SyndromeConfig)
    spsa: SPSABlock = field(default_factory=SPSABlock)
    vqe: VQEBlock = field(default_factory=VQEBlock)
    noise: NoiseBlock = field(default_factory=NoiseBlock)
    discover: DiscoverBlock = field(default_factory=DiscoverBlock)
    mitigate: MitigateBlock = field(default_factory=MitigateBlock)

    # --- derived objects ---------------------------------------------------

    def model_params(self):
        if self.model == "tlfi":
            return TLFIParams(self.L, self.J, self.g_x, self.g_z, self.boundary)
        return DEBHMParams(self.L, self.J, self.dJ, self.V, self.filling)

    def grid_spec(self) -> GridSpec:
        g = self.grid
        return GridSpec((g.axis1, tuple(g.values1)), (g.axis2, tuple(g.values2)))

    def spsa_config(self, max_iter: int | None = None) -> SPSAConfig:
        kw = asdict(self.spsa)
        if max_iter is not None:
            kw["max_iter"] = max_iter
        return SPSAConfig(seed=self.seed, **kw)

    def noise_model(self) -> NoiseModel | None:
        n = self.noise
        if n.readout is not None:
            readout = tuple(tuple(r) for r in n.readout)
        elif n.readout_flip:
            readout = tuple((n.readout_flip, n.readout_flip) for _ in range(self.L))
        else:
            readout = ()
        model = NoiseModel(n.p1, n.p2, readout)
        if model.p1 == 0 and model.p2 == 0 and not readout:
            return None
        return model

    def trash_sites(self) -> tuple[int, ...]:
        return tuple(self.syndrome.trash)

    def to_json(self) -> dict:
        return asdict(self)


DEFAULT_GRIDS = {
    "debhm": ("dJ", (-0.9, 0.9, 13), "V", (0.0, 4.0, 13)),
    "tlfi": ("g_x", (0.1, 2.0, 20), "g_z", (0.0, 1.0, 11)),
}
DEFAULT_TRAIN_POINTS = {"debhm": (-0.6, 0.5), "tlfi": (0.3, 0.0)}


def _from_dict(cls, data: dict, path: str = ""):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {path or 'config'}")
    kw = {}
    for name, value in data.items():
        sub = fields[name].default_factory if fields[name].default_factory is not dataclasses.MISSING else None
        if sub is not None and dataclasses.is_dataclass(sub):
            kw[name] = _from_dict(sub, value, f"{path}{name}.")
        else:
            kw[name] = value
    return cls(**kw)


def _set_path(data: dict, key: str, value: Any) -> None:
    parts = key.split(".")
    node = data
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {key!r}: {p!r} is not a block")
    node[parts[-1]] = value


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def load_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    # a run manifest carries its resolved config
    if isinstance(data, dict) and "config" in data and "versions" in data:
        data = data["config"]
    return data


def parse_config(source=None, overrides=()) -> RunConfig:
    """Build a validated RunConfig from a JSON path or dict plus ``key=value`` overrides."""
    if source is None:
        data = {}
    elif isinstance(source, dict):
        data = copy.deepcopy(source)
    else:
        data = load_json(source)
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        _set_path(data, key, value)
    try:
        cfg = _from_dict(RunConfig, data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return resolve(cfg)


def resolve(cfg: RunConfig) -> RunConfig:
    """Fill model-dependent defaults and check every precondition."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {cfg.model!r}")
    if not isinstance(cfg.L, int) or not 2 <= cfg.L <= MAX_QUBITS:
        raise ConfigError(f"L: must be an integer in [2, {MAX_QUBITS}] (statevector limit), got {cfg.L!r}")
    try:
        cfg.model_params()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"model parameters: {exc}") from exc

    g = cfg.grid
    d1, r1, d2, r2 = DEFAULT_GRIDS[cfg.model]
    g.axis1 = g.axis1 or d1
    g.axis2 = g.axis2 or d2
    if g.values1 is None:
        g.values1 = [float(v) for v in np.round(np.linspace(*r1[:2], r1[2]), 12)] if g.axis1 == d1 else [getattr(cfg, g.axis1, 0.0)]
    if g.values2 is None:
        g.values2 = [float(v) for v in np.round(np.linspace(*r2[:2], r2[2]), 12)] if g.axis2 == d2 else [getattr(cfg, g.axis2, 0.0)]
    try:
        spec = cfg.grid_spec()
        spec.model_at(cfg.model_params(), spec.points()[0])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"grid: {exc}") from exc

    s = cfg.syndrome
    if s.source not in ("oracle", "vqe"):
        raise ConfigError(f"syndrome.source must be 'oracle' or 'vqe', got {s.source!r}")
    if s.symmetry_break not in (None, "+", "-"):
        raise ConfigError("syndrome.symmetry_break must be '+', '-' or null")
    if s.trash is None:
        n_t = s.n_trash if s.n_trash is not None else default_trash_count(cfg.L)
        if not 1 <= n_t < cfg.L:
            raise ConfigError(f"syndrome.n_trash must be in [1, L-1], got {n_t}")
        s.trash = list(default_trash_sites(cfg.L, n_t))
    if len(set(s.trash)) != len(s.trash) or not all(0 <= t < cfg.L for t in s.trash) or len(s.trash) >= cfg.L:
        raise ConfigError(f"syndrome.trash: invalid trash sites {s.trash}")
    s.n_trash = len(s.trash)
    if cfg.shots is not None:
        if cfg.shots < 1:
            raise ConfigError("shots must be >= 1")
        s.eval_shots = cfg.shots
    if s.train_point is None:
        s.train_point = list(spec.nearest(DEFAULT_TRAIN_POINTS[cfg.model]))
    else:
        try:
            s.train_point = list(spec.snap(s.train_point))
        except ValueError as exc:
            raise ConfigError(f"syndrome.train_point: {exc}") from exc

    try:
        cfg.spsa_config()
        cfg.noise_model()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if s.restarts < 1:
        raise ConfigError("syndrome.restarts must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.discover.threshold is not None and cfg.discover.threshold <= 0:
        raise ConfigError("discover.threshold must be positive")
    return cfg
