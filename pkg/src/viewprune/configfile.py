"""Keyed-record config files in the same line style as saved maps.

Each non-comment line is ``<record> key=value key=value ...``. Recognised
records::

    environment id=lab width=7.0 height=7.0 dock=0.3,0.3,0 lighting=dawn,day,dusk,night seed=0
    sim frames_per_run=2000 step_distance=0.05 observation_radius=0.25
    prune min_views=25 nn_threshold=5 voxel=1,1,2 threshold=abs:1.375 weights=1.5,1,3
    sweep kind=weights runs=22 growth_rate_max=5 dist_between_cross_obs_max=0.8
    grid w1=0,0.5,1,1.5,2 w2=1 w3=0,0.5,1,1.5,2,2.5,3

A file may hold several record types; each loader picks the one it needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .map_model import Pose2D
from .pruner import PruneConfig
from .scoring import (RelativeToMax, ScoreThreshold, ScoreWeights, format_threshold,
                      parse_threshold)
from .simulator import Environment, SimConfig
from .spatial_index import VoxelSize


class ConfigError(ValueError):
    pass


def parse_records(text: str, source: str = "<config>") -> list[tuple[int, str, dict[str, str]]]:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *parts = line.split()
        values: dict[str, str] = {}
        for part in parts:
            key, sep, value = part.partition("=")
            if not sep or not key:
                raise ConfigError(f"{source}:{lineno}: expected key=value, got {part!r}")
            if key in values:
                raise ConfigError(f"{source}:{lineno}: {key!r} given twice")
            values[key] = value
        records.append((lineno, kind, values))
    return records


def _read(path_or_text: str | Path, is_text: bool) -> tuple[str, str]:
    if is_text:
        return str(path_or_text), "<text>"
    path = Path(path_or_text)
    try:
        return path.read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _one(records, kind: str, source: str, required: bool = True):
    found = [(n, v) for n, k, v in records if k == kind]
    if len(found) > 1:
        raise ConfigError(f"{source}: more than one {kind!r} record")
    if not found:
        if required:
            raise ConfigError(f"{source}: no {kind!r} record")
        return None, None
    return found[0]


def _floats(text: str, n: Optional[int] = None, sep: str = ",") -> list[float]:
    out = [float(t) for t in text.split(sep)]
    if n is not None and len(out) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"non-finite value in {text!r}")
    return out


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _coerce(kind: str, key: str, value: str, source: str, lineno: int, convert):
    try:
        return convert(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}:{lineno}: {kind} {key}={value!r}: {exc}") from None


def _unknown(kind, values, allowed, source, lineno):
    extra = sorted(set(values) - set(allowed))
    if extra:
        raise ConfigError(f"{source}:{lineno}: unknown {kind} field(s) {extra}")


# -- environment -----------------------------------------------------------

def environment_from_values(values: dict[str, str], source="<text>", lineno=0) -> Environment:
    allowed = {"id", "width", "height", "dock", "lighting", "schedule", "seed", "windows"}
    _unknown("environment", values, allowed, source, lineno)
    kw: dict = {}
    conv = {
        "id": str,
        "width": float,
        "height": float,
        "dock": lambda t: Pose2D(*_floats(t, 3)),
        "lighting": lambda t: tuple(s for s in t.split(",") if s),
        "schedule": str,
        "seed": int,
        "windows": lambda t: tuple(tuple(_floats(w, 4, ":")) for w in t.split(";") if w),
    }
    for key, value in values.items():
        kw[key] = _coerce("environment", key, value, source, lineno, conv[key])
    if "lighting" in kw:
        kw["lighting_states"] = kw.pop("lighting")
    try:
        return Environment(**kw)
    except ValueError as exc:
        raise ConfigError(f"{source}:{lineno}: {exc}") from None


def load_environment(path_or_text, is_text: bool = False) -> Environment:
    text, source = _read(path_or_text, is_text)
    lineno, values = _one(parse_records(text, source), "environment", source)
    return environment_from_values(values, source, lineno)


def format_environment(env: Environment) -> str:
    d = env.dock
    return (f"environment id={env.id} width={env.width!r} height={env.height!r}"
            f" dock={d.x!r},{d.y!r},{d.theta!r} lighting={','.join(env.lighting_states)}"
            f" schedule={env.schedule} seed={env.seed}"
            + (" windows=" + ";".join(":".join(repr(c) for c in w) for w in env.windows)
               if env.windows else ""))


# -- simulator -------------------------------------------------------------

def sim_from_values(values: dict[str, str], source="<text>", lineno=0) -> SimConfig:
    types = {f.name: f.type for f in fields(SimConfig)}
    _unknown("sim", values, types, source, lineno)
    kw = {}
    for key, value in values.items():
        conv = int if types[key] in (int, "int") else float
        kw[key] = _coerce("sim", key, value, source, lineno, conv)
    try:
        return SimConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"{source}:{lineno}: {exc}") from None


def load_sim_config(path_or_text, is_text: bool = False) -> SimConfig:
    text, source = _read(path_or_text, is_text)
    lineno, values = _one(parse_records(text, source), "sim", source)
    return sim_from_values(values, source, lineno)


def format_sim_config(sim: SimConfig) -> str:
    return "sim " + " ".join(f"{f.name}={getattr(sim, f.name)!r}" for f in fields(SimConfig))


# -- pruning ---------------------------------------------------------------

_PRUNE_KEYS = {"min_views", "nn_threshold", "voxel", "threshold", "weights", "nn_enabled",
               "max_views_cap", "nn_reference"}


def _prune_kwargs(values, source, lineno, kind="prune") -> dict:
    conv = {
        "min_views": int,
        "nn_threshold": int,
        "voxel": lambda t: VoxelSize(*_floats(t, 3)),
        "threshold": parse_threshold,
        "weights": lambda t: ScoreWeights(*_floats(t, 3)),
        "nn_enabled": _bool,
        "max_views_cap": lambda t: None if t.lower() == "none" else int(t),
        "nn_reference": str,
    }
    return {k: _coerce(kind, k, v, source, lineno, conv[k]) for k, v in values.items()}


def prune_from_values(values: dict[str, str], source="<text>", lineno=0) -> PruneConfig:
    _unknown("prune", values, _PRUNE_KEYS, source, lineno)
    try:
        return PruneConfig(**_prune_kwargs(values, source, lineno))
    except ValueError as exc:
        raise ConfigError(f"{source}:{lineno}: {exc}") from None


def load_prune_config(path_or_text, is_text: bool = False) -> PruneConfig:
    text, source = _read(path_or_text, is_text)
    lineno, values = _one(parse_records(text, source), "prune", source)
    return prune_from_values(values, source, lineno)


def format_prune_config(cfg: PruneConfig) -> str:
    v, w = cfg.voxel, cfg.weights
    cap = "none" if cfg.max_views_cap is None else str(cfg.max_views_cap)
    return (f"prune min_views={cfg.min_views} nn_threshold={cfg.nn_threshold}"
            f" voxel={v.sx!r},{v.sy!r},{v.stheta!r} threshold={format_threshold(cfg.threshold)}"
            f" weights={w.w1!r},{w.w2!r},{w.w3!r} nn_enabled={int(cfg.nn_enabled)}"
            f" max_views_cap={cap} nn_reference={cfg.nn_reference}")


# -- sweeps ----------------------------------------------------------------

SELECTION_KEYS = ("growth_rate_max", "growth_rate_min", "dist_between_cross_obs_max",
                  "fraction_cross_observed_min", "reloc_distance_max")


@dataclass(frozen=True)
class SweepCell:
    index: int
    prune: PruneConfig


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    cells: tuple[SweepCell, ...]
    runs: int = 22
    selection: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("weights", "nn"):
            raise ValueError(f"sweep kind must be 'weights' or 'nn', got {self.kind!r}")
        if not self.cells:
            raise ValueError("sweep grid is empty")
        if self.runs < 2:
            raise ValueError("each sweep cell needs at least 2 runs")
        for key, value in self.selection.items():
            if key not in SELECTION_KEYS:
                raise ValueError(f"unknown selection threshold {key!r}")
            if not math.isfinite(value):
                raise ValueError(f"selection threshold {key} must be finite")


def _grid_weights(grid: dict[str, str], base: PruneConfig) -> list[PruneConfig]:
    w1s = _floats(grid.get("w1", repr(base.weights.w1)))
    w2s = _floats(grid.get("w2", repr(base.weights.w2)))
    w3s = _floats(grid.get("w3", repr(base.weights.w3)))
    threshold: ScoreThreshold = (parse_threshold(grid["threshold"]) if "threshold" in grid
                                 else RelativeToMax(0.25))
    cells = []
    for w1 in w1s:
        for w2 in w2s:
            for w3 in w3s:
                cells.append(replace(base, weights=ScoreWeights(w1, w2, w3),
                                     threshold=threshold, nn_enabled=False))
    return cells


def _grid_nn(grid: dict[str, str], base: PruneConfig) -> list[PruneConfig]:
    thresholds = [int(t) for t in grid.get("nn_threshold", str(base.nn_threshold)).split(",")]
    if "voxel" in grid:
        voxels = [VoxelSize(*_floats(t, 3, ":")) for t in grid["voxel"].split(";") if t]
    else:
        voxels = [base.voxel]
    return [replace(base, nn_threshold=n, voxel=v, nn_enabled=True)
            for n in thresholds for v in voxels]


def sweep_from_text(text: str, source: str = "<text>") -> SweepSpec:
    records = parse_records(text, source)
    lineno, head = _one(records, "sweep", source)
    glineno, grid = _one(records, "grid", source)
    plineno, base_values = _one(records, "prune", source, required=False)
    try:
        base = prune_from_values(base_values, source, plineno) if base_values else PruneConfig()
        head = dict(head)
        kind = head.pop("kind", "weights")
        if kind not in ("weights", "nn"):
            raise ConfigError(f"{source}:{lineno}: sweep kind must be 'weights' or 'nn'")
        runs = int(head.pop("runs", "22"))
        selection = {k: float(v) for k, v in head.items()}
        allowed = {"weights": {"w1", "w2", "w3", "threshold"},
                   "nn": {"nn_threshold", "voxel"}}.get(kind, set())
        _unknown(f"{kind} grid", grid, allowed, source, glineno)
        configs = _grid_weights(grid, base) if kind == "weights" else _grid_nn(grid, base)
        cells = tuple(SweepCell(i, c) for i, c in enumerate(configs))
        return SweepSpec(kind, cells, runs, selection)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: invalid sweep: {exc}") from None


def load_sweep_spec(path_or_text, is_text: bool = False) -> SweepSpec:
    text, source = _read(path_or_text, is_text)
    return sweep_from_text(text, source)
