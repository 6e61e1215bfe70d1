"""Line-oriented text format for saved maps.

Example::

    # comments are allowed anywhere
    viewmap-v1 env=office runs=3 next_view=42 next_comp=4
    component 1 runs=3
    view 7 comp=1 x=0.5 y=-1.25 th=3.0 appearance=day n_obs_cur=2 created_run=1 created_at=14 n_runs=3 n_obs_runs=2 reloc=1

Floats are written with ``repr`` so they load back bit for bit. The header
line may omit its key/value fields; the allocators then restart above the
largest id present.
"""

from __future__ import annotations

import io
import logging
import math
import os
from pathlib import Path
from typing import IO, Union

from .map_model import Component, MapGraph, Pose2D, View, ViewStats, normalize_angle

log = logging.getLogger(__name__)

MAGIC = "viewmap-v1"
_VIEW_KEYS = ("comp", "x", "y", "th", "appearance", "n_obs_cur", "created_run",
              "created_at", "n_runs", "n_obs_runs", "reloc")
_HEADER_KEYS = {"env", "runs", "next_view", "next_comp"}

PathOrFile = Union[str, os.PathLike, IO[str]]


class MapFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MapVersionError(MapFormatError):
    pass


class MalformedRecordError(MapFormatError):
    pass


class DuplicateIdError(MapFormatError):
    pass


def _token(text: str, what: str) -> str:
    if not text or any(c.isspace() for c in text) or "=" in text:
        raise ValueError(f"{what} {text!r} must be a non-empty token without spaces or '='")
    return text


def dumps_map(graph: MapGraph) -> str:
    lines = [f"{MAGIC} env={_token(graph.env_id, 'env id')} runs={graph.run_index}"
             f" next_view={graph.next_view_id} next_comp={graph.next_component_id}"]
    for cid in sorted(graph.components):
        lines.append(f"component {cid} runs={graph.components[cid].run_count}")
    for cid in sorted(graph.components):
        comp = graph.components[cid]
        for vid in sorted(comp.views):
            v = comp.views[vid]
            s = v.stats
            lines.append(
                f"view {vid} comp={cid} x={v.pose.x!r} y={v.pose.y!r} th={v.pose.theta!r}"
                f" appearance={_token(v.appearance_key, 'appearance key')}"
                f" n_obs_cur={s.n_obs_cur} created_run={s.created_run}"
                f" created_at={s.created_at} n_runs={s.n_runs}"
                f" n_obs_runs={s.n_obs_runs} reloc={int(s.used_for_reloc)}")
    return "\n".join(lines) + "\n"


def save_map(graph: MapGraph, destination: PathOrFile) -> int:
    data = dumps_map(graph)
    if hasattr(destination, "write"):
        destination.write(data)
        return len(data.encode("utf-8"))
    path = Path(destination)
    try:
        path.write_text(data, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write map to {path}: {exc}") from exc
    return len(data.encode("utf-8"))


def _fields(parts: list[str], lineno: int, allowed) -> dict[str, str]:
    out = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep:
            raise MalformedRecordError(f"expected key=value, got {part!r}", lineno)
        if key not in allowed:
            raise MapVersionError(f"unknown field {key!r} (not part of {MAGIC})", lineno)
        if key in out:
            raise MalformedRecordError(f"field {key!r} repeated", lineno)
        out[key] = value
    return out


def _int(value: str, key: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedRecordError(f"{key}={value!r} is not an integer", lineno) from None


def _float(value: str, key: str, lineno: int) -> float:
    try:
        f = float(value)
    except ValueError:
        raise MalformedRecordError(f"{key}={value!r} is not a number", lineno) from None
    if not math.isfinite(f):
        raise MalformedRecordError(f"{key}={value!r} is not finite", lineno)
    return f


def loads_map(text: str) -> MapGraph:
    graph = MapGraph()
    pending: list[tuple[int, int, View]] = []
    header_seen = False
    header: dict[str, str] = {}
    warnings = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if not header_seen:
            if kind != MAGIC:
                raise MapVersionError(f"expected {MAGIC!r} header, got {kind!r}", lineno)
            header = _fields(parts[1:], lineno, _HEADER_KEYS)
            header_seen = True
            continue
        if kind == MAGIC or kind.startswith("viewmap-"):
            raise MapVersionError(f"unexpected header {kind!r}", lineno)
        if kind == "component":
            if len(parts) < 2:
                raise MalformedRecordError("component record without id", lineno)
            cid = _int(parts[1], "component id", lineno)
            f = _fields(parts[2:], lineno, {"runs"})
            if cid in graph.components:
                raise DuplicateIdError(f"duplicate component id {cid}", lineno)
            runs = _int(f.get("runs", "1"), "runs", lineno)
            if runs < 1:
                raise MalformedRecordError(f"component runs must be >= 1, got {runs}", lineno)
            graph.components[cid] = Component(cid, run_count=runs)
        elif kind == "view":
            if len(parts) < 2:
                raise MalformedRecordError("view record without id", lineno)
            vid = _int(parts[1], "view id", lineno)
            f = _fields(parts[2:], lineno, set(_VIEW_KEYS))
            missing = [k for k in _VIEW_KEYS if k not in f]
            if missing:
                raise MalformedRecordError(f"view {vid} missing fields {missing}", lineno)
            theta = _float(f["th"], "th", lineno)
            if not (-math.pi < theta <= math.pi):
                warnings += 1
                log.warning("line %d: view %d theta %r normalized", lineno, vid, theta)
                theta = normalize_angle(theta)
            reloc = f["reloc"]
            if reloc not in ("0", "1"):
                raise MalformedRecordError(f"reloc must be 0 or 1, got {reloc!r}", lineno)
            stats = ViewStats(
                n_obs_cur=_int(f["n_obs_cur"], "n_obs_cur", lineno),
                created_run=_int(f["created_run"], "created_run", lineno),
                created_at=_int(f["created_at"], "created_at", lineno),
                n_runs=_int(f["n_runs"], "n_runs", lineno),
                n_obs_runs=_int(f["n_obs_runs"], "n_obs_runs", lineno),
                used_for_reloc=reloc == "1",
            )
            try:
                stats.check()
            except ValueError as exc:
                raise MalformedRecordError(f"view {vid}: {exc}", lineno) from None
            view = View(vid, Pose2D(_float(f["x"], "x", lineno), _float(f["y"], "y", lineno),
                                    theta), f["appearance"], stats)
            pending.append((lineno, _int(f["comp"], "comp", lineno), view))
        else:
            raise MalformedRecordError(f"unknown record type {kind!r}", lineno)

    if not header_seen:
        raise MapVersionError(f"missing {MAGIC!r} header")

    for lineno, cid, view in pending:
        if cid not in graph.components:
            raise MalformedRecordError(f"view {view.id} refers to unknown component {cid}",
                                       lineno)
        if view.id in graph:
            raise DuplicateIdError(f"duplicate view id {view.id}", lineno)
        graph.insert_view(cid, view)

    graph.env_id = header.get("env", graph.env_id)
    graph.run_index = _int(header.get("runs", "0"), "runs", 1)
    max_vid = max((v.id for v in graph.iter_views()), default=0)
    max_cid = max(graph.components, default=0)
    graph.next_view_id = max(_int(header.get("next_view", "1"), "next_view", 1), max_vid + 1)
    graph.next_component_id = max(_int(header.get("next_comp", "1"), "next_comp", 1),
                                  max_cid + 1)
    graph.load_warnings = warnings
    return graph


def load_map(source: PathOrFile) -> MapGraph:
    if hasattr(source, "read"):
        return loads_map(source.read())
    return loads_map(Path(source).read_text(encoding="utf-8"))


def roundtrip(graph: MapGraph) -> MapGraph:
    """Save to an in-memory buffer and load it back."""
    buf = io.StringIO()
    save_map(graph, buf)
    buf.seek(0)
    return load_map(buf)
