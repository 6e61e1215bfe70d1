"""Bucketed (x, y, theta) grid for counting nearby views.

A query box has total extent ``(sx, sy, stheta)`` centred on the query pose.
Cells along x and y are ``sx`` and ``sy`` wide. The theta axis is split into
``floor(2*pi / stheta)`` equal cells, each at least ``stheta`` wide, so any
box of half-width ``stheta / 2`` touches at most two adjacent theta cells and
the 3x3x3 neighbourhood (wrapping in theta) always suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .map_model import TWO_PI, Pose2D, normalize_angle


@dataclass(frozen=True)
class VoxelSize:
    sx: float = 1.0
    sy: float = 1.0
    stheta: float = 2.0

    def __post_init__(self):
        for name in ("sx", "sy", "stheta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"voxel {name} must be finite and > 0, got {v}")
        if self.stheta > TWO_PI + 1e-12:
            raise ValueError(f"voxel stheta must be <= 2*pi, got {self.stheta}")


def angular_distance(a: float, b: float) -> float:
    d = abs(normalize_angle(a - b))
    return min(d, TWO_PI - d)


def in_voxel(query: Pose2D, other: Pose2D, voxel: VoxelSize) -> bool:
    return (abs(other.x - query.x) <= voxel.sx / 2
            and abs(other.y - query.y) <= voxel.sy / 2
            and angular_distance(other.theta, query.theta) <= voxel.stheta / 2)


class ViewGridIndex:
    def __init__(self, voxel: VoxelSize, items: Iterable[tuple[int, Pose2D]] = ()):
        self.voxel = voxel
        self._n_theta = max(1, int(math.floor(TWO_PI / voxel.stheta + 1e-12)))
        self._theta_width = TWO_PI / self._n_theta
        self._cells: dict[tuple[int, int, int], dict[int, Pose2D]] = {}
        self._where: dict[int, tuple[int, int, int]] = {}
        for vid, pose in items:
            self.insert(vid, pose)

    def __len__(self) -> int:
        return len(self._where)

    def __contains__(self, view_id: int) -> bool:
        return view_id in self._where

    def _cell(self, pose: Pose2D) -> tuple[int, int, int]:
        t = pose.theta % TWO_PI
        k = int(t // self._theta_width) % self._n_theta
        return (math.floor(pose.x / self.voxel.sx),
                math.floor(pose.y / self.voxel.sy), k)

    def insert(self, view_id: int, pose: Pose2D) -> None:
        if view_id in self._where:
            raise ValueError(f"view {view_id} already indexed")
        cell = self._cell(pose)
        self._cells.setdefault(cell, {})[view_id] = pose
        self._where[view_id] = cell

    def remove(self, view_id: int) -> None:
        cell = self._where.pop(view_id)
        bucket = self._cells[cell]
        del bucket[view_id]
        if not bucket:
            del self._cells[cell]

    def _neighbourhood(self, cell: tuple[int, int, int]) -> Iterator[dict[int, Pose2D]]:
        cx, cy, ct = cell
        thetas = {(ct + dt) % self._n_theta for dt in (-1, 0, 1)}
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for t in thetas:
                    bucket = self._cells.get((cx + dx, cy + dy, t))
                    if bucket:
                        yield bucket

    def neighbors(self, query: Pose2D, query_id: int | None = None) -> list[int]:
        """Ids of indexed views inside the voxel around ``query``."""
        found = []
        for bucket in self._neighbourhood(self._cell(query)):
            for vid, pose in bucket.items():
                if vid != query_id and in_voxel(query, pose, self.voxel):
                    found.append(vid)
        return found

    def count(self, query: Pose2D, query_id: int | None = None,
              limit: int | None = None) -> int:
        """Number of neighbours, stopping early once ``limit`` is reached."""
        n = 0
        for bucket in self._neighbourhood(self._cell(query)):
            for vid, pose in bucket.items():
                if vid != query_id and in_voxel(query, pose, self.voxel):
                    n += 1
                    if limit is not None and n >= limit:
                        return n
        return n


def count_neighbors(query: Pose2D, query_id: int | None, index: ViewGridIndex,
                    voxel: VoxelSize | None = None) -> int:
    if voxel is not None and voxel != index.voxel:
        raise ValueError("index was built for a different voxel size")
    return index.count(query, query_id)
