"""Selection of views to delete from a component at the end of a run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

from .map_model import Component, Pose2D, View, ViewStats
from .scoring import (Absolute, RunObservationContext, ScoreThreshold, ScoreWeights,
                      compute_view_score, resolve_threshold)
from .spatial_index import ViewGridIndex, VoxelSize


@dataclass(frozen=True)
class PruneConfig:
    min_views: int = 25
    nn_threshold: int = 5
    voxel: VoxelSize = field(default_factory=VoxelSize)
    threshold: ScoreThreshold = field(default_factory=lambda: Absolute(1.375))
    weights: ScoreWeights = field(default_factory=ScoreWeights)
    nn_enabled: bool = True
    max_views_cap: int | None = None
    # "surviving": neighbours exclude views already confirmed for deletion;
    # "original": neighbours are counted over the full input set
    nn_reference: Literal["surviving", "original"] = "surviving"

    def __post_init__(self):
        if self.min_views < 0:
            raise ValueError(f"min_views must be >= 0, got {self.min_views}")
        if self.nn_threshold < 0:
            raise ValueError(f"nn_threshold must be >= 0, got {self.nn_threshold}")
        if self.max_views_cap is not None and self.max_views_cap < self.min_views:
            raise ValueError("max_views_cap must be >= min_views")
        if self.nn_reference not in ("surviving", "original"):
            raise ValueError(f"unknown nn_reference {self.nn_reference!r}")

    @classmethod
    def disabled(cls) -> "PruneConfig":
        """A configuration that never deletes anything."""
        return cls(min_views=2**62)


@dataclass(frozen=True)
class PruneReport:
    delete_set: frozenset[int]
    kept: frozenset[int]
    scores: dict[int, float]
    protected_new: frozenset[int]
    rescued_by_nn: frozenset[int]
    deletion_order: tuple[int, ...] = ()
    capped: frozenset[int] = frozenset()

    @property
    def pruned(self) -> bool:
        return bool(self.delete_set)


@dataclass(frozen=True)
class _Entry:
    id: int
    pose: Pose2D
    stats: ViewStats


def _snapshot(views: Iterable[View]) -> list[_Entry]:
    out = []
    for v in views:
        s = v.stats
        out.append(_Entry(v.id, v.pose, ViewStats(
            s.n_obs_cur, s.created_run, s.created_at, s.n_runs, s.n_obs_runs,
            s.used_for_reloc)))
    out.sort(key=lambda e: e.id)
    return out


def find_views_for_deletion(component: Component | Iterable[View], config: PruneConfig,
                            ctx: RunObservationContext, current_run: int) -> PruneReport:
    """Choose the views of one component that can be deleted.

    Views created during ``current_run`` and observed at least once are always
    kept. Every other view is scored; those scoring above the threshold are
    kept. The rest are visited from lowest score up (ties by id) and deleted
    only while at least ``nn_threshold`` other surviving views remain inside
    the voxel around them; otherwise they are rescued.
    """
    views = component.views.values() if isinstance(component, Component) else component
    entries = _snapshot(views)
    for e in entries:
        if e.stats.n_obs_cur > ctx.max_obs:
            raise ValueError(
                f"inconsistent context: view {e.id} has n_obs_cur={e.stats.n_obs_cur}"
                f" > max_obs={ctx.max_obs}")
    all_ids = frozenset(e.id for e in entries)
    if len(entries) <= config.min_views:
        return PruneReport(frozenset(), all_ids, {}, frozenset(), frozenset())

    protected = frozenset(e.id for e in entries
                          if e.stats.created_run == current_run and e.stats.n_obs_cur >= 1)
    threshold = resolve_threshold(config.threshold, config.weights)
    scores: dict[int, float] = {}
    candidates: list[_Entry] = []
    for e in entries:
        if e.id in protected:
            continue
        score = compute_view_score(e.stats, ctx, config.weights)
        scores[e.id] = score
        if not score > threshold:
            candidates.append(e)
    candidates.sort(key=lambda e: (scores[e.id], e.id))

    rescued: set[int] = set()
    order: list[int] = []
    if config.nn_enabled:
        index = ViewGridIndex(config.voxel, ((e.id, e.pose) for e in entries))
        for e in candidates:
            if index.count(e.pose, e.id, limit=config.nn_threshold) < config.nn_threshold:
                rescued.add(e.id)
            else:
                order.append(e.id)
                if config.nn_reference == "surviving":
                    index.remove(e.id)
    else:
        order = [e.id for e in candidates]

    deleted = set(order)
    capped: list[int] = []
    cap = config.max_views_cap
    if cap is not None and len(entries) - len(deleted) > cap:
        by_score = sorted((i for i in all_ids - deleted - protected - rescued),
                          key=lambda i: (scores[i], i))
        by_score += sorted(rescued, key=lambda i: (scores[i], i))
        excess = len(entries) - len(deleted) - cap
        capped = by_score[:excess]
        deleted.update(capped)
        rescued.difference_update(capped)

    delete_set = frozenset(deleted)
    return PruneReport(
        delete_set=delete_set,
        kept=all_ids - delete_set,
        scores=scores,
        protected_new=protected,
        rescued_by_nn=frozenset(rescued),
        deletion_order=tuple(order) + tuple(capped),
        capped=frozenset(capped),
    )
