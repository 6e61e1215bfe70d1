"""Persistent map state: components, views and their observation statistics.

Only view-level state is kept here. Pose nodes and graph edges belong to the
SLAM back end and are not represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle into the half-open interval (-pi, pi]."""
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))


@dataclass(frozen=True)
class RigidTransform2D:
    """Planar rigid motion: rotate by ``rotation`` then translate."""

    tx: float = 0.0
    ty: float = 0.0
    rotation: float = 0.0

    def apply(self, pose: Pose2D) -> Pose2D:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Pose2D(
            c * pose.x - s * pose.y + self.tx,
            s * pose.x + c * pose.y + self.ty,
            pose.theta + self.rotation,
        )

    @classmethod
    def identity(cls) -> "RigidTransform2D":
        return cls()


@dataclass
class ViewStats:
    n_obs_cur: int = 0
    created_run: int = 1
    created_at: int = 0
    n_runs: int = 1
    n_obs_runs: int = 0
    used_for_reloc: bool = False

    def check(self) -> None:
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if not 0 <= self.n_obs_runs <= self.n_runs:
            raise ValueError(
                f"n_obs_runs={self.n_obs_runs} outside [0, n_runs={self.n_runs}]")
        if self.n_obs_cur < 0:
            raise ValueError(f"n_obs_cur must be >= 0, got {self.n_obs_cur}")
        if self.used_for_reloc and self.n_obs_runs < 1:
            raise ValueError("a view used for relocalization must have been observed")


@dataclass
class View:
    id: int
    pose: Pose2D
    appearance_key: str
    stats: ViewStats = field(default_factory=ViewStats)


@dataclass
class Component:
    id: int
    views: dict[int, View] = field(default_factory=dict)
    run_count: int = 1

    def __len__(self) -> int:
        return len(self.views)


@dataclass(frozen=True)
class RunHandle:
    run_index: int
    component_id: int


class UnknownViewError(KeyError):
    pass


@dataclass
class MapGraph:
    """All components of a map plus id allocators.

    ``run_index`` is the number of runs begun so far; the run in progress
    (if any) has that index. ``active_component`` names the component the
    current run writes new views into.
    """

    env_id: str = "default"
    components: dict[int, Component] = field(default_factory=dict)
    next_view_id: int = 1
    next_component_id: int = 1
    run_index: int = 0
    active_component: int | None = field(default=None, compare=False)
    load_warnings: int = field(default=0, compare=False)

    def __post_init__(self):
        self._owner: dict[int, int] = {}
        self.reindex()

    def reindex(self) -> None:
        self._owner = {}
        for comp in self.components.values():
            for vid in comp.views:
                if vid in self._owner:
                    raise ValueError(f"view id {vid} appears in two components")
                self._owner[vid] = comp.id

    # -- lookup -----------------------------------------------------------

    def view(self, view_id: int) -> View:
        try:
            return self.components[self._owner[view_id]].views[view_id]
        except KeyError:
            raise UnknownViewError(view_id) from None

    def component_of(self, view_id: int) -> int:
        try:
            return self._owner[view_id]
        except KeyError:
            raise UnknownViewError(view_id) from None

    def iter_views(self) -> Iterable[View]:
        for cid in sorted(self.components):
            comp = self.components[cid]
            for vid in sorted(comp.views):
                yield comp.views[vid]

    def view_count(self) -> int:
        return len(self._owner)

    def __contains__(self, view_id: int) -> bool:
        return view_id in self._owner

    # -- mutation ---------------------------------------------------------

    def new_component(self, run_count: int = 1) -> Component:
        comp = Component(self.next_component_id, run_count=run_count)
        self.components[comp.id] = comp
        self.next_component_id += 1
        return comp

    def add_view(self, component_id: int, pose: Pose2D, appearance_key: str,
                 frame_index: int = 0) -> View:
        """Create a fresh view in ``component_id`` stamped with the current run."""
        comp = self.components[component_id]
        view = View(
            self.next_view_id,
            pose,
            appearance_key,
            ViewStats(created_run=max(self.run_index, 1), created_at=frame_index),
        )
        self.next_view_id += 1
        comp.views[view.id] = view
        self._owner[view.id] = comp.id
        return view

    def insert_view(self, component_id: int, view: View) -> None:
        """Insert a fully formed view (used when loading)."""
        if view.id in self._owner:
            raise ValueError(f"duplicate view id {view.id}")
        self.components[component_id].views[view.id] = view
        self._owner[view.id] = component_id
        self.next_view_id = max(self.next_view_id, view.id + 1)


def begin_run(graph: MapGraph) -> RunHandle:
    """Start a run: age every existing view and open a fresh active component."""
    for comp in graph.components.values():
        comp.run_count += 1
        for view in comp.views.values():
            view.stats.n_runs += 1
            view.stats.n_obs_cur = 0
    graph.run_index += 1
    comp = graph.new_component()
    graph.active_component = comp.id
    return RunHandle(graph.run_index, comp.id)


def record_observation(graph: MapGraph, view_id: int, frame_index: int) -> ViewStats:
    stats = graph.view(view_id).stats
    if stats.n_obs_cur == 0:
        stats.n_obs_runs += 1
    stats.n_obs_cur += 1
    return stats


def merge_components(graph: MapGraph, active_id: int, target_id: int,
                     transform: RigidTransform2D | None = None,
                     reloc_views: Iterable[int] = ()) -> Component:
    """Move every view of ``active_id`` into ``target_id``.

    ``transform`` maps the active frame into the target frame. Views listed in
    ``reloc_views`` (which may live in either component) are flagged as used
    for relocalization.
    """
    if active_id == target_id:
        raise ValueError(f"cannot merge component {active_id} into itself")
    if active_id not in graph.components or target_id not in graph.components:
        raise KeyError(f"unknown component in merge ({active_id}, {target_id})")
    reloc_views = list(reloc_views)
    for vid in reloc_views:
        if graph.component_of(vid) not in (active_id, target_id):
            raise ValueError(f"view {vid} is not part of the merge")
        if graph.view(vid).stats.n_obs_runs < 1:
            raise ValueError(f"view {vid} was never observed; cannot relocalize on it")

    transform = transform or RigidTransform2D.identity()
    active = graph.components.pop(active_id)
    target = graph.components[target_id]
    for vid, view in active.views.items():
        view.pose = transform.apply(view.pose)
        target.views[vid] = view
        graph._owner[vid] = target_id
    for vid in reloc_views:
        graph.view(vid).stats.used_for_reloc = True
    if graph.active_component == active_id:
        graph.active_component = target_id
    return target


def delete_views(graph: MapGraph, component_id: int, ids: Iterable[int]) -> int:
    comp = graph.components[component_id]
    ids = set(ids)
    missing = sorted(i for i in ids if i not in comp.views)
    if missing:
        raise UnknownViewError(f"views {missing} not in component {component_id}")
    for vid in ids:
        del comp.views[vid]
        del graph._owner[vid]
    return len(ids)


def run_max_obs(component: Component) -> int:
    """Largest current-run observation count over a component's views."""
    return max((v.stats.n_obs_cur for v in component.views.values()), default=0)
