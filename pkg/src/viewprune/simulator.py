"""Deterministic stand-in for a robot with a visual front end.

The robot starts every run at its dock and sweeps a rectangular room in
parallel lanes, as a floor-cleaning robot would. A view is observable when the
robot is within ``observation_radius`` of the view's position and its heading
is within half the field of view of the view's heading. Each frame, every
observable view is detected independently with a probability that depends on
whether the view's appearance matches the current lighting. When the robot
travels ``create_gap_distance`` without detecting anything, it creates a view
at its current pose.

A fraction of new views are lighting invariant (appearance key ``"*"``); they
are detected with the matched probability under every lighting. Views created
inside one of the environment's ``windows`` (areas lit by daylight) are never
invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .map_model import (TWO_PI, MapGraph, Pose2D, RigidTransform2D, begin_run,
                        delete_views, merge_components, record_observation, run_max_obs)
from .metrics import FrameEvent, MetricsReport, RelocEvent, RunTrace, metrics_report
from .persistence import roundtrip
from .pruner import PruneConfig, PruneReport, find_views_for_deletion
from .scoring import RunObservationContext

INVARIANT_APPEARANCE = "*"
SQ_FT_PER_SQ_M = 10.763910416709722


@dataclass(frozen=True)
class Environment:
    width: float = 7.0
    height: float = 7.0
    dock: Pose2D = field(default_factory=lambda: Pose2D(0.3, 0.3, 0.0))
    lighting_states: tuple[str, ...] = ("day", "night")
    schedule: str = "cyclic"
    seed: int = 0
    id: str = "sim"
    # (x0, y0, x1, y1) rectangles whose appearance follows the lighting
    windows: tuple[tuple[float, float, float, float], ...] = ()

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("environment dimensions must be positive")
        if not self.contains(self.dock.x, self.dock.y):
            raise ValueError(f"dock {self.dock} lies outside the navigable region")
        if not self.lighting_states:
            raise ValueError("at least one lighting state is required")
        for key in self.lighting_states:
            if key == INVARIANT_APPEARANCE or not key or any(c.isspace() for c in key):
                raise ValueError(f"bad lighting state name {key!r}")
        if self.schedule not in ("cyclic",):
            raise ValueError(f"unknown lighting schedule {self.schedule!r}")
        for w in self.windows:
            if len(w) != 4 or not (w[0] < w[2] and w[1] < w[3]):
                raise ValueError(f"window {w} must be (x0, y0, x1, y1) with x0<x1, y0<y1")

    @property
    def area_ft2(self) -> float:
        return self.width * self.height * SQ_FT_PER_SQ_M

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height

    def in_window(self, x: float, y: float) -> bool:
        return any(x0 <= x <= x1 and y0 <= y <= y1 for x0, y0, x1, y1 in self.windows)

    def lighting(self, run_index: int) -> str:
        return self.lighting_states[(run_index - 1) % len(self.lighting_states)]


@dataclass(frozen=True)
class SimConfig:
    frames_per_run: int = 2000
    step_distance: float = 0.05
    observation_radius: float = 0.25
    observation_fov: float = 0.8
    p_observe_matched_lighting: float = 0.9
    p_observe_mismatched_lighting: float = 0.02
    create_gap_distance: float = 0.25
    reloc_min_views: int = 3
    p_invariant_view: float = 0.15
    lane_spacing: float = 0.5
    lane_jitter: float = 0.2
    heading_noise: float = 0.05
    wall_margin: float = 0.3
    # each run lasts frames_per_run * U(min_run_fraction, 1) frames
    min_run_fraction: float = 0.6

    def __post_init__(self):
        if self.frames_per_run < 1:
            raise ValueError("frames_per_run must be >= 1")
        if self.min_run_fraction <= 0:
            raise ValueError("min_run_fraction must be > 0")
        for name in ("step_distance", "observation_radius", "create_gap_distance",
                     "lane_spacing"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.observation_fov <= TWO_PI:
            raise ValueError("observation_fov must lie in (0, 2*pi]")
        for name in ("p_observe_matched_lighting", "p_observe_mismatched_lighting",
                     "p_invariant_view", "min_run_fraction"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.p_observe_mismatched_lighting > self.p_observe_matched_lighting:
            raise ValueError("mismatched-lighting probability exceeds matched probability")
        if self.reloc_min_views < 1:
            raise ValueError("reloc_min_views must be >= 1")
        if self.lane_jitter < 0 or self.heading_noise < 0 or self.wall_margin < 0:
            raise ValueError("lane_jitter, heading_noise and wall_margin must be >= 0")


def run_rng(env: Environment, master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([env.seed, master_seed, run_index]))


def lane_waypoints(env: Environment, sim: SimConfig,
                   rng: np.random.Generator) -> Iterator[tuple[float, float]]:
    """Endless boustrophedon waypoints starting from the dock.

    Lanes run along x. Sweeps alternate between moving up and down the room;
    every lane's y offset is jittered independently.
    """
    m = sim.wall_margin
    x_lo, x_hi = min(m, env.dock.x), max(env.width - m, env.dock.x)
    y_lo, y_hi = min(m, env.dock.y), max(env.height - m, env.dock.y)
    x, y = env.dock.x, env.dock.y
    at_low_end = abs(x - x_lo) <= abs(x - x_hi)
    direction = 1.0 if y <= (y_lo + y_hi) / 2 else -1.0
    while True:
        x = x_hi if at_low_end else x_lo
        at_low_end = not at_low_end
        yield x, y
        y_next = y + direction * sim.lane_spacing + rng.uniform(-sim.lane_jitter, sim.lane_jitter)
        if not y_lo <= y_next <= y_hi:
            direction = -direction
            y_next = y + direction * sim.lane_spacing + rng.uniform(-sim.lane_jitter,
                                                                    sim.lane_jitter)
            y_next = min(max(y_next, y_lo), y_hi)
        y = y_next
        yield x, y


def trajectory(env: Environment, sim: SimConfig,
               rng: np.random.Generator) -> Iterator[tuple[float, float, float, float]]:
    """Yield ``(x, y, heading, cumulative distance)`` once per frame.

    Frame 0 is the dock pose.
    """
    x, y, heading = env.dock.x, env.dock.y, env.dock.theta
    travelled = 0.0
    yield x, y, heading, travelled
    step = sim.step_distance
    for wx, wy in lane_waypoints(env, sim, rng):
        while True:
            dx, dy = wx - x, wy - y
            dist = math.hypot(dx, dy)
            if dist < 1e-9:
                break
            heading = math.atan2(dy, dx)
            move = min(step, dist)
            x += dx / dist * move
            y += dy / dist * move
            travelled += move
            noisy = heading + (rng.normal(0.0, sim.heading_noise) if sim.heading_noise else 0.0)
            yield x, y, noisy, travelled


class _ViewTable:
    """Columnar copy of every view pose for vectorised visibility tests."""

    def __init__(self, graph: MapGraph, lighting: str):
        self.lighting = lighting
        views = list(graph.iter_views())
        self.ids = [v.id for v in views]
        self.x = np.array([v.pose.x for v in views], dtype=float)
        self.y = np.array([v.pose.y for v in views], dtype=float)
        self.th = np.array([v.pose.theta for v in views], dtype=float)
        self.match = np.array([self._matches(v.appearance_key) for v in views], dtype=bool)

    def _matches(self, key: str) -> bool:
        return key == self.lighting or key == INVARIANT_APPEARANCE

    def add(self, view_id: int, pose: Pose2D, key: str) -> None:
        self.ids.append(view_id)
        self.x = np.append(self.x, pose.x)
        self.y = np.append(self.y, pose.y)
        self.th = np.append(self.th, pose.theta)
        self.match = np.append(self.match, self._matches(key))

    def visible(self, x: float, y: float, heading: float, radius: float,
                half_fov: float) -> np.ndarray:
        dx = self.x - x
        dy = self.y - y
        near = dx * dx + dy * dy <= radius * radius
        dth = np.abs(np.remainder(self.th - heading + math.pi, TWO_PI) - math.pi)
        return np.flatnonzero(near & (dth <= half_fov))


@dataclass
class RunResult:
    trace: RunTrace
    prune_report: Optional[PruneReport]
    pruned_component: int
    views_before_prune: int


def execute_run(env: Environment, graph: MapGraph, sim: SimConfig,
                prune: Optional[PruneConfig], run_seed: int,
                record_poses: bool = True) -> RunResult:
    """Drive one run from the dock, mutating ``graph`` in place.

    ``prune=None`` skips the end-of-run pruning step.
    """
    if not isinstance(sim, SimConfig) or not isinstance(env, Environment):
        raise TypeError("execute_run needs an Environment and a SimConfig")
    handle = begin_run(graph)
    run = handle.run_index
    lighting = env.lighting(run)
    rng = run_rng(env, run_seed, run)
    n_frames = sim.frames_per_run
    if sim.min_run_fraction < 1.0:
        n_frames = max(1, round(n_frames * rng.uniform(sim.min_run_fraction, 1.0)))
    table = _ViewTable(graph, lighting)
    trace = RunTrace(run, handle.component_id, lighting=lighting)

    radius, half_fov = sim.observation_radius, sim.observation_fov / 2
    p_match, p_miss = sim.p_observe_matched_lighting, sim.p_observe_mismatched_lighting
    since_obs = 0.0
    last_dist = 0.0
    relocalized = False
    prior_seen: dict[int, list[int]] = {}

    for frame, (x, y, heading, travelled) in enumerate(trajectory(env, sim, rng)):
        if frame >= n_frames:
            break
        since_obs += travelled - last_dist
        last_dist = travelled

        idx = table.visible(x, y, heading, radius, half_fov)
        observed: list[int] = []
        if idx.size:
            p = np.where(table.match[idx], p_match, p_miss)
            hits = idx[rng.random(idx.size) < p]
            observed = [table.ids[i] for i in hits]

        cross = False
        for vid in observed:
            stats = record_observation(graph, vid, frame)
            if stats.created_run < run:
                cross = True
            if not relocalized:
                cid = graph.component_of(vid)
                if cid != graph.active_component:
                    seen = prior_seen.setdefault(cid, [])
                    if vid not in seen:
                        seen.append(vid)
                    if len(seen) >= sim.reloc_min_views:
                        merge_components(graph, graph.active_component, cid,
                                         RigidTransform2D.identity(), seen)
                        trace.reloc_event = RelocEvent(frame, travelled, cid, tuple(seen))
                        relocalized = True

        created: frozenset[int] = frozenset()
        if observed:
            since_obs = 0.0
        elif since_obs >= sim.create_gap_distance - 1e-12:
            invariant = rng.random() < sim.p_invariant_view and not env.in_window(x, y)
            key = INVARIANT_APPEARANCE if invariant else lighting
            pose = Pose2D(x, y, heading)
            view = graph.add_view(graph.active_component, pose, key, frame)
            table.add(view.id, view.pose, key)
            created = frozenset((view.id,))
            since_obs = 0.0

        trace.frames.append(FrameEvent(
            frame, travelled, frozenset(observed), created, cross,
            (x, y, heading) if record_poses else None))

    comp_id = graph.active_component
    comp = graph.components[comp_id]
    before = len(comp)
    report = None
    if prune is not None:
        ctx = RunObservationContext(run_max_obs(comp))
        report = find_views_for_deletion(comp, prune, ctx, run)
        delete_views(graph, comp_id, report.delete_set)
    return RunResult(trace, report, comp_id, before)


@dataclass
class ExperimentResult:
    runs: list[RunResult]
    reports: list[MetricsReport]
    counts: list[int]
    graph: MapGraph

    @property
    def traces(self) -> list[RunTrace]:
        return [r.trace for r in self.runs]


def lifelong_experiment(env: Environment, n_runs: int, sim: SimConfig,
                        prune: Optional[PruneConfig], master_seed: int,
                        graph: Optional[MapGraph] = None,
                        record_poses: bool = False) -> ExperimentResult:
    """Run ``n_runs`` consecutive runs, saving and reloading the map in between."""
    if n_runs < 2:
        raise ValueError("a lifelong experiment needs at least 2 runs")
    graph = graph if graph is not None else MapGraph(env_id=env.id)
    runs, reports, counts = [], [], []
    for _ in range(n_runs):
        result = execute_run(env, graph, sim, prune, master_seed, record_poses)
        count = graph.view_count()
        runs.append(result)
        counts.append(count)
        reports.append(metrics_report(result.trace, count))
        graph = roundtrip(graph)
    return ExperimentResult(runs, reports, counts, graph)
