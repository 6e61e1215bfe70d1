"""Relocalization and map-growth criteria computed from run traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import fmean
from typing import Optional, Sequence


@dataclass(frozen=True)
class FrameEvent:
    index: int
    distance: float
    observed_views: frozenset[int] = frozenset()
    created_views: frozenset[int] = frozenset()
    cross_observation: bool = False
    pose: Optional[tuple[float, float, float]] = None


@dataclass(frozen=True)
class RelocEvent:
    frame: int
    distance: float
    component: int = -1
    views: tuple[int, ...] = ()


@dataclass
class RunTrace:
    run_index: int
    start_component: int
    frames: list[FrameEvent] = field(default_factory=list)
    reloc_event: Optional[RelocEvent] = None
    lighting: str = ""

    def check(self) -> None:
        prev = -math.inf
        for f in self.frames:
            if f.distance < prev:
                raise ValueError(f"travel distance decreases at frame {f.index}")
            prev = f.distance


@dataclass(frozen=True)
class MetricsReport:
    run_index: int
    views_at_run_end: int
    fraction_cross_observed: float = 0.0
    avg_dist_between_cross_obs: Optional[float] = None
    reloc_distance: Optional[float] = None


@dataclass(frozen=True)
class Summary:
    n_runs: int
    growth_rate: float
    avg_dist_between_cross_obs: Optional[float]
    fraction_cross_observed: Optional[float]
    reloc_distance: Optional[float]
    final_views: int


def growth_rate(view_counts: Sequence[float]) -> float:
    """Mean per-run change in view count from the second run to the last."""
    n = len(view_counts)
    if n < 2:
        raise ValueError(f"growth rate needs at least 2 runs, got {n}")
    return (view_counts[-1] - view_counts[1]) / (n - 1)


def cross_observation_gaps(trace: RunTrace) -> list[float]:
    gaps = []
    last = 0.0
    for f in trace.frames:
        if f.cross_observation:
            gaps.append(f.distance - last)
            last = f.distance
    return gaps


def cross_observation_stats(trace: RunTrace) -> tuple[Optional[float], float]:
    """Return ``(mean travel between cross-observations, cross-observed frame share)``.

    The first gap runs from the start of the run to the first frame that
    re-observes a view from an earlier run.
    """
    if trace.run_index < 2:
        raise ValueError("cross-observations are undefined for the first run")
    if not trace.frames:
        return None, 0.0
    gaps = cross_observation_gaps(trace)
    frac = len(gaps) / len(trace.frames)
    return (fmean(gaps) if gaps else None), frac


def relocalization_distance(trace: RunTrace) -> Optional[float]:
    if trace.reloc_event is None:
        return None
    return trace.reloc_event.distance


def metrics_report(trace: RunTrace, views_at_run_end: int) -> MetricsReport:
    if trace.run_index < 2:
        return MetricsReport(trace.run_index, views_at_run_end)
    avg, frac = cross_observation_stats(trace)
    return MetricsReport(trace.run_index, views_at_run_end, frac, avg,
                         relocalization_distance(trace))


def _mean(values) -> Optional[float]:
    values = [v for v in values if v is not None]
    return fmean(values) if values else None


def aggregate(reports: Sequence[MetricsReport],
              counts: Optional[Sequence[float]] = None) -> Summary:
    """Average per-run metrics; runs where a metric is undefined are skipped.

    The first run never contributes to the relocalization or cross-observation
    means since it has nothing to relocalize into.
    """
    if len(reports) < 2:
        raise ValueError(f"need at least 2 runs to aggregate, got {len(reports)}")
    if counts is None:
        counts = [r.views_at_run_end for r in reports]
    later = [r for r in reports if r.run_index >= 2]
    return Summary(
        n_runs=len(reports),
        growth_rate=growth_rate(counts),
        avg_dist_between_cross_obs=_mean(r.avg_dist_between_cross_obs for r in later),
        fraction_cross_observed=_mean(r.fraction_cross_observed for r in later),
        reloc_distance=_mean(r.reloc_distance for r in later),
        final_views=int(counts[-1]),
    )
