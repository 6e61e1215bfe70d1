"""Parameter sweeps over pruning configurations.

Every cell replays the same seeded runs, so differences between rows come
from the pruning parameters alone.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .configfile import SweepSpec
from .metrics import Summary, aggregate
from .pruner import PruneConfig
from .scoring import resolve_threshold
from .simulator import Environment, SimConfig, lifelong_experiment

SWEEP_COLUMNS = ("cell", "w1", "w2", "w3", "threshold", "nn_enabled", "nn_threshold",
                 "voxel_x", "voxel_y", "voxel_theta", "avg_dist_between_cross_obs",
                 "fraction_cross_observed", "growth_rate", "reloc_distance", "final_views",
                 "selected")


def run_cell(env: Environment, sim: SimConfig, prune: PruneConfig, runs: int,
             seed: int) -> Summary:
    result = lifelong_experiment(env, runs, sim, prune, seed)
    return aggregate(result.reports, result.counts)


def _run_cell_args(args) -> Summary:
    return run_cell(*args)


def is_selected(summary: Summary, selection: dict[str, float]) -> bool:
    """True when the row meets every selection threshold present."""
    checks = {
        "growth_rate_max": lambda v: summary.growth_rate <= v,
        "growth_rate_min": lambda v: summary.growth_rate >= v,
        "dist_between_cross_obs_max": lambda v: (summary.avg_dist_between_cross_obs is not None
                                                 and summary.avg_dist_between_cross_obs <= v),
        "fraction_cross_observed_min": lambda v: (summary.fraction_cross_observed is not None
                                                  and summary.fraction_cross_observed >= v),
        "reloc_distance_max": lambda v: (summary.reloc_distance is not None
                                         and summary.reloc_distance <= v),
    }
    return all(checks[key](value) for key, value in selection.items())


def _row(index: int, prune: PruneConfig, summary: Summary, selected: bool) -> dict:
    return {
        "cell": index,
        "w1": prune.weights.w1,
        "w2": prune.weights.w2,
        "w3": prune.weights.w3,
        "threshold": resolve_threshold(prune.threshold, prune.weights),
        "nn_enabled": int(prune.nn_enabled),
        "nn_threshold": prune.nn_threshold,
        "voxel_x": prune.voxel.sx,
        "voxel_y": prune.voxel.sy,
        "voxel_theta": prune.voxel.stheta,
        "avg_dist_between_cross_obs": summary.avg_dist_between_cross_obs,
        "fraction_cross_observed": summary.fraction_cross_observed,
        "growth_rate": summary.growth_rate,
        "reloc_distance": summary.reloc_distance,
        "final_views": summary.final_views,
        "selected": int(selected),
    }


def run_sweep(spec: SweepSpec, env: Environment, sim: SimConfig, seed: int,
              jobs: Optional[int] = 1) -> list[dict]:
    """One row per grid cell, in cell order regardless of ``jobs``."""
    args = [(env, sim, cell.prune, spec.runs, seed) for cell in spec.cells]
    if jobs is not None and jobs <= 1:
        summaries = [_run_cell_args(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_run_cell_args, args))
    return [_row(cell.index, cell.prune, s, is_selected(s, spec.selection))
            for cell, s in zip(spec.cells, summaries)]
