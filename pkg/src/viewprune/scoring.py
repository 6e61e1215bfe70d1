"""Per-view retention score and score-threshold resolution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .map_model import ViewStats


@dataclass(frozen=True)
class ScoreWeights:
    w1: float = 1.5  # used for relocalization
    w2: float = 1.0  # share of this run's observations
    w3: float = 3.0  # share of runs in which the view was seen

    def __post_init__(self):
        for name in ("w1", "w2", "w3"):
            w = getattr(self, name)
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {w}")

    def max_score(self) -> float:
        return self.w1 + self.w2 + self.w3

    def scaled(self, c: float) -> "ScoreWeights":
        return ScoreWeights(self.w1 * c, self.w2 * c, self.w3 * c)


@dataclass(frozen=True)
class Absolute:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"absolute threshold must be finite and >= 0, got {self.value}")


@dataclass(frozen=True)
class RelativeToMax:
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"relative threshold must lie in [0, 1], got {self.fraction}")


ScoreThreshold = Union[Absolute, RelativeToMax]


@dataclass(frozen=True)
class RunObservationContext:
    max_obs: int

    def __post_init__(self):
        if self.max_obs < 0:
            raise ValueError(f"max_obs must be >= 0, got {self.max_obs}")


def compute_view_score(stats: ViewStats, ctx: RunObservationContext,
                       weights: ScoreWeights) -> float:
    if stats.n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {stats.n_runs}")
    if stats.n_obs_cur > ctx.max_obs:
        raise ValueError(
            f"n_obs_cur={stats.n_obs_cur} exceeds max_obs={ctx.max_obs}")
    reloc = 1.0 if stats.used_for_reloc else 0.0
    # no observations yet this run: the current-run term contributes nothing
    cur_ratio = stats.n_obs_cur / ctx.max_obs if ctx.max_obs > 0 else 0.0
    run_ratio = stats.n_obs_runs / stats.n_runs
    return weights.w1 * reloc + weights.w2 * cur_ratio + weights.w3 * run_ratio


def resolve_threshold(threshold: ScoreThreshold, weights: ScoreWeights) -> float:
    if isinstance(threshold, Absolute):
        return threshold.value
    if isinstance(threshold, RelativeToMax):
        return threshold.fraction * weights.max_score()
    raise TypeError(f"not a score threshold: {threshold!r}")


def parse_threshold(text: str) -> ScoreThreshold:
    """Parse ``abs:<v>`` or ``rel:<f>`` (a bare number means absolute)."""
    kind, _, value = text.partition(":")
    if not value:
        return Absolute(float(kind))
    if kind == "abs":
        return Absolute(float(value))
    if kind == "rel":
        return RelativeToMax(float(value))
    raise ValueError(f"unknown threshold kind {kind!r} in {text!r}")


def format_threshold(threshold: ScoreThreshold) -> str:
    if isinstance(threshold, Absolute):
        return f"abs:{threshold.value!r}"
    return f"rel:{threshold.fraction!r}"
