"""View management for lifelong graph-based visual SLAM maps."""

from .map_model import (Component, MapGraph, Pose2D, RigidTransform2D, RunHandle, View,
                        ViewStats, begin_run, delete_views, merge_components,
                        normalize_angle, record_observation, run_max_obs)
from .metrics import (FrameEvent, MetricsReport, RunTrace, Summary, aggregate,
                      cross_observation_stats, growth_rate, relocalization_distance)
from .persistence import load_map, loads_map, save_map, dumps_map
from .pruner import PruneConfig, PruneReport, find_views_for_deletion
from .scoring import (Absolute, RelativeToMax, RunObservationContext, ScoreWeights,
                      compute_view_score, resolve_threshold)
from .spatial_index import ViewGridIndex, VoxelSize, angular_distance, count_neighbors

__version__ = "0.1.0"
