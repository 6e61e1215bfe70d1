# Pruning one component by hand
# -----------------------------
#
# Low scorers are candidates for deletion, but a candidate is only removed
# while enough other views remain nearby. That keeps sparse areas covered.

import numpy as np

from viewprune import (Component, Pose2D, PruneConfig, RunObservationContext, View,
                       ViewStats, VoxelSize, find_views_for_deletion)

rng = np.random.default_rng(0)

views = {}
# a crowded corner: 40 views in half a square metre, none seen lately
for i in range(1, 41):
    x, y = rng.uniform(0, 0.7, 2)
    views[i] = View(i, Pose2D(x, y, 0.0), "day", ViewStats(n_runs=6, n_obs_runs=1))
# a lonely corridor: 6 equally stale views, spread out
for i in range(41, 47):
    views[i] = View(i, Pose2D(3.0 + 1.5 * (i - 41), 0.0, 0.0), "day",
                    ViewStats(n_runs=6, n_obs_runs=1))

comp = Component(1, views)
config = PruneConfig(min_views=25, nn_threshold=5, voxel=VoxelSize(1, 1, 2))
report = find_views_for_deletion(comp, config, RunObservationContext(max_obs=0), current_run=7)

print("views:", len(comp))
print("deleted:", len(report.delete_set))
print("rescued for coverage:", sorted(report.rescued_by_nn))
# Every corridor view survives; the corner is thinned down to a handful.
corner_left = sorted(v for v in report.kept if v <= 40)
print("corner views left:", corner_left)

# Without the neighbour check everything stale would go.
blunt = find_views_for_deletion(comp, PruneConfig(nn_enabled=False),
                                RunObservationContext(max_obs=0), current_run=7)
print("deleted with the check off:", len(blunt.delete_set))
