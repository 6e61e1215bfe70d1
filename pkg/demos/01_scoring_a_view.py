# How a view earns its place in the map
# -------------------------------------
#
# A view is kept when its score beats a threshold. Views that ever helped the
# robot relocalize get a bonus; on top of that come two ratios, one for the
# run that just ended and one for the share of runs the view was seen in.

from viewprune import (Absolute, RelativeToMax, RunObservationContext, ScoreWeights,
                       ViewStats, compute_view_score, resolve_threshold)

weights = ScoreWeights(1.5, 1.0, 3.0)
ctx = RunObservationContext(max_obs=8)   # the busiest view this run was seen 8 times

# A veteran: used for relocalization, seen in 2 of its 4 runs, 4 times today.
veteran = ViewStats(n_obs_cur=4, n_runs=4, n_obs_runs=2, used_for_reloc=True)
print("veteran score:", compute_view_score(veteran, ctx, weights))   # 1.5 + 0.5 + 1.5

# A view from a one-off lighting condition, never seen again.
stale = ViewStats(n_obs_cur=0, n_runs=10, n_obs_runs=1)
print("stale score:  ", round(compute_view_score(stale, ctx, weights), 3))   # 3 * 1/10

# Thresholds can be absolute or a fraction of the best possible score.
print("max score:", weights.max_score())
print("a quarter of it:", resolve_threshold(RelativeToMax(0.25), weights))
print("same thing, absolute:", resolve_threshold(Absolute(1.375), weights))
