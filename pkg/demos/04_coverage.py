# Where do the surviving views sit?
# ---------------------------------
#
# Count views per 1 m cell after 20 runs, with and without the neighbour check.
# The score threshold for the check-off map is raised until both maps are
# roughly the same size, so only the placement differs.

import math
from pathlib import Path

import numpy as np

from viewprune import Absolute, PruneConfig
from viewprune.configfile import load_environment, load_sim_config
from viewprune.simulator import lifelong_experiment

configs = Path(__file__).resolve().parents[1] / "configs"
env = load_environment(configs / "env_500ft2.txt")
sim = load_sim_config(configs / "sim.txt")


def grid(graph):
    cells = np.zeros((math.ceil(env.height), math.ceil(env.width)), dtype=int)
    for v in graph.iter_views():
        cells[min(int(v.pose.y), cells.shape[0] - 1), min(int(v.pose.x), cells.shape[1] - 1)] += 1
    return cells


with_nn = lifelong_experiment(env, 20, sim, PruneConfig(), master_seed=1)
target = with_nn.counts[-1]

# crude threshold search for a similarly sized map
best = None
for threshold in np.linspace(0.5, 2.0, 7):
    r = lifelong_experiment(env, 20, sim, PruneConfig(nn_enabled=False,
                                                      threshold=Absolute(threshold)), 1)
    if best is None or abs(r.counts[-1] - target) < abs(best.counts[-1] - target):
        best = r

for name, result in (("neighbour check on", with_nn), ("neighbour check off", best)):
    cells = grid(result.graph)
    print(f"{name}: {cells.sum()} views, CV {cells.std() / cells.mean():.2f}")
    print(np.flipud(cells))   # top row is the far wall
    print()
