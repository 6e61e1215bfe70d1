# Saving maps and sweeping weights
# --------------------------------
#
# Maps are plain text, one record per line, so they diff nicely. A small
# sweep shows how the weights trade map size against re-observation.

import io
from pathlib import Path

from viewprune.configfile import load_environment, load_sim_config, load_sweep_spec
from viewprune.persistence import dumps_map, load_map, save_map
from viewprune.pruner import PruneConfig
from viewprune.simulator import lifelong_experiment
from viewprune.sweep import run_sweep

configs = Path(__file__).resolve().parents[1] / "configs"
env = load_environment(configs / "env_500ft2.txt")
sim = load_sim_config(configs / "sim.txt")

result = lifelong_experiment(env, 3, sim, PruneConfig(), master_seed=0)
text = dumps_map(result.graph)
print("\n".join(text.splitlines()[:4]))
print("...", text.count("\nview "), "views")

buf = io.StringIO()
save_map(result.graph, buf)
buf.seek(0)
assert load_map(buf) == result.graph

# two weightings: ignore relocalization use vs. value it
spec = load_sweep_spec("sweep kind=weights runs=6\ngrid w1=0,1.5 w2=1 w3=3\n", is_text=True)
for row in run_sweep(spec, env, sim, seed=0):
    print(f"w1={row['w1']}: final views {row['final_views']},"
          f" growth {row['growth_rate']:.1f}/run, reloc {row['reloc_distance']:.2f} m")
