# A hundred runs in a changing room
# ---------------------------------
#
# The simulated robot leaves its dock, sweeps the room and comes back, once
# per run. Lighting cycles through four states, so many views only match one
# run in four. Without pruning the map keeps growing; with pruning it levels off.
#
# Takes about twenty seconds.

from pathlib import Path

from viewprune.configfile import load_environment, load_prune_config, load_sim_config
from viewprune.metrics import aggregate, growth_rate
from viewprune.simulator import lifelong_experiment

configs = Path(__file__).resolve().parents[1] / "configs"
env = load_environment(configs / "env_500ft2.txt")
sim = load_sim_config(configs / "sim.txt")
prune = load_prune_config(configs / "prune_lifelong.txt")

print(f"room: {env.width} x {env.height} m ({env.area_ft2:.0f} ft^2), lighting {env.lighting_states}")

pruned = lifelong_experiment(env, 100, sim, prune, master_seed=0)
kept_all = lifelong_experiment(env, 100, sim, None, master_seed=0)

print("run   pruned   unpruned")
for run in (1, 2, 5, 10, 20, 50, 75, 100):
    print(f"{run:>3} {pruned.counts[run - 1]:>8} {kept_all.counts[run - 1]:>10}")

print("growth over runs 50-100, pruned: %.2f views/run" % growth_rate(pruned.counts[49:]))
print("growth over runs 50-100, unpruned: %.2f views/run" % growth_rate(kept_all.counts[49:]))

# Pruning should not make relocalization harder.
for name, result in (("pruned", pruned), ("unpruned", kept_all)):
    s = aggregate(result.reports, result.counts)
    print(f"{name}: mean reloc distance {s.reloc_distance:.2f} m,"
          f" cross-observed frames {s.fraction_cross_observed:.1%}")
