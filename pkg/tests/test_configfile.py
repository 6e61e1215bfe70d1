import pytest

from viewprune.configfile import (ConfigError, format_environment, format_prune_config,
                                  format_sim_config, load_environment, load_prune_config,
                                  load_sim_config, load_sweep_spec)
from viewprune.pruner import PruneConfig
from viewprune.scoring import Absolute, RelativeToMax, ScoreWeights
from viewprune.simulator import Environment, SimConfig
from viewprune.spatial_index import VoxelSize


def test_shipped_configs_load(configs_dir):
    env = load_environment(configs_dir / "env_500ft2.txt")
    assert env.lighting_states == ("dawn", "day", "dusk", "night")
    assert 450 <= env.area_ft2 <= 550
    assert load_sim_config(configs_dir / "sim.txt") == SimConfig()
    lifelong = load_prune_config(configs_dir / "prune_lifelong.txt")
    assert lifelong == PruneConfig(threshold=Absolute(1.375))
    assert load_prune_config(configs_dir / "prune_off.txt").min_views >= 10**9
    assert len(load_sweep_spec(configs_dir / "sweep_weights.txt").cells) == 35
    assert len(load_sweep_spec(configs_dir / "sweep_nn.txt").cells) == 12


def test_round_trips():
    env = Environment(width=5, height=4, lighting_states=("a", "b"), windows=((0, 0, 1, 1),))
    assert load_environment(format_environment(env), is_text=True) == env
    sim = SimConfig(frames_per_run=123, lane_jitter=0.0)
    assert load_sim_config(format_sim_config(sim), is_text=True) == sim
    cfg = PruneConfig(min_views=3, voxel=VoxelSize(0.5, 0.5, 1), threshold=RelativeToMax(0.3),
                      weights=ScoreWeights(1, 2, 3), nn_enabled=False, max_views_cap=90)
    assert load_prune_config(format_prune_config(cfg), is_text=True) == cfg


@pytest.mark.parametrize("text", [
    "prune min_views=abc",
    "prune colour=blue",
    "prune min_views",
    "prune voxel=1,1",
    "prune min_views=1 min_views=2",
    "prune threshold=pct:3",
    "prune min_views=30 max_views_cap=10",
    "sim frames_per_run=0",
    "sim warp=1",
    "",
])
def test_bad_config(text):
    loader = load_sim_config if text.startswith("sim") else load_prune_config
    with pytest.raises(ConfigError):
        loader(text, is_text=True)


def test_bad_environment():
    with pytest.raises(ConfigError):
        load_environment("environment width=1 height=1 dock=5,5,0", is_text=True)
    with pytest.raises(ConfigError):
        load_environment("environment windows=1:2:3", is_text=True)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_environment(tmp_path / "nope.txt")


def test_weights_grid_order():
    spec = load_sweep_spec("sweep kind=weights runs=3 growth_rate_max=5\n"
                           "grid w1=0,1 w2=1 w3=2,3\n", is_text=True)
    ws = [(c.prune.weights.w1, c.prune.weights.w3) for c in spec.cells]
    assert ws == [(0, 2), (0, 3), (1, 2), (1, 3)]
    assert all(not c.prune.nn_enabled for c in spec.cells)
    assert spec.cells[0].prune.threshold == RelativeToMax(0.25)
    assert spec.selection == {"growth_rate_max": 5.0} and spec.runs == 3


def test_nn_grid():
    spec = load_sweep_spec("sweep kind=nn\ngrid nn_threshold=1,5 voxel=1:1:1;2:2:2\n",
                           is_text=True)
    got = [(c.prune.nn_threshold, c.prune.voxel.sx) for c in spec.cells]
    assert got == [(1, 1), (1, 2), (5, 1), (5, 2)]


@pytest.mark.parametrize("text", [
    "sweep kind=other\ngrid w1=1",
    "sweep kind=weights\ngrid nn_threshold=1",
    "sweep kind=weights runs=1\ngrid w1=1",
    "sweep kind=weights best=3\ngrid w1=1",
    "grid w1=1",
])
def test_bad_sweep(text):
    with pytest.raises(ConfigError):
        load_sweep_spec(text, is_text=True)
