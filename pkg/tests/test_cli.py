import csv

import pytest

from viewprune.cli import main
from viewprune.configfile import format_environment, format_sim_config
from viewprune.map_model import MapGraph, Pose2D, View, ViewStats
from viewprune.persistence import dumps_map, load_map
from viewprune.simulator import Environment, SimConfig


@pytest.fixture
def small_inputs(tmp_path, configs_dir):
    env = tmp_path / "env.txt"
    env.write_text(format_environment(
        Environment(width=4, height=4, lighting_states=("a", "b"), id="small")) + "\n")
    sim = tmp_path / "sim.txt"
    sim.write_text(format_sim_config(SimConfig(frames_per_run=300)) + "\n")
    return {"env": env, "sim": sim, "prune": configs_dir / "prune_lifelong.txt"}


def simulate(inputs, out, runs=5, seed=0):
    return main(["simulate", "--env", str(inputs["env"]), "--sim", str(inputs["sim"]),
                 "--prune", str(inputs["prune"]), "--runs", str(runs), "--seed", str(seed),
                 "--out", str(out)])


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_simulate_writes_outputs(small_inputs, tmp_path):
    out = tmp_path / "out"
    assert simulate(small_inputs, out, runs=6) == 0
    metrics = rows(out / "metrics.csv")
    assert [int(r["run"]) for r in metrics] == list(range(1, 7))
    assert metrics[0]["reloc_distance"] == ""
    summary = rows(out / "summary.csv")
    assert len(summary) == 1 and int(summary[0]["n_runs"]) == 6
    g = load_map(out / "map.txt")
    assert g.view_count() == int(metrics[-1]["views_at_end"])


def test_simulate_one_run_is_an_error(small_inputs, tmp_path, capsys):
    assert simulate(small_inputs, tmp_path / "out", runs=1) != 0
    assert "growth rate" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_missing_env_leaves_no_outputs(small_inputs, tmp_path):
    small_inputs["env"] = tmp_path / "missing.txt"
    assert simulate(small_inputs, tmp_path / "out") == 2
    assert not (tmp_path / "out").exists()


def saved_map(tmp_path, n):
    g = MapGraph(env_id="t", run_index=3)
    c = g.new_component()
    for i in range(n):
        g.insert_view(c.id, View(i + 1, Pose2D(0.02 * i, 0, 0), "day",
                                 ViewStats(n_obs_cur=0, created_run=1, n_runs=3,
                                           n_obs_runs=1 + (i % 3 == 0) * 2)))
    path = tmp_path / "map.txt"
    path.write_text(dumps_map(g))
    return path


def test_prune_small_map_copies_bytes(tmp_path, configs_dir, capsys):
    src = saved_map(tmp_path, 10)
    out = tmp_path / "pruned.txt"
    assert main(["prune", str(src), "--config", str(configs_dir / "prune_lifelong.txt"),
                 "--out", str(out)]) == 0
    assert "no pruning" in capsys.readouterr().out
    assert out.read_bytes() == src.read_bytes()


def test_prune_large_map(tmp_path, configs_dir, capsys):
    src = saved_map(tmp_path, 40)
    out = tmp_path / "pruned.txt"
    cfg = str(configs_dir / "prune_lifelong.txt")
    assert main(["prune", str(src), "--config", cfg, "--dry-run"]) == 0
    assert "delete" in capsys.readouterr().out
    assert not out.exists()
    assert main(["prune", str(src), "--config", cfg, "--out", str(out)]) == 0
    after = load_map(out)
    # high scorers (seen every run) survive, plus a handful rescued for coverage
    assert 14 <= after.view_count() < 40
    assert main(["prune", str(src), "--config", cfg]) == 2


def test_prune_bad_map(tmp_path, configs_dir):
    bad = tmp_path / "bad.txt"
    bad.write_text("viewmap-v9\n")
    assert main(["prune", str(bad), "--config", str(configs_dir / "prune_lifelong.txt"),
                 "--dry-run"]) == 2


def test_report(small_inputs, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    simulate(small_inputs, a, runs=3)
    simulate(small_inputs, b, runs=3, seed=1)
    out = tmp_path / "long.csv"
    assert main(["report", str(a / "metrics.csv"), str(b / "metrics.csv"),
                 "--out", str(out)]) == 0
    long = rows(out)
    assert {r["source"] for r in long} == {str(a / "metrics.csv"), str(b / "metrics.csv")}
    assert {r["metric"] for r in long} >= {"views_at_end", "fraction_cross_observed"}
    bad = tmp_path / "bad.csv"
    bad.write_text("run,other\n1,2\n")
    assert main(["report", str(bad)]) == 2


def test_sweep_one_cell_matches_simulate(small_inputs, tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text("sweep kind=nn runs=4 growth_rate_max=1000\n"
                    "grid nn_threshold=5 voxel=1:1:2\n"
                    "prune min_views=25 weights=1.5,1,3 threshold=abs:1.375\n")
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--spec", str(spec), "--env", str(small_inputs["env"]),
                 "--sim", str(small_inputs["sim"]), "--seed", "2", "--out", str(out)]) == 0
    (row,) = rows(out)
    simulate(small_inputs, tmp_path / "sim", runs=4, seed=2)
    (summary,) = rows(tmp_path / "sim" / "summary.csv")
    assert row["final_views"] == summary["final_views"]
    assert row["growth_rate"] == summary["growth_rate"]
    assert row["selected"] == "1"


def test_sweep_parallel_matches_serial(small_inputs, tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text("sweep kind=weights runs=3\ngrid w1=0,1.5 w2=1 w3=3\n")
    args = ["sweep", "--spec", str(spec), "--env", str(small_inputs["env"]),
            "--sim", str(small_inputs["sim"])]
    assert main(args + ["--out", str(tmp_path / "s.csv")]) == 0
    assert main(args + ["--jobs", "2", "--out", str(tmp_path / "p.csv")]) == 0
    assert (tmp_path / "s.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()
