"""Command line entry point: ``viewprune {simulate,prune,sweep,report}``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .configfile import (ConfigError, load_environment, load_prune_config, load_sim_config,
                         load_sweep_spec)
from .map_model import delete_views, run_max_obs
from .metrics import aggregate
from .persistence import MapFormatError, dumps_map, loads_map
from .pruner import find_views_for_deletion
from .scoring import RunObservationContext
from .simulator import lifelong_experiment
from .sweep import SWEEP_COLUMNS, run_sweep

log = logging.getLogger("viewprune")

METRIC_COLUMNS = ("run", "views_at_end", "reloc_distance", "avg_dist_between_cross_obs",
                  "fraction_cross_observed")
SUMMARY_COLUMNS = ("n_runs", "growth_rate", "final_views", "reloc_distance",
                   "avg_dist_between_cross_obs", "fraction_cross_observed")
SERIES = ("views_at_end", "reloc_distance", "fraction_cross_observed",
          "avg_dist_between_cross_obs")


class CliError(Exception):
    pass


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def read_csv(path: Path, required: Sequence[str]) -> list[dict]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise CliError(f"{path}: empty CSV")
    missing = [c for c in required if c not in reader.fieldnames]
    if missing:
        raise CliError(f"{path}:1: missing columns {missing}")
    rows = []
    for row in reader:
        if None in row or any(v is None for v in row.values()):
            raise CliError(f"{path}:{reader.line_num}: wrong number of fields")
        rows.append(row)
    if not rows:
        raise CliError(f"{path}: no data rows")
    return rows


def _write_outputs(files: dict[Path, str]) -> None:
    """Write every file or none of them."""
    written = []
    try:
        for path, text in files.items():
            path.write_text(text, encoding="utf-8")
            written.append(path)
    except OSError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- simulate --------------------------------------------------------------

def cmd_simulate(args) -> int:
    if args.runs < 2:
        raise CliError("--runs must be at least 2: the growth rate is undefined for one run")
    env = load_environment(args.env)
    sim = load_sim_config(args.sim)
    prune = load_prune_config(args.prune)
    out = Path(args.out)
    result = lifelong_experiment(env, args.runs, sim, prune, args.seed)
    rows = [{
        "run": r.run_index,
        "views_at_end": r.views_at_run_end,
        "reloc_distance": r.reloc_distance,
        "avg_dist_between_cross_obs": r.avg_dist_between_cross_obs,
        "fraction_cross_observed": r.fraction_cross_observed,
    } for r in result.reports]
    summary = aggregate(result.reports, result.counts)
    summary_row = {
        "n_runs": summary.n_runs,
        "growth_rate": summary.growth_rate,
        "final_views": summary.final_views,
        "reloc_distance": summary.reloc_distance,
        "avg_dist_between_cross_obs": summary.avg_dist_between_cross_obs,
        "fraction_cross_observed": summary.fraction_cross_observed,
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc.strerror or exc}") from None
    _write_outputs({
        out / "metrics.csv": write_csv(rows, METRIC_COLUMNS),
        out / "summary.csv": write_csv([summary_row], SUMMARY_COLUMNS),
        out / "map.txt": dumps_map(result.graph),
    })
    print(f"{args.runs} runs: growth rate {summary.growth_rate:.3f},"
          f" final views {summary.final_views}; wrote {out}")
    return 0


# -- prune -----------------------------------------------------------------

def cmd_prune(args) -> int:
    src = Path(args.map)
    try:
        original = src.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {src}: {exc.strerror or exc}") from None
    graph = loads_map(original.decode("utf-8"))
    cfg = load_prune_config(args.config)
    if not args.dry_run and not args.out:
        raise CliError("--out is required unless --dry-run is given")

    total = 0
    lines = []
    for cid in sorted(graph.components):
        comp = graph.components[cid]
        max_obs = args.max_obs if args.max_obs is not None else run_max_obs(comp)
        report = find_views_for_deletion(comp, cfg, RunObservationContext(max_obs),
                                         graph.run_index)
        if not report.scores and not report.delete_set:
            lines.append(f"component {cid}: {len(comp)} views, no pruning")
            continue
        lines.append(f"component {cid}: {len(comp)} views, delete {len(report.delete_set)},"
                     f" protected {len(report.protected_new)},"
                     f" rescued {len(report.rescued_by_nn)}")
        for vid in sorted(report.delete_set):
            reason = "capped" if vid in report.capped else "score"
            lines.append(f"  delete {vid} score={report.scores[vid]:.6g} ({reason})")
        for vid in sorted(report.rescued_by_nn):
            lines.append(f"  keep {vid} score={report.scores[vid]:.6g} (too few neighbors)")
        total += len(report.delete_set)
        if not args.dry_run:
            delete_views(graph, cid, report.delete_set)
    if total == 0:
        lines.append("no pruning")
    print("\n".join(lines))

    if args.dry_run:
        return 0
    out = Path(args.out)
    try:
        if total == 0:
            out.write_bytes(original)
        else:
            out.write_text(dumps_map(graph), encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}") from None
    return 0


# -- sweep -----------------------------------------------------------------

def cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.spec)
    env = load_environment(args.env)
    sim = load_sim_config(args.sim)
    rows = run_sweep(spec, env, sim, args.seed, args.jobs)
    _write_outputs({Path(args.out): write_csv(rows, SWEEP_COLUMNS)})
    n_sel = sum(r["selected"] for r in rows)
    print(f"{len(rows)} cells, {n_sel} selected; wrote {args.out}")
    return 0


# -- report ----------------------------------------------------------------

def report_rows(paths: Sequence[Path]) -> list[dict]:
    labels = [p.stem for p in paths]
    if len(set(labels)) < len(labels):
        labels = [str(p) for p in paths]
    out = []
    for label, path in zip(labels, paths):
        for row in read_csv(path, METRIC_COLUMNS):
            for metric in SERIES:
                value = row[metric]
                if value == "":
                    continue
                try:
                    float(value)
                    run = int(row["run"])
                except ValueError:
                    raise CliError(f"{path}: bad number in row for run {row['run']!r}") from None
                out.append({"source": label, "run": run, "metric": metric, "value": value})
    return out


def cmd_report(args) -> int:
    rows = report_rows([Path(p) for p in args.csv])
    text = write_csv(rows, ("source", "run", "metric", "value"))
    if args.out:
        _write_outputs({Path(args.out): text})
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viewprune", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a lifelong multi-run experiment")
    p.add_argument("--env", required=True)
    p.add_argument("--sim", required=True)
    p.add_argument("--prune", required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prune", help="prune a saved map")
    p.add_argument("map")
    p.add_argument("--config", required=True, help="file with a prune record")
    p.add_argument("--max-obs", type=int, default=None,
                   help="largest per-view observation count of the run (default: from map)")
    p.add_argument("--out")
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("sweep", help="sweep weights or neighbour parameters")
    p.add_argument("--spec", required=True)
    p.add_argument("--env", required=True)
    p.add_argument("--sim", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="convert metrics CSVs to long-format series")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ConfigError, MapFormatError) as exc:
        print(f"viewprune {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"viewprune {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
