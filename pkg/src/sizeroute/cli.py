"""Command-line front end: ``eval``, ``optimize``, ``sweep``, ``verify-bounds``, ``simulate``.

Exit codes: 0 success, 2 flag error, 3 infeasible single-point evaluation,
4 bound-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import (LEMMA2_MIN_R, ratio_lower_bound, sita_upper_bound, tags_lower_bound,
                     verify_bounds)
from .distributions import BoundedPareto
from .errors import ConfigError, DomainError, HypothesisError
from .simulator import SimConfig, replicate
from .sita import evaluate_sita, optimal_sita_cutoff
from .tags import evaluate_tags, optimal_tags_threshold

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BOUND_FAILURE = 0, 2, 3, 4
OUTPUT_DIR_ENV = "SIZEROUTE_OUTPUT_DIR"

SWEEP_COLUMNS = [
    "r", "lambda", "alpha", "s_tags", "s_sita", "w_tags", "w_sita", "ratio",
    "ratio_lower_bound", "tags_lower_bound", "sita_upper_bound", "feasible_tags", "feasible_sita",
]
SIM_COLUMNS = ["w_tags_sim", "w_tags_ci", "w_sita_sim", "w_sita_ci", "ratio_sim"]
BOUND_COLUMNS = [
    "r", "lambda", "tags_lower", "sita_upper", "ratio_lower", "computed_tags", "computed_sita",
    "computed_ratio", "lemma1_holds", "lemma2_holds", "lemma2_asserted", "ratio_holds",
    "tags_lower_corrected", "lemma1_corrected_holds", "all_hold",
]


def fmt(value) -> str:
    """CSV cell: 12 significant digits for floats, lowercase booleans, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


@dataclass
class SweepSpec:
    alpha_values: list
    lambda_values: list
    r_min: float = 10.0
    r_max: float = 1000.0
    r_points: int = 60
    r_spacing: str = "log"
    mode: str = "analytic"
    output_path: str = "sweep.csv"
    sita_at_tags_threshold: bool = False
    sim_jobs: int = 200_000
    seed: int = 1

    def __post_init__(self):
        if not self.alpha_values or not self.lambda_values:
            raise ConfigError("alpha and lambda lists must be non-empty")
        if self.r_min < 2 or self.r_max < self.r_min:
            raise ConfigError(f"need 2 <= r_min <= r_max, got {self.r_min}, {self.r_max}")
        if self.r_points < 2:
            raise ConfigError("r grid needs at least 2 points")
        if self.r_spacing not in ("log", "linear"):
            raise ConfigError(f"unknown spacing {self.r_spacing!r}")
        if self.mode not in ("analytic", "simulate", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")

    def r_grid(self) -> np.ndarray:
        if self.r_spacing == "log":
            grid = np.geomspace(self.r_min, self.r_max, self.r_points)
        else:
            grid = np.linspace(self.r_min, self.r_max, self.r_points)
        grid[0], grid[-1] = self.r_min, self.r_max
        return grid


def _bounds_apply(alpha: float, lam: float, r: float) -> bool:
    return alpha == 1.0 and lam * r < 1.0


def sweep_point(alpha: float, lam: float, r: float, sita_at_tags_threshold: bool = False,
                mode: str = "analytic", sim_jobs: int = 200_000, seed: int = 1) -> dict:
    """One CSV row of the TAGS/SITA ratio sweep."""
    d = BoundedPareto(alpha, r)
    tags = optimal_tags_threshold(d, lam)
    if sita_at_tags_threshold:
        s_sita = tags.optimal_threshold
        if tags.feasible:
            ev = evaluate_sita(d, lam, s_sita)
            w_sita, feasible_sita = ev.total_wait, ev.feasible
        else:
            w_sita, feasible_sita = math.inf, False
    else:
        sita = optimal_sita_cutoff(d, lam)
        s_sita, w_sita, feasible_sita = sita.optimal_threshold, sita.optimal_value, sita.feasible
    w_tags = tags.optimal_value
    ratio = w_tags / w_sita if (tags.feasible and feasible_sita and w_sita > 0) else math.nan
    bounds_ok = _bounds_apply(alpha, lam, r)
    row = {
        "r": r, "lambda": lam, "alpha": alpha,
        "s_tags": tags.optimal_threshold, "s_sita": s_sita,
        "w_tags": w_tags, "w_sita": w_sita, "ratio": ratio,
        "ratio_lower_bound": ratio_lower_bound(r) if bounds_ok else None,
        "tags_lower_bound": tags_lower_bound(lam, r) if bounds_ok else None,
        "sita_upper_bound": sita_upper_bound(lam, r) if bounds_ok else None,
        "feasible_tags": tags.feasible, "feasible_sita": feasible_sita,
    }
    if mode != "analytic":
        sim = {}
        for name, policy, s, ok in (("tags", "tags", tags.optimal_threshold, tags.feasible),
                                    ("sita", "sita", s_sita, feasible_sita)):
            if ok:
                res = replicate(SimConfig(seed, sim_jobs, policy, s, lam, d), 1)
                sim[name] = (res.mean_wait, res.ci_halfwidth)
            else:
                sim[name] = (math.nan, math.nan)
        sim_ratio = sim["tags"][0] / sim["sita"][0] if sim["sita"][0] > 0 else math.nan
        if mode == "simulate":
            row.update(w_tags=sim["tags"][0], w_sita=sim["sita"][0], ratio=sim_ratio)
        else:
            row.update(w_tags_sim=sim["tags"][0], w_tags_ci=sim["tags"][1],
                       w_sita_sim=sim["sita"][0], w_sita_ci=sim["sita"][1], ratio_sim=sim_ratio)
    return row


def _sweep_task(args):
    return sweep_point(*args)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    tasks = [(float(a), float(lam), float(r), spec.sita_at_tags_threshold, spec.mode,
              spec.sim_jobs, spec.seed)
             for a in spec.alpha_values for lam in spec.lambda_values for r in spec.r_grid()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_task, tasks, chunksize=8))
    else:
        rows = [_sweep_task(t) for t in tasks]
    rows.sort(key=lambda row: (row["alpha"], row["lambda"], row["r"]))
    return rows


def write_rows(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])


def plot_script(csv_path: Path, rows: list[dict]) -> str:
    """gnuplot script drawing one ratio curve per (alpha, lambda) pair."""
    pairs = sorted({(row["alpha"], row["lambda"]) for row in rows})
    lines = [
        "set datafile separator ','",
        "set logscale x",
        "set xlabel 'r'",
        "set ylabel 'E[W_TAGS] / E[W_SITA]'",
        "set key left top",
        "set terminal pngcairo size 900,600",
        f"set output '{csv_path.with_suffix('.png').name}'",
    ]
    curves = [
        f"'{csv_path.name}' every ::1 using ($3=={a:.12g} && $2=={lam:.12g} ? $1 : 1/0):8 "
        f"with linespoints title 'alpha={a:g}, lambda={lam:g}'"
        for a, lam in pairs
    ]
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _spec_from_args(args) -> SweepSpec:
    values = {}
    if args.config:
        with open(args.config) as fh:
            values.update(json.load(fh))
    flag_map = {
        "alpha_values": args.alpha, "lambda_values": args.lam, "r_min": args.r_min,
        "r_max": args.r_max, "r_points": args.r_points, "r_spacing": args.spacing,
        "mode": args.mode, "output_path": args.output, "sim_jobs": args.jobs, "seed": args.seed,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    if args.sita_at_tags_threshold:
        values["sita_at_tags_threshold"] = True
    for key in ("alpha_values", "lambda_values"):
        if isinstance(values.get(key), str):
            values[key] = _floats(values[key])
    values.setdefault("alpha_values", [1.0])
    values.setdefault("lambda_values", [0.05, 0.01, 0.005, 0.001])
    return SweepSpec(**values)


def cmd_eval(args) -> int:
    d = BoundedPareto(args.alpha, args.r)
    evaluate = evaluate_sita if args.policy == "sita" else evaluate_tags
    ev = evaluate(d, args.lam, args.s)
    print(json.dumps(ev.as_dict(), indent=2))
    if not ev.feasible:
        print(f"infeasible: {ev.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_optimize(args) -> int:
    d = BoundedPareto(args.alpha, args.r)
    search = optimal_sita_cutoff if args.policy == "sita" else optimal_tags_threshold
    res = search(d, args.lam)
    print(json.dumps({"policy": args.policy, **res.as_dict()}, indent=2))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    rows = run_sweep(spec, workers=args.workers)
    out = resolve_output(spec.output_path)
    columns = SWEEP_COLUMNS + (SIM_COLUMNS if spec.mode == "both" else [])
    write_rows(out, columns, rows)
    print(f"wrote {len(rows)} rows to {out}")
    if args.plot_script:
        script = resolve_output(args.plot_script)
        script.write_text(plot_script(out, rows))
        print(f"wrote plot script to {script}")
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    r_values = args.r or []
    reports = []
    for r in r_values:
        lams = list(args.lam or []) + [c / r for c in (args.lam_r or [])]
        for lam in lams:
            try:
                reports.append(verify_bounds(BoundedPareto(1.0, r), lam))
            except HypothesisError as exc:
                print(f"skipped r={r:g}, lambda={lam:g}: {exc}", file=sys.stderr)
    failures = [x for x in reports if not x.all_hold]
    for rep in failures:
        what = [] if rep.lemma1_holds else [f"TAGS {rep.computed_tags:.6g} <= {rep.tags_lower:.6g}"]
        if rep.lemma2_asserted and not rep.lemma2_holds:
            what.append(f"SITA {rep.computed_sita:.6g} > {rep.sita_upper:.6g}")
        print(f"FAIL r={rep.r:g} lambda={rep.arrival_rate:.6g}: {'; '.join(what)}")
    if args.output:
        rows = [{**x.as_dict(), "lambda": x.arrival_rate} for x in reports]
        write_rows(resolve_output(args.output), BOUND_COLUMNS, rows)
    lemma1_ok = all(x.lemma1_holds for x in reports)
    lemma2 = [x for x in reports if x.r >= LEMMA2_MIN_R]
    print(f"checked {len(reports)} points; lemma 1 (TAGS > lambda*r) "
          f"{'passed' if lemma1_ok else 'FAILED'} at {sum(x.lemma1_holds for x in reports)}/{len(reports)}; "
          f"SITA upper bound held at {sum(x.lemma2_holds for x in lemma2)}/{len(lemma2)} points with r >= {LEMMA2_MIN_R:g}; "
          f"TAGS > lambda*r/2 at {sum(x.lemma1_corrected_holds for x in reports)}/{len(reports)}")
    return EXIT_OK if not failures else EXIT_BOUND_FAILURE


def cmd_simulate(args) -> int:
    d = BoundedPareto(args.alpha, args.r)
    cfg = SimConfig(seed=args.seed, num_jobs=args.jobs, policy=args.policy, threshold=args.s,
                    arrival_rate=args.lam, dist=d, warmup_jobs=args.warmup, batches=args.batches)
    res = replicate(cfg, args.replications)
    out = {"policy": args.policy, "alpha": args.alpha, "r": args.r, "lambda": args.lam,
           "s": args.s, "seed": args.seed, **res.as_dict()}
    if args.compare_analytic:
        evaluate = evaluate_sita if args.policy == "sita" else evaluate_tags
        analytic = evaluate(d, args.lam, args.s).total_wait
        out["analytic_wait"] = analytic
        out["discrepancy_halfwidths"] = (abs(res.mean_wait - analytic) / res.ci_halfwidth
                                         if res.ci_halfwidth > 0 else math.inf)
    print(json.dumps(out, indent=2))
    if args.csv:
        path = resolve_output(args.csv)
        new = not path.exists()
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if new:
                writer.writerow(list(out))
            writer.writerow([fmt(v) for v in out.values()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sizeroute", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def point(p, with_s=True):
        p.add_argument("--policy", choices=["sita", "tags"], required=True)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--r", type=float, required=True)
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        if with_s:
            p.add_argument("--s", type=float, required=True)

    p = sub.add_parser("eval", help="evaluate a policy at one threshold")
    point(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("optimize", help="optimal threshold of a policy")
    point(p, with_s=False)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="TAGS/SITA ratio over an r grid, written as CSV")
    p.add_argument("--config", help="JSON file with SweepSpec fields; flags override it")
    p.add_argument("--alpha", nargs="+", type=float)
    p.add_argument("--lambda", dest="lam", nargs="+", type=float)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--r-points", type=int)
    p.add_argument("--spacing", choices=["log", "linear"])
    p.add_argument("--mode", choices=["analytic", "simulate", "both"])
    p.add_argument("--jobs", type=int, help="jobs per simulated point")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o")
    p.add_argument("--plot-script", help="also write a gnuplot script here")
    p.add_argument("--sita-at-tags-threshold", action="store_true",
                   help="evaluate SITA at the TAGS-optimal threshold instead of its own optimum")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-bounds", help="check the alpha=1 TAGS/SITA bounds on a grid")
    p.add_argument("--r", nargs="*", type=float, default=[])
    p.add_argument("--lambda", dest="lam", nargs="*", type=float, default=[])
    p.add_argument("--lambda-r", dest="lam_r", nargs="*", type=float, default=[],
                   help="products lambda*r; lambda is derived per r")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("simulate", help="simulate one policy at one threshold")
    point(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1_000_000)
    p.add_argument("--warmup", type=int, default=None)
    p.add_argument("--batches", type=int, default=32)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--compare-analytic", action="store_true")
    p.add_argument("--csv", help="append the result as a CSV row")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ConfigError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
