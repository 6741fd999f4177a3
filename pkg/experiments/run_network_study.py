#!/usr/bin/env python3
"""
Production network study runner.

Subcommands:
    validate        check a scenario file and print its validation report
    path            simulate one path and write path.csv / events.csv
    ensemble        run a Monte Carlo ensemble, optionally as a β-sweep
    check           re-verify invariants on files written by path/ensemble
    thinning-test   KS check of first jump times at several bound inflations

Exit codes: 0 ok, 1 model error or failed check, 2 usage or input error.
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from src.data import RunManifest, bundled_scenario_path, load_scenario
from src.evaluators import (
    DistributionTestRunner,
    EnsembleConfig,
    EnsembleStats,
    ReferenceEvaluator,
    run_ensemble,
    stationary_capacity,
)
from src.exceptions import InvalidScenarioError, ModelError, NetworkSimError, ScenarioFormatError
from src.network import Scenario, queue_bounds, density_flux_bounds, validate_scenario
from src.pdmp import PathRecord, first_jump_times, pathwise_bound_violations, simulate_path
from src.rates import LINEAR_LOAD_DEPENDENT, build_rate_model
from src.solver import Grid, NetworkState

logger = logging.getLogger("network_study")

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_USAGE = 2

FLOAT_FORMAT = "%.17g"
PATH_COLUMNS = ("regime", "capacity", "queue", "content", "ur", "rwip",
                "exit_flux", "g_in", "g_out", "peak_load")
MASS_TOLERANCE = 1e-8
BOUND_TOLERANCE = 1e-9


def _write_csv(df: pd.DataFrame, path: Path, manifest: RunManifest, root: Path) -> None:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    manifest.add_file(path, root)


def path_frame(path: PathRecord) -> pd.DataFrame:
    """Grid samples of one path: t, per-edge columns, then network measures."""
    columns: Dict[str, Any] = {"t": path.times}
    for name in PATH_COLUMNS:
        values = getattr(path, name if name != "regime" else "regimes")
        for e, edge_id in enumerate(path.edge_ids):
            columns[f"{name}_{edge_id}"] = values[:, e]
    columns["q_net"] = path.q_net
    columns["g_net_in"] = path.g_net_in
    columns["g_net_out"] = path.g_net_out
    return pd.DataFrame(columns)


def events_frame(path: PathRecord) -> pd.DataFrame:
    return pd.DataFrame(
        [(ev.time, ev.edge_id, ev.from_regime, ev.to_regime) for ev in path.events],
        columns=["time", "edge", "from", "to"],
    )


def moments_frame(stats: EnsembleStats, measure: str) -> pd.DataFrame:
    mean, std = stats.mean(measure), stats.std(measure)
    columns: Dict[str, Any] = {"t": stats.times}
    for e, edge_id in enumerate(stats.edge_ids):
        columns[f"mean_{edge_id}"] = mean[:, e]
        columns[f"std_{edge_id}"] = std[:, e]
    return pd.DataFrame(columns)


def histogram_frame(stats: EnsembleStats, measure: str) -> pd.DataFrame:
    edges, counts = stats.histogram(measure)
    return pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts})


class NetworkStudy:
    """
    Runs simulations of one scenario file and writes their artifacts.

    Every run writes a manifest.json listing the files it produced. If a
    run aborts, the files it already wrote are removed.
    """

    def __init__(self, output_dir: str = "results", workers: int = 1, progress: bool = True):
        self.output_dir = Path(output_dir)
        self.workers = workers
        self.progress = progress
        self.evaluator = ReferenceEvaluator()
        self.tests = DistributionTestRunner()

    def _prepare(self, scenario_file: str) -> Scenario:
        scenario = load_scenario(scenario_file)
        report = validate_scenario(scenario)
        if not report.ok:
            raise InvalidScenarioError(report)
        return scenario

    def _cleanup(self, manifest: RunManifest, created: List[Path]) -> None:
        for name in manifest.files:
            target = self.output_dir / name
            if target.exists():
                target.unlink()
        for directory in reversed(created):
            if directory.exists() and not any(directory.iterdir()):
                directory.rmdir()

    def _make_dir(self, directory: Path, created: List[Path]) -> None:
        if not directory.exists():
            directory.mkdir(parents=True)
            created.append(directory)

    def simulate_one(self, scenario_file: str, seed: int, index: int) -> RunManifest:
        """Simulate path `index` of stream `seed` and write its files."""
        scenario = self._prepare(scenario_file)
        manifest = RunManifest.for_scenario(
            "path", scenario_file, seed=seed, samples=1, path_index=index,
            betas=list(set(scenario.rates.beta)) if scenario.rates.beta else []
        )
        created: List[Path] = []
        try:
            self._make_dir(self.output_dir, created)
            model = build_rate_model(scenario.rates, scenario)
            path = simulate_path(scenario, model, seed, path_index=index)

            _write_csv(path_frame(path), self.output_dir / "path.csv", manifest, self.output_dir)
            _write_csv(events_frame(path), self.output_dir / "events.csv", manifest, self.output_dir)

            violations = pathwise_bound_violations(path, scenario)
            manifest.summary = {
                "jumps": len(path.events),
                "candidates": path.candidates,
                "q_net_T": float(path.q_net[-1]),
                "g_net_out_T": float(path.g_net_out[-1]),
                "bound_violations": len(violations),
            }
            manifest.finish()
            manifest.write(self.output_dir)
        except BaseException:
            self._cleanup(manifest, created)
            raise

        print(f"🛤️  Path {index} (seed {seed}) of {scenario.name}")
        print(f"   Jumps: {len(path.events)} from {path.candidates} candidates")
        print(f"   q_net(T) = {path.q_net[-1]:.6g}, g_net_out(T) = {path.g_net_out[-1]:.6g}")
        if violations:
            print(f"   ⚠️  {len(violations)} pathwise bound violation(s)")
        print(f"📁 Files written to: {self.output_dir}")
        return manifest

    def run_sweep(
        self,
        scenario_file: str,
        samples: int,
        seed: int,
        betas: Optional[Sequence[float]] = None,
        retain: int = 0,
        compare_reference: bool = False
    ) -> RunManifest:
        """
        Run one ensemble per β (or one ensemble with the file's own rates).

        Each β gets a beta_<value>/ directory with mean and histogram files;
        network_means.csv collects terminal means across the sweep.
        """
        scenario = self._prepare(scenario_file)
        if betas and scenario.rates.variant != LINEAR_LOAD_DEPENDENT:
            raise ValueError("a β-sweep needs the linear_load_dependent rate model")
        points = [(float(b), scenario.rates.with_beta(b)) for b in betas] if betas else \
            [(float(scenario.rates.beta[0]) if scenario.rates.beta else float("nan"), scenario.rates)]
        for _, spec in points:
            report = validate_scenario(replace(scenario, rates=spec))
            if not report.ok:
                raise InvalidScenarioError(report)

        manifest = RunManifest.for_scenario(
            "ensemble", scenario_file, seed=seed, samples=samples, betas=[b for b, _ in points]
        )
        cfg = EnsembleConfig(samples=samples, seed=seed, workers=self.workers,
                             retain_paths=retain, progress=self.progress)
        created: List[Path] = []
        rows = []
        terminal: Dict[float, List[float]] = {}
        reports = []

        print(f"🔬 Ensemble study of {scenario.name}")
        print("=" * 60)
        print(f"   Paths per point: {samples}")
        print(f"   Seed: {seed}, workers: {self.workers}")
        print(f"   β values: {', '.join(f'{b:g}' for b, _ in points)}")
        print()
        try:
            self._make_dir(self.output_dir, created)
            for beta, spec in points:
                label = f"beta_{beta:g}" if not np.isnan(beta) else "base"
                point_dir = self.output_dir / label
                self._make_dir(point_dir, created)
                print(f"⚙️  Running {label}...")
                result = run_ensemble(scenario, spec, cfg)
                stats = result.stats

                _write_csv(moments_frame(stats, "capacity"), point_dir / "mean_capacity.csv", manifest, self.output_dir)
                _write_csv(moments_frame(stats, "queue"), point_dir / "mean_queue.csv", manifest, self.output_dir)
                _write_csv(histogram_frame(stats, "q_net"), point_dir / "hist_qnet.csv", manifest, self.output_dir)
                _write_csv(histogram_frame(stats, "g_net_out"), point_dir / "hist_gout.csv", manifest, self.output_dir)
                for k, path in enumerate(result.paths):
                    _write_csv(path_frame(path), point_dir / f"path_{k}.csv", manifest, self.output_dir)
                    _write_csv(events_frame(path), point_dir / f"events_{k}.csv", manifest, self.output_dir)

                q_values = stats.terminal_values("q_net")
                g_values = stats.terminal_values("g_net_out")
                terminal[beta] = list(q_values)
                rows.append({
                    "beta": beta,
                    "samples": stats.count,
                    "q_net_mean": float(q_values.mean()),
                    "q_net_std": float(q_values.std(ddof=1)) if q_values.size > 1 else float("nan"),
                    "g_net_out_mean": float(g_values.mean()),
                    "g_net_out_std": float(g_values.std(ddof=1)) if g_values.size > 1 else float("nan"),
                    "elapsed_s": result.elapsed,
                    "bound_violations": result.bound_violations,
                })
                reports.append(self._capacity_report(stats, beta, compare_reference))

            _write_csv(pd.DataFrame(rows), self.output_dir / "network_means.csv", manifest, self.output_dir)
            manifest.summary = {"points": rows, "stationary_capacity": reports}
            if len(rows) > 1:
                manifest.summary.update(self._sweep_summary(rows, terminal))
            manifest.finish()
            manifest.write(self.output_dir)
        except BaseException:
            self._cleanup(manifest, created)
            raise

        print("\n✅ Ensemble study completed!")
        for row, report in zip(rows, reports):
            print(f"   β={row['beta']:g}: E[q_net(T)] = {row['q_net_mean']:.6g}, "
                  f"E[g_net_out(T)] = {row['g_net_out_mean']:.6g}, "
                  f"capacity (first/last) = {report['first']:.4f}/{report['last']:.4f}"
                  + (f"  reference {'✓' if report['reference']['passed'] else '✗'}"
                     if 'reference' in report and 'passed' in report['reference'] else ""))
        print(f"📁 Files written to: {self.output_dir}")
        return manifest

    def _capacity_report(self, stats: EnsembleStats, beta: float, compare_reference: bool) -> Dict[str, Any]:
        t_from, t_to = self.evaluator.benchmark.window
        mean = stats.mean("capacity")
        last = len(stats.edge_ids) - 1
        report: Dict[str, Any] = {
            "beta": beta,
            "first": stationary_capacity(mean, stats.times, 0, t_from, t_to),
            "last": stationary_capacity(mean, stats.times, last, t_from, t_to),
        }
        if compare_reference:
            report["reference"] = self.evaluator.evaluate_capacity(stats, beta, edge=0)
        return report

    def _sweep_summary(self, rows: List[Dict[str, Any]], terminal: Dict[float, List[float]]) -> Dict[str, Any]:
        means = {row["beta"]: {"q_net": row["q_net_mean"], "g_net_out": row["g_net_out_mean"]} for row in rows}
        trends = self.evaluator.evaluate_trends(means)
        betas = sorted(terminal)
        summary = {"trends": trends, "comparisons": self.tests.compare_sweep(terminal)}
        if len(terminal[betas[0]]) > 1 and len(terminal[betas[-1]]) > 1:
            summary["variance_ratio"] = self.tests.variance_ratio(terminal[betas[-1]], terminal[betas[0]])
        print("\n📈 Sweep trends:")
        print(f"   q_net(T) strictly increasing in β: {trends['q_net_increasing']}")
        print(f"   g_net_out(T) strictly decreasing in β: {trends['g_net_out_decreasing']}")
        return summary

    def check(self, run_dir: str) -> List[str]:
        """
        Re-verify invariants on emitted files.

        Returns:
            Problem descriptions; empty when everything holds
        """
        root = Path(run_dir)
        manifest = RunManifest.load(root)
        problems = [f"listed file missing: {name}" for name in manifest.files if not (root / name).exists()]
        scenario = None
        if Path(manifest.scenario_file).exists():
            scenario = load_scenario(manifest.scenario_file)

        for name in manifest.files:
            file = root / name
            if not file.exists():
                continue
            base = file.name
            if base == "path.csv" or (base.startswith("path_") and base.endswith(".csv")):
                problems.extend(f"{name}: {p}" for p in check_path_frame(pd.read_csv(file), scenario))
            elif base.startswith("hist_"):
                total = int(pd.read_csv(file)["count"].sum())
                if total != manifest.samples:
                    problems.append(f"{name}: histogram counts sum to {total}, expected {manifest.samples}")
            elif base == "mean_queue.csv":
                df = pd.read_csv(file)
                if (df.filter(like="mean_") < -BOUND_TOLERANCE).any().any():
                    problems.append(f"{name}: negative mean queue")
            elif base == "network_means.csv":
                df = pd.read_csv(file)
                if "bound_violations" in df and (df["bound_violations"] > 0).any():
                    problems.append(f"{name}: {int(df['bound_violations'].sum())} pathwise bound violation(s)")
        return problems

    def thinning_test(self, samples: int, seed: int, inflations: Sequence[float]) -> List[Dict[str, Any]]:
        """KS distance of first jump times from 1 − e^{−λt} per bound inflation."""
        scenario = load_scenario(bundled_scenario_path("single_processor"))
        print(f"🎲 Thinning test: {samples} first jumps per bound inflation")
        results = []
        for factor in inflations:
            spec = replace(scenario.rates, bound_inflation=float(factor))
            model = build_rate_model(spec, scenario)
            bound = model.bounds()
            jump_times = first_jump_times(scenario, model, samples, seed, bound=bound)
            start = NetworkState.initial(scenario, Grid.from_scenario(scenario))
            rate = float(model.psi(0.0, start, scenario.initial.regimes))
            outcome = self.tests.ks_exponential(jump_times, rate)
            outcome.update(inflation=float(factor), bound=bound.total, rate=rate)
            results.append(outcome)
            status = "✓" if outcome["passed"] else "✗"
            print(f"   {status} λ̄={bound.total:g}: KS distance {outcome['statistic']:.5f} "
                  f"(critical {outcome['critical_value']:.5f})")
        return results


def check_path_frame(df: pd.DataFrame, scenario: Optional[Scenario] = None) -> List[str]:
    """Invariants of one path.csv: ordering, monotone integrals, mass balance, a.s. bounds."""
    problems = []
    t = df["t"].to_numpy()
    if np.any(np.diff(t) <= 0):
        problems.append("times are not strictly increasing")
    for column in ("q_net", "g_net_out", "g_net_in"):
        if np.any(np.diff(df[column].to_numpy()) < -BOUND_TOLERANCE):
            problems.append(f"{column} decreases")
    queues = df.filter(regex=r"^queue_").to_numpy()
    contents = df.filter(regex=r"^content_").to_numpy()
    if np.any(queues < 0):
        problems.append("negative queue")
    mass = queues.sum(axis=1) + contents.sum(axis=1)
    supplied = mass[0] + df["g_net_in"].to_numpy()[-1]
    closing = mass[-1] + df["g_net_out"].to_numpy()[-1]
    if abs(closing - supplied) > MASS_TOLERANCE * max(1.0, abs(supplied)):
        problems.append(f"mass balance off at t=T: {closing:.17g} vs {supplied:.17g}")
    if scenario is not None:
        ids = scenario.topology.edge_ids
        q_max = queue_bounds(scenario)
        load_max = density_flux_bounds(scenario)
        injected = scenario.total_inflow(float(t[-1]))
        recorded = float(df["g_net_in"].to_numpy()[-1])
        if abs(recorded - injected) > MASS_TOLERANCE * max(1.0, abs(injected)):
            problems.append(f"g_net_in at t=T is {recorded:.17g}, inflow integral is {injected:.17g}")
        for e, edge_id in enumerate(ids):
            if f"queue_{edge_id}" not in df:
                continue
            if (df[f"queue_{edge_id}"] > q_max[e] * (1 + BOUND_TOLERANCE) + BOUND_TOLERANCE).any():
                problems.append(f"queue of edge {edge_id} exceeds {q_max[e]:.6g}")
            if f"peak_load_{edge_id}" in df and \
                    (df[f"peak_load_{edge_id}"] > load_max[e] * (1 + BOUND_TOLERANCE) + BOUND_TOLERANCE).any():
                problems.append(f"v·ρ on edge {edge_id} exceeds {load_max[e]:.6g}")
    return problems


def _default_workers() -> int:
    try:
        return max(1, int(os.getenv("PNSIM_WORKERS", "1")))
    except ValueError:
        return 1


def _parse_floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Simulate production networks with load-dependent failures')
    parser.add_argument('--log-level', type=str, default=os.getenv("PNSIM_LOG_LEVEL", "WARNING"),
                        help='Logging level (default from PNSIM_LOG_LEVEL)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='Validate a scenario file')
    p.add_argument('scenario', type=str)

    p = sub.add_parser('path', help='Simulate one sample path')
    p.add_argument('scenario', type=str)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--index', type=int, default=0, help='Path index within the seed stream')
    p.add_argument('--out', type=str, default='results/path')

    p = sub.add_parser('ensemble', help='Run a Monte Carlo ensemble')
    p.add_argument('scenario', type=str)
    p.add_argument('--samples', type=int, default=10_000)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--beta-sweep', type=_parse_floats, default=None,
                   help='Comma-separated β values, e.g. 0,0.25,0.5,0.75,1')
    p.add_argument('--workers', type=int, default=None, help='Worker processes (default PNSIM_WORKERS or 1)')
    p.add_argument('--retain', type=int, default=0, help='Write the first K paths of each ensemble')
    p.add_argument('--compare-reference', action='store_true',
                   help='Compare processor 1 stationary capacity with the reference values')
    p.add_argument('--no-progress', action='store_true')
    p.add_argument('--out', type=str, default='results/ensemble')

    p = sub.add_parser('check', help='Re-verify invariants on emitted files')
    p.add_argument('run_dir', type=str)

    p = sub.add_parser('thinning-test', help='KS test of thinning at several dominating rates')
    p.add_argument('--samples', type=int, default=10_000)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--inflations', type=_parse_floats, default=[1.0, 2.0, 5.0])
    return parser


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    report = validate_scenario(scenario)
    print(f"🔎 Validation report for {scenario.name}")
    print(f"   CFL dt max: {report.cfl_dt_max:.6g}, dt: {report.dt:.6g}")
    for message in report.violations:
        print(f"   ❌ {message}")
    for message in report.warnings:
        print(f"   ⚠️  {message}")
    if report.ok:
        print("   ✅ No violations")
        return EXIT_OK
    return EXIT_MODEL


def cmd_path(args) -> int:
    NetworkStudy(output_dir=args.out).simulate_one(args.scenario, args.seed, args.index)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    if args.samples < 1:
        print("❌ --samples must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    workers = args.workers or _default_workers()
    study = NetworkStudy(output_dir=args.out, workers=workers, progress=not args.no_progress)
    try:
        study.run_sweep(args.scenario, args.samples, args.seed, args.beta_sweep,
                        retain=args.retain, compare_reference=args.compare_reference)
    except NetworkSimError:
        raise
    except ValueError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        problems = NetworkStudy(output_dir=args.run_dir).check(args.run_dir)
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"❌ cannot read run directory {args.run_dir}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if problems:
        print(f"❌ {len(problems)} problem(s):")
        for problem in problems:
            print(f"   {problem}")
        return EXIT_MODEL
    print(f"✅ All invariants hold in {args.run_dir}")
    return EXIT_OK


def cmd_thinning_test(args) -> int:
    results = NetworkStudy().thinning_test(args.samples, args.seed, args.inflations)
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_MODEL


COMMANDS = {
    'validate': cmd_validate,
    'path': cmd_path,
    'ensemble': cmd_ensemble,
    'check': cmd_check,
    'thinning-test': cmd_thinning_test,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ScenarioFormatError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"\n❌ Simulation failed: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NetworkSimError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
