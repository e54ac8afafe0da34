"""Command-line harness: generate, certify, bound, simulate, threshold, oracle.

Exit codes: 0 success, 1 a mathematical claim the run was supposed to verify
failed, 2 usage or domain error.  The PERCOBOUND_THREADS environment
variable sets Monte Carlo parallelism (0 or unset picks the CPU count);
results are byte-identical for any thread count because sampling is
counter-based and aggregation runs in trial order.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import __version__
from .graph_core import (
    GENERATOR_FAMILIES,
    WeightedGraph,
    certify_ndl,
    generate,
    graph_to_dict,
    read_graph,
)
from .oracle import STATISTIC_KINDS, exact_distribution
from .percolation import SurvivalProfile, expected_augmented_laplacian, run_trial
from .theory import (
    THRESHOLD_MODES,
    BoundReport,
    deviation_bound,
    optimize_alpha,
    survival_threshold,
)

__all__ = ["ExperimentConfig", "ExperimentSummary", "main", "run_experiment"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2

# slack absorbing floating error in the per-trial lower bound assertion
LOWER_BOUND_SLACK = 1e-8
TRIALS_CSV_CAP = 10**6


def resolve_threads() -> int:
    """Worker count from PERCOBOUND_THREADS (0 or unset means CPU count)."""
    raw = os.environ.get("PERCOBOUND_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"PERCOBOUND_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ValueError(f"PERCOBOUND_THREADS must be non-negative, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved inputs of one simulate/bound run, echoed into every report."""

    graph_source: dict
    profile: dict
    alpha: object  # float or the string "auto"
    epsilon: float
    trials: int
    seed: int
    alpha_grid_size: int = 256

    def to_dict(self) -> dict:
        return {
            "graph_source": self.graph_source,
            "profile": self.profile,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "seed": self.seed,
            "alpha_grid_size": self.alpha_grid_size,
        }


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregate of a Monte Carlo run plus the closed-form bound it checks."""

    n_trials: int
    connected_fraction: float
    connected_fraction_se: float
    mean_deviation_norm: float
    max_deviation_norm: float
    empirical_tail_at_bound: float
    tail_tolerance: float
    tail_within_tolerance: bool
    lower_bound_violations: int
    bound_report: BoundReport

    def to_dict(self) -> dict:
        out = {
            "n_trials": self.n_trials,
            "connected_fraction": self.connected_fraction,
            "connected_fraction_se": self.connected_fraction_se,
            "mean_deviation_norm": self.mean_deviation_norm,
            "max_deviation_norm": self.max_deviation_norm,
            "empirical_tail_at_bound": self.empirical_tail_at_bound,
            "tail_tolerance": self.tail_tolerance,
            "tail_within_tolerance": self.tail_within_tolerance,
            "lower_bound_violations": self.lower_bound_violations,
            "bound_report": self.bound_report.to_dict(),
        }
        return out


def run_experiment(g: WeightedGraph, profile: SurvivalProfile, alpha_spec,
                   epsilon: float, trials: int, seed: int, threads: int = 1,
                   alpha_grid_size: int = 256):
    """Run the Monte Carlo experiment and check the closed-form claims.

    alpha_spec is a float or "auto" (grid-optimized).  Returns
    (ExperimentSummary, records); records are in trial order regardless of
    thread count, so every aggregate is reproducible byte for byte.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if alpha_spec == "auto":
        alpha, report = optimize_alpha(g, profile, epsilon, alpha_grid_size)
    else:
        alpha = float(alpha_spec)
        report = deviation_bound(g, profile, alpha, epsilon)
    expected = expected_augmented_laplacian(g, profile, alpha)

    def worker(trial_index: int):
        return run_trial(g, profile, alpha, seed, trial_index, _expected=expected)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(worker, range(trials), chunksize=64))
    else:
        records = [worker(t) for t in range(trials)]

    connected = sum(1 for r in records if r.is_connected)
    fraction = connected / trials
    se = math.sqrt(fraction * (1.0 - fraction) / trials)
    devs = [r.deviation_norm for r in records]
    mean_dev = math.fsum(devs) / trials
    max_dev = max(devs)
    tail_hits = sum(1 for r in records if r.deviation_norm > report.total)
    empirical_tail = tail_hits / trials
    tolerance = epsilon + 3.0 * math.sqrt(epsilon * (1.0 - epsilon) / trials)

    violations = 0
    for r in records:
        lower = min(report.lambda2_expected - r.deviation_norm, alpha)
        if r.a_delta < lower - LOWER_BOUND_SLACK:
            violations += 1

    summary = ExperimentSummary(
        n_trials=trials,
        connected_fraction=fraction,
        connected_fraction_se=se,
        mean_deviation_norm=mean_dev,
        max_deviation_norm=max_dev,
        empirical_tail_at_bound=empirical_tail,
        tail_tolerance=tolerance,
        tail_within_tolerance=empirical_tail <= tolerance,
        lower_bound_violations=violations,
        bound_report=report,
    )
    return summary, records


def _flatten(payload, prefix="", rows=None):
    if rows is None:
        rows = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            _flatten(value, f"{prefix}{key}." if isinstance(value, dict) else f"{prefix}{key}", rows)
    else:
        rows.append((prefix, json.dumps(payload)))
    return rows


def _emit(payload: dict, fmt: str, output) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["key,value"]
        lines += [f"{key},{value}" for key, value in _flatten(payload)]
        text = "\n".join(lines) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_graph(args) -> tuple[WeightedGraph, dict]:
    if args.graph is not None:
        return read_graph(args.graph), {"file": str(args.graph)}
    params = {}
    for name in ("n", "k", "q", "d"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    g = generate(args.family, seed=args.seed, **params)
    return g, {"family": args.family, **params, "seed": args.seed}


def _load_profile(args, n: int) -> tuple[SurvivalProfile, dict]:
    if args.p is not None:
        return SurvivalProfile.uniform(n, args.p), {"uniform_p": args.p}
    with open(args.profile, "r", encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, list):
        raise ValueError("profile file must hold a JSON array of probabilities")
    profile = SurvivalProfile(values)
    if len(profile) != n:
        raise ValueError(
            f"profile file has {len(profile)} entries but the graph has {n} vertices"
        )
    return profile, {"file": str(args.profile)}


def _parse_alpha(raw: str):
    if raw == "auto":
        return "auto"
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f'--alpha must be "auto" or a number, got {raw!r}') from exc
    if value < 0:
        raise ValueError("--alpha must be non-negative")
    return value


def cmd_generate(args) -> int:
    g, source = _load_graph(args)
    payload = graph_to_dict(g)
    _emit(payload, args.format or "json", args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    g, source = _load_graph(args)
    cert = certify_ndl(g)
    payload = {
        "version": __version__,
        "config": {"graph_source": source},
        **cert.to_dict(),
    }
    _emit(payload, args.format or "json", args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    g, source = _load_graph(args)
    profile, profile_desc = _load_profile(args, g.n)
    alpha_spec = _parse_alpha(args.alpha)
    if alpha_spec == "auto":
        alpha, report = optimize_alpha(g, profile, args.epsilon, args.alpha_grid)
    else:
        report = deviation_bound(g, profile, alpha_spec, args.epsilon)
    config = ExperimentConfig(
        graph_source=source,
        profile=profile_desc,
        alpha=alpha_spec,
        epsilon=args.epsilon,
        trials=0,
        seed=args.seed,
        alpha_grid_size=args.alpha_grid,
    )
    payload = {
        "version": __version__,
        "config": config.to_dict(),
        **report.to_dict(),
    }
    _emit(payload, args.format or "json", args.output)
    return EXIT_OK


def _write_trials_csv(path, records) -> None:
    truncated = len(records) > TRIALS_CSV_CAP
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("trial_index,survivor_count,is_connected,a_delta,deviation_norm,lambda2_augmented\n")
        for r in records[:TRIALS_CSV_CAP]:
            a_delta = "inf" if math.isinf(r.a_delta) else repr(r.a_delta)
            fh.write(
                f"{r.sample.trial_index},{r.survivor_count},{int(r.is_connected)},"
                f"{a_delta},{r.deviation_norm!r},{r.lambda2_augmented!r}\n"
            )
    if truncated:
        sys.stderr.write(
            f"note: per-trial CSV truncated to the first {TRIALS_CSV_CAP} rows\n"
        )


def cmd_simulate(args) -> int:
    g, source = _load_graph(args)
    profile, profile_desc = _load_profile(args, g.n)
    alpha_spec = _parse_alpha(args.alpha)
    threads = resolve_threads()
    config = ExperimentConfig(
        graph_source=source,
        profile=profile_desc,
        alpha=alpha_spec,
        epsilon=args.epsilon,
        trials=args.trials,
        seed=args.seed,
        alpha_grid_size=args.alpha_grid,
    )
    summary, records = run_experiment(
        g, profile, alpha_spec, args.epsilon, args.trials, args.seed,
        threads=threads, alpha_grid_size=args.alpha_grid,
    )
    if args.trials_csv is not None:
        _write_trials_csv(args.trials_csv, records)
    payload = {
        "version": __version__,
        "config": config.to_dict(),
        **summary.to_dict(),
    }
    _emit(payload, args.format or "json", args.output)
    if summary.lower_bound_violations > 0 or not summary.tail_within_tolerance:
        sys.stderr.write(
            f"validation failed: {summary.lower_bound_violations} lower-bound "
            f"violations, empirical tail {summary.empirical_tail_at_bound} vs "
            f"tolerance {summary.tail_tolerance}\n"
        )
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_threshold(args) -> int:
    report = survival_threshold(args.n, args.d, args.lam, args.epsilon, args.mode)
    payload = {
        "version": __version__,
        "config": {
            "n": args.n,
            "d": args.d,
            "lambda": args.lam,
            "epsilon": args.epsilon,
            "mode": args.mode,
        },
        **report.to_dict(),
    }
    _emit(payload, args.format or "json", args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g, source = _load_graph(args)
    profile, profile_desc = _load_profile(args, g.n)
    dist = exact_distribution(g, profile, args.alpha, args.kind)
    fmt = args.format or "csv"
    if fmt == "csv":
        if args.output is None:
            dist.write_csv(sys.stdout)
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                dist.write_csv(fh)
    else:
        entries = [
            [
                dist.pattern_bits(t),
                float(dist.probabilities[t]),
                "inf" if math.isinf(dist.statistics[t]) else float(dist.statistics[t]),
            ]
            for t in range(len(dist))
        ]
        payload = {
            "version": __version__,
            "config": {
                "graph_source": source,
                "profile": profile_desc,
                "alpha": args.alpha,
                "statistic_kind": args.kind,
            },
            "n": dist.n,
            "entries": entries,
        }
        _emit(payload, "json", args.output)

    if args.kind == "connectivity_indicator":
        p_connected = math.fsum(
            float(dist.probabilities[t])
            for t in range(len(dist))
            if dist.statistics[t] == 1.0
        )
        sys.stderr.write(f"P(connected) = {p_connected!r}\n")
    else:
        finite = [
            (float(dist.probabilities[t]), float(dist.statistics[t]))
            for t in range(len(dist))
            if not math.isinf(dist.statistics[t])
        ]
        mean_stat = math.fsum(pr * st for pr, st in finite)
        inf_mass = 1.0 - math.fsum(pr for pr, _ in finite)
        sys.stderr.write(
            f"mean {args.kind} (finite part) = {mean_stat!r}, "
            f"P(statistic = inf) = {max(0.0, inf_mass)!r}\n"
        )
    return EXIT_OK


def _add_graph_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", default=None, help="graph JSON file")
    parser.add_argument("--family", default=None, choices=GENERATOR_FAMILIES,
                        help="generate the graph instead of reading a file")
    parser.add_argument("--n", type=int, default=None, help="vertex count (family parameter)")
    parser.add_argument("--k", type=int, default=None, help="hypercube dimension")
    parser.add_argument("--q", type=int, default=None, help="paley field size")
    parser.add_argument("--d", type=int, default=None, help="regular degree")


def _add_profile(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, default=None, help="uniform survival probability")
    parser.add_argument("--profile", default=None,
                        help="JSON file with one survival probability per vertex")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--output", default=None, help="write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None,
                        help="output format (default json; oracle defaults to csv)")

    parser = argparse.ArgumentParser(
        prog="percobound",
        description="Spectral lower bounds on algebraic connectivity under random vertex deletion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", parents=[common], help="emit a named graph as JSON")
    p_gen.add_argument("--family", required=True, choices=GENERATOR_FAMILIES)
    p_gen.add_argument("--n", type=int, default=None)
    p_gen.add_argument("--k", type=int, default=None)
    p_gen.add_argument("--q", type=int, default=None)
    p_gen.add_argument("--d", type=int, default=None)
    p_gen.set_defaults(func=cmd_generate, graph=None)

    p_cert = sub.add_parser("certify", parents=[common],
                            help="certify regularity and the nontrivial spectral radius")
    _add_graph_source(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_bound = sub.add_parser("bound", parents=[common],
                             help="closed-form deviation bound and connectivity lower bound")
    _add_graph_source(p_bound)
    _add_profile(p_bound)
    p_bound.add_argument("--alpha", default="auto",
                         help='ghost diagonal weight, or "auto" to grid-optimize')
    p_bound.add_argument("--alpha-grid", type=int, default=256, help="alpha grid size")
    p_bound.add_argument("--epsilon", type=float, required=True, help="failure probability")
    p_bound.set_defaults(func=cmd_bound)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="Monte Carlo percolation run with per-trial validation")
    _add_graph_source(p_sim)
    _add_profile(p_sim)
    p_sim.add_argument("--alpha", default="auto")
    p_sim.add_argument("--alpha-grid", type=int, default=256)
    p_sim.add_argument("--epsilon", type=float, required=True)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--trials-csv", default=None, help="also write one CSV row per trial")
    p_sim.set_defaults(func=cmd_simulate)

    p_thr = sub.add_parser("threshold", parents=[common],
                           help="survival threshold certifying connectivity")
    p_thr.add_argument("--n", type=int, required=True)
    p_thr.add_argument("--d", type=int, required=True)
    p_thr.add_argument("--lambda", dest="lam", type=float, required=True)
    p_thr.add_argument("--epsilon", type=float, required=True)
    p_thr.add_argument("--mode", choices=THRESHOLD_MODES, default="closed_form")
    p_thr.set_defaults(func=cmd_threshold)

    p_orc = sub.add_parser("oracle", parents=[common],
                           help="exhaustive enumeration of all survival patterns")
    _add_graph_source(p_orc)
    _add_profile(p_orc)
    p_orc.add_argument("--alpha", type=float, default=0.0,
                       help="ghost diagonal weight (used by deviation_norm)")
    p_orc.add_argument("--kind", required=True, choices=STATISTIC_KINDS)
    p_orc.set_defaults(func=cmd_oracle)

    return parser


def _validate_source_args(parser, args) -> None:
    if args.command in ("certify", "bound", "simulate", "oracle"):
        if args.graph is None and args.family is None:
            parser.error("provide --graph FILE or --family NAME")
        if args.graph is not None and args.family is not None:
            parser.error("--graph and --family are mutually exclusive")
    if args.command in ("bound", "simulate", "oracle"):
        if (args.p is None) == (args.profile is None):
            parser.error("provide exactly one of --p or --profile")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_source_args(parser, args)
    try:
        return args.func(args)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except RuntimeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
