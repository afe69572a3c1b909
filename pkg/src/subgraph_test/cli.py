"""Command-line front end.

    subgraph-test test  <graph.txt>   --alpha 0.05 --plan full|node:M|triple:B --seed S
    subgraph-test gen   <spec.json>   --seed S -o <graph.txt>
    subgraph-test calibrate <cfg.json> -o <report.json> [--workers N]
    subgraph-test power     <cfg.json> -o <table.csv>   [--workers N]

Exit codes: 0 success, 2 usage/parse/config error, 3 degenerate input
(empty or complete sample, or fewer than three nodes).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DegenerateGraph, GraphTooSmall, SubgraphTestError
from .graph import read_edge_list, write_edge_list
from .models import model_from_dict
from .powerlab import ExperimentConfig, default_workers, run_calibration, run_power
from .sampling import SamplingPlan, regime_diagnostics
from .statistics import run_test

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


def _err(msg: str) -> None:
    print(f"subgraph-test: {msg}", file=sys.stderr)


def _progress(msg: str) -> None:
    print(f"  .. {msg}", file=sys.stderr, flush=True)


def cmd_test(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.graph)
    plan = SamplingPlan.parse(args.plan, seed=args.seed)
    result = run_test(graph, args.alpha, plan)
    print(json.dumps(result.to_dict()))
    s = result.stats
    verdict = "REJECT" if result.reject else "do not reject"
    print(
        f"n={graph.n} edges={graph.edge_count} p_hat={s.p_hat:.6g} plan={plan.label}\n"
        f"T^2={s.t_squared:.4f} (z2={s.z2:.3f}, z3={s.z3:.3f}) p-value={s.p_value:.4g} "
        f"critical={result.critical_value:.4f} -> {verdict} Erdos-Renyi at alpha={args.alpha}",
        file=sys.stderr,
    )
    regime = regime_diagnostics(plan, graph.n, s.p_hat)
    print("regime: " + ", ".join(f"{k}={v:.4g}" for k, v in regime.items()), file=sys.stderr)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        spec_dict = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.spec}: invalid JSON: {exc}") from None
    spec = model_from_dict(spec_dict)
    real = spec.generate(np.random.default_rng(args.seed))
    write_edge_list(real.graph, args.output)
    sidecar = {"model": spec.to_dict(), "seed": args.seed, **real.latent}
    side_path = Path(str(args.output) + ".json")
    side_path.write_text(json.dumps(sidecar) + "\n", encoding="utf-8")
    print(f"wrote {args.output} (n={real.graph.n}, edges={real.graph.edge_count}) and {side_path}", file=sys.stderr)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config)
    _progress(f"calibration: {len(config.models)} model(s) x {len(config.plans)} plan(s) x {config.replicates} replicates")
    report = run_calibration(config, workers=args.workers, progress=_progress)
    report.write_json(args.output)
    for e in report.entries:
        t2 = e.stat("t_squared")
        ks = "n/a" if t2.ks is None else f"{t2.ks:.4f}"
        _progress(f"{e.model} {e.plan['variant']}: KS(T^2)={ks} excluded={e.excluded}")
    return EXIT_OK


def cmd_power(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config)
    _progress(f"power: {len(config.models)} model(s) x {len(config.plans)} plan(s) x {config.replicates} replicates")
    table = run_power(config, workers=args.workers, progress=_progress)
    table.write_csv(args.output)
    _progress(f"wrote {len(table.rows)} rows to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgraph-test",
        description="Test whether a network is Erdos-Renyi from its 3-node subgraph frequencies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the chi-squared test on an edge-list file")
    p.add_argument("graph", help="edge-list file: node count, then one 'u v' pair per line")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--plan", default="full", help="full, node:M or triple:B (default: full)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled plans")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("gen", help="sample a graph from a model spec JSON")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    for name, func, what in (
        ("calibrate", cmd_calibrate, "null calibration report (JSON)"),
        ("power", cmd_power, "power table (CSV)"),
    ):
        p = sub.add_parser(name, help=f"run an experiment config and write a {what}")
        p.add_argument("config")
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--workers", type=int, default=None,
                       help="parallel worker processes (default: $SUBGRAPH_TEST_WORKERS or 1)")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if getattr(args, "workers", 1) is None:
            args.workers = default_workers()
        if getattr(args, "workers", 1) < 1:
            raise ConfigError("--workers must be >= 1")
        if hasattr(args, "alpha") and not 0.0 < args.alpha < 1.0:
            raise ConfigError(f"--alpha must lie in (0, 1), got {args.alpha}")
        return args.func(args)
    except (DegenerateGraph, GraphTooSmall) as exc:
        _err(f"degenerate input: {exc}")
        return EXIT_DEGENERATE
    except (SubgraphTestError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror or exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
