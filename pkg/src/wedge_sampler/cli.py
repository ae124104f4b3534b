"""Command-line entry point: generate, analyze, exact, tristats and ksamples."""

import argparse
import sys
from pathlib import Path
from typing import Any

import structlog
from dotenv import load_dotenv
from pydantic import ValidationError

from .config import (
    Config,
    ConfigLoader,
    EngineConfig,
    RunConfig,
    SkgConfig,
    resolve_config_path,
)
from .config.schema import BinConfig
from .errors import WedgeSamplerError
from .estimators import achievable_error, required_samples
from .generator import generate_community, generate_er, generate_skg, write_edge_list
from .graph_io import iter_records
from .oracle import DEFAULT_EDGE_LIMIT, Graph, exact_stats, exact_summaries
from .pipeline import WedgeSamplingPipeline
from .records import WedgeResultV2
from .report import write_summary
from .tri_stats import assortativity_table, extract_triangles, write_assortativity

logger = structlog.get_logger(__name__)

LOG_LEVELS = {"debug": 10, "info": 20, "warning": 30, "error": 40, "critical": 50}

ASSORTATIVITY_FILE = "assortativity.csv"
OUTLIERS_FILE = "outliers.csv"
SINGLE_BIN_OMEGA = 1e7


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # Looked up per logger so a replaced sys.stderr is honoured.
    return structlog.PrintLogger(sys.stderr)


def configure_logging(level: str) -> None:
    """structlog to stderr; stdout carries command results only."""
    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.add_log_level,
            structlog.dev.ConsoleRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            LOG_LEVELS[level.lower()]
        ),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def _probability(value: str) -> float:
    x = float(value)
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"{value} is not in (0, 1)")
    return x


def _add_run_arguments(
    parser: argparse.ArgumentParser, *, binning: bool = True
) -> None:
    parser.add_argument("--input", type=Path, help="Edge list, one edge per line")
    parser.add_argument("--out", type=Path, help="Output directory")
    if binning:
        parser.add_argument("--tau", type=int, help="Number of singleton bins")
        parser.add_argument("--omega", type=float, help="Bin growth rate (> 1)")
    parser.add_argument("--k", type=int, help="Samples per bin")
    parser.add_argument("--seed", type=int, help="Run seed")
    parser.add_argument("--reducers", type=int, help="Reduce partitions per job")
    parser.add_argument("--splits", type=int, help="Input splits per job")
    parser.add_argument("--workers", type=int, help="Mapper and reducer threads")
    parser.add_argument(
        "--keep-intermediates",
        action="store_true",
        default=None,
        help="Keep every phase file under <out>/intermediates",
    )
    parser.add_argument(
        "--validate",
        dest="validate_input",
        action="store_true",
        default=None,
        help="Reject self-edges and duplicate edges",
    )
    parser.add_argument(
        "--exhaustive",
        action="store_true",
        default=None,
        help="Sample every wedge exactly once (exact, for small graphs)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wedge-sampler",
        description="Wedge-sampling estimates of clustering and triangle counts",
    )
    parser.add_argument("--config", type=Path, help="YAML configuration file")
    parser.add_argument("--log-level", type=str.lower, choices=list(LOG_LEVELS))
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Write a synthetic edge list")
    generate.add_argument("--model", choices=["skg", "er", "community"], default="skg")
    generate.add_argument("--out", type=Path, required=True, help="Edge list to write")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--scale", type=int, help="SKG: log2 of the vertex count")
    generate.add_argument(
        "--edge-factor", type=int, help="SKG: candidate edges per vertex"
    )
    generate.add_argument("--noise", type=float, help="SKG: per-level noise amplitude")
    generate.add_argument(
        "--no-permute",
        action="store_true",
        help="SKG: keep Kronecker vertex labels instead of relabelling",
    )
    generate.add_argument("--n", type=int, help="ER: vertices")
    generate.add_argument("--m", type=int, help="ER: edges")
    generate.add_argument("--communities", type=int, default=50)
    generate.add_argument("--min-size", type=int, default=5)
    generate.add_argument("--max-size", type=int, default=60)
    generate.add_argument("--p-in", type=float, default=0.5)
    generate.add_argument("--inter-edges", type=int, default=500)

    analyze = commands.add_parser("analyze", help="Run the sampling pipeline")
    _add_run_arguments(analyze)
    analyze.add_argument("--skip-2b", action="store_true", default=None)
    analyze.add_argument("--skip-3a", action="store_true", default=None)
    analyze.add_argument(
        "--eps", type=_probability, help="Derive k from this error and --delta"
    )
    analyze.add_argument(
        "--delta", type=_probability, help="Per-bin failure probability"
    )

    exact = commands.add_parser("exact", help="Exact statistics in memory")
    exact.add_argument("--input", type=Path, required=True)
    exact.add_argument("--out", type=Path, help="Directory for summary.tsv")
    exact.add_argument("--tau", type=int)
    exact.add_argument("--omega", type=float)
    exact.add_argument("--edge-limit", type=int, default=DEFAULT_EDGE_LIMIT)

    tristats = commands.add_parser(
        "tristats", help="Degree profile of uniformly sampled triangles"
    )
    _add_run_arguments(tristats, binning=False)
    tristats.add_argument(
        "--max-degree",
        type=float,
        default=SINGLE_BIN_OMEGA,
        help="Upper end of the single bin",
    )

    ksamples = commands.add_parser("ksamples", help="Samples per bin for (eps, delta)")
    ksamples.add_argument("--eps", type=_probability, required=True)
    ksamples.add_argument("--delta", type=_probability, required=True)
    return parser


def _overrides(args: argparse.Namespace, names: list[str]) -> dict[str, Any]:
    return {
        name: getattr(args, name)
        for name in names
        if getattr(args, name, None) is not None
    }


RUN_FIELDS = [
    "input",
    "out",
    "tau",
    "omega",
    "k",
    "seed",
    "reducers",
    "splits",
    "skip_2b",
    "skip_3a",
    "keep_intermediates",
    "validate_input",
    "exhaustive",
    "delta",
]


def build_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """File values overlaid with the flags actually given."""
    values = {**config.run.model_dump(), **_overrides(args, RUN_FIELDS)}
    if getattr(args, "eps", None) is not None:
        values["k"] = required_samples(args.eps, values["delta"])
    return RunConfig(**values)


def build_engine_config(args: argparse.Namespace, config: Config) -> EngineConfig:
    values = config.engine.model_dump()
    if getattr(args, "workers", None) is not None:
        values["map_workers"] = values["reduce_workers"] = args.workers
    return EngineConfig(**values)


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    if args.model == "skg":
        values = config.skg.model_dump()
        values.update(_overrides(args, ["scale", "edge_factor", "noise"]))
        if args.no_permute:
            values["permute_vertices"] = False
        edges = generate_skg(
            SkgConfig(**values), args.seed, tmp_dir=config.engine.tmp_dir
        )
    elif args.model == "er":
        if args.n is None or args.m is None:
            raise WedgeSamplerError("--model er needs --n and --m")
        edges = generate_er(args.n, args.m, args.seed)
    else:
        edges = generate_community(
            args.communities,
            args.min_size,
            args.max_size,
            args.p_in,
            args.inter_edges,
            args.seed,
        )
    written = write_edge_list(args.out, edges)
    print(f"edges={written}\tpath={args.out}")
    return 0


def _print_estimate(result: Any) -> None:
    estimate = result.estimate
    print(f"global_cc\t{estimate.c!r}")
    print(f"triangles\t{estimate.t!r}")
    print(f"wedges\t{estimate.p}")
    if estimate.confidence is not None:
        print(f"confidence\t{estimate.confidence!r}")


def cmd_analyze(args: argparse.Namespace, config: Config) -> int:
    run = build_run_config(args, config)
    if run.input is None:
        raise WedgeSamplerError("analyze needs --input")
    pipeline = WedgeSamplingPipeline(run, build_engine_config(args, config))
    result = pipeline.run()
    _print_estimate(result)
    print(f"error_bound\t{achievable_error(run.k, run.delta)!r}")
    return 0


def cmd_exact(args: argparse.Namespace, config: Config) -> int:
    tau = args.tau if args.tau is not None else config.run.tau
    omega = args.omega if args.omega is not None else config.run.omega
    cfg = BinConfig(tau=tau, omega=omega)
    graph = Graph.from_file(args.input, args.edge_limit)
    stats = exact_stats(graph, cfg)
    if args.out is not None:
        write_summary(args.out / "summary.tsv", exact_summaries(stats), cfg)
    print(f"vertices\t{stats.n}")
    print(f"edges\t{stats.m}")
    print(f"wedges\t{stats.p}")
    print(f"triangles\t{stats.t}")
    print(f"global_cc\t{'undefined' if stats.c is None else repr(float(stats.c))}")
    return 0


def cmd_tristats(args: argparse.Namespace, config: Config) -> int:
    run = build_run_config(args, config)
    if run.input is None:
        raise WedgeSamplerError("tristats needs --input")
    bins = BinConfig.single_bin(args.max_degree)
    run = RunConfig(
        **{
            **run.model_dump(),
            "tau": bins.tau,
            "omega": bins.omega,
            "skip_2b": True,
            "skip_3a": True,
        }
    )
    samples = []

    def collect(results_path: Path) -> None:
        results = iter_records(results_path, WedgeResultV2)
        samples.extend(extract_triangles(results, bins))

    pipeline = WedgeSamplingPipeline(run, build_engine_config(args, config))
    result = pipeline.run(results_hook=collect)
    summary = assortativity_table(samples)
    write_assortativity(summary, run.out / ASSORTATIVITY_FILE, run.out / OUTLIERS_FILE)
    _print_estimate(result)
    print(f"triangle_samples\t{len(samples)}")
    print(f"distinct_triangles\t{len({s.vertices for s in samples})}")
    return 0


def cmd_ksamples(args: argparse.Namespace, config: Config) -> int:
    print(required_samples(args.eps, args.delta))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "exact": cmd_exact,
    "tristats": cmd_tristats,
    "ksamples": cmd_ksamples,
}


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    # Environment overrides (e.g. WEDGE_SAMPLER_CONFIG) from a .env file
    load_dotenv(override=True)

    parser = build_parser()
    args = parser.parse_args(argv)

    configure_logging(args.log_level or "info")
    config = ConfigLoader(resolve_config_path(args.config)).get_config()
    configure_logging(args.log_level or config.logging.level)

    try:
        return COMMANDS[args.command](args, config)
    except ValidationError as e:
        parser.error(str(e))
    except WedgeSamplerError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
