"""Command-line entry point for streamvb"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .config import Config, ExperimentConfig, get_config
from .errors import StreamVBError
from .models import LikelihoodLoader, build_model
from .runner import compare_traces, run_learners
from .streams import build_stream, generate_stream, write_stream
from .traces import TraceStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def setup_logging(level: str = "INFO", log_file: Optional[str] = "streamvb.log"):
    """Configure logging"""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Read the config file, apply flag overrides and validate"""
    config: Config = get_config(args.config, reload=True)
    config.apply_overrides(args.set or [])
    if getattr(args, "output_dir", None):
        config.set("output_dir", args.output_dir)
    if getattr(args, "seed", None) is not None:
        config.set("seed", args.seed)
    experiment = ExperimentConfig.from_config(config)
    setup_logging(experiment.logging.level, experiment.logging.file)
    return experiment


def load_plugins(experiment: ExperimentConfig) -> int:
    """Register model plugins from the configured directory"""
    directory = experiment.plugins.directory
    if not directory:
        return 0
    print("Loading model plugins...")
    count = LikelihoodLoader(directory).load_all_plugins()
    print(f"{count} plugin model(s) registered\n")
    return count


def cmd_generate(args: argparse.Namespace) -> int:
    experiment = load_experiment(args)
    batches = generate_stream(experiment.stream, experiment.seed)
    output = Path(args.output) if args.output else Path(experiment.output_dir) / "stream.csv"
    rows = write_stream(batches, output)
    print(f"Wrote {rows} rows in {len(batches)} batches to {output}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    experiment = load_experiment(args)
    load_plugins(experiment)

    model = build_model(experiment.model.name, experiment.model.params)
    batches = build_stream(experiment.stream, experiment.seed)
    store = TraceStore(experiment.output_dir)
    store.directory.mkdir(parents=True, exist_ok=True)

    print("\n" + "=" * 60)
    print(f"Running {len(experiment.learners)} learner(s) on {len(batches)} batches of model {model.name}")
    print("=" * 60 + "\n")

    results = asyncio.run(run_learners(model, experiment.learners, batches, store, experiment.seed))
    for result in results:
        print(str(result))

    succeeded = sum(result.success for result in results)
    print(f"\n{succeeded}/{len(results)} learner(s) completed; traces in {store.directory}")
    return EXIT_OK if succeeded else EXIT_CONFIG


def cmd_compare(args: argparse.Namespace) -> int:
    summary = compare_traces(args.trace_dir)
    print(summary.to_string(index=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamvb", description="Streaming variational Bayes with power priors")
    subparsers = parser.add_subparsers(dest="command", required=True)

    generate = subparsers.add_parser("generate", help="write a synthetic stream to CSV")
    generate.add_argument("--config", default="config.yaml")
    generate.add_argument("--output", help="stream file (default: <output_dir>/stream.csv)")
    generate.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    generate.set_defaults(func=cmd_generate)

    run = subparsers.add_parser("run", help="run the configured learners and write traces")
    run.add_argument("--config", default="config.yaml")
    run.add_argument("--output-dir", dest="output_dir")
    run.add_argument("--seed", type=int)
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    run.set_defaults(func=cmd_run)

    compare = subparsers.add_parser("compare", help="aggregate TMLL over the traces of a run")
    compare.add_argument("trace_dir")
    compare.set_defaults(func=cmd_compare)

    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors onto exit codes"""
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StreamVBError, ValidationError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"\nError: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"\nI/O error: {e}", file=sys.stderr)
        return EXIT_IO


def main():
    """Main entry point"""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
