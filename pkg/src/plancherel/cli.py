"""Command line entry point: ``plancherel <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (
    EXIT_INVALID, EXIT_IO, EXPERIMENTS, ConfigError, ExperimentConfig, run_experiment,
)
from .samplers import default_threads


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plancherel", description="Plancherel random partition experiments.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    parser.add_argument("--n", type=_ints, help="partition size(s), comma separated")
    parser.add_argument("--t", type=float, help="poissonization parameter")
    parser.add_argument("--x", type=_floats, help="column coordinate(s) in (0, 2)")
    parser.add_argument("--u", type=_floats, help="rotated coordinate(s) in (-2, 2)")
    parser.add_argument("--s", type=_floats, help="separation exponents / limit-vector times in [0, 1]")
    parser.add_argument("--x0", type=float, help="base point for the covariance experiment")
    parser.add_argument("--z", type=float, help="shift of the counting interval or edge level")
    parser.add_argument("--k-max", type=int, dest="k_max", help="highest Chebyshev index for kerov")
    parser.add_argument("--m", type=int, help="series truncation order (default ceil(sqrt n))")
    parser.add_argument("--sep-scale", type=float, dest="sep_scale", help="constant c in x0 + c n^(-s/2)")
    parser.add_argument("--du", type=float, help="spacing u' - u for the tightness probe")
    parser.add_argument("--eps", type=float, help="threshold for the tightness probe")
    parser.add_argument("--sampler", choices=("rsk", "growth"))
    parser.add_argument("--replicas", type=int)
    parser.add_argument("--seed", type=int, dest="master_seed")
    parser.add_argument("--threads", type=int, dest="thread_count",
                        help="worker threads (default: PLANCHEREL_THREADS or CPU count)")
    parser.add_argument("--out", help="output directory for CSV/JSON/.dat files")
    parser.add_argument("--reproducible", action="store_true", default=None,
                        help="omit timestamps so equal configs give identical files")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    data["experiment"] = args.experiment
    for key, value in vars(args).items():
        if key in ("config", "experiment") or value is None:
            continue
        data[key] = value
    data.setdefault("thread_count", default_threads())
    return ExperimentConfig.from_json(json.dumps(data))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    result = run_experiment(cfg)
    if "error" in result.summary:
        print(f"error: {result.summary['error']}", file=sys.stderr)
    else:
        print(json.dumps(result.summary, indent=2, sort_keys=True, default=str))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
