"""
Command-line front door.

    sparselab verify --dim 1 --depth 8 --seed 1
    sparselab scaling --p 2 --n 2,4,8,16 --ensemble shear --out r.csv

Each subcommand builds one ExperimentReport, writes it when --out is given
and prints a single summary line on stdout. Exit codes: 0 when every
invariant holds, 1 when one fails, 2 on a usage or validation error.
"""

import argparse
import sys
from typing import Callable, Dict, List, Optional

from rich.markup import escape

from .config import (DEFAULT_SEED, ENSEMBLES, FORMATS, SUBCOMMANDS, RunConfig,
                     load_config_file)
from .console import console, show_report
from .errors import InvariantViolation, SparseLabError
from .experiments import (LEMMA_DEPTH, ExperimentReport, directional_experiment,
                          domination_experiment, interval_fixtures, lemma_alpha_experiment,
                          lemma_delta_experiment, scaling_experiment, sharpness_experiment,
                          sparse_fixtures, tail_experiment)
from .reducers import SuiteReportReducer
from .space import build_space
from .storage import storage_for, write_report
from .suite import standard_suite

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

HELP = {
    "verify": "oracle equivalence, laminarity, tail and covering checks on seeded fixtures",
    "tail": "exponential overlap tail on towers and random sparse families",
    "scaling": "witnessed norms of the maximal sparse and maximal operators against N",
    "sharpness": "random tower construction showing the log N growth is attained",
    "lemma": "norm of the subset-restricted sparse operator against delta",
    "dominate": "interval families dominated by three shifted martingale collections",
    "directional": "maximal operator of shear families below the directional maximal operator",
}


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers: {text}") from e


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers: {text}") from e


def build_parser() -> argparse.ArgumentParser:
    # Option defaults are None so that config-file values survive unless a flag is given
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="space dimension d")
    common.add_argument("--depth", type=int, default=None, help="dyadic depth L")
    common.add_argument("--p", type=float, default=None, help="Lebesgue exponent")
    common.add_argument("--n", type=_int_list, default=None, help="comma list of family counts N")
    common.add_argument("--gamma", type=float, default=None, help="target sparsity")
    common.add_argument("--delta", type=_float_list, default=None, help="comma list of deltas")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED:#x})")
    common.add_argument("--ensemble", choices=sorted(ENSEMBLES), default=None)
    common.add_argument("--out", default=None, help="report file to write")
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--config", default=None, help="JSON file of default options")
    common.add_argument("--verbose", action="store_true", default=None,
                        help="progress and result table on stderr")

    parser = argparse.ArgumentParser(prog="sparselab",
                                     description="Sparse and maximal operator laboratory")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    sub.required = True
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Defaults, then the config file, then explicit flags. The names of the
    options set by the file or by flags are kept on `config.explicit`.
    """
    options = {}
    if args.config:
        options.update(load_config_file(args.config))
    for name in RunConfig.option_names():
        value = getattr(args, name, None)
        if value is not None:
            options[name] = value
    return RunConfig(args.subcommand, explicit=set(options), **options).validate()


def _given(config: RunConfig, name: str) -> bool:
    return name in config.explicit


def run_verify(config: RunConfig) -> ExperimentReport:
    space = build_space(config.dim, config.depth)
    reducer = SuiteReportReducer(seed=config.seed, params={"dim": config.dim,
                                                           "depth": config.depth,
                                                           "gamma": config.gamma})
    return standard_suite(space, config.seed, config.gamma).reduce_all(reducer, config.verbose)


def run_tail(config: RunConfig) -> ExperimentReport:
    space = build_space(config.dim, config.depth)
    sets = max(1, min(12, 2 * config.depth))
    fixtures = sparse_fixtures(space, config.seed, gamma=config.gamma, sets=sets)
    report = tail_experiment(fixtures, verbose=config.verbose)
    report.seed = config.seed
    return report


def run_scaling(config: RunConfig) -> ExperimentReport:
    overrides = {k: getattr(config, k) for k in ("dim", "depth") if _given(config, k)}
    return scaling_experiment(config.p, config.n, config.ensemble, config.seed,
                              overrides=overrides, verbose=config.verbose)


def run_sharpness(config: RunConfig) -> ExperimentReport:
    depth = config.depth if _given(config, "depth") else None
    return sharpness_experiment(config.n, config.p, config.seed, config.dim, depth,
                                verbose=config.verbose)


def run_lemma(config: RunConfig) -> ExperimentReport:
    if config.p == 2:
        depth = config.depth if _given(config, "depth") else LEMMA_DEPTH
        return lemma_delta_experiment(2, config.delta, config.seed, depth, verbose=config.verbose)
    return lemma_alpha_experiment(config.p, config.delta, config.seed, config.depth,
                                  verbose=config.verbose)


def run_dominate(config: RunConfig) -> ExperimentReport:
    space = build_space(config.dim, config.depth)
    return domination_experiment(interval_fixtures(space, config.seed), space,
                                 seed=config.seed, verbose=config.verbose)


def run_directional(config: RunConfig) -> ExperimentReport:
    depth = config.depth if _given(config, "depth") else 6
    return directional_experiment(config.n, depth, config.seed, verbose=config.verbose)


RUNNERS: Dict[str, Callable[[RunConfig], ExperimentReport]] = {
    "verify": run_verify,
    "tail": run_tail,
    "scaling": run_scaling,
    "sharpness": run_sharpness,
    "lemma": run_lemma,
    "dominate": run_dominate,
    "directional": run_directional,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse `argv`, run the subcommand and return the exit code.

    The report goes to --out when given, and one summary line to stdout.

    Args:
        argv: Arguments without the program name; sys.argv[1:] when None

    Returns:
        EXIT_PASS, EXIT_FAIL when an invariant failed, or EXIT_USAGE for bad
        arguments and rejected configurations
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code in (0, None) else EXIT_USAGE

    try:
        config = config_from_args(args)
        report = RUNNERS[config.subcommand](config)
    except InvariantViolation as e:
        console.print(f"[red]invariant violated:[/red] {escape(str(e))}")
        print(f"{args.subcommand}: FAIL {e}")
        return EXIT_FAIL
    except (SparseLabError, ValueError) as e:
        console.print(f"[red]error:[/red] {escape(str(e))}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    if config.out:
        storage = write_report(report, storage_for(config.format, config.out))
        if config.verbose:
            console.print(f"Stored {storage.stored} rows using {storage.describe()}")
    show_report(report, config.verbose)
    print(report.summary_line())
    return EXIT_PASS if report.passed else EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
