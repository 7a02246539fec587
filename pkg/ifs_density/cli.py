import sys
import logging
import argparse
import pathlib
from enum import IntEnum
from typing import List, Optional

from strenum import StrEnum

from .exceptions import *
from .bounds import ScalingRow
from .config import RunConfig
from .experiment import Experiment
from .gridfn import GridFunction
from .helpers import parse_float_list, to_json_text
from .helpers_internal import write_text_atomically
from .logging import LogLevel, configure_logging


logger = logging.getLogger(__name__)

DEFAULT_EPS_LIST = "0.2,0.1,0.05,0.025"


class ExitCode(IntEnum):

    OK = 0
    INTERNAL_ERROR = 1
    INVALID_CONFIGURATION = 2
    VERIFICATION_FAILURE = 3


class Command(StrEnum):

    VALIDATE = 'validate'
    SOLVE = 'solve'
    SAMPLE = 'sample'
    VERIFY = 'verify'
    METRICS = 'metrics'
    BOUNDS = 'bounds'
    SCALING = 'scaling'


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration or bare system JSON file")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, default=None, help="random seed (overrides the configuration)")
    common.add_argument("--grid", type=int, default=None, help="number of grid nodes, odd (overrides the configuration)")
    common.add_argument("--tol", type=float, default=None, help="solver tolerance (overrides the configuration)")
    common.add_argument("--log-level", type=LogLevel, default=LogLevel.DEFAULT, choices=list(LogLevel))

    chain = argparse.ArgumentParser(add_help=False)
    chain.add_argument("--count", type=int, default=None, help="number of kept chain samples")
    chain.add_argument("--burn-in", type=int, default=None, dest="burn_in", help="number of discarded chain states")

    parser = argparse.ArgumentParser(prog="ifs-density",
                                     description="Invariant densities of random affine iterated function systems")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser(Command.VALIDATE, parents=[common], help="check the system's admissibility")
    commands.add_parser(Command.SOLVE, parents=[common], help="solve the invariant density")
    commands.add_parser(Command.SAMPLE, parents=[common, chain], help="sample the Markov chain")
    verify = commands.add_parser(Command.VERIFY, parents=[common, chain], help="duality, invariance and KS checks")
    verify.add_argument("--density", default=None, help="density CSV written by 'solve' (solved again when absent)")
    commands.add_parser(Command.METRICS, parents=[common], help="cone constants and observed contraction")
    commands.add_parser(Command.BOUNDS, parents=[common], help="derivative bounds against the solved density")
    scaling = commands.add_parser(Command.SCALING, parents=[common], help="epsilon scaling study")
    scaling.add_argument("--eps-list", default=DEFAULT_EPS_LIST, dest="eps_list",
                         help=f"comma separated epsilons (default: {DEFAULT_EPS_LIST})")
    return parser


def _load_config(args) -> RunConfig:
    return RunConfig.from_json_file(args.config).with_overrides(seed=args.seed,
                                                                grid_points=args.grid,
                                                                tol=args.tol,
                                                                count=getattr(args, 'count', None),
                                                                burn_in=getattr(args, 'burn_in', None))


def run(command: Command, config: RunConfig, out: pathlib.Path, args) -> ExitCode:
    experiment = Experiment(config)

    if command == Command.VALIDATE:
        report = experiment.validate()
        write_text_atomically(out / "validation.json", to_json_text(report.to_json()))
        if not report.is_admissible:
            print(report, file=sys.stderr)
            return ExitCode.INVALID_CONFIGURATION
        print(report)
        return ExitCode.OK

    if command == Command.SOLVE:
        result = experiment.solve()
        write_text_atomically(out / "density.csv", result.phi.to_csv_text('phi'))
        write_text_atomically(out / "diagnostics.json", to_json_text(result.to_json()))
        print(f"iterations: {result.iterations}, residual: {result.final_residual:.3e}, converged: {result.converged}")
        return ExitCode.OK if result.converged else ExitCode.VERIFICATION_FAILURE

    if command == Command.SAMPLE:
        samples = experiment.sample()
        write_text_atomically(out / "samples.csv", samples.to_csv_text())
        print(f"{samples.count} samples written")
        return ExitCode.OK

    if command == Command.VERIFY:
        if args.density is not None:
            experiment.use_density(GridFunction.from_csv(args.density))
        report = experiment.verify()
        write_text_atomically(out / "verify.json", to_json_text(report.to_json()))
        for check in report.checks:
            print(f"{check.name}: {check.value:.3e} (threshold {check.threshold:g}) {'ok' if check.passed else 'FAILED'}")
        report.raise_if_failed()
        return ExitCode.OK

    if command == Command.METRICS:
        metrics = experiment.metrics()
        write_text_atomically(out / "metrics.json", to_json_text(metrics))
        print(f"lambda0: {metrics['constants']['lambda0']:.6f}, observed max ratio: {metrics['max_empirical_ratio']}")
        return ExitCode.OK

    if command == Command.BOUNDS:
        report = experiment.bounds()
        write_text_atomically(out / "bounds.json", to_json_text(report.to_json()))
        for row in report.rows:
            print(f"k={row.k} ({row.normalization}): observed {row.observed:.6g} <= bound {row.bound:.6g}: {row.passed}")
        return ExitCode.OK if report.passed else ExitCode.VERIFICATION_FAILURE

    if command == Command.SCALING:
        rows = experiment.scaling(parse_float_list(args.eps_list))
        write_text_atomically(out / "scaling.json", to_json_text([row.to_json() for row in rows]))
        write_text_atomically(out / "scaling.csv",
                              "\n".join([ScalingRow.csv_header()] + [row.to_csv_line() for row in rows]) + "\n")
        if any(row.admissible and not row.within_bound for row in rows):
            return ExitCode.VERIFICATION_FAILURE
        return ExitCode.OK

    raise ConfigurationError(msg=f"Unknown command '{command}'")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = _load_config(args)
        return int(run(Command(args.command), config, pathlib.Path(args.out), args))
    except VerificationFailure as ex:
        print(ex, file=sys.stderr)
        return int(ExitCode.VERIFICATION_FAILURE)
    except (ConfigurationError, DomainError, PreconditionError) as ex:
        print(ex, file=sys.stderr)
        return int(ExitCode.INVALID_CONFIGURATION)
    except Exception as ex:
        logger.exception(f"internal error: {ex}")
        return int(ExitCode.INTERNAL_ERROR)


if __name__ == '__main__':
    sys.exit(main())
