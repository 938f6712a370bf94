"""
topp-hmm command line: generate, train, truncate, run, analyze.

Results are printed on stdout (or written to --out), diagnostics are
logged on stderr. Exit codes: 0 success, 1 bound violation, 2 input error.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app.core.config import settings
from app.core.logger import configure_logging
from app.schemas.experiment_schema import ExperimentConfig, ModelSource, TruncationMode
from app.schemas.generator_schema import CorpusSpec, GenerateRequest, GeneratorKind
from app.services.experiment_service import ExperimentService
from app.services.model_service import ModelService
from app.utils.exceptions import BoundViolationError, ModelFileError, ParameterError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_INPUT_ERROR = 2


# -------------------------------------------------
# PARSER
# -------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topp-hmm",
        description="Top-p truncated hidden Markov models: build, truncate, benchmark, bound.",
    )
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL.")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Write a synthetic model file.")
    generate.add_argument("kind", choices=[k.value for k in GeneratorKind])
    _add_generator_flags(generate)
    generate.add_argument("--sparse", action="store_true", help="Store matrices in CSR blocks.")
    generate.add_argument("--out", required=True, help="Model file to write.")
    generate.set_defaults(handler=cmd_generate)

    train = commands.add_parser("train", help="Bigram model from a text corpus.")
    train.add_argument("corpus", help="UTF-8 text file, whitespace separated tokens.")
    train.add_argument("--lowercase", action="store_true")
    train.add_argument("--min-count", type=int, default=1,
                       help="Rarer tokens collapse into <unk>.")
    train.add_argument("--sparse", action="store_true")
    train.add_argument("--out", required=True)
    train.set_defaults(handler=cmd_train)

    truncate = commands.add_parser("truncate", help="Write the top-p model and print its report.")
    truncate.add_argument("model", help="Model file.")
    truncate.add_argument("--p", type=float, required=True)
    truncate.add_argument("--out", required=True)
    truncate.set_defaults(handler=cmd_truncate)

    run = commands.add_parser("run", help="Dense vs top-p inference, CSV records.")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", help="Model file.")
    source.add_argument("--generator", choices=[k.value for k in GeneratorKind])
    _add_generator_flags(run)
    run.add_argument("--p", type=float, nargs="+", default=None,
                     help="p values (default %s)." % settings.DEFAULT_P_VALUES)
    run.add_argument("--horizon", type=int, default=settings.DEFAULT_HORIZON)
    run.add_argument("--obs-period", type=int, default=None,
                     help="Enter an observation every N steps (filtering).")
    run.add_argument("--mode", choices=[m.value for m in TruncationMode],
                     default=TruncationMode.MODEL.value)
    run.add_argument("--repetitions", type=int, default=settings.DEFAULT_REPETITIONS)
    run.add_argument("--gamma", action=argparse.BooleanOptionalAction, default=None,
                     help="Force or skip the mixing rate (default: by model size).")
    run.add_argument("--format", choices=["csv"], default="csv")
    run.add_argument("--out", default=None, help="CSV file (default stdout).")
    run.set_defaults(handler=cmd_run)

    analyze = commands.add_parser("analyze", help="Mixing rate and error bounds.")
    analyze.add_argument("model", help="Model file.")
    analyze.add_argument("--p", type=float, nargs="+", default=None)
    analyze.add_argument("--horizon", type=int, default=settings.DEFAULT_HORIZON)
    analyze.add_argument("--gamma", action=argparse.BooleanOptionalAction, default=None)
    analyze.add_argument("--contraction-trials", type=int, default=0)
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--out", default=None, help="JSON report file (default stdout).")
    analyze.set_defaults(handler=cmd_analyze)

    return parser


def _add_generator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--states", type=int, default=800)
    parser.add_argument("--heavy-count", type=int, default=5)
    parser.add_argument("--heavy-mass", type=float, default=0.9)
    parser.add_argument("--seed", type=int, default=0)


# -------------------------------------------------
# COMMANDS
# -------------------------------------------------
def cmd_generate(args: argparse.Namespace, service: ModelService) -> int:
    model = service.generate(
        GenerateRequest(
            kind=args.kind,
            states=args.states,
            heavy_count=args.heavy_count,
            heavy_mass=args.heavy_mass,
            seed=args.seed,
        )
    )
    path = service.repository.save_hmm(model, args.out, sparse=args.sparse)
    print(f"{path}: {model.n_states} states, {model.n_obs} observations")
    return EXIT_OK


def cmd_train(args: argparse.Namespace, service: ModelService) -> int:
    model = service.train(
        CorpusSpec(path=args.corpus, lowercase=args.lowercase, min_count=args.min_count)
    )
    path = service.repository.save_hmm(model, args.out, sparse=args.sparse)
    print(f"{path}: vocabulary {model.n_states}")
    return EXIT_OK


def cmd_truncate(args: argparse.Namespace, service: ModelService) -> int:
    model = service.repository.load_hmm(args.model)
    topp = service.truncate(model, args.p)
    service.repository.save_top_p_hmm(topp, args.out)

    report = topp.report
    print(f"p: {report.p}")
    print(f"transition sparsity: {report.transition_sparsity:.6f}")
    print(f"observation sparsity: {report.observation_sparsity:.6f}")
    print(f"min kept mass: {report.min_kept_mass:.6f}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, service: ModelService) -> int:
    source = ModelSource(
        generator=args.generator,
        path=args.model,
        states=args.states,
        heavy_count=args.heavy_count,
        heavy_mass=args.heavy_mass,
        seed=args.seed,
    )
    config = ExperimentConfig(
        source=source,
        p_values=args.p or list(settings.DEFAULT_P_VALUES),
        horizon=args.horizon,
        obs_period=args.obs_period,
        mode=args.mode,
        seed=args.seed,
        repetitions=args.repetitions,
        compute_gamma=args.gamma,
    )

    runner = ExperimentService(service)
    records = runner.run(config)
    runner.write_csv(records, args.out if args.out else sys.stdout)

    runner.enforce_bounds(records)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, service: ModelService) -> int:
    model = service.repository.load_hmm(args.model)
    report = service.analyze(
        model,
        p_values=args.p or list(settings.DEFAULT_P_VALUES),
        horizon=args.horizon,
        compute_gamma=args.gamma,
        contraction_trials=args.contraction_trials,
        seed=args.seed,
    )

    text = report.model_dump_json(indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


# -------------------------------------------------
# ENTRY POINT
# -------------------------------------------------
def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR

    configure_logging(args.log_level)

    try:
        return args.handler(args, ModelService())
    except BoundViolationError as exc:
        logger.error("bound violation: %s", exc.message)
        return EXIT_BOUND_VIOLATION
    except (ParameterError, ModelFileError) as exc:
        logger.error("%s", exc.message)
        return EXIT_INPUT_ERROR
    except ValidationError as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
