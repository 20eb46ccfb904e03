from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, NoReturn, Optional

from src.analysis.pipeline import as_abstract, run_abstract, run_check
from src.analysis.sweep import SweepResult, sweep_family
from src.api.export import OutputFormat, Stage, render_abstract, render_concrete
from src.api.report import Probability, abstract_marking
from src.cgf.errors import EnumerationError, ModelError, StateCapExceeded
from src.cgf.parser import load_model
from src.utils.config import AnalysisConfig
from src.utils.logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_STATE_CAP = 2
EXIT_NOT_ENCLOSED = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser, default_format: str) -> None:
    parser.add_argument("model", type=Path, help="Path to a .cgf model")
    parser.add_argument(
        "--widening", action=argparse.BooleanOptionalAction, default=None, help="Subsume new abstract states"
    )
    parser.add_argument("--state-cap", type=int, default=None, help="Maximum number of explored states")
    parser.add_argument("--enum-cap", type=int, default=None, help="Maximum valuations enumerated per bound")
    parser.add_argument("--epsilon", type=float, default=None, help="Convergence threshold of the iterative solvers")
    parser.add_argument("--max-iters", type=int, default=None, help="Sweep limit of the iterative solvers")
    parser.add_argument("--workers", type=int, default=None, help="Threads used to expand states")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=default_format)
    parser.add_argument("--output", type=Path, default=None, help="Write the result here instead of stdout")
    parser.add_argument("--dotenv", type=str, default=None, help="Path to a .env file with CGFA_* variables")
    parser.add_argument("--log-level", default=None, help="Logging level (defaults to LOG_LEVEL or INFO)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cgfa", description="Probabilistic termination analysis of Chemical Ground Form models.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = commands.add_parser("check", help="Exact termination probability from a concrete init")
    _add_common(check, OutputFormat.TEXT.value)

    abstract = commands.add_parser("abstract", help="Termination bounds for an interval init")
    _add_common(abstract, OutputFormat.TEXT.value)

    export = commands.add_parser("export", help="Dump one stage of the pipeline")
    _add_common(export, OutputFormat.JSON.value)
    export.add_argument("--stage", choices=[s.value for s in Stage], default=Stage.BOUNDS.value)

    sweep = commands.add_parser("sweep", help="Check every member of an interval init against the bounds")
    _add_common(sweep, OutputFormat.TEXT.value)
    return parser


def _config(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig.from_env(args.dotenv).with_overrides(
        state_cap=args.state_cap,
        enum_cap=args.enum_cap,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        widening=args.widening,
        workers=args.workers,
    )


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    output.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", output)


def sweep_text(result: SweepResult) -> str:
    lo, hi = result.bounds
    lines = [f"bounds at {result.initial}: [{lo:.12g}, {hi:.12g}]"]
    for member in result.members:
        flag = "ok" if member.enclosed else "OUTSIDE"
        lines.append(f"  {member.marking}  {member.probability:.12g}  {flag}")
    lines.append(f"all enclosed: {result.all_enclosed}")
    return "\n".join(lines) + "\n"


def sweep_json(result: SweepResult) -> str:
    document = {
        "initial": abstract_marking(result.initial),
        "bounds": [Probability.of(b).model_dump() for b in result.bounds],
        "members": [
            {
                "marking": member.marking.as_dict(),
                "probability": Probability.of(member.probability).model_dump(),
                "enclosed": member.enclosed,
            }
            for member in result.members
        ],
        "all_enclosed": result.all_enclosed,
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def _run(args: argparse.Namespace) -> int:
    config = _config(args)
    env, initial = load_model(args.model)
    name = args.model.stem
    fmt = OutputFormat(args.format)

    if args.command == "check":
        _emit(render_concrete(run_check(name, env, initial, config), Stage.DTMC, fmt), args.output)
        return EXIT_OK
    if args.command == "abstract":
        _emit(render_abstract(run_abstract(name, env, initial, config), Stage.BOUNDS, fmt), args.output)
        return EXIT_OK
    if args.command == "export":
        stage = Stage(args.stage)
        if stage.concrete:
            text = render_concrete(run_check(name, env, initial, config), stage, fmt)
        else:
            text = render_abstract(run_abstract(name, env, initial, config), stage, fmt)
        _emit(text, args.output)
        return EXIT_OK

    result = sweep_family(env, as_abstract(initial), config)
    _emit(sweep_json(result) if fmt is OutputFormat.JSON else sweep_text(result), args.output)
    return EXIT_OK if result.all_enclosed else EXIT_NOT_ENCLOSED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return _run(args)
    except ModelError as exc:
        logger.error("Invalid model %s: %s", args.model, exc)
        for diagnostic in exc.diagnostics:
            print(f"error: {diagnostic}", file=sys.stderr)
        return EXIT_MODEL
    except StateCapExceeded as exc:
        logger.error("%s while analysing %s", exc, args.model)
        return EXIT_STATE_CAP
    except EnumerationError as exc:
        logger.error("Cannot sweep %s: %s", args.model, exc)
        return EXIT_MODEL
    except (OSError, ValueError) as exc:
        logger.error("Failed to analyse %s: %s", args.model, exc)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
