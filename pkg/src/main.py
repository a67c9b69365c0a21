"""Command-line entry point for the rigid model domain toolkit.

Reads a domain file, runs the requested analysis and prints a report:
human-readable by default, the stable JSON schema with ``--json``. Logs go to
stderr (and optionally a file) so they never interleave with the report on
stdout. Run as ``python -m src.main <command> <file>``.
"""

import argparse
import itertools
import logging
import os
import sys
from pathlib import Path

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ

from src.config import (
    EXIT_DEGENERATE,
    EXIT_INTERNAL_ERROR,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_VERIFICATION_FAILED,
    LOG_FILE_ENV_VAR,
    LOG_FORMAT,
)
from src.decomposition import holomorphic_decompose, pluriharmonic_split
from src.domain_file import DomainFile, DomainFileError, load_domain_file
from src.finite_type import DegeneratePolynomialError, finite_type_necessary
from src.flows import InvalidFlowError, VField, admissible_flow_types, commutes, flow_preserves_model, generator, pair_check
from src.grading import InvalidWeightError, Weight, balance_class
from src.parser import PolynomialSyntaxError
from src.polynomial import NotHolomorphicError, split_parts
from src.report import Report, dumps_report, render_text, to_data, write_report
from src.symmetry import InvalidDomainError, classify, tangent_fields, torus_weights, translation_directions, verify_model_map

logger = logging.getLogger(__name__)

_HANDLERS: list[logging.Handler] = []

DECLARATION_ERRORS = (
    PolynomialSyntaxError,
    DomainFileError,
    InvalidDomainError,
    InvalidFlowError,
    InvalidWeightError,
    NotHolomorphicError,
    OSError,
)


def setup_logging(quiet: bool = False, log_file: str | None = None) -> logging.Logger:
    """Configures logging to stderr and, optionally, to a file.

    Args:
        quiet: Only log warnings and errors.
        log_file: Log file path, overwritten each run. Falls back to
                  MODELKIT_LOG_FILE when not given.

    Returns:
        A logger associated with main.py
    """
    log_formatter = logging.Formatter(LOG_FORMAT)
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.WARNING if quiet else logging.INFO)

    while _HANDLERS:
        root_logger.removeHandler(_HANDLERS.pop())

    # Console Handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)
    _HANDLERS.append(console_handler)

    # File Handler
    log_file = log_file or os.environ.get(LOG_FILE_ENV_VAR)
    if log_file:
        file_handler = logging.FileHandler(log_file, mode="w")
        file_handler.setFormatter(log_formatter)
        _HANDLERS.append(file_handler)

    for handler in _HANDLERS:
        root_logger.addHandler(handler)

    logger = logging.getLogger(__name__)
    logger.debug("Logging configured.")
    return logger


def _weight_argument(text: str) -> Weight:
    try:
        first, second = (part.strip() for part in text.split(","))
        return Weight.circle(_rational(first), _rational(second))
    except (ValueError, ZeroDivisionError) as exc:
        msg = f"expected a weight 'theta1,theta2', got {text!r}"
        raise argparse.ArgumentTypeError(msg) from exc


def _rational(text: str) -> MPQ:
    numerator, _, denominator = text.partition("/")
    return QQ(int(numerator), int(denominator or 1))


def build_parser() -> argparse.ArgumentParser:
    """Builds the argument parser with one subcommand per analysis.

    Every subcommand takes the domain file plus the shared --json, --quiet,
    --log-file and --output options.

    Returns:
        The configured parser.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the machine-readable JSON report")
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    common.add_argument("--log-file", default=None, help=f"also log to this file (default: ${LOG_FILE_ENV_VAR})")
    common.add_argument("--output", type=Path, default=None, help="also write the JSON report to this file")

    parser = argparse.ArgumentParser(prog="modelkit", description="Analyse rigid polynomial model domains.")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", parents=[common], help="finite type, split and balance summary")
    analyze.add_argument("file", type=Path)
    analyze.add_argument(
        "--weight", type=_weight_argument, action="append", default=None, help="weight 'theta1,theta2' (repeatable)"
    )

    decompose = commands.add_parser("decompose", parents=[common], help="holomorphic decomposition of P")
    decompose.add_argument("file", type=Path)

    symmetries = commands.add_parser("symmetries", parents=[common], help="torus, translations, tangent fields")
    symmetries.add_argument("file", type=Path)
    symmetries.add_argument("--max-degree", type=int, default=None, help="degree bound of the tangent-field search")

    classify_cmd = commands.add_parser("classify", parents=[common], help="classify the model by its symmetries")
    classify_cmd.add_argument("file", type=Path)

    verify = commands.add_parser("verify", parents=[common], help="verify declared maps and flows")
    verify.add_argument("file", type=Path)
    verify.add_argument("--map", dest="map_file", type=Path, default=None, help="file declaring model maps")
    verify.add_argument("--flow", dest="flow_file", type=Path, default=None, help="file declaring flows")
    return parser


def cmd_analyze(document: DomainFile, weights: list[Weight] | None = None) -> tuple[Report, int]:
    """Finite-type tests, the P1 + M + P2 split and balance classes for the given or kernel-derived weights.

    Args:
        document: The parsed domain file.
        weights: Weights to classify against; None derives them from the rotation torus.

    Returns:
        The report and the exit code, EXIT_DEGENERATE when P fails the finite-type tests.
    """
    domain = document.domain
    verdict = finite_type_necessary(domain.p)
    report: Report = {"command": "analyze", "polynomial": str(domain.p), "finite_type_necessary": to_data(verdict)}
    if not verdict.passed:
        logger.warning("P fails the finite-type tests: %s", "; ".join(verdict.reasons))
        return report, EXIT_DEGENERATE
    _, core = pluriharmonic_split(domain.p)
    torus = torus_weights(core)
    if weights is None:
        weights = [Weight.circle(*vector) for vector in torus.basis] or [Weight.circle(1, 1)]
    report["split_parts"] = to_data(split_parts(domain.p))
    report["torus"] = to_data(torus)
    report["balance"] = [{"weight": to_data(weight), "class": to_data(balance_class(domain.p, weight))} for weight in weights]
    return report, EXIT_OK


def cmd_decompose(document: DomainFile) -> tuple[Report, int]:
    """Holomorphic decomposition, verified by reconstruction before it is reported.

    Args:
        document: The parsed domain file.

    Returns:
        The report and EXIT_OK.
    """
    domain = document.domain
    decomposition = holomorphic_decompose(domain.p)
    return {"command": "decompose", "polynomial": str(domain.p), "decomposition": to_data(decomposition)}, EXIT_OK


def cmd_symmetries(document: DomainFile, max_degree: int | None = None) -> tuple[Report, int]:
    """Rotation torus, translations, tangent fields and admissible flow kinds.

    Args:
        document: The parsed domain file.
        max_degree: Degree bound of the tangent-field search; None uses the degree of P.

    Returns:
        The report and EXIT_OK.
    """
    domain = document.domain
    report: Report = {
        "command": "symmetries",
        "polynomial": str(domain.p),
        "flow_types": [to_data(entry) for entry in admissible_flow_types(domain.p)],
        "torus": to_data(torus_weights(domain.p)),
        "translations": [to_data(t) for t in translation_directions(domain.p)],
        "tangent_fields": [to_data(f) for f in tangent_fields(domain.p, max_degree)],
    }
    return report, EXIT_OK


def cmd_classify(document: DomainFile) -> tuple[Report, int]:
    """Full classification report; unclassified models still exit 0.

    Args:
        document: The parsed domain file.

    Returns:
        The report and EXIT_OK.
    """
    domain = document.domain
    return {"command": "classify", "polynomial": str(domain.p), "classification": to_data(classify(domain))}, EXIT_OK


def cmd_verify(document: DomainFile, extra: list[DomainFile]) -> tuple[Report, int]:
    """Verify every declared model map and flow against P, and every pair of flows.

    Args:
        document: The domain file holding P and possibly declarations.
        extra: Declaration files given with --map and --flow.

    Returns:
        The report and EXIT_OK, or EXIT_VERIFICATION_FAILED when any check fails.

    Raises:
        DomainFileError: If nothing is declared to verify.
    """
    domain = document.domain
    maps = dict(document.maps)
    flows = dict(document.flows)
    for declarations in extra:
        maps.update(declarations.maps)
        flows.update(declarations.flows)
    if not maps and not flows:
        msg = "no map or flow declared to verify"
        raise DomainFileError(msg)

    passed = True
    map_results = {}
    for name, model_map in maps.items():
        verdict = verify_model_map(domain, model_map)
        passed = passed and verdict.passed
        map_results[name] = to_data(verdict)
    flow_results = {}
    for name, flow in flows.items():
        invariance = flow_preserves_model(domain.p, flow)
        violations = flow.model_violations()
        passed = passed and invariance.holds and not violations
        flow_results[name] = {
            "flow": to_data(flow),
            "generator": to_data(generator(flow)),
            "invariance": to_data(invariance),
            "commutes_with_canonical": commutes(flow, VField.canonical()),
            "model_violations": violations,
        }
    pair_results = []
    for (first, f), (second, g) in itertools.combinations(flows.items(), 2):
        verdict = pair_check(f, g)
        passed = passed and verdict.model_admissible
        pair_results.append({"flows": [first, second], "verdict": to_data(verdict)})
    report: Report = {
        "command": "verify",
        "polynomial": str(domain.p),
        "maps": map_results,
        "flows": flow_results,
        "pairs": pair_results,
        "passed": passed,
    }
    return report, EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def run(args: argparse.Namespace) -> tuple[Report, int]:
    """Dispatch a parsed command line to its command.

    Args:
        args: The parsed command line.

    Returns:
        The command's report and exit code.
    """
    document = load_domain_file(args.file)
    if args.command == "analyze":
        return cmd_analyze(document, args.weight)
    if args.command == "decompose":
        return cmd_decompose(document)
    if args.command == "symmetries":
        return cmd_symmetries(document, args.max_degree)
    if args.command == "classify":
        return cmd_classify(document)
    extra = [
        load_domain_file(path, require_polynomial=False) for path in (args.map_file, args.flow_file) if path is not None
    ]
    return cmd_verify(document, extra)


def main(argv: list[str] | None = None) -> int:
    """Run the command line and return its exit code.

    Args:
        argv: Arguments without the program name; None reads sys.argv.

    Returns:
        One of the EXIT_* codes from src.config.
    """
    args = build_parser().parse_args(argv)
    logger = setup_logging(args.quiet, args.log_file)
    logger.info("Running %s on %s", args.command, args.file)

    try:
        report, code = run(args)
    except DECLARATION_ERRORS as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_PARSE_ERROR
    except DegeneratePolynomialError as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_DEGENERATE
    except Exception:
        logger.exception("An unhandled error stopped the %s command!", args.command)
        return EXIT_INTERNAL_ERROR

    print(dumps_report(report) if args.json else render_text(report))  # noqa: T201
    if args.output is not None:
        write_report(report, args.output)
    logger.info("Finished %s with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
