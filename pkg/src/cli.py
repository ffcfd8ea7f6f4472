import sys
import argparse
from typing import Any, Callable, Dict, List, Optional
from src.config.logger import logger
from src.config.run_config import CONTOUR_CLASSES, FAMILIES, RunConfig
from src.pipeline import run_cubic, run_quintic, run_trace, run_verify, run_zeros
from src.reports.report import CheckResult, ReportDocument
from src.reports.writers import ArtifactWriter


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", help="output directory (default: output)")
    parser.add_argument("--emit", help="comma-separated subset of json,csv,svg")
    parser.add_argument("--digits", type=int, help="working precision P in decimal digits")
    parser.add_argument("--config", help="key = value run configuration file (default: $SCURVE_CONFIG)")
    parser.add_argument("--seed", type=int, help="seed of the sampled checks")
    return parser


def _family_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=FAMILIES)
    parser.add_argument("--K", type=float, help="cubic parameter K")
    parser.add_argument("--critical", action="store_true", default=None, help="cubic at K = K*")
    parser.add_argument("--class", dest="contour_class", choices=CONTOUR_CLASSES, help="quintic contour class")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="scurves",
        description="S-curves, quadratic differential trajectories and non-Hermitian orthogonal polynomials.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cubic = commands.add_parser("cubic", parents=[common], help="cubic family V = -iz^3/3 + iKz")
    group = cubic.add_mutually_exclusive_group(required=True)
    group.add_argument("--K", type=float)
    group.add_argument("--critical", action="store_true", default=None, help="print v*, a*, b*, K*")

    quintic = commands.add_parser("quintic", parents=[common], help="quintic family V = -iz^5/5")
    quintic.add_argument("--class", dest="contour_class", choices=CONTOUR_CLASSES, required=True)

    trace = commands.add_parser("trace", parents=[common], help="trace one trajectory")
    _family_arguments(trace)
    trace.add_argument("--zero", type=int, default=1, help="zero index of Q (z0, z1, ...)")
    trace.add_argument("--angle", type=int, default=0, help="emanation angle index at the zero")
    trace.add_argument("--kind", choices=["horizontal", "vertical"], default="horizontal")
    trace.add_argument("--start", help="regular start point x,y, or y1 / y2 on the imaginary axis (cubic)")

    zeros = commands.add_parser("zeros", parents=[common], help="zeros of P_n against the equilibrium measure")
    _family_arguments(zeros)
    zeros.add_argument("--n", type=int, required=True)

    commands.add_parser("verify", parents=[common], help="run the acceptance suite")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Command-line values that override the configuration file. Unset flags are None.
    """
    keys = ["out", "emit", "digits", "seed", "K", "critical", "contour_class", "n"]
    overrides = {key: getattr(args, key, None) for key in keys}
    if args.command == "cubic":
        overrides["family"] = "cubic"
    elif args.command == "quintic":
        overrides["family"] = "quintic"
    else:
        overrides["family"] = getattr(args, "family", None)
    return overrides


def _print_summary(report: ReportDocument) -> None:
    constants = report.data.get("critical_constants")
    if constants:
        for name in ("v_star", "a_star", "b_star", "K_star"):
            print(f"{name} = {constants[name]:.10f}")
    for check in report.failures():
        print(f"FAIL {check.name} : measured {check.measured} tolerance {check.tolerance} {check.detail}".rstrip())
    print(f"{report.command} : {report.status.value} ({report.total_passed}/{report.total_checks} checks)")


COMMANDS: Dict[str, Callable[..., ReportDocument]] = {
    "cubic": run_cubic,
    "quintic": run_quintic,
    "zeros": run_zeros,
    "verify": run_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = None
    try:
        config = RunConfig.load(args.config, _overrides(args))
        if args.command == "trace":
            report = run_trace(config, args.zero, args.angle, args.kind, args.start)
        else:
            report = COMMANDS[args.command](config)
    except Exception as e:
        logger.error(f"Command {args.command} - Failed : {type(e).__name__} - {e}")
        if config is None:
            print(f"{args.command} : error : {e}", file=sys.stderr)
            return 1
        report = ReportDocument(args.command, config.to_dict(), [CheckResult.failed(f"command {args.command}", e)])
        try:
            ArtifactWriter(config.out_dir, config.emit).write_report(f"{args.command}_report", report)
        except Exception as write_error:
            logger.error(f"Command {args.command} - Report not written : {write_error}")
    _print_summary(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
