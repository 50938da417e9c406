"""Command line entry point: `nilpotent-actions <group> <command> ...`.

JSON documents go to stdout, a short summary to stderr. The exit code is 0
when every check passes, 1 when a check fails, and the error's own code
otherwise (see nilpotent_actions.errors).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Optional, Sequence

from nilpotent_actions.bounds import current_bounds
from nilpotent_actions.config import MODES, PipelineConfig
from nilpotent_actions.errors import NilpotentActionsError
from nilpotent_actions.pipeline import (
    chern_document,
    document_summary,
    dumps,
    lattice_document,
    run,
    theta_document,
    waring_document,
)

log = logging.getLogger(__name__)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilpotent-actions",
        description="Build and verify actions of finite class-2 nilpotent groups.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level for stderr (default WARNING)",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    pipeline = groups.add_parser("pipeline", help="end-to-end runs").add_subparsers(dest="command", required=True)
    p = pipeline.add_parser("run", help="run the full pipeline on a config")
    p.add_argument("--config", required=True, help="YAML or JSON run configuration")
    p.add_argument("--mode", choices=MODES, help="override the config's mode")
    p.set_defaults(handler=_pipeline_run)

    waring = groups.add_parser("waring", help="Waring multisets").add_subparsers(dest="command", required=True)
    p = waring.add_parser("solve", help="extend a multiset to one with vanishing power sums")
    p.add_argument("--n", type=int, required=True, help="highest power k")
    p.add_argument("--delta", type=int, required=True, help="modulus δ")
    p.add_argument("--set", type=_int_list, default=[], dest="S", help="comma separated entries of S, e.g. --set=1,-2")
    p.add_argument("--minimal-cap", type=int, help="also run the exhaustive minimal search up to this size")
    p.set_defaults(handler=_waring_solve)

    chern = groups.add_parser("chern", help="Chern character certificates").add_subparsers(
        dest="command", required=True
    )
    p = chern.add_parser("certify", help="certify the complement bundle for a line bundle on a torus")
    p.add_argument("--dim", type=int, required=True, help="real torus dimension m")
    p.add_argument("--c1", required=True, help='first Chern class, e.g. "e12:1,e34:1"')
    p.add_argument("--d", type=int, default=1, help="divisibility d (default 1)")
    p.set_defaults(handler=_chern_certify)

    theta = groups.add_parser("theta", help="theta groups").add_subparsers(dest="command", required=True)
    p = theta.add_parser("check", help="parametrise the config's factors and check its admissible tuples")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_theta_check)

    lattice = groups.add_parser("lattice", help="isotropic sublattice data").add_subparsers(
        dest="command", required=True
    )
    p = lattice.add_parser("check", help="realise the config's factors and check its sublattice data")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_lattice_check)
    return parser


def _emit(document: dict, summary: str) -> int:
    print(dumps(document))
    print(summary, file=sys.stderr)
    return 0 if document["ok"] else 1


def _pipeline_run(args: argparse.Namespace) -> int:
    config = PipelineConfig.from_yaml(args.config)
    if args.mode:
        config = replace(config, mode=args.mode)
    report = run(config, current_bounds())
    return _emit(report.to_json(), report.summary())


def _waring_solve(args: argparse.Namespace) -> int:
    document = waring_document(args.n, args.S, args.delta, args.minimal_cap, current_bounds())
    return _emit(document, document_summary(document))


def _chern_certify(args: argparse.Namespace) -> int:
    document = chern_document(args.dim, args.c1, args.d)
    return _emit(document, document_summary(document))


def _theta_check(args: argparse.Namespace) -> int:
    document = theta_document(PipelineConfig.from_yaml(args.config), current_bounds())
    return _emit(document, document_summary(document))


def _lattice_check(args: argparse.Namespace) -> int:
    document = lattice_document(PipelineConfig.from_yaml(args.config), current_bounds())
    return _emit(document, document_summary(document))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except NilpotentActionsError as e:
        print(f"error: {e}", file=sys.stderr)
        log.debug("command failed", exc_info=True)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
