"""Command-line entry point.

Exit codes: 0 ok, 2 validation, 3 empty match, 4 io/config, 5 internal.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .ahp import DEFAULT_MAX_ITER, DEFAULT_TOL, EPSILON, ahp_rank, injection_from_dict, select_best
from .broker import serve
from .catalog import load_hierarchy, load_offerings, read_json
from .errors import EmptyMatch, IoError, RankfarmError
from .matcher import fn_match
from .report import SECTIONS, kiviat_export, render_kiviat, render_report
from .requirements import load_requirements

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_EMPTY_MATCH = 3
EXIT_IO = 4
EXIT_INTERNAL = 5

DEFAULT_ADDR = "127.0.0.1:8080"


def _exit_code(exc: RankfarmError) -> int:
    if isinstance(exc, EmptyMatch):
        return EXIT_EMPTY_MATCH
    if isinstance(exc, IoError):
        return EXIT_IO
    return EXIT_VALIDATION


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(out).write_bytes(data)
    except OSError as exc:
        raise IoError(f"{out}: {exc.strerror or exc}") from None


def _run_pipeline(args: argparse.Namespace):
    hierarchy = load_hierarchy(args.hierarchy, strict=args.strict)
    catalog = load_offerings(args.offerings, hierarchy)
    req = load_requirements(args.requirements, hierarchy)
    injected = injection_from_dict(read_json(args.inject)) if args.inject else None
    match = fn_match(catalog, req.functional)
    for r in match.rejected:
        logging.getLogger(__name__).info("rejected %s: %s (%s)", r.service_id, r.reason, r.detail)
    if not match.matched:
        raise EmptyMatch("no service satisfies the functional requirements")
    return ahp_rank(
        catalog,
        match.matched,
        req,
        tol=args.tol,
        max_iter=args.max_iter,
        epsilon=args.epsilon,
        injected=injected,
    )


def cmd_validate(args: argparse.Namespace) -> int:
    hierarchy = load_hierarchy(args.hierarchy, strict=args.strict)
    catalog = load_offerings(args.offerings, hierarchy)
    if args.requirements:
        load_requirements(args.requirements, hierarchy)
    print(f"ok: {len(catalog.offerings)} services, {len(hierarchy.sub_level)} sub-level attributes")
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    report = _run_pipeline(args)
    _write(render_report(report, args.format, args.show or ["all"]), args.out)
    if args.format == "text":
        print(f"Selected service: {select_best(report)}", file=sys.stderr)
    return EXIT_OK


def cmd_kiviat(args: argparse.Namespace) -> int:
    report = _run_pipeline(args)
    _write(render_kiviat(kiviat_export(report), args.format), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    addr = args.addr or os.environ.get("RANKFARM_ADDR") or DEFAULT_ADDR
    snapshot = args.snapshot or os.environ.get("RANKFARM_SNAPSHOT")
    serve(addr, snapshot)
    return EXIT_OK


def _add_inputs(p: argparse.ArgumentParser, with_requirements: bool = True) -> None:
    p.add_argument("hierarchy", help="hierarchy template (JSON)")
    p.add_argument("offerings", help="offerings template (JSON)")
    if with_requirements:
        p.add_argument("requirements", help="requirements template (JSON)")
    p.add_argument("--strict", action="store_true", help="reject hierarchies whose sibling weights do not sum to 1")


def _add_engine(p: argparse.ArgumentParser) -> None:
    p.add_argument("--inject", metavar="PATH", help="precomputed sub-level vectors to use instead of derived ones")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="power-iteration tolerance")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="power-iteration cap")
    p.add_argument("--epsilon", type=float, default=EPSILON, help="close/exact smoothing (relative)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankfarm", description="Rank cloud renderfarm services with AHP.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate hierarchy and offerings templates")
    _add_inputs(p, with_requirements=False)
    p.add_argument("--requirements", help="also validate a requirements template")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rank", help="match and rank services")
    _add_inputs(p)
    _add_engine(p)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument(
        "--show", action="append", choices=(*SECTIONS, "all"),
        help="report section to print (repeatable; default all)",
    )
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("kiviat", help="export radar-chart data of top-level scores")
    _add_inputs(p)
    _add_engine(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kiviat)

    p = sub.add_parser("serve", help="run the HTTP broker")
    p.add_argument("--addr", help=f"HOST:PORT (env RANKFARM_ADDR, default {DEFAULT_ADDR})")
    p.add_argument("--snapshot", help="registry snapshot file (env RANKFARM_SNAPSHOT)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except RankfarmError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except Exception as exc:  # pragma: no cover - last resort
        print(f"ERROR Internal: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
