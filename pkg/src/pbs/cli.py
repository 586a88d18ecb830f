"""Command-line entry point.

Exit codes: 0 success, 2 validation or inference failure, 3 solver failure,
4 environment failure (unreadable files, busy ports).  `solve` and
`from-detections` share one output writer so the two pipelines can be
compared file-for-file.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from .diagrams import render_svg, sample_series, series_to_dict, summary_text
from .inference import InferenceError, InferenceOptions, build_beam_spec, report_to_dict
from .llm import config_from_env
from .model import (
    BeamSpec,
    BeamValidationError,
    ParseError,
    ValidatedBeam,
    deserialize_beam,
    schema_text,
    serialize_beam,
    validate_beam,
)
from .detections import parse_detections
from .solver import SolverError, solution_to_dict, solve_beam

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_ENVIRONMENT = 4


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _add_solve_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ei", type=float, default=None,
                        help="flexural rigidity E*I (overrides --e/--i and the document's section block)")
    parser.add_argument("--e", type=float, default=None, help="Young's modulus")
    parser.add_argument("--i", type=float, default=None, help="second moment of area")
    parser.add_argument("--samples", type=int, default=1000, help="series sample count")
    parser.add_argument("--format", choices=("json", "svg", "text"), default="text",
                        help="artifact format written next to the summary")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--deflection-scale", type=float, default=1.0,
                        help="display multiplier for deflection values")
    parser.add_argument("--deflection-unit", default=None,
                        help="display unit label for scaled deflection")
    parser.add_argument("--deflection-up", action="store_true",
                        help="plot deflection positive-up instead of positive-down")


def _resolve_ei(args) -> float | None:
    if args.ei is not None:
        return args.ei
    if args.e is not None and args.i is not None:
        return args.e * args.i
    if args.e is not None or args.i is not None:
        raise ValueError("--e and --i must be given together")
    return None


def _solve_and_write(beam: ValidatedBeam, spec: BeamSpec, args) -> int:
    try:
        ei = _resolve_ei(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    try:
        solution = solve_beam(beam, ei=ei)
    except SolverError as exc:
        _err(f"solver error: {exc}")
        return EXIT_SOLVER

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    summary = summary_text(solution)
    sys.stdout.write(summary)
    (outdir / "summary.txt").write_text(summary, encoding="utf-8")
    (outdir / "beam.json").write_text(serialize_beam(spec), encoding="utf-8")

    def deflection_series():
        return sample_series(solution, "deflection", args.samples,
                             value_scale=args.deflection_scale,
                             unit_label=args.deflection_unit)

    if args.format == "json":
        (outdir / "solution.json").write_text(_dump(solution_to_dict(solution)),
                                              encoding="utf-8")
        for kind in ("shear", "moment"):
            series = sample_series(solution, kind, args.samples)
            (outdir / f"series_{kind}.json").write_text(_dump(series_to_dict(series)),
                                                        encoding="utf-8")
        (outdir / "series_deflection.json").write_text(
            _dump(series_to_dict(deflection_series())), encoding="utf-8")
    elif args.format == "svg":
        for kind in ("shear", "moment"):
            series = sample_series(solution, kind, args.samples)
            (outdir / f"{kind}.svg").write_text(render_svg(series), encoding="utf-8")
        svg = render_svg(deflection_series(), flip_y=not args.deflection_up)
        (outdir / "deflection.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


def _read_file(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _err(f"cannot read {path}: {exc}")
        return None


def cmd_solve(args) -> int:
    text = _read_file(args.spec_file)
    if text is None:
        return EXIT_ENVIRONMENT
    try:
        spec = deserialize_beam(text)
    except ParseError as exc:
        _err(f"parse error ({exc.code}): {exc}")
        return EXIT_INVALID
    try:
        beam = validate_beam(spec)
    except BeamValidationError as exc:
        for issue in exc.issues:
            _err(f"invalid ({issue.code}) {issue.path}: {issue.message}")
        return EXIT_INVALID
    return _solve_and_write(beam, spec, args)


def cmd_from_detections(args) -> int:
    text = _read_file(args.detections_file)
    if text is None:
        return EXIT_ENVIRONMENT
    try:
        ds = parse_detections(text)
    except ParseError as exc:
        _err(f"parse error ({exc.code}): {exc}")
        return EXIT_INVALID

    options = InferenceOptions(confidence_threshold=args.confidence,
                               iou_threshold=args.iou)
    try:
        report = build_beam_spec(ds, options)
    except InferenceError as exc:
        _err(str(exc))
        return EXIT_INVALID

    if args.review:
        sys.stdout.write(_dump(report_to_dict(report)))
        return EXIT_OK

    for warning in report.warnings:
        _err(warning)
    if report.fatal:
        return EXIT_INVALID
    return _solve_and_write(validate_beam(report.spec), report.spec, args)


def cmd_validate(args) -> int:
    text = _read_file(args.spec_file)
    if text is None:
        return EXIT_ENVIRONMENT
    try:
        spec = deserialize_beam(text)
    except ParseError as exc:
        _err(f"parse error ({exc.code}): {exc}")
        return EXIT_INVALID
    try:
        validate_beam(spec)
    except BeamValidationError as exc:
        for issue in exc.issues:
            _err(f"invalid ({issue.code}) {issue.path}: {issue.message}")
        return EXIT_INVALID
    print("valid")
    return EXIT_OK


def cmd_schema(args) -> int:
    sys.stdout.write(schema_text())
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        sock = socket.create_server(("127.0.0.1", args.port))
    except OSError as exc:
        _err(f"cannot bind port {args.port}: {exc}")
        return EXIT_ENVIRONMENT
    port = sock.getsockname()[1]
    print(f"listening on http://127.0.0.1:{port}", flush=True)

    app = create_app(ui_dir=args.ui_dir, llm_config=config_from_env(os.environ),
                     cors_allow=args.cors_allow or None)
    config = uvicorn.Config(app, log_level="warning")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbs",
                                     description="beam diagrams in, solved beams out")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a beam document")
    p.add_argument("spec_file")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("from-detections", help="infer a beam from detector output, then solve")
    p.add_argument("detections_file")
    p.add_argument("--confidence", type=float, default=0.25, help="confidence threshold")
    p.add_argument("--iou", type=float, default=0.45, help="NMS IoU threshold")
    p.add_argument("--review", action="store_true",
                   help="stop after inference and print the report for human correction")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_from_detections)

    p = sub.add_parser("validate", help="check a beam document against every invariant")
    p.add_argument("spec_file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("schema", help="print the canonical beam document schema")
    p.set_defaults(func=cmd_schema)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", default=None, help="directory with the built UI bundle")
    p.add_argument("--cors-allow", action="append", default=[],
                   help="extra allowed CORS origin (repeatable)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # keep the exit-code contract even for bugs
        _err(f"unexpected error: {type(exc).__name__}: {exc}")
        return EXIT_ENVIRONMENT


if __name__ == "__main__":
    raise SystemExit(main())
