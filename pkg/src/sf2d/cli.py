"""Command line entry point: ``sf2d synth | analyze | render``.

Exit codes: 0 on success, 2 for bad input (arguments, spec, files, lag
range), 3 when the output location cannot be written.

The thread count used by the FFT engine may be set with the ``SF2D_WORKERS``
environment variable; outputs do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .analysis import ANGLE_CONVENTION, AnalysisConfig, analyze
from .errors import NoEstimateError, ParameterError
from .io import (
    file_sha256,
    read_field,
    read_map,
    render_map,
    write_field,
    write_json,
    write_polar,
    write_statmap,
    write_transect,
)
from .statmaps import STATISTICS
from .synth import SynthSpec, generate

EXIT_INPUT = 2
EXIT_OUTPUT = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _workers():
    value = os.environ.get("SF2D_WORKERS")
    return int(value) if value else None


def cmd_synth(args) -> None:
    try:
        spec = SynthSpec.from_json(Path(args.spec).read_text())
    except FileNotFoundError:
        raise CliError(f"spec file not found: {args.spec}") from None
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad spec: {exc}") from None
    field = generate(spec)
    try:
        write_field(args.out, field)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_OUTPUT) from None


def _report(analysis, in_path: Path) -> dict:
    field = analysis.field
    roll = analysis.roll.to_dict()
    swell = analysis.swell
    return {
        "tool": {"name": "sf2d", "version": __version__},
        "input": {
            "file": in_path.name,
            "sha256": file_sha256(in_path),
            "width": field.width,
            "height": field.height,
            "pixel_size_m": field.pixel_size,
            "valid_fraction": field.n_valid / (field.width * field.height),
        },
        "config": analysis.config.to_dict(),
        "angle_convention": ANGLE_CONVENTION,
        "field_variance": analysis.statmaps.field_variance,
        "rolls": roll,
        "swell": None if swell is None else swell.__dict__,
        "wind_dir": analysis.config.wind_dir,
    }


def cmd_analyze(args) -> None:
    in_path = Path(args.in_path)
    try:
        field = read_field(in_path)
    except FileNotFoundError as exc:
        raise CliError(f"input not found: {exc.filename}") from None
    config = AnalysisConfig(
        max_lag=args.max_lag,
        step=args.step,
        min_count=args.min_count,
        engine=args.engine,
        n_theta=args.ntheta,
        lowpass=args.lowpass,
        wind_dir=args.wind_dir,
        workers=_workers(),
    )
    try:
        result = analyze(field, config)
    except NoEstimateError as exc:
        raise CliError(f"no estimate: {exc}") from None

    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        sm = result.statmaps
        for stat in STATISTICS + ("counts",):
            write_statmap(out / f"{stat}.f32", sm, stat)
        for stat in STATISTICS:
            write_polar(out / f"{stat}_polar.f32", result.polar[stat])
        for (stat, name), tr in result.transects().items():
            write_transect(out / f"transect_{stat}_{name}.csv", tr)
        write_json(out / "report.json", _report(result, in_path))
    except OSError as exc:
        raise CliError(f"cannot write to {out}: {exc}", EXIT_OUTPUT) from None


def cmd_render(args) -> None:
    try:
        data, header = read_map(args.in_path)
    except FileNotFoundError as exc:
        raise CliError(f"input not found: {exc.filename}") from None
    except (KeyError, TypeError) as exc:
        raise CliError(f"bad map header: {exc}") from None
    mark = args.mark_center and header.get("kind", "cartesian") == "cartesian"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            render_map(data, args.out, header.get("statistic"), args.cmap, mark)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}", EXIT_OUTPUT) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be finite")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sf2d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sf2d {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic field from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="structure-function maps and roll report")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--max-lag", type=int, default=60)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--min-count", type=int, default=1000)
    p.add_argument("--engine", choices=("fft", "direct"), default="fft")
    p.add_argument("--ntheta", type=int, default=72)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lowpass", type=_finite_float, default=None, metavar="METERS")
    p.add_argument("--wind-dir", type=_finite_float, default=None, metavar="RAD")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="heatmap PNG of a map file")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cmap", default=None)
    p.add_argument("--mark-center", action="store_true")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"sf2d {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (ParameterError, json.JSONDecodeError) as exc:
        print(f"sf2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
