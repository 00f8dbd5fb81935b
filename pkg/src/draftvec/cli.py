"""Command-line entry point.

Subcommands: ``convert`` (raster -> CSV/SVG/DXF), ``gen`` (synthetic
drawing + truth JSON), ``eval`` (score predictions against truth).
Exit codes: 0 success, 1 usage/config error, 2 input error, 3 output
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .consolidate import from_csv
from .errors import (
    ConfigError,
    CorruptImageError,
    DraftvecError,
    ParseError,
    SpecInfeasibleError,
    UnsupportedFormatError,
)
from .pipeline import PipelineConfig, run_pipeline
from .raster import save_pgm
from .synth import (
    GenSpec,
    generate,
    match_and_score,
    truth_from_json,
    truth_to_json,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_OUTPUT = 3

CONFIG_ENV_VAR = "DRAFTVEC_CONFIG"

log = logging.getLogger("draftvec")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="draftvec",
        description="Convert scanned engineering drawings into CSV, SVG, and DXF.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="convert raster images to vector outputs")
    conv.add_argument("images", nargs="+", help="input PNG/JPEG/PGM files")
    conv.add_argument("--out", default="out", help="output directory")
    conv.add_argument("--config", help="JSON pipeline config file")
    conv.add_argument("--roi-det", help="ROI YOLO sidecar")
    conv.add_argument("--lights-det", help="lights YOLO sidecar")
    conv.add_argument("--dimline-det", help="dimension-line YOLO sidecar")
    conv.add_argument("--text-det", help="text-region YOLO sidecar")
    conv.add_argument("--ocr-cmd", help="external OCR command")
    conv.add_argument("--ocr-fixture", help="fixture OCR JSON (region index -> text)")
    conv.add_argument("--class-map", help="JSON class map for the lights sidecar")
    conv.add_argument("--dump-stages", help="directory for stage debug rasters")

    gen = sub.add_parser("gen", help="generate a synthetic drawing with ground truth")
    gen.add_argument("--spec", required=True, help="JSON generation spec")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")

    ev = sub.add_parser("eval", help="score predictions against ground truth")
    ev.add_argument("--truth", required=True, help="directory containing truth.json")
    ev.add_argument("--pred", required=True, help="directory of CSV predictions")
    ev.add_argument("--out", help="report directory (default: the --pred directory)")

    return parser


def _load_config(args) -> PipelineConfig:
    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    cfg = PipelineConfig.from_json_file(config_path) if config_path else PipelineConfig()
    overrides = {
        "roi_sidecar": args.roi_det,
        "lights_sidecar": args.lights_det,
        "dimline_sidecar": args.dimline_det,
        "text_sidecar": args.text_det,
        "ocr_cmd": args.ocr_cmd,
        "ocr_fixture": args.ocr_fixture,
        "class_map": args.class_map,
        "dump_stages": args.dump_stages,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _cmd_convert(args) -> int:
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"draftvec: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    worst = EXIT_OK
    for image in args.images:
        stem = Path(image).stem
        out_dir = Path(args.out) / stem
        try:
            run_pipeline(image, cfg, out_dir)
        except (FileNotFoundError, UnsupportedFormatError, CorruptImageError, ParseError) as exc:
            print(f"draftvec: {image}: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_INPUT)
        except OSError as exc:
            print(f"draftvec: {image}: output error: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_OUTPUT)
        except DraftvecError as exc:
            print(f"draftvec: {image}: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_INPUT)
    return worst


def _cmd_gen(args) -> int:
    try:
        spec = GenSpec.from_json(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"draftvec: bad generation spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out)
    try:
        img, truth = generate(spec, args.seed)
    except SpecInfeasibleError as exc:
        print(f"draftvec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        save_pgm(img, out_dir / "image.pgm")
        (out_dir / "truth.json").write_text(
            json.dumps(truth_to_json(truth), indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        print(f"draftvec: output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


def _cmd_eval(args) -> int:
    truth_path = Path(args.truth) / "truth.json"
    try:
        truth = truth_from_json(json.loads(truth_path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"draftvec: cannot read truth: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        detected = from_csv(args.pred)
    except (DraftvecError, OSError) as exc:
        print(f"draftvec: cannot read predictions: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = match_and_score(truth, detected)
    out_dir = Path(args.out) if args.out else Path(args.pred)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(report.render(), encoding="utf-8")
        (out_dir / "report.json").write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        print(f"draftvec: output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(report.render(), end="")
    return EXIT_OK


def cli_main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="draftvec: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command == "convert":
        return _cmd_convert(args)
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "eval":
        return _cmd_eval(args)
    return EXIT_USAGE  # pragma: no cover


def main() -> None:
    sys.exit(cli_main())
