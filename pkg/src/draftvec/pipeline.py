"""End-to-end conversion pipeline.

Stage order per image: load -> ROI -> crop -> blur -> gradients ->
suppression -> hysteresis -> lines -> circles -> ornament sidecar ->
dimension-line sidecar -> text detection -> OCR -> CSV + manifest ->
SVG + DXF. All entity coordinates are mapped back to full-image space
through the ROI offset. Missing optional sidecars produce empty entity
lists with a warning, never a failure.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .canny import (
    CannyParams,
    gaussian_blur,
    hysteresis_threshold,
    non_max_suppression,
    sobel_gradients,
)
from .consolidate import DrawingEntitySet, hash_config, to_csv, write_manifest
from .detection import (
    DetectionBox,
    crop_roi,
    detect_dimension_lines,
    detect_ornaments,
    detect_roi,
)
from .errors import ConfigError, MissingSidecarError
from .hough import Circle, HoughParams, LineSegment, detect_circles, detect_lines
from .raster import RasterImage, load_image, save_pgm
from .textex import (
    CommandOcr,
    FixtureOcr,
    TextRegion,
    detect_text_regions,
    recognize_text,
)
from .vectout import to_dxf, to_svg

__all__ = ["PipelineConfig", "run_pipeline"]

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    canny: CannyParams = field(default_factory=CannyParams)
    hough: HoughParams = field(default_factory=HoughParams)
    roi_sidecar: str | None = None
    lights_sidecar: str | None = None
    dimline_sidecar: str | None = None
    text_sidecar: str | None = None
    ocr_cmd: str | None = None
    ocr_fixture: str | None = None
    class_map: str | None = None  # JSON file: id string -> label, for lights
    dump_stages: str | None = None
    seed: int = 0

    @classmethod
    def from_json_file(cls, path) -> "PipelineConfig":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}") from exc
        return cls.from_dict(obj)

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        try:
            canny_p = CannyParams(**obj.get("canny", {}))
            hough_obj = dict(obj.get("hough", {}))
            hough_p = HoughParams(**hough_obj)
            rest = {
                k: v
                for k, v in obj.items()
                if k not in ("canny", "hough")
            }
            unknown = set(rest) - {f.name for f in dataclasses.fields(cls)}
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            return cls(canny=canny_p, hough=hough_p, **rest)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return d

    def config_hash(self) -> str:
        return hash_config(self.to_dict())


def _load_class_map(path) -> dict[int, str] | None:
    if path is None:
        return None
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return {int(k): str(v) for k, v in obj.items()}


def _optional_sidecar(loader, sidecar, what) -> list[DetectionBox]:
    if sidecar is None:
        log.warning("no %s sidecar configured; emitting empty %s list", what, what)
        return []
    try:
        return loader(sidecar)
    except MissingSidecarError:
        log.warning("%s sidecar %s missing; emitting empty %s list", what, sidecar, what)
        return []


def run_pipeline(input_path, cfg: PipelineConfig, out_dir) -> DrawingEntitySet:
    """Convert one raster drawing; writes CSVs, manifest, SVG, DXF to out_dir."""
    input_path = Path(input_path)
    out_dir = Path(out_dir)
    img = load_image(input_path)

    roi_box = detect_roi(img, cfg.roi_sidecar)
    roi, (ox, oy) = crop_roi(img, roi_box)

    blurred = gaussian_blur(roi, cfg.canny.sigma)
    grad = sobel_gradients(blurred)
    nms = non_max_suppression(grad)
    edges = hysteresis_threshold(
        nms, cfg.canny.low_threshold, cfg.canny.high_threshold
    )

    if cfg.dump_stages:
        dump = Path(cfg.dump_stages)
        dump.mkdir(parents=True, exist_ok=True)
        save_pgm(blurred, dump / "01_blur.pgm")
        clip = lambda a: RasterImage(np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8))
        save_pgm(clip(grad.magnitude), dump / "02_magnitude.pgm")
        save_pgm(clip(nms.magnitude), dump / "03_nms.pgm")
        save_pgm(RasterImage(edges.bits.astype(np.uint8) * 255), dump / "04_edges.pgm")

    segments = [
        LineSegment(s.x1 + ox, s.y1 + oy, s.x2 + ox, s.y2 + oy, parent=s.parent)
        for s in detect_lines(edges, cfg.hough)
    ]
    circles = [
        Circle(c.cx + ox, c.cy + oy, c.radius, c.votes)
        for c in detect_circles(edges, nms, cfg.hough)
    ]

    lights_map = _load_class_map(cfg.class_map)
    lights = _optional_sidecar(
        lambda p: detect_ornaments(p, img.width, img.height, lights_map),
        cfg.lights_sidecar,
        "lights",
    )
    dimlines = _optional_sidecar(
        lambda p: detect_dimension_lines(p, img.width, img.height),
        cfg.dimline_sidecar,
        "dimension-line",
    )

    if cfg.text_sidecar is not None:
        text_boxes = detect_text_regions(img, cfg.text_sidecar)
    else:
        text_boxes = [
            DetectionBox(b.class_label, b.x1 + ox, b.y1 + oy, b.x2 + ox, b.y2 + oy)
            for b in detect_text_regions(roi)
        ]

    backend = None
    if cfg.ocr_fixture is not None:
        backend = FixtureOcr(cfg.ocr_fixture)
    elif cfg.ocr_cmd is not None:
        backend = CommandOcr(cfg.ocr_cmd)
    texts = []
    for idx, box in enumerate(text_boxes):
        if backend is None or box.area == 0:
            texts.append(TextRegion(box, "", 0.0))
            continue
        crop = RasterImage(img.pixels[box.y1 : box.y2, box.x1 : box.x2].copy())
        text, conf = recognize_text(crop, backend, idx)
        texts.append(TextRegion(box, text, conf))

    entity_set = DrawingEntitySet(
        lines=segments,
        circles=circles,
        dimension_lines=dimlines,
        lights=lights,
        texts=texts,
        image_width=img.width,
        image_height=img.height,
        source=str(input_path),
    )

    to_csv(entity_set, out_dir)
    write_manifest(entity_set, out_dir, cfg.config_hash())
    (out_dir / "out.svg").write_text(to_svg(entity_set), encoding="utf-8")
    (out_dir / "out.dxf").write_text(to_dxf(entity_set), encoding="utf-8")
    return entity_set
