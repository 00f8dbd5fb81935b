"""Detector sidecar ingestion and region-of-interest handling.

Object detection is pluggable: detections arrive as YOLO-format TXT
sidecar files (one `class_id cx cy w h [conf]` line per box, normalized
coordinates), converted to pixel boxes here. A naive ink-bounding-box
fallback keeps ROI extraction runnable without any sidecar.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyBoxError,
    MissingSidecarError,
    ParseError,
    UnknownClassIdError,
)
from .raster import RasterImage

__all__ = [
    "DetectionBox",
    "YoloRecord",
    "put_box",
    "load_yolo_txt",
    "detect_roi",
    "crop_roi",
    "detect_ornaments",
    "detect_dimension_lines",
]

log = logging.getLogger(__name__)

ROI_CLASS_MAP = {0: "drawing"}
LIGHTS_CLASS_MAP = {0: "PL", 1: "CS", 2: "CL", 3: "DL"}

_NORM_EPS = 1e-6
ROI_INK_THRESHOLD = 128
ROI_MARGIN = 5


@dataclass(frozen=True)
class DetectionBox:
    class_label: str
    x1: int
    y1: int
    x2: int
    y2: int
    confidence: float = 1.0

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return max(0, self.width) * max(0, self.height)


@dataclass(frozen=True)
class YoloRecord:
    class_id: int
    cx: float
    cy: float
    w: float
    h: float
    confidence: float | None = None

    def __post_init__(self):
        for c, half in ((self.cx, self.w / 2), (self.cy, self.h / 2)):
            if c - half < -_NORM_EPS or c + half > 1 + _NORM_EPS:
                raise ValueError("normalized box extends outside [0, 1]")


def _round_half_away(v: float) -> int:
    return int(math.floor(v + 0.5)) if v >= 0 else int(math.ceil(v - 0.5))


def put_box(rec: YoloRecord, img_w: int, img_h: int, class_map: dict[int, str]) -> DetectionBox:
    """Convert a normalized center-size record to pixel corner coordinates."""
    if rec.class_id not in class_map:
        raise UnknownClassIdError(f"class id {rec.class_id} not in class map")
    x1 = _round_half_away((rec.cx - rec.w / 2) * img_w)
    y1 = _round_half_away((rec.cy - rec.h / 2) * img_h)
    x2 = _round_half_away((rec.cx + rec.w / 2) * img_w)
    y2 = _round_half_away((rec.cy + rec.h / 2) * img_h)
    clamp = lambda v, hi: min(max(v, 0), hi)
    return DetectionBox(
        class_label=class_map[rec.class_id],
        x1=clamp(x1, img_w),
        y1=clamp(y1, img_h),
        x2=clamp(x2, img_w),
        y2=clamp(y2, img_h),
        confidence=1.0 if rec.confidence is None else rec.confidence,
    )


def load_yolo_txt(path, img_w: int, img_h: int, class_map: dict[int, str]) -> list[DetectionBox]:
    """Parse a YOLO TXT sidecar into pixel boxes, preserving line order."""
    boxes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) not in (5, 6):
                raise ParseError(
                    f"expected 5 or 6 fields, got {len(fields)}", path=path, line=lineno
                )
            try:
                class_id = int(fields[0])
                cx, cy, w, h = (float(v) for v in fields[1:5])
                conf = float(fields[5]) if len(fields) == 6 else None
            except ValueError as exc:
                raise ParseError(str(exc), path=path, line=lineno) from exc
            try:
                rec = YoloRecord(class_id, cx, cy, w, h, conf)
            except ValueError as exc:
                raise ParseError(str(exc), path=path, line=lineno) from exc
            boxes.append(put_box(rec, img_w, img_h, class_map))
    return boxes


def detect_roi(img: RasterImage, sidecar=None) -> DetectionBox:
    """Locate the drawing region.

    With a sidecar, the highest-confidence "drawing" box wins. The
    fallback takes the bounding box of all ink (intensity < 128) plus a
    5-pixel margin; a blank image yields the full frame.
    """
    if sidecar is not None:
        boxes = load_yolo_txt(sidecar, img.width, img.height, ROI_CLASS_MAP)
        drawing = [b for b in boxes if b.class_label == "drawing"]
        if drawing:
            return max(drawing, key=lambda b: b.confidence)
        log.warning("no drawing-class box in %s, using built-in ROI fallback", sidecar)
    ys, xs = np.nonzero(img.pixels < ROI_INK_THRESHOLD)
    if len(xs) == 0:
        return DetectionBox("drawing", 0, 0, img.width, img.height)
    return DetectionBox(
        "drawing",
        max(0, int(xs.min()) - ROI_MARGIN),
        max(0, int(ys.min()) - ROI_MARGIN),
        min(img.width, int(xs.max()) + ROI_MARGIN),
        min(img.height, int(ys.max()) + ROI_MARGIN),
    )


def crop_roi(img: RasterImage, box: DetectionBox) -> tuple[RasterImage, tuple[int, int]]:
    """Copy the box region out of the image; offset maps ROI-local back to full-image."""
    if box.width <= 0 or box.height <= 0:
        raise EmptyBoxError(f"zero-area box {box}")
    sub = img.pixels[box.y1 : box.y2, box.x1 : box.x2].copy()
    return RasterImage(sub), (box.x1, box.y1)


def detect_ornaments(
    sidecar, img_w: int, img_h: int, class_map: dict[int, str] | None = None
) -> list[DetectionBox]:
    """Load ornament ("lights") boxes from a sidecar (labels PL/CS/CL/DL)."""
    if not Path(sidecar).is_file():
        raise MissingSidecarError(f"sidecar not found: {sidecar}")
    return load_yolo_txt(sidecar, img_w, img_h, class_map or LIGHTS_CLASS_MAP)


class _AnyClassMap(dict):
    """Class map that assigns every id the same label."""

    def __init__(self, label: str):
        super().__init__()
        self._label = label

    def __contains__(self, key) -> bool:
        return True

    def __getitem__(self, key) -> str:
        return self._label


def detect_dimension_lines(sidecar, img_w: int, img_h: int) -> list[DetectionBox]:
    """Load dimension-line boxes; every record maps to label "dimline"."""
    if not Path(sidecar).is_file():
        raise MissingSidecarError(f"sidecar not found: {sidecar}")
    return load_yolo_txt(sidecar, img_w, img_h, _AnyClassMap("dimline"))
