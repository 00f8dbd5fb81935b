"""Text-region detection, cropping, and pluggable OCR.

The OCR engine is external by design: a command backend receives the
path of a PGM crop as its last argument and prints the recognized text
on stdout, exit 0 on success. A fixture backend maps region index to
string from a JSON file for deterministic tests.
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .detection import DetectionBox, _AnyClassMap, load_yolo_txt
from .errors import BackendFailureError, EmptyTruthError
from .raster import RasterImage, save_pgm

__all__ = [
    "TextRegion",
    "TextDetectParams",
    "detect_text_regions",
    "recognize_text",
    "character_accuracy",
    "FixtureOcr",
    "CommandOcr",
]

log = logging.getLogger(__name__)

INK_THRESHOLD = 128


@dataclass(frozen=True)
class TextRegion:
    box: DetectionBox
    text: str
    confidence: float


@dataclass
class TextDetectParams:
    min_height: int = 4
    max_height: int = 40
    min_aspect: float = 0.1
    max_aspect: float = 20.0


def _boxes_mergeable(a: DetectionBox, b: DetectionBox) -> bool:
    # Vertical spans must overlap; horizontal gap at most the taller box.
    if min(a.y2, b.y2) <= max(a.y1, b.y1):
        return False
    gap = max(a.x1, b.x1) - min(a.x2, b.x2)
    return gap <= max(a.height, b.height)


def detect_text_regions(
    img: RasterImage, sidecar=None, params: TextDetectParams | None = None
) -> list[DetectionBox]:
    """Find text-like boxes, via sidecar or a connected-component heuristic.

    Built-in path: 8-connected ink components sized like glyphs are
    merged with horizontally adjacent neighbors and returned in reading
    order (top-to-bottom, then left-to-right).
    """
    if sidecar is not None:
        return load_yolo_txt(sidecar, img.width, img.height, _AnyClassMap("text"))
    p = params or TextDetectParams()
    ink = img.pixels < INK_THRESHOLD
    labels, n = ndimage.label(ink, structure=np.ones((3, 3), dtype=int))
    boxes = []
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        y1, y2 = sl[0].start, sl[0].stop
        x1, x2 = sl[1].start, sl[1].stop
        h, w = y2 - y1, x2 - x1
        if not (p.min_height <= h <= p.max_height):
            continue
        if not (p.min_aspect <= w / h <= p.max_aspect):
            continue
        boxes.append(DetectionBox("text", x1, y1, x2, y2))
    # Merge until no horizontally adjacent pair remains.
    merged = True
    while merged:
        merged = False
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if _boxes_mergeable(boxes[i], boxes[j]):
                    a, b = boxes[i], boxes[j]
                    union = DetectionBox(
                        "text",
                        min(a.x1, b.x1),
                        min(a.y1, b.y1),
                        max(a.x2, b.x2),
                        max(a.y2, b.y2),
                    )
                    boxes[i] = union
                    del boxes[j]
                    merged = True
                    break
            if merged:
                break
    boxes.sort(key=lambda b: (b.y1, b.x1))
    return boxes


class FixtureOcr:
    """Deterministic backend: region index -> string, loaded from JSON."""

    def __init__(self, source):
        if isinstance(source, dict):
            mapping = source
        else:
            mapping = json.loads(Path(source).read_text(encoding="utf-8"))
        self.mapping = {int(k): str(v) for k, v in mapping.items()}

    def recognize(self, crop: RasterImage, region_index: int) -> tuple[str, float]:
        if region_index not in self.mapping:
            raise BackendFailureError(f"fixture has no entry for region {region_index}")
        return self.mapping[region_index], 1.0


class CommandOcr:
    """External-command backend: `cmd <crop.pgm>` -> text on stdout."""

    def __init__(self, command: str):
        self.argv = shlex.split(command)

    def recognize(self, crop: RasterImage, region_index: int) -> tuple[str, float]:
        with tempfile.TemporaryDirectory(prefix="draftvec-ocr-") as tmp:
            crop_path = Path(tmp) / "crop.pgm"
            save_pgm(crop, crop_path)
            try:
                proc = subprocess.run(
                    self.argv + [str(crop_path)],
                    capture_output=True,
                    text=True,
                    check=False,
                )
            except OSError as exc:
                raise BackendFailureError(str(exc)) from exc
        if proc.returncode != 0:
            raise BackendFailureError(
                f"backend exited {proc.returncode}: {proc.stderr.strip()}"
            )
        return proc.stdout, 1.0


def recognize_text(crop: RasterImage, backend, region_index: int = 0) -> tuple[str, float]:
    """Run the backend on one crop; failures degrade to empty text."""
    try:
        text, conf = backend.recognize(crop, region_index)
    except BackendFailureError as exc:
        log.warning("OCR backend failed on region %d: %s", region_index, exc)
        return "", 0.0
    return text.strip(), conf


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def character_accuracy(recognized: str, truth: str) -> float:
    """1 - normalized edit distance, clamped to [0, 1]."""
    if not truth:
        raise EmptyTruthError("ground-truth string is empty")
    d = levenshtein(recognized, truth)
    return max(0.0, min(1.0, 1.0 - d / max(len(recognized), len(truth))))
