"""Consolidated entity container and per-entity CSV serialization.

One CSV file per entity class, with fixed headers, integer
coordinates, LF line endings, UTF-8. Emission is a pure function of
the entity set, so identical sets always produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .detection import DetectionBox
from .errors import ParseError
from .hough import Circle, LineSegment
from .textex import TextRegion

__all__ = ["DrawingEntitySet", "to_csv", "from_csv", "write_manifest", "CSV_FILES"]

CSV_FILES = ("circles.csv", "lines.csv", "dimlines.csv", "lights.csv", "text.csv")

_CIRCLE_HEADER = "label,x,y,radius"
_BOX_HEADER = "label,x1,y1,x2,y2"
_TEXT_HEADER = "label,x1,y1,x2,y2,text"


@dataclass
class DrawingEntitySet:
    """Everything recovered from one drawing, in full-image coordinates."""

    lines: list[LineSegment] = field(default_factory=list)
    circles: list[Circle] = field(default_factory=list)
    dimension_lines: list[DetectionBox] = field(default_factory=list)
    lights: list[DetectionBox] = field(default_factory=list)
    texts: list[TextRegion] = field(default_factory=list)
    image_width: int = 0
    image_height: int = 0
    source: str = ""

    def counts(self) -> dict[str, int]:
        return {
            "lines": len(self.lines),
            "circles": len(self.circles),
            "dimension_lines": len(self.dimension_lines),
            "lights": len(self.lights),
            "texts": len(self.texts),
        }


def _int(v) -> int:
    f = float(v)
    return int(math.floor(f + 0.5)) if f >= 0 else int(math.ceil(f - 0.5))


def _quote(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def to_csv(entity_set: DrawingEntitySet, out_dir) -> list[Path]:
    """Write the five per-entity CSV files; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "circles.csv": [_CIRCLE_HEADER]
        + [f"Circle,{_int(c.cx)},{_int(c.cy)},{_int(c.radius)}" for c in entity_set.circles],
        "lines.csv": [_BOX_HEADER]
        + [
            f"Line,{_int(l.x1)},{_int(l.y1)},{_int(l.x2)},{_int(l.y2)}"
            for l in entity_set.lines
        ],
        "dimlines.csv": [_BOX_HEADER]
        + [
            f"Dimension Line,{_int(d.x1)},{_int(d.y1)},{_int(d.x2)},{_int(d.y2)}"
            for d in entity_set.dimension_lines
        ],
        "lights.csv": [_BOX_HEADER]
        + [
            f"{b.class_label},{_int(b.x1)},{_int(b.y1)},{_int(b.x2)},{_int(b.y2)}"
            for b in entity_set.lights
        ],
        "text.csv": [_TEXT_HEADER]
        + [
            f"Text,{_int(t.box.x1)},{_int(t.box.y1)},{_int(t.box.x2)},{_int(t.box.y2)},"
            + _quote(t.text)
            for t in entity_set.texts
        ],
    }
    written = []
    for name, rows in files.items():
        path = out_dir / name
        path.write_bytes(("\n".join(rows) + "\n").encode("utf-8"))
        written.append(path)
    return written


def _split_row(row: str, path, lineno: int, n_coords: int, with_text: bool):
    if with_text:
        parts = row.split(",", 1 + n_coords)
        if len(parts) != 2 + n_coords:
            raise ParseError(f"expected {2 + n_coords} columns", path=path, line=lineno)
        text = parts[-1]
        if not (len(text) >= 2 and text.startswith('"') and text.endswith('"')):
            raise ParseError("text column must be double-quoted", path=path, line=lineno)
        text = text[1:-1].replace('""', '"')
    else:
        parts = row.split(",")
        if len(parts) != 1 + n_coords:
            raise ParseError(f"expected {1 + n_coords} columns", path=path, line=lineno)
        text = None
    label = parts[0]
    try:
        coords = [int(v) for v in parts[1 : 1 + n_coords]]
    except ValueError as exc:
        raise ParseError(f"non-integer coordinate: {exc}", path=path, line=lineno) from exc
    return label, coords, text


def _read_rows(path: Path, expected_header: str):
    content = path.read_text(encoding="utf-8")
    lines = content.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != expected_header:
        raise ParseError(f"expected header {expected_header!r}", path=path, line=1)
    return lines[1:]


def from_csv(directory) -> DrawingEntitySet:
    """Parse a to_csv output directory back into an entity set.

    Missing files yield empty lists; manifest.json, when present,
    restores image dimensions and the source path.
    """
    directory = Path(directory)
    out = DrawingEntitySet()
    p = directory / "circles.csv"
    if p.is_file():
        for i, row in enumerate(_read_rows(p, _CIRCLE_HEADER), start=2):
            _, (x, y, r), _ = _split_row(row, p, i, 3, False)
            out.circles.append(Circle(x, y, r))
    p = directory / "lines.csv"
    if p.is_file():
        for i, row in enumerate(_read_rows(p, _BOX_HEADER), start=2):
            _, (x1, y1, x2, y2), _ = _split_row(row, p, i, 4, False)
            out.lines.append(LineSegment(x1, y1, x2, y2))
    p = directory / "dimlines.csv"
    if p.is_file():
        for i, row in enumerate(_read_rows(p, _BOX_HEADER), start=2):
            _, (x1, y1, x2, y2), _ = _split_row(row, p, i, 4, False)
            out.dimension_lines.append(DetectionBox("dimline", x1, y1, x2, y2))
    p = directory / "lights.csv"
    if p.is_file():
        for i, row in enumerate(_read_rows(p, _BOX_HEADER), start=2):
            label, (x1, y1, x2, y2), _ = _split_row(row, p, i, 4, False)
            out.lights.append(DetectionBox(label, x1, y1, x2, y2))
    p = directory / "text.csv"
    if p.is_file():
        for i, row in enumerate(_read_rows(p, _TEXT_HEADER), start=2):
            _, (x1, y1, x2, y2), text = _split_row(row, p, i, 4, True)
            out.texts.append(TextRegion(DetectionBox("text", x1, y1, x2, y2), text, 1.0))
    manifest = directory / "manifest.json"
    if manifest.is_file():
        meta = json.loads(manifest.read_text(encoding="utf-8"))
        out.image_width = int(meta.get("image_width", 0))
        out.image_height = int(meta.get("image_height", 0))
        out.source = str(meta.get("source", ""))
    return out


def write_manifest(entity_set: DrawingEntitySet, out_dir, config_hash: str = "") -> Path:
    """JSON manifest: source, dimensions, per-entity counts, config hash."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "source": entity_set.source,
        "image_width": entity_set.image_width,
        "image_height": entity_set.image_height,
        "counts": entity_set.counts(),
        "config_hash": config_hash,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def hash_config(obj) -> str:
    """Stable hash of a JSON-serializable configuration."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]
