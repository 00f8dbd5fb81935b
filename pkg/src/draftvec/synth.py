"""Synthetic drawing generation and detection scoring.

``generate`` renders black-on-white drawings with exactly known
geometry (Bresenham segments, midpoint circles with 2 px stroke,
bordered light boxes, 5x7 bitmap text), optionally degraded by seeded
Gaussian noise. ``match_and_score`` compares a detected entity set
against that ground truth with greedy one-to-one matching and renders
a count-style report table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .consolidate import DrawingEntitySet
from .detection import DetectionBox, LIGHTS_CLASS_MAP
from .errors import SpecInfeasibleError
from .font5x7 import GLYPHS, GLYPH_HEIGHT, GLYPH_WIDTH
from .hough import Circle, LineSegment
from .raster import RasterImage
from .textex import TextRegion, character_accuracy

__all__ = [
    "GenSpec",
    "GroundTruth",
    "Tolerances",
    "ClassScore",
    "EvalReport",
    "generate",
    "match_and_score",
    "run_benchmark",
]

_MAX_ATTEMPTS = 10_000
_TEXT_CHARSET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass
class GenSpec:
    """Entity counts (inclusive min/max ranges) and placement ranges."""

    width: int = 800
    height: int = 600
    circles: tuple[int, int] = (0, 0)
    segments: tuple[int, int] = (0, 0)
    lights: tuple[int, int] = (0, 0)
    dimlines: tuple[int, int] = (0, 0)
    texts: tuple[int, int] = (0, 0)
    radius_range: tuple[int, int] = (8, 40)
    segment_length_range: tuple[int, int] = (30, 100)
    light_size_range: tuple[int, int] = (12, 30)
    text_length: int = 14
    text_scale: int = 2
    noise_sigma: float = 0.0

    @classmethod
    def from_json(cls, obj: dict) -> "GenSpec":
        kwargs = {}
        for f in cls.__dataclass_fields__:
            if f in obj:
                v = obj[f]
                kwargs[f] = tuple(v) if isinstance(v, list) else v
        return cls(**kwargs)


@dataclass
class GroundTruth:
    entities: DrawingEntitySet
    noise_sigma: float
    seed: int


@dataclass
class Tolerances:
    circle_center: float = 2.0
    circle_radius: float = 2.0
    segment_endpoint: float = 3.0
    box_iou: float = 0.5


def _draw_segment(canvas, x1, y1, x2, y2):
    """Bresenham line rasterization."""
    dx, dy = abs(x2 - x1), -abs(y2 - y1)
    sx = 1 if x1 < x2 else -1
    sy = 1 if y1 < y2 else -1
    err = dx + dy
    x, y = x1, y1
    while True:
        canvas[y, x] = 0
        if x == x2 and y == y2:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def _draw_midpoint_circle(canvas, cx, cy, r):
    x, y = r, 0
    err = 1 - r
    while x >= y:
        for dx, dy in (
            (x, y), (y, x), (-y, x), (-x, y), (-x, -y), (-y, -x), (y, -x), (x, -y),
        ):
            canvas[cy + dy, cx + dx] = 0
        y += 1
        if err < 0:
            err += 2 * y + 1
        else:
            x -= 1
            err += 2 * (y - x) + 1


def _draw_circle_stroked(canvas, cx, cy, r):
    """2 px stroke: midpoint circles at r and r-1."""
    _draw_midpoint_circle(canvas, cx, cy, r)
    if r > 1:
        _draw_midpoint_circle(canvas, cx, cy, r - 1)


def _draw_light_box(canvas, x1, y1, x2, y2):
    """Rectangle with a 3 px filled border."""
    canvas[y1:y2, x1:x2] = 0
    iy1, iy2 = y1 + 3, y2 - 3
    ix1, ix2 = x1 + 3, x2 - 3
    if iy2 > iy1 and ix2 > ix1:
        canvas[iy1:iy2, ix1:ix2] = 255


def _draw_text(canvas, x, y, text, scale):
    for i, ch in enumerate(text):
        rows = GLYPHS.get(ch, GLYPHS[" "])
        gx = x + i * (GLYPH_WIDTH + 1) * scale
        for ry, bits in enumerate(rows):
            for rx in range(GLYPH_WIDTH):
                if bits & (1 << (GLYPH_WIDTH - 1 - rx)):
                    canvas[
                        y + ry * scale : y + (ry + 1) * scale,
                        gx + rx * scale : gx + (rx + 1) * scale,
                    ] = 0


def _text_box_size(length: int, scale: int) -> tuple[int, int]:
    w = (length * (GLYPH_WIDTH + 1) - 1) * scale
    return w, GLYPH_HEIGHT * scale


class _Placer:
    """Rejection sampler with a global attempt budget."""

    def __init__(self, rng, spec):
        self.rng = rng
        self.spec = spec
        self.attempts = 0
        self.circles: list[Circle] = []
        self.boxes: list[tuple[int, int, int, int]] = []

    def _spend(self):
        self.attempts += 1
        if self.attempts > _MAX_ATTEMPTS:
            raise SpecInfeasibleError(
                f"could not place entities within {_MAX_ATTEMPTS} attempts"
            )

    def place_circle(self) -> Circle:
        r_lo, r_hi = self.spec.radius_range
        while True:
            self._spend()
            r = int(self.rng.integers(r_lo, r_hi + 1))
            margin = r + 3
            if 2 * margin >= min(self.spec.width, self.spec.height):
                continue
            cx = int(self.rng.integers(margin, self.spec.width - margin))
            cy = int(self.rng.integers(margin, self.spec.height - margin))
            # >= 5 px separation between perimeters
            if all(
                math.hypot(cx - c.cx, cy - c.cy) >= r + c.radius + 5 for c in self.circles
            ):
                c = Circle(cx, cy, r)
                self.circles.append(c)
                return c

    def place_box(self, bw: int, bh: int) -> tuple[int, int, int, int]:
        while True:
            self._spend()
            if bw + 2 >= self.spec.width or bh + 2 >= self.spec.height:
                continue
            x1 = int(self.rng.integers(1, self.spec.width - bw - 1))
            y1 = int(self.rng.integers(1, self.spec.height - bh - 1))
            box = (x1, y1, x1 + bw, y1 + bh)
            if all(
                box[2] + 5 <= o[0] or o[2] + 5 <= box[0] or box[3] + 5 <= o[1] or o[3] + 5 <= box[1]
                for o in self.boxes
            ) and all(
                not (
                    box[0] - 5 <= c.cx + c.radius
                    and c.cx - c.radius <= box[2] + 5
                    and box[1] - 5 <= c.cy + c.radius
                    and c.cy - c.radius <= box[3] + 5
                )
                for c in self.circles
            ):
                self.boxes.append(box)
                return box


def generate(spec: GenSpec, seed: int) -> tuple[RasterImage, GroundTruth]:
    """Render a synthetic drawing plus its exact ground truth."""
    rng = np.random.default_rng(seed)
    canvas = np.full((spec.height, spec.width), 255, dtype=np.uint8)
    placer = _Placer(rng, spec)
    truth = DrawingEntitySet(
        image_width=spec.width, image_height=spec.height, source=f"synthetic:{seed}"
    )

    n_circles = int(rng.integers(spec.circles[0], spec.circles[1] + 1))
    n_segments = int(rng.integers(spec.segments[0], spec.segments[1] + 1))
    n_lights = int(rng.integers(spec.lights[0], spec.lights[1] + 1))
    n_dimlines = int(rng.integers(spec.dimlines[0], spec.dimlines[1] + 1))
    n_texts = int(rng.integers(spec.texts[0], spec.texts[1] + 1))

    for _ in range(n_circles):
        c = placer.place_circle()
        _draw_circle_stroked(canvas, c.cx, c.cy, c.radius)
        truth.circles.append(c)

    for _ in range(n_segments):
        lo, hi = spec.segment_length_range
        for _ in range(_MAX_ATTEMPTS):
            placer._spend()
            length = float(rng.integers(lo, hi + 1))
            angle = float(rng.uniform(0, math.pi))
            x1 = int(rng.integers(1, spec.width - 1))
            y1 = int(rng.integers(1, spec.height - 1))
            x2 = int(round(x1 + length * math.cos(angle)))
            y2 = int(round(y1 + length * math.sin(angle)))
            if 0 <= x2 < spec.width and 0 <= y2 < spec.height:
                seg = LineSegment(x1, y1, x2, y2)
                _draw_segment(canvas, x1, y1, x2, y2)
                truth.lines.append(seg)
                break

    labels = sorted(LIGHTS_CLASS_MAP.values())
    for _ in range(n_lights):
        lo, hi = spec.light_size_range
        bw = int(rng.integers(lo, hi + 1))
        bh = int(rng.integers(lo, hi + 1))
        x1, y1, x2, y2 = placer.place_box(bw, bh)
        label = labels[int(rng.integers(0, len(labels)))]
        _draw_light_box(canvas, x1, y1, x2, y2)
        truth.lights.append(DetectionBox(label, x1, y1, x2, y2))

    for _ in range(n_dimlines):
        x1, y1, x2, y2 = placer.place_box(
            int(rng.integers(20, 80)), int(rng.integers(5, 25))
        )
        _draw_segment(canvas, x1, y1, x2, y2)
        truth.dimension_lines.append(DetectionBox("dimline", x1, y1, x2, y2))

    for _ in range(n_texts):
        text = "".join(
            _TEXT_CHARSET[int(rng.integers(0, len(_TEXT_CHARSET)))]
            for _ in range(spec.text_length)
        )
        bw, bh = _text_box_size(spec.text_length, spec.text_scale)
        x1, y1, x2, y2 = placer.place_box(bw, bh)
        _draw_text(canvas, x1, y1, text, spec.text_scale)
        truth.texts.append(
            TextRegion(DetectionBox("text", x1, y1, x2, y2), text, 1.0)
        )

    if spec.noise_sigma > 0:
        noise = rng.normal(0.0, spec.noise_sigma, canvas.shape)
        canvas = np.clip(np.floor(canvas + noise + 0.5), 0, 255).astype(np.uint8)

    return RasterImage(canvas), GroundTruth(truth, spec.noise_sigma, seed)


# ---------------------------------------------------------------------------
# Scoring


@dataclass
class ClassScore:
    name: str
    truth_count: int
    detected_count: int
    matched_count: int

    @property
    def precision(self) -> float:
        return 1.0 if self.detected_count == 0 else self.matched_count / self.detected_count

    @property
    def recall(self) -> float:
        return 1.0 if self.truth_count == 0 else self.matched_count / self.truth_count


@dataclass
class EvalReport:
    rows: list[ClassScore]
    text_accuracy: float

    def row(self, name: str) -> ClassScore:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def render(self) -> str:
        """Aligned count table: component, ground truth, detected."""
        table = [("S.No", "Component", "Ground Truth", "Detected")]
        display = {
            "Circles": "No. of Circles",
            "Ornaments": "No. of Ornaments",
            "Dimension Lines": "No. of Dimension Lines",
            "Text Regions": "No. of Text Regions",
        }
        for i, r in enumerate(self.rows, start=1):
            table.append(
                (f"{i}.", display.get(r.name, r.name), str(r.truth_count), str(r.detected_count))
            )
        table.append(
            (
                f"{len(self.rows) + 1}.",
                "Accuracy of Text",
                "100%",
                f"{round(self.text_accuracy * 100)}%",
            )
        )
        widths = [max(len(row[i]) for row in table) for i in range(4)]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in table
        ]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "class": r.name,
                    "truth_count": r.truth_count,
                    "detected_count": r.detected_count,
                    "matched_count": r.matched_count,
                    "precision": r.precision,
                    "recall": r.recall,
                }
                for r in self.rows
            ],
            "text_accuracy": self.text_accuracy,
        }


def _greedy_match(pairs: list[tuple[float, int, int]], n_truth: int, n_det: int) -> list[tuple[int, int]]:
    """One-to-one matching in ascending cost order; ties by index."""
    pairs = sorted(pairs)
    used_t = [False] * n_truth
    used_d = [False] * n_det
    matches = []
    for _, i, j in pairs:
        if not used_t[i] and not used_d[j]:
            used_t[i] = True
            used_d[j] = True
            matches.append((i, j))
    return matches


def match_circles(truth: list[Circle], detected: list[Circle], tol: Tolerances):
    pairs = []
    for i, t in enumerate(truth):
        for j, d in enumerate(detected):
            dist = math.hypot(t.cx - d.cx, t.cy - d.cy)
            if dist <= tol.circle_center and abs(t.radius - d.radius) <= tol.circle_radius:
                pairs.append((dist, i, j))
    return _greedy_match(pairs, len(truth), len(detected))


def segment_distance(a: LineSegment, b: LineSegment) -> float:
    """Max endpoint distance under the better of the two endpoint pairings."""
    d = math.hypot
    same = max(d(a.x1 - b.x1, a.y1 - b.y1), d(a.x2 - b.x2, a.y2 - b.y2))
    swap = max(d(a.x1 - b.x2, a.y1 - b.y2), d(a.x2 - b.x1, a.y2 - b.y1))
    return min(same, swap)


def match_segments(truth: list[LineSegment], detected: list[LineSegment], tol: Tolerances):
    pairs = []
    for i, t in enumerate(truth):
        for j, d in enumerate(detected):
            dist = segment_distance(t, d)
            if dist <= tol.segment_endpoint:
                pairs.append((dist, i, j))
    return _greedy_match(pairs, len(truth), len(detected))


def box_iou(a: DetectionBox, b: DetectionBox) -> float:
    ix = max(0, min(a.x2, b.x2) - max(a.x1, b.x1))
    iy = max(0, min(a.y2, b.y2) - max(a.y1, b.y1))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def match_boxes(truth: list[DetectionBox], detected: list[DetectionBox], tol: Tolerances):
    pairs = []
    for i, t in enumerate(truth):
        for j, d in enumerate(detected):
            iou = box_iou(t, d)
            if iou >= tol.box_iou:
                pairs.append((-iou, i, j))
    return _greedy_match(pairs, len(truth), len(detected))


def match_and_score(
    truth: GroundTruth, detected: DrawingEntitySet, tol: Tolerances | None = None
) -> EvalReport:
    """Score a detection run against ground truth, one row per class."""
    tol = tol or Tolerances()
    t = truth.entities
    circle_m = match_circles(t.circles, detected.circles, tol)
    light_m = match_boxes(t.lights, detected.lights, tol)
    dim_m = match_boxes(t.dimension_lines, detected.dimension_lines, tol)
    text_m = match_boxes([r.box for r in t.texts], [r.box for r in detected.texts], tol)

    if t.texts:
        if text_m:
            acc = sum(
                character_accuracy(detected.texts[j].text, t.texts[i].text)
                for i, j in text_m
            ) / len(text_m)
        else:
            acc = 0.0
    else:
        acc = 1.0

    rows = [
        ClassScore("Circles", len(t.circles), len(detected.circles), len(circle_m)),
        ClassScore("Ornaments", len(t.lights), len(detected.lights), len(light_m)),
        ClassScore(
            "Dimension Lines",
            len(t.dimension_lines),
            len(detected.dimension_lines),
            len(dim_m),
        ),
        ClassScore("Text Regions", len(t.texts), len(detected.texts), len(text_m)),
    ]
    return EvalReport(rows, acc)


def aggregate_reports(reports: list[EvalReport]) -> EvalReport:
    """Micro-average: sum counts across reports; text accuracy weighted by matches."""
    if not reports:
        return EvalReport(
            [
                ClassScore(name, 0, 0, 0)
                for name in ("Circles", "Ornaments", "Dimension Lines", "Text Regions")
            ],
            1.0,
        )
    names = [r.name for r in reports[0].rows]
    rows = []
    for k, name in enumerate(names):
        rows.append(
            ClassScore(
                name,
                sum(r.rows[k].truth_count for r in reports),
                sum(r.rows[k].detected_count for r in reports),
                sum(r.rows[k].matched_count for r in reports),
            )
        )
    text_weight = sum(r.row("Text Regions").matched_count for r in reports)
    if text_weight:
        acc = (
            sum(r.text_accuracy * r.row("Text Regions").matched_count for r in reports)
            / text_weight
        )
    else:
        acc = 1.0
    return EvalReport(rows, acc)


def truth_to_json(truth: GroundTruth) -> dict:
    e = truth.entities
    return {
        "image_width": e.image_width,
        "image_height": e.image_height,
        "source": e.source,
        "lines": [[s.x1, s.y1, s.x2, s.y2] for s in e.lines],
        "circles": [[c.cx, c.cy, c.radius] for c in e.circles],
        "dimension_lines": [[b.x1, b.y1, b.x2, b.y2] for b in e.dimension_lines],
        "lights": [[b.class_label, b.x1, b.y1, b.x2, b.y2] for b in e.lights],
        "texts": [[t.box.x1, t.box.y1, t.box.x2, t.box.y2, t.text] for t in e.texts],
        "noise_sigma": truth.noise_sigma,
        "seed": truth.seed,
    }


def truth_from_json(obj: dict) -> GroundTruth:
    e = DrawingEntitySet(
        lines=[LineSegment(*v) for v in obj.get("lines", [])],
        circles=[Circle(*v) for v in obj.get("circles", [])],
        dimension_lines=[
            DetectionBox("dimline", *v) for v in obj.get("dimension_lines", [])
        ],
        lights=[DetectionBox(v[0], *v[1:]) for v in obj.get("lights", [])],
        texts=[
            TextRegion(DetectionBox("text", *v[:4]), v[4], 1.0)
            for v in obj.get("texts", [])
        ],
        image_width=obj.get("image_width", 0),
        image_height=obj.get("image_height", 0),
        source=obj.get("source", ""),
    )
    return GroundTruth(e, obj.get("noise_sigma", 0.0), obj.get("seed", 0))


def run_benchmark(
    n_images: int, spec: GenSpec, seeds: list[int], cfg, workdir
) -> tuple[EvalReport, list[EvalReport]]:
    """generate -> run_pipeline -> match_and_score per image, then micro-average."""
    from pathlib import Path

    from .pipeline import run_pipeline
    from .raster import save_pgm

    workdir = Path(workdir)
    per_image = []
    for k in range(n_images):
        seed = seeds[k % len(seeds)] if seeds else k
        img, truth = generate(spec, seed)
        img_dir = workdir / f"img_{k:04d}"
        img_dir.mkdir(parents=True, exist_ok=True)
        img_path = img_dir / "input.pgm"
        save_pgm(img, img_path)
        (img_dir / "truth.json").write_text(
            json.dumps(truth_to_json(truth), indent=2) + "\n", encoding="utf-8"
        )
        detected = run_pipeline(img_path, cfg, img_dir / "out")
        per_image.append(match_and_score(truth, detected))
    return aggregate_reports(per_image), per_image
