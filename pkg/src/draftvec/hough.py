"""Line and circle detection by parameter-space voting.

Lines use the polar parameterization x*cos(theta) + y*sin(theta) = rho
with theta in [0, pi) and signed rho; finite segments are recovered by
tracing edge support along each peak line. Circles vote a 2-D center
accumulator per radius, steered by the gradient direction.

All trigonometry comes from per-bin lookup tables so results are
bit-identical across runs and independent of pixel iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canny import EdgeMap, GradientField

__all__ = [
    "PolarLine",
    "HoughAccumulator",
    "LineSegment",
    "Circle",
    "HoughParams",
    "accumulate_lines",
    "find_peaks",
    "extract_segments",
    "detect_lines",
    "detect_circles",
]


@dataclass(frozen=True)
class PolarLine:
    rho: float
    theta: float
    votes: int
    rho_index: int = 0
    theta_index: int = 0


@dataclass(frozen=True)
class LineSegment:
    x1: int
    y1: int
    x2: int
    y2: int
    parent: PolarLine | None = None

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)


@dataclass(frozen=True)
class Circle:
    cx: int
    cy: int
    radius: int
    votes: int = 0


@dataclass
class HoughParams:
    rho_resolution: float = 1.0
    theta_resolution: float = math.pi / 180
    line_peak_threshold: int | None = None  # None: max(20, 0.3 * peak cell)
    nms_window: int = 3
    max_gap: float = 5.0
    min_length: float = 20.0
    r_min: int = 8
    r_max: int = 40
    circle_peak_threshold: float = 0.3  # fraction of round(2*pi*r)

    def __post_init__(self):
        if self.rho_resolution <= 0 or self.theta_resolution <= 0:
            raise ValueError("resolutions must be positive")
        if self.r_min > self.r_max:
            raise ValueError("r_min must be <= r_max")
        if not (0 < self.circle_peak_threshold <= 1):
            raise ValueError("circle_peak_threshold must be in (0, 1]")
        if self.nms_window < 1 or self.nms_window % 2 == 0:
            raise ValueError("nms_window must be odd and >= 1")


@dataclass(eq=False)
class HoughAccumulator:
    cells: np.ndarray  # int64, shape (rho_bins, theta_bins)
    rho_resolution: float
    theta_resolution: float
    rho_offset: float  # rho of bin 0 is -rho_offset

    @property
    def rho_bins(self) -> int:
        return self.cells.shape[0]

    @property
    def theta_bins(self) -> int:
        return self.cells.shape[1]

    def rho_of(self, rho_index: int) -> float:
        return rho_index * self.rho_resolution - self.rho_offset

    def theta_of(self, theta_index: int) -> float:
        return theta_index * self.theta_resolution


def _theta_tables(theta_resolution: float):
    n = max(1, int(round(math.pi / theta_resolution)))
    thetas = np.arange(n) * theta_resolution
    return thetas, np.cos(thetas), np.sin(thetas)


def accumulate_lines(edges: EdgeMap, p: HoughParams) -> HoughAccumulator:
    """Vote every edge pixel into each theta column once."""
    diag = math.hypot(edges.width, edges.height)
    _, cos_t, sin_t = _theta_tables(p.theta_resolution)
    theta_bins = len(cos_t)
    rho_bins = int(math.ceil(2 * diag / p.rho_resolution)) + 1
    cells = np.zeros((rho_bins, theta_bins), dtype=np.int64)
    ys, xs = np.nonzero(edges.bits)
    if len(xs) == 0:
        return HoughAccumulator(cells, p.rho_resolution, p.theta_resolution, diag)
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)
    for k in range(theta_bins):
        rho = xs * cos_t[k] + ys * sin_t[k]
        idx = np.floor((rho + diag) / p.rho_resolution + 0.5).astype(np.int64)
        cells[:, k] += np.bincount(idx, minlength=rho_bins)
    return HoughAccumulator(cells, p.rho_resolution, p.theta_resolution, diag)


def find_peaks(acc: HoughAccumulator, threshold: int, nms_window: int = 3) -> list[PolarLine]:
    """Local maxima of the accumulator at or above threshold.

    A cell survives when no window neighbor beats it and every tied
    neighbor is lexicographically later in (rho, theta) index order.
    Result sorted by votes descending, then index ascending.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    r = nms_window // 2
    cells = acc.cells
    peaks = []
    ris, tis = np.nonzero(cells >= threshold)
    for ri, ti in zip(ris.tolist(), tis.tolist()):
        v = cells[ri, ti]
        ok = True
        for nr in range(max(0, ri - r), min(acc.rho_bins, ri + r + 1)):
            for nt in range(max(0, ti - r), min(acc.theta_bins, ti + r + 1)):
                if (nr, nt) == (ri, ti):
                    continue
                nv = cells[nr, nt]
                if nv > v or (nv == v and (nr, nt) < (ri, ti)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            peaks.append(
                PolarLine(
                    rho=acc.rho_of(ri),
                    theta=acc.theta_of(ti),
                    votes=int(v),
                    rho_index=ri,
                    theta_index=ti,
                )
            )
    peaks.sort(key=lambda l: (-l.votes, l.rho_index, l.theta_index))
    return peaks


def extract_segments(edges: EdgeMap, line: PolarLine, p: HoughParams) -> list[LineSegment]:
    """Trace edge support along a peak line into finite segments.

    Edge pixels within perpendicular distance rho_resolution + 0.5 of
    the line (the extra half pixel absorbs rho-bin quantization) are
    ordered by their projection onto the line; runs split where
    consecutive projections are more than max_gap apart, and only runs
    spanning at least min_length survive.
    """
    c, s = math.cos(line.theta), math.sin(line.theta)
    ys, xs = np.nonzero(edges.bits)
    if len(xs) == 0:
        return []
    dist = np.abs(xs * c + ys * s - line.rho)
    sel = dist <= p.rho_resolution + 0.5
    xs, ys = xs[sel], ys[sel]
    if len(xs) == 0:
        return []
    t = -xs * s + ys * c  # position along the line direction (-sin, cos)
    order = np.lexsort((xs, ys, t))
    xs, ys, t = xs[order], ys[order], t[order]
    segments = []
    start = 0
    for i in range(1, len(t) + 1):
        if i == len(t) or t[i] - t[i - 1] > p.max_gap:
            x1, y1 = int(xs[start]), int(ys[start])
            x2, y2 = int(xs[i - 1]), int(ys[i - 1])
            if math.hypot(x2 - x1, y2 - y1) >= p.min_length:
                segments.append(LineSegment(x1, y1, x2, y2, parent=line))
            start = i
    return segments


def _endpoints_close(a: LineSegment, b: LineSegment, tol: float) -> bool:
    d = math.hypot
    same = d(a.x1 - b.x1, a.y1 - b.y1) <= tol and d(a.x2 - b.x2, a.y2 - b.y2) <= tol
    swap = d(a.x1 - b.x2, a.y1 - b.y2) <= tol and d(a.x2 - b.x1, a.y2 - b.y1) <= tol
    return same or swap


def detect_lines(edges: EdgeMap, p: HoughParams) -> list[LineSegment]:
    """Full line path: vote, find peaks, trace, deduplicate."""
    acc = accumulate_lines(edges, p)
    peak_cell = int(acc.cells.max()) if acc.cells.size else 0
    if peak_cell == 0:
        return []
    threshold = p.line_peak_threshold
    if threshold is None:
        threshold = max(20, int(round(0.3 * peak_cell)))
    if peak_cell < threshold:
        return []
    out: list[LineSegment] = []
    for peak in find_peaks(acc, threshold, p.nms_window):
        for seg in extract_segments(edges, peak, p):
            if not any(_endpoints_close(seg, prev, 2.0) for prev in out):
                out.append(seg)
    return out


def _box_sum_3x3(a: np.ndarray) -> np.ndarray:
    """Integer-exact sum of each cell's 3x3 neighborhood (zeros outside)."""
    p = np.pad(a, 1)
    h, w = a.shape
    out = np.zeros_like(a)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            out += p[dy : dy + h, dx : dx + w]
    return out


def _dilate_1px(bits: np.ndarray) -> np.ndarray:
    p = np.pad(bits, 1)
    h, w = bits.shape
    acc = np.zeros_like(bits)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            acc |= p[dy : dy + h, dx : dx + w]
    return acc


def _support(dilated: np.ndarray, cx: int, cy: int, r: int) -> int:
    h, w = dilated.shape
    n = round(2 * math.pi * r)
    hits = 0
    for k in range(n):
        a = 2 * math.pi * k / n
        px = int(math.floor(cx + r * math.cos(a) + 0.5))
        py = int(math.floor(cy + r * math.sin(a) + 0.5))
        if 0 <= px < w and 0 <= py < h and dilated[py, px]:
            hits += 1
    return hits


def perimeter_support(edges: EdgeMap, cx: int, cy: int, r: int) -> int:
    """Perimeter positions (of round(2*pi*r) samples) within 1 px of an edge."""
    return _support(_dilate_1px(edges.bits), cx, cy, r)


def detect_circles(edges: EdgeMap, grad: GradientField, p: HoughParams) -> list[Circle]:
    """Gradient-steered circle detection over radii [r_min, r_max].

    Each edge pixel casts two center votes at +-r along its gradient
    direction. A candidate's vote mass is pooled over the 3x3 center
    neighborhood (gradient-angle error disperses single-cell votes); it
    is accepted when that mass reaches circle_peak_threshold *
    round(2*pi*r) and the same fraction of its perimeter samples lie
    within 1 px of an edge pixel. Centers within r_min of a
    stronger acceptance are suppressed.
    """
    if p.r_min < 3:
        raise ValueError("r_min must be >= 3")
    h, w = edges.bits.shape
    ys, xs = np.nonzero(edges.bits)
    if len(xs) == 0:
        return []
    theta = grad.direction[ys, xs]
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)
    accepted: list[Circle] = []
    for r in range(p.r_min, p.r_max + 1):
        counts = np.zeros((h, w), dtype=np.int64)
        for sign in (1.0, -1.0):
            cx = np.floor(xs + sign * r * cos_t + 0.5).astype(np.int64)
            cy = np.floor(ys + sign * r * sin_t + 0.5).astype(np.int64)
            ok = (cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)
            counts += np.bincount(cy[ok] * w + cx[ok], minlength=h * w).reshape(h, w)
        pooled = _box_sum_3x3(counts)
        need = p.circle_peak_threshold * round(2 * math.pi * r)
        cys, cxs = np.nonzero(pooled >= need)
        for cyi, cxi in zip(cys.tolist(), cxs.tolist()):
            accepted.append(Circle(cx=cxi, cy=cyi, radius=r, votes=int(pooled[cyi, cxi])))
    accepted.sort(key=lambda circ: (-circ.votes, circ.cy, circ.cx, circ.radius))
    dilated = _dilate_1px(edges.bits)
    out: list[Circle] = []
    for cand in accepted:
        if any(
            math.hypot(cand.cx - kept.cx, cand.cy - kept.cy) <= p.r_min for kept in out
        ):
            continue
        need_support = p.circle_peak_threshold * round(2 * math.pi * cand.radius)
        if _support(dilated, cand.cx, cand.cy, cand.radius) >= need_support:
            out.append(cand)
    return out
