"""Four-stage Canny edge detector.

Stages are exposed individually (blur, gradients, suppression,
hysteresis) so each can be validated on its own; ``canny`` is their
composition. Magnitudes stay in floating point between the gradient
stage and hysteresis. Borders are handled by edge-clamp replication
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ImageTooSmallError
from .raster import RasterImage, _round_half_up

__all__ = [
    "GradientField",
    "EdgeMap",
    "CannyParams",
    "gaussian_blur",
    "sobel_gradients",
    "non_max_suppression",
    "hysteresis_threshold",
    "canny",
]

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


@dataclass(eq=False)
class GradientField:
    """Per-pixel gradient magnitude and orientation (radians in [0, pi))."""

    magnitude: np.ndarray  # float64, shape (h, w), >= 0
    direction: np.ndarray  # float64, shape (h, w); 0 where magnitude is 0

    @property
    def width(self) -> int:
        return self.magnitude.shape[1]

    @property
    def height(self) -> int:
        return self.magnitude.shape[0]


@dataclass(eq=False)
class EdgeMap:
    """Boolean edge mask, True = edge pixel."""

    bits: np.ndarray  # bool, shape (h, w)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass
class CannyParams:
    sigma: float = 1.4  # 0 skips the blur
    low_threshold: float = 50.0
    high_threshold: float = 150.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not (0 <= self.low_threshold <= self.high_threshold):
            raise ValueError("need 0 <= low_threshold <= high_threshold")


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian, radius ceil(3*sigma)."""
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: RasterImage, sigma: float) -> RasterImage:
    """Separable Gaussian blur with edge-clamp borders; sigma=0 is identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return img
    k = gaussian_kernel(sigma)
    r = (len(k) - 1) // 2
    a = np.pad(img.pixels.astype(np.float64), r, mode="edge")
    a = ndimage.correlate1d(a, k, axis=1, mode="constant")
    a = ndimage.correlate1d(a, k, axis=0, mode="constant")
    a = a[r:-r, r:-r]
    return RasterImage(np.clip(_round_half_up(a), 0, 255).astype(np.uint8))


def sobel_gradients(img: RasterImage) -> GradientField:
    """3x3 Sobel gradients; L2 magnitude, direction folded into [0, pi)."""
    if img.width < 3 or img.height < 3:
        raise ImageTooSmallError("sobel_gradients needs width, height >= 3")
    a = np.pad(img.pixels.astype(np.float64), 1, mode="edge")
    gx = ndimage.correlate(a, SOBEL_X, mode="constant")[1:-1, 1:-1]
    gy = ndimage.correlate(a, SOBEL_Y, mode="constant")[1:-1, 1:-1]
    mag = np.sqrt(gx * gx + gy * gy)
    direction = np.mod(np.arctan2(gy, gx), math.pi)
    direction[direction >= math.pi] = 0.0  # mod can return pi through rounding
    direction[mag == 0] = 0.0
    return GradientField(mag, direction)


# Forward step per quantized direction bin (dx, dy); the backward step is
# its negation. Bin k covers directions near k*45 degrees.
_BIN_STEPS = ((1, 0), (1, 1), (0, 1), (-1, 1))


def quantize_direction(direction: np.ndarray) -> np.ndarray:
    """Map [0, pi) orientations onto 4 bins: 0, 45, 90, 135 degrees."""
    return (np.round(direction / (math.pi / 4)).astype(np.int64)) % 4


def _shifted(mag: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """mag sampled at (x+dx, y+dy) with edge-clamp replication."""
    p = np.pad(mag, 1, mode="edge")
    h, w = mag.shape
    return p[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]


def non_max_suppression(g: GradientField) -> GradientField:
    """Keep only ridge pixels along the quantized gradient direction.

    A pixel survives when its magnitude is strictly greater than the
    forward neighbor and at least the backward neighbor along the
    gradient; this one-sided tie rule thins two-pixel plateaus to a
    single response. Out-of-bounds neighbors clamp to the border pixel.
    """
    bins = quantize_direction(g.direction)
    keep = np.zeros(g.magnitude.shape, dtype=bool)
    for b, (dx, dy) in enumerate(_BIN_STEPS):
        fwd = _shifted(g.magnitude, dx, dy)
        bwd = _shifted(g.magnitude, -dx, -dy)
        keep |= (bins == b) & (g.magnitude > fwd) & (g.magnitude >= bwd)
    mag = np.where(keep, g.magnitude, 0.0)
    direction = np.where(mag > 0, g.direction, 0.0)
    return GradientField(mag, direction)


def hysteresis_threshold(g: GradientField, low: float, high: float) -> EdgeMap:
    """Two-threshold edge finalization over 8-connectivity."""
    if not (0 <= low <= high):
        raise ValueError("need 0 <= low <= high")
    strong = g.magnitude >= high
    candidate = g.magnitude >= low
    labels, n = ndimage.label(candidate, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return EdgeMap(np.zeros_like(strong))
    strong_labels = np.unique(labels[strong])
    strong_labels = strong_labels[strong_labels > 0]
    bits = candidate & np.isin(labels, strong_labels)
    return EdgeMap(bits)


def canny(img: RasterImage, p: CannyParams) -> EdgeMap:
    """blur -> gradients -> suppression -> hysteresis, in that order."""
    blurred = gaussian_blur(img, p.sigma)
    g = non_max_suppression(sobel_gradients(blurred))
    return hysteresis_threshold(g, p.low_threshold, p.high_threshold)
