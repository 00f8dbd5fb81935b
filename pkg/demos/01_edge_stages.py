"""Walk through the four edge-detection stages on a synthetic drawing.

Run:  python3 demos/01_edge_stages.py
"""

import numpy as np

from draftvec.canny import (
    gaussian_blur,
    hysteresis_threshold,
    non_max_suppression,
    sobel_gradients,
)
from draftvec.synth import GenSpec, generate

# -- make an input --------------------------------------------------------
# Two circles and a few segments on a clean white canvas, plus mild noise.
spec = GenSpec(width=320, height=240, circles=(2, 2), segments=(3, 3), noise_sigma=4.0)
img, truth = generate(spec, seed=11)
print(f"input: {img.width}x{img.height}, ink pixels: {np.sum(img.pixels < 128)}")

# -- stage 1: noise reduction ---------------------------------------------
blurred = gaussian_blur(img, sigma=1.4)
print(f"blur:  value range {blurred.pixels.min()}..{blurred.pixels.max()}")

# -- stage 2: intensity gradients -----------------------------------------
grad = sobel_gradients(blurred)
print(f"sobel: max magnitude {grad.magnitude.max():.1f}")

# -- stage 3: non-maximum suppression -------------------------------------
# Keeps only pixels that are local maxima along their gradient direction,
# thinning thick gradient ridges down to 1 px.
nms = non_max_suppression(grad)
before = np.sum(grad.magnitude > 0)
after = np.sum(nms.magnitude > 0)
print(f"nms:   {before} candidate pixels -> {after} ridge pixels")

# -- stage 4: hysteresis thresholding -------------------------------------
# Strong pixels (>= high) seed edges; weak pixels (>= low) survive only
# when 8-connected to a strong seed.
edges = hysteresis_threshold(nms, low=50, high=150)
print(f"edges: {np.sum(edges.bits)} final edge pixels")

# Sanity check: every truth circle should leave edge ink near its perimeter.
for c in truth.entities.circles:
    ys, xs = np.nonzero(edges.bits)
    d = np.abs(np.hypot(xs - c.cx, ys - c.cy) - c.radius)
    print(f"  circle ({c.cx},{c.cy},r={c.radius}): {np.sum(d < 2.5)} edge px near rim")
