"""Convert a drawing end to end: raster in, CSV + SVG + DXF out.

Uses a YOLO-format sidecar for the text regions and a fixture OCR
backend, the same plumbing a real detector/engine would plug into.

Run:  python3 demos/02_full_conversion.py
"""

import json
import tempfile
from pathlib import Path

from draftvec.pipeline import PipelineConfig, run_pipeline
from draftvec.raster import save_pgm
from draftvec.synth import GenSpec, generate

work = Path(tempfile.mkdtemp(prefix="draftvec_demo_"))

# -- generate an input drawing --------------------------------------------
spec = GenSpec(width=640, height=480, circles=(2, 3), segments=(2, 4), texts=(2, 2))
img, truth = generate(spec, seed=4)
image_path = work / "drawing.pgm"
save_pgm(img, image_path)

# -- fake the external detector and OCR engine ----------------------------
# Text sidecar: one YOLO record per truth text box (class 0, normalized).
sidecar = work / "text_boxes.txt"
lines = []
for t in truth.entities.texts:
    b = t.box
    cx = (b.x1 + b.x2) / 2 / spec.width
    cy = (b.y1 + b.y2) / 2 / spec.height
    lines.append(
        f"0 {cx:.6f} {cy:.6f} {(b.x2 - b.x1) / spec.width:.6f} "
        f"{(b.y2 - b.y1) / spec.height:.6f}"
    )
sidecar.write_text("\n".join(lines) + "\n")

# Fixture OCR: region index -> recognized string.
fixture = work / "ocr.json"
fixture.write_text(
    json.dumps({str(i): t.text for i, t in enumerate(truth.entities.texts)})
)

# -- run the pipeline ------------------------------------------------------
cfg = PipelineConfig(text_sidecar=str(sidecar), ocr_fixture=str(fixture))
out_dir = work / "out"
entity_set = run_pipeline(image_path, cfg, out_dir)

print(f"workspace: {work}")
# Glyph strokes are real ink, so the geometry pass also reports them as
# short segments and small circles; counts exceed truth on text-heavy scenes.
print("detected:", entity_set.counts())
print("truth:   ", truth.entities.counts())
for t in entity_set.texts:
    print(f"  text @({t.box.x1},{t.box.y1}): {t.text!r}")

print("\noutput files:")
for p in sorted(out_dir.iterdir()):
    print(f"  {p.name:14s} {p.stat().st_size:6d} bytes")

print("\ncircles.csv:")
print((out_dir / "circles.csv").read_text(), end="")
