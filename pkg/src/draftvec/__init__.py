"""draftvec: scanned engineering drawings to CSV / SVG / DXF vector data."""

from .canny import CannyParams, EdgeMap, GradientField, canny
from .consolidate import DrawingEntitySet, from_csv, to_csv, write_manifest
from .detection import DetectionBox, YoloRecord, put_box
from .hough import Circle, HoughParams, LineSegment, PolarLine, detect_circles, detect_lines
from .pipeline import PipelineConfig, run_pipeline
from .raster import RasterImage, load_image, save_pgm
from .synth import EvalReport, GenSpec, GroundTruth, generate, match_and_score, run_benchmark
from .textex import TextRegion, character_accuracy
from .vectout import to_dxf, to_svg

__version__ = "0.1.0"

__all__ = [
    "CannyParams",
    "EdgeMap",
    "GradientField",
    "canny",
    "DrawingEntitySet",
    "from_csv",
    "to_csv",
    "write_manifest",
    "DetectionBox",
    "YoloRecord",
    "put_box",
    "Circle",
    "HoughParams",
    "LineSegment",
    "PolarLine",
    "detect_circles",
    "detect_lines",
    "PipelineConfig",
    "run_pipeline",
    "RasterImage",
    "load_image",
    "save_pgm",
    "EvalReport",
    "GenSpec",
    "GroundTruth",
    "generate",
    "match_and_score",
    "run_benchmark",
    "TextRegion",
    "character_accuracy",
    "to_dxf",
    "to_svg",
]
