import numpy as np
import pytest

from draftvec.detection import (
    DetectionBox,
    YoloRecord,
    crop_roi,
    detect_dimension_lines,
    detect_ornaments,
    detect_roi,
    load_yolo_txt,
    put_box,
)
from draftvec.errors import (
    EmptyBoxError,
    MissingSidecarError,
    ParseError,
    UnknownClassIdError,
)
from draftvec.raster import RasterImage

CM = {0: "PL", 1: "CS", 2: "CL", 3: "DL"}


class TestPutBox:
    def test_symmetric(self):
        box = put_box(YoloRecord(0, 0.5, 0.5, 0.5, 0.5), 100, 100, CM)
        assert (box.x1, box.y1, box.x2, box.y2) == (25, 25, 75, 75)

    def test_full_frame(self):
        box = put_box(YoloRecord(0, 0.5, 0.5, 1.0, 1.0), 640, 480, CM)
        assert (box.x1, box.y1, box.x2, box.y2) == (0, 0, 640, 480)

    def test_asymmetric_arithmetic(self):
        box = put_box(YoloRecord(0, 0.25, 0.75, 0.1, 0.2), 200, 100, CM)
        assert (box.x1, box.y1, box.x2, box.y2) == (40, 65, 60, 85)

    def test_unknown_class(self):
        with pytest.raises(UnknownClassIdError):
            put_box(YoloRecord(9, 0.5, 0.5, 0.1, 0.1), 100, 100, CM)

    def test_confidence_default(self):
        assert put_box(YoloRecord(0, 0.5, 0.5, 0.1, 0.1), 100, 100, CM).confidence == 1.0
        assert (
            put_box(YoloRecord(0, 0.5, 0.5, 0.1, 0.1, 0.7), 100, 100, CM).confidence == 0.7
        )

    def test_renormalization_inverse(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            w = float(rng.uniform(0.01, 1.0))
            h = float(rng.uniform(0.01, 1.0))
            cx = float(rng.uniform(w / 2, 1 - w / 2))
            cy = float(rng.uniform(h / 2, 1 - h / 2))
            img_w, img_h = int(rng.integers(10, 2000)), int(rng.integers(10, 2000))
            box = put_box(YoloRecord(0, cx, cy, w, h), img_w, img_h, CM)
            assert abs((box.x1 + box.x2) / 2 / img_w - cx) <= 1 / (2 * img_w) + 1e-12
            assert abs((box.y1 + box.y2) / 2 / img_h - cy) <= 1 / (2 * img_h) + 1e-12
            assert abs((box.x2 - box.x1) / img_w - w) <= 1 / img_w + 1e-12

    def test_out_of_range_record_rejected(self):
        with pytest.raises(ValueError):
            YoloRecord(0, 0.9, 0.5, 0.5, 0.1)


class TestLoadYoloTxt:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("")
        assert load_yolo_txt(p, 100, 100, CM) == []

    def test_single_record(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("0 0.5 0.5 0.5 0.5\n")
        boxes = load_yolo_txt(p, 100, 100, CM)
        assert boxes == [DetectionBox("PL", 25, 25, 75, 75, 1.0)]

    def test_order_preserved(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("1 0.2 0.2 0.1 0.1\n0 0.8 0.8 0.1 0.1\n")
        labels = [b.class_label for b in load_yolo_txt(p, 100, 100, CM)]
        assert labels == ["CS", "PL"]

    def test_missing_fields(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("0 0.5 0.5\n")
        with pytest.raises(ParseError) as exc:
            load_yolo_txt(p, 100, 100, CM)
        assert exc.value.line == 1

    def test_bad_number(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("0 0.5 0.5 0.5 0.5\n0 x 0.5 0.5 0.5\n")
        with pytest.raises(ParseError) as exc:
            load_yolo_txt(p, 100, 100, CM)
        assert exc.value.line == 2


class TestDetectRoi:
    def test_blank_full_frame(self):
        img = RasterImage(np.full((60, 80), 255, np.uint8))
        box = detect_roi(img)
        assert (box.x1, box.y1, box.x2, box.y2) == (0, 0, 80, 60)

    def test_sidecar_passthrough(self, tmp_path):
        p = tmp_path / "roi.txt"
        p.write_text("0 0.5 0.5 0.5 0.5\n")
        img = RasterImage(np.full((100, 100), 255, np.uint8))
        box = detect_roi(img, p)
        assert (box.x1, box.y1, box.x2, box.y2) == (25, 25, 75, 75)

    def test_ink_bounding_box_margin(self):
        a = np.full((200, 200), 255, np.uint8)
        a[20:81, 20:81] = 0
        box = detect_roi(RasterImage(a))
        assert (box.x1, box.y1, box.x2, box.y2) == (15, 15, 85, 85)

    def test_fallback_contains_all_ink(self):
        rng = np.random.default_rng(1)
        a = np.full((50, 50), 255, np.uint8)
        pts = rng.integers(0, 50, size=(20, 2))
        a[pts[:, 0], pts[:, 1]] = 0
        box = detect_roi(RasterImage(a))
        ys, xs = np.nonzero(a < 128)
        assert xs.min() >= box.x1 and xs.max() < box.x2
        assert ys.min() >= box.y1 and ys.max() < box.y2


class TestCropRoi:
    def test_full_frame(self):
        rng = np.random.default_rng(2)
        img = RasterImage(rng.integers(0, 256, (30, 40), np.uint8))
        crop, offset = crop_roi(img, DetectionBox("drawing", 0, 0, 40, 30))
        assert crop == img and offset == (0, 0)

    def test_sub_box(self):
        rng = np.random.default_rng(3)
        img = RasterImage(rng.integers(0, 256, (50, 50), np.uint8))
        crop, offset = crop_roi(img, DetectionBox("drawing", 10, 20, 30, 40))
        assert (crop.width, crop.height) == (20, 20)
        assert offset == (10, 20)
        assert np.array_equal(crop.pixels, img.pixels[20:40, 10:30])

    def test_zero_area(self):
        img = RasterImage(np.zeros((10, 10), np.uint8))
        with pytest.raises(EmptyBoxError):
            crop_roi(img, DetectionBox("drawing", 5, 5, 5, 9))


class TestSidecars:
    def test_ornaments_reference_rows(self, tmp_path):
        # normalized records chosen to hit the published pixel boxes on 800x600
        w, h = 800, 600
        rows = [
            (0, 629, 348, 643, 358),  # PL
            (3, 696, 205, 706, 215),  # DL
        ]
        lines = []
        for cid, x1, y1, x2, y2 in rows:
            lines.append(
                f"{cid} {(x1 + x2) / 2 / w} {(y1 + y2) / 2 / h} {(x2 - x1) / w} {(y2 - y1) / h}"
            )
        p = tmp_path / "lights.txt"
        p.write_text("\n".join(lines) + "\n")
        boxes = detect_ornaments(p, w, h)
        assert (boxes[0].class_label, boxes[0].x1, boxes[0].y1, boxes[0].x2, boxes[0].y2) == (
            "PL",
            629,
            348,
            643,
            358,
        )
        assert (boxes[1].class_label, boxes[1].x1, boxes[1].y1, boxes[1].x2, boxes[1].y2) == (
            "DL",
            696,
            205,
            706,
            215,
        )

    def test_ornaments_empty(self, tmp_path):
        p = tmp_path / "lights.txt"
        p.write_text("")
        assert detect_ornaments(p, 100, 100) == []

    def test_ornaments_missing(self, tmp_path):
        with pytest.raises(MissingSidecarError):
            detect_ornaments(tmp_path / "none.txt", 100, 100)

    def test_dimlines_reference_row(self, tmp_path):
        w, h = 800, 600
        x1, y1, x2, y2 = 342, 278, 347, 299
        p = tmp_path / "dim.txt"
        p.write_text(
            f"0 {(x1 + x2) / 2 / w} {(y1 + y2) / 2 / h} {(x2 - x1) / w} {(y2 - y1) / h}\n"
        )
        boxes = detect_dimension_lines(p, w, h)
        assert len(boxes) == 1
        b = boxes[0]
        assert (b.class_label, b.x1, b.y1, b.x2, b.y2) == ("dimline", 342, 278, 347, 299)

    def test_dimlines_malformed(self, tmp_path):
        p = tmp_path / "dim.txt"
        p.write_text("0 0.5\n")
        with pytest.raises(ParseError):
            detect_dimension_lines(p, 100, 100)
