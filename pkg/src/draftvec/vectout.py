"""SVG and minimal ASCII DXF (R12 subset) emission.

SVG keeps image coordinates (y down). DXF flips to y-up:
y_dxf = image_height - y_img. Light boxes become 4-LINE closed
rectangles on a layer named after their class code; dimension-line
boxes are drawn as their main diagonal.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .consolidate import DrawingEntitySet, _int

__all__ = ["to_svg", "to_dxf", "read_dxf", "dxf_entity_count"]


def to_svg(entity_set: DrawingEntitySet) -> str:
    """Render the entity set as an SVG 1.1 document with integer coordinates."""
    w, h = entity_set.image_width, entity_set.image_height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}">',
    ]
    for l in entity_set.lines:
        parts.append(
            f'<line class="line" x1="{_int(l.x1)}" y1="{_int(l.y1)}"'
            f' x2="{_int(l.x2)}" y2="{_int(l.y2)}" stroke="black"/>'
        )
    for c in entity_set.circles:
        parts.append(
            f'<circle cx="{_int(c.cx)}" cy="{_int(c.cy)}" r="{_int(c.radius)}"'
            ' stroke="black" fill="none"/>'
        )
    for d in entity_set.dimension_lines:
        parts.append(
            f'<line class="dimline" x1="{_int(d.x1)}" y1="{_int(d.y1)}"'
            f' x2="{_int(d.x2)}" y2="{_int(d.y2)}" stroke="black"/>'
        )
    for b in entity_set.lights:
        parts.append(
            f'<rect class={quoteattr(b.class_label)} x="{_int(b.x1)}" y="{_int(b.y1)}"'
            f' width="{_int(b.x2) - _int(b.x1)}" height="{_int(b.y2) - _int(b.y1)}"'
            ' stroke="black" fill="none"/>'
        )
    for t in entity_set.texts:
        parts.append(
            f'<text x="{_int(t.box.x1)}" y="{_int(t.box.y1)}"'
            f' font-size="{_int(t.box.y2) - _int(t.box.y1)}">{escape(t.text)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _tags(pairs):
    return "".join(f"{code}\n{value}\n" for code, value in pairs)


def _dxf_line(x1, y1, x2, y2, layer="0"):
    return _tags(
        [
            (0, "LINE"),
            (8, layer),
            (10, x1),
            (20, y1),
            (11, x2),
            (21, y2),
        ]
    )


def to_dxf(entity_set: DrawingEntitySet) -> str:
    """Render the entity set as a minimal DXF R12 ASCII document."""
    h = entity_set.image_height
    flip = lambda y: h - _int(y)
    out = [
        _tags(
            [
                (0, "SECTION"),
                (2, "HEADER"),
                (9, "$ACADVER"),
                (1, "AC1009"),
                (0, "ENDSEC"),
                (0, "SECTION"),
                (2, "ENTITIES"),
            ]
        )
    ]
    for l in entity_set.lines:
        out.append(_dxf_line(_int(l.x1), flip(l.y1), _int(l.x2), flip(l.y2)))
    for c in entity_set.circles:
        out.append(
            _tags(
                [
                    (0, "CIRCLE"),
                    (8, "0"),
                    (10, _int(c.cx)),
                    (20, flip(c.cy)),
                    (40, _int(c.radius)),
                ]
            )
        )
    for d in entity_set.dimension_lines:
        out.append(_dxf_line(_int(d.x1), flip(d.y1), _int(d.x2), flip(d.y2), layer="DIMLINE"))
    for b in entity_set.lights:
        x1, y1, x2, y2 = _int(b.x1), flip(b.y1), _int(b.x2), flip(b.y2)
        layer = b.class_label
        out.append(_dxf_line(x1, y1, x2, y1, layer))
        out.append(_dxf_line(x2, y1, x2, y2, layer))
        out.append(_dxf_line(x2, y2, x1, y2, layer))
        out.append(_dxf_line(x1, y2, x1, y1, layer))
    for t in entity_set.texts:
        out.append(
            _tags(
                [
                    (0, "TEXT"),
                    (8, "TEXT"),
                    (10, _int(t.box.x1)),
                    (20, flip(t.box.y1)),
                    (40, _int(t.box.y2) - _int(t.box.y1)),
                    (1, t.text),
                ]
            )
        )
    out.append(_tags([(0, "ENDSEC"), (0, "EOF")]))
    return "".join(out)


def read_dxf(text: str) -> list[tuple[int, str]]:
    """Parse a DXF document into (group code, value) tag pairs."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) % 2 != 0:
        raise ValueError("odd number of DXF lines")
    return [(int(lines[i]), lines[i + 1]) for i in range(0, len(lines), 2)]


def dxf_entity_count(text: str) -> int:
    """Number of entities inside the ENTITIES section."""
    tags = read_dxf(text)
    count = 0
    in_entities = False
    for i, (code, value) in enumerate(tags):
        if code == 0 and value == "SECTION" and i + 1 < len(tags) and tags[i + 1] == (2, "ENTITIES"):
            in_entities = True
        elif code == 0 and value == "ENDSEC":
            in_entities = False
        elif in_entities and code == 0 and value != "SECTION":
            count += 1
    return count
