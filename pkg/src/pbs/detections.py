"""Detector-output ingest: strict file parsing, IoU, NMS and the annotation
unit grammar.

Boxes arrive YOLO-style: normalized center coordinates (cx, cy, w, h) with
the origin at the top-left of the image and y growing downward.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    ParseError,
    parse_json,
    take_int,
    take_list,
    take_number,
    take_object,
    take_string,
)

CLASSES = ("pload", "dload", "fixed", "roller", "simple", "moment")
SUPPORT_CLASSES = ("fixed", "roller", "simple")

DEFAULT_CONFIDENCE_THRESHOLD = 0.25
DEFAULT_IOU_THRESHOLD = 0.45
# below this confidence a kept detection is flagged for human review
REVIEW_CONFIDENCE = 0.60

_EDGE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BBox:
    cx: float
    cy: float
    w: float
    h: float

    @property
    def left(self) -> float:
        return self.cx - self.w / 2

    @property
    def right(self) -> float:
        return self.cx + self.w / 2

    @property
    def top(self) -> float:
        return self.cy - self.h / 2

    @property
    def bottom(self) -> float:
        return self.cy + self.h / 2


@dataclass(frozen=True)
class Detection:
    klass: str
    bbox: BBox
    confidence: float


@dataclass(frozen=True)
class AnnotationBox:
    bbox: BBox
    text: str


@dataclass(frozen=True)
class ImageSize:
    width: int
    height: int


@dataclass(frozen=True)
class DetectionSet:
    image: ImageSize
    detections: tuple[Detection, ...]
    annotations: tuple[AnnotationBox, ...] = ()


@dataclass(frozen=True)
class Quantity:
    """A parsed annotation: value plus the unit label that classifies it."""

    value: float
    unit_label: str
    kind: str  # force | distributed_intensity | moment | length


class AnnotationParseError(ValueError):
    """codes: no_number, unknown_unit, ambiguous"""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------------------
# file parsing


def _parse_bbox(raw, path: str) -> BBox:
    values = take_list(raw, path)
    if len(values) != 4:
        raise ParseError("type_mismatch", path, f"bbox needs 4 numbers, got {len(values)}")
    cx, cy, w, h = (take_number(v, f"{path}[{i}]") for i, v in enumerate(values))
    if not (0 <= cx <= 1 and 0 <= cy <= 1):
        raise ParseError("bbox_out_of_range", path, f"center ({cx}, {cy}) outside [0, 1]")
    if not (0 < w <= 1 and 0 < h <= 1):
        raise ParseError("bbox_out_of_range", path, f"size ({w}, {h}) outside (0, 1]")
    box = BBox(cx, cy, w, h)
    if (box.left < -_EDGE_TOLERANCE or box.right > 1 + _EDGE_TOLERANCE
            or box.top < -_EDGE_TOLERANCE or box.bottom > 1 + _EDGE_TOLERANCE):
        raise ParseError("bbox_out_of_range", path, "box extends past the image bounds")
    return box


def parse_detections(text: str) -> DetectionSet:
    """Strict parse of a detection file; same strictness as the beam format."""
    doc = take_object(parse_json(text), "", ("image", "detections"), ("annotations",))

    img = take_object(doc["image"], "image", ("width", "height"))
    width = take_int(img["width"], "image.width")
    height = take_int(img["height"], "image.height")
    if width <= 0 or height <= 0:
        raise ParseError("value_out_of_range", "image", f"dimensions must be positive, got {width}x{height}")

    detections = []
    for i, raw in enumerate(take_list(doc["detections"], "detections")):
        path = f"detections[{i}]"
        obj = take_object(raw, path, ("class", "bbox", "confidence"))
        klass = take_string(obj["class"], f"{path}.class")
        if klass not in CLASSES:
            raise ParseError("unknown_class", f"{path}.class", f"unknown class {klass!r}")
        confidence = take_number(obj["confidence"], f"{path}.confidence")
        if not 0 <= confidence <= 1:
            raise ParseError("value_out_of_range", f"{path}.confidence",
                             f"confidence {confidence} outside [0, 1]")
        detections.append(Detection(klass, _parse_bbox(obj["bbox"], f"{path}.bbox"), confidence))

    annotations = []
    for i, raw in enumerate(take_list(doc.get("annotations", []), "annotations")):
        path = f"annotations[{i}]"
        obj = take_object(raw, path, ("bbox", "text"))
        annotation_text = take_string(obj["text"], f"{path}.text")
        if not annotation_text:
            raise ParseError("value_out_of_range", f"{path}.text", "annotation text is empty")
        annotations.append(AnnotationBox(_parse_bbox(obj["bbox"], f"{path}.bbox"), annotation_text))

    return DetectionSet(ImageSize(width, height), tuple(detections), tuple(annotations))


# ---------------------------------------------------------------------------
# IoU and NMS


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 for disjoint boxes, exactly 1 for a == b."""
    ix = min(a.right, b.right) - max(a.left, b.left)
    iy = min(a.bottom, b.bottom) - max(a.top, b.top)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    area_a = (a.right - a.left) * (a.bottom - a.top)
    area_b = (b.right - b.left) * (b.bottom - b.top)
    union = area_a + area_b - inter
    return inter / union


def nms(detections, iou_threshold: float = DEFAULT_IOU_THRESHOLD,
        confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD) -> list[Detection]:
    """Greedy class-wise non-maximum suppression.

    Detections below the confidence threshold are dropped, the rest are
    walked in descending-confidence order and a detection is suppressed when
    it overlaps an already-kept detection of the same class with
    IoU > iou_threshold.  Class-wise because in beam diagrams loads are drawn
    touching supports; cross-class suppression would delete real elements.
    """
    survivors = [d for d in detections if d.confidence >= confidence_threshold]
    survivors.sort(key=lambda d: (-d.confidence, d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h))
    kept: list[Detection] = []
    for d in survivors:
        if any(k.klass == d.klass and iou(k.bbox, d.bbox) > iou_threshold for k in kept):
            continue
        kept.append(d)
    return kept


# ---------------------------------------------------------------------------
# annotation grammar
#
#   quantity := number unit
#   number   := decimal with optional sign and exponent
#   unit     := force | force "/" length₃ | force mark length₃ | length₅
#   mark     := "·" | "-" | "*" | "."
#
# with force ∈ {N, kN, kg, lb, kip}, length₃ ∈ {m, cm, ft} for the compound
# units and length₅ ∈ {m, cm, mm, ft, in} for bare lengths.

FORCE_UNITS = ("N", "kN", "kg", "lb", "kip")
LENGTH_UNITS = ("m", "cm", "mm", "ft", "in")
_COMPOUND_LENGTHS = ("m", "cm", "ft")
_PRODUCT_MARKS = ("·", "-", "*", ".")

_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _classify_unit(unit: str) -> str | None:
    if unit in FORCE_UNITS:
        return "force"
    if unit in LENGTH_UNITS:
        return "length"
    if "/" in unit:
        force_part, _, length_part = unit.partition("/")
        if force_part in FORCE_UNITS and length_part in _COMPOUND_LENGTHS:
            return "distributed_intensity"
        return None
    for mark in _PRODUCT_MARKS:
        if mark in unit:
            force_part, _, length_part = unit.partition(mark)
            if force_part in FORCE_UNITS and length_part in _COMPOUND_LENGTHS:
                return "moment"
    return None


def parse_annotation_text(text: str) -> Quantity:
    """Parse one handwritten annotation transcription into a typed quantity.

    Total over arbitrary text: returns a Quantity or raises a typed
    AnnotationParseError, never anything else.
    """
    numbers = _NUMBER_RE.findall(text)
    if not numbers:
        raise AnnotationParseError("no_number", f"no numeric value in {text!r}")
    if len(numbers) > 1:
        raise AnnotationParseError("ambiguous", f"multiple numeric values in {text!r}")
    unit = re.sub(r"\s+", "", _NUMBER_RE.sub("", text, count=1))
    kind = _classify_unit(unit)
    if kind is None:
        raise AnnotationParseError("unknown_unit", f"unknown unit {unit!r} in {text!r}")
    return Quantity(float(numbers[0]), unit, kind)


def intensity_force_label(unit_label: str) -> str:
    return unit_label.partition("/")[0]


def moment_force_label(unit_label: str) -> str:
    for mark in _PRODUCT_MARKS:
        if mark in unit_label:
            return unit_label.partition(mark)[0]
    return unit_label
