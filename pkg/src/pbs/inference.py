"""Geometry inference: project cleaned detections onto the beam axis, infer
the span from length annotations, associate magnitudes, and emit a BeamSpec.

Anchor conventions (diagrams draw supports under the beam line and load
arrows over it):

* support anchor   = top-center of its box
* pload / moment   = box center
* dload extent     = the box's horizontal extent

Every emitted numeric value is rounded to 12 significant digits so that a
spec recovered from an exactly-constructed detection set is byte-identical
to its source after serialization.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Any

from .detections import (
    DEFAULT_CONFIDENCE_THRESHOLD,
    DEFAULT_IOU_THRESHOLD,
    REVIEW_CONFIDENCE,
    SUPPORT_CLASSES,
    AnnotationBox,
    AnnotationParseError,
    Detection,
    DetectionSet,
    Quantity,
    intensity_force_label,
    moment_force_label,
    nms,
    parse_annotation_text,
)
from .model import (
    AppliedMoment,
    BeamSpec,
    BeamValidationError,
    DistributedLoad,
    PointLoad,
    SectionProperties,
    Support,
    SupportKind,
    Units,
    beam_to_dict,
    validate_beam,
)

_DEGENERATE_AXIS = 1e-6

SPAN_UNRESOLVED_WARNING = "fatal: span unresolved — unit span assumed"


class InferenceError(ValueError):
    """codes: no_supports, degenerate_axis, no_detections"""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class BeamAxis:
    y_level: float
    x_min: float
    x_max: float


@dataclass(frozen=True)
class ScaleResolution:
    span: float
    scale: float
    mode: str  # total_span | segment_chain | unit_fallback
    # physical position for every projected element coordinate
    positions: dict[float, float] = field(default_factory=dict, compare=False)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class InferenceReport:
    spec: BeamSpec
    warnings: tuple[str, ...]
    needs_review: tuple[str, ...]

    @property
    def fatal(self) -> bool:
        return any(w.startswith("fatal:") for w in self.warnings)


@dataclass(frozen=True)
class InferenceOptions:
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    youngs_modulus: float | None = None
    second_moment: float | None = None


def round12(x: float) -> float:
    """Canonical rounding: 12 significant digits, absorbing projection noise."""
    return float(f"{x:.12g}")


def _canonical_position(p: float, span: float) -> float:
    """Positions within 1e-9*span of an end snap to it exactly; the rest get
    the significant-digit rounding.  Keeps recovered specs byte-stable."""
    if abs(p) <= 1e-9 * span:
        return 0.0
    if abs(p - span) <= 1e-9 * span:
        return round12(span)
    return round12(p)


# ---------------------------------------------------------------------------
# axis and projection


def infer_beam_axis(ds: DetectionSet) -> BeamAxis:
    """Locate the beam line and the horizontal extent of the drawing.

    The beam line sits at the median top edge of the support boxes (supports
    hang below the line).  The extent spans all element anchors, with a dload
    contributing both of its box edges.
    """
    supports = [d for d in ds.detections if d.klass in SUPPORT_CLASSES]
    if not supports:
        raise InferenceError("no_supports", "detection set contains no support")
    y_level = statistics.median(d.bbox.top for d in supports)

    xs: list[float] = []
    for d in ds.detections:
        if d.klass == "dload":
            xs.extend((d.bbox.left, d.bbox.right))
        else:
            xs.append(d.bbox.cx)
    return BeamAxis(y_level=y_level, x_min=min(xs), x_max=max(xs))


def _axis_t(x: float, axis: BeamAxis) -> float:
    width = axis.x_max - axis.x_min
    if width < _DEGENERATE_AXIS:
        raise InferenceError("degenerate_axis",
                             f"axis extent {width} is too small to project onto")
    return min(1.0, max(0.0, (x - axis.x_min) / width))


def project_to_axis(d: Detection, axis: BeamAxis):
    """Normalized axis position of a detection.

    Returns a single t in [0, 1] for supports, point loads and moments, and
    an (t_start, t_end) pair for distributed loads (projected box edges).
    """
    if d.klass == "dload":
        return (_axis_t(d.bbox.left, axis), _axis_t(d.bbox.right, axis))
    return _axis_t(d.bbox.cx, axis)


# ---------------------------------------------------------------------------
# span resolution


def _parsed_annotations(ds: DetectionSet) -> list[tuple[AnnotationBox, Quantity]]:
    out = []
    for ann in ds.annotations:
        try:
            out.append((ann, parse_annotation_text(ann.text)))
        except AnnotationParseError:
            continue
    return out


def resolve_scale(ds: DetectionSet, axis: BeamAxis, element_ts: list[float]) -> ScaleResolution:
    """Turn length annotations into a physical span and per-element positions.

    One length annotation measures the whole drawing (total_span).  Several
    measure segments: sorted left to right they map one-to-one onto the k
    widest gaps between consecutive element positions, and positions are
    rebuilt as cumulative sums (unannotated gaps keep the proportions implied
    by the annotated ones).  Without any length annotation the span degrades
    to 1 with a fatal warning.
    """
    lengths = [(ann, q) for ann, q in _parsed_annotations(ds) if q.kind == "length"]
    lengths.sort(key=lambda item: item[0].bbox.cx)
    ts = sorted(set(element_ts))

    def fallback(extra: tuple[str, ...]) -> ScaleResolution:
        positions = {t: t for t in ts}
        return ScaleResolution(span=1.0, scale=1.0, mode="unit_fallback",
                               positions=positions,
                               warnings=extra + (SPAN_UNRESOLVED_WARNING,))

    if not lengths:
        return fallback(())

    if len(lengths) == 1:
        span = lengths[0][1].value
        if span <= 0:
            return fallback((f"length annotation {lengths[0][0].text!r} is not positive",))
        positions = {t: t * span for t in ts}
        return ScaleResolution(span=span, scale=span, mode="total_span", positions=positions)

    gaps = [(ts[i], ts[i + 1]) for i in range(len(ts) - 1)]
    if len(gaps) < len(lengths):
        return fallback((f"{len(lengths)} length annotations but only {len(gaps)} "
                         "gaps between elements",))

    widest = sorted(range(len(gaps)),
                    key=lambda i: (-(gaps[i][1] - gaps[i][0]), i))[:len(lengths)]
    annotated = dict(zip(sorted(widest), (q.value for _, q in lengths)))
    if any(v <= 0 for v in annotated.values()):
        return fallback(("non-positive segment length annotation",))

    annotated_t = sum(gaps[i][1] - gaps[i][0] for i in annotated)
    implied_scale = sum(annotated.values()) / annotated_t
    positions = {ts[0]: 0.0}
    cursor = 0.0
    for i, (t0, t1) in enumerate(gaps):
        cursor += annotated[i] if i in annotated else (t1 - t0) * implied_scale
        positions[t1] = cursor
    span = cursor
    return ScaleResolution(span=span, scale=span / (ts[-1] - ts[0]) if ts[-1] > ts[0] else span,
                           mode="segment_chain", positions=positions)


# ---------------------------------------------------------------------------
# magnitude association


def associate_annotations(elements, annotations) -> tuple[dict, set[int]]:
    """Greedy nearest-first matching of magnitude annotations to elements.

    elements: list of (ref, kind, bbox); annotations: list of
    (AnnotationBox, Quantity).  Repeatedly commits the kind-compatible pair
    with the smallest box-center distance; each element and each annotation
    is used at most once.  Returns ({ref: Quantity}, used annotation indices).
    """
    candidates = []
    for ei, (_, kind, bbox) in enumerate(elements):
        for ai, (ann, q) in enumerate(annotations):
            if q.kind != kind:
                continue
            dist = ((bbox.cx - ann.bbox.cx) ** 2 + (bbox.cy - ann.bbox.cy) ** 2) ** 0.5
            candidates.append((dist, ei, ai))
    candidates.sort()

    used_elements: set[int] = set()
    used_annotations: set[int] = set()
    assignment: dict = {}
    for _, ei, ai in candidates:
        if ei in used_elements or ai in used_annotations:
            continue
        used_elements.add(ei)
        used_annotations.add(ai)
        assignment[elements[ei][0]] = annotations[ai][1]
    return assignment, used_annotations


# ---------------------------------------------------------------------------
# full pipeline


_KIND_BY_CLASS = {"simple": SupportKind.SIMPLE, "roller": SupportKind.ROLLER,
                  "fixed": SupportKind.FIXED}


def build_beam_spec(ds: DetectionSet, options: InferenceOptions | None = None) -> InferenceReport:
    """NMS, axis projection, span inference and magnitude association in one
    pass, producing a BeamSpec plus warnings and review flags."""
    opts = options or InferenceOptions()
    warnings: list[str] = []
    review: set[str] = set()

    kept = nms(ds.detections, opts.iou_threshold, opts.confidence_threshold)
    if not kept:
        raise InferenceError("no_detections", "no detections above confidence threshold")
    cleaned = DetectionSet(ds.image, tuple(kept), ds.annotations)
    axis = infer_beam_axis(cleaned)

    supports = []       # (t, kind, confidence)
    ploads = []         # (t, detection)
    dloads = []         # (t0, t1, detection)
    applied_moments = []  # (t, detection)
    element_ts: set[float] = set()
    for d in kept:
        t = project_to_axis(d, axis)
        if d.klass == "dload":
            dloads.append((t[0], t[1], d))
            element_ts.update(t)
        else:
            element_ts.add(t)
            if d.klass in SUPPORT_CLASSES:
                supports.append((t, _KIND_BY_CLASS[d.klass], d))
            elif d.klass == "pload":
                ploads.append((t, d))
            else:
                applied_moments.append((t, d))

    scale = resolve_scale(cleaned, axis, sorted(element_ts))
    warnings.extend(scale.warnings)
    span = round12(scale.span)

    def pos(t: float) -> float:
        return _canonical_position(scale.positions[t], span)

    supports.sort(key=lambda item: item[0])
    ploads.sort(key=lambda item: item[0])
    dloads.sort(key=lambda item: (item[0], item[1]))
    applied_moments.sort(key=lambda item: item[0])

    parsed = _parsed_annotations(ds)
    for ann in ds.annotations:
        try:
            parse_annotation_text(ann.text)
        except AnnotationParseError as exc:
            warnings.append(f"annotation {ann.text!r} ignored: {exc.code}")
    magnitude_annotations = [(ann, q) for ann, q in parsed if q.kind != "length"]

    elements = ([(("point_loads", i), "force", d.bbox) for i, (_, d) in enumerate(ploads)]
                + [(("distributed_loads", i), "distributed_intensity", d.bbox)
                   for i, (_, _, d) in enumerate(dloads)]
                + [(("moments", i), "moment", d.bbox) for i, (_, d) in enumerate(applied_moments)])
    assignment, used_annotations = associate_annotations(elements, magnitude_annotations)
    for ai, (ann, _) in enumerate(magnitude_annotations):
        if ai not in used_annotations:
            warnings.append(f"annotation {ann.text!r} matched no element")

    spec_point_loads = []
    for i, (t, d) in enumerate(ploads):
        ref = ("point_loads", i)
        if ref in assignment:
            magnitude = assignment[ref].value
        else:
            magnitude = 1.0
            review.add(f"point_loads[{i}]")
        spec_point_loads.append(PointLoad(magnitude=magnitude, position=pos(t)))

    spec_dloads = []
    for i, (t0, t1, d) in enumerate(dloads):
        ref = ("distributed_loads", i)
        if ref in assignment:
            intensity = assignment[ref].value
        else:
            intensity = 1.0
            review.add(f"distributed_loads[{i}]")
        spec_dloads.append(DistributedLoad(start=pos(t0), end=pos(t1),
                                           start_intensity=intensity, end_intensity=intensity))

    spec_moments = []
    for i, (t, d) in enumerate(applied_moments):
        ref = ("moments", i)
        if ref in assignment:
            magnitude = assignment[ref].value
        else:
            magnitude = 1.0
            review.add(f"moments[{i}]")
        spec_moments.append(AppliedMoment(magnitude=magnitude, position=pos(t)))

    spec_supports = [Support(kind, pos(t)) for t, kind, _ in supports]

    # low-confidence elements always go to review, whatever their magnitudes
    arrays = (("supports", [d for _, _, d in supports]),
              ("point_loads", [d for _, d in ploads]),
              ("distributed_loads", [d for _, _, d in dloads]),
              ("moments", [d for _, d in applied_moments]))
    for name, dets in arrays:
        for i, d in enumerate(dets):
            if d.confidence < REVIEW_CONFIDENCE:
                review.add(f"{name}[{i}]")

    spec = BeamSpec(
        length=span,
        units=_infer_units(parsed),
        supports=tuple(spec_supports),
        point_loads=tuple(spec_point_loads),
        distributed_loads=tuple(spec_dloads),
        moments=tuple(spec_moments),
        section=SectionProperties(opts.youngs_modulus, opts.second_moment),
    )

    try:
        validate_beam(spec)
    except BeamValidationError as exc:
        for issue in exc.issues:
            warnings.append(f"fatal: {issue.code} at {issue.path}: {issue.message}")

    return InferenceReport(spec=spec, warnings=tuple(warnings),
                           needs_review=tuple(sorted(review)))


def _infer_units(parsed: list[tuple[AnnotationBox, Quantity]]) -> Units:
    ordered = sorted(parsed, key=lambda item: item[0].bbox.cx)
    length_label = next((q.unit_label for _, q in ordered if q.kind == "length"), "m")
    force_label = None
    for _, q in ordered:
        if q.kind == "force":
            force_label = q.unit_label
            break
    if force_label is None:
        for _, q in ordered:
            if q.kind == "distributed_intensity":
                force_label = intensity_force_label(q.unit_label)
                break
            if q.kind == "moment":
                force_label = moment_force_label(q.unit_label)
                break
    return Units(length=length_label, force=force_label or "kN")


def report_to_dict(report: InferenceReport) -> dict[str, Any]:
    return {
        "spec": beam_to_dict(report.spec),
        "warnings": list(report.warnings),
        "needs_review": list(report.needs_review),
    }
