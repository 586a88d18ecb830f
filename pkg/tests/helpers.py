"""Shared fixture builders: canonical beams, synthetic detection sets, and a
seeded random-beam generator for the property suites.
"""

from __future__ import annotations

import json
import random

from pbs.detections import AnnotationBox, BBox, Detection, DetectionSet, ImageSize
from pbs.model import (
    AppliedMoment,
    BeamSpec,
    DistributedLoad,
    PointLoad,
    Support,
    SupportKind,
    Units,
)

# canonical test beams ------------------------------------------------------


def ss_central_load(P: float = 100.0, L: float = 10.0) -> BeamSpec:
    return BeamSpec(length=L,
                    supports=(Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, L)),
                    point_loads=(PointLoad(P, L / 2),))


def ss_udl_beam(w: float = 2.0, L: float = 6.0) -> BeamSpec:
    return BeamSpec(length=L,
                    supports=(Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, L)),
                    distributed_loads=(DistributedLoad(0.0, L, w, w),))


def cantilever_tip_load(P: float = 10.0, L: float = 2.0) -> BeamSpec:
    return BeamSpec(length=L, supports=(Support(SupportKind.FIXED, 0.0),),
                    point_loads=(PointLoad(P, L),))


def propped_cantilever(w: float = 5.0, L: float = 8.0) -> BeamSpec:
    return BeamSpec(length=L,
                    supports=(Support(SupportKind.FIXED, 0.0), Support(SupportKind.ROLLER, L)),
                    distributed_loads=(DistributedLoad(0.0, L, w, w),))


def two_span_continuous(w: float = 3.0, L: float = 4.0) -> BeamSpec:
    return BeamSpec(length=2 * L,
                    supports=(Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, L),
                              Support(SupportKind.ROLLER, 2 * L)),
                    distributed_loads=(DistributedLoad(0.0, 2 * L, w, w),))


def ss_with_moment(M0: float = 8.0, L: float = 4.0, a: float = 2.0) -> BeamSpec:
    return BeamSpec(length=L,
                    supports=(Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, L)),
                    moments=(AppliedMoment(M0, a),))


# synthetic detection rendering ---------------------------------------------
#
# Renders a BeamSpec into the exact detection set a perfect detector would
# produce.  Requirements on the spec for an exact round trip: the extreme
# element positions must be 0 and L (the drawing has no other way to signal
# its full span), and same-class elements must not overlap.

_AXIS_X0, _AXIS_X1 = 0.1, 0.9
_BEAM_Y = 0.5


def render_detection_set(spec: BeamSpec, *, confidence: float = 0.95,
                         span_annotation: bool = True,
                         segment_annotations: bool = False) -> DetectionSet:
    k = _AXIS_X1 - _AXIS_X0
    L = spec.length

    def cx(position: float) -> float:
        return _AXIS_X0 + k * (position / L)

    detections: list[Detection] = []
    annotations: list[AnnotationBox] = []

    for s in spec.supports:
        klass = {"simple": "simple", "roller": "roller", "fixed": "fixed"}[s.kind.value]
        detections.append(Detection(klass,
                                    BBox(cx(s.position), _BEAM_Y + 0.025, 0.04, 0.05),
                                    confidence))
    for p in spec.point_loads:
        detections.append(Detection("pload", BBox(cx(p.position), _BEAM_Y - 0.1, 0.02, 0.12),
                                    confidence))
        annotations.append(AnnotationBox(BBox(cx(p.position), _BEAM_Y - 0.2, 0.05, 0.03),
                                         f"{p.magnitude!r} {spec.units.force}"))
    for j, d in enumerate(spec.distributed_loads):
        left, right = cx(d.start), cx(d.end)
        cy = _BEAM_Y - 0.05 - 0.06 * j  # stack overlapping dloads vertically
        detections.append(Detection("dload", BBox((left + right) / 2, cy,
                                                  right - left, 0.04), confidence))
        # intensity written on the load itself, so it is always the closest
        annotations.append(AnnotationBox(BBox((left + right) / 2, cy, 0.05, 0.03),
                                         f"{d.start_intensity!r} {spec.units.force}/{spec.units.length}"))
    for m in spec.moments:
        detections.append(Detection("moment", BBox(cx(m.position), _BEAM_Y - 0.07, 0.03, 0.03),
                                    confidence))
        annotations.append(AnnotationBox(BBox(cx(m.position), _BEAM_Y - 0.26, 0.05, 0.03),
                                         f"{m.magnitude!r} {spec.units.force}·{spec.units.length}"))

    if span_annotation:
        annotations.append(AnnotationBox(BBox(0.5, _BEAM_Y + 0.15, 0.08, 0.03),
                                         f"{float(L)!r} {spec.units.length}"))
    elif segment_annotations:
        positions = sorted({float(s.position) for s in spec.supports}
                           | {float(p.position) for p in spec.point_loads}
                           | {float(m.position) for m in spec.moments}
                           | {float(d.start) for d in spec.distributed_loads}
                           | {float(d.end) for d in spec.distributed_loads})
        for a, b in zip(positions, positions[1:]):
            mid = (cx(a) + cx(b)) / 2
            annotations.append(AnnotationBox(BBox(mid, _BEAM_Y + 0.15, 0.05, 0.03),
                                             f"{b - a!r} {spec.units.length}"))

    return DetectionSet(ImageSize(1000, 800), tuple(detections), tuple(annotations))


def detection_set_to_json(ds: DetectionSet) -> str:
    doc = {
        "image": {"width": ds.image.width, "height": ds.image.height},
        "detections": [{"class": d.klass,
                        "bbox": [d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h],
                        "confidence": d.confidence} for d in ds.detections],
        "annotations": [{"bbox": [a.bbox.cx, a.bbox.cy, a.bbox.w, a.bbox.h],
                         "text": a.text} for a in ds.annotations],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# random beam generation -----------------------------------------------------


def random_beam(rng: random.Random, *, max_loads: int = 3,
                uniform_dloads_only: bool = False) -> BeamSpec:
    """A random valid beam over one of five support layouts.

    Same-class elements keep a minimum separation of 0.05*L so their rendered
    boxes never trip NMS (mirroring how a legible drawing is laid out).
    """
    L = round(rng.uniform(2.0, 20.0), 3)
    layout = rng.choice(("simple", "cantilever", "propped", "fixed_fixed", "continuous"))
    if layout == "simple":
        supports = (Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, L))
    elif layout == "cantilever":
        supports = (Support(SupportKind.FIXED, 0.0),)
    elif layout == "propped":
        supports = (Support(SupportKind.FIXED, 0.0), Support(SupportKind.ROLLER, L))
    elif layout == "fixed_fixed":
        supports = (Support(SupportKind.FIXED, 0.0), Support(SupportKind.FIXED, L))
    else:
        mid = round(rng.uniform(0.3, 0.7) * L, 3)
        supports = (Support(SupportKind.SIMPLE, 0.0), Support(SupportKind.ROLLER, mid),
                    Support(SupportKind.ROLLER, L))

    def magnitude() -> float:
        m = round(rng.uniform(1.0, 100.0), 3)
        return m if rng.random() < 0.8 else -m

    def separated_positions(count: int) -> list[float]:
        positions: list[float] = []
        for _ in range(count * 8):
            if len(positions) == count:
                break
            p = round(rng.uniform(0, L), 3)
            if all(abs(p - q) >= 0.05 * L for q in positions):
                positions.append(p)
        return positions

    point_loads = tuple(PointLoad(magnitude(), p)
                        for p in separated_positions(rng.randint(0, max_loads)))
    dloads = []
    for _ in range(rng.randint(0, 2)):
        a = round(rng.uniform(0, 0.8 * L), 3)
        b = round(rng.uniform(a + 0.1 * L, L), 3)
        if b <= a or b > L:
            continue
        w1 = magnitude()
        w2 = w1 if uniform_dloads_only or rng.random() < 0.5 else magnitude()
        dloads.append(DistributedLoad(a, b, w1, w2))
    moments = tuple(AppliedMoment(magnitude(), p)
                    for p in separated_positions(rng.randint(0, 2)))

    if not point_loads and not dloads and not moments:
        point_loads = (PointLoad(magnitude(), round(L / 2, 3)),)

    # a drawing only reveals its span out to the rightmost element, so a
    # cantilever fixture always carries something at the free end
    extent = max([s.position for s in supports]
                 + [p.position for p in point_loads]
                 + [d.end for d in dloads]
                 + [m.position for m in moments])
    if extent < L:
        point_loads = tuple(p for p in point_loads if abs(p.position - L) >= 0.05 * L)
        point_loads += (PointLoad(magnitude(), L),)

    # inference emits arrays sorted by position; keep sources canonical too
    return BeamSpec(length=L, units=Units(), supports=supports,
                    point_loads=tuple(sorted(point_loads, key=lambda p: p.position)),
                    distributed_loads=tuple(sorted(dloads, key=lambda d: (d.start, d.end))),
                    moments=tuple(sorted(moments, key=lambda m: m.position)))
