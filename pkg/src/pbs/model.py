"""Structured beam representation: types, validation and canonical JSON format.

The document format here is the single contract shared by file ingest, the
HTTP API and the LLM backend.  Parsing is deliberately strict (unknown fields
are rejected, not ignored) so that nothing malformed or invented can slip
through to the solver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any


class SupportKind(str, Enum):
    SIMPLE = "simple"
    ROLLER = "roller"
    FIXED = "fixed"


@dataclass(frozen=True)
class Support:
    kind: SupportKind
    position: float


@dataclass(frozen=True)
class PointLoad:
    """Concentrated force; magnitude positive = downward."""

    magnitude: float
    position: float


@dataclass(frozen=True)
class DistributedLoad:
    """Line load over [start, end]; intensities positive = downward.

    Uniform loads have start_intensity == end_intensity; anything else is a
    linear ramp between the two values.
    """

    start: float
    end: float
    start_intensity: float
    end_intensity: float


@dataclass(frozen=True)
class AppliedMoment:
    """Concentrated moment; magnitude positive = counter-clockwise."""

    magnitude: float
    position: float


@dataclass(frozen=True)
class SectionProperties:
    youngs_modulus: float | None = None
    second_moment: float | None = None

    @property
    def ei(self) -> float | None:
        """Flexural rigidity, available only when both properties are set."""
        if self.youngs_modulus is None or self.second_moment is None:
            return None
        return self.youngs_modulus * self.second_moment


@dataclass(frozen=True)
class Units:
    """Opaque display labels; numeric consistency is the caller's job."""

    length: str = "m"
    force: str = "kN"


@dataclass(frozen=True)
class BeamSpec:
    length: float
    units: Units = Units()
    supports: tuple[Support, ...] = ()
    point_loads: tuple[PointLoad, ...] = ()
    distributed_loads: tuple[DistributedLoad, ...] = ()
    moments: tuple[AppliedMoment, ...] = ()
    section: SectionProperties = SectionProperties()

    def __post_init__(self) -> None:
        object.__setattr__(self, "supports", tuple(self.supports))
        object.__setattr__(self, "point_loads", tuple(self.point_loads))
        object.__setattr__(self, "distributed_loads", tuple(self.distributed_loads))
        object.__setattr__(self, "moments", tuple(self.moments))


@dataclass(frozen=True)
class ValidatedBeam:
    """Witness that a BeamSpec passed validate_beam; construct only there."""

    spec: BeamSpec

    @property
    def length(self) -> float:
        return self.spec.length


class ParseError(ValueError):
    """Strict-parse failure.  code is one of: syntax, unknown_field,
    missing_field, type_mismatch, unknown_class, bbox_out_of_range,
    value_out_of_range."""

    def __init__(self, code: str, path: str, message: str):
        self.code = code
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


class BeamValidationError(ValueError):
    def __init__(self, issues: list[ValidationIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(f"{i.path}: {i.message}" for i in issues))


# ---------------------------------------------------------------------------
# validation


def validate_beam(spec: BeamSpec) -> ValidatedBeam:
    """Check every structural invariant; raise with the full violation list.

    Never aborts on any parseable input: the result is either a witness or a
    BeamValidationError carrying one ValidationIssue per violated invariant.
    """
    issues: list[ValidationIssue] = []
    length = spec.length

    if not (isinstance(length, (int, float)) and math.isfinite(length) and length > 0):
        issues.append(ValidationIssue("non_positive_length", "length",
                                      f"beam length must be finite and > 0, got {length!r}"))

    def in_span(x: float) -> bool:
        return math.isfinite(x) and 0 <= x <= length

    seen_positions: dict[float, int] = {}
    for i, s in enumerate(spec.supports):
        path = f"supports[{i}]"
        if not in_span(s.position):
            issues.append(ValidationIssue("out_of_range", f"{path}.position",
                                          f"position {s.position!r} outside [0, {length}]"))
        if s.kind is SupportKind.FIXED and s.position not in (0, length):
            issues.append(ValidationIssue("fixed_not_at_end", f"{path}.position",
                                          f"fixed support must sit at 0 or {length}, got {s.position!r}"))
        if s.position in seen_positions:
            issues.append(ValidationIssue("duplicate_support", f"{path}.position",
                                          f"position {s.position!r} already used by "
                                          f"supports[{seen_positions[s.position]}]"))
        else:
            seen_positions[s.position] = i

    n_fixed = sum(1 for s in spec.supports if s.kind is SupportKind.FIXED)
    if len(spec.supports) == 0:
        issues.append(ValidationIssue("unstable", "supports", "beam has no supports"))
    elif len(spec.supports) < 2 and n_fixed == 0:
        issues.append(ValidationIssue("unstable", "supports",
                                      "needs at least two supports or one fixed support"))

    for i, p in enumerate(spec.point_loads):
        path = f"point_loads[{i}]"
        if not in_span(p.position):
            issues.append(ValidationIssue("out_of_range", f"{path}.position",
                                          f"position {p.position!r} outside [0, {length}]"))
        if not (math.isfinite(p.magnitude) and p.magnitude != 0):
            issues.append(ValidationIssue("invalid_magnitude", f"{path}.magnitude",
                                          f"magnitude must be finite and nonzero, got {p.magnitude!r}"))

    for i, d in enumerate(spec.distributed_loads):
        path = f"distributed_loads[{i}]"
        if not (in_span(d.start) and in_span(d.end) and d.start < d.end):
            issues.append(ValidationIssue("out_of_range", path,
                                          f"requires 0 <= start < end <= {length}, "
                                          f"got [{d.start!r}, {d.end!r}]"))
        if not (math.isfinite(d.start_intensity) and math.isfinite(d.end_intensity)):
            issues.append(ValidationIssue("invalid_intensity", path, "intensities must be finite"))
        elif d.start_intensity == 0 and d.end_intensity == 0:
            issues.append(ValidationIssue("invalid_intensity", path, "intensities are both zero"))

    for i, m in enumerate(spec.moments):
        path = f"moments[{i}]"
        if not in_span(m.position):
            issues.append(ValidationIssue("out_of_range", f"{path}.position",
                                          f"position {m.position!r} outside [0, {length}]"))
        if not (math.isfinite(m.magnitude) and m.magnitude != 0):
            issues.append(ValidationIssue("invalid_magnitude", f"{path}.magnitude",
                                          f"magnitude must be finite and nonzero, got {m.magnitude!r}"))

    for name, value in (("youngs_modulus", spec.section.youngs_modulus),
                        ("second_moment", spec.section.second_moment)):
        if value is not None and not (math.isfinite(value) and value > 0):
            issues.append(ValidationIssue("invalid_section", f"section.{name}",
                                          f"must be finite and > 0 when present, got {value!r}"))

    if issues:
        raise BeamValidationError(issues)
    return ValidatedBeam(spec)


# ---------------------------------------------------------------------------
# canonical serialization

def beam_to_dict(spec: BeamSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "length": float(spec.length),
        "units": {"length": spec.units.length, "force": spec.units.force},
        "supports": [{"kind": s.kind.value, "position": float(s.position)}
                     for s in spec.supports],
        "point_loads": [{"magnitude": float(p.magnitude), "position": float(p.position)}
                        for p in spec.point_loads],
        "distributed_loads": [{"start": float(d.start), "end": float(d.end),
                               "start_intensity": float(d.start_intensity),
                               "end_intensity": float(d.end_intensity)}
                              for d in spec.distributed_loads],
        "moments": [{"magnitude": float(m.magnitude), "position": float(m.position)}
                    for m in spec.moments],
    }
    section: dict[str, Any] = {}
    if spec.section.youngs_modulus is not None:
        section["youngs_modulus"] = float(spec.section.youngs_modulus)
    if spec.section.second_moment is not None:
        section["second_moment"] = float(spec.section.second_moment)
    if section:
        doc["section"] = section
    return doc


def serialize_beam(spec: BeamSpec) -> str:
    """Canonical text form: fixed key order, repr-exact floats, no extras.

    A pure function of the value; serializing the same spec twice yields
    byte-identical documents.
    """
    return json.dumps(beam_to_dict(spec), indent=2, ensure_ascii=False) + "\n"


# strict-parse helpers, shared with the detection-file parser

def _reject_constant(name: str) -> float:
    raise ParseError("syntax", "", f"non-finite literal {name} is not allowed")


def parse_json(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError("syntax", "", str(exc)) from exc


def take_object(value: Any, path: str, required: tuple[str, ...],
                optional: tuple[str, ...] = ()) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ParseError("type_mismatch", path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in required and key not in optional:
            raise ParseError("unknown_field", f"{path}.{key}" if path else key,
                             f"unknown field {key!r}")
    for key in required:
        if key not in value:
            raise ParseError("missing_field", f"{path}.{key}" if path else key,
                             f"missing required field {key!r}")
    return value


def take_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("type_mismatch", path, f"expected a number, got {type(value).__name__}")
    return float(value)


def take_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("type_mismatch", path, f"expected an integer, got {type(value).__name__}")
    return value


def take_string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError("type_mismatch", path, f"expected a string, got {type(value).__name__}")
    return value


def take_list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list):
        raise ParseError("type_mismatch", path, f"expected an array, got {type(value).__name__}")
    return value


def deserialize_beam(text: str) -> BeamSpec:
    """Strict parse of a beam document.  Unknown fields are an error.

    Validation is a separate step: a document with e.g. a negative length
    parses fine here and fails in validate_beam.
    """
    doc = take_object(parse_json(text), "", ("length", "supports"),
                      ("units", "point_loads", "distributed_loads", "moments", "section"))
    length = take_number(doc["length"], "length")

    units = Units()
    if "units" in doc:
        u = take_object(doc["units"], "units", ("length", "force"))
        units = Units(length=take_string(u["length"], "units.length"),
                      force=take_string(u["force"], "units.force"))

    supports = []
    for i, raw in enumerate(take_list(doc["supports"], "supports")):
        path = f"supports[{i}]"
        obj = take_object(raw, path, ("kind", "position"))
        kind_text = take_string(obj["kind"], f"{path}.kind")
        try:
            kind = SupportKind(kind_text)
        except ValueError:
            raise ParseError("type_mismatch", f"{path}.kind",
                             f"unknown support kind {kind_text!r}") from None
        supports.append(Support(kind, take_number(obj["position"], f"{path}.position")))

    point_loads = []
    for i, raw in enumerate(take_list(doc.get("point_loads", []), "point_loads")):
        path = f"point_loads[{i}]"
        obj = take_object(raw, path, ("magnitude", "position"))
        point_loads.append(PointLoad(take_number(obj["magnitude"], f"{path}.magnitude"),
                                     take_number(obj["position"], f"{path}.position")))

    distributed_loads = []
    for i, raw in enumerate(take_list(doc.get("distributed_loads", []), "distributed_loads")):
        path = f"distributed_loads[{i}]"
        obj = take_object(raw, path, ("start", "end", "start_intensity", "end_intensity"))
        distributed_loads.append(DistributedLoad(
            take_number(obj["start"], f"{path}.start"),
            take_number(obj["end"], f"{path}.end"),
            take_number(obj["start_intensity"], f"{path}.start_intensity"),
            take_number(obj["end_intensity"], f"{path}.end_intensity")))

    moments = []
    for i, raw in enumerate(take_list(doc.get("moments", []), "moments")):
        path = f"moments[{i}]"
        obj = take_object(raw, path, ("magnitude", "position"))
        moments.append(AppliedMoment(take_number(obj["magnitude"], f"{path}.magnitude"),
                                     take_number(obj["position"], f"{path}.position")))

    section = SectionProperties()
    if "section" in doc:
        obj = take_object(doc["section"], "section", (), ("youngs_modulus", "second_moment"))
        section = SectionProperties(
            youngs_modulus=take_number(obj["youngs_modulus"], "section.youngs_modulus")
            if "youngs_modulus" in obj else None,
            second_moment=take_number(obj["second_moment"], "section.second_moment")
            if "second_moment" in obj else None)

    return BeamSpec(length=length, units=units, supports=tuple(supports),
                    point_loads=tuple(point_loads),
                    distributed_loads=tuple(distributed_loads),
                    moments=tuple(moments), section=section)


# ---------------------------------------------------------------------------
# schema document (served by /api/schema, printed by `pbs schema`,
# embedded in the LLM instruction)

_NUM = {"type": "number"}


def canonical_schema() -> dict[str, Any]:
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "title": "BeamSpec",
        "type": "object",
        "additionalProperties": False,
        "required": ["length", "supports"],
        "properties": {
            "length": {"type": "number", "exclusiveMinimum": 0},
            "units": {
                "type": "object",
                "additionalProperties": False,
                "required": ["length", "force"],
                "properties": {"length": {"type": "string"}, "force": {"type": "string"}},
            },
            "supports": {
                "type": "array",
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "position"],
                    "properties": {
                        "kind": {"enum": ["simple", "roller", "fixed"]},
                        "position": _NUM,
                    },
                },
            },
            "point_loads": {
                "type": "array",
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["magnitude", "position"],
                    "properties": {"magnitude": _NUM, "position": _NUM},
                },
            },
            "distributed_loads": {
                "type": "array",
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["start", "end", "start_intensity", "end_intensity"],
                    "properties": {"start": _NUM, "end": _NUM,
                                   "start_intensity": _NUM, "end_intensity": _NUM},
                },
            },
            "moments": {
                "type": "array",
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["magnitude", "position"],
                    "properties": {"magnitude": _NUM, "position": _NUM},
                },
            },
            "section": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "youngs_modulus": {"type": "number", "exclusiveMinimum": 0},
                    "second_moment": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    }


def schema_text() -> str:
    return json.dumps(canonical_schema(), indent=2) + "\n"
