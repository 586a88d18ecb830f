"""Optional LLM perception backend behind a strict schema firewall.

The model is used purely as a parameter extractor: it receives the image and
the canonical document schema, and its reply is accepted only if the text
between the outermost braces parses as a strict beam document AND validates
structurally.  Nothing the model says ever reaches the solver any other way.
"""

from __future__ import annotations

import base64
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

import requests

from .model import (
    BeamValidationError,
    ParseError,
    ValidatedBeam,
    deserialize_beam,
    schema_text,
    validate_beam,
)

log = logging.getLogger(__name__)

ENV_API_KEY = "PBS_LLM_API_KEY"
ENV_ENDPOINT = "PBS_LLM_ENDPOINT"
ENV_MODEL = "PBS_LLM_MODEL"

DEFAULT_TIMEOUT = 30.0
DEFAULT_MAX_RETRIES = 2
_BACKOFF_BASE = 1.0  # seconds; doubles per transport retry


class LlmError(RuntimeError):
    """codes: empty_image, transport, http_status, schema_violation,
    validation_failed, no_backend"""

    def __init__(self, code: str, message: str, status: int | None = None):
        self.code = code
        self.status = status
        super().__init__(message)


@dataclass(frozen=True)
class LlmConfig:
    endpoint_url: str
    api_key: str = field(repr=False, default="")
    model_name: str = "default"
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES


@dataclass(frozen=True)
class LlmRequest:
    instruction: str
    image_payload: str  # base64


_INSTRUCTION_TEMPLATE = """\
You are given a photograph of a hand-drawn idealized beam diagram.
Extract the structural system it shows: span, supports, point loads,
distributed loads, applied moments and any stated section properties.

Produce one JSON document conforming exactly to this schema:

{schema}

Positions are measured from the left end in the drawing's length unit.
Load magnitudes are positive downward; applied moments are positive
counter-clockwise.  Do not invent fields or values that are not in the
drawing.  Respond with only the schema document.
"""


def build_request(image_bytes: bytes, config: LlmConfig) -> LlmRequest:
    """Deterministic request: fixed instruction template plus the image."""
    if not image_bytes:
        raise LlmError("empty_image", "image payload is empty")
    instruction = _INSTRUCTION_TEMPLATE.format(schema=schema_text().rstrip())
    return LlmRequest(instruction=instruction,
                      image_payload=base64.b64encode(image_bytes).decode("ascii"))


def _extract_document(body: str) -> str:
    start = body.find("{")
    end = body.rfind("}")
    if start == -1 or end <= start:
        raise LlmError("schema_violation", "response contains no document braces")
    return body[start:end + 1]


def request_structured_beam(request: LlmRequest, config: LlmConfig,
                            *, sleep: Callable[[float], None] = time.sleep) -> ValidatedBeam:
    """One grounded perception round trip.

    Transport failures retry with exponential backoff (at most
    max_retries + 1 attempts); anything the endpoint returns is stripped to
    its outermost braces, strictly parsed, and structurally validated before
    it is allowed out of this module.
    """
    payload = {
        "model": config.model_name,
        "temperature": 0,
        "instruction": request.instruction,
        "image_base64": request.image_payload,
    }
    headers = {"Authorization": f"Bearer {config.api_key}",
               "Content-Type": "application/json"}

    attempts = config.max_retries + 1
    response = None
    for attempt in range(attempts):
        try:
            log.debug("llm request attempt %d/%d", attempt + 1, attempts)
            response = requests.post(config.endpoint_url, json=payload,
                                     headers=headers, timeout=config.timeout)
            break
        except requests.RequestException as exc:
            if attempt + 1 == attempts:
                raise LlmError("transport",
                               f"llm endpoint unreachable after {attempts} attempts: "
                               f"{type(exc).__name__}") from exc
            sleep(_BACKOFF_BASE * 2 ** attempt)

    assert response is not None
    if not 200 <= response.status_code < 300:
        raise LlmError("http_status", f"llm endpoint returned HTTP {response.status_code}",
                       status=response.status_code)

    document = _extract_document(response.text)
    try:
        spec = deserialize_beam(document)
    except ParseError as exc:
        raise LlmError("schema_violation",
                       f"response violates the beam schema: {exc}") from exc
    try:
        return validate_beam(spec)
    except BeamValidationError as exc:
        raise LlmError("validation_failed",
                       f"response parsed but is structurally invalid: {exc}") from exc


def config_from_env(env: Mapping[str, str]) -> LlmConfig | None:
    """LlmConfig when the environment carries an API session, else None."""
    endpoint = env.get(ENV_ENDPOINT, "")
    key = env.get(ENV_API_KEY, "")
    if not endpoint or not key:
        return None
    return LlmConfig(endpoint_url=endpoint, api_key=key,
                     model_name=env.get(ENV_MODEL, "default"))


def backend_select(env: Mapping[str, str], detections_file: str | None,
                   no_llm: bool = False) -> str:
    """Prefer the LLM when a session is configured, fall back to a
    detections file, and fail typed when neither exists."""
    if not no_llm and config_from_env(env) is not None:
        return "llm"
    if detections_file:
        return "detections"
    raise LlmError("no_backend", "no LLM session configured and no detections file given")
