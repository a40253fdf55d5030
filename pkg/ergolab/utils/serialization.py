"""JSON conversion and hashing helpers for reports and configs."""

from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any
import hashlib
import json
import math

import numpy as np

from ..core.domain.intervals import ValueInterval
from ..core.domain.symbolic import DyadicScale, Point, word_to_string

_VERDICTS = ("passed", "certified", "holds")


def _key(key: Any) -> str:
    if isinstance(key, tuple) and all(isinstance(a, int) for a in key):
        return word_to_string(key) if key else "()"
    return str(key)


def _number(value: float) -> Any:
    if math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf" if value < 0 else "nan"


def to_jsonable(value: Any) -> Any:
    """Convert report objects to plain JSON data.

    Dataclasses keep their fields plus ``passed``, ``certified`` and ``holds``
    entries for whichever of those properties they define;
    non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if value is None or isinstance(value, (bool, str, int)):
        return value
    if isinstance(value, float):
        return _number(value)
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (DyadicScale, Point)):
        return str(value)
    if isinstance(value, ValueInterval):
        return {"lower": _number(value.lower), "upper": _number(value.upper)}
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        out = {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
        for verdict in _VERDICTS:
            if isinstance(getattr(type(value), verdict, None), property):
                out[verdict] = bool(getattr(value, verdict))
        return out
    if isinstance(value, dict):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=repr) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if hasattr(value, "describe"):
        return to_jsonable(value.describe())
    return str(value)


def canonical_json(value: Any) -> str:
    """Sorted, compact JSON; equal data gives equal text."""
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()
