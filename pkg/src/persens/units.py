"""Validated scalar types and unit conversions.

Each type is a ``float`` subclass whose constructor enforces the invariants
(finite, range).  Validation happens here, at construction boundaries;
interior code treats the values as plain floats.
"""

from __future__ import annotations

import math

from .errors import ValidationError

#: Exact miles-per-hour to kilometres-per-hour factor (1 mile = 1609.344 m).
MPH_TO_KMPH = 1.609344


def _finite(value: object, name: str) -> float:
    try:
        v = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite, got {v!r}")
    return v


class SpeedKmph(float):
    """Vehicle speed in km/h; non-negative and finite."""

    __slots__ = ()

    def __new__(cls, value: object) -> "SpeedKmph":
        v = _finite(value, "speed (km/h)")
        if v < 0.0:
            raise ValidationError(f"speed (km/h) must be >= 0, got {v}")
        return super().__new__(cls, v)


class ReactionTimeS(float):
    """Driver/system reaction time in seconds; strictly positive and finite."""

    __slots__ = ()

    def __new__(cls, value: object) -> "ReactionTimeS":
        v = _finite(value, "reaction time (s)")
        if v <= 0.0:
            raise ValidationError(f"reaction time (s) must be > 0, got {v}")
        return super().__new__(cls, v)


class FrictionCoeff(float):
    """Road/tyre friction coefficient; in (0, 1]."""

    __slots__ = ()

    def __new__(cls, value: object) -> "FrictionCoeff":
        v = _finite(value, "friction coefficient")
        if not 0.0 < v <= 1.0:
            raise ValidationError(f"friction coefficient must be in (0, 1], got {v}")
        return super().__new__(cls, v)


class DistanceM(float):
    """Distance in metres; non-negative and finite."""

    __slots__ = ()

    def __new__(cls, value: object) -> "DistanceM":
        v = _finite(value, "distance (m)")
        if v < 0.0:
            raise ValidationError(f"distance (m) must be >= 0, got {v}")
        return super().__new__(cls, v)


class Probability(float):
    """Detection confidence; in [0, 1]."""

    __slots__ = ()

    def __new__(cls, value: object) -> "Probability":
        v = _finite(value, "probability")
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"probability must be in [0, 1], got {v}")
        return super().__new__(cls, v)


def mph_to_kmph(mph: float) -> SpeedKmph:
    """Convert miles per hour to km/h using the exact factor 1.609344."""
    v = _finite(mph, "speed (mph)")
    if v < 0.0:
        raise ValidationError(f"speed (mph) must be >= 0, got {v}")
    return SpeedKmph(v * MPH_TO_KMPH)


def kmph_to_mph(kmph: float) -> float:
    """Inverse of :func:`mph_to_kmph`."""
    return float(SpeedKmph(kmph)) / MPH_TO_KMPH
