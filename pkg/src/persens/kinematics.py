"""Stopping-distance kinematics.

The stopping distance is the sum of the distance travelled during the
reaction time and the braking distance on a surface with a given friction
coefficient:

    reaction distance [m] = speed [km/h] * reaction time [s] / 3.6
    braking distance  [m] = speed^2 [km/h] / (250 * friction)
"""

from __future__ import annotations

from dataclasses import dataclass

from .units import FrictionCoeff, ReactionTimeS, SpeedKmph


@dataclass(frozen=True)
class StoppingProfile:
    """Component distances, all in metres."""

    reaction_distance_m: float
    braking_distance_m: float
    stopping_distance_m: float


def stopping_profile(
    speed_kmph: float, reaction_s: float, friction: float
) -> StoppingProfile:
    """Compute the stopping profile for a speed/reaction/friction triple.

    The stopping distance is exactly the float sum of the two components.
    """
    s = SpeedKmph(speed_kmph)
    r = ReactionTimeS(reaction_s)
    f = FrictionCoeff(friction)
    rd = s * r / 3.6
    bd = (s * s) / (250.0 * f)
    return StoppingProfile(rd, bd, rd + bd)


def stopping_distance_m(speed_kmph: float, reaction_s: float, friction: float) -> float:
    """Shorthand for ``stopping_profile(...).stopping_distance_m``."""
    return stopping_profile(speed_kmph, reaction_s, friction).stopping_distance_m
