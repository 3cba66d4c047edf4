"""Set-valued signal generators and the admissible-set geometry they produce.

An expander maps the nominal action ``v`` to a compact convex offset set; the
candidate set handed to the decision maker is ``v`` plus that offset set.  Two
families are provided:

* :class:`BoxExpander` - per-axis proportional intervals, producing an
  axis-aligned box around ``v``;
* :class:`SegmentExpander` - a rank-one map ``delta * direction *
  (sensor . v)`` with ``delta`` in ``[-gamma, gamma]``, producing a line
  segment through ``v``.

Both set kinds expose membership tests, parameterized selection, and the
inverse parameter lookup that the trace logger uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import SelectionError

__all__ = [
    "BoxExpander",
    "SegmentExpander",
    "Box",
    "Segment",
    "AdmissibleSet",
    "contains",
    "select",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``{center + d * half_lengths : d in [-1, 1]^m}``."""

    center: np.ndarray
    half_lengths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, float).reshape(-1))
        object.__setattr__(
            self, "half_lengths", np.asarray(self.half_lengths, float).reshape(-1)
        )
        if self.half_lengths.shape != self.center.shape:
            raise ValueError("half_lengths must match center dimension")
        if np.any(self.half_lengths < 0):
            raise ValueError("half_lengths must be non-negative")

    kind = "box"

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, float).reshape(-1)
        return bool(np.all(np.abs(u - self.center) <= self.half_lengths + tol))

    def select(self, delta) -> np.ndarray:
        delta = np.asarray(delta, float).reshape(-1)
        if delta.shape[0] != self.dim:
            raise SelectionError(f"delta must have length {self.dim}")
        if np.any(np.abs(delta) > 1 + 1e-12):
            raise SelectionError("per-axis delta must lie in [-1, 1]")
        return self.center + np.clip(delta, -1.0, 1.0) * self.half_lengths

    def parameter_of(self, u) -> np.ndarray:
        """Per-axis parameter in [-1, 1] reproducing ``u`` (0 on frozen axes)."""
        u = np.asarray(u, float).reshape(-1)
        out = np.zeros(self.dim)
        active = self.half_lengths > 0
        out[active] = (u[active] - self.center[active]) / self.half_lengths[active]
        return out


@dataclass(frozen=True)
class Segment:
    """Line segment ``{center + delta * direction : delta in [-gamma, gamma]}``.

    ``direction`` is the raw (not normalized) axis of the segment, so the
    physical half-length is ``gamma * ||direction||``.
    """

    center: np.ndarray
    direction: np.ndarray
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, float).reshape(-1))
        object.__setattr__(
            self, "direction", np.asarray(self.direction, float).reshape(-1)
        )
        object.__setattr__(self, "gamma", float(self.gamma))
        if self.direction.shape != self.center.shape:
            raise ValueError("direction must match center dimension")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    kind = "segment"

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def half_width(self) -> float:
        """Physical half-length of the segment."""
        return self.gamma * float(np.linalg.norm(self.direction))

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, float).reshape(-1)
        r = u - self.center
        dd = float(self.direction @ self.direction)
        if dd == 0.0:
            return bool(np.linalg.norm(r) <= tol)
        delta = float(np.clip((self.direction @ r) / dd, -self.gamma, self.gamma))
        return bool(np.linalg.norm(r - delta * self.direction) <= tol)

    def select(self, delta) -> np.ndarray:
        delta = float(np.asarray(delta).reshape(()))
        if abs(delta) > self.gamma + 1e-12 * max(1.0, self.gamma):
            raise SelectionError(
                f"delta {delta} outside [-{self.gamma}, {self.gamma}]"
            )
        return self.center + delta * self.direction

    def parameter_of(self, u) -> float:
        """Segment parameter delta reproducing ``u`` (0 for a degenerate set)."""
        u = np.asarray(u, float).reshape(-1)
        dd = float(self.direction @ self.direction)
        if dd == 0.0:
            return 0.0
        return float(self.direction @ (u - self.center) / dd)

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            self.center - self.gamma * self.direction,
            self.center + self.gamma * self.direction,
        )


AdmissibleSet = Union[Box, Segment]


@dataclass(frozen=True)
class BoxExpander:
    """Per-axis proportional expansion with ratios ``gammas >= 0``.

    The offset interval on axis ``i`` is ``[-gammas[i] |v[i]|,
    gammas[i] |v[i]|]``; the absolute value keeps the interval well ordered
    for negative nominal components.
    """

    gammas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", np.asarray(self.gammas, float).reshape(-1))
        if np.any(self.gammas < 0):
            raise ValueError("expansion ratios must be non-negative")

    kind = "box"

    def expand(self, v) -> Box:
        v = np.asarray(v, float).reshape(-1)
        if v.shape != self.gammas.shape:
            raise ValueError("v must match expander dimension")
        return Box(center=v, half_lengths=self.gammas * np.abs(v))


@dataclass(frozen=True)
class SegmentExpander:
    """Rank-one expansion: offsets ``delta * direction * (sensor . v)``.

    ``direction`` sets which way the candidate set extends; ``gamma *
    |sensor . v|`` sets how far.  ``gamma`` must be non-negative and both
    vectors non-zero.
    """

    direction: np.ndarray
    sensor: np.ndarray
    gamma: float

    def __post_init__(self):
        object.__setattr__(
            self, "direction", np.asarray(self.direction, float).reshape(-1)
        )
        object.__setattr__(self, "sensor", np.asarray(self.sensor, float).reshape(-1))
        object.__setattr__(self, "gamma", float(self.gamma))
        if np.linalg.norm(self.direction) == 0:
            raise ValueError("direction must be non-zero")
        if np.linalg.norm(self.sensor) == 0:
            raise ValueError("sensor must be non-zero")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    kind = "segment"

    def expand(self, v) -> Segment:
        v = np.asarray(v, float).reshape(-1)
        if v.shape != self.direction.shape:
            raise ValueError("v must match expander dimension")
        return Segment(
            center=v,
            direction=self.direction * float(self.sensor @ v),
            gamma=self.gamma,
        )

    def replace(self, direction=None, gamma=None) -> "SegmentExpander":
        return SegmentExpander(
            direction=self.direction if direction is None else direction,
            sensor=self.sensor,
            gamma=self.gamma if gamma is None else gamma,
        )


def contains(admissible: AdmissibleSet, u, tol: float = 1e-9) -> bool:
    """True when ``u`` is within ``tol`` (Euclidean) of the set."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return admissible.contains(u, tol)


def select(admissible: AdmissibleSet, delta) -> np.ndarray:
    """Point of the set at parameter ``delta``; see each set kind for units."""
    return admissible.select(delta)
