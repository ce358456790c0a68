"""Point-to-point Dubins shortest paths.

The six candidate words are evaluated in closed form in the normalized frame
(start at the origin, goal on the +x axis, unit turning radius).  A batched
numpy version of the same length computation is provided for discretized
heading searches, where thousands of pairs are scored at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, Point, mod2pi

WORDS = ("LSL", "LSR", "RSL", "RSR", "RLR", "LRL")

# arcs this close to a full turn are numerically a zero turn
_ARC_SNAP = 1e-10


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading; the heading is stored in ``[0, 2*pi)``."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.theta)):
            raise ValueError(f"non-finite pose {self.x, self.y, self.theta}")
        object.__setattr__(self, "theta", mod2pi(self.theta))

    @property
    def position(self) -> Point:
        return Point(self.x, self.y)

    @classmethod
    def at(cls, p: Point, theta: float) -> "Pose":
        return cls(p.x, p.y, theta)

    def left_center(self, r: float) -> Point:
        return Point(self.x - r * math.sin(self.theta), self.y + r * math.cos(self.theta))

    def right_center(self, r: float) -> Point:
        return Point(self.x + r * math.sin(self.theta), self.y - r * math.cos(self.theta))

    def turn_center(self, turn: str, r: float) -> Point:
        return self.left_center(r) if turn == "L" else self.right_center(r)


@dataclass(frozen=True)
class DubinsPath:
    word: str
    segment_lengths: tuple[float, float, float]
    rmin: float
    total_length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_length", float(sum(self.segment_lengths)))

    def segments(self):
        return zip(self.word, self.segment_lengths)


def _arc(a: float) -> float:
    a = mod2pi(a)
    return 0.0 if a > TWO_PI - _ARC_SNAP else a


def _lsl(a, b, d, sa, sb, ca, cb, cab):
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
    if p2 < 0.0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return _arc(tmp - a), math.sqrt(p2), _arc(b - tmp)


def _rsr(a, b, d, sa, sb, ca, cb, cab):
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
    if p2 < 0.0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return _arc(a - tmp), math.sqrt(p2), _arc(tmp - b)


def _lsr(a, b, d, sa, sb, ca, cb, cab):
    p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    if p2 < 0.0:
        return None
    p = math.sqrt(p2)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _arc(tmp - a), p, _arc(tmp - b)


def _rsl(a, b, d, sa, sb, ca, cb, cab):
    p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
    if p2 < 0.0:
        return None
    p = math.sqrt(p2)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _arc(a - tmp), p, _arc(b - tmp)


def _rlr(a, b, d, sa, sb, ca, cb, cab):
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _arc(TWO_PI - math.acos(tmp))
    t = _arc(a - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    return t, p, _arc(a - b - t + p)


def _lrl(a, b, d, sa, sb, ca, cb, cab):
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _arc(TWO_PI - math.acos(tmp))
    t = _arc(-a - math.atan2(ca - cb, d + sa - sb) + p / 2.0)
    return t, p, _arc(b - a - t + p)


_SOLVERS = {"LSL": _lsl, "LSR": _lsr, "RSL": _rsl, "RSR": _rsr, "RLR": _rlr, "LRL": _lrl}


def _normalized(start: Pose, goal: Pose, rmin: float):
    dx = goal.x - start.x
    dy = goal.y - start.y
    d = math.hypot(dx, dy) / rmin
    phi = math.atan2(dy, dx) if d > 0.0 else 0.0
    a = mod2pi(start.theta - phi)
    b = mod2pi(goal.theta - phi)
    sa, sb, ca, cb = math.sin(a), math.sin(b), math.cos(a), math.cos(b)
    return a, b, d, sa, sb, ca, cb, math.cos(a - b)


def word_path(start: Pose, goal: Pose, rmin: float, word: str) -> DubinsPath | None:
    """The path of a single word, or ``None`` when that word is infeasible."""
    args = _normalized(start, goal, rmin)
    seg = _SOLVERS[word](*args)
    if seg is None:
        return None
    return DubinsPath(word, (seg[0] * rmin, seg[1] * rmin, seg[2] * rmin), rmin)


def _best(start: Pose, goal: Pose, rmin: float):
    if not rmin > 0.0:
        raise ValueError("rmin must be positive")
    args = _normalized(start, goal, rmin)
    best = None
    best_len = math.inf
    for word in WORDS:
        seg = _SOLVERS[word](*args)
        if seg is None:
            continue
        total = seg[0] + seg[1] + seg[2]
        if total < best_len:
            best_len = total
            best = (word, seg)
    return best[0], best[1], best_len * rmin


def solve_pair(start: Pose, goal: Pose, rmin: float) -> DubinsPath:
    """Shortest forward path from ``start`` to ``goal`` with turning radius ``rmin``.

    Ties are broken by the fixed order of ``WORDS``.
    """
    word, seg, _ = _best(start, goal, rmin)
    return DubinsPath(word, (seg[0] * rmin, seg[1] * rmin, seg[2] * rmin), rmin)


def pair_length(start: Pose, goal: Pose, rmin: float) -> float:
    return _best(start, goal, rmin)[2]


def advance(pose: Pose, kind: str, length: float, rmin: float) -> Pose:
    """Pose reached after driving ``length`` along one segment."""
    x, y, h = pose.x, pose.y, pose.theta
    if kind == "S":
        return Pose(x + length * math.cos(h), y + length * math.sin(h), h)
    phi = length / rmin
    if kind == "L":
        return Pose(x + rmin * (math.sin(h + phi) - math.sin(h)),
                    y - rmin * (math.cos(h + phi) - math.cos(h)), h + phi)
    if kind == "R":
        return Pose(x - rmin * (math.sin(h - phi) - math.sin(h)),
                    y + rmin * (math.cos(h - phi) - math.cos(h)), h - phi)
    raise ValueError(f"unknown segment kind {kind!r}")


def endpoint(path: DubinsPath, start: Pose) -> Pose:
    pose = start
    for kind, length in path.segments():
        pose = advance(pose, kind, length, path.rmin)
    return pose


def sample_path(path: DubinsPath, start: Pose, step: float) -> list[Pose]:
    """Poses every ``step`` of arc length; the last sample is the endpoint."""
    if not step > 0.0:
        raise ValueError("step must be positive")
    out = []
    s = 0.0
    k = 0
    total = path.total_length
    while s < total - 1e-9 or k == 0:
        out.append(_pose_at(path, start, s))
        k += 1
        s = k * step
    if total > 1e-9:
        out.append(endpoint(path, start))
    return out


def _pose_at(path: DubinsPath, start: Pose, s: float) -> Pose:
    pose = start
    for kind, length in path.segments():
        if s <= length:
            return advance(pose, kind, s, path.rmin)
        pose = advance(pose, kind, length, path.rmin)
        s -= length
    return pose


def _mod2pi_np(a):
    a = np.mod(a, TWO_PI)
    return np.where(a > TWO_PI - _ARC_SNAP, 0.0, a)


def batch_lengths(x0, y0, h0, x1, y1, h1, rmin: float) -> np.ndarray:
    """Vectorized shortest Dubins lengths for broadcastable pose arrays."""
    dx = np.asarray(x1, float) - np.asarray(x0, float)
    dy = np.asarray(y1, float) - np.asarray(y0, float)
    d = np.hypot(dx, dy) / rmin
    phi = np.arctan2(dy, dx)
    a = np.mod(np.asarray(h0, float) - phi, TWO_PI)
    b = np.mod(np.asarray(h1, float) - phi, TWO_PI)
    sa, sb, ca, cb = np.sin(a), np.sin(b), np.cos(a), np.cos(b)
    cab = np.cos(a - b)
    best = np.full(np.broadcast(d, a, b).shape, np.inf)

    with np.errstate(invalid="ignore"):
        p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
        tmp = np.arctan2(cb - ca, d + sa - sb)
        L = _mod2pi_np(tmp - a) + np.sqrt(p2) + _mod2pi_np(b - tmp)
        best = np.minimum(best, np.where(p2 >= 0.0, L, np.inf))

        p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
        p = np.sqrt(p2)
        tmp = np.arctan2(-ca - cb, d + sa + sb) - np.arctan2(-2.0, p)
        L = _mod2pi_np(tmp - a) + p + _mod2pi_np(tmp - b)
        best = np.minimum(best, np.where(p2 >= 0.0, L, np.inf))

        p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
        p = np.sqrt(p2)
        tmp = np.arctan2(ca + cb, d - sa - sb) - np.arctan2(2.0, p)
        L = _mod2pi_np(a - tmp) + p + _mod2pi_np(b - tmp)
        best = np.minimum(best, np.where(p2 >= 0.0, L, np.inf))

        p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
        tmp = np.arctan2(ca - cb, d - sa + sb)
        L = _mod2pi_np(a - tmp) + np.sqrt(p2) + _mod2pi_np(tmp - b)
        best = np.minimum(best, np.where(p2 >= 0.0, L, np.inf))

        c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
        p = _mod2pi_np(TWO_PI - np.arccos(c))
        t = _mod2pi_np(a - np.arctan2(ca - cb, d - sa + sb) + p / 2.0)
        L = t + p + _mod2pi_np(a - b - t + p)
        best = np.minimum(best, np.where(np.abs(c) <= 1.0, L, np.inf))

        c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
        p = _mod2pi_np(TWO_PI - np.arccos(c))
        t = _mod2pi_np(-a - np.arctan2(ca - cb, d + sa - sb) + p / 2.0)
        L = t + p + _mod2pi_np(b - a - t + p)
        best = np.minimum(best, np.where(np.abs(c) <= 1.0, L, np.inf))

    return best * rmin
