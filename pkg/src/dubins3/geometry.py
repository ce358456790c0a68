"""Planar primitives: points, circles, lines, circle inversion and common tangents.

Everything here works on plain floats.  Angles exposed at type boundaries are
normalized to ``[0, 2*pi)``; signed angles used internally live in ``(-pi, pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

TWO_PI = 2.0 * math.pi
EPS = 1e-9


class GeometryError(ValueError):
    """Raised when a construction has no finite answer."""


class InfeasibleTangent(GeometryError):
    """The requested common tangent does not exist for these circles."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Point":
        n = self.norm()
        if n == 0.0:
            raise GeometryError("zero vector has no direction")
        return Point(self.x / n, self.y / n)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def perp(self) -> "Point":
        """Rotate by +90 degrees."""
        return Point(-self.y, self.x)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Line:
    point: Point
    direction: Point

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > 1e-12:
            raise ValueError("line direction must be a unit vector")

    @classmethod
    def through(cls, p: Point, q: Point) -> "Line":
        return cls(p, (q - p).unit())

    def distance_to(self, p: Point) -> float:
        return abs(self.direction.cross(p - self.point))

    def signed_offset(self, p: Point) -> float:
        """Positive when ``p`` lies to the left of the direction of travel."""
        return self.direction.cross(p - self.point)

    def foot(self, p: Point) -> Point:
        t = (p - self.point).dot(self.direction)
        return self.point + self.direction * t

    def contains(self, p: Point, tol: float = EPS) -> bool:
        return self.distance_to(p) <= tol


GeneralizedCircle = Union[Circle, Line]


def unit_vector(angle: float) -> Point:
    return Point(math.cos(angle), math.sin(angle))


def mod2pi(angle: float) -> float:
    """Map an angle to ``[0, 2*pi)``."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod can return exactly 2*pi after the shift for tiny negative inputs
    if a >= TWO_PI:
        a -= TWO_PI
    return a


def wrap_pi(angle: float) -> float:
    """Map an angle to ``(-pi, pi]``."""
    a = mod2pi(angle)
    if a > math.pi:
        a -= TWO_PI
    return a


def signed_angle(u: Point, v: Point) -> float:
    """Counterclockwise angle from ``u`` to ``v`` in ``(-pi, pi]``."""
    return math.atan2(u.cross(v), u.dot(v))


def unsigned_angle(u: Point, v: Point) -> float:
    return abs(signed_angle(u, v))


def rotate(v: Point, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    return Point(c * v.x - s * v.y, s * v.x + c * v.y)


def rotate_about(p: Point, pivot: Point, angle: float) -> Point:
    """Rotate ``p`` counterclockwise about ``pivot``."""
    return pivot + rotate(p - pivot, angle)


def invert_point(p: Point, inv: Circle) -> Point:
    d = p - inv.center
    r2 = d.dot(d)
    if r2 <= EPS * EPS:
        raise GeometryError("cannot invert the center of inversion")
    return inv.center + d * (inv.radius * inv.radius / r2)


def invert_line(line: Line, inv: Circle) -> GeneralizedCircle:
    """Image of an infinite line.

    A line through the inversion center maps to itself; any other line maps
    to a circle through the center, whose diameter is the segment from the
    center to the image of the foot of the perpendicular.
    """
    foot = line.foot(inv.center)
    dist = (foot - inv.center).norm()
    if dist <= EPS:
        return line
    far = invert_point(foot, inv)
    return Circle((inv.center + far) * 0.5, 0.5 * inv.radius * inv.radius / dist)


def invert_circle(c: Circle, inv: Circle) -> GeneralizedCircle:
    """Image of a circle under inversion.

    With ``k = inv.radius**2`` and ``d`` the distance between centers, the
    image radius is ``k * r / |d**2 - r**2|``; for a unit inversion circle
    and a unit input circle this is ``1 / (d**2 - 1)``.
    """
    off = c.center - inv.center
    d = off.norm()
    if abs(d - c.radius) <= EPS:
        # the circle passes through the center: its image is the line through
        # the images of the two points symmetric about the center line
        if d <= EPS:
            raise GeometryError("degenerate circle at the inversion center")
        u = off * (1.0 / d)
        far = invert_point(inv.center + u * (2.0 * c.radius), inv)
        return Line(far, u.perp())
    k = inv.radius * inv.radius
    denom = d * d - c.radius * c.radius
    radius = k * c.radius / abs(denom)
    center = inv.center + off * (k / denom)
    return Circle(center, radius)


def common_tangent(c1: Circle, c2: Circle, kind: str, side: str) -> Line:
    """Common tangent of two equal-radius circles.

    ``kind`` is ``"outer"`` or ``"inner"``.  The returned line is directed
    from ``c1`` towards ``c2``; ``side`` says which side of that direction the
    tangency point on ``c1`` lies on.  The line's point is the tangency point
    on ``c1``.
    """
    if kind not in ("outer", "inner"):
        raise ValueError(f"unknown tangent kind {kind!r}")
    if side not in ("left", "right"):
        raise ValueError(f"unknown side {side!r}")
    r = c1.radius
    if abs(c2.radius - r) > 1e-9 * max(1.0, r):
        raise GeometryError("only equal-radius tangents are supported")
    axis = c2.center - c1.center
    d = axis.norm()
    sgn = 1.0 if side == "left" else -1.0
    if kind == "outer":
        if d <= EPS:
            raise InfeasibleTangent("coincident centers")
        u = axis * (1.0 / d)
        return Line(c1.center + u.perp() * (sgn * r), u)
    if d <= 2.0 * r:
        raise InfeasibleTangent(f"inner tangent needs center distance > {2.0 * r}, got {d}")
    # direction tilted by asin(2r/d) away from the tangency side on c1
    u = rotate(axis * (1.0 / d), -sgn * math.asin(2.0 * r / d))
    return Line(c1.center + u.perp() * (sgn * r), u)


def tangent_angle(c1: Circle, c2: Circle, kind: str) -> float:
    """Unsigned angle between a common tangent and the center line."""
    if kind == "outer":
        return 0.0
    d = (c2.center - c1.center).norm()
    if d <= 2.0 * c1.radius:
        raise InfeasibleTangent("inner tangent does not exist")
    return math.asin(2.0 * c1.radius / d)
