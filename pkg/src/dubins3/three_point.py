"""Optimal Dubins paths through three points with a free heading at the middle one.

Given a start pose, an end pose and a midpoint whose heading is free, the
path through all three is the concatenation of two pairwise optimal paths,
and the only unknown is the midpoint heading.  When the points are at least
``4 * rmin`` apart the optimum is a ``C S C S C`` path; each of the eight turn
patterns (a :class:`PathClass`) is solved by

* a closed-form approximate heading from the triangle formed by the midpoint
  and the two end turn centers (:func:`approx_heading`), then
* an iteration that rotates the midpoint turn center until the midpoint
  direction bisects the two straight segments (:func:`iterate_heading`).

Closer instances also get a discretized search with local refinement, which
covers the path shapes with consecutive turns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .dubins import DubinsPath, Pose, batch_lengths, pair_length, solve_pair, word_path
from .geometry import (
    TWO_PI,
    Circle,
    GeometryError,
    InfeasibleTangent,
    Point,
    common_tangent,
    invert_line,
    mod2pi,
    rotate,
    unsigned_angle,
    wrap_pi,
)

TURNS = ("L", "R")

# words for which the approximation error bound collapses to zero at equal distances
# relative length difference below which two candidates count as tied
_TIE = 1e-12

_SYMMETRIC_WORDS = {"RSRSR", "LSLSL", "RSLSR", "LSRSL"}


class ClassInfeasible(InfeasibleTangent):
    """A straight segment of the requested turn pattern cannot be built."""


@dataclass(frozen=True)
class ThreePointInstance:
    start: Pose
    mid: Point
    end: Pose
    rmin: float = 1.0

    def __post_init__(self):
        if not (self.rmin > 0.0 and math.isfinite(self.rmin)):
            raise ValueError("rmin must be positive and finite")

    def pairwise_distances(self) -> tuple[float, float, float]:
        xi, xf = self.start.position, self.end.position
        return ((self.mid - xi).norm(), (xf - self.mid).norm(), (xf - xi).norm())

    def min_pairwise_distance(self) -> float:
        return min(self.pairwise_distances())

    def transformed(self, angle: float = 0.0, shift: Point = Point(0.0, 0.0), scale: float = 1.0):
        """The same instance after rotation about the origin, scaling and translation."""

        def move(p: Point) -> Point:
            return rotate(p, angle) * scale + shift

        s, f = self.start, self.end
        return ThreePointInstance(
            Pose.at(move(s.position), s.theta + angle),
            move(self.mid),
            Pose.at(move(f.position), f.theta + angle),
            self.rmin * scale,
        )


@dataclass(frozen=True)
class PathClass:
    """Turn directions of the first, middle and last arc of a C S C S C path."""

    c1: str
    c3: str
    c5: str
    center_a: Point
    center_b: Point

    @property
    def mu_a(self) -> int:
        return 1 if self.c1 == self.c3 else -1

    @property
    def mu_b(self) -> int:
        return 1 if self.c5 == self.c3 else -1

    @property
    def word(self) -> str:
        return f"{self.c1}S{self.c3}S{self.c5}"

    def __str__(self) -> str:
        return self.word


@dataclass(frozen=True)
class OptimalityResidual:
    """Residuals of the three optimality equations at a given heading.

    ``r1``, ``r2``, ``r3`` are dimensionless (lengths in units of rmin) and
    compare curvatures, ``2 * q_k - 1 / R``, rather than radii;
    ``big_r`` is the radius of the inverted segment circles in world units.
    """

    r1: float
    r2: float
    r3: float
    theta: float
    big_r: float
    beta1: float
    beta2: float

    @property
    def max_abs(self) -> float:
        return max(abs(self.r1), abs(self.r2), abs(self.r3))


class HeadingIteration(NamedTuple):
    alpha: float
    iterations: int
    status: str  # "aligned", "degenerate" or "max_iter"

    @property
    def converged(self) -> bool:
        return self.status != "max_iter"


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-12
    max_iter: int = 64
    fallback_k: int = 72


@dataclass(frozen=True)
class ThreePointSolution:
    heading: float
    path_class: PathClass | None
    first_leg: DubinsPath
    second_leg: DubinsPath
    iterations: int
    method: str  # "approx", "iterative", "discretized-fallback" or "discretized"
    total_length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_length",
                           self.first_leg.total_length + self.second_leg.total_length)

    @property
    def word(self) -> str:
        return self.path_class.word if self.path_class is not None else "fallback"

    def mid_pose(self, inst: ThreePointInstance) -> Pose:
        return Pose.at(inst.mid, self.heading)


def enumerate_classes(inst: ThreePointInstance) -> list[PathClass]:
    """All eight turn patterns, in lexicographic order of (c1, c3, c5)."""
    r = inst.rmin
    out = []
    for c1 in TURNS:
        a = inst.start.turn_center(c1, r)
        for c3 in TURNS:
            for c5 in TURNS:
                out.append(PathClass(c1, c3, c5, a, inst.end.turn_center(c5, r)))
    return out


def mid_center(inst: ThreePointInstance, cls: PathClass, alpha: float) -> Point:
    """Center of the midpoint turn circle for heading ``alpha``."""
    return Pose.at(inst.mid, alpha).turn_center(cls.c3, inst.rmin)


def _exit_side(turn: str) -> str:
    # leaving a left (counterclockwise) turn, the circle center is on the left
    # of the travel direction, so the tangency point is on its right
    return "right" if turn == "L" else "left"


def segment_lines(inst: ThreePointInstance, cls: PathClass, xc: Point):
    """The two straight segments as directed lines (S2 then S4)."""
    r = inst.rmin
    mid_circle = Circle(xc, r)
    try:
        s2 = common_tangent(Circle(cls.center_a, r), mid_circle,
                            "outer" if cls.mu_a > 0 else "inner", _exit_side(cls.c1))
        s4 = common_tangent(mid_circle, Circle(cls.center_b, r),
                            "outer" if cls.mu_b > 0 else "inner", _exit_side(cls.c3))
    except InfeasibleTangent as exc:
        raise ClassInfeasible(f"{cls.word}: {exc}") from None
    return s2, s4


def _tangent_angle(x0, y0, x1, y1, r, turn_from, inner):
    """Travel direction of the common tangent leaving a ``turn_from`` circle."""
    dx, dy = x1 - x0, y1 - y0
    phi = math.atan2(dy, dx)
    if not inner:
        return phi
    d = math.hypot(dx, dy)
    if d <= 2.0 * r:
        raise ClassInfeasible(f"inner tangent needs center distance > {2.0 * r}, got {d}")
    tilt = math.asin(2.0 * r / d)
    return phi + tilt if turn_from == "L" else phi - tilt


def _segment_angles(inst, cls, alpha):
    """Turn center of the midpoint and travel angles of both straight segments.

    Float-only version of :func:`segment_lines`; this is the inner loop of the
    heading iteration.
    """
    r = inst.rmin
    m = inst.mid
    if cls.c3 == "L":
        cx, cy = m.x - r * math.sin(alpha), m.y + r * math.cos(alpha)
    else:
        cx, cy = m.x + r * math.sin(alpha), m.y - r * math.cos(alpha)
    a, b = cls.center_a, cls.center_b
    psi_i = _tangent_angle(a.x, a.y, cx, cy, r, cls.c1, cls.c1 != cls.c3)
    psi_f = _tangent_angle(cx, cy, b.x, b.y, r, cls.c3, cls.c3 != cls.c5)
    return cx, cy, psi_i, psi_f


def tangent_directions(inst: ThreePointInstance, cls: PathClass, xc: Point) -> tuple[Point, Point]:
    """Unit travel directions of the first and second straight segment."""
    s2, s4 = segment_lines(inst, cls, xc)
    return s2.direction, s4.direction


def bisector_heading(beta1: float, beta2: float) -> float:
    return 0.5 * (beta1 - beta2)


def approx_heading(inst: ThreePointInstance, cls: PathClass) -> float:
    """Closed-form estimate of the class-optimal midpoint heading.

    In the frame where the end turn centers ``A``, ``B`` lie on the +x axis
    the midpoint tangent line makes the angle ``(beta1 - beta2) / 2`` with
    that axis, ``beta1``/``beta2`` being the triangle angles at ``A`` and
    ``B``.  A line fixes the heading only up to a half turn; of the two
    directions we keep the one whose segment bisector points more closely
    from the turn center to the midpoint.
    """
    a, b, xm = cls.center_a, cls.center_b, inst.mid
    ab = b - a
    if ab.norm() <= 1e-12 * inst.rmin:
        raise GeometryError("end turn centers coincide")
    beta1 = unsigned_angle(ab, xm - a)
    beta2 = unsigned_angle(-ab, xm - b)
    side = 1.0 if ab.cross(xm - a) >= 0.0 else -1.0
    h = ab.angle() + side * bisector_heading(beta1, beta2)
    candidates = [h, h + math.pi]
    scores = [_alignment(inst, cls, c) for c in candidates]
    return mod2pi(candidates[1] if scores[1] > scores[0] else candidates[0])


def _alignment(inst: ThreePointInstance, cls: PathClass, alpha: float) -> float:
    try:
        g, vnorm = _misalignment(inst, cls, alpha)
    except ClassInfeasible:
        return -math.inf
    return 1.0 if vnorm < 1e-12 else math.cos(g)


def error_bound(cls: PathClass | str, equal_distances: bool = False) -> float:
    """Worst-case gap between the approximate and the optimal heading."""
    word = cls if isinstance(cls, str) else cls.word
    if len(word) == 3:
        word = f"{word[0]}S{word[1]}S{word[2]}"
    if word in _SYMMETRIC_WORDS:
        if equal_distances:
            return 0.0
        return math.pi / 9.0 if word[0] == word[2] == word[4] else math.pi / 5.0
    return 11.0 * math.pi / 36.0


def _misalignment(inst, cls, alpha):
    """Signed angle from the segment bisector to the center->midpoint vector.

    The bisector is ``e_i - e_f`` for travel directions ``e_i``, ``e_f``:
    it is the sum of the first direction and the reversed second one.
    Returns the angle and the bisector's length.
    """
    cx, cy, psi_i, psi_f = _segment_angles(inst, cls, alpha)
    vx = math.cos(psi_i) - math.cos(psi_f)
    vy = math.sin(psi_i) - math.sin(psi_f)
    mx, my = inst.mid.x - cx, inst.mid.y - cy
    return math.atan2(vx * my - vy * mx, vx * mx + vy * my), math.hypot(vx, vy)


def iterate_heading(inst: ThreePointInstance, cls: PathClass, alpha0: float,
                    tol: float = 1e-12, max_iter: int = 64) -> HeadingIteration:
    """Rotate the midpoint turn center until the segment bisector points at the midpoint.

    Each correction rotates the heading by the current misalignment angle;
    after the first step the correction is rescaled by a secant estimate of
    how fast the misalignment changes with the heading.  A step is only
    accepted if it reduces the misalignment, otherwise it is halved.

    When the two segments become parallel and equally directed (the middle
    arc vanishes or is a full turn) the bisector is undefined; the exact
    heading of that configuration is located by root finding and returned
    with status ``"degenerate"``.

    Raises :class:`ClassInfeasible` if the class cannot be built at ``alpha0``.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    alpha = float(alpha0)
    g, vnorm = _misalignment(inst, cls, alpha)
    prev = None
    it = 0
    while it < max_iter:
        if vnorm < tol:
            return HeadingIteration(mod2pi(alpha), it, "degenerate")
        if abs(g) < tol:
            return HeadingIteration(mod2pi(alpha), it, "aligned")
        it += 1
        step = g
        secant = False
        if prev is not None:
            slope = (g - prev[1]) / (alpha - prev[0]) if alpha != prev[0] else 0.0
            if 0.05 < slope < 20.0:
                step = g / slope
                secant = True
        accepted = None
        lam = 1.0
        while lam > 1e-9:
            trial = alpha - lam * step
            try:
                tg, tn = _misalignment(inst, cls, trial)
            except ClassInfeasible:
                tg = math.inf
            if abs(tg) < abs(g):
                accepted = (trial, tg, tn)
                break
            if secant:
                # the secant guess failed; fall back to the plain correction
                step, secant = g, False
            else:
                lam *= 0.5
        if accepted is None:
            # no descent possible: we are sitting at the parallel-segment
            # discontinuity of the bisector
            alpha_d = _parallel_heading(inst, cls, alpha)
            if alpha_d is not None:
                return HeadingIteration(mod2pi(alpha_d), it, "degenerate")
            return HeadingIteration(mod2pi(alpha), it, "max_iter")
        prev = (alpha, g)
        alpha, g, vnorm = accepted
    if vnorm < tol:
        return HeadingIteration(mod2pi(alpha), it, "degenerate")
    if abs(g) < tol:
        return HeadingIteration(mod2pi(alpha), it, "aligned")
    return HeadingIteration(mod2pi(alpha), it, "max_iter")


def _parallel_heading(inst, cls, alpha, reach=0.5):
    """Heading near ``alpha`` at which both segments share one direction."""

    def gap(a):
        _, _, psi_i, psi_f = _segment_angles(inst, cls, a)
        return wrap_pi(psi_f - psi_i)

    try:
        g0 = gap(alpha)
    except ClassInfeasible:
        return None
    if g0 == 0.0:
        return alpha
    width = 1e-9
    while width < reach:
        for other in (alpha - width, alpha + width):
            try:
                g1 = gap(other)
            except ClassInfeasible:
                continue
            # a sign change through +-pi is the wrap, not the root
            if g1 == 0.0:
                return other
            if (g1 > 0.0) != (g0 > 0.0) and abs(g1) < 1.0 and abs(g0) < 1.0:
                lo, hi = sorted((alpha, other))
                return brentq(gap, lo, hi, xtol=1e-15, rtol=1e-15)
        width *= 4.0
    return None


def inverted_segment_circles(inst: ThreePointInstance, cls: PathClass, alpha: float):
    """Images of the two straight segments under inversion in circle(mid, rmin)."""
    s2, s4 = segment_lines(inst, cls, mid_center(inst, cls, alpha))
    inv = Circle(inst.mid, inst.rmin)
    c = invert_line(s2, inv)
    d = invert_line(s4, inv)
    if not (isinstance(c, Circle) and isinstance(d, Circle)):
        raise GeometryError("a straight segment passes through the midpoint")
    return c, d


def residuals(inst: ThreePointInstance, cls: PathClass, alpha: float) -> OptimalityResidual:
    """Residuals of the inversive optimality conditions at heading ``alpha``.

    Conventions, checked numerically against the explicit construction: the
    frame puts ``A`` at the origin and ``B`` on the +x axis and is mirrored
    when the middle turn is a left turn, so the middle turn is always a right
    turn there.  ``beta1`` is the signed angle of ``mid - A``, ``beta2`` the
    signed angle from ``A - B`` to ``mid - B`` measured clockwise, and
    ``theta`` is read off the directions from the midpoint to the inverted
    circle centers ``C`` and ``D`` (``pi + alpha - theta`` and
    ``alpha + theta``).  With ``R`` the inverted radius, at the optimum::

        1 / (2 (mu_a + |A mid| cos(beta1 + theta - alpha))) = R
        1 / (2 (mu_b + |B mid| cos(beta2 + theta + alpha))) = R
        1 / (2 (1 - sin(theta)))                            = R
    """
    r = inst.rmin
    a, b, xm = cls.center_a, cls.center_b, inst.mid
    ab = b - a
    if ab.norm() <= 1e-12 * r:
        raise GeometryError("end turn centers coincide")
    da = (xm - a).norm() / r
    db = (xm - b).norm() / r
    if da <= 1.0 + 1e-12 or db <= 1.0 + 1e-12:
        raise GeometryError("midpoint lies inside an end turn circle")
    c, d = inverted_segment_circles(inst, cls, alpha)

    rot = -ab.angle()
    flip = 1.0 if cls.c3 == "R" else -1.0

    def frame(p: Point) -> Point:
        q = rotate(p - a, rot) * (1.0 / r)
        return Point(q.x, flip * q.y)

    m, cf, df, bf = frame(xm), frame(c.center), frame(d.center), frame(b)
    al = wrap_pi(flip * (alpha + rot))
    beta1 = m.angle()
    beta2 = wrap_pi(math.pi - (m - bf).angle())
    theta_c = wrap_pi(math.pi + al - (cf - m).angle())
    theta_d = wrap_pi((df - m).angle() - al)
    theta = 0.5 * (theta_c + theta_d)
    big_r = 0.5 * (c.radius + d.radius) / r

    # each equation reads 1 / (2 * q_k) = R; compared as 2 * q_k - 1 / R so the
    # residual stays well conditioned when a segment nearly touches the midpoint
    # and R grows without bound
    inv_r = 1.0 / big_r
    r1 = 2.0 * (cls.mu_a + da * math.cos(beta1 + theta - al)) - inv_r
    r2 = 2.0 * (cls.mu_b + db * math.cos(beta2 + theta + al)) - inv_r
    r3 = 2.0 * (1.0 - math.sin(theta)) - inv_r
    return OptimalityResidual(r1, r2, r3, theta, big_r * r, beta1, beta2)


def two_leg(inst: ThreePointInstance, alpha: float) -> tuple[DubinsPath, DubinsPath]:
    m = Pose.at(inst.mid, alpha)
    return solve_pair(inst.start, m, inst.rmin), solve_pair(m, inst.end, inst.rmin)


def two_leg_length(inst: ThreePointInstance, alpha: float) -> float:
    m = Pose.at(inst.mid, alpha)
    return pair_length(inst.start, m, inst.rmin) + pair_length(m, inst.end, inst.rmin)


def class_length(inst: ThreePointInstance, cls: PathClass, alpha: float) -> float:
    """Length of the fixed-pattern C S C S C path at heading ``alpha`` (inf if infeasible)."""
    m = Pose.at(inst.mid, alpha)
    p = word_path(inst.start, m, inst.rmin, f"{cls.c1}S{cls.c3}")
    q = word_path(m, inst.end, inst.rmin, f"{cls.c3}S{cls.c5}")
    if p is None or q is None:
        return math.inf
    return p.total_length + q.total_length


def _batch_two_leg(inst: ThreePointInstance, heads: np.ndarray) -> np.ndarray:
    s, m, e, r = inst.start, inst.mid, inst.end, inst.rmin
    return (batch_lengths(s.x, s.y, s.theta, m.x, m.y, heads, r)
            + batch_lengths(m.x, m.y, heads, e.x, e.y, e.theta, r))


def discretize_heading(inst: ThreePointInstance, k: int) -> tuple[float, float]:
    """Best of ``k`` equally spaced midpoint headings ``2*pi*j/k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    best_h, best_len = 0.0, math.inf
    for j in range(k):
        h = TWO_PI * j / k
        total = two_leg_length(inst, h)
        if total < best_len:
            best_h, best_len = h, total
    return best_h, best_len


def _refine(inst: ThreePointInstance, center: float, half_width: float) -> tuple[float, float]:
    res = minimize_scalar(lambda a: two_leg_length(inst, a),
                          bounds=(center - half_width, center + half_width),
                          method="bounded", options={"xatol": 1e-10})
    return mod2pi(res.x), float(res.fun)


def refined_discretization(inst: ThreePointInstance, k: int, n_local: int = 3) -> tuple[float, float]:
    """Discretized search followed by bounded 1-D refinement of the best local minima."""
    heads = [TWO_PI * j / k for j in range(k)]
    vals = _batch_two_leg(inst, np.asarray(heads)).tolist()
    minima = [j for j in range(k) if vals[j] <= vals[j - 1] and vals[j] <= vals[(j + 1) % k]]
    minima.sort(key=lambda j: vals[j])
    best_h, best_len = min(zip(heads, vals), key=lambda t: t[1])
    for j in minima[:n_local]:
        h, total = _refine(inst, heads[j], TWO_PI / k)
        if total < best_len:
            best_h, best_len = h, total
    return best_h, best_len


def _solution(inst, alpha, cls, iterations, method) -> ThreePointSolution:
    p, q = two_leg(inst, alpha)
    return ThreePointSolution(mod2pi(alpha), cls, p, q, iterations, method)


def solve_class(inst: ThreePointInstance, cls: PathClass, opts: SolveOptions = SolveOptions()):
    """Approximate, then iterate, one class; ``None`` if the class is infeasible."""
    try:
        a0 = approx_heading(inst, cls)
        return a0, iterate_heading(inst, cls, a0, opts.tol, opts.max_iter)
    except GeometryError:
        return None


def solve_approx(inst: ThreePointInstance) -> ThreePointSolution:
    """Best class using the closed-form heading only, without iterating."""
    best = None
    for cls in enumerate_classes(inst):
        try:
            a0 = approx_heading(inst, cls)
        except GeometryError:
            continue
        total = two_leg_length(inst, a0)
        if best is None or total < best[0]:
            best = (total, a0, cls)
    if best is None:
        h, _ = discretize_heading(inst, 1)
        return _solution(inst, h, None, 0, "discretized-fallback")
    return _solution(inst, best[1], best[2], 0, "approx")


def solve_three_point(inst: ThreePointInstance, opts: SolveOptions | None = None) -> ThreePointSolution:
    """Shortest path from ``inst.start`` through ``inst.mid`` to ``inst.end``.

    Every feasible class is solved and the shortest concatenation of pairwise
    optimal legs wins; lengths within a relative ``1e-12`` are ties and go to
    the earlier class.  Below ``4 * rmin`` separation a refined discretized
    search also competes.
    """
    opts = opts or SolveOptions()
    best = None
    for cls in enumerate_classes(inst):
        out = solve_class(inst, cls, opts)
        if out is None:
            continue
        it = out[1]
        total = two_leg_length(inst, it.alpha)
        if best is None or total < best[0] - _TIE * best[0]:
            best = (total, it.alpha, cls, it.iterations, "iterative")
    if best is None or inst.min_pairwise_distance() < 4.0 * inst.rmin:
        h, total = refined_discretization(inst, opts.fallback_k)
        if best is None or total < best[0] - _TIE * best[0]:
            best = (total, h, None, 0, "discretized-fallback")
    return _solution(inst, *best[1:])
