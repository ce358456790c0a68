"""Closed Dubins tours and their local post-processing.

A tour visits every point once and returns to the first.  Two moves shorten
it: re-solving the heading at one point against its neighbors' current poses,
and deleting a random point then reinserting it into the cheapest gap.  Both
use the three-point solver, and both only accept strict improvements.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .dubins import Pose, pair_length
from .geometry import TWO_PI, Point
from .three_point import SolveOptions, ThreePointInstance, solve_three_point


@dataclass(frozen=True)
class Tour:
    """Cyclic sequence of poses; ``total_length`` is recomputed on construction."""

    poses: tuple[Pose, ...]
    rmin: float
    total_length: float = field(init=False)

    def __post_init__(self):
        if not (self.rmin > 0.0 and math.isfinite(self.rmin)):
            raise ValueError("rmin must be positive and finite")
        object.__setattr__(self, "poses", tuple(self.poses))
        object.__setattr__(self, "total_length", sum(self.leg_lengths()))

    def __len__(self) -> int:
        return len(self.poses)

    def leg_lengths(self) -> list[float]:
        """Length of leg ``i``, from pose ``i`` to pose ``i + 1`` (cyclically)."""
        n = len(self.poses)
        return [pair_length(self.poses[i], self.poses[(i + 1) % n], self.rmin) for i in range(n)]

    def points(self) -> list[Point]:
        return [p.position for p in self.poses]

    def transformed(self, angle: float = 0.0, shift: Point = Point(0.0, 0.0), scale: float = 1.0) -> "Tour":
        c, s = math.cos(angle), math.sin(angle)
        poses = [Pose(scale * (c * p.x - s * p.y) + shift.x,
                      scale * (s * p.x + c * p.y) + shift.y, p.theta + angle)
                 for p in self.poses]
        return Tour(poses, self.rmin * scale)

    def to_dict(self) -> dict:
        return {"rmin": self.rmin,
                "poses": [{"x": p.x, "y": p.y, "theta": p.theta} for p in self.poses]}

    @classmethod
    def from_dict(cls, data: dict) -> "Tour":
        poses = [Pose(float(p["x"]), float(p["y"]), float(p["theta"])) for p in data["poses"]]
        if len(poses) < 3:
            raise ValueError("a tour needs at least 3 poses")
        return cls(poses, float(data["rmin"]))


def save_tour(tour: Tour, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tour.to_dict(), indent=2) + "\n")


def load_tour(path: str | Path) -> Tour:
    return Tour.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class RefineConfig:
    rng_seed: int = 0
    improvement_eps: float = 1e-6
    max_stale_rounds: int = 3
    three_point_opts: SolveOptions = SolveOptions()
    # delete/reinsert moves after each heading sweep
    moves_per_round: int = 1

    def __post_init__(self):
        if not self.improvement_eps > 0.0:
            raise ValueError("improvement_eps must be positive")
        if self.moves_per_round < 0:
            raise ValueError("moves_per_round must be non-negative")
        if self.max_stale_rounds < 1:
            raise ValueError("max_stale_rounds must be at least 1")


# ordering

def _euclid_length(points: list[Point], order: list[int]) -> float:
    n = len(order)
    return sum((points[order[(i + 1) % n]] - points[order[i]]).norm() for i in range(n))


def nearest_neighbor_order(points: list[Point]) -> list[int]:
    left = set(range(1, len(points)))
    order = [0]
    while left:
        last = points[order[-1]]
        # ties go to the lower index
        nxt = min(left, key=lambda j: ((points[j] - last).norm(), j))
        order.append(nxt)
        left.remove(nxt)
    return order


def two_opt(points: list[Point], order: list[int]) -> list[int]:
    """First-improvement 2-opt on Euclidean distances."""
    order = list(order)
    n = len(order)

    def d(a, b):
        return (points[a] - points[b]).norm()

    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            for j in range(i + 2, n if i > 0 else n - 1):
                a, b = order[i], order[i + 1]
                c, e = order[j], order[(j + 1) % n]
                if d(a, c) + d(b, e) < d(a, b) + d(c, e) - 1e-12:
                    order[i + 1:j + 1] = reversed(order[i + 1:j + 1])
                    improved = True
    return order


def construct_initial_tour(points: list[Point], rmin: float, disc_k: int = 1) -> Tour:
    """Nearest-neighbor plus 2-opt ordering, then headings.

    With ``disc_k == 1`` every heading points at the successor.  Otherwise
    each point in turn switches to the best of ``disc_k`` evenly spaced
    headings whenever that shortens its two adjacent legs.
    """
    if len(points) < 3:
        raise ValueError("a tour needs at least 3 points")
    if disc_k < 1:
        raise ValueError("disc_k must be at least 1")
    order = two_opt(points, nearest_neighbor_order(points))
    pts = [points[i] for i in order]
    n = len(pts)
    poses = [Pose.at(pts[i], (pts[(i + 1) % n] - pts[i]).angle()) for i in range(n)]
    if disc_k > 1:
        cands = [TWO_PI * j / disc_k for j in range(disc_k)]
        for i in range(n):
            prev, nxt = poses[i - 1], poses[(i + 1) % n]

            def local(p):
                return pair_length(prev, p, rmin) + pair_length(p, nxt, rmin)

            best = local(poses[i])
            for h in cands:
                p = Pose.at(pts[i], h)
                cost = local(p)
                if cost < best:
                    best, poses[i] = cost, p
    return Tour(poses, rmin)


# post-processing moves

def _solve_at(prev: Pose, x: Point, nxt: Pose, rmin: float, opts: SolveOptions):
    return solve_three_point(ThreePointInstance(prev, x, nxt, rmin), opts)


def refine_headings(tour: Tour, eps: float = 1e-6, opts: SolveOptions | None = None) -> Tour:
    """One sweep of heading updates; each must cut its two legs by more than ``eps``."""
    opts = opts or SolveOptions()
    poses = list(tour.poses)
    legs = tour.leg_lengths()
    n = len(poses)
    for i in range(n):
        sol = _solve_at(poses[i - 1], poses[i].position, poses[(i + 1) % n], tour.rmin, opts)
        if legs[i - 1] + legs[i] - sol.total_length > eps:
            poses[i] = Pose.at(poses[i].position, sol.heading)
            legs[i - 1] = sol.first_leg.total_length
            legs[i] = sol.second_leg.total_length
    return Tour(poses, tour.rmin)


def delete_reinsert(tour: Tour, rng: random.Random, eps: float = 1e-6,
                    opts: SolveOptions | None = None) -> Tour:
    """Remove a random point and put it back into the cheapest gap.

    Gap costs use the three-point solve between the gap's current poses; the
    neighbors keep their headings.  Staying put is always a candidate, so the
    tour never gets longer.
    """
    n = len(tour)
    if n < 4:
        raise ValueError("delete_reinsert needs at least 4 poses")
    opts = opts or SolveOptions()
    r = tour.rmin
    i = rng.randrange(n)
    legs = tour.leg_lengths()
    rest = list(tour.poses[i + 1:]) + list(tour.poses[:i])
    x = tour.poses[i].position
    # rest is cyclic and the original slot is the gap rest[-1] -> rest[0]
    closing = pair_length(rest[-1], rest[0], r)
    base = tour.total_length - legs[i - 1] - legs[i] + closing
    best_total, best = tour.total_length, None
    for g in range(len(rest)):
        a, b = rest[g - 1], rest[g]
        gap = closing if g == 0 else pair_length(a, b, r)
        sol = _solve_at(a, x, b, r, opts)
        total = base - gap + sol.total_length
        if total < best_total - eps:
            best_total, best = total, (g, Pose.at(x, sol.heading))
    if best is None:
        return tour
    g, pose = best
    return Tour(rest[:g] + [pose] + rest[g:], r)


def post_process(tour: Tour, cfg: RefineConfig = RefineConfig(),
                 trace: list[float] | None = None) -> Tour:
    """Alternate heading sweeps and delete/reinsert moves until progress stalls.

    A round is one sweep followed by ``cfg.moves_per_round`` deletions.  The
    loop ends after ``cfg.max_stale_rounds`` consecutive rounds that gain no
    more than ``cfg.improvement_eps``.  If ``trace`` is given, the length after
    every round is appended to it.
    """
    rng = random.Random(cfg.rng_seed)
    eps, opts = cfg.improvement_eps, cfg.three_point_opts
    if trace is not None:
        trace.append(tour.total_length)
    stale = 0
    while stale < cfg.max_stale_rounds:
        before = tour.total_length
        tour = refine_headings(tour, eps, opts)
        if len(tour) >= 4:
            for _ in range(cfg.moves_per_round):
                tour = delete_reinsert(tour, rng, eps, opts)
        if trace is not None:
            trace.append(tour.total_length)
        stale = stale + 1 if before - tour.total_length <= eps else 0
    return tour
