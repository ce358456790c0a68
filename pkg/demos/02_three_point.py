"""One three-point instance, solved four ways.

The midpoint heading is free.  The closed-form guess comes from the triangle
of the midpoint and the two end turn centers; the iteration then rotates the
middle turn circle until the bisector of the two straight segments points at
the midpoint.
"""

import math

from dubins3 import Circle, Point, Pose, ThreePointInstance
from dubins3.three_point import (
    approx_heading,
    discretize_heading,
    enumerate_classes,
    error_bound,
    inverted_segment_circles,
    residuals,
    solve_approx,
    solve_class,
    solve_three_point,
)

inst = ThreePointInstance(Pose(0.5, 1.0, 0.3), Point(6.0, 7.5), Pose(9.0, 0.5, 5.2))
print("pairwise distances", [round(d, 3) for d in inst.pairwise_distances()])

# every class: guess, converged heading, and how far apart they are
for cls in enumerate_classes(inst):
    out = solve_class(inst, cls)
    if out is None:
        print(cls.word, "infeasible")
        continue
    a0, it = out
    gap = abs(math.remainder(a0 - it.alpha, 2 * math.pi))
    print(f"{cls.word}  guess {a0:.4f}  final {it.alpha:.4f}  gap {gap:.4f}  "
          f"bound {error_bound(cls):.4f}  iters {it.iterations}  {it.status}")

sol = solve_three_point(inst)
print("\nbest", sol.word, "heading", round(sol.heading, 6), "length", round(sol.total_length, 6))
print("legs", sol.first_leg.word, round(sol.first_leg.total_length, 4),
      sol.second_leg.word, round(sol.second_leg.total_length, 4))

# the baselines
ap = solve_approx(inst)
for k in (8, 36, 360):
    h, total = discretize_heading(inst, k)
    print(f"{k:4d} headings: {total:.6f}  ({100 * (total - sol.total_length) / sol.total_length:+.4f}%)")
print(f"approx only : {ap.total_length:.6f}  ({100 * (ap.total_length - sol.total_length) / sol.total_length:+.4f}%)")

# inverted in the unit circle at the midpoint, the two straight segments
# become circles of equal radius at the optimum
c, d = inverted_segment_circles(inst, sol.path_class, sol.heading)
print("\ninverted radii", c.radius, d.radius)
res = residuals(inst, sol.path_class, sol.heading)
print("residuals", res.r1, res.r2, res.r3)
print("half-angle theta", res.theta, "R", res.big_r)

# slightly off the optimum the conditions fail
print("residual 0.1 rad away", residuals(inst, sol.path_class, sol.heading + 0.1).max_abs)
print("guess for the winner", approx_heading(inst, sol.path_class))
