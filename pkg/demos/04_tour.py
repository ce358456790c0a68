"""Closed tours: build one, then shorten it with heading updates and reinsertion."""

import random

from dubins3 import Point, RefineConfig, construct_initial_tour, post_process
from dubins3.dubins import solve_pair

rng = random.Random(3)
pts = [Point(rng.uniform(0, 20), rng.uniform(0, 20)) for _ in range(20)]

# headings pointing at the next point, and the best of 8 fixed headings
naive = construct_initial_tour(pts, 1.0, 1)
eight = construct_initial_tour(pts, 1.0, 8)
print("disc 1", round(naive.total_length, 3), " disc 8", round(eight.total_length, 3))

for start in (naive, eight):
    trace = []
    out = post_process(start, RefineConfig(rng_seed=0), trace)
    print("refined", round(out.total_length, 3), "after", len(trace) - 1, "rounds",
          f"({100 * (1 - out.total_length / start.total_length):.1f}% shorter)")
    print("  trace", [round(t, 2) for t in trace])

# the legs of the final tour, for plotting
n = len(out)
for i in range(n):
    leg = solve_pair(out.poses[i], out.poses[(i + 1) % n], out.rmin)
    print(f"{i:2d} {leg.word} {leg.total_length:7.3f}")
