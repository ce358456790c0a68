"""Point-to-point Dubins paths: the building block everything else concatenates."""

import math

from dubins3 import Pose, endpoint, sample_path, solve_pair
from dubins3.dubins import WORDS, word_path

start = Pose(0.0, 0.0, 0.0)
goal = Pose(4.0, 3.0, math.pi / 2)

# all six words, the infeasible ones show up as None
for w in WORDS:
    p = word_path(start, goal, 1.0, w)
    print(w, None if p is None else round(p.total_length, 4))

best = solve_pair(start, goal, 1.0)
print("shortest", best.word, [round(s, 4) for s in best.segment_lengths], round(best.total_length, 4))

# replaying the word lands on the goal
print("endpoint", endpoint(best, start))

# turning around in place needs a CCC path of length 7*pi/3
back = solve_pair(Pose(0, 0, 0), Pose(0, 0, math.pi), 1.0)
print("u-turn", back.word, back.total_length, 7 * math.pi / 3)

# lengths scale with the turning radius
for r in (0.5, 1.0, 2.0):
    g = Pose(4 * r, 3 * r, math.pi / 2)
    print("rmin", r, solve_pair(Pose(0, 0, 0), g, r).total_length / r)

pts = sample_path(best, start, 0.5)
print(len(pts), "samples, last", pts[-1])
