"""A small version of the random-instance benchmark.

Runs 200 instances in a 10 x 10 square with all points at least 4 apart,
then 200 with some pair closer than that, and prints the summary the
``dubins3 bench`` command prints.
"""

from dubins3.cli import bench_summary, random_instances, run_bench

for lo, hi in ((4.0, float("inf")), (1.0, 4.0)):
    insts = random_instances(200, 10.0, lo, seed=1, max_dist=hi)
    results = run_bench(insts, 360, repeats=3)
    records = [r for r, _ in results]
    print(f"--- min pairwise distance in [{lo}, {hi})")
    print("\n".join(bench_summary(records, [t for _, t in results])))
    words = {}
    for r in records:
        words[r.winning_class] = words.get(r.winning_class, 0) + 1
    print("winners", dict(sorted(words.items())))
    print()
