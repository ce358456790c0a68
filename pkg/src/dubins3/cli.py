"""Command-line front end.

Subcommands::

    solve3  solve one three-point instance from a JSON file
    bench   random-instance benchmark against the discretized baseline
    tour    build and post-process a closed tour through a point set
    sample  emit sampled path polylines for plotting

Exit status is 0 on success and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .dubins import Pose, sample_path, solve_pair
from .geometry import GeometryError, Point
from .three_point import (
    SolveOptions,
    ThreePointInstance,
    ThreePointSolution,
    discretize_heading,
    residuals,
    solve_approx,
    solve_three_point,
    two_leg,
)
from .tour import RefineConfig, Tour, construct_initial_tour, post_process, save_tour


class InputError(Exception):
    """Bad user input; reported on stderr with exit status 2."""


# ---- I/O


def _num(obj: dict, key: str, where: str) -> float:
    try:
        v = float(obj[key])
    except KeyError:
        raise InputError(f"{where}: missing {key!r}") from None
    except (TypeError, ValueError):
        raise InputError(f"{where}: {key!r} is not a number") from None
    if not math.isfinite(v):
        raise InputError(f"{where}: {key!r} must be finite, got {v}")
    return v


def _read_json(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def parse_instance(data: dict) -> ThreePointInstance:
    try:
        s, m, e = data["start"], data["mid"], data["end"]
    except KeyError as exc:
        raise InputError(f"instance: missing {exc.args[0]!r}") from None
    rmin = _num(data, "rmin", "instance") if "rmin" in data else 1.0
    if rmin <= 0.0:
        raise InputError("instance: rmin must be positive")
    return ThreePointInstance(
        Pose(_num(s, "x", "start"), _num(s, "y", "start"), _num(s, "theta", "start")),
        Point(_num(m, "x", "mid"), _num(m, "y", "mid")),
        Pose(_num(e, "x", "end"), _num(e, "y", "end"), _num(e, "theta", "end")),
        rmin,
    )


def instance_to_dict(inst: ThreePointInstance) -> dict:
    s, m, e = inst.start, inst.mid, inst.end
    return {"rmin": inst.rmin,
            "start": {"x": s.x, "y": s.y, "theta": s.theta},
            "mid": {"x": m.x, "y": m.y},
            "end": {"x": e.x, "y": e.y, "theta": e.theta}}


def read_points(path: str) -> list[Point]:
    """Points from a CSV of ``x,y`` rows; blank lines, ``#`` comments and a header are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    pts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if lineno == 1 and row[0].strip().lower() == "x":
            continue
        try:
            x, y = (float(v) for v in row[:2])
            if len(row) > 2 and any(v.strip() for v in row[2:]):
                raise ValueError
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected 'x,y', got {','.join(row)!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InputError(f"{path}:{lineno}: coordinates must be finite")
        pts.append(Point(x, y))
    return pts


def _read_tour(path: str) -> Tour:
    data = _read_json(path)
    rmin = _num(data, "rmin", "tour")
    poses = data.get("poses")
    if not isinstance(poses, list) or len(poses) < 3:
        raise InputError("tour: need a list of at least 3 poses")
    out = []
    for k, p in enumerate(poses):
        if not isinstance(p, dict):
            raise InputError(f"tour: pose {k} is not an object")
        out.append(Pose(_num(p, "x", f"pose {k}"), _num(p, "y", f"pose {k}"), _num(p, "theta", f"pose {k}")))
    if rmin <= 0.0:
        raise InputError("tour: rmin must be positive")
    return Tour(out, rmin)


def _write_rows(rows, out: str | None, header=("x", "y", "theta")) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def _polyline(legs, start: Pose, step: float) -> list[tuple[float, float, float]]:
    rows, pose = [], start
    for k, leg in enumerate(legs):
        pts = sample_path(leg, pose, step)
        rows += [(p.x, p.y, p.theta) for p in (pts if k == 0 else pts[1:])]
        pose = pts[-1]
    return rows


# ---- solve3


def _report(inst: ThreePointInstance, sol: ThreePointSolution) -> list[str]:
    lines = [
        f"heading     {sol.heading:.12f}",
        f"word        {sol.word}",
        f"method      {sol.method}",
        f"leg1        {sol.first_leg.word} {sol.first_leg.total_length:.12f}",
        f"leg2        {sol.second_leg.word} {sol.second_leg.total_length:.12f}",
        f"total       {sol.total_length:.12f}",
        f"iterations  {sol.iterations}",
    ]
    if sol.path_class is not None:
        try:
            res = residuals(inst, sol.path_class, sol.heading)
            lines.append(f"residuals   {res.r1:.3e} {res.r2:.3e} {res.r3:.3e} (max {res.max_abs:.3e})")
        except GeometryError as exc:
            lines.append(f"residuals   n/a ({exc})")
    return lines


def cmd_solve3(args) -> int:
    inst = parse_instance(_read_json(args.instance))
    if args.disc_only is not None:
        if args.disc_only < 1:
            raise InputError("--disc-only must be at least 1")
        h, _ = discretize_heading(inst, args.disc_only)
        p, q = two_leg(inst, h)
        sol = ThreePointSolution(h, None, p, q, 0, "discretized")
    else:
        sol = solve_three_point(inst, SolveOptions(tol=args.tol))
    print("\n".join(_report(inst, sol)))
    if args.sample:
        rows = _polyline((sol.first_leg, sol.second_leg), inst.start, args.sample)
        if args.sample_out:
            _write_rows(rows, args.sample_out)
        else:
            print()
            _write_rows(rows, None)
    return 0


# ---- bench


@dataclass
class BenchRecord:
    instance_id: int
    min_pairwise_dist: float
    len_approx: float
    len_iter: float
    len_disc: float
    dev_approx_pct: float
    dev_iter_pct: float
    t_iter_ns: int
    t_disc_ns: int
    winning_class: str
    iterations: int


BENCH_COLUMNS = tuple(f.name for f in fields(BenchRecord))


def random_instances(n: int, env_size: float, min_dist: float, seed: int,
                     max_dist: float = math.inf, rmin: float = 1.0,
                     max_attempts: int = 100_000) -> list[ThreePointInstance]:
    """Uniform instances whose smallest pairwise distance lies in ``[min_dist, max_dist)``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        for _ in range(max_attempts):
            xy = rng.uniform(0.0, env_size, size=(3, 2))
            th = rng.uniform(0.0, 2.0 * math.pi, size=2)
            inst = ThreePointInstance(Pose(xy[0, 0], xy[0, 1], th[0]), Point(xy[1, 0], xy[1, 1]),
                                      Pose(xy[2, 0], xy[2, 1], th[1]), rmin)
            if min_dist <= inst.min_pairwise_distance() < max_dist:
                out.append(inst)
                break
        else:
            raise InputError(f"no instance with min distance in [{min_dist}, {max_dist}) "
                             f"after {max_attempts} attempts in a {env_size} env")
    return out


def _median_ns(fn, repeats: int) -> int:
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        ts.append(time.perf_counter_ns() - t0)
    return int(statistics.median(ts))


def bench_one(job) -> tuple[BenchRecord, int]:
    """One record plus the approximate-solver time, which the CSV does not carry."""
    i, inst, k, repeats = job
    it = solve_three_point(inst)
    ap = solve_approx(inst)
    _, len_disc = discretize_heading(inst, k)
    t_iter = t_disc = t_approx = 0
    if repeats:
        t_iter = _median_ns(lambda: solve_three_point(inst), repeats)
        t_disc = _median_ns(lambda: discretize_heading(inst, k), repeats)
        t_approx = _median_ns(lambda: solve_approx(inst), repeats)
    rec = BenchRecord(
        i, inst.min_pairwise_distance(), ap.total_length, it.total_length, len_disc,
        100.0 * (ap.total_length - len_disc) / len_disc, 100.0 * (it.total_length - len_disc) / len_disc,
        t_iter, t_disc, it.word, it.iterations)
    return rec, t_approx


def _workers() -> int:
    cap = os.environ.get("DUBINS3_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InputError(f"DUBINS3_THREADS must be an integer, got {cap!r}") from None
    return n


def run_bench(instances, k: int, repeats: int = 5, workers: int = 1):
    jobs = [(i, inst, k, repeats) for i, inst in enumerate(instances)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            # map keeps instance order whatever the completion order
            return list(pool.map(bench_one, jobs, chunksize=16))
    return [bench_one(j) for j in jobs]


def bench_summary(records: list[BenchRecord], t_approx: list[int]) -> list[str]:
    da = np.array([r.dev_approx_pct for r in records])
    di = np.array([r.dev_iter_pct for r in records])
    lines = [f"instances {len(records)}"]
    for name, dev in (("approx", da), ("iter", di)):
        p = np.percentile(dev, [0, 5, 50, 95, 100])
        lines.append(f"dev_{name}_pct mean {dev.mean():+.4f} min {p[0]:+.4f} p5 {p[1]:+.4f} "
                     f"median {p[2]:+.4f} p95 {p[3]:+.4f} max {p[4]:+.4f}")
    if all(r.t_iter_ns > 0 for r in records):
        f_iter = [r.t_disc_ns / r.t_iter_ns for r in records]
        lines.append(f"runtime factor disc/iter median {statistics.median(f_iter):.2f}")
        if all(t > 0 for t in t_approx):
            f_ap = [r.t_disc_ns / t for r, t in zip(records, t_approx)]
            lines.append(f"runtime factor disc/approx median {statistics.median(f_ap):.2f}")
    bins: dict[float, list[BenchRecord]] = {}
    for r in records:
        bins.setdefault(math.floor(r.min_pairwise_dist / 0.5) * 0.5, []).append(r)
    lines.append("min_dist_bin count mean_dev_approx_pct mean_dev_iter_pct")
    for b in sorted(bins):
        rs = bins[b]
        lines.append(f"{b:5.1f} {len(rs):6d} {statistics.fmean(r.dev_approx_pct for r in rs):+.4f} "
                     f"{statistics.fmean(r.dev_iter_pct for r in rs):+.4f}")
    return lines


def write_bench_csv(records: list[BenchRecord], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in records:
        d = asdict(r)
        w.writerow([repr(v) if isinstance(v, float) else v for v in (d[c] for c in BENCH_COLUMNS)])


def cmd_bench(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    if args.disc < 1:
        raise InputError("--disc must be at least 1")
    insts = random_instances(args.n, args.env_size, args.min_dist, args.seed, args.max_dist)
    results = run_bench(insts, args.disc, 0 if args.no_timing else args.repeats, _workers())
    records = [r for r, _ in results]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_bench_csv(records, fh)
    else:
        write_bench_csv(records, sys.stdout)
    print("\n".join(bench_summary(records, [t for _, t in results])),
          file=sys.stderr if not args.out else sys.stdout)
    return 0


# ---- tour


def cmd_tour(args) -> int:
    if args.in_tour:
        tour = _read_tour(args.in_tour)
    elif args.points:
        pts = read_points(args.points)
        if len(pts) < 3:
            raise InputError(f"{args.points}: need at least 3 points, got {len(pts)}")
        tour = construct_initial_tour(pts, args.rmin, args.construct)
    else:
        raise InputError("give --points or --in-tour")
    before = tour.total_length
    if args.refine:
        eps = args.eps if args.eps is not None else 1e-6 * tour.rmin
        tour = post_process(tour, RefineConfig(rng_seed=args.seed, improvement_eps=eps))
    if args.out:
        save_tour(tour, args.out)
    print(f"points  {len(tour)}")
    print(f"before  {before:.9f}")
    print(f"after   {tour.total_length:.9f}")
    return 0


# ---- sample


def cmd_sample(args) -> int:
    if args.instance:
        inst = parse_instance(_read_json(args.instance))
        sol = solve_three_point(inst)
        rows = _polyline((sol.first_leg, sol.second_leg), inst.start, args.step)
    elif args.tour:
        tour = _read_tour(args.tour)
        n = len(tour)
        legs = [solve_pair(tour.poses[i], tour.poses[(i + 1) % n], tour.rmin) for i in range(n)]
        rows = _polyline(legs, tour.poses[0], args.step)
    else:
        raise InputError("give --instance or --tour")
    _write_rows(rows, args.out)
    return 0


# ---- entry point


def _positive(v: str) -> float:
    x = float(v)
    if not (x > 0.0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dubins3", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve3", help="solve one three-point instance")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--disc-only", type=int, metavar="K", help="use the K-sample discretized baseline only")
    p.add_argument("--sample", type=_positive, metavar="STEP", help="also emit the path sampled every STEP")
    p.add_argument("--sample-out", metavar="FILE", help="write samples here instead of stdout")
    p.add_argument("--tol", type=_positive, default=1e-12, help="alignment tolerance in radians")
    p.set_defaults(func=cmd_solve3)

    p = sub.add_parser("bench", help="random-instance benchmark")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--env-size", type=_positive, default=10.0)
    p.add_argument("--min-dist", type=float, default=4.0)
    p.add_argument("--max-dist", type=float, default=math.inf,
                   help="exclusive upper bound on the smallest pairwise distance")
    p.add_argument("--disc", type=int, default=360)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5, help="timing repeats per solve (median is kept)")
    p.add_argument("--no-timing", action="store_true",
                   help="skip timing and write zeros, making the CSV byte-reproducible")
    p.add_argument("--out", metavar="FILE", help="CSV output (default stdout, summary then goes to stderr)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("tour", help="construct and refine a closed tour")
    p.add_argument("--points", metavar="FILE", help="CSV of x,y rows")
    p.add_argument("--in-tour", metavar="FILE", help="start from this tour JSON instead")
    p.add_argument("--rmin", type=_positive, default=1.0)
    p.add_argument("--construct", type=int, default=1, metavar="K", help="headings sampled per point")
    p.add_argument("--refine", action="store_true", help="run heading refinement and delete/reinsert")
    p.add_argument("--eps", type=_positive, help="improvement threshold (default 1e-6 * rmin)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE", help="write the tour JSON here")
    p.set_defaults(func=cmd_tour)

    p = sub.add_parser("sample", help="emit a sampled polyline for plotting")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--instance", metavar="FILE")
    g.add_argument("--tour", metavar="FILE")
    p.add_argument("--step", type=_positive, default=0.1)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"dubins3: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
