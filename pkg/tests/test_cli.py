import csv
import io
import json
import math
import subprocess
import sys

import pytest

from dubins3.cli import BENCH_COLUMNS, main, random_instances
from dubins3.tour import load_tour

COLLINEAR = {"rmin": 1.0, "start": {"x": 0, "y": 0, "theta": 0}, "mid": {"x": 4, "y": 0},
             "end": {"x": 8, "y": 0, "theta": 0}}


def write(path, obj):
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def report(text):
    out = {}
    for line in text.splitlines():
        if not line.strip():
            break
        key, _, val = line.partition(" ")
        out[key] = val.strip()
    return out


def test_solve3_collinear(tmp_path, capsys):
    assert main(["solve3", write(tmp_path / "i.json", COLLINEAR)]) == 0
    rep = report(capsys.readouterr().out)
    assert abs(math.remainder(float(rep["heading"]), 2 * math.pi)) < 1e-9
    assert float(rep["total"]) == pytest.approx(8.0)
    assert {"word", "leg1", "leg2", "iterations"} <= rep.keys()


def test_solve3_disc_only(tmp_path, capsys):
    assert main(["solve3", write(tmp_path / "i.json", COLLINEAR), "--disc-only", "360"]) == 0
    rep = report(capsys.readouterr().out)
    assert float(rep["heading"]) == 0.0 and float(rep["total"]) == pytest.approx(8.0)
    assert rep["method"] == "discretized"


def test_solve3_reports_residuals(tmp_path, capsys):
    inst = {"rmin": 1.0, "start": {"x": 0, "y": 0, "theta": 1.0}, "mid": {"x": 6, "y": 5},
            "end": {"x": 1, "y": 9, "theta": 4.0}}
    assert main(["solve3", write(tmp_path / "i.json", inst)]) == 0
    line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("residuals")][0]
    assert float(line.split("max ")[1].rstrip(")")) < 1e-6


def test_solve3_sample(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["solve3", write(tmp_path / "i.json", COLLINEAR), "--sample", "0.1",
                 "--sample-out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "y", "theta"]
    pts = [(float(r[0]), float(r[1])) for r in rows[1:]]
    length = sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))
    assert abs(length - 8.0) <= 0.1
    assert pts[-1] == pytest.approx((8.0, 0.0), abs=1e-9)


@pytest.mark.parametrize("text", [
    "{not json",
    '{"rmin": 1, "start": {"x": NaN, "y": 0, "theta": 0}, "mid": {"x": 4, "y": 0}, "end": {"x": 8, "y": 0, "theta": 0}}',
    '{"rmin": 1, "start": {"x": 0, "y": 0, "theta": 0}, "end": {"x": 8, "y": 0, "theta": 0}}',
    '{"rmin": -1, "start": {"x": 0, "y": 0, "theta": 0}, "mid": {"x": 4, "y": 0}, "end": {"x": 8, "y": 0, "theta": 0}}',
    '{"rmin": 1, "start": {"x": "a", "y": 0, "theta": 0}, "mid": {"x": 4, "y": 0}, "end": {"x": 8, "y": 0, "theta": 0}}',
    "[1, 2]",
])
def test_solve3_bad_input(tmp_path, capsys, text):
    assert main(["solve3", write(tmp_path / "i.json", text)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["solve3", "/nonexistent/x.json"]) == 2


def test_bench_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bench", "--n", "15", "--seed", "5", "--no-timing"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert tuple(rows[0].keys()) == BENCH_COLUMNS
    assert [int(r["instance_id"]) for r in rows] == list(range(15))
    for r in rows:
        assert float(r["min_pairwise_dist"]) >= 4.0
        assert float(r["dev_iter_pct"]) <= 1e-7
        dev = 100 * (float(r["len_iter"]) - float(r["len_disc"])) / float(r["len_disc"])
        assert float(r["dev_iter_pct"]) == pytest.approx(dev, abs=1e-12)


def test_bench_timing_and_summary(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["bench", "--n", "5", "--seed", "1", "--repeats", "1", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "runtime factor disc/iter" in text and "runtime factor disc/approx" in text
    assert "min_dist_bin" in text
    rows = list(csv.DictReader(out.open()))
    assert all(int(r["t_iter_ns"]) > 0 and int(r["t_disc_ns"]) > 0 for r in rows)


def test_bench_impossible_min_dist(capsys):
    assert main(["bench", "--n", "1", "--env-size", "2", "--min-dist", "5", "--no-timing"]) == 2
    assert "attempts" in capsys.readouterr().err


def test_random_instances_band():
    insts = random_instances(20, 10.0, 1.0, seed=0, max_dist=4.0)
    assert all(1.0 <= i.min_pairwise_distance() < 4.0 for i in insts)
    assert random_instances(3, 10.0, 4.0, 9) == random_instances(3, 10.0, 4.0, 9)


def square(tmp_path):
    return write(tmp_path / "p.csv", "x,y\n0,0\n20,0\n20,20\n0,20\n")


def test_tour_refine_square(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["tour", "--points", square(tmp_path), "--construct", "1", "--refine", "--out", str(out)]) == 0
    lines = dict(l.split() for l in capsys.readouterr().out.splitlines())
    assert float(lines["after"]) <= float(lines["before"])
    assert len(load_tour(out).poses) == 4


def test_tour_refined_input_is_fixed_point(tmp_path, capsys):
    first = tmp_path / "t.json"
    pts = "\n".join(f"{x},{y}" for x, y in [(1, 2), (15, 3), (18, 17), (6, 12), (9, 6), (3, 18)])
    main(["tour", "--points", write(tmp_path / "p.csv", pts), "--refine", "--out", str(first)])
    capsys.readouterr()
    assert main(["tour", "--in-tour", str(first), "--refine"]) == 0
    lines = dict(l.split() for l in capsys.readouterr().out.splitlines())
    assert float(lines["after"]) >= float(lines["before"]) - 1e-5


@pytest.mark.parametrize("text", ["0,0\n1,1\n", "0,0\n1,x\n5,5\n", "0,0\n1,nan\n5,5\n"])
def test_tour_bad_points(tmp_path, text):
    assert main(["tour", "--points", write(tmp_path / "p.csv", text)]) == 2


def test_tour_needs_input():
    assert main(["tour"]) == 2


def test_sample_tour(tmp_path):
    t = tmp_path / "t.json"
    main(["tour", "--points", square(tmp_path), "--out", str(t)])
    out = tmp_path / "poly.csv"
    assert main(["sample", "--tour", str(t), "--step", "0.5", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))[1:]
    first, last = rows[0], rows[-1]
    assert math.dist(map(float, first[:2]), map(float, last[:2])) < 1e-6


def test_sample_instance_stdout(tmp_path, capsys):
    assert main(["sample", "--instance", write(tmp_path / "i.json", COLLINEAR), "--step", "1"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1 + 9


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "dubins3", "solve3", write(tmp_path / "i.json", COLLINEAR)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "total" in res.stdout
    res = subprocess.run([sys.executable, "-m", "dubins3", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
