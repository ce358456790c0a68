import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dubins3.cli import random_instances
from dubins3.dubins import Pose, advance, pair_length, solve_pair
from dubins3.geometry import Circle, GeometryError, Point, invert_line, signed_angle, wrap_pi
from dubins3.three_point import (
    SolveOptions,
    ThreePointInstance,
    approx_heading,
    bisector_heading,
    discretize_heading,
    enumerate_classes,
    error_bound,
    inverted_segment_circles,
    iterate_heading,
    mid_center,
    residuals,
    segment_lines,
    solve_approx,
    solve_class,
    solve_three_point,
    tangent_directions,
    two_leg_length,
)
from oracles import heading_oracle

SYMMETRIC = ThreePointInstance(Pose(-5, 0, 0), Point(0, 3), Pose(5, 0, 0))
COLLINEAR = ThreePointInstance(Pose(0, 0, 0), Point(4, 0), Pose(8, 0, 0))


def by_word(inst, word):
    return next(c for c in enumerate_classes(inst) if c.word == word)


@pytest.fixture(scope="module")
def instances():
    return random_instances(60, 10.0, 4.0, seed=7)


@pytest.fixture(scope="module")
def solved(instances):
    return [(inst, solve_three_point(inst)) for inst in instances]


# classes

def test_eight_classes():
    classes = enumerate_classes(SYMMETRIC)
    assert len({c.word for c in classes}) == 8
    assert all(c.word[1] == c.word[3] == "S" for c in classes)


def test_class_centers():
    inst = ThreePointInstance(Pose(0, 0, 0), Point(5, 5), Pose(10, 0, 0))
    cls = by_word(inst, "RSLSL")
    assert cls.center_a.x == pytest.approx(0.0) and cls.center_a.y == pytest.approx(-1.0)
    for c in enumerate_classes(inst):
        assert (c.center_a - inst.start.position).norm() == pytest.approx(1.0)
        assert (c.center_b - inst.end.position).norm() == pytest.approx(1.0)


def test_mu_flags():
    inst = SYMMETRIC
    assert by_word(inst, "RSRSL").mu_a == 1 and by_word(inst, "RSRSL").mu_b == -1
    assert by_word(inst, "LSRSR").mu_a == -1 and by_word(inst, "LSRSR").mu_b == 1


# approximate heading and bounds

def test_bisector_arithmetic():
    assert bisector_heading(math.pi / 2, math.pi / 6) == pytest.approx(math.pi / 6)


def test_symmetric_approx_heading_is_exact():
    cls = by_word(SYMMETRIC, "RSRSR")
    assert wrap_pi(approx_heading(SYMMETRIC, cls)) == pytest.approx(0.0, abs=1e-12)
    it = iterate_heading(SYMMETRIC, cls, 0.0, 1e-10, 64)
    assert it.iterations <= 1 and wrap_pi(it.alpha) == pytest.approx(0.0, abs=1e-12)


def test_coincident_centers_rejected():
    # start and end share their right turn circle; the triangle has no base
    inst = ThreePointInstance(Pose(0, 0, 0), Point(0, 5), Pose(0, -2, math.pi))
    with pytest.raises(GeometryError):
        approx_heading(inst, by_word(inst, "RSLSR"))


@pytest.mark.parametrize("word, equal, want", [
    ("RSRSR", False, math.pi / 9),
    ("LSLSL", False, math.pi / 9),
    ("LSRSL", True, 0.0),
    ("RSLSR", False, math.pi / 5),
    ("RSRSL", False, 11 * math.pi / 36),
    ("RSRSL", True, 11 * math.pi / 36),
])
def test_error_bound(word, equal, want):
    assert error_bound(word, equal) == pytest.approx(want)


def test_error_bound_contains_optimum(solved):
    for inst, sol in solved:
        if sol.path_class is None:
            continue
        a0 = approx_heading(inst, sol.path_class)
        assert abs(wrap_pi(a0 - sol.heading)) <= error_bound(sol.path_class) + 1e-9


# tangent directions

def test_outer_tangent_direction():
    inst = ThreePointInstance(Pose(0, -1, 0), Point(4, -1), Pose(9, -1, 0))
    cls = by_word(inst, "LSLSL")
    assert cls.center_a.norm() == pytest.approx(0.0, abs=1e-12)
    vi, _ = tangent_directions(inst, cls, Point(4, 0))
    assert vi.x == pytest.approx(1.0) and vi.y == pytest.approx(0.0, abs=1e-12)


def test_inner_tangent_direction():
    inst = ThreePointInstance(Pose(0, -1, 0), Point(4, -1), Pose(9, -1, 0))
    vi, _ = tangent_directions(inst, by_word(inst, "LSRSL"), Point(4, 0))
    assert abs(signed_angle(Point(1, 0), vi)) == pytest.approx(math.pi / 6)


def test_tangent_directions_rotate_with_instance(instances):
    inst = instances[0]
    moved = inst.transformed(angle=0.9, shift=Point(3, -2))
    for c, cm in zip(enumerate_classes(inst), enumerate_classes(moved)):
        a = approx_heading(inst, c)
        try:
            vi, vf = tangent_directions(inst, c, mid_center(inst, c, a))
        except GeometryError:
            continue
        wi, wf = tangent_directions(moved, cm, mid_center(moved, cm, a + 0.9))
        assert wrap_pi(signed_angle(vi, wi) - 0.9) == pytest.approx(0.0, abs=1e-9)
        assert wrap_pi(signed_angle(vf, wf) - 0.9) == pytest.approx(0.0, abs=1e-9)


def test_segments_are_tangent_to_turn_circles(instances):
    for inst in instances[:10]:
        for c in enumerate_classes(inst):
            a = approx_heading(inst, c)
            xc = mid_center(inst, c, a)
            try:
                s2, s4 = segment_lines(inst, c, xc)
            except GeometryError:
                continue
            for line, center in ((s2, c.center_a), (s2, xc), (s4, xc), (s4, c.center_b)):
                assert line.distance_to(center) == pytest.approx(inst.rmin, abs=1e-9)


# iteration

def test_iteration_aligns_bisector(instances):
    for inst in instances:
        for cls in enumerate_classes(inst):
            out = solve_class(inst, cls)
            if out is None:
                continue
            it = out[1]
            assert it.converged
            assert it.iterations <= 30
            if it.status != "aligned":
                continue
            xc = mid_center(inst, cls, it.alpha)
            vi, vf = tangent_directions(inst, cls, xc)
            assert abs(signed_angle(vi - vf, inst.mid - xc)) < 1e-8


def test_heading_matches_oracle(solved):
    for inst, sol in solved:
        a_ref, len_ref = heading_oracle(inst)
        assert sol.total_length <= len_ref + 1e-9
        assert abs(wrap_pi(sol.heading - a_ref)) < 1e-4


def test_zero_middle_arc_construction():
    # put the midpoint on the straight part of the optimal start-to-end path:
    # no path through it can be shorter than that pairwise optimum
    start, end = Pose(0, 0, 0.3), Pose(14, 9, 2.0)
    direct = solve_pair(start, end, 1.0)
    assert direct.word[1] == "S"
    p = advance(start, direct.word[0], direct.segment_lengths[0], 1.0)
    mid = advance(p, "S", direct.segment_lengths[1] / 2, 1.0)
    inst = ThreePointInstance(start, mid.position, end)
    assert inst.min_pairwise_distance() >= 4.0
    sol = solve_three_point(inst)
    assert sol.total_length == pytest.approx(direct.total_length, abs=1e-9)
    assert abs(wrap_pi(sol.heading - mid.theta)) < 1e-6
    # and the result is the concatenation of two pairwise optima
    m = sol.mid_pose(inst)
    assert sol.total_length == pytest.approx(pair_length(start, m, 1.0) + pair_length(m, end, 1.0), abs=1e-12)
    # the winning class meets the parallel-segment condition
    it = solve_class(inst, sol.path_class)[1]
    assert it.status == "degenerate"


# residuals and the inversion picture

def test_residuals_vanish_at_optimum(solved):
    for inst, sol in solved:
        if sol.path_class is None or sol.iterations == 0:
            continue
        it = solve_class(inst, sol.path_class)[1]
        if it.status != "aligned":
            continue
        res = residuals(inst, sol.path_class, sol.heading)
        assert res.max_abs < 1e-6
        assert res.big_r >= inst.rmin / 4 - 1e-9
        off = residuals(inst, sol.path_class, sol.heading + 0.1)
        assert off.max_abs > res.max_abs
        c, d = inverted_segment_circles(inst, sol.path_class, sol.heading)
        assert c.radius == pytest.approx(d.radius, abs=1e-7)


def test_inverted_segments_pass_through_midpoint(instances):
    inst = instances[3]
    cls = enumerate_classes(inst)[0]
    a = approx_heading(inst, cls)
    s2, _ = segment_lines(inst, cls, mid_center(inst, cls, a))
    img = invert_line(s2, Circle(inst.mid, inst.rmin))
    assert (img.center - inst.mid).norm() == pytest.approx(img.radius, abs=1e-9)


def test_residuals_reject_midpoint_inside_turn_circle():
    inst = ThreePointInstance(Pose(0, 0, 0), Point(0.2, 0.5), Pose(8, 0, 0))
    with pytest.raises(GeometryError):
        residuals(inst, by_word(inst, "LSLSL"), 0.0)


def test_incident_arcs_match(solved):
    for inst, sol in solved:
        if sol.path_class is None:
            continue
        a = sol.first_leg.segment_lengths[2]
        b = sol.second_leg.segment_lengths[0]
        if sol.first_leg.word[2] == sol.second_leg.word[0] and a > 1e-9 and b > 1e-9:
            assert a == pytest.approx(b, abs=1e-6)


# discretization

def test_discretized_collinear():
    h, total = discretize_heading(COLLINEAR, 360)
    assert h == pytest.approx(0.0) and total == pytest.approx(8.0)


def test_single_sample_is_heading_zero(instances):
    h, total = discretize_heading(instances[0], 1)
    assert h == 0.0 and total == pytest.approx(two_leg_length(instances[0], 0.0))


def test_finer_grid_is_no_worse(instances):
    for inst in instances[:10]:
        assert discretize_heading(inst, 3600)[1] <= discretize_heading(inst, 360)[1] + 1e-12


def test_discretization_needs_a_sample():
    with pytest.raises(ValueError):
        discretize_heading(COLLINEAR, 0)


# full solver

def test_collinear_solution():
    sol = solve_three_point(COLLINEAR)
    assert sol.total_length == pytest.approx(8.0, abs=1e-12)
    assert abs(wrap_pi(sol.heading)) < 1e-9


def test_dominates_discretization(solved):
    for inst, sol in solved:
        assert sol.total_length <= discretize_heading(inst, 360)[1] * (1 + 1e-9)


def test_bellman_decomposition(solved):
    for inst, sol in solved:
        m = sol.mid_pose(inst)
        assert sol.first_leg.total_length == pytest.approx(pair_length(inst.start, m, inst.rmin), abs=1e-12)
        assert sol.second_leg.total_length == pytest.approx(pair_length(m, inst.end, inst.rmin), abs=1e-12)
        assert sol.total_length == pytest.approx(two_leg_length(inst, sol.heading), abs=1e-12)


def test_approx_never_beats_iterative(solved):
    for inst, sol in solved:
        assert sol.total_length <= solve_approx(inst).total_length + 1e-9


def test_close_points_fall_back():
    inst = ThreePointInstance(Pose(0, 0, 0), Point(1.2, 0.4), Pose(2.0, -0.5, 2.5))
    sol = solve_three_point(inst)
    assert sol.total_length <= discretize_heading(inst, 3600)[1] + 1e-9
    assert sol.total_length <= discretize_heading(inst, 360)[1]


def test_options_are_used():
    inst = random_instances(1, 10.0, 4.0, seed=3)[0]
    loose = solve_three_point(inst, SolveOptions(tol=1e-3))
    tight = solve_three_point(inst)
    assert tight.total_length <= loose.total_length + 1e-9


instance_params = st.tuples(
    st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),  # headings
    st.floats(-10, 10), st.floats(-10, 10),  # shift
    st.floats(0, 2 * math.pi), st.floats(0.25, 4.0),  # rotation, scale
)


@given(instance_params, st.integers(0, 59))
@settings(max_examples=40)
def test_similarity_equivariance(params, k):
    h0, h1, dx, dy, ang, s = params
    base = random_instances(60, 10.0, 4.0, seed=7)[k]
    inst = ThreePointInstance(Pose.at(base.start.position, h0), base.mid, Pose.at(base.end.position, h1))
    sol = solve_three_point(inst)
    moved = inst.transformed(angle=ang, shift=Point(dx, dy), scale=s)
    msol = solve_three_point(moved)
    assert msol.total_length == pytest.approx(s * sol.total_length, rel=1e-9, abs=1e-9)


def test_rigid_invariance_and_heading(instances):
    for inst in instances[:20]:
        sol = solve_three_point(inst)
        moved = solve_three_point(inst.transformed(angle=1.1, shift=Point(-4, 7)))
        assert moved.total_length == pytest.approx(sol.total_length, abs=1e-9)
        scaled = solve_three_point(inst.transformed(scale=3.0))
        assert scaled.total_length == pytest.approx(3 * sol.total_length, rel=1e-9)


def test_deterministic(instances):
    a = [solve_three_point(i) for i in instances[:10]]
    b = [solve_three_point(i) for i in instances[:10]]
    assert a == b
