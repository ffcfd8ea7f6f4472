import numpy as np
import pytest
from src.families import cubic
from src.geometry.directions import direction_table, directions_from_leading
from src.geometry.polygon import PolygonVertex, QPolygon, forced_angle_at_infinity, teichmuller_check
from src.geometry.quadratic_differential import TrajectoryKind, emanation_angles
from src.geometry.trajectory import (
    D_value,
    InfinityDirection,
    NotFound,
    ZeroHit,
    distance_to_polyline,
    imaginary_axis_crossings,
    legendre_nodes,
    level_set_drift,
    trace_from_zero,
    trace_through,
)
from src.pipeline import (
    _other_horizontals,
    cubic_case,
    geometry_checks,
    quintic_arc_checks,
    teichmuller_checks,
    trace_arc,
)
from src.utils.helpers import angle_distance


def test_direction_table():
    table = direction_table(3)
    assert len(table.theta) == 6
    assert table.epsilon[0] == pytest.approx(np.pi / 6)
    j, angle, deviation = table.nearest(np.pi / 3 + 0.01)
    assert (j, deviation) == (1, pytest.approx(0.01))
    assert angle == pytest.approx(np.pi / 3)
    with pytest.raises(ValueError, match="greater than 0"):
        direction_table(0)


def test_directions_from_cubic_leading_coefficient():
    table = direction_table(3)
    assert directions_from_leading(-0.25, 3) == pytest.approx(list(table.theta))
    assert directions_from_leading(-0.25, 3, vertical=True) == pytest.approx(list(table.epsilon))


def test_emanation_angles_count_and_equal_spacing(cubic_k0):
    simple = emanation_angles(cubic_k0.qd, 1)
    double = emanation_angles(cubic_k0.qd, 0)
    assert len(simple) == 3
    assert len(double) == 4
    assert np.diff(simple) == pytest.approx([2 * np.pi / 3] * 2)
    assert np.diff(double) == pytest.approx([np.pi / 2] * 3)
    with pytest.raises(ValueError, match="Invalid zero index"):
        emanation_angles(cubic_k0.qd, 7)


def test_vertical_and_horizontal_angles_interleave(cubic_k0):
    horizontal = emanation_angles(cubic_k0.qd, 1, TrajectoryKind.HORIZONTAL)
    vertical = emanation_angles(cubic_k0.qd, 1, TrajectoryKind.VERTICAL)
    assert min(angle_distance(h, v) for h in horizontal for v in vertical) == pytest.approx(np.pi / 3)


def test_distance_to_polyline():
    line = [0j, 1 + 0j, 1 + 1j]
    assert distance_to_polyline([0.5 + 0.5j, 2 + 0.5j, -1 + 0j], line) == pytest.approx([0.5, 1.0, 1.0])


def test_legendre_nodes_integrate_cubics_exactly():
    x, w = legendre_nodes(2)
    assert w.sum() == pytest.approx(2.0)
    assert (w * x**2).sum() == pytest.approx(2 / 3)
    assert (w * x**3).sum() == pytest.approx(0.0, abs=1e-15)


def test_teichmuller_with_forced_angle():
    corner = PolygonVertex(0j, 1, 2 * np.pi / 3)
    forced = forced_angle_at_infinity([corner], [], 3)
    polygon = QPolygon((corner, QPolygon.infinity_vertex(3, forced)))
    assert forced == pytest.approx(np.pi / 3)
    assert teichmuller_check(polygon) == pytest.approx(0.0, abs=1e-14)
    skewed = QPolygon((corner, QPolygon.infinity_vertex(3, forced + 0.1)))
    assert abs(teichmuller_check(skewed)) > 1e-3


@pytest.mark.slow
def test_cubic_arc_at_zero(cubic_k0_run, opts):
    run = cubic_k0_run
    assert run.arc.ends_at(2)
    assert level_set_drift(run.case.qd, run.arc) < 1e-7
    crossings = imaginary_axis_crossings(run.arc)
    y1, _ = cubic.find_y1_y2(run.case.params)
    assert len(crossings) == 1
    assert crossings[0] == pytest.approx(y1, abs=1e-6)


@pytest.mark.slow
def test_cubic_geometry_checks_pass(cubic_k0_run, opts):
    checks = geometry_checks(cubic_k0_run, opts, 0.02)
    assert [c.name for c in checks if not c.passed] == []
    tails = cubic_k0_run.tails
    assert all(isinstance(t.end, InfinityDirection) for t in tails)
    assert angle_distance(tails[0].end.measured, 5 * np.pi / 6) < 0.02
    assert angle_distance(tails[1].end.measured, np.pi / 6) < 0.02


@pytest.mark.slow
def test_cubic_teichmuller_residual(cubic_k0_run, opts):
    checks, data = teichmuller_checks(cubic_k0_run.case, *_other_horizontals(cubic_k0_run, opts))
    assert checks[0].passed
    assert abs(data["residual"]) < 1e-6


@pytest.mark.slow
def test_cubic_two_cut_has_no_arc(opts):
    result = trace_arc(cubic_case(2.0), opts)
    assert isinstance(result, NotFound)
    assert not any(isinstance(end, ZeroHit) and end.index == 2 for end in result.endpoints)
    assert len(result.trajectories) == len(result.endpoints) == 3
    assert [t.end for t in result.trajectories] == list(result.endpoints)


@pytest.mark.slow
def test_trace_through_regular_point(cubic_k0, opts):
    forward, backward = trace_through(cubic_k0.qd, 0.5 + 2j, TrajectoryKind.HORIZONTAL, opts)
    for trajectory in (forward, backward):
        assert level_set_drift(cubic_k0.qd, trajectory) < 1e-7
        assert isinstance(trajectory.end, (InfinityDirection, ZeroHit))


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["quintic_p1_run", "quintic_p2_run"])
def test_quintic_arc_checks_pass(fixture, opts, request):
    run = request.getfixturevalue(fixture)
    checks = quintic_arc_checks(run, opts, 0.02)
    assert [c.name for c in checks if not c.passed] == []


def _end_angles(trajectories):
    assert all(isinstance(t.end, InfinityDirection) for t in trajectories)
    return sorted(t.end.angle for t in trajectories)


def test_segment_D_matches_closed_form(cubic_k0):
    params = cubic_k0.params
    z1 = cubic_k0.qd.locations[cubic.Z1]
    signs = set()
    for x in (-1.0, 0.0, 0.9):
        closed = cubic.im_D_on_segment(params, x)
        value = D_value(cubic_k0.qd, z1, x + 1j * params.c).imag
        assert abs(value) == pytest.approx(abs(closed), abs=1e-7)
        signs.add(np.sign(value * closed))
    assert len(signs) == 1


@pytest.mark.slow
def test_two_cut_traces_from_z1_stay_left(opts):
    case = cubic_case(2.0)
    traces = [trace_from_zero(case.qd, cubic.Z1, i, TrajectoryKind.HORIZONTAL, opts) for i in range(3)]
    assert _end_angles(traces) == pytest.approx([2 * np.pi / 3, np.pi, 4 * np.pi / 3])
    for trajectory in traces:
        assert imaginary_axis_crossings(trajectory) == []
        assert trajectory.points.real.max() < 0


@pytest.mark.slow
def test_trajectory_through_y2_escapes_downwards(cubic_k0, opts):
    _, y2 = cubic.find_y1_y2(cubic_k0.params)
    pair = trace_through(cubic_k0.qd, 1j * y2, TrajectoryKind.HORIZONTAL, opts)
    assert _end_angles(pair) == pytest.approx([4 * np.pi / 3, 5 * np.pi / 3])


@pytest.mark.slow
def test_trajectories_sharing_an_angle_have_distinct_levels(cubic_k0, opts):
    qd, params = cubic_k0.qd, cubic_k0.params
    z1 = qd.locations[cubic.Z1]
    _, y2 = cubic.find_y1_y2(params)
    through = trace_through(qd, 1j * y2, TrajectoryKind.HORIZONTAL, opts)
    through_angles = [t.end.angle for t in through]
    from_z0 = [
        trace_from_zero(qd, cubic.Z0, i, TrajectoryKind.HORIZONTAL, opts)
        for i in range(len(emanation_angles(qd, cubic.Z0)))
    ]
    shared = [
        t
        for t in from_z0
        if isinstance(t.end, InfinityDirection) and min(angle_distance(t.end.angle, a) for a in through_angles) < 1e-9
    ]
    assert shared

    through_level = abs(D_value(qd, z1, 1j * y2).imag)
    assert through_level == pytest.approx(0.0, abs=1e-7)
    for trajectory in shared:
        near = trajectory.points[np.argmin(np.abs(np.abs(trajectory.points - qd.locations[cubic.Z0]) - 1.0))]
        level = abs(D_value(qd, z1, near).imag)
        assert level == pytest.approx(cubic.F(-params.a, params), abs=1e-6)
        assert level - through_level > 0.3
