import numpy as np
import pytest
from src.equilibrium.measure import (
    displaced,
    endpoint_exponent,
    energy,
    log_potential,
    log_potential_on_arc,
    project,
    s_property_residual,
    uniform_like,
    variational_check,
)
from src.families import cubic
from src.pipeline import attach_measure, cubic_case, equilibrium_checks, trace_arc


pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def cubic_half_run(opts):
    return attach_measure(trace_arc(cubic_case(0.5), opts), panels=24)


@pytest.fixture(scope="module")
def cubic_critical_run(opts):
    return attach_measure(trace_arc(cubic_case(cubic.critical_constants().K_star), opts), panels=24)


@pytest.mark.parametrize("fixture", ["cubic_k0_run", "cubic_half_run", "cubic_critical_run", "quintic_p1_run", "quintic_p2_run"])
def test_equilibrium_checks_pass(fixture, request):
    run = request.getfixturevalue(fixture)
    checks, data = equilibrium_checks(run)
    assert [c.name for c in checks if not c.passed] == []
    assert data["mass"] == pytest.approx(1.0, abs=1e-6)


def test_density_positive_and_ordered(cubic_k0_run):
    measure = cubic_k0_run.measure
    assert (measure.weights > 0).all()
    assert np.all(np.diff(measure.t) > 0)
    assert measure.length == pytest.approx(cubic_k0_run.arc.length, rel=1e-3)


def test_square_root_vanishing_at_the_ends(cubic_k0_run):
    head, tail = endpoint_exponent(cubic_k0_run.measure)
    assert head == pytest.approx(0.5, abs=0.05)
    assert tail == pytest.approx(0.5, abs=0.05)


def test_variational_inequality_on_tails(cubic_k0_run):
    run = cubic_k0_run
    report = variational_check(run.measure, run.case.pot, run.tails)
    assert report.tail_count == 2
    assert report.tails_increasing
    assert report.off_support_margin >= -1e-6


def test_potential_far_away_sees_unit_mass(cubic_k0_run):
    measure = cubic_k0_run.measure
    far = np.array([1e3, 1e3j, -1e3 + 1e3j])
    assert log_potential(measure, far) == pytest.approx(-np.log(np.abs(far)), abs=1e-2)
    assert log_potential_on_arc(measure, [0.37 * measure.span]).shape == (1,)


def test_on_arc_potential_needs_equilibrium_measure(cubic_k0_run):
    with pytest.raises(ValueError, match="needs the equilibrium measure"):
        log_potential_on_arc(uniform_like(cubic_k0_run.measure), [0.5])


def test_equilibrium_minimises_energy(cubic_k0_run):
    run = cubic_k0_run
    equilibrium = energy(run.measure, run.case.pot)
    uniform = energy(uniform_like(run.measure), run.case.pot)
    assert equilibrium.E_V < uniform.E_V
    assert equilibrium.consistency_gap < 1e-5


def test_displaced_curve_breaks_the_s_property(cubic_k0_run):
    run = cubic_k0_run
    assert s_property_residual(run.case.qd, run.measure) < 1e-6
    assert s_property_residual(run.case.qd, displaced(run.measure)) > 1e-3


def test_projection_of_nodes(cubic_k0_run):
    measure = cubic_k0_run.measure
    t, distance = project(measure, measure.z[::16])
    assert distance.max() < 1e-4
    assert t == pytest.approx(measure.t[::16], abs=1e-3)


def test_critical_support_runs_through_the_double_zero(cubic_critical_run):
    run = cubic_critical_run
    assert run.case.params.phase is cubic.Phase.CRITICAL
    assert run.arc.start.zero_index == cubic.Z1
    assert run.arc.ends_at(cubic.Z2)
    z0 = run.case.qd.locations[cubic.Z0]
    assert np.min(np.abs(run.arc.points - z0)) < 1e-12
    assert run.measure.mass == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("fixture", ["cubic_k0_run", "quintic_p1_run"])
def test_potential_is_reflection_symmetric(fixture, request):
    measure = request.getfixturevalue(fixture).measure
    z = np.array([0.5 + 2.0j, 2.0 - 1.0j, 0.7 - 2.5j, 3.0 + 0.5j])
    assert log_potential(measure, z) == pytest.approx(log_potential(measure, -np.conj(z)), abs=1e-6)
