import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from src.core.potential import Potential, sector_of
from src.families import cubic, quintic


PUBLISHED_QUINTIC = {
    1: (-1.1082, 1.3489, 0.4877, 0.6781, -0.7979),
    2: (-0.9820, 0.7744, -1.3118, 1.0344, 0.1649),
}


def test_cubic_sectors():
    pot = Potential.cubic(0.0)
    assert [s.label for s in pot.sectors] == ["S1", "S2", "S3"]
    assert sector_of(pot, np.pi / 6) == pot.sector(1)
    assert sector_of(pot, 5 * np.pi / 6) == pot.sector(2)
    assert pot.class_label == "T2,1"
    with pytest.raises(ValueError, match="boundary angle"):
        sector_of(pot, np.pi / 3)


def test_quintic_sector_midpoints():
    pot = Potential.quintic((4, 5))
    assert pot.sector(3).midpoint == pytest.approx(9 * np.pi / 10)
    assert pot.sector(4).midpoint == pytest.approx(13 * np.pi / 10)
    assert pot.sector(5).midpoint == pytest.approx(17 * np.pi / 10)
    with pytest.raises(ValueError, match="Must be"):
        Potential.quintic((2, 1))


def test_critical_constants():
    constants = cubic.critical_constants()
    assert constants.v_star == pytest.approx(3.150037074, abs=1e-6)
    assert constants.K_star == pytest.approx(1.0005424, abs=1e-6)
    assert constants.a_star == pytest.approx(0.6821733958, abs=1e-6)
    assert constants.b_star == pytest.approx(1.712251710, abs=1e-6)
    assert constants.K_star == pytest.approx(1 / constants.a_star - constants.a_star**2, abs=1e-12)
    assert constants.gap < 1e-8


def test_cubic_exact_parameters_at_zero():
    params = cubic.params_from_K(0.0)
    assert params.b == pytest.approx(np.sqrt(2.0), abs=1e-12)
    assert params.a == pytest.approx(1.0, abs=1e-12)
    assert params.c == pytest.approx(1.0, abs=1e-12)
    assert params.C == pytest.approx(-0.75, abs=1e-12)
    assert params.phase is cubic.Phase.ONE_CUT


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-3.0, max_value=4.0, allow_nan=False))
def test_cubic_system_residuals(K):
    params = cubic.params_from_K(K)
    assert max(abs(r) for r in cubic.system_residuals(params)) < 1e-10
    assert cubic.build_Q(params).symmetric_defect([0.3 + 0.7j, -1.2 - 0.4j]) < 1e-12


def test_phase_labels():
    K_star = cubic.critical_constants().K_star
    assert cubic.classify_phase(0.0) is cubic.Phase.ONE_CUT
    assert cubic.classify_phase(2.0) is cubic.Phase.TWO_CUT
    assert cubic.classify_phase(K_star) is cubic.Phase.CRITICAL
    assert cubic.phase_from_F(1.0) is cubic.Phase.ONE_CUT
    assert cubic.phase_from_F(2.0 / cubic.solve_b(2.0) ** 2) is cubic.Phase.TWO_CUT


def test_F_at_minus_a_closed_form():
    expected = (-np.log(-2.0 + np.sqrt(6.0)) + 0.5 * np.log(2.0)) / np.pi
    assert cubic.F_at_minus_a(1.0) == pytest.approx(expected, abs=1e-12)
    assert cubic.F_at_minus_a(1.0) == pytest.approx(0.36485, abs=1e-5)
    assert np.pi * cubic.F_at_minus_a(1.0) == pytest.approx(1.1462, abs=1e-4)
    with pytest.raises(ValueError, match="domain error"):
        cubic.F_at_minus_a(0.0)


def test_solve_b_at_named_parameters():
    assert cubic.solve_b(cubic.critical_constants().K_star) == pytest.approx(1.712251710, abs=1e-6)
    assert cubic.solve_b(2.0) == pytest.approx(2.1003, abs=1e-4)
    assert cubic.solve_b(0.0) == pytest.approx(np.sqrt(2.0), abs=1e-12)


def test_F_at_minus_a_slope_at_one():
    h = 1e-6
    slope = (cubic.F_at_minus_a(1.0 + h) - cubic.F_at_minus_a(1.0 - h)) / (2 * h)
    assert slope == pytest.approx(3 * np.sqrt(6.0) / (2 * np.pi), rel=1e-6)
    a = 1.0
    assert slope == pytest.approx((2 * a**3 + 1) ** 1.5 / (np.sqrt(2.0) * np.pi * a**2.5), rel=1e-6)


def test_F_at_minus_a_is_increasing():
    values = np.array([cubic.F_at_minus_a(a) for a in np.linspace(0.1, 5.0, 1000)])
    assert np.all(np.diff(values) > 0)
    assert values[0] < 0 < values[-1]


def test_phase_is_monotone_in_K():
    rank = {cubic.Phase.ONE_CUT: 0, cubic.Phase.CRITICAL: 1, cubic.Phase.TWO_CUT: 2}
    phases = [cubic.classify_phase(K) for K in np.linspace(-3.0, 4.0, 200)]
    assert np.all(np.diff([rank[phase] for phase in phases]) >= 0)
    assert phases[0] is cubic.Phase.ONE_CUT
    assert phases[-1] is cubic.Phase.TWO_CUT


def test_F_matches_closed_form_at_minus_a():
    params = cubic.params_from_K(0.0)
    assert cubic.F(-params.a, params) == pytest.approx(cubic.F_at_minus_a(params.a), abs=1e-12)


def test_y1_y2_bracket_minus_a():
    params = cubic.params_from_K(0.0)
    y1, y2 = cubic.find_y1_y2(params)
    assert y2 < -params.a < y1 < params.a
    assert cubic.F(y1, params) == pytest.approx(0.0, abs=1e-12)
    assert cubic.F(y2, params) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="no real roots"):
        cubic.find_y1_y2(cubic.params_from_K(2.0))


def test_segment_im_D():
    params = cubic.params_from_K(0.0)
    assert cubic.im_D_on_segment(params, 0.0) == pytest.approx(-(2.0**1.5) / (6 * np.pi))
    with pytest.raises(ValueError, match="domain error"):
        cubic.im_D_on_segment(params, 2.0)


@pytest.mark.parametrize("p", [1, 2])
def test_quintic_closed_forms_match_published(p):
    params = quintic.closed_form_params(p)
    values = (params.a, params.b, params.c, params.d, params.e)
    assert values == pytest.approx(PUBLISHED_QUINTIC[p], abs=1e-4)
    assert params.e == pytest.approx((params.a - params.c) / 2, abs=1e-12)
    assert quintic.c_polynomial()(params.c).real == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("p", [1, 2])
def test_quintic_numeric_solve_matches_closed_forms(p):
    closed = quintic.closed_form_params(p)
    numeric = quintic.solve_params_numeric(p)
    for name in ("a", "b", "c", "d", "e"):
        assert getattr(numeric, name) == pytest.approx(getattr(closed, name), abs=1e-9)


@pytest.mark.parametrize("p", [1, 2])
def test_quintic_systems_vanish(p):
    params = quintic.closed_form_params(p)
    assert max(abs(r) for r in quintic.system_residuals(params)) < 1e-9
    assert max(abs(r) for r in quintic.reduced_system(params.a, params.c)) < 1e-9
    assert quintic.resultant_at(params.c) < 1e-8
    assert quintic.expansion_defect(params) < 1e-10


def test_quintic_resultant_nonzero_away_from_roots():
    c = quintic.closed_form_params(1).c
    assert quintic.resultant_at(0.3) > 1e3 * quintic.resultant_at(c)


def test_quintic_c_zero_is_inconsistent():
    with pytest.raises(ValueError, match="inconsistent"):
        quintic.params_from_c(0.0, 1, -1.0)


def test_quintic_q_symmetry():
    rng = np.random.default_rng(0)
    samples = rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100)
    for p in (1, 2):
        assert quintic.build_Q(quintic.closed_form_params(p)).symmetric_defect(samples) < 1e-10


def test_quintic_triangle_guards_p1(opts):
    report = quintic.triangle_guards(1, opts)
    assert report.holds is True
    angles = sorted(report.values["emanation_angles_over_pi"])
    assert angles == pytest.approx([-0.7971, -0.1305, 0.5362], abs=1e-4)
    assert report.values["re_Q_at_half_b"] < 0
    assert report.values["im_D_numeric_at_half_b"] == pytest.approx(
        report.values["im_D_closed_form_at_half_b"], rel=1e-6
    )


def test_quintic_halfline_guards():
    report = quintic.halfline_guards(1)
    assert report.holds is True
    assert report.values["re_D_prime_at_minus_2"] < 0
    assert report.values["im_D_prime_at_minus_2"] > 0
    assert report.values["endpoint_values"] == pytest.approx([0.0, 0.0], abs=1e-12)
    assert quintic.halfline_guards(2).holds is None


def test_quintic_kappa_p1():
    assert quintic.kappa(quintic.closed_form_params(1)) == pytest.approx(0.517, abs=2e-3)


def test_quintic_tilted_re_Q_roots_p1(opts):
    params = quintic.closed_form_params(1)
    roots = np.array(quintic.triangle_guards(1, opts).values["re_Q_tilted_roots"], dtype=complex)
    expected = [
        -2.5741,
        -params.b,
        0.3469,
        1.7393,
        -0.6044 + 0.3452j,
        -0.6044 - 0.3452j,
        -0.1997 + 0.3835j,
        -0.1997 - 0.3835j,
    ]
    assert len(roots) == len(expected)
    for value in expected:
        assert np.min(np.abs(roots - value)) < 1e-3
    assert quintic.tilted_segment_re_Q(params)(-params.b).real == pytest.approx(0.0, abs=1e-10)
    inside = roots[(np.abs(roots.imag) < 1e-8) & (roots.real > -params.b + 1e-6) & (roots.real < 0)]
    assert inside.size == 0
