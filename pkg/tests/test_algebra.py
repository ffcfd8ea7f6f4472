import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from src.core.algebra import (
    CplxPoly,
    PrecScalar,
    Precision,
    cluster_roots,
    poly_eval,
    poly_roots,
    real_root_in_interval,
    sylvester_matrix,
    sylvester_resultant,
)
from src.utils.helpers import angle_distance, catch_exceptions, circular_mean, decimal_string, wrap_angle


finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


@given(finite)
def test_wrap_angle_range(angle):
    wrapped = wrap_angle(angle)
    assert -np.pi < wrapped <= np.pi
    assert angle_distance(wrapped, angle) < 1e-9


def test_angle_helpers():
    assert wrap_angle(-np.pi) == np.pi
    assert angle_distance(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)
    assert circular_mean([np.pi - 0.1, -np.pi + 0.1]) == pytest.approx(np.pi)
    with pytest.raises(ValueError, match="empty"):
        circular_mean([])


def test_decimal_string_keeps_digits():
    ctx = Precision(40).context()
    assert decimal_string(ctx.mpf(1) / 3, 30) == "0." + "3" * 30
    assert decimal_string(0.5, 5) == "0.50000"


def test_catch_exceptions_reraises():
    @catch_exceptions
    def broken():
        raise ValueError("domain error : test")

    with pytest.raises(ValueError, match="domain error"):
        broken()


def test_polynomial_basics():
    p = CplxPoly((1.0, 0.0, 1.0))
    assert p.degree == 2
    assert p(1j) == pytest.approx(0.0)
    assert p.derivative().coeffs == (0.0, 2.0)
    with pytest.raises(ValueError, match="leading coefficient is zero"):
        CplxPoly((1.0, 0.0))


def test_compose_linear_and_real_part():
    p = CplxPoly((0j, 0j, 1 + 0j))
    composed = p.compose_linear(1j, 1.0)
    # (1 + ix)^2 = 1 + 2ix - x^2
    assert np.allclose(composed.array, [1.0, 2j, -1.0])
    assert np.allclose(composed.real_part().array, [1.0, 0.0, -1.0])


def test_high_precision_evaluation():
    ctx = Precision(50).context()
    third = ctx.mpf(1) / 3
    p = CplxPoly((-third, ctx.one), digits=50)
    assert abs(poly_eval(p, third)) < ctx.mpf(10) ** -45


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False), min_size=1, max_size=6))
def test_roots_recover_well_separated_roots(roots):
    separated = []
    for r in roots:
        if all(abs(r - s) > 0.1 for s in separated):
            separated.append(r)
    found = poly_roots(CplxPoly.from_roots(separated))
    assert sum(root.multiplicity for root in found) == len(separated)
    for r in separated:
        assert min(abs(root.value - r) for root in found) < 1e-6


def test_double_root_is_clustered():
    found = poly_roots(CplxPoly.from_roots([1j, 1j, -2.0]), digits=30)
    assert sorted(root.multiplicity for root in found) == [1, 2]


def test_cluster_roots_radius():
    clusters = cluster_roots([1.0, 1.0 + 1e-9, 2.0])
    assert [c.multiplicity for c in clusters] == [2, 1]


def test_real_root_in_interval():
    root = real_root_in_interval(CplxPoly((-2.0, 0.0, 1.0)), 0.0, 2.0, tol=1e-15)
    assert root == pytest.approx(np.sqrt(2.0), abs=1e-14)
    with pytest.raises(ValueError, match="bracket invalid"):
        real_root_in_interval(CplxPoly((-2.0, 0.0, 1.0)), 2.0, 3.0)


def test_sylvester_matrix_shape():
    f = CplxPoly((1.0, 2.0, 3.0))
    g = CplxPoly((4.0, 5.0))
    matrix = sylvester_matrix(f, g)
    assert len(matrix) == 3
    assert all(len(row) == 3 for row in matrix)
    assert matrix[0] == [3.0, 2.0, 1.0]


def test_resultant_vanishes_on_common_root():
    f = CplxPoly.from_roots([1.0, 2.0, 3j])
    g = CplxPoly.from_roots([3j, -1.0])
    h = CplxPoly.from_roots([4.0, -1.0])
    assert abs(sylvester_resultant(f, g, relative=True)) < 1e-12
    assert abs(sylvester_resultant(f, h, relative=True)) > 1e-3
    assert abs(sylvester_resultant(f, g, digits=40, relative=True)) < 1e-12


def test_precision_scalar_keeps_its_digits():
    ctx = Precision(40).context()
    third = PrecScalar(ctx.mpf(1) / 3, 40)
    assert str(third) == "0." + "3" * 40
    assert float(third) == pytest.approx(1 / 3)
    assert str(Precision(20).scalar("0.125")) == "0.12500000000000000000"
    assert Precision(40).context() is not ctx
    with pytest.raises(ValueError, match="Must be at least"):
        Precision(8)
