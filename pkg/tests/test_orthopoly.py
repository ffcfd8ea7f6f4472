import numpy as np
import pytest
from src.core.algebra import Precision
from src.core.potential import Potential
from src.orthopoly.hankel import OrthoPoly, hankel_solve
from src.orthopoly.moments import gauss_legendre, moments, precision_policy, quadrature_contour
from src.orthopoly.zeros import ZeroCloud, zero_clusters
from src.pipeline import cubic_case, orthopoly_checks, orthopoly_studies


def test_precision_policy():
    assert precision_policy(4) == 50
    assert precision_policy(16) == 96
    assert precision_policy(16, 60) == 60


def test_gauss_legendre_is_exact_for_low_degree():
    ctx = Precision(40).context()
    nodes, weights = gauss_legendre(ctx, 6)
    assert len(nodes) == 6
    assert nodes == sorted(nodes)
    assert abs(sum(weights) - 2) < ctx.mpf(10) ** -35
    assert abs(sum(w * x**8 for x, w in zip(nodes, weights)) - ctx.mpf(2) / 9) < ctx.mpf(10) ** -35
    with pytest.raises(ValueError, match="Invalid Gauss-Legendre order"):
        gauss_legendre(ctx, 5)


def test_contour_rays_follow_the_class():
    pot = Potential.quintic((4, 5))
    contour = quadrature_contour(pot, 8, 50)
    assert contour.angles == pytest.approx((13 * np.pi / 10, 17 * np.pi / 10))
    assert min(contour.radii) > 1.0
    tilted = quadrature_contour(pot, 8, 50, variant=1)
    assert tilted.vertex == -0.3j
    with pytest.raises(ValueError, match="Invalid contour variant"):
        quadrature_contour(pot, 8, 50, variant=2)


def test_first_polynomial_has_imaginary_zero():
    table = moments(Potential.cubic(0.0), 1, digits=30)
    assert abs(table.moments[0]) > 0
    assert table.symmetry_defect() < 1e-15
    op = hankel_solve(table, 1)
    [zero] = op.zeros
    assert abs(zero.real) < 1e-12
    assert op.max_residual < 1e-10


def test_hankel_solve_rejects_bad_degrees():
    table = moments(Potential.cubic(0.0), 1, digits=30)
    with pytest.raises(ValueError, match="Must be at least 1"):
        hankel_solve(table, 0)
    with pytest.raises(ValueError, match="Moment table too short"):
        hankel_solve(table, 2)
    with pytest.raises(ValueError, match="Must be at least"):
        moments(Potential.cubic(0.0), 2, count=3)


def test_orthopoly_symmetry_defect():
    mirrored = OrthoPoly(2, (), 30, (), (1 + 1j, -1 + 1j))
    skewed = OrthoPoly(2, (), 30, (), (1 + 1j, -1 + 1.5j))
    assert mirrored.symmetry_defect() == 0.0
    assert skewed.symmetry_defect() == pytest.approx(0.5)


def test_two_clusters_detected():
    left = np.array([-2.1 + 0.05j, -2.0, -1.9 - 0.05j])
    zeros = np.concatenate((left, -np.conj(left)))
    clusters = zero_clusters(zeros)
    assert clusters.two_clusters
    assert len(clusters.left) == len(clusters.right) == 3
    assert clusters.gap == pytest.approx(3.8)


def test_single_arc_of_zeros_is_one_cluster():
    zeros = np.linspace(-1.0, 1.0, 6) + 0.5j
    assert not zero_clusters(zeros).two_clusters
    assert not zero_clusters([-1.0, 0.5j, 1.0]).two_clusters


def test_empirical_cdf():
    cloud = ZeroCloud(3, (), (0.1, 0.2, 0.05), (0.2, 0.5, 0.8), 0.1, 0)
    assert cloud.max_distance == 0.2
    assert cloud.empirical_cdf([0.0, 0.5, 1.0]) == pytest.approx([0.0, 2 / 3, 1.0])


@pytest.mark.slow
def test_zeros_approach_the_arc(cubic_k0_run):
    studies = orthopoly_studies(cubic_k0_run.case.pot, [8, 12, 16], 60, cubic_k0_run.measure, 3)
    assert [s.n for s in studies] == [8, 12, 16]
    checks = orthopoly_checks(cubic_k0_run.case.label, studies)
    assert [c.name for c in checks if not c.passed] == []
    for s in studies:
        assert s.op.max_residual < 1e-20
        assert s.op.symmetry_defect() < 1e-10
    assert studies[-1].cloud.max_distance < 0.1


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["quintic_p1_run", "quintic_p2_run"])
def test_quintic_zeros_approach_the_arc(fixture, request):
    run = request.getfixturevalue(fixture)
    studies = orthopoly_studies(run.case.pot, [8, 12, 16], 60, run.measure, 3)
    checks = orthopoly_checks(run.case.label, studies)
    assert [c.name for c in checks if not c.passed] == []
    assert any("Kolmogorov distance over n" in c.name for c in checks)
    if run.case.params.p == 1:
        assert studies[1].cloud.ks_distance < 0.15


@pytest.mark.slow
def test_moments_agree_along_a_second_contour():
    pot = Potential.quintic((3, 1))
    first = moments(pot, 8, digits=50)
    second = moments(pot, 8, digits=50, variant=1)
    assert first.relative_difference(second) < 1e-25


@pytest.mark.slow
def test_two_cut_zeros_split():
    case = cubic_case(2.0)
    [s] = orthopoly_studies(case.pot, [16], 60, None, 1)
    assert s.cloud is None
    assert s.clusters.two_clusters
