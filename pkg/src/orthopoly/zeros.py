import numpy as np
from dataclasses import dataclass
from typing import Sequence, Tuple
from scipy.stats import kstest
from src.config.logger import logger
from src.equilibrium.measure import ArcMeasure, project
from src.orthopoly.hankel import OrthoPoly
from src.utils.helpers import catch_exceptions


FAR_FROM_ARC = 0.5
CLUSTER_GAP_FACTOR = 2.0


@dataclass(frozen=True)
class ZeroCloud:
    """
    Zeros of P_n against an equilibrium measure.

    coordinates are the normalised mass coordinates t/M of the zeros within FAR_FROM_ARC
    of the arc; zeros further away are counted in far_count and left out of the
    Kolmogorov distance.
    """

    n: int
    zeros: Tuple[complex, ...]
    distances: Tuple[float, ...]
    coordinates: Tuple[float, ...]
    ks_distance: float
    far_count: int

    @property
    def max_distance(self) -> float:
        return max(self.distances) if self.distances else 0.0

    def empirical_cdf(self, grid: Sequence[float]) -> np.ndarray:
        values = np.sort(np.asarray(self.coordinates))
        if not len(values):
            return np.zeros(len(grid))
        return np.searchsorted(values, np.asarray(grid), side="right") / len(values)


@dataclass(frozen=True)
class ZeroClusters:
    left: Tuple[complex, ...]
    right: Tuple[complex, ...]
    gap: float
    spacing: float
    two_clusters: bool


@catch_exceptions
def compare_to_measure(op: OrthoPoly, measure: ArcMeasure) -> ZeroCloud:
    """
    Distance of every zero to the arc and the Kolmogorov distance between the
    projected zeros and the measure, whose distribution function is t/M by construction.
    """
    zeros = np.asarray(op.zeros, dtype=complex)
    t, distance = project(measure, zeros)
    near = distance <= FAR_FROM_ARC
    coordinates = np.clip(t[near] / measure.span, 0.0, 1.0)
    ks = float(kstest(coordinates, "uniform").statistic) if len(coordinates) else 1.0
    cloud = ZeroCloud(
        n=op.n,
        zeros=tuple(complex(z) for z in zeros),
        distances=tuple(float(d) for d in distance),
        coordinates=tuple(float(c) for c in np.sort(coordinates)),
        ks_distance=ks,
        far_count=int((~near).sum()),
    )
    logger.info(
        f"Zero cloud n={op.n} {measure.label} - Comparison successful : max distance {cloud.max_distance:.4f}, "
        f"KS {ks:.4f}, {cloud.far_count} far"
    )
    return cloud


def zero_clusters(zeros: Sequence[complex]) -> ZeroClusters:
    """
    Splits zeros by the sign of the real part. Two clusters when the gap across the
    imaginary axis exceeds CLUSTER_GAP_FACTOR times the median nearest-neighbour spacing.
    """
    values = np.asarray(zeros, dtype=complex)
    left = values[values.real < 0]
    right = values[values.real > 0]
    if len(values) < 2:
        spacing = 0.0
    else:
        pairwise = np.abs(values[:, None] - values[None, :])
        np.fill_diagonal(pairwise, np.inf)
        spacing = float(np.median(pairwise.min(axis=1)))
    if not len(left) or not len(right):
        return ZeroClusters(tuple(left), tuple(right), 0.0, spacing, False)
    gap = float(right.real.min() - left.real.max())
    on_axis = len(values) - len(left) - len(right)
    two = on_axis == 0 and gap > CLUSTER_GAP_FACTOR * spacing
    return ZeroClusters(
        tuple(sorted(left, key=lambda z: (z.real, z.imag))),
        tuple(sorted(right, key=lambda z: (z.real, z.imag))),
        gap,
        spacing,
        two,
    )
