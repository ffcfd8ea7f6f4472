import numpy as np
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
from matplotlib.path import Path
from src.geometry.quadratic_differential import QuadraticDifferential
from src.geometry.trajectory import InfinityDirection, Trajectory


@dataclass(frozen=True)
class PolygonVertex:
    """
    Corner of a Q-polygon. location None stands for the point at infinity.
    """

    location: Optional[complex]
    order: int
    angle: float


@dataclass(frozen=True)
class QPolygon:
    vertices: Tuple[PolygonVertex, ...]
    interior_orders: Tuple[int, ...] = ()

    @classmethod
    def infinity_vertex(cls, d: int, angle: float) -> PolygonVertex:
        return PolygonVertex(None, -(2 * d + 2), angle)


def teichmuller_check(polygon: QPolygon) -> float:
    """
    sum_j (1 - phi_j (n_j + 2) / 2pi) - 2 - sum_i n_i; zero for a genuine Q-polygon.
    """
    corners = sum(1.0 - v.angle * (v.order + 2) / (2 * np.pi) for v in polygon.vertices)
    return float(corners - 2.0 - sum(polygon.interior_orders))


def forced_angle_at_infinity(
    vertices: Sequence[PolygonVertex], interior_orders: Sequence[int], d: int
) -> float:
    """
    Angle at infinity that makes the Teichmuller sum vanish for the given finite corners.
    """
    finite = sum(1.0 - v.angle * (v.order + 2) / (2 * np.pi) for v in vertices)
    return float(np.pi * (1.0 + sum(interior_orders) - finite) / d)


def _ccw(start: float, end: float) -> float:
    return float(np.mod(end - start, 2 * np.pi))


def polygon_from_trajectories(
    qd: QuadraticDifferential, first: Trajectory, second: Trajectory
) -> QPolygon:
    """
    Q-polygon bounded by two trajectories leaving the same zero for infinity,
    taking the region swept counterclockwise from first to second. Angles at
    infinity use the snapped asymptotic directions; interior zeros are found by
    a point-in-polygon test on the closed boundary.
    """
    if first.start.zero_index is None or first.start.zero_index != second.start.zero_index:
        raise ValueError("Trajectories must leave the same zero")
    if not isinstance(first.end, InfinityDirection) or not isinstance(second.end, InfinityDirection):
        raise ValueError("Trajectories must both end at infinity")

    zero_index = first.start.zero_index
    zero = qd.zeros[zero_index]
    corner = PolygonVertex(zero.location, zero.multiplicity, _ccw(first.start.angle, second.start.angle))
    at_infinity = QPolygon.infinity_vertex(qd.d, _ccw(first.end.angle, second.end.angle))

    radius = max(np.abs(first.points).max(), np.abs(second.points).max())
    arc = radius * np.exp(1j * np.linspace(first.end.measured, first.end.measured + at_infinity.angle, 64))
    boundary = np.concatenate((first.points, arc, second.points[::-1]))
    path = Path(np.column_stack((boundary.real, boundary.imag)), closed=False)

    interior = []
    for index, other in enumerate(qd.zeros):
        if index == zero_index:
            continue
        if path.contains_point((other.location.real, other.location.imag)):
            interior.append(other.multiplicity)
    return QPolygon((corner, at_infinity), tuple(interior))
