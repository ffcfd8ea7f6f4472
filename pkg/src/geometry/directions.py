import numpy as np
from dataclasses import dataclass
from typing import List, Tuple
from src.utils.helpers import angle_distance


@dataclass(frozen=True)
class DirectionTable:
    """
    Admissible directions at infinity for d = deg V: horizontal theta_j = j*pi/d
    and vertical epsilon_j = theta_j + pi/(2d), j = 0..2d-1.
    """

    d: int
    theta: Tuple[float, ...]
    epsilon: Tuple[float, ...]

    def nearest(self, angle: float, vertical: bool = False) -> Tuple[int, float, float]:
        """
        Index, snapped angle and unsigned deviation of the closest admissible direction.
        """
        table = self.epsilon if vertical else self.theta
        deviations = [angle_distance(angle, value) for value in table]
        j = int(np.argmin(deviations))
        return j, table[j], deviations[j]


def direction_table(d: int) -> DirectionTable:
    if d < 1:
        raise ValueError(f"Invalid value for d={d}. Must be greater than 0")
    theta = tuple(j * np.pi / d for j in range(2 * d))
    epsilon = tuple(t + np.pi / (2 * d) for t in theta)
    return DirectionTable(d, theta, epsilon)


def directions_from_leading(
    leading: complex, d: int, vertical: bool = False
) -> List[float]:
    """
    The 2d asymptotic angles of trajectories of -Q dz^2 when Q ~ leading * z^(2d-2):
    horizontal (pi - arg c)/(2d) + j*pi/d, vertical (2*pi - arg c)/(2d) + j*pi/d.
    """
    base = ((2 * np.pi if vertical else np.pi) - np.angle(leading)) / (2 * d)
    return [float(np.mod(base + j * np.pi / d, 2 * np.pi)) for j in range(2 * d)]
