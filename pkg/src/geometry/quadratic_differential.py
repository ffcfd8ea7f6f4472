import numpy as np
from enum import Enum
from math import factorial
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple
from src.core.algebra import CplxPoly
from src.geometry.directions import directions_from_leading
from src.utils.helpers import wrap_angle


class TrajectoryKind(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int = 1


@dataclass(frozen=True)
class QuadraticDifferential:
    """
    -Q(z) dz^2 for a polynomial Q of even degree 2d-2, with its classified zeros.
    """

    Q: CplxPoly
    zeros: Tuple[Zero, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeros", tuple(self.zeros))
        if self.Q.degree % 2:
            raise ValueError(f"Invalid degree of Q : {self.Q.degree}. Must be even")
        total = sum(zero.multiplicity for zero in self.zeros)
        if total != self.Q.degree:
            raise ValueError(
                f"inconsistent zeros : multiplicities sum to {total}, degree is {self.Q.degree}"
            )
        error = self.factored().max_coefficient_error(self.Q)
        if error > 1e-10 * max(1.0, float(np.abs(self.Q.array).max())):
            raise ValueError(f"inconsistent zeros : factored form differs by {error:.3e}")

    @classmethod
    def from_zeros(cls, zeros: Sequence[Zero], leading: complex) -> "QuadraticDifferential":
        roots = [zero.location for zero in zeros for _ in range(zero.multiplicity)]
        return cls(CplxPoly.from_roots(roots, leading), tuple(zeros))

    def factored(self) -> CplxPoly:
        roots = [zero.location for zero in self.zeros for _ in range(zero.multiplicity)]
        return CplxPoly.from_roots(roots, complex(self.Q.leading))

    @property
    def d(self) -> int:
        return self.Q.degree // 2 + 1

    @property
    def leading(self) -> complex:
        return complex(self.Q.leading)

    @cached_property
    def locations(self) -> np.ndarray:
        return np.asarray([zero.location for zero in self.zeros], dtype=complex)

    def __call__(self, z):
        return self.Q(z)

    def sqrt(self, z, reference):
        """
        Q(z)^(1/2) with the sign closest to `reference` (scalar or array).
        """
        root = np.sqrt(self.Q(z) + 0j)
        aligned = np.where(np.real(root * np.conj(reference)) < 0, -root, root)
        return complex(aligned) if np.ndim(aligned) == 0 else aligned

    def nearest_zero(self, z: complex) -> Tuple[int, float]:
        if not self.zeros:
            return -1, float("inf")
        distances = np.abs(self.locations - z)
        index = int(np.argmin(distances))
        return index, float(distances[index])

    def escape_radius(self, scale: float = 10.0) -> float:
        return scale * (1.0 + float(np.abs(self.locations).max(initial=0.0)))

    def symmetric_defect(self, samples: Sequence[complex]) -> float:
        """
        max |Q(z) - conj(Q(-conj z))| over the samples.
        """
        z = np.asarray(samples, dtype=complex)
        return float(np.abs(self.Q(z) - np.conj(self.Q(-np.conj(z)))).max())


def emanation_angles(
    qd: QuadraticDifferential,
    zero_index: int,
    kind: TrajectoryKind = TrajectoryKind.HORIZONTAL,
) -> List[float]:
    """
    The m+2 directions in which critical trajectories leave a zero of order m,
    solutions of (m+2) psi = pi - arg Q^(m)(z0) (horizontal) or -arg Q^(m)(z0)
    (vertical), sorted ascending in (-pi, pi].
    """
    if not 0 <= zero_index < len(qd.zeros):
        raise ValueError(f"Invalid zero index : {zero_index}")
    zero = qd.zeros[zero_index]
    m = zero.multiplicity
    derivative = complex(qd.Q.derivative(m)(zero.location)) / factorial(m)
    phase = -np.angle(derivative) + (np.pi if kind is TrajectoryKind.HORIZONTAL else 0.0)
    angles = [wrap_angle((phase + 2 * np.pi * k) / (m + 2)) for k in range(m + 2)]
    return sorted(angles)


def asymptotic_directions(
    qd: QuadraticDifferential, kind: TrajectoryKind = TrajectoryKind.HORIZONTAL
) -> List[float]:
    """
    The 2d angles at which trajectories of the given kind can tend to infinity.
    """
    return directions_from_leading(qd.leading, qd.d, kind is TrajectoryKind.VERTICAL)


def continuation_angle(qd: QuadraticDifferential, zero_index: int, arc_angle: float) -> float:
    """
    The vertical direction at a simple zero opposite to the arc leaving at arc_angle.
    """
    if qd.zeros[zero_index].multiplicity != 1:
        raise ValueError(f"Invalid zero index : {zero_index}. Continuation needs a simple zero")
    return wrap_angle(arc_angle + np.pi)
