import numpy as np
from enum import Enum
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple
from src.core.algebra import CplxPoly


class SectorKind(Enum):
    """
    S sectors carry Re V -> +inf, complementary sectors Re V -> -inf.
    """

    SECTOR = "S"
    COMPLEMENTARY = "S'"


@dataclass(frozen=True)
class Sector:
    """
    Open angular interval (start, end) with its 1-based index.
    """

    kind: SectorKind
    index: int
    start: float
    end: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.start + self.end)

    @property
    def label(self) -> str:
        return f"{self.kind.value}{self.index}"


@dataclass(frozen=True)
class Potential:
    """
    Polynomial external field V with leading coefficient -i/d.

    contour_class is the pair (j, k) of the class T_{j,k}: contours running from
    infinity in S_j to infinity in S_k.
    """

    name: str
    V: CplxPoly
    K: float = 0.0
    contour_class: Tuple[int, int] = (2, 1)

    def __post_init__(self) -> None:
        expected = -1j / self.degree
        if abs(complex(self.V.leading) - expected) > 1e-14:
            raise ValueError(
                f"Invalid potential {self.name} : leading coefficient must be -i/{self.degree}"
            )
        for j in self.contour_class:
            if not 1 <= j <= self.degree:
                raise ValueError(f"Invalid contour class {self.contour_class} for d={self.degree}")

    @classmethod
    def cubic(cls, K: float) -> "Potential":
        """
        V(z) = -i z^3/3 + i K z, contours from S_2 to S_1.
        """
        return cls(f"cubic(K={K})", CplxPoly((0j, 1j * K, 0j, -1j / 3)), float(K), (2, 1))

    @classmethod
    def quintic(cls, contour_class: Tuple[int, int] = (3, 1)) -> "Potential":
        """
        V(z) = -i z^5/5 in the class T_{3,1} or T_{4,5}.
        """
        contour_class = tuple(contour_class)
        if contour_class not in ((3, 1), (4, 5)):
            raise ValueError(f"Invalid value : {contour_class}. Must be (3, 1) or (4, 5)")
        return cls(
            f"quintic{contour_class}", CplxPoly((0j, 0j, 0j, 0j, 0j, -1j / 5)), 0.0, contour_class
        )

    @property
    def degree(self) -> int:
        return self.V.degree

    def __call__(self, z):
        return self.V(z)

    def re_V(self, z):
        return np.real(self.V(z))

    @cached_property
    def sectors(self) -> List[Sector]:
        d = self.degree
        return [
            Sector(SectorKind.SECTOR, j, (2 * j - 2) * np.pi / d, (2 * j - 1) * np.pi / d)
            for j in range(1, d + 1)
        ]

    @cached_property
    def complementary_sectors(self) -> List[Sector]:
        d = self.degree
        return [
            Sector(SectorKind.COMPLEMENTARY, j, (2 * j - 1) * np.pi / d, 2 * j * np.pi / d)
            for j in range(1, d + 1)
        ]

    def sector(self, index: int) -> Sector:
        return self.sectors[index - 1]

    @property
    def class_label(self) -> str:
        j, k = self.contour_class
        return f"T{j},{k}"


def sector_of(pot: Potential, angle: float, tol: Optional[float] = None) -> Sector:
    """
    Sector containing the direction `angle`: S_j or its complementary S'_j.
    Angles within tol of a boundary jπ/d raise "boundary angle".
    """
    d = pot.degree
    tol = 1e-12 if tol is None else tol
    x = np.mod(d * angle / np.pi, 2 * d)
    nearest = np.round(x)
    if abs(x - nearest) * np.pi / d <= tol:
        raise ValueError(f"boundary angle : {angle} lies on a sector boundary of d={d}")
    k = int(np.floor(x))
    if k % 2 == 0:
        return pot.sectors[k // 2]
    return pot.complementary_sectors[(k - 1) // 2]
