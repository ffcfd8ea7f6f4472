"""
Contour moments m_k = integral over Gamma of z^k exp(-n V(z)) dz at working precision.

Gamma is a two-ray polyline from the sector S_j to the sector S_k of the
potential's contour class, cut where the integrand has fallen 10^-(P+10)
below its peak. Every segment is integrated with adaptive Gauss-Legendre
panels inside a private mpmath context.
"""

import numpy as np
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple
from mpmath import MPContext
from mpmath.calculus.quadrature import GaussLegendre
from src.config.logger import logger
from src.core.algebra import Precision
from src.core.potential import Potential, sector_of
from src.utils.helpers import catch_exceptions


GUARD_DIGITS = 15
PANEL_ORDER = 24
MAX_PANELS = 4000
MAX_RADIUS = 50.0
RADIUS_STEP = 0.02
INITIAL_PANEL_LENGTH = 0.5
CONTOUR_VARIANTS = {0: (0j, 0.0), 1: (-0.3j, 0.1)}


def precision_policy(n: int, digits: Optional[int] = None) -> int:
    """
    P = max(50, 6n) unless a precision is imposed.
    """
    return int(digits) if digits is not None else max(50, 6 * n)


def _rule_degree(order: int) -> int:
    """
    mpmath's Gauss-Legendre rule of degree m has 3 * 2^(m-1) nodes.
    """
    degree, size = 1, 3
    while size < order:
        degree, size = degree + 1, 2 * size
    if size != order:
        raise ValueError(f"Invalid Gauss-Legendre order : {order}. Must be 3 * 2^k")
    return degree


@lru_cache(maxsize=32)
def _legendre_rule(digits: int, order: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Nodes and weights of mpmath's Gauss-Legendre rule, as decimal strings so that
    every context at the same precision can reuse them.
    """
    ctx = Precision(digits + 10).context()
    pairs = GaussLegendre(ctx).get_nodes(-1, 1, _rule_degree(order), ctx.prec)
    pairs = sorted(pairs, key=lambda pair: pair[0])
    as_text = lambda values: tuple(ctx.nstr(v, digits + 8) for v in values)
    return as_text([x for x, _ in pairs]), as_text([w for _, w in pairs])


def gauss_legendre(ctx: MPContext, order: int) -> Tuple[List, List]:
    """
    Gauss-Legendre nodes (ascending) and weights on [-1, 1] at the precision of ctx.
    """
    nodes, weights = _legendre_rule(ctx.dps, order)
    return [ctx.mpf(x) for x in nodes], [ctx.mpf(w) for w in weights]


@dataclass(frozen=True)
class Contour:
    """
    Polyline start ray -> vertex -> end ray, oriented from S_j to S_k.
    """

    contour_class: Tuple[int, int]
    vertex: complex
    angles: Tuple[float, float]
    radii: Tuple[float, float]
    variant: int

    @property
    def vertices(self) -> Tuple[complex, complex, complex]:
        start = self.vertex + self.radii[0] * np.exp(1j * self.angles[0])
        end = self.vertex + self.radii[1] * np.exp(1j * self.angles[1])
        return complex(start), complex(self.vertex), complex(end)

    def describe(self) -> str:
        return (
            f"T{self.contour_class[0]},{self.contour_class[1]} vertex {self.vertex:.3f} "
            f"angles {self.angles[0] / np.pi:.4f}pi, {self.angles[1] / np.pi:.4f}pi "
            f"radii {self.radii[0]:.3f}, {self.radii[1]:.3f}"
        )


@dataclass(frozen=True)
class MomentTable:
    n: int
    moments: Tuple[object, ...]
    digits: int
    contour: Contour
    panels: int

    @property
    def count(self) -> int:
        return len(self.moments)

    def context(self) -> MPContext:
        return Precision(self.digits + GUARD_DIGITS).context()

    def symmetry_defect(self) -> float:
        """
        max_k |m_k - (-1)^k conj(m_k)| / max_k |m_k|, zero for a weight symmetric under z -> -conj(z).
        """
        ctx = self.context()
        scale = max(abs(m) for m in self.moments)
        defect = max(
            abs(m - (-1) ** k * ctx.conj(m)) for k, m in enumerate(self.moments)
        )
        return float(defect / scale)

    def relative_difference(self, other: "MomentTable") -> float:
        scale = max(abs(m) for m in self.moments)
        return float(max(abs(a - b) for a, b in zip(self.moments, other.moments)) / scale)


def _log_magnitude(pot: Potential, n: int, z: np.ndarray) -> np.ndarray:
    """
    log(|exp(-n V(z))| (1 + |z|)^(2n)) in double precision.
    """
    return -n * pot.re_V(z) + 2 * n * np.log1p(np.abs(z))


@catch_exceptions
def quadrature_contour(pot: Potential, n: int, digits: int, variant: int = 0) -> Contour:
    """
    Two rays from the vertex through the middle of S_j and S_k (tilted by +-0.1 rad
    for variant 1), truncated where the integrand is below 10^-(P+10) of its peak.
    """
    if variant not in CONTOUR_VARIANTS:
        raise ValueError(f"Invalid contour variant : {variant}. Must be 0 or 1")
    vertex, tilt = CONTOUR_VARIANTS[variant]
    j, k = pot.contour_class
    angles = (pot.sector(j).midpoint + tilt, pot.sector(k).midpoint - tilt)
    for index, angle in zip((j, k), angles):
        sector = sector_of(pot, angle)
        if sector != pot.sector(index):
            raise ValueError(f"Contour ray at {angle:.6f} leaves sector S{index}")

    r = np.arange(0.0, MAX_RADIUS + RADIUS_STEP, RADIUS_STEP)
    profiles = [_log_magnitude(pot, n, vertex + r * np.exp(1j * angle)) for angle in angles]
    peak = max(profile.max() for profile in profiles)
    floor = peak - (digits + 10) * np.log(10.0)
    radii = []
    for angle, profile in zip(angles, profiles):
        top = int(np.argmax(profile))
        below = np.nonzero(profile[top:] < floor)[0]
        if not len(below):
            raise ValueError(
                f"truncation bound unreachable within radius {MAX_RADIUS} along angle {angle:.6f}"
            )
        radii.append(float(r[top + below[0]]))
    contour = Contour(pot.contour_class, complex(vertex), angles, (radii[0], radii[1]), variant)
    logger.debug(f"Quadrature contour n={n} P={digits} - {contour.describe()}")
    return contour


class _PanelIntegrator:
    """
    Adaptive Gauss-Legendre integration of the vector (z^k exp(-n V(z)))_k along segments.
    """

    def __init__(self, ctx: MPContext, pot: Potential, n: int, count: int, tolerance) -> None:
        self.ctx = ctx
        self.n = n
        self.count = count
        self.tolerance = tolerance
        leading = ctx.mpc(0, -1) / pot.degree
        self.V = [leading] + [ctx.mpmathify(c) for c in reversed(pot.V.coeffs[:-1])]
        self.nodes, self.weights = gauss_legendre(ctx, PANEL_ORDER)
        self.panels = 0

    def _integrand(self, z) -> List:
        ctx = self.ctx
        value = ctx.exp(-self.n * ctx.polyval(self.V, z))
        row = [value]
        for _ in range(1, self.count):
            value *= z
            row.append(value)
        return row

    def _panel(self, a, b) -> List:
        ctx = self.ctx
        half, middle = (b - a) / 2, (a + b) / 2
        total = [ctx.zero] * self.count
        for x, w in zip(self.nodes, self.weights):
            row = self._integrand(middle + half * x)
            total = [t + w * v for t, v in zip(total, row)]
        return [half * t for t in total]

    def integrate(self, a, b) -> List:
        ctx = self.ctx
        length = abs(b - a)
        pieces = max(1, int(np.ceil(float(length) / INITIAL_PANEL_LENGTH)))
        edges = [a + (b - a) * ctx.mpf(i) / pieces for i in range(pieces + 1)]
        stack = [(edges[i], edges[i + 1], self._panel(edges[i], edges[i + 1])) for i in range(pieces)]
        total = [ctx.zero] * self.count
        worst = (0, None)
        while stack:
            lo, hi, whole = stack.pop()
            mid = (lo + hi) / 2
            left, right = self._panel(lo, mid), self._panel(mid, hi)
            error = max(abs(w - l - r) for w, l, r in zip(whole, left, right))
            self.panels += 1
            if error <= self.tolerance * abs(hi - lo) / length:
                total = [t + l + r for t, l, r in zip(total, left, right)]
                continue
            if error > worst[0] or worst[1] is None:
                worst = (error, (complex(lo), complex(hi)))
            if self.panels >= MAX_PANELS:
                raise RuntimeError(
                    f"panel subdivision limit : {MAX_PANELS} panels, worst panel {worst[1]} error {float(worst[0]):.3e}"
                )
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
        return total


@catch_exceptions
def moments(
    pot: Potential, n: int, count: Optional[int] = None, digits: Optional[int] = None, variant: int = 0
) -> MomentTable:
    """
    m_k for k = 0..count-1 (count defaults to 2n + 1) at P digits.
    """
    count = 2 * n + 1 if count is None else count
    if count < 2 * n + 1:
        raise ValueError(f"Invalid moment count : {count}. Must be at least {2 * n + 1}")
    digits = precision_policy(n, digits)
    contour = quadrature_contour(pot, n, digits, variant)

    ctx = Precision(digits + GUARD_DIGITS).context()
    peak = max(
        _log_magnitude(pot, n, np.linspace(u, v, 400)).max()
        for u, v in zip(contour.vertices[:-1], contour.vertices[1:])
    )
    tolerance = ctx.exp(ctx.mpf(peak)) * ctx.mpf(10) ** (-(digits + 5))
    integrator = _PanelIntegrator(ctx, pot, n, count, tolerance)

    total = [ctx.zero] * count
    vertices = [ctx.mpc(v.real, v.imag) for v in contour.vertices]
    for a, b in zip(vertices[:-1], vertices[1:]):
        total = [t + s for t, s in zip(total, integrator.integrate(a, b))]
    table = MomentTable(n, tuple(total), digits, contour, integrator.panels)
    logger.info(
        f"Moments n={n} P={digits} variant {variant} - Integration successful : {count} moments, {integrator.panels} panels"
    )
    return table


def moment_row(table: MomentTable, k: int, coefficients: Sequence) -> object:
    """
    integral of z^k P(z) exp(-n V(z)) dz for P with ascending coefficients.
    """
    return sum(c * table.moments[k + i] for i, c in enumerate(coefficients))
