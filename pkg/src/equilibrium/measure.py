"""
Equilibrium measure carried by a connecting arc.

On a horizontal arc D(z) = (1/(pi i)) * integral of Q^(1/2) is real and
monotone, and dmu = dD. The arc is parametrised by its mass coordinate
t = D(z) in [0, M]. Each half of [0, M] is mapped to u in [0, 1] by
t = (M/2) g(u), g(u) = 4u^3 - 3u^4, so that z(u) stays smooth both at the
simple end zeros (z - z1 ~ t^(2/3)) and at a double zero in the middle of a
critical chain (z - z0 ~ (M/2 - t)^(1/2)). Integrals use composite
Gauss-Legendre in u.

The checks here certify necessary numerical conditions (mass, variational
equality and inequality, S-property residual, energy identity); they do not
prove the S-property.
"""

import numpy as np
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple
from numpy.polynomial import legendre
from src.config.logger import logger
from src.core.potential import Potential
from src.geometry.quadratic_differential import QuadraticDifferential, TrajectoryKind
from src.geometry.trajectory import (
    Trajectory,
    ZeroHit,
    chord_integral,
    integral_from_zero,
    legendre_nodes,
)
from src.utils.helpers import catch_exceptions


DEFAULT_PANELS = 24
DEFAULT_ORDER = 16
NEWTON_ITERATIONS = 40
BRANCH_TOL = 1e-6
S_PROPERTY_WINDOW = (0.02, 0.98)
ELL_WINDOW = (0.05, 0.95)
TAIL_START = 0.1
TAIL_SAMPLES = 200
CHUNK = 256


def _grading(u: np.ndarray) -> np.ndarray:
    return 4.0 * u**3 - 3.0 * u**4


def _grading_derivative(u: np.ndarray) -> np.ndarray:
    return 12.0 * u**2 * (1.0 - u)


@dataclass(frozen=True, eq=False)
class ArcMeasure:
    """
    A measure on the arc sampled at quadrature nodes, ordered by increasing t.

    sign is +1 or -1, the orientation of the traced branch that makes the density
    positive; branches holds sign * Q^(1/2) at the nodes. dt are the quadrature
    weights in t, ds the arclength weights and weights the measure of each node.
    """

    qd: QuadraticDifferential
    arc: Trajectory
    sign: int
    span: float
    z: np.ndarray
    branches: np.ndarray
    t: np.ndarray
    dt: np.ndarray
    ds: np.ndarray
    weights: np.ndarray
    panels: int
    order: int
    label: str = "equilibrium"

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def density(self) -> np.ndarray:
        """
        Density per unit arclength.
        """
        return self.weights / self.ds

    @property
    def length(self) -> float:
        return float(self.ds.sum())

    def window(self, bounds: Tuple[float, float]) -> np.ndarray:
        lo, hi = bounds
        return (self.t >= lo * self.span) & (self.t <= hi * self.span)

    def point_at(self, t) -> np.ndarray:
        z, _ = _points_at(self.qd, self.arc, self.sign, np.atleast_1d(t))
        return z


@dataclass(frozen=True)
class VariationalReport:
    """
    ell is the mean of 2U + Re V over the interior of the arc (5% to 95% of the mass).
    """

    ell: float
    on_support_deviation: float
    off_support_margin: float
    tails_increasing: bool
    tail_count: int


@dataclass(frozen=True)
class EnergyReport:
    E_V: float
    log_energy: float
    external: float
    ell: float
    consistency_gap: float


def _quadrature_grid(panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre nodes u and weights du on [0, 1], shape (panels, order).
    """
    x, w = legendre_nodes(order)
    left = np.arange(panels)[:, None] / panels
    u = left + 0.5 * (x[None, :] + 1.0) / panels
    du = np.broadcast_to(0.5 * w[None, :] / panels, u.shape)
    return u, du


def _halves(values: np.ndarray, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Splits flat node values (ascending t) into the two halves, each in ascending u.
    """
    size = panels * order
    return values[:size].reshape(panels, order), values[size:][::-1].reshape(panels, order)


def _geometry(z: np.ndarray, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unit tangents (direction of increasing t) and arclength weights at the nodes,
    from the Legendre interpolant of z on every panel.
    """
    x, w = legendre_nodes(order)
    tangents, lengths = [], []
    for half, orientation in zip(_halves(z, panels, order), (1.0, -1.0)):
        coeffs = legendre.legfit(x, half.real.T, order - 1), legendre.legfit(x, half.imag.T, order - 1)
        dz_dx = legendre.legval(x, legendre.legder(coeffs[0])) + 1j * legendre.legval(
            x, legendre.legder(coeffs[1])
        )
        tangents.append(orientation * dz_dx / np.abs(dz_dx))
        lengths.append(np.abs(dz_dx) * w[None, :])
    flat = lambda pair: np.concatenate((pair[0].ravel(), pair[1].ravel()[::-1]))
    return flat(tangents), flat(lengths)


def _points_at(
    qd: QuadraticDifferential, arc: Trajectory, sign: int, targets: Sequence[float]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points z(t) of the arc with D(z) = t, by Newton from the traced polyline.
    Chords next to a zero are integrated from the zero itself.
    """
    T = sign * arc.D.real
    W = sign * arc.branches
    at_zero = arc.branches == 0
    points = arc.points
    zs, ws = [], []
    for t in targets:
        k = int(np.clip(np.searchsorted(T, t) - 1, 0, len(T) - 2))
        anchor = k + 1 if at_zero[k + 1] and not at_zero[k] else k
        other = k if anchor == k + 1 else k + 1

        if at_zero[anchor]:
            zero_index, _ = qd.nearest_zero(points[anchor])
            m = qd.zeros[zero_index].multiplicity
            zero = points[anchor]
            fraction = np.clip((t - T[anchor]) / (T[other] - T[anchor]), 0.0, 1.0)
            if fraction == 0:
                zs.append(complex(zero))
                ws.append(0j)
                continue
            z = zero + (points[other] - zero) * fraction ** (2.0 / (m + 2))
            reference = W[other]

            def D(z, w_z, zero_index=zero_index, base=T[anchor]):
                return base + integral_from_zero(qd, zero_index, z, w_z)

        else:
            zero = None
            fraction = (t - T[k]) / (T[k + 1] - T[k])
            z = points[k] + (points[k + 1] - points[k]) * fraction
            reference = W[k]

            def D(z, w_z, k=k):
                return T[k] + chord_integral(qd, points[k], z, W[k], w_z)

        for _ in range(NEWTON_ITERATIONS):
            w_z = qd.sqrt(z, reference)
            residual = D(z, w_z) - t
            if abs(residual) <= 1e-14 * max(1.0, abs(t)):
                break
            step = residual * np.pi * 1j / w_z
            if zero is not None and abs(step) > 0.5 * abs(z - zero):
                step *= 0.5 * abs(z - zero) / abs(step)
            z, reference = z - step, w_z
        else:
            if abs(residual) > 1e-10 * max(1.0, abs(t)):
                raise RuntimeError(f"did not converge : D(z) - t = {abs(residual):.3e} at t={t}")
        zs.append(complex(z))
        ws.append(complex(qd.sqrt(z, reference)))
    return np.asarray(zs), np.asarray(ws)


@catch_exceptions
def density_from_Q(
    qd: QuadraticDifferential,
    arc: Trajectory,
    panels: int = DEFAULT_PANELS,
    order: int = DEFAULT_ORDER,
) -> ArcMeasure:
    """
    Samples dmu = (1/(pi i)) Q^(1/2) ds along the arc. The branch sign is fixed so the
    total mass is positive; at interior nodes the density must come out real and positive.
    """
    if (
        arc.kind is not TrajectoryKind.HORIZONTAL
        or arc.start.zero_index is None
        or not isinstance(arc.end, ZeroHit)
    ):
        raise ValueError("Arc must be a horizontal trajectory joining two zeros")
    total = float(arc.D[-1].real)
    sign = 1 if total > 0 else -1
    span = abs(total)

    u, du = _quadrature_grid(panels, order)
    half_t = 0.5 * span * _grading(u)
    half_dt = 0.5 * span * _grading_derivative(u) * du
    t = np.concatenate((half_t.ravel(), (span - half_t).ravel()[::-1]))
    dt = np.concatenate((half_dt.ravel(), half_dt.ravel()[::-1]))

    z, branches = _points_at(qd, arc, sign, t)
    tangents, ds = _geometry(z, panels, order)

    values = branches * tangents / (np.pi * 1j)
    lo, hi = S_PROPERTY_WINDOW
    interior = (t >= lo * span) & (t <= hi * span)
    mismatch = (np.abs(values.imag) > BRANCH_TOL * np.abs(values)) | (values.real <= 0)
    if np.any(mismatch & interior):
        worst = int(np.argmax(np.where(interior, np.abs(values.imag) / np.abs(values), 0.0)))
        raise ValueError(
            f"branch/arc mismatch : density {values[worst]:.3e} at {z[worst]:.6f} is not real positive"
        )

    measure = ArcMeasure(
        qd=qd,
        arc=arc,
        sign=sign,
        span=span,
        z=z,
        branches=branches,
        t=t,
        dt=dt,
        ds=ds,
        weights=np.abs(branches) / np.pi * ds,
        panels=panels,
        order=order,
    )
    logger.info(
        f"Equilibrium measure - Built on {len(z)} nodes : mass={measure.mass:.10f}, length={measure.length:.6f}"
    )
    return measure


def uniform_like(measure: ArcMeasure) -> ArcMeasure:
    """
    Arclength-uniform probability measure on the same arc and nodes.
    """
    return replace(measure, weights=measure.ds / measure.ds.sum(), label="uniform")


def displaced(measure: ArcMeasure, amplitude: float = 0.05) -> ArcMeasure:
    """
    Same nodes pushed off the arc along the normal by amplitude * sin(pi t / M).
    """
    tangents, _ = _geometry(measure.z, measure.panels, measure.order)
    shift = amplitude * np.sin(np.pi * measure.t / measure.span) * 1j * tangents
    return replace(measure, z=measure.z + shift, label="displaced")


def s_property_residual(qd: QuadraticDifferential, measure: ArcMeasure) -> float:
    """
    max |Re(Q^(1/2) tau)| / |Q^(1/2)| over the interior nodes, tau the unit tangent of
    the node curve. It vanishes exactly when the curve is a horizontal trajectory.
    """
    tangents, _ = _geometry(measure.z, measure.panels, measure.order)
    w = qd.sqrt(measure.z, measure.branches)
    interior = measure.window(S_PROPERTY_WINDOW)
    ratio = np.abs(np.real(w * tangents)) / np.abs(w)
    return float(ratio[interior].max())


def log_potential(measure: ArcMeasure, z):
    """
    U(z) = -integral log|z - s| dmu(s) at points off the arc.
    """
    points = np.atleast_1d(np.asarray(z, dtype=complex))
    values = np.concatenate(
        [
            -np.log(np.abs(points[k : k + CHUNK, None] - measure.z[None, :])) @ measure.weights
            for k in range(0, len(points), CHUNK)
        ]
    )
    return float(values[0]) if np.ndim(z) == 0 else values


def _self_integral(t: np.ndarray, span: float) -> np.ndarray:
    """
    integral over [0, M] of -log|t - s| ds.
    """
    return span - t * np.log(t) - (span - t) * np.log(span - t)


def node_potentials(measure: ArcMeasure) -> np.ndarray:
    """
    U at the nodes by singularity subtraction in the mass coordinate:
    -log|z_j - z(s)| = -log|t_j - s| - log(|z_j - z(s)| / |t_j - s|). The first part
    integrates in closed form, the second is smooth and its diagonal limit is
    log|dz/dt| = log(pi / |Q^(1/2)|).
    """
    t, dt, z = measure.t, measure.dt, measure.z
    rho = measure.weights / dt
    log_t = np.log(np.abs(t[:, None] - t[None, :]) + np.eye(len(t)))
    log_z = np.log(np.abs(z[:, None] - z[None, :]) + np.eye(len(z)))
    diagonal = rho * dt * np.log(np.pi / np.abs(measure.branches))
    return rho * _self_integral(t, measure.span) - log_z @ measure.weights + rho * (log_t @ dt) - diagonal


def log_potential_on_arc(measure: ArcMeasure, t) -> np.ndarray:
    """
    U at arc points given by mass coordinate, for the equilibrium measure (unit density in t).
    """
    if measure.label != "equilibrium":
        raise ValueError(f"On-arc potential needs the equilibrium measure, got {measure.label}")
    targets = np.atleast_1d(np.asarray(t, dtype=float))
    points = measure.point_at(targets)
    log_t = np.log(np.abs(targets[:, None] - measure.t[None, :]))
    log_z = np.log(np.abs(points[:, None] - measure.z[None, :]))
    return _self_integral(targets, measure.span) - log_z @ measure.weights + log_t @ measure.dt


def _tail_samples(tail: Trajectory) -> np.ndarray:
    s = tail.arclength
    if s[-1] <= TAIL_START:
        return np.zeros(0, dtype=complex)
    grid = np.linspace(TAIL_START, s[-1], TAIL_SAMPLES)
    return np.interp(grid, s, tail.points.real) + 1j * np.interp(grid, s, tail.points.imag)


def _interior_constant(measure: ArcMeasure, values: np.ndarray) -> float:
    return float(values[measure.window(ELL_WINDOW)].mean())


@catch_exceptions
def variational_check(
    measure: ArcMeasure, pot: Potential, extended_contour: Sequence[Trajectory]
) -> VariationalReport:
    """
    2U + Re V must equal ell on the arc and be at least ell on the tails.
    """
    values = 2.0 * node_potentials(measure) + pot.re_V(measure.z)
    ell = _interior_constant(measure, values)
    deviation = float(np.abs(values - ell).max())

    margins: List[float] = []
    increasing = True
    for tail in extended_contour:
        points = _tail_samples(tail)
        if not len(points):
            continue
        f = 2.0 * log_potential(measure, points) + pot.re_V(points) - ell
        margins.append(float(f.min()))
        increasing = increasing and bool(np.all(np.diff(f) > 0))
    margin = min(margins) if margins else float("inf")
    logger.info(
        f"Variational check - ell={ell:.10f} : deviation={deviation:.3e}, margin={margin:.3e}, increasing={increasing}"
    )
    return VariationalReport(ell, deviation, margin, increasing, len(margins))


@catch_exceptions
def energy(measure: ArcMeasure, pot: Potential) -> EnergyReport:
    """
    E_V = double logarithmic integral + integral of Re V, with the identity
    ell = 2 E_V - integral Re V dmu as consistency check.
    """
    U = node_potentials(measure)
    re_V = pot.re_V(measure.z)
    log_energy = float(measure.weights @ U)
    external = float(measure.weights @ re_V)
    E_V = log_energy + external
    ell = _interior_constant(measure, 2.0 * U + re_V)
    gap = abs(ell - (2.0 * E_V - external))
    logger.info(f"Energy {measure.label} - E_V={E_V:.10f} : gap={gap:.3e}")
    return EnergyReport(E_V, log_energy, external, ell, gap)


def endpoint_exponent(measure: ArcMeasure) -> Tuple[float, float]:
    """
    Fitted exponent alpha of density ~ distance^alpha on the first and last panel.
    """
    start, end = measure.arc.points[0], measure.arc.points[-1]
    head = slice(0, measure.order)
    tail = slice(len(measure.z) - measure.order, len(measure.z))
    exponents = []
    for window, zero in ((head, start), (tail, end)):
        distance = np.abs(measure.z[window] - zero)
        slope, _ = np.polyfit(np.log(distance), np.log(measure.density[window]), 1)
        exponents.append(float(slope))
    return exponents[0], exponents[1]


def project(measure: ArcMeasure, points: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mass coordinate t of the nearest point of the arc polyline, and the distance to it.
    """
    line = measure.arc.points
    T = measure.sign * measure.arc.D.real
    a, ab = line[:-1], np.diff(line)
    length2 = np.maximum(np.abs(ab) ** 2, 1e-300)
    values = np.asarray(points, dtype=complex)
    coordinates, distances = [], []
    for k in range(0, len(values), CHUNK):
        p = values[k : k + CHUNK, None]
        s = np.clip(np.real((p - a[None, :]) * np.conj(ab[None, :])) / length2[None, :], 0.0, 1.0)
        gap = np.abs(p - (a[None, :] + s * ab[None, :]))
        nearest = np.argmin(gap, axis=1)
        rows = np.arange(len(nearest))
        coordinates.append(T[nearest] + s[rows, nearest] * (T[nearest + 1] - T[nearest]))
        distances.append(gap[rows, nearest])
    if not coordinates:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(coordinates), np.concatenate(distances)
