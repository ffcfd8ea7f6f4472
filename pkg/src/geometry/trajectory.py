"""
Trajectory tracing for -Q(z) dz^2.

A horizontal trajectory is a level curve of Im D and a vertical one a level
curve of Re D, where D(z) = (1/(pi i)) * integral of Q^(1/2). The tracer steps
along the unit tangent with an RK4 predictor, tracks the branch of Q^(1/2) by
continuity, integrates D chord by chord with Gauss-Legendre, and after each
step pulls the new point back onto the level set with a transverse corrector.
"""

import numpy as np
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import List, Optional, Sequence, Tuple, Union
from src.config.logger import logger
from src.geometry.directions import DirectionTable, direction_table
from src.geometry.quadratic_differential import (
    QuadraticDifferential,
    TrajectoryKind,
    asymptotic_directions,
    emanation_angles,
)
from src.utils.helpers import angle_distance, catch_exceptions, circular_mean, wrap_angle


@dataclass(frozen=True)
class TraceOptions:
    """
    Step, stop and tolerance parameters of the tracer.
    """

    drift_tol: float = 1e-7
    capture_scale: float = 1e-5
    seed_scale: float = 1e-4
    escape_scale: float = 10.0
    angle_tol: float = 0.02
    max_points: int = 1_000_000
    step_scale: float = 0.01
    zero_step_fraction: float = 0.25
    min_step: float = 1e-13
    max_turn: float = 0.15
    corrector_iterations: int = 4
    quadrature_order: int = 8

    def capture_radius(self, location: complex) -> float:
        return self.capture_scale * (1.0 + abs(location))

    def seed_radius(self, location: complex) -> float:
        return self.seed_scale * (1.0 + abs(location))

    def refined(self, factor: float = 0.25) -> "TraceOptions":
        return replace(self, capture_scale=self.capture_scale * factor)


@dataclass(frozen=True)
class ZeroHit:
    index: int
    distance: float

    def describe(self) -> str:
        return f"ZeroHit({self.index})"


@dataclass(frozen=True)
class InfinityDirection:
    """
    Escape to infinity along the admissible direction j (angle in [0, 2pi)).
    measured is the estimated asymptotic angle; ambiguous marks deviations above half the tolerance.
    """

    j: int
    angle: float
    measured: float
    deviation: float
    ambiguous: bool = False

    def describe(self) -> str:
        return f"InfinityDirection({self.j}, {self.angle / np.pi:.4f}pi)"


@dataclass(frozen=True)
class Truncated:
    reason: str

    def describe(self) -> str:
        return f"Truncated({self.reason})"


Endpoint = Union[ZeroHit, InfinityDirection, Truncated]


@dataclass(frozen=True)
class StartPoint:
    location: complex
    angle: float
    zero_index: Optional[int] = None


@dataclass(frozen=True)
class Trajectory:
    """
    Branch-consistent polyline on a level set of Im D (horizontal) or Re D (vertical).

    D holds the accumulated values of D along the points, relative to the start
    point (or the start zero). branches holds Q^(1/2) at every point.
    """

    kind: TrajectoryKind
    points: np.ndarray
    D: np.ndarray
    branches: np.ndarray
    start: StartPoint
    end: Endpoint
    branch_seed: complex
    target: float = 0.0
    sigma: int = field(default=1, repr=False)

    @cached_property
    def arclength(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(np.abs(np.diff(self.points)))))

    @property
    def length(self) -> float:
        return float(self.arclength[-1])

    def level(self, values=None):
        values = self.D if values is None else values
        return np.imag(values) if self.kind is TrajectoryKind.HORIZONTAL else np.real(values)

    def ends_at(self, zero_index: int) -> bool:
        return isinstance(self.end, ZeroHit) and self.end.index == zero_index

    def reversed(self) -> "Trajectory":
        """
        Same curve traversed backwards; only meaningful for zero-to-zero trajectories.
        """
        if not isinstance(self.end, ZeroHit) or self.start.zero_index is None:
            raise ValueError("Only trajectories joining two zeros can be reversed")
        angle = float(np.angle(self.points[-2] - self.points[-1]))
        return replace(
            self,
            points=self.points[::-1].copy(),
            D=self.D[::-1].copy(),
            branches=self.branches[::-1].copy(),
            start=StartPoint(complex(self.points[-1]), angle, self.end.index),
            end=ZeroHit(self.start.zero_index, 0.0),
            branch_seed=complex(self.branches[-2]),
            sigma=-self.sigma,
        )


@dataclass(frozen=True)
class NotFound:
    """
    Outcome of a connection search that found no trajectory between the two zeros.
    """

    zero_a: int
    zero_b: int
    endpoints: Tuple[Endpoint, ...]
    trajectories: Tuple[Trajectory, ...] = field(default=(), repr=False, compare=False)


@lru_cache(maxsize=16)
def legendre_nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on [-1, 1].
    """
    return np.polynomial.legendre.leggauss(order)


def chord_integral(
    qd: QuadraticDifferential,
    a: complex,
    b: complex,
    w_a: complex,
    w_b: complex,
    order: int = 8,
) -> complex:
    """
    (1/(pi i)) * integral of Q^(1/2) over the segment [a, b], with the branch
    interpolated between the endpoint values w_a and w_b.
    """
    x, weights = legendre_nodes(order)
    s = 0.5 * (a + b) + 0.5 * (b - a) * x
    reference = w_a + (w_b - w_a) * 0.5 * (x + 1.0)
    values = qd.sqrt(s, reference)
    return 0.5 * (b - a) * np.dot(weights, values) / (np.pi * 1j)


def integral_from_zero(
    qd: QuadraticDifferential, zero_index: int, z: complex, w_z: complex, order: int = 8
) -> complex:
    """
    (1/(pi i)) * integral of Q^(1/2) from a zero to z along the segment, using
    s = zero + (z - zero) u^2, which removes the branch singularity at the zero.
    """
    zero = qd.zeros[zero_index]
    x, weights = legendre_nodes(order)
    u = 0.5 * (x + 1.0)
    s = zero.location + (z - zero.location) * u**2
    reference = w_z * u**zero.multiplicity
    values = qd.sqrt(s, reference)
    integrand = values * 2.0 * u * (z - zero.location)
    return 0.5 * np.dot(weights, integrand) / (np.pi * 1j)


class _Tracer:
    """
    Stepping engine shared by trace, trace_from_zero and endpoint refinement.
    """

    def __init__(
        self,
        qd: QuadraticDifferential,
        kind: TrajectoryKind,
        opts: TraceOptions,
        sigma: int,
        target: float,
    ) -> None:
        self.qd = qd
        self.kind = kind
        self.opts = opts
        self.sigma = sigma
        self.target = target
        self.capture = np.asarray(
            [opts.capture_radius(zero.location) for zero in qd.zeros], dtype=float
        )
        self.escape = qd.escape_radius(opts.escape_scale)
        self.directions = asymptotic_directions(qd, kind)

    @staticmethod
    def base_tangent(kind: TrajectoryKind, w: complex) -> complex:
        direction = 1j * np.conj(w) if kind is TrajectoryKind.HORIZONTAL else np.conj(w)
        return direction / abs(w)

    def tangent(self, z: complex, reference: complex) -> Tuple[complex, complex]:
        w = self.qd.sqrt(z, reference)
        if w == 0:
            raise ValueError(f"branch ambiguity : tangent requested at a zero of Q ({z})")
        return self.sigma * self.base_tangent(self.kind, w), w

    def level(self, D: complex) -> float:
        return D.imag if self.kind is TrajectoryKind.HORIZONTAL else D.real

    def correction(self, residual: float, w: complex) -> complex:
        if self.kind is TrajectoryKind.HORIZONTAL:
            return np.pi * residual / w
        return -1j * np.pi * residual / w

    def _step_limit(self, z: complex) -> float:
        _, distance = self.qd.nearest_zero(z)
        return min(
            self.opts.step_scale * max(1.0, abs(z)),
            self.opts.zero_step_fraction * distance,
        )

    def _finish_at_infinity(self, points: List[complex]) -> Endpoint:
        radii = np.abs(points)
        tail = [np.angle(p) for p, r in zip(points, radii) if r >= 0.9 * self.escape]
        measured = float(np.mod(circular_mean(tail), 2 * np.pi))
        deviations = [angle_distance(measured, angle) for angle in self.directions]
        j = int(np.argmin(deviations))
        deviation = deviations[j]
        if deviation > self.opts.angle_tol:
            return Truncated(f"off-grid angle {measured:.6f} (deviation {deviation:.3e})")
        return InfinityDirection(
            j, self.directions[j], measured, deviation, deviation > 0.5 * self.opts.angle_tol
        )

    def run(
        self,
        points: List[complex],
        Ds: List[complex],
        branches: List[complex],
        excluded_zero: Optional[int] = None,
        release_radius: float = 0.0,
    ) -> Tuple[List[complex], List[complex], List[complex], Endpoint]:
        """
        Continues the polyline from its last point until a stop condition fires.
        """
        qd, opts = self.qd, self.opts
        z, D, w = points[-1], Ds[-1], branches[-1]
        h = self._step_limit(z)
        level_tol = 1e-15

        while True:
            if len(points) >= opts.max_points:
                return points, Ds, branches, Truncated("budget")

            if excluded_zero is not None and abs(z - qd.locations[excluded_zero]) > release_radius:
                excluded_zero = None
            if len(qd.zeros):
                distances = np.abs(qd.locations - z)
                if excluded_zero is not None:
                    distances[excluded_zero] = np.inf
                hit = int(np.argmin(distances))
                if distances[hit] < self.capture[hit]:
                    dD = -integral_from_zero(qd, hit, z, w, opts.quadrature_order)
                    points.append(complex(qd.locations[hit]))
                    Ds.append(D + dD)
                    branches.append(0j)
                    return points, Ds, branches, ZeroHit(hit, float(distances[hit]))

            if abs(z) >= self.escape:
                return points, Ds, branches, self._finish_at_infinity(points)

            h = min(1.5 * h, self._step_limit(z))
            k1 = self.sigma * self.base_tangent(self.kind, w)
            while True:
                if h < opts.min_step * (1.0 + abs(z)):
                    return points, Ds, branches, Truncated("stalled")
                k2, w2 = self.tangent(z + 0.5 * h * k1, w)
                k3, w3 = self.tangent(z + 0.5 * h * k2, w2)
                k4, _ = self.tangent(z + h * k3, w3)
                z_new = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
                t_new, w_new = self.tangent(z_new, w)
                turn = abs(np.angle(t_new / k1))
                jump = abs(np.angle(w_new / w))
                if turn <= opts.max_turn and jump < 0.5 * np.pi:
                    break
                h *= 0.5

            dD = chord_integral(qd, z, z_new, w, w_new, opts.quadrature_order)
            for _ in range(opts.corrector_iterations):
                residual = self.level(D + dD) - self.target
                if abs(residual) <= level_tol * (1.0 + abs(D)):
                    break
                delta = self.correction(residual, w_new)
                if abs(delta) > 0.5 * h:
                    delta *= 0.5 * h / abs(delta)
                z_new = z_new + delta
                w_new = qd.sqrt(z_new, w_new)
                dD = chord_integral(qd, z, z_new, w, w_new, opts.quadrature_order)

            z, w, D = z_new, w_new, D + dD
            points.append(z)
            Ds.append(D)
            branches.append(w)


def _assemble(
    kind: TrajectoryKind,
    start: StartPoint,
    tracer: _Tracer,
    result: Tuple[List[complex], List[complex], List[complex], Endpoint],
    branch_seed: complex,
) -> Trajectory:
    points, Ds, branches, end = result
    return Trajectory(
        kind=kind,
        points=np.asarray(points, dtype=complex),
        D=np.asarray(Ds, dtype=complex),
        branches=np.asarray(branches, dtype=complex),
        start=start,
        end=end,
        branch_seed=branch_seed,
        target=tracer.target,
        sigma=tracer.sigma,
    )


def _orientation(kind: TrajectoryKind, w: complex, direction: complex) -> int:
    tangent = _Tracer.base_tangent(kind, w)
    return 1 if np.real(tangent * np.conj(direction)) >= 0 else -1


@catch_exceptions
def trace(
    qd: QuadraticDifferential,
    start: complex,
    initial_direction: float,
    kind: TrajectoryKind = TrajectoryKind.HORIZONTAL,
    opts: TraceOptions = TraceOptions(),
) -> Trajectory:
    """
    Traces the trajectory of the given kind through a regular point, leaving in
    the orientation closest to initial_direction.
    """
    start = complex(start)
    index, distance = qd.nearest_zero(start)
    if index >= 0 and distance < opts.capture_radius(qd.zeros[index].location):
        raise ValueError(f"Start point {start} is a zero of Q : use trace_from_zero")

    w0 = qd.sqrt(start, 1.0 + 0j)
    sigma = _orientation(kind, w0, np.exp(1j * initial_direction))
    tracer = _Tracer(qd, kind, opts, sigma, target=0.0)
    result = tracer.run([start], [0j], [w0])
    trajectory = _assemble(kind, StartPoint(start, initial_direction), tracer, result, w0)
    logger.debug(
        f"Trace {kind.value} from {start:.6f} - Endpoint {trajectory.end.describe()} after {len(trajectory.points)} points"
    )
    return trajectory


def trace_through(
    qd: QuadraticDifferential,
    start: complex,
    kind: TrajectoryKind = TrajectoryKind.HORIZONTAL,
    opts: TraceOptions = TraceOptions(),
) -> Tuple[Trajectory, Trajectory]:
    """
    Both halves of the trajectory through a regular point.
    """
    w0 = qd.sqrt(complex(start), 1.0 + 0j)
    forward = float(np.angle(_Tracer.base_tangent(kind, w0)))
    return (
        trace(qd, start, forward, kind, opts),
        trace(qd, start, forward + np.pi, kind, opts),
    )


@catch_exceptions
def trace_from_zero_at(
    qd: QuadraticDifferential,
    zero_index: int,
    angle: float,
    kind: TrajectoryKind = TrajectoryKind.HORIZONTAL,
    opts: TraceOptions = TraceOptions(),
) -> Trajectory:
    """
    Seeds at distance r_seed from the zero along `angle` and traces outwards.
    The start zero is ignored by the capture test until the trace is 10 r_seed away.
    """
    location = qd.zeros[zero_index].location
    r_seed = opts.seed_radius(location)
    seed = location + r_seed * np.exp(1j * angle)
    w_seed = qd.sqrt(seed, 1.0 + 0j)
    D_seed = integral_from_zero(qd, zero_index, seed, w_seed, opts.quadrature_order)
    sigma = _orientation(kind, w_seed, np.exp(1j * angle))

    tracer = _Tracer(qd, kind, opts, sigma, target=0.0)
    result = tracer.run(
        [complex(location), seed],
        [0j, D_seed],
        [0j, w_seed],
        excluded_zero=zero_index,
        release_radius=10.0 * r_seed,
    )
    trajectory = _assemble(kind, StartPoint(location, angle, zero_index), tracer, result, w_seed)
    logger.debug(
        f"Trace {kind.value} from zero {zero_index} angle {angle / np.pi:.4f}pi - Endpoint {trajectory.end.describe()} after {len(trajectory.points)} points"
    )
    return trajectory


def trace_from_zero(
    qd: QuadraticDifferential,
    zero_index: int,
    angle_index: int,
    kind: TrajectoryKind = TrajectoryKind.HORIZONTAL,
    opts: TraceOptions = TraceOptions(),
) -> Trajectory:
    """
    Critical trajectory leaving a zero along its angle_index-th emanation direction
    of the given kind.
    """
    angles = emanation_angles(qd, zero_index, kind)
    if not 0 <= angle_index < len(angles):
        raise ValueError(f"Invalid angle index : {angle_index}. Must be below {len(angles)}")
    return trace_from_zero_at(qd, zero_index, angles[angle_index], kind, opts)


def refine_endpoint(
    qd: QuadraticDifferential, trajectory: Trajectory, opts: TraceOptions
) -> Trajectory:
    """
    Re-traces the tail of a ZeroHit trajectory with the capture radius quartered.
    """
    if not isinstance(trajectory.end, ZeroHit):
        return trajectory
    refined_opts = opts.refined()
    tracer = _Tracer(qd, trajectory.kind, refined_opts, trajectory.sigma, trajectory.target)
    keep = len(trajectory.points) - 1
    result = tracer.run(
        list(trajectory.points[:keep]),
        list(trajectory.D[:keep]),
        list(trajectory.branches[:keep]),
    )
    return _assemble(trajectory.kind, trajectory.start, tracer, result, trajectory.branch_seed)


@catch_exceptions
def connection_search(
    qd: QuadraticDifferential,
    zero_a: int,
    zero_b: int,
    opts: TraceOptions = TraceOptions(),
) -> Union[Trajectory, NotFound]:
    """
    Tries every horizontal emanation direction at zero_a and returns the first
    trajectory ending at zero_b, after endpoint refinement.
    """
    if zero_a == zero_b:
        raise ValueError(f"Invalid zero pair : {zero_a} twice")
    endpoints, traced = [], []
    for angle_index in range(len(emanation_angles(qd, zero_a))):
        trajectory = trace_from_zero(qd, zero_a, angle_index, TrajectoryKind.HORIZONTAL, opts)
        endpoints.append(trajectory.end)
        traced.append(trajectory)
        if trajectory.ends_at(zero_b):
            refined = refine_endpoint(qd, trajectory, opts)
            if refined.ends_at(zero_b):
                logger.info(
                    f"Connection {zero_a} -> {zero_b} - Found at angle index {angle_index} : {len(refined.points)} points"
                )
                return refined
    logger.info(
        f"Connection {zero_a} -> {zero_b} - Not found : {', '.join(e.describe() for e in endpoints)}"
    )
    return NotFound(zero_a, zero_b, tuple(endpoints), tuple(traced))


def concatenate(first: Trajectory, second: Trajectory) -> Trajectory:
    """
    Joins two trajectories sharing an endpoint zero (first ends where second starts).
    """
    if not isinstance(first.end, ZeroHit) or second.start.zero_index != first.end.index:
        raise ValueError("Trajectories do not share a zero")
    offset = first.D[-1] - second.D[0]
    return replace(
        first,
        points=np.concatenate((first.points, second.points[1:])),
        D=np.concatenate((first.D, second.D[1:] + offset)),
        branches=np.concatenate((first.branches, second.branches[1:])),
        end=second.end,
    )


def _split_path(path: Sequence[complex]) -> np.ndarray:
    values = np.asarray(path, dtype=complex)
    keep = np.concatenate(([True], np.abs(np.diff(values)) > 0))
    return values[keep]


def _zero_at(qd: QuadraticDifferential, z: complex, tol: float = 1e-12) -> Optional[int]:
    index, distance = qd.nearest_zero(z)
    if index >= 0 and distance <= tol * (1.0 + abs(z)):
        return index
    return None


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Distances from every point to every segment [a_k, b_k], shape (points, segments).
    """
    p = points[:, None]
    ab = (b - a)[None, :]
    length2 = np.abs(ab) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.real((p - a[None, :]) * np.conj(ab)) / length2
    t = np.clip(np.nan_to_num(t), 0.0, 1.0)
    return np.abs(p - (a[None, :] + t * ab))


def distance_to_polyline(points: Sequence[complex], polyline: Sequence[complex]) -> np.ndarray:
    """
    Distance of each point to the polyline.
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    line = np.asarray(polyline, dtype=complex)
    if len(line) == 1:
        return np.abs(points - line[0])
    blocks = [
        _segment_distance(points[k : k + 256], line[:-1], line[1:]).min(axis=1)
        for k in range(0, len(points), 256)
    ]
    return np.concatenate(blocks) if blocks else np.zeros(0)


@catch_exceptions
def D_value(
    qd: QuadraticDifferential,
    z_ref: complex,
    z: complex,
    path: Optional[Sequence[complex]] = None,
    branch_seed: complex = 1.0 + 0j,
    opts: TraceOptions = TraceOptions(),
    max_chord: float = 0.05,
) -> complex:
    """
    (1/(pi i)) * integral of Q^(1/2) from z_ref to z along a polyline, with the
    branch continued along the path from the sign closest to branch_seed.
    Paths may start or end at a zero; anything else within the capture radius
    of a zero is rejected as a branch ambiguity.
    """
    path = [z_ref, z] if path is None else list(path)
    if path[0] != z_ref:
        path.insert(0, z_ref)
    if path[-1] != z:
        path.append(z)
    path = _split_path(path)
    if len(path) < 2:
        return 0j

    start_zero, end_zero = _zero_at(qd, path[0]), _zero_at(qd, path[-1])
    if len(qd.zeros):
        for index, zero in enumerate(qd.zeros):
            if index in (start_zero, end_zero):
                continue
            if distance_to_polyline([zero.location], path)[0] < opts.capture_radius(zero.location):
                raise ValueError(f"branch ambiguity : path passes zero {index} at {zero.location}")

    total = 0j
    reference = complex(branch_seed)
    a = path[0]
    segments = list(zip(path[:-1], path[1:]))
    for k, (seg_start, seg_end) in enumerate(segments):
        a = seg_start
        is_first, is_last = k == 0, k == len(segments) - 1
        direction = (seg_end - seg_start) / abs(seg_end - seg_start)
        stop = seg_end
        if is_last and end_zero is not None:
            stop = seg_end - direction * min(max_chord, 0.5 * abs(seg_end - seg_start))
        if is_first and start_zero is not None:
            b = a + direction * min(max_chord, 0.5 * abs(stop - a))
            w_b = qd.sqrt(b, reference)
            total += integral_from_zero(qd, start_zero, b, w_b, opts.quadrature_order)
            a, reference = b, w_b
        w_a = qd.sqrt(a, reference)
        while abs(stop - a) > 0:
            _, distance = qd.nearest_zero(a)
            length = min(max_chord * max(1.0, abs(a)), 0.25 * distance, abs(stop - a))
            b = stop if length >= abs(stop - a) else a + direction * length
            w_b = qd.sqrt(b, w_a)
            total += chord_integral(qd, a, b, w_a, w_b, opts.quadrature_order)
            a, w_a = b, w_b
        reference = w_a
        if is_last and end_zero is not None:
            total -= integral_from_zero(qd, end_zero, a, w_a, opts.quadrature_order)
    return total


def level_set_drift(qd: QuadraticDifferential, trajectory: Trajectory) -> float:
    """
    Re-integrates D along the polyline with every chord split in two and returns
    max |level(D_k) - level(D_0)| / (1 + arclength_k).
    """
    points, branches = trajectory.points, trajectory.branches
    first_regular = 1 if trajectory.start.zero_index is not None else 0
    last_regular = len(points) - (2 if isinstance(trajectory.end, ZeroHit) else 1)

    D = np.zeros(len(points), dtype=complex)
    if first_regular == 1:
        seed, w_seed = points[1], branches[1]
        mid = 0.5 * (points[0] + seed)
        w_mid = qd.sqrt(mid, w_seed)
        D[1] = integral_from_zero(qd, trajectory.start.zero_index, mid, w_mid) + chord_integral(
            qd, mid, seed, w_mid, w_seed
        )
    for k in range(first_regular, last_regular):
        a, b = points[k], points[k + 1]
        mid = 0.5 * (a + b)
        w_mid = qd.sqrt(mid, 0.5 * (branches[k] + branches[k + 1]))
        D[k + 1] = (
            D[k]
            + chord_integral(qd, a, mid, branches[k], w_mid)
            + chord_integral(qd, mid, b, w_mid, branches[k + 1])
        )
    if last_regular < len(points) - 1:
        D[-1] = D[last_regular] - integral_from_zero(
            qd, trajectory.end.index, points[last_regular], branches[last_regular]
        )

    level = trajectory.level(D)
    reference = trajectory.target if trajectory.start.zero_index is not None else level[0]
    return float(np.max(np.abs(level - reference) / (1.0 + trajectory.arclength)))


def imaginary_axis_crossings(trajectory: Trajectory) -> List[float]:
    """
    Ordinates y where the polyline crosses the imaginary axis, in order of traversal.
    """
    points = trajectory.points
    x = points.real
    crossings = []
    for k in range(1, len(x)):
        if x[k - 1] * x[k] < 0:
            t = x[k - 1] / (x[k - 1] - x[k])
            crossings.append(float((points[k - 1] + t * (points[k] - points[k - 1])).imag))
        elif x[k] == 0 and k < len(x) - 1 and x[k - 1] * x[k + 1] < 0:
            crossings.append(float(points[k].imag))
    return crossings


def reflect(qd: QuadraticDifferential, trajectory: Trajectory) -> Trajectory:
    """
    Image of a trajectory under z -> -conj(z); D maps to conj(D).
    """
    table: DirectionTable = direction_table(qd.d)
    end = trajectory.end
    if isinstance(end, ZeroHit):
        index, _ = qd.nearest_zero(-np.conj(qd.locations[end.index]))
        end = ZeroHit(index, end.distance)
    elif isinstance(end, InfinityDirection):
        measured = float(np.mod(np.pi - end.measured, 2 * np.pi))
        j, angle, deviation = table.nearest(
            measured, vertical=trajectory.kind is TrajectoryKind.VERTICAL
        )
        end = InfinityDirection(j, angle, measured, deviation, end.ambiguous)
    start = trajectory.start
    start_zero = None
    if start.zero_index is not None:
        start_zero, _ = qd.nearest_zero(-np.conj(qd.locations[start.zero_index]))
    return replace(
        trajectory,
        points=-np.conj(trajectory.points),
        D=np.conj(trajectory.D),
        branches=np.conj(trajectory.branches),
        start=StartPoint(-np.conj(start.location), wrap_angle(np.pi - start.angle), start_zero),
        end=end,
        branch_seed=complex(np.conj(trajectory.branch_seed)),
    )


def hausdorff_distance(a: Trajectory, b: Trajectory) -> float:
    """
    Symmetric Hausdorff distance between two polylines (vertex to segment).
    """
    return float(
        max(
            distance_to_polyline(a.points, b.points).max(),
            distance_to_polyline(b.points, a.points).max(),
        )
    )


def min_separation(
    trajectories: Sequence[Trajectory], qd: QuadraticDifferential, opts: TraceOptions = TraceOptions()
) -> float:
    """
    Smallest distance between two distinct trajectories, ignoring points closer
    than half a seed radius to a zero.
    """

    def regular(points: np.ndarray) -> np.ndarray:
        if not len(qd.zeros):
            return points
        distances = np.abs(points[:, None] - qd.locations[None, :])
        radii = np.asarray([0.5 * opts.seed_radius(loc) for loc in qd.locations])
        return points[(distances > radii[None, :]).all(axis=1)]

    best = np.inf
    for i in range(len(trajectories)):
        for j in range(i + 1, len(trajectories)):
            a, b = trajectories[i].points, trajectories[j].points
            pa, pb = regular(a), regular(b)
            if len(pa):
                best = min(best, distance_to_polyline(pa, b).min())
            if len(pb):
                best = min(best, distance_to_polyline(pb, a).min())
    return float(best)
