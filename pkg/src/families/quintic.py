"""
Quintic potential V(z) = -i z^5/5.

Q(z) = -(1/4)(z - z1)(z - z2)(z - z0)^2 (z - z3)^2 (z - z4)^2 with
z0 = -ai, z1 = -b + ci, z2 = b + ci, z3 = -d + ei, z4 = d + ei, and it must
equal -z^8/4 + i z^3. Eliminating b, d and e leaves two equations in (a, c)
whose resultant in a forces 28 c^10 + 108 c^5 - 3 = 0. Its two real roots give
the two candidates: p = 1 (c > 0, class T3,1) and p = 2 (c < 0, class T4,5).
"""

import numpy as np
from enum import Enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple
from src.config.logger import logger
from src.core.algebra import CplxPoly, poly_roots, real_root_in_interval, sylvester_resultant
from src.core.potential import Potential
from src.geometry.directions import direction_table
from src.geometry.quadratic_differential import (
    QuadraticDifferential,
    TrajectoryKind,
    Zero,
    emanation_angles,
)
from src.geometry.trajectory import (
    InfinityDirection,
    TraceOptions,
    Trajectory,
    ZeroHit,
    D_value,
    trace_from_zero_at,
)
from src.utils.helpers import angle_distance, catch_exceptions


SQRT30 = np.sqrt(30.0)
Z0, Z1, Z2, Z3, Z4 = 0, 1, 2, 3, 4
GUARD_SAMPLES = 2000
HALFLINE_END = -50.0
CONTOUR_CLASSES = {1: (3, 1), 2: (4, 5)}


@dataclass(frozen=True)
class QuinticParams:
    p: int
    a: float
    b: float
    c: float
    d: float
    e: float
    A: Optional[float] = None
    B: Optional[float] = None

    @property
    def zeros(self) -> Tuple[complex, ...]:
        return (
            -1j * self.a,
            complex(-self.b, self.c),
            complex(self.b, self.c),
            complex(-self.d, self.e),
            complex(self.d, self.e),
        )

    @property
    def contour_class(self) -> Tuple[int, int]:
        return CONTOUR_CLASSES[self.p]

    def potential(self) -> Potential:
        return Potential.quintic(self.contour_class)

    def as_dict(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "e": self.e}


def _check_p(p: int) -> None:
    if p not in (1, 2):
        raise ValueError(f"Invalid value : {p}. Must be 1 or 2")


def c_polynomial() -> CplxPoly:
    """
    28 c^10 + 108 c^5 - 3.
    """
    return CplxPoly((-3.0, 0, 0, 0, 0, 108.0, 0, 0, 0, 0, 28.0))


@catch_exceptions
def closed_form_params(p: int) -> QuinticParams:
    """
    Parameters from radicals. With k = 4 + sqrt30 (p = 1) or 4 - sqrt30 (p = 2):
    a = (-A - k/A + 1) c / 3, e = (-A - k/A - 2) c / 6,
    b = sqrt(36 +- 6 sqrt30) B / 42, d = B sqrt(A^2 + k^2/A^2 - 2k) / (28 sqrt3).
    """
    _check_p(p)
    sign = 1.0 if p == 1 else -1.0
    if p == 1:
        c = ((-27.0 + 5.0 * SQRT30) / 14.0) ** 0.2
        A = np.cbrt(12.0 * SQRT30 + 62.0 + np.sqrt(1410.0 * SQRT30 + 7740.0))
        B = (-1037232.0 + 192080.0 * SQRT30) ** 0.2
    else:
        c = -(((27.0 + 5.0 * SQRT30) / 14.0) ** 0.2)
        A = np.cbrt(-12.0 * SQRT30 + 62.0 + np.sqrt(7740.0 - 1410.0 * SQRT30))
        B = (1037232.0 + 192080.0 * SQRT30) ** 0.2
    k = 4.0 + sign * SQRT30
    a = (-A - k / A + 1.0) * c / 3.0
    e = (-A - k / A - 2.0) * c / 6.0
    b = np.sqrt(36.0 + sign * 6.0 * SQRT30) * B / 42.0
    d = B / (28.0 * np.sqrt(3.0)) * np.sqrt(A**2 + k**2 / A**2 - 2.0 * k)
    return QuinticParams(p, float(a), float(b), float(c), float(d), float(e), float(A), float(B))


def cubic_factor(c: float, p: int) -> CplxPoly:
    """
    The cubic factor in a of the reduced system at the root c:
    3a^3 - 3a^2 c - (3 +- sqrt30) c^2 a + (15 +- 3 sqrt30) c^3.
    """
    _check_p(p)
    sign = 1.0 if p == 1 else -1.0
    return CplxPoly(
        (
            (15.0 + sign * 3.0 * SQRT30) * c**3,
            -(3.0 + sign * SQRT30) * c**2,
            -3.0 * c,
            3.0,
        )
    )


def params_from_c(c: float, p: int, a: float) -> QuinticParams:
    """
    b, d from the elimination formulas and e = (a - c)/2.
    """
    if c == 0:
        raise ValueError("inconsistent : c = 0 makes the coefficient system inconsistent")
    denominator = 3.0 * c - a
    b2 = 2.0 * (c - a) * (a**2 + c**2) / denominator
    d2 = (7.0 * a**2 * c - 5.0 * a * c**2 + a**3 + 5.0 * c**3) / (4.0 * denominator)
    if b2 <= 0 or d2 <= 0:
        raise ValueError(f"inconsistent : b^2={b2:.6g}, d^2={d2:.6g} at c={c}, a={a}")
    return QuinticParams(p, float(a), float(np.sqrt(b2)), float(c), float(np.sqrt(d2)), float((a - c) / 2.0))


@catch_exceptions
def solve_params_numeric(p: int) -> QuinticParams:
    """
    Independent route: real root c of 28c^10 + 108c^5 - 3, the real root a of the
    cubic factor, then b, d, e from the elimination formulas.
    """
    _check_p(p)
    lo, hi = (0.0, 1.0) if p == 1 else (-2.0, -1.0)
    c = real_root_in_interval(c_polynomial(), lo, hi, tol=1e-15)
    roots = poly_roots(cubic_factor(c, p), digits=30)
    real_roots = [r.value.real for r in roots if abs(r.value.imag) < 1e-8]
    if not real_roots:
        raise ValueError(
            f"Cubic factor has no real root for p={p} : roots {[r.value for r in roots]}"
        )
    candidates = []
    for a in real_roots:
        try:
            candidates.append(params_from_c(c, p, a))
        except ValueError:
            continue
    if not candidates:
        raise ValueError(f"Cubic factor has no admissible real root for p={p} : {real_roots}")
    params = min(candidates, key=lambda q: max(abs(r) for r in system_residuals(q)))
    logger.info(
        f"Quintic p={p} - Numeric parameter solve successful : "
        + ", ".join(f"{k}={v:.10f}" for k, v in params.as_dict().items())
    )
    return params


def system_residuals(params: QuinticParams) -> List[float]:
    """
    The four coefficient equations (degrees 6 to 3 of Q) after e = (a - c)/2.
    """
    a, b2, c, d2 = params.a, params.b**2, params.c, params.d**2
    return [
        -3 * a**2 + 2 * a * c + 2 * b2 - 3 * c**2 + 4 * d2,
        -a * c**2 + a**2 * c + 4 * b2 * c + 4 * a * d2 - 4 * c * d2 + a**3 - c**3,
        -16 * a * b2 * c
        + 16 * a * c * d2
        - 38 * a**2 * c**2
        + 20 * a**3 * c
        + 24 * a**2 * b2
        + 20 * a * c**3
        + 24 * a**2 * d2
        - 9 * a**4
        - 9 * c**4
        - 16 * d2**2
        - 32 * b2 * d2
        - 24 * b2 * c**2
        + 24 * c**2 * d2,
        -32
        + 2 * a**2 * c**3
        + 3 * a**5
        + 20 * a**2 * b2 * c
        - 24 * a**2 * c * d2
        + a**4 * c
        - 16 * b2 * c * d2
        + 8 * a**3 * d2
        + 16 * c * d2**2
        - 3 * c**5
        - 8 * c**3 * d2
        - 4 * a**3 * b2
        - 16 * a * d2**2
        - a * c**4
        - 4 * b2 * c**3
        - 2 * a**3 * c**2
        - 12 * a * b2 * c**2
        + 24 * a * c**2 * d2
        - 16 * a * b2 * d2,
    ]


def reduced_polynomials_in_a(c: float) -> Tuple[CplxPoly, CplxPoly]:
    """
    The two equations left after eliminating b and d, as polynomials in a.
    """
    first = CplxPoly(
        (-15 * c**6, 30 * c**5, -37 * c**4, 36 * c**3, -3 * c**2, -6 * c, 3.0)
    )
    second = CplxPoly(
        (-3 * c**7 - 9 * c**2, 2 * c**6 + 6 * c, c**5 - 1, -4 * c**4, 7 * c**3, -6 * c**2, 3 * c)
    )
    return first, second


def reduced_system(a: float, c: float) -> Tuple[float, float]:
    first, second = reduced_polynomials_in_a(c)
    return float(np.real(first(a))), float(np.real(second(a)))


def resultant_at(c: float) -> float:
    """
    |Res_a| of the reduced system at c, relative to the Hadamard bound.
    """
    first, second = reduced_polynomials_in_a(c)
    return abs(sylvester_resultant(first, second, relative=True))


@lru_cache(maxsize=4)
def build_Q(params: QuinticParams) -> QuadraticDifferential:
    zeros = params.zeros
    return QuadraticDifferential.from_zeros(
        (
            Zero(zeros[Z0], 2),
            Zero(zeros[Z1], 1),
            Zero(zeros[Z2], 1),
            Zero(zeros[Z3], 2),
            Zero(zeros[Z4], 2),
        ),
        -0.25,
    )


def expansion_defect(params: QuinticParams) -> float:
    """
    Largest coefficient error of Q against -z^8/4 + i z^3.
    """
    target = CplxPoly((0, 0, 0, 1j, 0, 0, 0, 0, -0.25))
    return build_Q(params).Q.max_coefficient_error(target)


def closed_form_emanation_angles() -> List[float]:
    """
    Horizontal directions at z1 for p = 1, in closed form.
    """
    base = -np.arctan(4.0 * (SQRT30 + 3.0) / (4.0 * np.sqrt(6.0) + np.sqrt(5.0))) / 3.0
    return sorted(float(np.angle(np.exp(1j * (base + 2 * k * np.pi / 3)))) for k in (-1, 0, 1))


def kappa(params: QuinticParams) -> float:
    """
    Linear coefficient of Re P(x + ic) = x^3 - kappa x, P = (z - z0)(z - z3)(z - z4).
    """
    a, c = params.a, params.c
    return 21 * c**2 / 4 + a * c / 2 - 3 * a**2 / 4 + params.d**2


def _beta(params: QuinticParams) -> float:
    return (3 * params.c - params.a) / 2


def im_D_on_segment(params: QuinticParams, x):
    """
    Im D(x + ic) from z1 along the horizontal segment, sign anchored positive:
    (1/2pi) u^(3/2) [(b^2 - kappa)/3 - u/5] with u = b^2 - x^2.
    """
    u = params.b**2 - np.asarray(x, dtype=float) ** 2
    if np.any(u < 0):
        raise ValueError("domain error : segment abscissa outside [-b, b]")
    return u**1.5 * ((params.b**2 - kappa(params)) / 3 - u / 5) / (2 * np.pi)


def tilted_segment(params: QuinticParams) -> Tuple[complex, complex]:
    """
    (slope, offset) of the tilted triangle side z = slope * x + offset, x in (-b, 0).
    """
    if params.p == 1:
        return 1 - 1j, 1j * (params.c - params.b)
    return 1 + 1j, 1j * (params.c + params.b)


def tilted_segment_re_Q(params: QuinticParams) -> CplxPoly:
    """
    Re Q along the tilted side as a real polynomial in x, recomputed from build_Q.
    """
    slope, offset = tilted_segment(params)
    return build_Q(params).Q.compose_linear(slope, offset).real_part()


def halfline_derivatives(params: QuinticParams, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    (Re D', Im D') on L = {x + ic : x < -b}, taking the positive root of x^2 - b^2.
    """
    x = np.asarray(x, dtype=float)
    root = np.sqrt(np.clip(x**2 - params.b**2, 0.0, None))
    a, c, d = params.a, params.c, params.d
    re = root * (x**3 - kappa(params) * x) / (2 * np.pi)
    im = root * (4 * c * x**2 - (a + c) * (_beta(params) ** 2 + d**2)) / (2 * np.pi)
    return re, im


def in_triangle(params: QuinticParams, z, tol: float = 1e-9) -> np.ndarray:
    """
    Membership in the guard triangle spanned by z1, z2 and the apex on the imaginary axis.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    inside_x = np.abs(x) <= params.b + tol
    if params.p == 1:
        return inside_x & (y <= params.c + tol) & (y >= params.c - params.b + np.abs(x) - tol)
    return inside_x & (y >= params.c - tol) & (y <= params.c + params.b - np.abs(x) + tol)


@dataclass
class GuardReport:
    """
    Sign checks that confine the critical trajectories. holds is None for
    report-only checks (the mirrored p = 2 geometry).
    """

    p: int
    name: str
    values: Dict[str, object]
    holds: Optional[bool]


@catch_exceptions
def triangle_guards(p: int, opts: TraceOptions = TraceOptions()) -> GuardReport:
    _check_p(p)
    params = closed_form_params(p)
    qd = build_Q(params)
    angles = emanation_angles(qd, Z1)

    x = np.linspace(-params.b, params.b, GUARD_SAMPLES + 2)[1:-1]
    im_D = im_D_on_segment(params, x)
    half_b = -0.5 * params.b
    numeric_im_D = D_value(
        qd, qd.zeros[Z1].location, complex(half_b, params.c), branch_seed=1j, opts=opts
    ).imag

    re_Q = tilted_segment_re_Q(params)
    t = np.linspace(-params.b, 0.0, GUARD_SAMPLES + 2)[1:-1]
    re_Q_values = np.real(re_Q(t))
    roots = sorted((r.value for r in poly_roots(re_Q)), key=lambda r: (r.real, r.imag))

    values = {
        "emanation_angles_over_pi": [angle / np.pi for angle in angles],
        "kappa": kappa(params),
        "min_im_D_segment": float(im_D.min()),
        "im_D_closed_form_at_half_b": float(im_D_on_segment(params, half_b)),
        "im_D_numeric_at_half_b": float(abs(numeric_im_D)),
        "re_Q_leading": float(np.real(re_Q.leading)),
        "max_re_Q_tilted": float(re_Q_values.max()),
        "re_Q_tilted_roots": roots,
        "re_Q_at_half_b": float(np.real(re_Q(half_b))),
    }
    holds = None
    if p == 1:
        closed = closed_form_emanation_angles()
        values["closed_form_angles_over_pi"] = [angle / np.pi for angle in closed]
        angle_gap = max(angle_distance(u, v) for u, v in zip(angles, closed))
        holds = bool(im_D.min() > 0 and re_Q_values.max() < 0 and angle_gap < 1e-10)
    logger.info(f"Quintic p={p} - Triangle guards evaluated : holds={holds}")
    return GuardReport(p, "triangle", values, holds)


@catch_exceptions
def halfline_guards(p: int) -> GuardReport:
    _check_p(p)
    params = closed_form_params(p)
    x = np.linspace(HALFLINE_END, -params.b, GUARD_SAMPLES + 1)[:-1]
    re, im = halfline_derivatives(params, x)
    endpoint_re, endpoint_im = halfline_derivatives(params, -params.b)
    values = {
        "max_re_D_prime": float(re.max()),
        "min_im_D_prime": float(im.min()),
        "re_D_prime_at_minus_2": float(halfline_derivatives(params, -2.0)[0]),
        "im_D_prime_at_minus_2": float(halfline_derivatives(params, -2.0)[1]),
        "endpoint_values": [float(endpoint_re), float(endpoint_im)],
        "re_sign_changes": int(np.count_nonzero(np.diff(np.sign(re)))),
    }
    holds = bool(re.max() < 0 and im.min() > 0) if p == 1 else None
    logger.info(f"Quintic p={p} - Half-line guards evaluated : holds={holds}")
    return GuardReport(p, "halfline", values, holds)


class ExtensionCase(Enum):
    ADJACENT = "Case 1"
    AROUND_DOUBLE_ZERO = "Case 2"
    INTO_DOUBLE_ZERO = "Case 3"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class ExtensionReport:
    case: ExtensionCase
    trajectories: Tuple[Trajectory, ...]
    separation: Optional[float]


@catch_exceptions
def extension_case(
    params: QuinticParams, arc_angle: float, opts: TraceOptions = TraceOptions()
) -> ExtensionReport:
    """
    Traces the two horizontal trajectories from z1 other than the arc (leaving at
    arc_angle) and classifies where they go: adjacent directions at infinity,
    directions 3pi/5 apart around a double zero, or into the double zero z3.
    """
    qd = build_Q(params)
    others = [
        angle for angle in emanation_angles(qd, Z1) if angle_distance(angle, arc_angle) > 1e-6
    ]
    trajectories = tuple(
        trace_from_zero_at(qd, Z1, angle, TrajectoryKind.HORIZONTAL, opts) for angle in others
    )
    ends = [t.end for t in trajectories]
    if any(isinstance(end, ZeroHit) and end.index in (Z3, Z4) for end in ends):
        case, separation = ExtensionCase.INTO_DOUBLE_ZERO, None
    elif len(ends) == 2 and all(isinstance(end, InfinityDirection) for end in ends):
        separation = angle_distance(ends[0].angle, ends[1].angle)
        theta = direction_table(qd.d).theta
        if abs(separation - theta[1]) < 1e-9:
            case = ExtensionCase.ADJACENT
        elif abs(separation - theta[3]) < 1e-9:
            case = ExtensionCase.AROUND_DOUBLE_ZERO
        else:
            case = ExtensionCase.UNRESOLVED
    else:
        case, separation = ExtensionCase.UNRESOLVED, None
    logger.info(
        f"Quintic p={params.p} - Extension {case.value} : {', '.join(e.describe() for e in ends)}"
    )
    return ExtensionReport(case, trajectories, separation)
