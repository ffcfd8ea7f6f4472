"""
Cubic family V(z) = -i z^3/3 + i K z.

The quadratic differential is Q(z) = -(1/4)(z - z1)(z - z2)(z - z0)^2 with
z0 = -ai, z1 = -b + ci, z2 = b + ci. Matching coefficients with
-z^4/4 + K z^2/2 + i z + C forces a = c = 2/b^2, b^6 - 2K b^4 - 8 = 0 and
C = -(b^6 + 4)/b^8. The support is one arc for K < K*, and K* is the value
where F(-a) = Im D(-ai) vanishes.
"""

import numpy as np
from enum import Enum
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import List, Sequence, Tuple, Union
from concurrent.futures import ThreadPoolExecutor
from src.config.logger import logger
from src.core.algebra import CplxPoly, real_root_in_interval
from src.core.potential import Potential
from src.geometry.quadratic_differential import QuadraticDifferential, Zero
from src.geometry.trajectory import (
    NotFound,
    TraceOptions,
    Trajectory,
    concatenate,
    connection_search,
)
from src.utils.helpers import catch_exceptions


Z0, Z1, Z2 = 0, 1, 2
CROSS_CHECK_TOL = 1e-8


class Phase(Enum):
    ONE_CUT = "OneCut"
    CRITICAL = "Critical"
    TWO_CUT = "TwoCut"


@dataclass(frozen=True)
class CubicParams:
    K: float
    a: float
    b: float
    c: float
    C: float
    phase: Phase

    @property
    def zeros(self) -> Tuple[complex, complex, complex]:
        return (-1j * self.a, complex(-self.b, self.c), complex(self.b, self.c))

    def potential(self) -> Potential:
        return Potential.cubic(self.K)


@dataclass(frozen=True)
class CriticalConstants:
    """
    The critical point of the cubic family. K_star_from_v and gap record the
    independent computation through v = a^-3 and its disagreement with K*.
    """

    v_star: float
    a_star: float
    b_star: float
    K_star: float
    K_star_from_v: float = field(repr=False)
    gap: float = field(repr=False)


def _b_polynomial(K: float) -> CplxPoly:
    return CplxPoly((-8.0, 0.0, 0.0, 0.0, -2.0 * K, 0.0, 1.0))


@catch_exceptions
def solve_b(K: float) -> float:
    """
    Unique positive root of b^6 - 2K b^4 - 8 (one sign change, so one positive root).
    """
    if not np.isfinite(K):
        raise ValueError(f"Invalid value for K={K}. Must be finite")
    hi = np.sqrt(2.0 * max(K, 0.0) + 4.0)
    return real_root_in_interval(_b_polynomial(K), 0.0, hi, tol=1e-15)


def v_equation(v: float) -> float:
    root = np.sqrt(4.0 + 2.0 * v)
    return -3.0 * v * np.log(2.0 * v) + 6.0 * v * np.log(root + 2.0) + (2.0 - 2.0 * v) * root


def F_at_minus_a(a: float) -> float:
    """
    F(-a) as a function of a alone (b^2 = 2/a eliminated).
    """
    if not a > 0:
        raise ValueError(f"domain error : F_at_minus_a needs a > 0, got {a}")
    root = np.sqrt(4.0 * a**3 + 2.0)
    bracket = (
        (2.0 * a**1.5 - 2.0 * a**-1.5) * root
        + 6.0 * np.log(2.0 * a**1.5 + root)
        - 3.0 * np.log(2.0)
    )
    return bracket / (6.0 * np.pi)


@lru_cache(maxsize=1)
@catch_exceptions
def critical_constants() -> CriticalConstants:
    """
    K* computed twice: from the root v* of the v-equation, and from the root a*
    of F_at_minus_a, linked by v = a^-3. Disagreement beyond 1e-8 is fatal.
    """
    v_star = real_root_in_interval(v_equation, 1.0, 10.0, tol=1e-15)
    a_star = real_root_in_interval(F_at_minus_a, 0.1, 5.0, tol=1e-15)
    K_from_v = v_star ** (1.0 / 3.0) - v_star ** (-2.0 / 3.0)
    K_star = 1.0 / a_star - a_star**2
    gap = abs(K_star - K_from_v)
    substitution_gap = abs(a_star - v_star ** (-1.0 / 3.0))
    if gap > CROSS_CHECK_TOL or substitution_gap > CROSS_CHECK_TOL:
        raise RuntimeError(
            f"cross-check failed : K* gap {gap:.3e}, a* vs v*^(-1/3) gap {substitution_gap:.3e}"
        )
    constants = CriticalConstants(
        v_star=v_star,
        a_star=a_star,
        b_star=float(np.sqrt(2.0 / a_star)),
        K_star=K_star,
        K_star_from_v=K_from_v,
        gap=gap,
    )
    logger.info(
        f"Cubic critical constants - v*={v_star:.10f} a*={a_star:.10f} b*={constants.b_star:.10f} K*={K_star:.10f}"
    )
    return constants


def classify_phase(K: float, tol: float = 1e-9) -> Phase:
    K_star = critical_constants().K_star
    if abs(K - K_star) <= tol:
        return Phase.CRITICAL
    return Phase.ONE_CUT if K < K_star else Phase.TWO_CUT


def phase_from_F(a: float, tol: float = 1e-12) -> Phase:
    """
    Phase from the sign of F(-a): positive means one cut.
    """
    value = F_at_minus_a(a)
    if abs(value) <= tol:
        return Phase.CRITICAL
    return Phase.ONE_CUT if value > 0 else Phase.TWO_CUT


@catch_exceptions
def params_from_K(K: float, tol: float = 1e-9) -> CubicParams:
    b = solve_b(K)
    a = 2.0 / b**2
    C = -(b**6 + 4.0) / b**8
    params = CubicParams(K=float(K), a=a, b=b, c=a, C=C, phase=classify_phase(K, tol))
    logger.debug(f"Cubic K={K} - Parameter solve successful : b={b:.6f} phase={params.phase.value}")
    return params


def system_residuals(params: CubicParams) -> List[float]:
    """
    Residuals of the four coefficient equations of Q against -z^4/4 + K z^2/2 + i z + C.
    """
    a, b, c, C, K = params.a, params.b, params.c, params.C, params.K
    return [
        (c - a) / 2.0,
        b**2 / 4.0 + c**2 / 4.0 - c * a + a**2 / 4.0 - K / 2.0,
        a / 2.0 * (b**2 + c**2 - c * a) - 1.0,
        -(b**2 + c**2) * a**2 / 4.0 - C,
    ]


def build_Q(params: CubicParams) -> QuadraticDifferential:
    z0, z1, z2 = params.zeros
    Q = CplxPoly((complex(params.C), 1j, complex(params.K / 2.0), 0j, complex(-0.25)))
    return QuadraticDifferential(Q, (Zero(z0, 2), Zero(z1, 1), Zero(z2, 1)))


def _log_term(u: float, r: float, b: float) -> float:
    """
    log(u + sqrt(u^2 + b^2)) without cancellation for negative u.
    """
    return np.log(u + r) if u >= 0 else np.log(b**2 / (r - u))


def F(y: float, params: CubicParams) -> float:
    """
    Im D(iy) with D referred to z1, in closed form.
    """
    a, b = params.a, params.b
    u = y - a
    r = np.sqrt(u**2 + b**2)
    return (
        -(r**3) / (6.0 * np.pi)
        - a / (2.0 * np.pi) * u * r
        - _log_term(u, r, b) / np.pi
        + np.log(b) / np.pi
    )


@catch_exceptions
def find_y1_y2(params: CubicParams) -> Tuple[float, float]:
    """
    The two real zeros y2 < -a < y1 < a of F in the one-cut phase.
    F increases on (-inf, -a), decreases on (-a, inf) and F(a) = -b^3/(6 pi) < 0.
    """
    if params.phase is not Phase.ONE_CUT or F(-params.a, params) <= 0:
        raise ValueError(f"no real roots : K={params.K} is not in the one-cut phase")
    a = params.a
    f = lambda y: F(y, params)
    y1 = real_root_in_interval(f, -a, a, tol=1e-14)
    width = 1.0
    while f(-a - width) > 0:
        width *= 2.0
    y2 = real_root_in_interval(f, -a - width, -a, tol=1e-14)
    return y1, y2


def im_D_on_segment(params: CubicParams, x: float) -> float:
    """
    Im D(x + ia) = (1/2pi) * integral_{-b}^{x} s sqrt(b^2 - s^2) ds = -(b^2 - x^2)^(3/2) / (6 pi).
    """
    if abs(x) >= params.b:
        raise ValueError(f"domain error : |x|={abs(x)} must be below b={params.b}")
    return -((params.b**2 - x**2) ** 1.5) / (6.0 * np.pi)


@catch_exceptions
def connection_chain(
    params: CubicParams, opts: TraceOptions = TraceOptions(), capture_scale: float = 1e-3
) -> Union[Trajectory, NotFound]:
    """
    At K = K* the support runs z1 -> z0 -> z2 through the double zero. Both halves
    are traced into z0 (with a coarser capture radius) and joined.
    """
    qd = build_Q(params)
    chain_opts = replace(opts, capture_scale=max(opts.capture_scale, capture_scale))
    left = connection_search(qd, Z1, Z0, chain_opts)
    if isinstance(left, NotFound):
        return left
    right = connection_search(qd, Z2, Z0, chain_opts)
    if isinstance(right, NotFound):
        return right
    second = right.reversed()
    if (left.D[-1].real - left.D[0].real) * (second.D[-1].real - second.D[0].real) < 0:
        second = replace(
            second, D=-second.D, branches=-second.branches, branch_seed=-second.branch_seed
        )
    return concatenate(left, second)


@dataclass(frozen=True)
class PhasePoint:
    K: float
    phase: Phase
    connected: bool
    endpoints: Tuple[str, ...]

    @property
    def agrees(self) -> bool:
        return self.connected == (self.phase is not Phase.TWO_CUT)


def _phase_point(K: float, opts: TraceOptions, tol: float) -> PhasePoint:
    params = params_from_K(K, tol)
    result = connection_search(build_Q(params), Z1, Z2, opts)
    if isinstance(result, NotFound):
        return PhasePoint(K, params.phase, False, tuple(e.describe() for e in result.endpoints))
    return PhasePoint(K, params.phase, True, (result.end.describe(),))


@catch_exceptions
def phase_diagram(
    K_values: Sequence[float],
    opts: TraceOptions = TraceOptions(),
    tol: float = 1e-9,
    max_workers: int = 1,
) -> List[PhasePoint]:
    """
    Phase label and connection outcome for each K, in input order.
    """
    logger.info(f"Starting cubic phase sweep over {len(K_values)} values of K ...")
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        points = list(executor.map(lambda K: _phase_point(float(K), opts, tol), K_values))
    disagreements = [p.K for p in points if not p.agrees and p.phase is not Phase.CRITICAL]
    if disagreements:
        logger.warning(f"Cubic phase sweep - Disagreement at K in {disagreements}")
    else:
        logger.info(f"Cubic phase sweep completed successfully : {len(points)} points")
    return points
