"""
Precision-aware complex polynomials, root finding and Sylvester resultants.

Double precision work goes through numpy/scipy; anything that needs more than
sixteen digits runs inside a private mpmath context so that concurrent
computations never share a working precision.
"""

import numpy as np
import numpy.polynomial.polynomial as npoly
from numbers import Number
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union
from mpmath import MPContext
from mpmath.libmp.libhyper import NoConvergence
from scipy import linalg, optimize
from src.config.logger import logger
from src.utils.helpers import catch_exceptions, decimal_string


DEFAULT_DIGITS = 16


@dataclass(frozen=True)
class Precision:
    """
    Working precision in decimal digits. Hands out fresh mpmath contexts.
    """

    digits: int = DEFAULT_DIGITS

    def __post_init__(self) -> None:
        if self.digits < DEFAULT_DIGITS:
            raise ValueError(
                f"Invalid precision : {self.digits} digits. Must be at least {DEFAULT_DIGITS}"
            )

    def context(self) -> MPContext:
        ctx = MPContext()
        ctx.dps = self.digits
        return ctx

    def scalar(self, value: Union[Number, str, object]) -> "PrecScalar":
        return PrecScalar(self.context().mpf(value), self.digits)


@dataclass(frozen=True)
class PrecScalar:
    """
    Real number carried at a fixed number of digits. Prints every one of them.
    """

    value: object
    digits: int

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return decimal_string(self.value, self.digits)


Coefficient = Union[complex, float, int, object]


@dataclass(frozen=True)
class CplxPoly:
    """
    Polynomial with complex coefficients, stored in ascending degree.
    """

    coeffs: Tuple[Coefficient, ...]
    digits: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ValueError("polynomial without coefficients")
        if coeffs[-1] == 0 and len(coeffs) > 1:
            raise ValueError("leading coefficient is zero")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_array(cls, coeffs: Sequence[complex], rtol: float = 0.0) -> "CplxPoly":
        """
        Builds a double-precision polynomial, dropping trailing coefficients below rtol relative.
        """
        values = np.asarray(coeffs, dtype=complex)
        scale = np.abs(values).max() if values.size else 0.0
        keep = len(values)
        while keep > 1 and abs(values[keep - 1]) <= rtol * scale:
            keep -= 1
        return cls(tuple(complex(c) for c in values[:keep]))

    @classmethod
    def from_roots(
        cls, roots: Sequence[complex], leading: complex = 1.0
    ) -> "CplxPoly":
        coeffs = npoly.polyfromroots(np.asarray(roots, dtype=complex)) * leading
        return cls.from_array(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Coefficient:
        return self.coeffs[-1]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray([complex(c) for c in self.coeffs], dtype=complex)

    def __call__(self, z):
        return poly_eval(self, z)

    def derivative(self, order: int = 1) -> "CplxPoly":
        if order > self.degree:
            return CplxPoly((0j,))
        return CplxPoly.from_array(npoly.polyder(self.array, order))

    def __mul__(self, other: "CplxPoly") -> "CplxPoly":
        return CplxPoly.from_array(npoly.polymul(self.array, other.array))

    def __add__(self, other: "CplxPoly") -> "CplxPoly":
        return CplxPoly.from_array(npoly.polyadd(self.array, other.array), rtol=1e-15)

    def scaled(self, factor: complex) -> "CplxPoly":
        return CplxPoly.from_array(self.array * factor)

    def compose_linear(self, slope: complex, offset: complex) -> "CplxPoly":
        """
        Returns p(slope * x + offset) as a polynomial in x.
        """
        result = np.zeros(1, dtype=complex)
        for c in self.array[::-1]:
            result = npoly.polyadd(npoly.polymul(result, [offset, slope]), [c])
        return CplxPoly.from_array(result, rtol=1e-15)

    def real_part(self) -> "CplxPoly":
        return CplxPoly.from_array(self.array.real, rtol=1e-15)

    def max_coefficient_error(self, other: "CplxPoly") -> float:
        a, b = self.array, other.array
        size = max(len(a), len(b))
        a = np.pad(a, (0, size - len(a)))
        b = np.pad(b, (0, size - len(b)))
        return float(np.abs(a - b).max())


@dataclass(frozen=True)
class Root:
    """
    Root cluster: representative value and the number of roots merged into it.
    """

    value: complex
    multiplicity: int = 1


def _as_poly(p: Union[CplxPoly, Sequence[Coefficient]]) -> CplxPoly:
    return p if isinstance(p, CplxPoly) else CplxPoly(tuple(p))


def poly_eval(p: CplxPoly, z, digits: Optional[int] = None):
    """
    Horner evaluation. With digits (or an mpmath-valued polynomial) the evaluation
    runs in an mpmath context at that precision; otherwise numpy handles scalars and arrays.
    """
    digits = digits or p.digits
    if digits is None:
        return npoly.polyval(z, p.array)
    ctx = Precision(digits).context()
    return ctx.polyval([ctx.mpmathify(c) for c in reversed(p.coeffs)], ctx.mpmathify(z))


def cluster_roots(roots: Sequence[complex], radius: Optional[float] = None) -> List[Root]:
    """
    Merges roots closer than the clustering radius, 1e-7 * (1 + max |root|) by default.
    """
    values = [complex(r) for r in roots]
    if not values:
        return []
    if radius is None:
        radius = 1e-7 * (1.0 + max(abs(r) for r in values))

    clusters: List[List[complex]] = []
    for value in sorted(values, key=lambda r: (r.real, r.imag)):
        for cluster in clusters:
            if abs(np.mean(cluster) - value) < radius:
                cluster.append(value)
                break
        else:
            clusters.append([value])
    return [Root(complex(np.mean(c)), len(c)) for c in clusters]


def _scaled_residual(ctx: MPContext, descending: Sequence, root) -> object:
    """
    |p(r)| relative to the sum of the absolute terms of p at r.
    """
    scale = ctx.polyval([abs(c) for c in descending], abs(root))
    return abs(ctx.polyval(descending, root)) / scale if scale else ctx.zero


@catch_exceptions
def poly_roots(
    p: Union[CplxPoly, Sequence[Coefficient]],
    digits: int = DEFAULT_DIGITS,
    cluster_radius: Optional[float] = None,
    maxsteps: int = 600,
    raw: bool = False,
) -> List[Root]:
    """
    All roots of p, computed by mpmath at the given precision with a generous
    amount of extra working precision, then grouped into multiplicity clusters.
    With raw=True the unclustered mpmath roots are returned as Root(value, 1)
    keeping their mpmath values.
    """
    p = _as_poly(p)
    if p.degree < 1:
        raise ValueError(f"Invalid polynomial degree : {p.degree}. Must be at least 1")

    ctx = Precision(max(digits, DEFAULT_DIGITS)).context()
    coeffs = [ctx.mpmathify(c) for c in reversed(p.coeffs)]
    try:
        roots, error = ctx.polyroots(
            coeffs, maxsteps=maxsteps, extraprec=4 * ctx.prec, error=True
        )
    except NoConvergence as e:
        raise RuntimeError(
            f"Root finding did not converge after {maxsteps} steps : {e}"
        )

    residual = max(_scaled_residual(ctx, coeffs, r) for r in roots)
    if residual > ctx.mpf(10) ** (-(ctx.dps // 2)):
        raise RuntimeError(
            f"Root finding did not converge after {maxsteps} steps : residual {float(residual):.3e}"
        )

    if raw:
        return [Root(r, 1) for r in roots]
    logger.debug(
        f"Polynomial degree {p.degree} - Root finding successful : error estimate {float(error):.3e}"
    )
    return cluster_roots([complex(r) for r in roots], cluster_radius)


def _as_real_function(p: Union[CplxPoly, Sequence[float], Callable]) -> Callable:
    if callable(p) and not isinstance(p, CplxPoly):
        return lambda x: float(np.real(p(x)))
    poly = _as_poly(p)
    return lambda x: float(np.real(poly_eval(poly, x)))


@catch_exceptions
def real_root_in_interval(
    p: Union[CplxPoly, Sequence[float], Callable],
    lo: float,
    hi: float,
    tol: float = 1e-14,
) -> float:
    """
    Root of a real polynomial (or real function) bracketed by [lo, hi]:
    bisection to tol, then a Newton polish that is kept only if it stays in the
    bracket and does not increase |p|.
    """
    f = _as_real_function(p)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if f_lo * f_hi > 0:
        raise ValueError(
            f"bracket invalid : p({lo})={f_lo:.3e} and p({hi})={f_hi:.3e} share a sign"
        )

    root = optimize.bisect(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    if isinstance(p, CplxPoly) or not callable(p):
        derivative = _as_real_function(_as_poly(p).derivative())
        slope = derivative(root)
        if slope != 0.0:
            polished = root - f(root) / slope
            if min(lo, hi) <= polished <= max(lo, hi) and abs(f(polished)) <= abs(f(root)):
                root = polished
    return float(root)


def sylvester_matrix(
    f: Union[CplxPoly, Sequence[Coefficient]],
    g: Union[CplxPoly, Sequence[Coefficient]],
) -> List[List[Coefficient]]:
    """
    The (m+n)x(m+n) Sylvester matrix of f (degree m) and g (degree n), rows of
    descending coefficients. Entries keep the coefficient type (complex or mpmath).
    """
    f, g = _as_poly(f), _as_poly(g)
    if f.leading == 0 or g.leading == 0:
        raise ValueError("leading coefficient is zero")
    m, n = f.degree, g.degree

    def block(p: CplxPoly, rows: int) -> List[List[Coefficient]]:
        if rows == 0:
            return []
        descending = list(reversed(p.coeffs))
        width = len(descending) + rows - 1
        index = linalg.toeplitz(
            np.r_[0, -np.ones(rows - 1, dtype=int)],
            np.r_[np.arange(len(descending)), -np.ones(rows - 1, dtype=int)],
        )
        return [[descending[k] if k >= 0 else 0 for k in row[:width]] for row in index]

    return block(f, n) + block(g, m)


@catch_exceptions
def sylvester_resultant(
    f: Union[CplxPoly, Sequence[Coefficient]],
    g: Union[CplxPoly, Sequence[Coefficient]],
    digits: Optional[int] = None,
    relative: bool = False,
):
    """
    Determinant of the Sylvester matrix; zero iff f and g share a root.
    With relative=True the determinant is divided by the Hadamard bound (the
    product of row norms), which makes "vanishes" a scale-free statement.
    """
    rows = sylvester_matrix(f, g)
    if digits is None:
        matrix = np.asarray(rows, dtype=complex)
        value = complex(linalg.det(matrix))
        bound = float(np.prod(np.linalg.norm(matrix, axis=1)))
    else:
        ctx = Precision(digits).context()
        matrix = ctx.matrix([[ctx.mpmathify(x) for x in row] for row in rows])
        value = ctx.det(matrix)
        bound = ctx.fprod(
            ctx.sqrt(ctx.fsum(abs(matrix[i, j]) ** 2 for j in range(matrix.cols)))
            for i in range(matrix.rows)
        )
    return value / bound if relative else value
