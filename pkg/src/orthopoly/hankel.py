import numpy as np
from dataclasses import dataclass
from typing import List, Tuple
from src.config.logger import logger
from src.core.algebra import CplxPoly, PrecScalar, Precision, poly_roots
from src.orthopoly.moments import MomentTable, moment_row
from src.utils.helpers import catch_exceptions


@dataclass(frozen=True)
class OrthoPoly:
    """
    Monic P_n, coefficients ascending at the precision of its moment table.
    residuals[k] is |integral z^k P_n exp(-nV) dz| over the row norm sum_i |c_i m_(k+i)|.
    """

    n: int
    coefficients: Tuple[object, ...]
    digits: int
    residuals: Tuple[float, ...]
    zeros: Tuple[complex, ...] = ()

    @property
    def poly(self) -> CplxPoly:
        return CplxPoly(self.coefficients, self.digits)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def symmetry_defect(self) -> float:
        """
        max_j min_k |-conj(z_j) - z_k|: distance of the zero set from its mirror image.
        """
        zeros = np.asarray(self.zeros, dtype=complex)
        if not len(zeros):
            return 0.0
        mirrored = -np.conj(zeros)
        return float(np.abs(mirrored[:, None] - zeros[None, :]).min(axis=1).max())

    def coefficient_scalars(self) -> List[Tuple[PrecScalar, PrecScalar]]:
        """
        (real, imaginary) parts at full precision.
        """
        precision = Precision(self.digits)
        return [(precision.scalar(c.real), precision.scalar(c.imag)) for c in self.coefficients]


@catch_exceptions
def hankel_solve(table: MomentTable, n: int) -> OrthoPoly:
    """
    Solves sum_i c_i m_(k+i) = -m_(k+n), k = 0..n-1, for the monic P_n and finds its zeros.
    """
    if n < 1:
        raise ValueError(f"Invalid degree : {n}. Must be at least 1")
    if table.count < 2 * n + 1:
        raise ValueError(f"Moment table too short : {table.count} moments for n={n}")
    ctx = table.context()
    m = table.moments
    H = ctx.matrix([[m[k + i] for i in range(n)] for k in range(n)])
    rhs = ctx.matrix([-m[k + n] for k in range(n)])
    try:
        solution = ctx.lu_solve(H, rhs)
    except ZeroDivisionError as e:
        raise RuntimeError(f"increase precision : Hankel matrix of order {n} is singular at {table.digits} digits ({e})")

    coefficients = tuple(solution[i] for i in range(n)) + (ctx.one,)
    residuals = []
    for k in range(n):
        row = sum(abs(c * m[k + i]) for i, c in enumerate(coefficients))
        residuals.append(float(abs(moment_row(table, k, coefficients)) / row) if row else 0.0)

    roots = poly_roots(CplxPoly(coefficients, table.digits), digits=table.digits)
    zeros = tuple(root.value for root in roots for _ in range(root.multiplicity))
    op = OrthoPoly(n, coefficients, table.digits, tuple(residuals), zeros)
    logger.info(
        f"Orthogonal polynomial n={n} P={table.digits} - Hankel solve successful : max residual {op.max_residual:.3e}"
    )
    return op
