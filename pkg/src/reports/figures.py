import matplotlib

matplotlib.use("Agg")

import numpy as np
from typing import Optional, Sequence, Tuple
from matplotlib.figure import Figure
from src.geometry.quadratic_differential import QuadraticDifferential, TrajectoryKind
from src.geometry.trajectory import Trajectory


matplotlib.rcParams.update(
    {
        "svg.hashsalt": "scurves",
        "svg.fonttype": "none",
        "path.simplify": False,
    }
)

VIEWBOXES = {
    "cubic": ((-3.0, 3.0), (-3.0, 3.0)),
    "quintic": ((-2.5, 2.5), (-2.5, 2.5)),
}
STYLES = {
    TrajectoryKind.HORIZONTAL: {"color": "black", "linewidth": 1.2},
    TrajectoryKind.VERTICAL: {"color": "tab:blue", "linewidth": 0.9, "linestyle": "--"},
}


def _axes(family: str, title: str) -> Tuple[Figure, object]:
    figure = Figure(figsize=(5.0, 5.0))
    ax = figure.add_subplot()
    xlim, ylim = VIEWBOXES[family]
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_aspect("equal")
    ax.axhline(0.0, color="0.85", linewidth=0.5)
    ax.axvline(0.0, color="0.85", linewidth=0.5)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title)
    return figure, ax


def _draw_zeros(ax, qd: QuadraticDifferential) -> None:
    for zero in qd.zeros:
        marker = "o" if zero.multiplicity == 1 else "s"
        ax.plot(zero.location.real, zero.location.imag, marker=marker, color="tab:red", markersize=4)


def trajectory_figure(
    family: str,
    title: str,
    qd: QuadraticDifferential,
    trajectories: Sequence[Trajectory],
    zeros: Optional[Sequence[complex]] = None,
) -> Figure:
    """
    Trajectories over the fixed family viewbox, zeros of Q as markers (squares for
    double zeros) and optionally zeros of P_n as crosses.
    """
    figure, ax = _axes(family, title)
    for trajectory in trajectories:
        ax.plot(trajectory.points.real, trajectory.points.imag, **STYLES[trajectory.kind])
    _draw_zeros(ax, qd)
    if zeros is not None and len(zeros):
        values = np.asarray(zeros, dtype=complex)
        ax.plot(values.real, values.imag, linestyle="none", marker="x", color="tab:green", markersize=4)
    return figure


def phase_figure(K_values: Sequence[float], b_values: Sequence[float], K_star: float) -> Figure:
    figure = Figure(figsize=(5.0, 3.5))
    ax = figure.add_subplot()
    ax.plot(K_values, b_values, color="black", linewidth=1.0)
    ax.axvline(K_star, color="tab:red", linewidth=0.8, linestyle="--")
    ax.set_xlabel("K")
    ax.set_ylabel("b(K)")
    ax.set_title("Cubic family : one cut for K < K*")
    return figure
