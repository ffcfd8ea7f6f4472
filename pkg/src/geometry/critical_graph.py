import numpy as np
from typing import Tuple
from src.geometry.quadratic_differential import (
    QuadraticDifferential,
    TrajectoryKind,
    continuation_angle,
    emanation_angles,
)
from src.geometry.trajectory import TraceOptions, Trajectory, ZeroHit, trace_from_zero_at
from src.utils.helpers import angle_distance


def arc_end_angle(qd: QuadraticDifferential, arc: Trajectory) -> float:
    """
    Emanation angle at the end zero of an arc, snapped to the exact table.
    """
    if not isinstance(arc.end, ZeroHit):
        raise ValueError("Arc does not end at a zero")
    location = qd.zeros[arc.end.index].location
    observed = float(np.angle(arc.points[-2] - location))
    angles = emanation_angles(qd, arc.end.index, TrajectoryKind.HORIZONTAL)
    return min(angles, key=lambda angle: angle_distance(angle, observed))


def vertical_tails(
    qd: QuadraticDifferential, arc: Trajectory, opts: TraceOptions = TraceOptions()
) -> Tuple[Trajectory, Trajectory]:
    """
    Vertical trajectories leaving both ends of the arc opposite to it. Together
    with the arc they form the extended contour from infinity to infinity.
    """
    start_zero = arc.start.zero_index
    end_zero = arc.end.index
    first = trace_from_zero_at(
        qd, start_zero, continuation_angle(qd, start_zero, arc.start.angle), TrajectoryKind.VERTICAL, opts
    )
    second = trace_from_zero_at(
        qd, end_zero, continuation_angle(qd, end_zero, arc_end_angle(qd, arc)), TrajectoryKind.VERTICAL, opts
    )
    return first, second
