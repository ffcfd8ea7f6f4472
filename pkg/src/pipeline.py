"""
Pipelines behind the commands.

Every pipeline collects named CheckResults into a ReportDocument and passes its
data files to an ArtifactWriter. Expensive pieces (traced arcs, measures) are
built once per family parameter and shared between sections.
"""

import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
from concurrent.futures import ThreadPoolExecutor
from src.config.logger import logger
from src.config.run_config import RunConfig
from src.core.algebra import Precision
from src.core.potential import Potential, sector_of
from src.equilibrium.measure import (
    ArcMeasure,
    density_from_Q,
    endpoint_exponent,
    energy,
    s_property_residual,
    uniform_like,
    variational_check,
)
from src.families import cubic, quintic
from src.geometry.critical_graph import vertical_tails
from src.geometry.polygon import forced_angle_at_infinity, polygon_from_trajectories, teichmuller_check
from src.geometry.quadratic_differential import QuadraticDifferential, TrajectoryKind, emanation_angles
from src.geometry.trajectory import (
    InfinityDirection,
    NotFound,
    TraceOptions,
    Trajectory,
    Truncated,
    connection_search,
    hausdorff_distance,
    imaginary_axis_crossings,
    level_set_drift,
    min_separation,
    reflect,
    trace_from_zero,
    trace_from_zero_at,
    trace_through,
)
from src.orthopoly.hankel import OrthoPoly, hankel_solve
from src.orthopoly.moments import MomentTable, moments, precision_policy
from src.orthopoly.zeros import ZeroCloud, ZeroClusters, compare_to_measure, zero_clusters
from src.reports.figures import phase_figure, trajectory_figure
from src.reports.report import CheckResult, ReportDocument
from src.reports.writers import ArtifactWriter, dumps, trajectory_frame, zeros_frame
from src.utils.helpers import angle_distance, catch_exceptions


PUBLISHED_CONSTANTS = {
    "v_star": 3.150037074,
    "K_star": 1.0005424,
    "a_star": 0.6821733958,
    "b_star": 1.712251710,
}
PUBLISHED_QUINTIC = {
    1: {"a": -1.1082, "b": 1.3489, "c": 0.4877, "d": 0.6781, "e": -0.7979},
    2: {"a": -0.9820, "b": 0.7744, "c": -1.3118, "d": 1.0344, "e": 0.1649},
}
PUBLISHED_ANGLES_P1 = (-0.7971, -0.1305, 0.5362)
CONSTANT_TOL = 1e-6
CROSS_CHECK_TOL = 1e-8
EXACT_TOL = 1e-12
FOUR_DECIMALS = 5e-5
PARAMS_TOL = 1e-9
SYSTEM_TOL = 1e-9
EXPANSION_TOL = 1e-10
RESULTANT_TOL = 1e-8
SYMMETRY_SAMPLES = 100
SYMMETRY_TOL = 1e-10
REFLECTION_TOL = 1e-5
TEICHMULLER_TOL = 1e-6
MASS_TOL = 1e-6
ON_ARC_TOL = 1e-4
OFF_ARC_TOL = -1e-6
S_PROPERTY_TOL = 1e-6
ENERGY_GAP_TOL = 1e-5
TRIANGLE_TOL = 1e-6
ZERO_SYMMETRY_TOL = 1e-10
CUBIC_K_ZERO_DISTANCE = 0.1
PHASE_SWEEP = (-2.0, 2.5, 50)
VERIFY_DEGREES = (8, 12, 16)
VERIFY_DIGITS = 60
VERIFY_CUBIC_K = (0.0, 0.5)
QUINTIC_KS_DISTANCE = 0.15
TWO_CUT_K = 2.0


@dataclass(frozen=True)
class FamilyCase:
    """
    One member of a family: its potential, Q and a label used in check names and file names.
    """

    family: str
    label: str
    params: Union[cubic.CubicParams, quintic.QuinticParams]
    pot: Potential
    qd: QuadraticDifferential


@dataclass
class ArcRun:
    """
    Connecting arc of a family case with its vertical tails and the measure on it.
    """

    case: FamilyCase
    arc: Trajectory
    tails: Tuple[Trajectory, Trajectory]
    measure: Optional[ArcMeasure] = None
    extras: Dict[str, Trajectory] = field(default_factory=dict)

    @property
    def trajectories(self) -> List[Trajectory]:
        return [self.arc, *self.tails, *self.extras.values()]


@dataclass(frozen=True)
class OrthoStudy:
    n: int
    table: MomentTable
    op: OrthoPoly
    cloud: Optional[ZeroCloud]
    clusters: ZeroClusters


def cubic_case(K: float, phase_tie: float = 1e-9) -> FamilyCase:
    params = cubic.params_from_K(K, phase_tie)
    return FamilyCase("cubic", f"cubic K={K:g}", params, params.potential(), cubic.build_Q(params))


def quintic_case(p: int) -> FamilyCase:
    params = quintic.closed_form_params(p)
    pot = params.potential()
    return FamilyCase("quintic", f"quintic {pot.class_label}", params, pot, quintic.build_Q(params))


def case_from_config(config: RunConfig) -> FamilyCase:
    if config.family == "cubic":
        K = cubic.critical_constants().K_star if config.critical else config.K
        return cubic_case(K, config.phase_tie)
    return quintic_case(config.p)


@catch_exceptions
def trace_arc(case: FamilyCase, opts: TraceOptions) -> Union[ArcRun, NotFound]:
    """
    Arc z1 -> z2 (through z0 at the cubic critical point) and its vertical tails.
    """
    if case.family == "cubic" and case.params.phase is cubic.Phase.CRITICAL:
        arc = cubic.connection_chain(case.params, opts)
    else:
        arc = connection_search(case.qd, 1, 2, opts)
    if isinstance(arc, NotFound):
        return arc
    return ArcRun(case, arc, vertical_tails(case.qd, arc, opts))


@catch_exceptions
def attach_measure(run: ArcRun, panels: int) -> ArcRun:
    run.measure = density_from_Q(run.case.qd, run.arc, panels=panels)
    return run


def _other_horizontals(run: ArcRun, opts: TraceOptions) -> List[Trajectory]:
    zero = run.arc.start.zero_index
    angles = [
        angle
        for angle in emanation_angles(run.case.qd, zero)
        if angle_distance(angle, run.arc.start.angle) > 1e-6
    ]
    return [
        trace_from_zero_at(run.case.qd, zero, angle, TrajectoryKind.HORIZONTAL, opts) for angle in angles
    ]


# Checks


def geometry_checks(run: ArcRun, opts: TraceOptions, angle_tol: float) -> List[CheckResult]:
    """
    Level-set drift of every traced trajectory, tail directions and sectors,
    reflection symmetry of the arc and separation of the trajectories.
    """
    case, label = run.case, run.case.label
    checks = [
        CheckResult.holds(f"{label} : arc z1 -> z2 found", run.arc.ends_at(2), run.arc.end.describe())
    ]
    drift = max(level_set_drift(case.qd, t) for t in run.trajectories)
    checks.append(CheckResult.below(f"{label} : level-set drift", drift, opts.drift_tol))

    for tail, index in zip(run.tails, case.pot.contour_class):
        target = case.pot.sector(index)
        end = tail.end
        if not isinstance(end, InfinityDirection):
            checks.append(
                CheckResult.holds(f"{label} : tail into {target.label} reaches infinity", False, end.describe())
            )
            continue
        deviation = angle_distance(end.measured, target.midpoint)
        checks.append(
            CheckResult.below(
                f"{label} : tail into {target.label} angle deviation",
                deviation,
                angle_tol,
                f"measured {end.measured / np.pi:.6f}pi, expected {target.midpoint / np.pi:.6f}pi",
            )
        )
        reached = sector_of(case.pot, end.angle)
        checks.append(
            CheckResult.holds(f"{label} : tail sector is {target.label}", reached == target, reached.label)
        )
        d = case.pot.degree
        margin = min(angle_distance(end.measured, j * np.pi / d) for j in range(2 * d))
        checks.append(
            CheckResult.at_least(f"{label} : tail clear of sector boundaries", margin, 2 * angle_tol)
        )

    mirror = hausdorff_distance(reflect(case.qd, run.arc), run.arc)
    checks.append(CheckResult.below(f"{label} : arc reflection symmetry (Hausdorff)", mirror, REFLECTION_TOL))
    separation = min_separation(run.trajectories, case.qd, opts)
    checks.append(CheckResult.holds(f"{label} : critical trajectories do not cross", separation > 0, separation))
    return checks


def teichmuller_checks(
    case: FamilyCase, first: Trajectory, second: Trajectory
) -> Tuple[List[CheckResult], Dict[str, float]]:
    label = case.label
    if not (isinstance(first.end, InfinityDirection) and isinstance(second.end, InfinityDirection)):
        ends = f"{first.end.describe()}, {second.end.describe()}"
        return [CheckResult.holds(f"{label} : Q-polygon closes at infinity", False, ends)], {}
    polygon = polygon_from_trajectories(case.qd, first, second)
    residual = teichmuller_check(polygon)
    forced = forced_angle_at_infinity(polygon.vertices[:1], polygon.interior_orders, case.qd.d)
    data = {
        "corner_angle_over_pi": polygon.vertices[0].angle / np.pi,
        "angle_at_infinity_over_pi": polygon.vertices[1].angle / np.pi,
        "forced_angle_over_pi": forced / np.pi,
        "interior_orders": list(polygon.interior_orders),
        "residual": residual,
    }
    return [CheckResult.below(f"{label} : Teichmuller residual", abs(residual), TEICHMULLER_TOL)], data


def equilibrium_checks(run: ArcRun) -> Tuple[List[CheckResult], Dict[str, object]]:
    """
    Mass, S-property, variational conditions, energy identity and the energy
    comparison with the arclength-uniform measure.
    """
    measure, case, label = run.measure, run.case, run.case.label
    variational = variational_check(measure, case.pot, run.tails)
    report = energy(measure, case.pot)
    uniform = energy(uniform_like(measure), case.pot)
    s_residual = s_property_residual(case.qd, measure)
    checks = [
        CheckResult.below(f"{label} : mass defect", abs(measure.mass - 1.0), MASS_TOL),
        CheckResult.below(f"{label} : S-property residual", s_residual, S_PROPERTY_TOL),
        CheckResult.below(f"{label} : on-arc deviation of 2U + Re V", variational.on_support_deviation, ON_ARC_TOL),
        CheckResult.at_least(f"{label} : off-arc margin of 2U + Re V", variational.off_support_margin, OFF_ARC_TOL),
        CheckResult.below(f"{label} : energy identity gap", report.consistency_gap, ENERGY_GAP_TOL),
        CheckResult.holds(
            f"{label} : equilibrium energy below uniform energy",
            report.E_V < uniform.E_V,
            [report.E_V, uniform.E_V],
        ),
    ]
    data = {
        "mass": measure.mass,
        "arc_length": measure.length,
        "ell": variational.ell,
        "E_V": report.E_V,
        "log_energy": report.log_energy,
        "external": report.external,
        "uniform_E_V": uniform.E_V,
        "tails_increasing": variational.tails_increasing,
        "endpoint_exponents": list(endpoint_exponent(measure)),
    }
    return checks, data


def orthopoly_studies(
    pot: Potential,
    degrees: Sequence[int],
    digits: Optional[int],
    measure: Optional[ArcMeasure],
    max_workers: int,
) -> List[OrthoStudy]:
    """
    P_n for each degree, in parallel over n, returned in input order.
    """

    def study(n: int) -> OrthoStudy:
        table = moments(pot, n, digits=digits)
        op = hankel_solve(table, n)
        cloud = compare_to_measure(op, measure) if measure is not None else None
        return OrthoStudy(n, table, op, cloud, zero_clusters(op.zeros))

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(study, degrees))


def orthopoly_checks(label: str, studies: Sequence[OrthoStudy]) -> List[CheckResult]:
    checks = []
    for s in studies:
        P = s.table.digits
        checks.extend(
            [
                CheckResult.below(f"{label} n={s.n} : scaled orthogonality residual", s.op.max_residual, 10.0 ** (-P / 3)),
                CheckResult.below(f"{label} n={s.n} : moment symmetry defect", s.table.symmetry_defect(), 10.0 ** (-P / 2)),
                CheckResult.below(f"{label} n={s.n} : zero-set symmetry", s.op.symmetry_defect(), ZERO_SYMMETRY_TOL),
            ]
        )
    clouds = [s.cloud for s in studies if s.cloud is not None]
    if len(clouds) > 1:
        degrees = ", ".join(str(c.n) for c in clouds)
        checks.append(
            CheckResult.non_increasing(f"{label} : max zero-to-arc distance over n = {degrees}", [c.max_distance for c in clouds])
        )
        checks.append(
            CheckResult.non_increasing(f"{label} : Kolmogorov distance over n = {degrees}", [c.ks_distance for c in clouds])
        )
    return checks


def study_data(s: OrthoStudy) -> Dict[str, object]:
    precision = Precision(s.table.digits)
    data = {
        "n": s.n,
        "precision": s.table.digits,
        "contour": s.table.contour.describe(),
        "panels": s.table.panels,
        "moments": [{"re": precision.scalar(m.real), "im": precision.scalar(m.imag)} for m in s.table.moments],
        "coefficients": [{"re": re, "im": im} for re, im in s.op.coefficient_scalars()],
        "max_residual": s.op.max_residual,
        "zeros": list(s.op.zeros),
        "two_clusters": s.clusters.two_clusters,
        "cluster_gap": s.clusters.gap,
    }
    if s.cloud is not None:
        data.update(
            {
                "max_distance": s.cloud.max_distance,
                "ks_distance": s.cloud.ks_distance,
                "far_count": s.cloud.far_count,
            }
        )
    return data


def _write_run(writer: ArtifactWriter, run: ArcRun, prefix: str, title: str, zeros=None) -> None:
    names = ["arc", "tail_start", "tail_end", *run.extras.keys()]
    for name, trajectory in zip(names, run.trajectories):
        writer.write_csv(f"{prefix}_{name}", trajectory_frame(trajectory))
    writer.write_svg(prefix, trajectory_figure(run.case.family, title, run.case.qd, run.trajectories, zeros))


def _run_summary(run: ArcRun) -> Dict[str, object]:
    return {
        "arc_points": len(run.arc.points),
        "arc_length": run.arc.length,
        "arc_end": run.arc.end.describe(),
        "tails": [t.end.describe() for t in run.tails],
        "extras": {name: t.end.describe() for name, t in run.extras.items()},
    }


# Commands


def _new_report(command: str, config: RunConfig, precision: Optional[int] = None) -> ReportDocument:
    return ReportDocument(command=command, config=config.to_dict(), precision=precision)


def critical_constants_checks() -> Tuple[List[CheckResult], Dict[str, float]]:
    constants = cubic.critical_constants()
    values = {
        "v_star": constants.v_star,
        "K_star": constants.K_star,
        "a_star": constants.a_star,
        "b_star": constants.b_star,
    }
    checks = [
        CheckResult.below(f"critical constant {name}", abs(values[name] - published), CONSTANT_TOL, f"published {published}")
        for name, published in PUBLISHED_CONSTANTS.items()
    ]
    checks.append(
        CheckResult.below(
            "critical constant K* = 1/a* - a*^2 against v*",
            constants.gap,
            CROSS_CHECK_TOL,
            f"K* from v* {constants.K_star_from_v:.12f}",
        )
    )
    return checks, dict(values, K_star_from_v=constants.K_star_from_v, gap=constants.gap)


def cubic_params_checks(case: FamilyCase) -> Tuple[List[CheckResult], Dict[str, object]]:
    params = case.params
    residual = max(abs(r) for r in cubic.system_residuals(params))
    checks = [CheckResult.below(f"{case.label} : coefficient system residual", residual, EXACT_TOL)]
    checks.append(
        CheckResult.holds(
            f"{case.label} : phase agrees with the sign of F(-a)",
            params.phase is cubic.Phase.CRITICAL or cubic.phase_from_F(params.a) is params.phase,
            params.phase.value,
        )
    )
    data = {"K": params.K, "a": params.a, "b": params.b, "c": params.c, "C": params.C, "phase": params.phase}
    return checks, data


@catch_exceptions
def run_cubic(config: RunConfig) -> ReportDocument:
    """
    cubic --critical: the critical constants. cubic --K: parameters, phase, critical
    graph and equilibrium checks (one cut and critical), or zeros of P_n (two cut).
    """
    opts = config.trace_options()
    writer = ArtifactWriter(config.out_dir, config.emit)
    report = _new_report("cubic", config)

    if config.critical:
        checks, data = critical_constants_checks()
        report.extend(checks)
        report.data["critical_constants"] = data
        writer.write_report("cubic_critical_report", report)
        return report

    case = cubic_case(config.K, config.phase_tie)
    checks, data = cubic_params_checks(case)
    report.extend(checks)
    report.data["params"] = data
    prefix = f"cubic_K{config.K:g}"

    run = trace_arc(case, opts)
    if case.params.phase is cubic.Phase.TWO_CUT:
        report.add(
            CheckResult.holds(
                f"{case.label} : no arc z1 -> z2 in the two-cut phase",
                isinstance(run, NotFound),
                [e.describe() for e in run.endpoints] if isinstance(run, NotFound) else run.arc.end.describe(),
            )
        )
        digits = precision_policy(config.n, config.digits)
        report.precision = digits
        [s] = orthopoly_studies(case.pot, [config.n], digits, None, 1)
        report.extend(orthopoly_checks(case.label, [s]))
        report.add(
            CheckResult.holds(
                f"{case.label} n={s.n} : zeros form two clusters",
                s.clusters.two_clusters,
                {"gap": s.clusters.gap, "spacing": s.clusters.spacing},
            )
        )
        report.data["orthopoly"] = study_data(s)
        writer.write_csv(f"{prefix}_zeros_n{s.n}", zeros_frame(s.op.zeros, [np.nan] * len(s.op.zeros)))
        traced = run.trajectories if isinstance(run, NotFound) else run.trajectories[:1]
        writer.write_svg(
            prefix,
            trajectory_figure(
                case.family, f"Cubic K = {config.K:g} (two cut), zeros of P_{s.n}", case.qd, traced, s.op.zeros
            ),
        )
        writer.write_report(f"{prefix}_report", report)
        return report

    if isinstance(run, NotFound):
        report.add(CheckResult.holds(f"{case.label} : arc z1 -> z2 found", False, [e.describe() for e in run.endpoints]))
        writer.write_report(f"{prefix}_report", report)
        return report

    run.extras = dict(zip(("horizontal_a", "horizontal_b"), _other_horizontals(run, opts)))
    report.extend(geometry_checks(run, opts, config.angle_tol))
    if case.params.phase is cubic.Phase.ONE_CUT:
        y1, y2 = cubic.find_y1_y2(case.params)
        crossings = imaginary_axis_crossings(run.arc)
        report.add(
            CheckResult.holds(
                f"{case.label} : arc crosses the imaginary axis once above -a",
                len(crossings) == 1 and crossings[0] > -case.params.a,
                crossings,
            ),
            CheckResult.below(
                f"{case.label} : arc crossing matches y1", abs(crossings[0] - y1) if crossings else np.inf, 1e-6
            ),
        )
        report.data["y1_y2"] = [y1, y2]
        polygon_checks, polygon_data = teichmuller_checks(case, *run.extras.values())
        report.extend(polygon_checks)
        report.data["polygon"] = polygon_data

    attach_measure(run, config.panels)
    checks, data = equilibrium_checks(run)
    report.extend(checks)
    report.data["equilibrium"] = data
    report.data["trajectories"] = _run_summary(run)
    _write_run(writer, run, prefix, f"Cubic K = {config.K:g} ({case.params.phase.value})")
    writer.write_report(f"{prefix}_report", report)
    return report


def quintic_params_checks(p: int, seed: int) -> Tuple[List[CheckResult], Dict[str, object]]:
    closed = quintic.closed_form_params(p)
    numeric = quintic.solve_params_numeric(p)
    label = f"quintic p={p}"
    checks = []
    for name, published in PUBLISHED_QUINTIC[p].items():
        value = getattr(closed, name)
        checks.append(CheckResult.below(f"{label} : {name} against published decimals", abs(value - published), FOUR_DECIMALS))
    for name in ("a", "b", "c", "d", "e"):
        gap = abs(getattr(closed, name) - getattr(numeric, name))
        checks.append(CheckResult.below(f"{label} : {name} numeric against closed form", gap, PARAMS_TOL))
    residuals = quintic.system_residuals(closed)
    reduced = quintic.reduced_system(closed.a, closed.c)
    checks.extend(
        [
            CheckResult.below(f"{label} : coefficient system residual", max(abs(r) for r in residuals), SYSTEM_TOL),
            CheckResult.below(f"{label} : reduced system residual", max(abs(r) for r in reduced), SYSTEM_TOL),
            CheckResult.below(f"{label} : e - (a - c)/2", abs(closed.e - (closed.a - closed.c) / 2), EXACT_TOL),
            CheckResult.below(f"{label} : relative resultant at c", abs(quintic.resultant_at(closed.c)), RESULTANT_TOL),
            CheckResult.below(f"{label} : expansion against -z^8/4 + iz^3", quintic.expansion_defect(closed), EXPANSION_TOL),
        ]
    )
    rng = np.random.default_rng(seed)
    samples = rng.uniform(-2.0, 2.0, SYMMETRY_SAMPLES) + 1j * rng.uniform(-2.0, 2.0, SYMMETRY_SAMPLES)
    symmetry = quintic.build_Q(closed).symmetric_defect(samples)
    checks.append(CheckResult.below(f"{label} : Q(z) = conj Q(-conj z) on random samples", symmetry, SYMMETRY_TOL))
    data = {
        "closed_form": dict(closed.as_dict(), A=closed.A, B=closed.B),
        "numeric": numeric.as_dict(),
        "system_residuals": residuals,
        "reduced_residuals": list(reduced),
    }
    return checks, data


def quintic_guard_checks(p: int, opts: TraceOptions) -> Tuple[List[CheckResult], Dict[str, object]]:
    triangle = quintic.triangle_guards(p, opts)
    halfline = quintic.halfline_guards(p)
    checks = []
    if p == 1:
        angles = triangle.values["emanation_angles_over_pi"]
        gap = max(abs(a - b) for a, b in zip(sorted(angles), PUBLISHED_ANGLES_P1))
        checks.extend(
            [
                CheckResult.below("quintic p=1 : emanation angles at z1 against published", gap, FOUR_DECIMALS),
                CheckResult.holds("quintic p=1 : triangle guards", triangle.holds, triangle.values["min_im_D_segment"]),
                CheckResult.holds("quintic p=1 : half-line guards", halfline.holds, halfline.values["max_re_D_prime"]),
            ]
        )
    return checks, {"triangle": triangle.values, "halfline": halfline.values}


@catch_exceptions
def run_quintic(config: RunConfig) -> ReportDocument:
    """
    Parameters, guards, connecting arc, tails, extension case and equilibrium checks
    for the contour class T3,1 (p = 1) or T4,5 (p = 2).
    """
    p = config.p
    opts = config.trace_options()
    writer = ArtifactWriter(config.out_dir, config.emit)
    report = _new_report("quintic", config)
    case = quintic_case(p)
    prefix = f"quintic_p{p}"

    checks, data = quintic_params_checks(p, config.seed)
    report.extend(checks)
    report.data["params"] = data
    checks, data = quintic_guard_checks(p, opts)
    report.extend(checks)
    report.data["guards"] = data

    run = trace_arc(case, opts)
    if isinstance(run, NotFound):
        report.add(CheckResult.holds(f"{case.label} : arc z1 -> z2 found", False, [e.describe() for e in run.endpoints]))
        writer.write_report(f"{prefix}_report", report)
        return report

    report.extend(quintic_arc_checks(run, opts, config.angle_tol))
    attach_measure(run, config.panels)
    checks, data = equilibrium_checks(run)
    report.extend(checks)
    report.data["equilibrium"] = data
    report.data["trajectories"] = _run_summary(run)
    _write_run(writer, run, prefix, f"Quintic {case.pot.class_label}")
    writer.write_report(f"{prefix}_report", report)
    return report


def quintic_arc_checks(run: ArcRun, opts: TraceOptions, angle_tol: float) -> List[CheckResult]:
    case = run.case
    params = case.params
    label = case.label
    inside = quintic.in_triangle(params, run.arc.points, TRIANGLE_TOL)
    checks = [
        CheckResult.holds(
            f"{label} : arc stays in the guard triangle",
            bool(inside.all()),
            int((~inside).sum()),
        )
    ]
    extension = quintic.extension_case(params, run.arc.start.angle, opts)
    run.extras = {f"horizontal_{k}": t for k, t in zip("ab", extension.trajectories)}
    checks.extend(geometry_checks(run, opts, angle_tol))
    if params.p == 1:
        checks.append(
            CheckResult.holds(
                f"{label} : extension configuration is Case 1",
                extension.case is quintic.ExtensionCase.ADJACENT,
                extension.case.value,
            )
        )
        if len(extension.trajectories) == 2:
            polygon_checks, _ = teichmuller_checks(case, *extension.trajectories)
            checks.extend(polygon_checks)
    return checks


def _parse_start(start: Optional[str]) -> Optional[complex]:
    if start is None:
        return None
    try:
        x, y = (float(part) for part in start.split(","))
    except ValueError:
        raise ValueError(f"Invalid start point : {start}. Must be x,y or y1 or y2")
    return complex(x, y)


@catch_exceptions
def run_trace(
    config: RunConfig,
    zero_index: int = 1,
    angle_index: int = 0,
    kind: str = "horizontal",
    start: Optional[str] = None,
) -> ReportDocument:
    """
    One critical trajectory from a zero, or both halves of the trajectory through
    a regular point (x,y or the cubic crossing points y1, y2).
    """
    opts = config.trace_options()
    writer = ArtifactWriter(config.out_dir, config.emit)
    report = _new_report("trace", config)
    case = case_from_config(config)
    trajectory_kind = TrajectoryKind(kind)

    if start in ("y1", "y2"):
        if case.family != "cubic":
            raise ValueError(f"Invalid start point : {start} is only defined for the cubic family")
        y1, y2 = cubic.find_y1_y2(case.params)
        point = 1j * (y1 if start == "y1" else y2)
        trajectories = list(trace_through(case.qd, point, trajectory_kind, opts))
        names = ["forward", "backward"]
    elif start is not None:
        trajectories = list(trace_through(case.qd, _parse_start(start), trajectory_kind, opts))
        names = ["forward", "backward"]
    else:
        trajectories = [trace_from_zero(case.qd, zero_index, angle_index, trajectory_kind, opts)]
        names = [f"z{zero_index}_angle{angle_index}"]

    endpoints = []
    for name, trajectory in zip(names, trajectories):
        drift = level_set_drift(case.qd, trajectory)
        report.add(
            CheckResult.below(f"{case.label} {name} : level-set drift", drift, opts.drift_tol),
            CheckResult.holds(
                f"{case.label} {name} : endpoint classified",
                not isinstance(trajectory.end, Truncated),
                trajectory.end.describe(),
            ),
        )
        endpoints.append(
            {
                "name": name,
                "kind": trajectory.kind,
                "start": trajectory.start.location,
                "start_angle": trajectory.start.angle,
                "end": trajectory.end.describe(),
                "points": len(trajectory.points),
                "length": trajectory.length,
            }
        )
        writer.write_csv(f"trace_{name}", trajectory_frame(trajectory))
    report.data["trajectories"] = endpoints
    writer.write_json("trace_endpoints", {"family": case.label, "trajectories": endpoints})
    writer.write_svg("trace", trajectory_figure(case.family, f"{case.label} {kind}", case.qd, trajectories))
    writer.write_report("trace_report", report)
    return report


@catch_exceptions
def run_zeros(config: RunConfig) -> ReportDocument:
    """
    Zeros of P_n against the equilibrium measure, with the moment table checked
    along a second contour of the same class.
    """
    opts = config.trace_options()
    writer = ArtifactWriter(config.out_dir, config.emit)
    digits = precision_policy(config.n, config.digits)
    report = _new_report("zeros", config, digits)
    case = case_from_config(config)
    prefix = f"zeros_{case.family}_n{config.n}"

    run = trace_arc(case, opts)
    measure = None
    if not isinstance(run, NotFound):
        measure = attach_measure(run, config.panels).measure

    [s] = orthopoly_studies(case.pot, [config.n], digits, measure, 1)
    report.extend(orthopoly_checks(case.label, [s]))
    second = moments(case.pot, config.n, digits=digits, variant=1)
    report.add(
        CheckResult.below(
            f"{case.label} n={s.n} : moments along a second contour",
            s.table.relative_difference(second),
            10.0 ** (-digits / 2),
            second.contour.describe(),
        )
    )
    if measure is None:
        report.add(
            CheckResult.holds(
                f"{case.label} n={s.n} : zeros form two clusters",
                s.clusters.two_clusters,
                {"gap": s.clusters.gap, "spacing": s.clusters.spacing},
            )
        )
        distances = [np.nan] * len(s.op.zeros)
    else:
        distances = list(s.cloud.distances)
    report.data["orthopoly"] = study_data(s)

    writer.write_csv(prefix, zeros_frame(s.op.zeros, distances))
    if s.cloud is not None:
        writer.write_json(
            f"{prefix}_cloud",
            {
                "n": s.n,
                "max_distance": s.cloud.max_distance,
                "ks_distance": s.cloud.ks_distance,
                "far_count": s.cloud.far_count,
                "coordinates": list(s.cloud.coordinates),
            },
        )
    trajectories = [] if isinstance(run, NotFound) else run.trajectories
    writer.write_svg(
        prefix, trajectory_figure(case.family, f"{case.label}, zeros of P_{s.n}", case.qd, trajectories, s.op.zeros)
    )
    writer.write_report(f"{prefix}_report", report)
    return report


# Verification suite


class _Cache:
    """
    Traced arcs and measures shared by the verification sections.
    """

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.opts = config.trace_options()
        self.runs: Dict[str, ArcRun] = {}
        self.results: Dict[str, List[CheckResult]] = {}

    def run(self, case: FamilyCase) -> ArcRun:
        if case.label not in self.runs:
            result = trace_arc(case, self.opts)
            if isinstance(result, NotFound):
                raise RuntimeError(f"{case.label} : no arc z1 -> z2 ({[e.describe() for e in result.endpoints]})")
            self.runs[case.label] = attach_measure(result, self.config.panels)
        return self.runs[case.label]


def _verify_constants(cache: _Cache) -> List[CheckResult]:
    checks, _ = critical_constants_checks()
    case = cubic_case(0.0)
    params = case.params
    exact = {"b": (params.b, np.sqrt(2.0)), "a": (params.a, 1.0), "c": (params.c, 1.0), "C": (params.C, -0.75)}
    checks.extend(
        CheckResult.below(f"cubic K=0 : exact {name}", abs(value - expected), EXACT_TOL)
        for name, (value, expected) in exact.items()
    )
    return checks


def _verify_phase(cache: _Cache) -> List[CheckResult]:
    lo, hi, count = PHASE_SWEEP
    K_values = np.linspace(lo, hi, count)
    points = cubic.phase_diagram(K_values, cache.opts, cache.config.phase_tie, cache.config.max_workers)
    mismatches = [p.K for p in points if p.phase is not cubic.Phase.CRITICAL and not p.agrees]
    named = cubic.phase_diagram([0.0, TWO_CUT_K], cache.opts, cache.config.phase_tie, 1)
    return [
        CheckResult.holds(f"phase sweep over {count} values of K agrees with connection search", not mismatches, mismatches),
        CheckResult.holds("phase at K=0 is one cut with a connection", named[0].phase is cubic.Phase.ONE_CUT and named[0].connected),
        CheckResult.holds("phase at K=2 is two cut without a connection", named[1].phase is cubic.Phase.TWO_CUT and not named[1].connected),
    ]


def _verify_quintic_params(cache: _Cache) -> List[CheckResult]:
    checks = []
    for p in (1, 2):
        params_checks, _ = quintic_params_checks(p, cache.config.seed)
        guard_checks, _ = quintic_guard_checks(p, cache.opts)
        checks.extend(params_checks + guard_checks)
    return checks


def _verify_geometry(cache: _Cache) -> List[CheckResult]:
    checks = []
    run = cache.run(cubic_case(0.0))
    run.extras = dict(zip(("horizontal_a", "horizontal_b"), _other_horizontals(run, cache.opts)))
    checks.extend(geometry_checks(run, cache.opts, cache.config.angle_tol))
    polygon_checks, _ = teichmuller_checks(run.case, *run.extras.values())
    checks.extend(polygon_checks)
    for p in (1, 2):
        checks.extend(quintic_arc_checks(cache.run(quintic_case(p)), cache.opts, cache.config.angle_tol))
    return checks


def _verify_equilibrium(cache: _Cache) -> List[CheckResult]:
    critical = cubic_case(cubic.critical_constants().K_star)
    cases = [cubic_case(K) for K in VERIFY_CUBIC_K] + [critical] + [quintic_case(p) for p in (1, 2)]
    checks = []
    for case in cases:
        case_checks, _ = equilibrium_checks(cache.run(case))
        checks.extend(case_checks)
    chain = cache.run(critical).arc
    through = float(np.min(np.abs(chain.points - critical.qd.locations[cubic.Z0])))
    checks.extend(
        [
            CheckResult.holds(
                f"{critical.label} : support runs z1 -> z0 -> z2",
                chain.start.zero_index == cubic.Z1 and chain.ends_at(cubic.Z2),
                chain.end.describe(),
            ),
            CheckResult.below(f"{critical.label} : support passes through z0", through, EXACT_TOL),
        ]
    )
    return checks


def _verify_orthopoly(cache: _Cache) -> List[CheckResult]:
    config = cache.config
    digits = config.digits or VERIFY_DIGITS
    checks = []
    studied = {}
    for case in [cubic_case(K) for K in VERIFY_CUBIC_K] + [quintic_case(p) for p in (1, 2)]:
        run = cache.run(case)
        studies = orthopoly_studies(case.pot, VERIFY_DEGREES, digits, run.measure, config.max_workers)
        checks.extend(orthopoly_checks(case.label, studies))
        studied[case.label] = {s.n: s for s in studies}

    cubic_k0, quintic_p1 = cubic_case(0.0), quintic_case(1)
    last, middle = VERIFY_DEGREES[-1], VERIFY_DEGREES[1]
    checks.extend(
        [
            CheckResult.below(
                f"{cubic_k0.label} n={last} : max zero-to-arc distance",
                studied[cubic_k0.label][last].cloud.max_distance,
                CUBIC_K_ZERO_DISTANCE,
            ),
            CheckResult.below(
                f"{quintic_p1.label} n={middle} : Kolmogorov distance",
                studied[quintic_p1.label][middle].cloud.ks_distance,
                QUINTIC_KS_DISTANCE,
            ),
        ]
    )
    first = VERIFY_DEGREES[0]
    second = moments(cubic_k0.pot, first, digits=digits, variant=1)
    checks.append(
        CheckResult.below(
            f"{cubic_k0.label} n={first} : moments along a second contour",
            studied[cubic_k0.label][first].table.relative_difference(second),
            10.0 ** (-digits / 2),
        )
    )
    two_cut = cubic_case(TWO_CUT_K)
    [s] = orthopoly_studies(two_cut.pot, [last], digits, None, 1)
    checks.append(
        CheckResult.holds(
            f"{two_cut.label} n={s.n} : zeros form two clusters",
            s.clusters.two_clusters,
            {"gap": s.clusters.gap, "spacing": s.clusters.spacing},
        )
    )
    return checks


def _verify_determinism(cache: _Cache) -> List[CheckResult]:
    """
    Recomputes the traced sections from a fresh cache and compares the serialized
    checks and arc tables with the first pass.
    """
    fresh = _Cache(cache.config)
    checks = []
    for name, section in VERIFY_SECTIONS:
        if name not in REPEATED_SECTIONS:
            continue
        first = dumps({"checks": [c.as_dict() for c in cache.results.get(name, [])]})
        second = dumps({"checks": [c.as_dict() for c in section(fresh)]})
        checks.append(CheckResult.holds(f"{name} section serializes byte-identically on a second run", first == second))
    differing = [
        label
        for label, run in cache.runs.items()
        if label not in fresh.runs
        or trajectory_frame(run.arc).to_csv(index=False) != trajectory_frame(fresh.runs[label].arc).to_csv(index=False)
    ]
    checks.append(CheckResult.holds("traced arcs are identical on a second run", not differing, differing))
    return checks


VERIFY_SECTIONS: Tuple[Tuple[str, Callable[[_Cache], List[CheckResult]]], ...] = (
    ("constants", _verify_constants),
    ("phase", _verify_phase),
    ("quintic_params", _verify_quintic_params),
    ("geometry", _verify_geometry),
    ("equilibrium", _verify_equilibrium),
    ("orthopoly", _verify_orthopoly),
)
REPEATED_SECTIONS = ("geometry", "equilibrium", "orthopoly")


@catch_exceptions
def run_verify(config: RunConfig) -> ReportDocument:
    """
    The acceptance suite. Sections run in order; a section that raises is recorded
    as a failed check and the remaining sections still run. The traced sections
    are then repeated from scratch to check that the output is deterministic.
    """
    writer = ArtifactWriter(config.out_dir, config.emit)
    report = _new_report("verify", config, config.digits or VERIFY_DIGITS)
    cache = _Cache(config)
    sections = VERIFY_SECTIONS + (("determinism", _verify_determinism),)
    logger.info(f"Starting verification suite : {len(sections)} sections ...")
    for name, section in sections:
        try:
            checks = section(cache)
        except Exception as e:
            logger.error(f"Verification section {name} - Failed : {type(e).__name__} - {e}")
            checks = [CheckResult.failed(f"section {name}", e)]
        cache.results[name] = checks
        report.extend(checks)
        logger.info(f"Verification section {name} - Completed : {sum(c.passed for c in checks)}/{len(checks)} passed")

    lo, hi, count = PHASE_SWEEP
    K_values = np.linspace(lo, hi, count)
    writer.write_svg(
        "phase",
        phase_figure(K_values, [cubic.solve_b(K) for K in K_values], cubic.critical_constants().K_star),
    )
    for label, run in cache.runs.items():
        slug = label.replace(" ", "_").replace("=", "").replace(",", "_")
        writer.write_csv(f"verify_{slug}_arc", trajectory_frame(run.arc))
    writer.write_report("verify_report", report)
    logger.info(f"Verification suite completed : {report.total_passed}/{report.total_checks} checks passed")
    return report
