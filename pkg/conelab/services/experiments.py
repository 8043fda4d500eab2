"""
Competitor-path and lift experiments.

Minimality compares geodesic lengths against endpoint-preserving sine
perturbations under several norms; the lift experiment integrates horizontal
lifts of random smooth cone paths; explore tabulates G(Omega) competitors of a
one-parameter automorphism group without a verdict.
"""

import logging
import math
import time
from typing import List, Optional, Sequence, Tuple

import numpy as np

from conelab.algebras import Algebra, make_algebra
from conelab.cone import ConePoint, competitor_path, relative_log, thompson_distance
from conelab.config import get_settings
from conelab.elements import Element, LinOp
from conelab.errors import HypothesisViolationError
from conelab.group import (
    GroupElement,
    LiftResult,
    geodesic_lift,
    geodesic_path,
    group_competitor_path,
    group_path_length,
    horizontal_lift,
    one_parameter_path,
    quotient_norm_sandwich,
    random_str,
)
from conelab.jordan import GaugeFunction, gauge_norm, jb_norm, random_element, random_positive, spectral_decompose
from conelab.models import ExploreRow, LiftRow, MarginRow, SuiteConfig, SuiteName, SuiteReport
from conelab.operators import op_norm, random_derivation
from conelab.paths import SampledPath, simpson

logger = logging.getLogger(__name__)

CONE_NORMS = ("sup", "lp:1", "lp:2", "kyfan:{k}")


def _gauges(algebra: Algebra) -> List[GaugeFunction]:
    k = max(1, algebra.rank - 1)
    return [GaugeFunction.parse(name.format(k=k)) for name in CONE_NORMS]


def _unit_direction(algebra: Algebra, rng: np.random.Generator) -> Element:
    w = random_element(algebra, rng)
    return w / jb_norm(w)


def _clipped(amplitudes: np.ndarray, bound: float) -> np.ndarray:
    """Rescale so that ||a|| <= bound."""
    norm = float(np.linalg.norm(amplitudes))
    return amplitudes if norm <= bound else amplitudes * (bound / norm)


def _amplitudes(rng: np.random.Generator, modes: int, floor: float = 0.05, ceiling: float = 0.4) -> np.ndarray:
    """Amplitudes bounded away from zero so every competitor is a genuine perturbation."""
    return rng.uniform(floor, ceiling, modes) * rng.choice([-1.0, 1.0], modes)


def competitor_lengths(path, gauges: Sequence[GaugeFunction]) -> List[float]:
    """Lengths of one sampled cone path under several gauges, sharing one spectrum per sample."""
    speeds = np.empty((len(gauges), path.grid.size))
    for i, t in enumerate(path.grid):
        # ConePoint rejects samples outside the cone
        pulled = Element(path.algebra, ConePoint(path.point(t)).u_inv_sqrt @ path.velocity(t).coords)
        eigenvalues = spectral_decompose(pulled).eigenvalues
        for j, gauge in enumerate(gauges):
            speeds[j, i] = gauge(eigenvalues)
    return [float(simpson(row)) for row in speeds]


# ============= Minimality =============

def minimality_rows(
    config: SuiteConfig, intervals: Optional[int] = None
) -> Tuple[List[MarginRow], List[MarginRow]]:
    """
    Cone and group margin rows.

    Cone: for each of the configured endpoint pairs, `trials` sine-perturbed competitors
    of the geodesic, each measured in every gauge. Group: per pair, competitors of
    t -> e^{tL_v} obtained by right-multiplying exp of sinusoidal str elements.
    """
    settings = get_settings()
    intervals = settings.minimality_intervals if intervals is None else intervals
    algebra = make_algebra(config.algebra)
    rng = np.random.default_rng(config.seed)
    gauges = _gauges(algebra)
    cone_rows: List[MarginRow] = []
    group_rows: List[MarginRow] = []
    trial = 0
    for pair in range(settings.minimality_pairs):
        base = ConePoint(random_positive(algebra, rng, 0.5))
        v = random_element(algebra, rng, 0.6)
        z = Element(algebra, base.u_inv_sqrt @ v.coords)
        geodesic_lengths = [gauge_norm(z, gauge) for gauge in gauges]
        bound = jb_norm(z)
        for _ in range(config.trials):
            modes = settings.sine_modes
            path = competitor_path(
                base,
                v,
                _clipped(_amplitudes(rng, modes), bound),
                [_unit_direction(algebra, rng) for _ in range(modes)],
                intervals=intervals,
            )
            for gauge, geo, comp in zip(gauges, geodesic_lengths, competitor_lengths(path, gauges)):
                cone_rows.append(MarginRow(trial=trial, norm=gauge.label, length_geodesic=geo,
                                           length_competitor=comp, margin=comp - geo))
            trial += 1

        lv = LinOp(algebra, algebra.left_mult(z.coords))
        for _ in range(min(config.trials, settings.group_competitors)):
            modes = 2
            path = group_competitor_path(
                lv,
                _clipped(_amplitudes(rng, modes, 0.05, 0.3), bound),
                [random_str(algebra, rng, 0.5) for _ in range(modes)],
            )
            comp = group_path_length(path, restarts=settings.group_norm_restarts, iterations=30, seed=rng)
            geo = bound
            group_rows.append(MarginRow(trial=pair, norm="group", length_geodesic=geo,
                                        length_competitor=comp, margin=comp - geo))
    return cone_rows, group_rows


def run_minimality(config: SuiteConfig) -> Tuple[SuiteReport, List[MarginRow]]:
    """Geodesic minimality in Omega for every gauge, and of e^{tL_v} in G(Omega)."""
    started = time.perf_counter()
    report = SuiteReport(suite=SuiteName.MINIMALITY, config=config)
    if config.trials == 0:
        return report, []
    cone_rows, group_rows = minimality_rows(config)
    report.record("geodesic_minimality", [max(0.0, -row.margin) for row in cone_rows])
    report.record("group_minimality", [max(0.0, -row.margin) for row in group_rows])
    for record in report.records:
        logger.info(f"minimality/{record.name}: competitors={record.trials} "
                    f"worst deficit={record.max_residual:.3e} {'✅' if record.passed else '❌'}")
    if cone_rows:
        logger.info(f"minimality: min cone margin {min(r.margin for r in cone_rows):.6e}")
    report.wall_time = time.perf_counter() - started
    rows = sorted(cone_rows + group_rows, key=lambda r: (r.norm == "group", r.trial))
    return report, rows


# ============= Lifts =============

def random_smooth_path(algebra: Algebra, rng: np.random.Generator, intervals: int = 64) -> SampledPath:
    """Cone path t -> U_{b^{1/2}} exp(t z + sum a_j sin(j pi t) w_j) with analytic velocity."""
    base = ConePoint(random_positive(algebra, rng, 0.5))
    v = random_element(algebra, rng, 0.5)
    modes = 2
    return competitor_path(
        base, v, _amplitudes(rng, modes, 0.05, 0.3), [_unit_direction(algebra, rng) for _ in range(modes)], intervals
    )


def geodesic_lift_residual(x: ConePoint, y: ConePoint, result: LiftResult) -> float:
    """Max relative gap between an integrated lift of alpha_{x,y} and U_{x^{1/2}} e^{t L_z}."""
    z = relative_log(x, y)
    worst = 0.0
    for t, lift in zip(result.times, result.lift):
        closed = geodesic_lift(x, z, float(t)).entries
        worst = max(worst, float(np.linalg.norm(lift - closed) / (1.0 + np.linalg.norm(closed))))
    return worst


def run_lift(
    config: SuiteConfig,
    max_paths: int = 20,
    max_pairs: int = 5,
    steps: Optional[int] = None,
) -> Tuple[SuiteReport, List[LiftRow]]:
    """Horizontal lifts of random cone paths, the geodesic closed form and the quotient checks."""
    started = time.perf_counter()
    settings = get_settings()
    algebra = make_algebra(config.algebra)
    report = SuiteReport(suite=SuiteName.LIFT, config=config)
    rows: List[LiftRow] = []
    if config.trials == 0:
        return report, rows
    rng = np.random.default_rng(config.seed)

    horizontality, automorphism, projection, isometry = [], [], [], []
    for trial in range(min(config.trials, max_paths)):
        result = horizontal_lift(random_smooth_path(algebra, rng), steps=steps)
        horizontality.append(float(result.horizontality_residuals.max()))
        automorphism.append(float(result.automorphism_residuals.max()))
        projection.append(result.lift_residual)
        isometry.append(abs(result.length - result.base_length))
        rows.extend(
            LiftRow(trial=trial, t=t, horizontality_residual=h, automorphism_residual=a, speed_estimate=s)
            for t, h, a, s in result.to_rows()
        )
        logger.debug(f"lift trial {trial}: length={result.length:.9f} base={result.base_length:.9f}")

    closed_form, sandwich, quotient = [], [], []
    for _ in range(min(config.trials, max_pairs)):
        x = ConePoint(random_positive(algebra, rng, 0.5))
        y = ConePoint(random_positive(algebra, rng, 0.5))
        result = horizontal_lift(geodesic_path(x, y), steps=steps)
        closed_form.append(geodesic_lift_residual(x, y, result))
        # the lift of alpha_{x,y} is an explicit path between the fibers over x and y
        sandwich.append(abs(result.length - thompson_distance(x, y)))

        g = GroupElement.exp(random_str(algebra, rng, 0.3))
        tangent = g.op @ random_str(algebra, rng, 0.5)
        check = quotient_norm_sandwich(g, tangent, samples=settings.quotient_samples, seed=rng)
        quotient.append(max(
            max(0.0, check.closed_form - check.min_lower_bound),
            abs(check.attained - check.closed_form) / (1.0 + check.closed_form),
        ))

    report.record("lift_horizontality", horizontality)
    report.record("lift_automorphism", automorphism)
    report.record("lift_projection", projection)
    report.record("lift_isometry", isometry)
    report.record("geodesic_lift", closed_form)
    report.record("quotient_sandwich", sandwich)
    report.record("quotient_norm", quotient)
    for record in report.records:
        logger.info(f"lift/{record.name}: trials={record.trials} max_residual={record.max_residual:.3e} "
                    f"{'✅' if record.passed else '❌'}")
    report.wall_time = time.perf_counter() - started
    return report, rows


# ============= Open question =============

def scaled_derivation(algebra: Algebra, rng: np.random.Generator, scale: float) -> LinOp:
    """Random inner derivation rescaled so its op_norm estimate equals scale."""
    if scale >= math.pi / 2:
        raise HypothesisViolationError(
            f"--scale {scale} violates the hypothesis ||D|| < pi/2 for one-parameter groups in Aut"
        )
    d = random_derivation(algebra, rng, terms=2)
    if scale == 0.0:
        return d * 0.0
    norm = op_norm(d, seed=rng).estimate
    if norm == 0.0:
        raise HypothesisViolationError(f"{algebra.spec} has no nonzero inner derivations to scale")
    return d * (scale / norm)


def explore_open_question(config: SuiteConfig) -> List[ExploreRow]:
    """
    Tabulate lengths of G(Omega) paths joining 1 and e^D against the length of e^{tD}.

    Rows carry no verdict; a negative margin is data, not a failure.
    """
    settings = get_settings()
    algebra = make_algebra(config.algebra)
    rng = np.random.default_rng(config.seed)
    d = scaled_derivation(algebra, rng, config.scale)
    reference = group_path_length(one_parameter_path(d), seed=rng)
    rows = [ExploreRow(competitor=0, length=reference, margin=0.0)]
    count = config.trials if config.trials else settings.group_competitors
    for competitor in range(1, count + 1):
        modes = 2
        path = group_competitor_path(
            d,
            config.scale * _amplitudes(rng, modes, 0.02, 0.2),
            [random_str(algebra, rng, 0.5) for _ in range(modes)],
        )
        length = group_path_length(path, restarts=settings.group_norm_restarts, iterations=30, seed=rng)
        rows.append(ExploreRow(competitor=competitor, length=length, margin=length - reference))
    logger.info(
        f"explore on {algebra.spec}: ||D||~{config.scale:g}, reference length {reference:.9f}, "
        f"min margin {min(r.margin for r in rows[1:]) if len(rows) > 1 else 0.0:.3e}"
    )
    return rows
