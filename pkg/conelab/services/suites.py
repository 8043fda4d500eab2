"""
Property suites: algebraic identities and cone/group geometry.

Each check draws its own random inputs from a generator seeded by the suite
config, evaluates a residual per trial and aggregates the maximum into a
CheckRecord.
"""

import logging
import time
from typing import Callable, List

import numpy as np

from conelab.algebras import Algebra, AlgebraKind, make_algebra
from conelab.cone import (
    ConePoint,
    convexity_profile,
    curvature,
    curvature_bracket,
    finsler_norm,
    geodesic,
    geodesic_between,
    geodesic_velocity,
    killing_flow,
    lie_velocity,
    log_map,
    mu,
    parallel_transport,
    parallel_transport_ode,
    spray,
    thompson_distance,
    transport_curvature_check,
)
from conelab.elements import Element, LinOp
from conelab.errors import ConelabError
from conelab.group import (
    GroupElement,
    covariant_derivative,
    euclidean_metric,
    group_christoffel,
    group_christoffel_closed,
    group_geodesic,
    group_geodesic_body,
    group_parallel_transport,
    group_parallel_transport_ode,
    group_spray,
    group_spray_split,
    random_str,
    transport_convergence_ratio,
)
from conelab.jordan import (
    GaugeFunction,
    GaugeName,
    exp,
    gauge_norm,
    inverse,
    is_invertible,
    jb_norm,
    log,
    quadratic_bilinear_matrix,
    quadratic_matrix,
    random_element,
    random_positive,
    spectral_decompose,
    spectrum,
)
from conelab.models import SuiteConfig, SuiteName, SuiteReport
from conelab.operators import (
    dagger,
    derivation_residual,
    in_structure_algebra,
    is_automorphism,
    op_exp,
    op_norm,
    random_derivation,
    sigma_star,
)
from conelab.paths import second_difference

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator], float]

GAUGES = [GaugeFunction.parse(name) for name in ("sup", "lp:1", "lp:2", "kyfan:2")]


def _rel(a: np.ndarray, scale: float = 1.0) -> float:
    return float(np.linalg.norm(a)) / max(scale, 1e-300)


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


class PropertySuite:
    """
    Runs named checks over a number of seeded trials.

    Subclasses list (name, method, cap) in CHECKS; cap bounds the trial count of
    expensive checks (None means uncapped).
    """

    SUITE = SuiteName.IDENTITIES
    CHECKS: List = []

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.algebra: Algebra = make_algebra(config.algebra)

    def applicable(self, name: str) -> bool:
        return True

    def run(self) -> SuiteReport:
        report = SuiteReport(suite=self.SUITE, config=self.config)
        started = time.perf_counter()
        if self.config.trials == 0:
            logger.info(f"{self.SUITE.value}: trials=0, empty report")
            return report
        for index, (name, method, cap) in enumerate(self.CHECKS):
            if not self.applicable(name):
                continue
            # one child stream per check keeps checks independent of each other's draws
            rng = np.random.default_rng([self.config.seed, index])
            trials = self.config.trials if cap is None else min(cap, self.config.trials)
            check: Check = getattr(self, method)
            residuals = [self._trial(name, check, rng) for _ in range(trials)]
            record = report.record(name, residuals)
            verdict = "✅ pass" if record.passed else "❌ FAIL"
            logger.info(
                f"{self.SUITE.value}/{name}: trials={record.trials} "
                f"max_residual={record.max_residual:.3e} threshold={record.threshold:.1e} {verdict}"
            )
        report.wall_time = time.perf_counter() - started
        logger.info(
            f"{self.SUITE.value} on {self.algebra.spec}: "
            f"{'PASS' if report.passed else 'FAIL'} in {report.wall_time:.2f}s"
        )
        return report

    def _trial(self, name: str, check: Check, rng: np.random.Generator) -> float:
        """One residual; a library error inside the check counts as a failed trial."""
        try:
            return check(rng)
        except ConelabError as exc:
            logger.warning(f"{self.SUITE.value}/{name}: trial raised {type(exc).__name__}: {exc}")
            return float("nan")

    # ============= Sampling helpers =============

    def element(self, rng: np.random.Generator, scale: float = 1.0) -> Element:
        return random_element(self.algebra, rng, scale)

    def positive(self, rng: np.random.Generator, scale: float = 0.7) -> ConePoint:
        return ConePoint(random_positive(self.algebra, rng, scale))


class IdentitySuite(PropertySuite):
    """Jordan-core and operator-space identities."""

    SUITE = SuiteName.IDENTITIES
    CHECKS = [
        ("commutativity", "check_commutativity", None),
        ("jordan_identity", "check_jordan_identity", None),
        ("unit", "check_unit", None),
        ("idempotent_system", "check_idempotent_system", None),
        ("spectral_reconstruction", "check_spectral_reconstruction", None),
        ("gauge_invariance", "check_gauge_invariance", None),
        ("gauge_triangle", "check_gauge_triangle", None),
        ("jb_norm_axioms", "check_jb_norm_axioms", None),
        ("invertibility", "check_invertibility", None),
        ("fundamental_formula", "check_fundamental_formula", None),
        ("v_identities", "check_v_identities", None),
        ("cartan_relations", "check_cartan_relations", None),
        ("str_membership", "check_str_membership", 200),
        ("dagger_brackets", "check_dagger_brackets", None),
        ("aut_spectrum", "check_aut_spectrum", None),
        ("orthogonality", "check_orthogonality", 200),
    ]

    def check_commutativity(self, rng) -> float:
        a, b = self.element(rng).coords, self.element(rng).coords
        algebra = self.algebra
        ab = algebra.product(a, b)
        scale = np.linalg.norm(a) * np.linalg.norm(b)
        return max(_rel(ab - algebra.product(b, a), scale), _rel(ab - algebra.generic_product(a, b), scale))

    def check_jordan_identity(self, rng) -> float:
        x, y = self.element(rng).coords, self.element(rng).coords
        p = self.algebra.product
        x2 = p(x, x)
        return _rel(p(x2, p(x, y)) - p(x, p(x2, y)), np.linalg.norm(x) ** 3 * np.linalg.norm(y))

    def check_unit(self, rng) -> float:
        x = self.element(rng).coords
        return _rel(self.algebra.product(self.algebra.unit_coords, x) - x, np.linalg.norm(x))

    def check_idempotent_system(self, rng) -> float:
        spec = spectral_decompose(self.element(rng))
        c = spec.idempotents
        worst = _rel(c.sum(axis=0) - self.algebra.unit_coords)
        for i in range(len(c)):
            for j in range(len(c)):
                target = c[i] if i == j else 0.0
                worst = max(worst, _rel(self.algebra.product(c[i], c[j]) - target))
        return worst

    def check_spectral_reconstruction(self, rng) -> float:
        x = self.element(rng)
        return _rel(spectral_decompose(x).reconstruct().coords - x.coords, 1.0 + x.norm2())

    def check_gauge_invariance(self, rng) -> float:
        values = rng.normal(size=self.algebra.rank)
        moved = rng.permutation(values) * rng.choice([-1.0, 1.0], size=values.size)
        s = float(rng.normal())
        worst = 0.0
        for gauge in GAUGES:
            base = gauge(values)
            worst = max(
                worst,
                abs(gauge(moved) - base) / (1.0 + base),
                abs(gauge(s * values) - abs(s) * base) / (1.0 + abs(s) * base),
            )
        return worst

    def check_gauge_triangle(self, rng) -> float:
        x, y = self.element(rng), self.element(rng)
        rank = self.algebra.rank
        gauges = [
            GaugeFunction(name=GaugeName.LP, p=1.0),
            GaugeFunction(name=GaugeName.LP, p=2.0),
            GaugeFunction(name=GaugeName.KYFAN, k=1),
            GaugeFunction(name=GaugeName.KYFAN, k=rank),
        ]
        worst = 0.0
        for gauge in gauges:
            bound = gauge_norm(x, gauge) + gauge_norm(y, gauge)
            worst = max(worst, (gauge_norm(x + y, gauge) - bound) / max(bound, 1e-300))
        return max(0.0, worst)

    def check_jb_norm_axioms(self, rng) -> float:
        x, y = self.element(rng), self.element(rng)
        nx, ny = jb_norm(x), jb_norm(y)
        x2, y2 = x.circ(x), y.circ(y)
        nx2 = jb_norm(x2)
        return max(
            0.0,
            (jb_norm(x.circ(y)) - nx * ny) / (nx * ny),
            abs(nx2 - nx**2) / nx**2,
            (nx2 - jb_norm(x2 + y2)) / nx2,
        )

    def check_invertibility(self, rng) -> float:
        algebra = self.algebra
        x = self.element(rng)
        ux = quadratic_matrix(algebra, x.coords)
        xinv = inverse(x).coords
        scale = 1.0 + np.linalg.norm(ux) * (1.0 + np.linalg.norm(xinv)) ** 2
        residual = max(
            _rel(ux @ xinv - x.coords, scale),
            _rel(ux @ algebra.product(xinv, xinv) - algebra.unit_coords, scale),
        )
        # dropping one eigenvalue makes both x and U_x singular
        spec = spectral_decompose(x)
        lam = spec.eigenvalues.copy()
        lam[int(rng.integers(lam.size))] = 0.0
        singular = Element(algebra, lam @ spec.idempotents)
        if is_invertible(singular):
            return 1.0
        u_singular = quadratic_matrix(algebra, singular.coords)
        smallest = float(np.linalg.svd(u_singular, compute_uv=False)[-1])
        return max(residual, smallest / (1.0 + np.linalg.norm(u_singular)))

    def check_fundamental_formula(self, rng) -> float:
        x, y = self.element(rng).coords, self.element(rng).coords
        ux, uy = quadratic_matrix(self.algebra, x), quadratic_matrix(self.algebra, y)
        lhs = quadratic_matrix(self.algebra, ux @ y)
        rhs = ux @ uy @ ux
        return _rel(lhs - rhs, np.linalg.norm(ux) ** 2 * np.linalg.norm(uy))

    def check_v_identities(self, rng) -> float:
        algebra = self.algebra
        a, b, z = (self.element(rng).coords for _ in range(3))
        la, lb = algebra.left_mult(a), algebra.left_mult(b)
        lab = algebra.left_mult(algebra.product(a, b))
        v_ab = _commutator(la, lb) + lab
        v_ba = _commutator(lb, la) + lab
        scale = 1.0 + np.linalg.norm(la) * np.linalg.norm(lb)
        # V_{a,b}(z) = U_{a,z}(b)
        u_az = quadratic_bilinear_matrix(algebra, a, z)
        # U_{x^-1} U_{x,b} = V_{x^-1,b} on a cone point x
        x = self.positive(rng).p
        xinv = inverse(x).coords
        lxinv = algebra.left_mult(xinv)
        v_xinv_b = _commutator(lxinv, lb) + algebra.left_mult(algebra.product(xinv, b))
        lhs = quadratic_matrix(algebra, xinv) @ quadratic_bilinear_matrix(algebra, x.coords, b)
        return max(
            _rel(v_ab - v_ba - 2.0 * _commutator(la, lb), scale),
            _rel(v_ab + v_ba - 2.0 * lab, scale),
            _rel(v_ab @ z - u_az @ b, scale * (1.0 + np.linalg.norm(z))),
            _rel(lhs - v_xinv_b, 1.0 + np.linalg.norm(lxinv) * np.linalg.norm(lb)),
        )

    def check_cartan_relations(self, rng) -> float:
        algebra = self.algebra
        a, b = self.element(rng).coords, self.element(rng).coords
        la, lb = algebra.left_mult(a), algebra.left_mult(b)
        d = random_derivation(algebra, rng, terms=2)
        e = random_derivation(algebra, rng, terms=2)
        scale = 1.0 + d.frobenius() * np.linalg.norm(la)
        bracket_ll = LinOp(algebra, _commutator(la, lb))
        bracket_dd = LinOp(algebra, _commutator(d.entries, e.entries))
        return max(
            derivation_residual(bracket_ll, samples=8, seed=rng) / (1.0 + bracket_ll.frobenius()),
            derivation_residual(bracket_dd, samples=8, seed=rng) / (1.0 + bracket_dd.frobenius()),
            _rel(_commutator(d.entries, la) - algebra.left_mult(d.entries @ a), scale),
        )

    def check_str_membership(self, rng) -> float:
        algebra = self.algebra
        h = LinOp(algebra, algebra.left_mult(self.element(rng).coords)) + random_derivation(algebra, rng, terms=2)
        return in_structure_algebra(h, samples=8, seed=rng)

    def check_dagger_brackets(self, rng) -> float:
        algebra = self.algebra

        def member() -> LinOp:
            return LinOp(algebra, algebra.left_mult(self.element(rng).coords)) + random_derivation(algebra, rng, terms=2)

        a, b = member(), member()
        bracket = LinOp(algebra, _commutator(a.entries, b.entries))
        scale = 1.0 + a.frobenius() * b.frobenius()
        flipped = _commutator(dagger(a, check=False).entries, dagger(b, check=False).entries)
        starred = _commutator(sigma_star(a, check=False).entries, sigma_star(b, check=False).entries)
        return max(
            _rel(dagger(bracket, check=False).entries + flipped, scale),
            _rel(sigma_star(bracket, check=False).entries - starred, scale),
        )

    def check_aut_spectrum(self, rng) -> float:
        k = op_exp(random_derivation(self.algebra, rng, terms=2, scale=0.7))
        x = self.element(rng)
        before = spectrum(x)
        return _rel(spectrum(k.apply(x)) - before, 1.0 + np.max(np.abs(before)))

    def check_orthogonality(self, rng) -> float:
        algebra = self.algebra
        lx = LinOp(algebra, algebra.left_mult(self.element(rng).coords))
        d = random_derivation(algebra, rng, terms=2, scale=0.7)
        part_l = op_norm(lx, restarts=4, iterations=0, seed=rng)
        part_d = op_norm(d, restarts=8, iterations=20, seed=rng)
        total = op_norm(lx + d, restarts=32, iterations=50, seed=rng, extra_starts=[part_l.witness, part_d.witness])
        return max(0.0, part_l.lower_bound - total.estimate, part_d.lower_bound - total.estimate)


class GeometrySuite(PropertySuite):
    """Cone and group geometry."""

    SUITE = SuiteName.GEOMETRY
    CHECKS = [
        ("geodesic_ode", "check_geodesic_ode", None),
        ("exp_log", "check_exp_log", None),
        ("transport_ode", "check_transport_ode", 10),
        ("transport_isometry", "check_transport_isometry", None),
        ("curvature_routes", "check_curvature_routes", None),
        ("flat_curvature", "check_flat_curvature", None),
        ("thompson_symmetry", "check_thompson_symmetry", None),
        ("thompson_invariance", "check_thompson_invariance", None),
        ("triangle_inequality", "check_triangle_inequality", None),
        ("symmetric_space", "check_symmetric_space", None),
        ("killing_flow", "check_killing_flow", None),
        ("finsler_invariance", "check_finsler_invariance", None),
        ("curvature_transport", "check_curvature_transport", None),
        ("velocity_identity", "check_velocity_identity", 100),
        ("group_spray_routes", "check_group_spray_routes", None),
        ("group_geodesic_ode", "check_group_geodesic_ode", None),
        ("group_transport", "check_group_transport", 5),
        ("totally_geodesic", "check_totally_geodesic", 50),
        ("transport_rk4_order", "check_transport_rk4_order", 1),
        ("metric_positivity", "check_metric_positivity", None),
        ("metric_compatibility", "check_metric_compatibility", 50),
        ("geodesic_convexity", "check_geodesic_convexity", None),
    ]

    FD_STEP = 1e-4

    def applicable(self, name: str) -> bool:
        if name == "flat_curvature":
            return self.algebra.spec.startswith(AlgebraKind.RN.value)
        return True

    def _tangent(self, rng, scale: float = 0.5) -> Element:
        return self.element(rng, scale)

    def _frame_tangent(self, p: ConePoint, rng, bound: float = 1.0) -> Element:
        """v = U_{p^{1/2}} z with jb_norm(z) <= bound, so exp_p(tv) stays inside the cone for |t| <= 1."""
        z = self.element(rng)
        z = z * (bound / max(bound, jb_norm(z)))
        return Element(self.algebra, p.u_sqrt @ z.coords)

    def check_geodesic_ode(self, rng) -> float:
        p = self.positive(rng)
        v = self._frame_tangent(p, rng)
        t = float(rng.uniform(0.2, 0.8))
        accel = second_difference(lambda s: geodesic(p, v, s).p.coords, t, self.FD_STEP)
        point = geodesic(p, v, t)
        expected = spray(point, geodesic_velocity(p, v, t)).coords
        return _rel(accel - expected, 1.0 + np.linalg.norm(point.p.coords) + np.linalg.norm(expected))

    def check_exp_log(self, rng) -> float:
        p = self.positive(rng)
        v = self._frame_tangent(p, rng)
        q = geodesic(p, v, 1.0)
        x = self.element(rng)
        return max(
            _rel(log_map(p, q).coords - v.coords, 1.0 + v.norm2()),
            _rel(log(exp(x)).coords - x.coords, 1.0 + x.norm2()),
        )

    def check_transport_ode(self, rng) -> float:
        x, y = self.positive(rng), self.positive(rng)
        w = self._tangent(rng)
        t = float(rng.uniform(0.3, 1.0))
        closed = parallel_transport(x, y, t, w).coords
        return _rel(closed - parallel_transport_ode(x, y, t, w).coords, 1.0 + np.linalg.norm(closed))

    def check_transport_isometry(self, rng) -> float:
        x, y = self.positive(rng), self.positive(rng)
        w = self._tangent(rng)
        t = float(rng.uniform(0.0, 1.0))
        moved = parallel_transport(x, y, t, w)
        base = finsler_norm(x, w)
        return abs(finsler_norm(geodesic_between(x, y, t), moved) - base) / (1.0 + base)

    def check_curvature_routes(self, rng) -> float:
        p = self.positive(rng)
        v, w, z = (self._tangent(rng) for _ in range(3))
        first = curvature(p, v, w, z).coords
        return _rel(first - curvature_bracket(p, v, w, z).coords, 1.0 + np.linalg.norm(first))

    def check_flat_curvature(self, rng) -> float:
        p = self.positive(rng)
        v, w, z = (self._tangent(rng) for _ in range(3))
        return _rel(curvature(p, v, w, z).coords)

    def check_thompson_symmetry(self, rng) -> float:
        p, q = self.positive(rng), self.positive(rng)
        forward = thompson_distance(p, q)
        return abs(forward - thompson_distance(q, p)) / (1.0 + forward)

    def check_thompson_invariance(self, rng) -> float:
        p, q = self.positive(rng), self.positive(rng)
        u = quadratic_matrix(self.algebra, self.element(rng).coords)
        moved_p = ConePoint(Element(self.algebra, u @ p.p.coords))
        moved_q = ConePoint(Element(self.algebra, u @ q.p.coords))
        base = thompson_distance(p, q)
        return abs(thompson_distance(moved_p, moved_q) - base) / (1.0 + base)

    def check_triangle_inequality(self, rng) -> float:
        p, q, r = self.positive(rng), self.positive(rng), self.positive(rng)
        return max(0.0, thompson_distance(p, r) - thompson_distance(p, q) - thompson_distance(q, r))

    def check_symmetric_space(self, rng) -> float:
        x, y, z = self.positive(rng), self.positive(rng), self.positive(rng)
        algebra = self.algebra
        xy = mu(x, y)
        scale = 1.0 + xy.norm2()
        u = quadratic_matrix(algebra, self.positive(rng).p.coords)
        moved = mu(Element(algebra, u @ x.p.coords), Element(algebra, u @ y.p.coords)).coords
        return max(
            _rel(mu(x, x).coords - x.p.coords, 1.0 + x.p.norm2()),
            _rel(mu(x, xy).coords - y.p.coords, 1.0 + y.p.norm2()),
            _rel(mu(x, mu(y, z)).coords - mu(xy, mu(x, z)).coords, scale * (1.0 + mu(y, z).norm2())),
            _rel(moved - u @ xy.coords, 1.0 + np.linalg.norm(u) * xy.norm2()),
        )

    def check_killing_flow(self, rng) -> float:
        x = self.element(rng, 0.5)
        a, b = self.positive(rng), self.positive(rng)
        t, s = (float(value) for value in rng.uniform(-1.0, 1.0, size=2))
        joint = killing_flow(x, a, t + s).p.coords
        chained = killing_flow(x, killing_flow(x, a, s), t).p.coords
        flowed = killing_flow(x, mu(a, b), t).p.coords
        paired = mu(killing_flow(x, a, t), killing_flow(x, b, t)).coords
        return max(
            _rel(joint - chained, 1.0 + np.linalg.norm(joint)),
            _rel(flowed - paired, 1.0 + np.linalg.norm(flowed)),
        )

    def check_finsler_invariance(self, rng) -> float:
        algebra = self.algebra
        p, v = self.positive(rng), self._tangent(rng)
        u = quadratic_matrix(algebra, self.positive(rng).p.coords)
        moved_p = ConePoint(Element(algebra, u @ p.p.coords))
        moved_v = Element(algebra, u @ v.coords)
        worst = 0.0
        for gauge in GAUGES:
            base = finsler_norm(p, v, gauge)
            worst = max(worst, abs(finsler_norm(moved_p, moved_v, gauge) - base) / (1.0 + base))
        return worst

    def check_curvature_transport(self, rng) -> float:
        x, y = self.positive(rng), self.positive(rng)
        v, w, z = (self._tangent(rng) for _ in range(3))
        return transport_curvature_check(x, y, float(rng.uniform(0.0, 1.0)), v, w, z)

    def check_geodesic_convexity(self, rng) -> float:
        a, b, c, d = (self.positive(rng) for _ in range(4))
        profile = np.asarray(convexity_profile(a, b, c, d, np.linspace(0.0, 1.0, 11)))
        # midpoint convexity at the 9 interior nodes
        excess = profile[1:-1] - 0.5 * (profile[:-2] + profile[2:])
        return max(0.0, float(excess.max())) / (1.0 + float(profile.max()))

    def check_velocity_identity(self, rng) -> float:
        gamma, dgamma = self.element(rng, 0.7), self.element(rng, 0.7)
        quad = lie_velocity(gamma, dgamma, "quadrature").coords
        direct = lie_velocity(gamma, dgamma, "direct").coords
        return _rel(quad - direct, 1.0 + np.linalg.norm(quad))

    def check_group_spray_routes(self, rng) -> float:
        algebra = self.algebra
        g = GroupElement.exp(random_str(algebra, rng, 0.5))
        v, w = random_str(algebra, rng), random_str(algebra, rng)
        spray_a = group_spray(g, v, check=False).entries
        spray_b = group_spray_split(g, v, check=False).entries
        chris_a = group_christoffel(g, v, w, check=False).entries
        chris_b = group_christoffel_closed(g, v, w).entries
        scale = 1.0 + np.linalg.norm(g.op.entries) * np.linalg.norm(v.entries) * np.linalg.norm(w.entries)
        return max(_rel(spray_a - spray_b, scale), _rel(chris_a - chris_b, scale))

    def _group_geodesic_data(self, rng):
        algebra = self.algebra
        g = GroupElement.exp(random_str(algebra, rng, 0.3))
        x = self.element(rng, 0.5)
        d = random_derivation(algebra, rng, terms=2, scale=0.5)
        return g, x, d

    def check_group_geodesic_ode(self, rng) -> float:
        g, x, d = self._group_geodesic_data(rng)
        t = float(rng.uniform(0.2, 0.8))
        accel = second_difference(lambda s: group_geodesic(g, x, d, s, check=False).op.entries, t, self.FD_STEP)
        gamma = group_geodesic(g, x, d, t)
        body = LinOp(self.algebra, group_geodesic_body(x, d, t))
        expected = group_spray(gamma, body, check=False).entries
        return _rel(accel - expected, 1.0 + np.linalg.norm(expected))

    def check_group_transport(self, rng) -> float:
        g, x, d = self._group_geodesic_data(rng)
        mu0 = g.op @ random_str(self.algebra, rng, 0.5)
        t = float(rng.uniform(0.3, 1.0))
        closed = group_parallel_transport(g, x, d, t, mu0).entries
        oracle = group_parallel_transport_ode(g, x, d, t, mu0).entries
        return _rel(closed - oracle, 1.0 + np.linalg.norm(closed))

    def check_totally_geodesic(self, rng) -> float:
        algebra = self.algebra
        d = random_derivation(algebra, rng, terms=2, scale=0.5)
        t = float(rng.uniform(0.0, 1.0))
        k = GroupElement.exp(random_derivation(algebra, rng, terms=2, scale=0.5))
        in_aut = group_geodesic(k, Element.zero(algebra), d, t, check=False).op
        g, x, d = self._group_geodesic_data(rng)
        in_cone_group = group_geodesic(g, x, d, t, check=False)
        return max(is_automorphism(in_aut, samples=8, seed=rng), in_cone_group.cone_residual(samples=4, seed=rng))

    def check_transport_rk4_order(self, rng) -> float:
        g, x, d = self._group_geodesic_data(rng)
        mu0 = g.op @ random_str(self.algebra, rng, 0.5)
        ratio = transport_convergence_ratio(g, x, d, 1.0, mu0, steps=4)
        return abs(ratio / 16.0 - 1.0)

    def check_metric_positivity(self, rng) -> float:
        v = random_str(self.algebra, rng)
        value = euclidean_metric(GroupElement.identity(self.algebra), v, v, check=False)
        return max(0.0, -value / max(v.frobenius() ** 2, 1e-300))

    def check_metric_compatibility(self, rng) -> float:
        algebra = self.algebra
        g, x, d = self._group_geodesic_data(rng)
        a0, a1, b0, b1 = (random_str(algebra, rng, 0.5).entries for _ in range(4))
        identity = GroupElement.identity(algebra)
        h = self.FD_STEP

        def inner(s: float) -> float:
            return euclidean_metric(
                identity, LinOp(algebra, a0 + s * a1), LinOp(algebra, b0 + s * b1), check=False
            )

        t = float(rng.uniform(0.2, 0.8))
        lhs = (inner(t + h) - inner(t - h)) / (2.0 * h)
        gamma = group_geodesic(g, x, d, t, check=False).op
        dgamma = gamma @ LinOp(algebra, group_geodesic_body(x, d, t))
        mu, eta = gamma @ LinOp(algebra, a0 + t * a1), gamma @ LinOp(algebra, b0 + t * b1)
        dmu = dgamma @ LinOp(algebra, a0 + t * a1) + gamma @ LinOp(algebra, a1)
        deta = dgamma @ LinOp(algebra, b0 + t * b1) + gamma @ LinOp(algebra, b1)
        ginv = gamma.inverse()
        body_dmu = ginv @ covariant_derivative(gamma, dgamma, mu, dmu)
        body_deta = ginv @ covariant_derivative(gamma, dgamma, eta, deta)
        rhs = euclidean_metric(identity, body_dmu, LinOp(algebra, b0 + t * b1), check=False) + euclidean_metric(
            identity, LinOp(algebra, a0 + t * a1), body_deta, check=False
        )
        return abs(lhs - rhs) / (1.0 + abs(lhs))


def run_identities(config: SuiteConfig) -> SuiteReport:
    """Jordan-core and operator-space invariants."""
    return IdentitySuite(config).run()


def run_geometry(config: SuiteConfig) -> SuiteReport:
    """Cone and group geometry invariants."""
    return GeometrySuite(config).run()
