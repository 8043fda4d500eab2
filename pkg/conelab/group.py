"""
Geometry of the structure group and of G(Omega).

Tangent vectors at g are written g V with the body V in str = L + der.
The module covers the left-invariant spray, group geodesics and parallel
transport, the Euclidean metric, the left-invariant Finsler norm, the quotient
map g -> g(1), and horizontal lifts of cone paths.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from conelab.algebras import Algebra
from conelab.config import get_settings
from conelab.cone import ConePoint, finsler_norm, thompson_distance
from conelab.elements import Element, LinOp, check_same_algebra
from conelab.errors import LiftDivergenceError, NotADerivationError, StructureResidualError
from conelab.jordan import Seed, as_rng, exp, jb_norm, quadratic_matrix, spectral_decompose
from conelab.operators import (
    STR_TOLERANCE,
    OpNormEstimate,
    derivation_residual,
    expm_array,
    in_structure_algebra,
    is_automorphism,
    op_norm,
    random_derivation,
    split_arrays,
    split_str,
)
from conelab.paths import SampledPath, rk4, simpson

logger = logging.getLogger(__name__)

DERIVATION_TOLERANCE = 1e-8


def _bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def require_derivation(d: LinOp, tolerance: float = DERIVATION_TOLERANCE) -> None:
    """Raise NotADerivationError unless D(1) = 0 and D is a derivation."""
    scale = 1.0 + d.frobenius()
    residual = max(
        derivation_residual(d) / scale,
        float(np.linalg.norm(d.entries @ d.algebra.unit_coords)) / scale,
    )
    if residual > tolerance:
        raise NotADerivationError(residual, tolerance)


def random_str(algebra: Algebra, seed: Seed = None, scale: float = 1.0) -> LinOp:
    """L_a + D with a random element and a random inner derivation."""
    rng = as_rng(seed)
    la = algebra.left_mult(rng.normal(0.0, scale, algebra.dim))
    return LinOp(algebra, la) + random_derivation(algebra, rng, terms=2, scale=np.sqrt(scale))


# ============= Group elements =============

@dataclass(frozen=True, eq=False)
class GroupElement:
    """Invertible operator g with cached inverse."""

    op: LinOp

    @classmethod
    def identity(cls, algebra: Algebra) -> "GroupElement":
        return cls(LinOp.identity(algebra))

    @classmethod
    def exp(cls, h: LinOp) -> "GroupElement":
        return cls(LinOp(h.algebra, expm_array(h.entries)))

    @property
    def algebra(self) -> Algebra:
        return self.op.algebra

    @cached_property
    def inverse(self) -> LinOp:
        return self.op.inverse()

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.op @ other.op)

    def cone_residual(self, samples: int = 16, seed: Seed = None) -> float:
        """Worst relative negativity of g(p) over random positive p; zero on G(Omega)."""
        rng = as_rng(get_settings().residual_seed if seed is None else seed)
        worst = 0.0
        for _ in range(samples):
            p = exp(Element(self.algebra, rng.normal(size=self.algebra.dim)))
            spec = spectral_decompose(self.op.apply(p))
            worst = max(worst, max(0.0, -float(spec.eigenvalues[-1])) / max(spec.max_abs, 1e-300))
        return worst


@dataclass(frozen=True, eq=False)
class GroupTangent:
    """Tangent vector g V at g with body V in str."""

    base: GroupElement
    body: LinOp

    def __post_init__(self):
        check_same_algebra(self.base.op, self.body)
        residual = in_structure_algebra(self.body)
        if residual > STR_TOLERANCE:
            raise StructureResidualError(residual, STR_TOLERANCE)

    @cached_property
    def split(self):
        return split_str(self.body)

    @property
    def vector(self) -> LinOp:
        return self.base.op @ self.body


# ============= Spray and connection =============

def _dagger_array(algebra: Algebra, v: np.ndarray) -> np.ndarray:
    x, d = split_arrays(algebra, v)
    return algebra.left_mult(x) - d


def spray_body(algebra: Algebra, v: np.ndarray) -> np.ndarray:
    """V^2 + V^dagger V - V V^dagger."""
    vd = _dagger_array(algebra, v)
    return v @ v + vd @ v - v @ vd


def christoffel_body(algebra: Algebra, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Polarization of the spray body."""
    return 0.5 * (spray_body(algebra, v + w) - spray_body(algebra, v) - spray_body(algebra, w))


def _gate(v: LinOp, check: bool) -> None:
    if check:
        residual = in_structure_algebra(v)
        if residual > STR_TOLERANCE:
            raise StructureResidualError(residual, STR_TOLERANCE)


def group_spray(g: GroupElement, v: LinOp, check: bool = True) -> LinOp:
    """F_g(gV) = g(V^2 + [V^dagger, V])."""
    _gate(v, check)
    return g.op @ LinOp(v.algebra, spray_body(v.algebra, v.entries))


def group_spray_split(g: GroupElement, v: LinOp, check: bool = True) -> LinOp:
    """The same spray written as g((L_x + D)^2 - 2 L_{Dx})."""
    _gate(v, check)
    algebra = v.algebra
    x, d = split_arrays(algebra, v.entries)
    body = v.entries @ v.entries - 2.0 * algebra.left_mult(d @ x)
    return g.op @ LinOp(algebra, body)


def group_christoffel(g: GroupElement, v: LinOp, w: LinOp, check: bool = True) -> LinOp:
    """Christoffel operator by polarization of the spray."""
    _gate(v, check)
    _gate(w, check)
    return g.op @ LinOp(v.algebra, christoffel_body(v.algebra, v.entries, w.entries))


def group_christoffel_closed(g: GroupElement, v: LinOp, w: LinOp) -> LinOp:
    """Term-by-term form for V = L_x + D, W = L_y + d."""
    algebra = check_same_algebra(v, w)
    x, big_d = split_arrays(algebra, v.entries)
    y, small_d = split_arrays(algebra, w.entries)
    lx, ly = algebra.left_mult(x), algebra.left_mult(y)
    body = 0.5 * (
        ly @ lx + lx @ ly
        + 3.0 * lx @ small_d + 3.0 * ly @ big_d
        - big_d @ ly - small_d @ lx
        + small_d @ big_d + big_d @ small_d
    )
    return g.op @ LinOp(algebra, body)


def covariant_derivative(gamma: LinOp, dgamma: LinOp, mu: LinOp, dmu: LinOp) -> LinOp:
    """D_t mu = mu' - Gamma_gamma(gamma', mu) along a group path."""
    algebra = gamma.algebra
    ginv = np.linalg.inv(gamma.entries)
    v, a = ginv @ dgamma.entries, ginv @ mu.entries
    return LinOp(algebra, dmu.entries - gamma.entries @ christoffel_body(algebra, v, a))


# ============= Geodesics and transport =============

def group_geodesic(g: GroupElement, x: Element, d: LinOp, t: float, check: bool = True) -> GroupElement:
    """gamma(t) = g e^{t(L_x - D)} e^{2tD}."""
    if check:
        require_derivation(d)
    algebra = check_same_algebra(x, d)
    lx = algebra.left_mult(x.coords)
    return GroupElement(
        g.op @ LinOp(algebra, expm_array(t * (lx - d.entries)) @ expm_array(2.0 * t * d.entries))
    )


def group_geodesic_body(x: Element, d: LinOp, t: float) -> np.ndarray:
    """gamma^-1 gamma' = e^{-2tD}(L_x - D)e^{2tD} + 2D."""
    algebra = x.algebra
    lx = algebra.left_mult(x.coords)
    rot = expm_array(2.0 * t * d.entries)
    rot_inv = expm_array(-2.0 * t * d.entries)
    return rot_inv @ (lx - d.entries) @ rot + 2.0 * d.entries


def transport_generator(x0: Element, d0: LinOp) -> np.ndarray:
    """
    Matrix M on row-major vec of d x d operators, in the frame rotating with e^{2t ad d0}.

    On eps = L_z + E: L-part' = (1/2)([d0, L_z] + [L_{x0}, E]),
    der-part' = (1/2)(-[L_{x0}, L_z] + 3[d0, E]).
    """
    algebra = check_same_algebra(x0, d0)
    n = algebra.dim
    ly0 = algebra.left_mult(x0.coords)
    dd = d0.entries
    columns = []
    for k in range(n * n):
        basis = np.zeros(n * n)
        basis[k] = 1.0
        z, e = split_arrays(algebra, basis.reshape(n, n))
        lz = algebra.left_mult(z)
        image = 0.5 * (_bracket(dd, lz) + _bracket(ly0, e)) + 0.5 * (-_bracket(ly0, lz) + 3.0 * _bracket(dd, e))
        columns.append(image.reshape(-1))
    return np.column_stack(columns)


def group_parallel_transport(
    g: GroupElement, x0: Element, d0: LinOp, t: float, mu0: LinOp, check: bool = True
) -> LinOp:
    """
    Transport of mu0 along the geodesic from g with body L_{x0} + d0.

    mu_t = gamma_t e^{-2t ad d0}(e^{tM} g^-1 mu0).
    """
    if check:
        require_derivation(d0)
    algebra = check_same_algebra(x0, d0, mu0)
    n = algebra.dim
    eps0 = (g.inverse.entries @ mu0.entries).reshape(-1)
    eps_t = (expm_array(t * transport_generator(x0, d0)) @ eps0).reshape(n, n)
    rot = expm_array(2.0 * t * d0.entries)
    body = expm_array(-2.0 * t * d0.entries) @ eps_t @ rot
    gamma = group_geodesic(g, x0, d0, t, check=False)
    return LinOp(algebra, gamma.op.entries @ body)


def transport_body_rhs(algebra: Algebra, a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coupled system for the body A = L_x + D along velocity body V = L_y + d."""
    x, big_d = split_arrays(algebra, a)
    y, small_d = split_arrays(algebra, v)
    lx, ly = algebra.left_mult(x), algebra.left_mult(y)
    l_part = -1.5 * _bracket(small_d, lx) + 0.5 * _bracket(ly, big_d)
    der_part = -0.5 * _bracket(ly, lx) - 0.5 * _bracket(small_d, big_d)
    return l_part + der_part


def group_parallel_transport_ode(
    g: GroupElement, x0: Element, d0: LinOp, t: float, mu0: LinOp, steps: Optional[int] = None
) -> LinOp:
    """RK4 oracle for group_parallel_transport."""
    algebra = check_same_algebra(x0, d0, mu0)
    n = algebra.dim
    steps = get_settings().rk4_steps if steps is None else steps
    a0 = g.inverse.entries @ mu0.entries
    if t == 0.0:
        return mu0

    def rhs(s: float, state: np.ndarray) -> np.ndarray:
        v = group_geodesic_body(x0, d0, s)
        return transport_body_rhs(algebra, state.reshape(n, n), v).reshape(-1)

    final = rk4(rhs, a0.reshape(-1), 0.0, t, steps)[-1].reshape(n, n)
    gamma = group_geodesic(g, x0, d0, t, check=False)
    return LinOp(algebra, gamma.op.entries @ final)


def transport_convergence_ratio(
    g: GroupElement, x0: Element, d0: LinOp, t: float, mu0: LinOp, steps: int = 16
) -> float:
    """Error ratio of RK4 at steps and 2*steps against the closed form (about 16 for fourth order)."""
    exact = group_parallel_transport(g, x0, d0, t, mu0, check=False).entries
    coarse = np.linalg.norm(group_parallel_transport_ode(g, x0, d0, t, mu0, steps).entries - exact)
    fine = np.linalg.norm(group_parallel_transport_ode(g, x0, d0, t, mu0, 2 * steps).entries - exact)
    return float(coarse / fine) if fine > 0.0 else float("inf")


# ============= Metrics =============

def euclidean_metric(g: GroupElement, v: LinOp, w: LinOp, check: bool = True) -> float:
    """
    <gV, gW>_g = Tr(L_x L_y) - Tr(D E) for bodies V = L_x + D, W = L_y + E in str.

    The metric is left-invariant, so g only fixes the base point.
    """
    _gate(v, check)
    _gate(w, check)
    algebra = check_same_algebra(g.op, v, w)
    x, big_d = split_arrays(algebra, v.entries)
    y, big_e = split_arrays(algebra, w.entries)
    return float(np.trace(algebra.left_mult(x) @ algebra.left_mult(y)) - np.trace(big_d @ big_e))


def finsler_norm_at(g: GroupElement, h: LinOp, **kwargs) -> OpNormEstimate:
    """||H||_g = ||g^-1 H|| in the operator sup-norm."""
    return op_norm(LinOp(h.algebra, g.inverse.entries @ h.entries), **kwargs)


@dataclass(frozen=True, eq=False)
class GroupPath:
    """Curve t -> g(t) on [0, 1] with optional analytic body g^-1 g'."""

    algebra: Algebra
    element_fn: Callable[[float], np.ndarray]
    body_fn: Optional[Callable[[float], np.ndarray]] = None
    intervals: Optional[int] = None
    fd_step: Optional[float] = None

    def __post_init__(self):
        settings = get_settings()
        if self.intervals is None:
            object.__setattr__(self, "intervals", settings.group_simpson_intervals)
        if self.fd_step is None:
            object.__setattr__(self, "fd_step", settings.fd_step)

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.intervals + 1)

    def element(self, t: float) -> np.ndarray:
        return self.element_fn(float(t))

    def body(self, t: float) -> np.ndarray:
        if self.body_fn is not None:
            return self.body_fn(float(t))
        h = self.fd_step
        derivative = (self.element_fn(t + h) - self.element_fn(t - h)) / (2.0 * h)
        return np.linalg.solve(self.element_fn(t), derivative)


def one_parameter_path(h: LinOp, intervals: Optional[int] = None) -> GroupPath:
    """t -> e^{tH} with constant body H."""
    return GroupPath(h.algebra, lambda t: expm_array(t * h.entries), lambda t: h.entries, intervals)


def _exp_with_derivative(s: np.ndarray, ds: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """e^S and d/dt e^S from the block exponential [[S, S'], [0, S]]."""
    n = s.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = s
    block[n:, n:] = s
    block[:n, n:] = ds
    e = expm_array(block)
    return e[:n, :n], e[:n, n:]


def group_competitor_path(
    h: LinOp,
    amplitudes: Sequence[float],
    directions: Sequence[LinOp],
    intervals: Optional[int] = None,
) -> GroupPath:
    """
    e^{tH} exp(S(t)) with S(t) = sum_j b_j sin(j pi t) H_j; same endpoints as e^{tH}.

    The body is e^{-S} H e^{S} + e^{-S} (e^{S})'.
    """
    algebra = h.algebra
    modes = [(float(b), w.entries) for b, w in zip(amplitudes, directions)]
    n = algebra.dim

    def s_and_ds(t: float) -> Tuple[np.ndarray, np.ndarray]:
        s, ds = np.zeros((n, n)), np.zeros((n, n))
        for j, (b, w) in enumerate(modes, start=1):
            s = s + b * np.sin(j * np.pi * t) * w
            ds = ds + b * j * np.pi * np.cos(j * np.pi * t) * w
        return s, ds

    def element(t: float) -> np.ndarray:
        s, _ = s_and_ds(t)
        return expm_array(t * h.entries) @ expm_array(s)

    def body(t: float) -> np.ndarray:
        s, ds = s_and_ds(t)
        es, des = _exp_with_derivative(s, ds)
        es_inv = np.linalg.inv(es)
        return es_inv @ h.entries @ es + es_inv @ des

    return GroupPath(algebra, element, body, intervals)


def group_path_length(
    path: GroupPath,
    restarts: Optional[int] = None,
    iterations: Optional[int] = None,
    seed: Seed = None,
    warm_start: bool = True,
) -> float:
    """
    Simpson quadrature of the op_norm estimate of the body.

    With warm_start each node also starts its ascent from the previous node's maximizer.
    """
    rng = as_rng(get_settings().residual_seed if seed is None else seed)
    speeds = []
    warm: Tuple[Element, ...] = ()
    for t in path.grid:
        estimate = op_norm(
            LinOp(path.algebra, path.body(t)), restarts=restarts, iterations=iterations, seed=rng, extra_starts=warm
        )
        speeds.append(estimate.estimate)
        if warm_start:
            warm = (estimate.witness,)
    return float(simpson(speeds))


# ============= Quotient onto the cone =============

def quotient_map(g: GroupElement) -> ConePoint:
    """q(g) = g(1)."""
    return ConePoint(g.op.apply(Element.unit(g.algebra)))


def quotient_norm(g: GroupElement, z: LinOp) -> float:
    """Closed form ||U_{p^{-1/2}} Z(1)|| with p = g(1)."""
    p = quotient_map(g)
    return finsler_norm(p, z.apply(Element.unit(g.algebra)))


@dataclass(frozen=True)
class QuotientNormCheck:
    """Closed form against sampled values of ||Z - gD||_g."""

    closed_form: float
    sampled_lower_bounds: List[float]
    attained: float

    @property
    def min_lower_bound(self) -> float:
        return min(self.sampled_lower_bounds) if self.sampled_lower_bounds else float("inf")


def quotient_norm_sandwich(
    g: GroupElement,
    z: LinOp,
    samples: int = 100,
    seed: Seed = None,
    restarts: int = 4,
) -> QuotientNormCheck:
    """Sample ||Z - gD||_g over random derivations D and at D = der-part of g^-1 Z."""
    rng = as_rng(seed)
    algebra = g.algebra
    body = LinOp(algebra, g.inverse.entries @ z.entries)
    bounds = []
    for _ in range(samples):
        d = random_derivation(algebra, rng, terms=2, scale=float(rng.uniform(0.1, 1.0)))
        bounds.append(op_norm(body - d, restarts=restarts, iterations=0, seed=rng).lower_bound)
    x, d = split_arrays(algebra, body.entries)
    attained = op_norm(LinOp(algebra, algebra.left_mult(x)), restarts=restarts, seed=rng).estimate
    return QuotientNormCheck(quotient_norm(g, z), bounds, attained)


# ============= Lifts =============

@dataclass(frozen=True, eq=False)
class LiftResult:
    """Sampled lift Lambda_t = U_{gamma_t^{1/2}} k_t with residual histories."""

    times: np.ndarray
    lift: np.ndarray  # (N+1, d, d)
    automorphisms: np.ndarray  # (N+1, d, d)
    automorphism_residuals: np.ndarray
    horizontality_residuals: np.ndarray
    speeds: np.ndarray
    base_speeds: np.ndarray
    lift_residual: float
    length: float
    base_length: float

    def to_rows(self) -> List[List[float]]:
        """(t, horizontality_residual, automorphism_residual, speed_estimate)."""
        return [
            [float(t), float(h), float(a), float(s)]
            for t, h, a, s in zip(self.times, self.horizontality_residuals, self.automorphism_residuals, self.speeds)
        ]


def grid_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite differences along axis 0 of a uniformly sampled array."""
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < 5:
        raise ValueError("need at least 5 samples")
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    out[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    out[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return out


@dataclass(frozen=True)
class _RootFrame:
    root: np.ndarray  # gamma^{1/2}
    root_inv: np.ndarray  # gamma^{-1/2}
    root_dot: np.ndarray  # (gamma^{1/2})'


def _root_frame(path: SampledPath, t: float) -> _RootFrame:
    algebra = path.algebra
    spec = spectral_decompose(path.point(t))
    lam, c = spec.eigenvalues, spec.idempotents
    root = np.sqrt(lam) @ c
    root_inv = (1.0 / np.sqrt(lam)) @ c
    # (a^2)' = 2 a o a', solved for a'
    root_dot = np.linalg.solve(2.0 * algebra.left_mult(root), path.velocity(t).coords)
    return _RootFrame(root, root_inv, root_dot)


def _frame_generator(algebra: Algebra, frame: _RootFrame) -> np.ndarray:
    return 2.0 * _bracket(algebra.left_mult(frame.root_dot), algebra.left_mult(frame.root_inv))


def lift_generator(path: SampledPath, t: float) -> np.ndarray:
    """Omega(t) = 2 [L_{(gamma^{1/2})'}, L_{gamma^{-1/2}}]; the lift ODE is k' = Omega k."""
    return _frame_generator(path.algebra, _root_frame(path, t))


def lie_decomposition(path: SampledPath, t: float, k: np.ndarray, dk: np.ndarray) -> Tuple[Element, LinOp]:
    """
    L- and der-components of Lambda^-1 Lambda' for Lambda = U_{gamma^{1/2}} k.

    H = 2 k^-1 L_{gamma^{-1/2} o (gamma^{1/2})'} k and
    D = 2 k^-1 [L_{gamma^{-1/2}}, L_{(gamma^{1/2})'}] k + k^-1 k'.
    """
    algebra = path.algebra
    frame = _root_frame(path, t)
    k_inv = np.linalg.inv(k)
    x = k_inv @ algebra.product(frame.root_inv, frame.root_dot) * 2.0
    d = 2.0 * k_inv @ _bracket(algebra.left_mult(frame.root_inv), algebra.left_mult(frame.root_dot)) @ k + k_inv @ dk
    return Element(algebra, x), LinOp(algebra, d)


def horizontal_lift(
    path: SampledPath,
    k0: Optional[LinOp] = None,
    steps: Optional[int] = None,
    automorphism_samples: int = 8,
    norm_restarts: int = 2,
    norm_iterations: int = 0,
) -> LiftResult:
    """
    Horizontal lift of a cone path starting at U_{gamma_0^{1/2}} k0.

    Integrates k' = 2[L_{(gamma^{1/2})'}, L_{gamma^{-1/2}}] k by RK4 and samples
    Lambda_t = U_{gamma_t^{1/2}} k_t on the RK4 grid. Horizontality is measured on
    finite differences of the sampled lift, not on the ODE right-hand side.
    Speeds default to the best-start op_norm value: a horizontal body is
    k^-1 L_u k = L_{k^-1 u}, whose norm is attained at the unit.

    Raises:
        LiftDivergenceError: when the automorphism residual of k_t exceeds the abort tolerance
    """
    settings = get_settings()
    algebra = path.algebra
    n = algebra.dim
    steps = settings.rk4_steps if steps is None else steps
    if steps < 4 or steps % 2:
        raise ValueError(f"steps must be even and >= 4, got {steps}")
    k_start = np.eye(n) if k0 is None else k0.entries
    frames = {}
    generators = {}
    automorphism_residuals = [is_automorphism(LinOp(algebra, k_start), samples=automorphism_samples)]

    # RK4 stage times and grid times share these keys
    def frame_at(t: float) -> _RootFrame:
        key = round(t, 14)
        if key not in frames:
            frames[key] = _root_frame(path, t)
        return frames[key]

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        key = round(t, 14)
        if key not in generators:
            generators[key] = _frame_generator(algebra, frame_at(t))
        return (generators[key] @ state.reshape(n, n)).reshape(-1)

    def monitor(t: float, state: np.ndarray) -> None:
        residual = is_automorphism(LinOp(algebra, state.reshape(n, n)), samples=automorphism_samples)
        if residual > settings.lift_abort_tolerance:
            raise LiftDivergenceError(t, residual, settings.lift_abort_tolerance)
        automorphism_residuals.append(residual)

    states = rk4(rhs, k_start.reshape(-1), 0.0, 1.0, steps, monitor=monitor)
    times = np.linspace(0.0, 1.0, steps + 1)
    ks = np.array([s.reshape(n, n) for s in states])

    unit = algebra.unit_coords
    lift = np.empty_like(ks)
    lift_residual = 0.0
    base_speeds = np.empty(steps + 1)
    for i, t in enumerate(times):
        frame = frame_at(t)
        lift[i] = quadratic_matrix(algebra, frame.root) @ ks[i]
        point = path.point(t)
        lift_residual = max(lift_residual, float(np.linalg.norm(lift[i] @ unit - point.coords) / (1.0 + point.norm2())))
        pulled = quadratic_matrix(algebra, frame.root_inv) @ path.velocity(t).coords
        base_speeds[i] = jb_norm(Element(algebra, pulled))

    derivative = grid_derivative(lift, 1.0 / steps)
    horizontality = np.empty(steps + 1)
    speeds = np.empty(steps + 1)
    for i in range(steps + 1):
        body = np.linalg.solve(lift[i], derivative[i])
        _, der = split_arrays(algebra, body)
        horizontality[i] = float(np.linalg.norm(der))
        speeds[i] = op_norm(LinOp(algebra, body), restarts=norm_restarts, iterations=norm_iterations).estimate

    result = LiftResult(
        times=times,
        lift=lift,
        automorphisms=ks,
        automorphism_residuals=np.array(automorphism_residuals),
        horizontality_residuals=horizontality,
        speeds=speeds,
        base_speeds=base_speeds,
        lift_residual=lift_residual,
        length=float(simpson(speeds)),
        base_length=float(simpson(base_speeds)),
    )
    logger.debug(
        f"horizontal_lift: length={result.length:.9f} base={result.base_length:.9f} "
        f"max horizontality={horizontality.max():.2e}"
    )
    return result


def geodesic_lift(p: ConePoint, z: Element, t: float) -> LinOp:
    """U_{p^{1/2}} e^{t L_z}: the lift of t -> U_{p^{1/2}} exp(tz)."""
    algebra = p.algebra
    return LinOp(algebra, p.u_sqrt @ expm_array(t * algebra.left_mult(z.coords)))


def geodesic_path(x: ConePoint, y: ConePoint, intervals: Optional[int] = None) -> SampledPath:
    """alpha_{x,y} as a sampled path with analytic velocity."""
    algebra = x.algebra
    z = spectral_decompose(Element(algebra, x.u_inv_sqrt @ y.p.coords))
    lam, c = np.log(z.eigenvalues), z.idempotents

    def point(t: float) -> Element:
        return Element(algebra, x.u_sqrt @ (np.exp(t * lam) @ c))

    def velocity(t: float) -> Element:
        return Element(algebra, x.u_sqrt @ ((lam * np.exp(t * lam)) @ c))

    return SampledPath(algebra, point, velocity, intervals=intervals)


def quotient_distance_bounds(x: ConePoint, y: ConePoint, steps: Optional[int] = None) -> Tuple[float, float]:
    """
    Two-sided bounds on the quotient distance d'(x, y).

    lower: Thompson distance; upper: length of the horizontal lift of alpha_{x,y}.
    """
    lower = thompson_distance(x, y)
    if lower == 0.0:
        return 0.0, 0.0
    upper = horizontal_lift(geodesic_path(x, y), steps=steps).length
    return lower, upper


def fiber_distance_bounds(z: Element, intervals: Optional[int] = None) -> Tuple[float, float]:
    """
    Bounds for the distance from the identity to the fiber e^{L_z} Aut.

    lower: dist(1, e^z) in the cone, which equals ||z||; upper: length of t -> e^{tL_z}.
    """
    algebra = z.algebra
    lower = thompson_distance(ConePoint.unit(algebra), ConePoint(exp(z)))
    upper = group_path_length(one_parameter_path(LinOp(algebra, algebra.left_mult(z.coords)), intervals))
    return lower, upper
