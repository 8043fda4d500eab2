"""
Operator space: the structure algebra str = L + der, its involutions,
membership residuals, operator exponentials, and the JB-ball operator norm.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from conelab.algebras import Algebra
from conelab.config import get_settings
from conelab.elements import Element, LinOp, check_same_algebra
from conelab.errors import SingularElementError, StructureResidualError
from conelab.jordan import (
    Seed,
    as_rng,
    inverse,
    is_invertible,
    quadratic_bilinear_matrix,
    quadratic_matrix,
    spectral_decompose,
)

logger = logging.getLogger(__name__)

# Residual above which an operator is not treated as a member of str.
STR_TOLERANCE = 1e-8


# ============= Basic operator algebra =============

def commutator(a: LinOp, b: LinOp) -> LinOp:
    check_same_algebra(a, b)
    return LinOp(a.algebra, a.entries @ b.entries - b.entries @ a.entries)


def expm_array(a: np.ndarray) -> np.ndarray:
    """Matrix exponential (Pade scaling and squaring)."""
    return scipy.linalg.expm(np.asarray(a, dtype=float))


def op_exp(h: LinOp) -> LinOp:
    return LinOp(h.algebra, expm_array(h.entries))


# ============= str = L + der =============

@dataclass(frozen=True, eq=False)
class StrDecomposition:
    """H = L_x + D with x = H(1) and D(1) = 0."""

    l_part: Element
    der_part: LinOp
    derivation_residual: float

    @property
    def l_operator(self) -> LinOp:
        return LinOp(self.l_part.algebra, self.l_part.algebra.left_mult(self.l_part.coords))

    def reconstruct(self) -> LinOp:
        return self.l_operator + self.der_part


def split_arrays(algebra: Algebra, h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(x, D) with x = H(1), D = H - L_x, on raw arrays."""
    x = h @ algebra.unit_coords
    return x, h - algebra.left_mult(x)


def _sample_pairs(algebra: Algebra, samples: int, seed: Seed, strict: bool) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    if strict:
        eye = np.eye(algebra.dim)
        for i in range(algebra.dim):
            for j in range(i, algebra.dim):
                yield eye[i], eye[j]
        return
    rng = as_rng(get_settings().residual_seed if seed is None else seed)
    for _ in range(samples):
        yield rng.normal(size=algebra.dim), rng.normal(size=algebra.dim)


def derivation_residual(
    d: LinOp,
    samples: Optional[int] = None,
    seed: Seed = None,
    strict: bool = False,
) -> float:
    """max ||D(a o b) - Da o b - a o Db|| / (||a|| ||b||) over sampled (or all basis) pairs."""
    algebra = d.algebra
    samples = get_settings().derivation_samples if samples is None else samples
    m = d.entries
    worst = 0.0
    for a, b in _sample_pairs(algebra, samples, seed, strict):
        defect = m @ algebra.product(a, b) - algebra.product(m @ a, b) - algebra.product(a, m @ b)
        worst = max(worst, float(np.linalg.norm(defect) / (np.linalg.norm(a) * np.linalg.norm(b))))
    return worst


def split_str(h: LinOp, samples: Optional[int] = None, seed: Seed = None, strict: bool = False) -> StrDecomposition:
    """
    Cartan splitting of an operator.

    Args:
        h: Any operator; the residual reports how far its der-part is from a derivation
        samples: Random pairs for the derivation residual
        seed: Sampling seed (defaults to the configured residual seed)
        strict: Enumerate basis pairs instead of sampling

    Returns:
        StrDecomposition(l_part=H(1), der_part=H - L_{H(1)}, derivation_residual)
    """
    x, d = split_arrays(h.algebra, h.entries)
    der = LinOp(h.algebra, d)
    return StrDecomposition(
        l_part=Element(h.algebra, x),
        der_part=der,
        derivation_residual=derivation_residual(der, samples, seed, strict),
    )


def overline(h: LinOp) -> LinOp:
    """H - 2 U_{H1,1}; note U_{x,1} = L_x."""
    algebra = h.algebra
    x = h.entries @ algebra.unit_coords
    return LinOp(algebra, h.entries - 2.0 * quadratic_bilinear_matrix(algebra, x, algebra.unit_coords))


def in_structure_algebra(h: LinOp, samples: Optional[int] = None, seed: Seed = None) -> float:
    """
    Membership residual for str.

    max over random x of ||2 U_{x,Hx} - H U_x + U_x Hbar|| / (||H|| ||x||^2); zero on L + der.
    """
    algebra = h.algebra
    samples = get_settings().derivation_samples if samples is None else samples
    rng = as_rng(get_settings().residual_seed if seed is None else seed)
    m = h.entries
    bar = overline(h).entries
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=algebra.dim)
        ux = quadratic_matrix(algebra, x)
        defect = 2.0 * quadratic_bilinear_matrix(algebra, x, m @ x) - m @ ux + ux @ bar
        worst = max(worst, float(np.linalg.norm(defect) / (scale * float(x @ x))))
    return worst


def require_str(h: LinOp, tolerance: float = STR_TOLERANCE) -> None:
    residual = in_structure_algebra(h)
    if residual > tolerance:
        raise StructureResidualError(residual, tolerance)


def dagger(h: LinOp, check: bool = True) -> LinOp:
    """(L_x + D)^dagger = L_x - D."""
    if check:
        require_str(h)
    x, d = split_arrays(h.algebra, h.entries)
    return LinOp(h.algebra, h.algebra.left_mult(x) - d)


def sigma_star(h: LinOp, check: bool = True) -> LinOp:
    """Differential of the Cartan involution: -dagger, i.e. -L_x + D."""
    return -dagger(h, check)


def is_automorphism(k: LinOp, samples: Optional[int] = None, seed: Seed = None) -> float:
    """max ||k(a o b) - ka o kb|| / (||a|| ||b||) over random pairs."""
    algebra = k.algebra
    samples = get_settings().derivation_samples if samples is None else samples
    m = k.entries
    worst = 0.0
    for a, b in _sample_pairs(algebra, samples, seed, strict=False):
        defect = m @ algebra.product(a, b) - algebra.product(m @ a, m @ b)
        worst = max(worst, float(np.linalg.norm(defect) / (np.linalg.norm(a) * np.linalg.norm(b))))
    return worst


def sigma(g: LinOp) -> LinOp:
    """Cartan involution on the group: U_{g(1)}^-1 g."""
    p = g.apply(Element.unit(g.algebra))
    if not is_invertible(p):
        raise SingularElementError("g(1) is singular; sigma(g) undefined")
    return LinOp(g.algebra, quadratic_matrix(g.algebra, inverse(p).coords) @ g.entries)


def random_derivation(algebra: Algebra, seed: Seed = None, terms: int = 3, scale: float = 1.0) -> LinOp:
    """Inner derivation: sum of [L_a, L_b] over random pairs."""
    rng = as_rng(seed)
    total = np.zeros((algebra.dim, algebra.dim))
    for _ in range(terms):
        la = algebra.left_mult(rng.normal(0.0, scale, algebra.dim))
        lb = algebra.left_mult(rng.normal(0.0, scale, algebra.dim))
        total += la @ lb - lb @ la
    return LinOp(algebra, total)


# ============= Operator norm =============

@dataclass(frozen=True, eq=False)
class OpNormEstimate:
    """Estimate and certified lower bound of sup ||Hv|| over the order-unit ball."""

    estimate: float
    lower_bound: float
    witness: Element

    def __iter__(self):
        yield self.estimate
        yield self.lower_bound


def _symmetry(algebra: Algebra, w: np.ndarray) -> np.ndarray:
    """sign(w) = sum sign(lambda_i) c_i, an extreme point of the unit ball."""
    spec = spectral_decompose(Element(algebra, w))
    return np.where(spec.eigenvalues >= 0.0, 1.0, -1.0) @ spec.idempotents


def op_norm(
    h: LinOp,
    restarts: Optional[int] = None,
    iterations: Optional[int] = None,
    step_tol: Optional[float] = None,
    seed: Seed = None,
    extra_starts: Sequence[Element] = (),
) -> OpNormEstimate:
    """
    Operator sup-norm of H on (V, jb_norm).

    Starts are the unit, any extra starts, and random symmetries. The lower bound is
    the best start value; the estimate follows conditional-gradient ascent toward the
    symmetry maximizing the linearized objective, with step backtracking. Every
    reported value is attained at a feasible point.

    Args:
        h: Operator
        restarts: Random starts (default from settings)
        iterations: Ascent iterations per start
        step_tol: Stop when an iteration gains less than this
        seed: Sampling seed
        extra_starts: Additional feasible starting points (clipped into the ball)

    Returns:
        OpNormEstimate
    """
    settings = get_settings()
    restarts = settings.op_norm_restarts if restarts is None else restarts
    iterations = settings.op_norm_iterations if iterations is None else iterations
    step_tol = settings.op_norm_step_tol if step_tol is None else step_tol
    algebra = h.algebra
    a = h.entries
    tau = algebra.trace_vector
    gram = algebra.gram
    rng = as_rng(settings.residual_seed if seed is None else seed)

    def evaluate(u: np.ndarray):
        spec = spectral_decompose(Element(algebra, a @ u))
        return spec.max_abs, spec

    starts: List[np.ndarray] = [algebra.unit_coords.copy()]
    for extra in extra_starts:
        spec = spectral_decompose(extra)
        starts.append(np.clip(spec.eigenvalues, -1.0, 1.0) @ spec.idempotents)
    starts.extend(_symmetry(algebra, rng.normal(size=algebra.dim)) for _ in range(restarts))

    scored = [(evaluate(u), u) for u in starts]
    lower_bound = max(value for (value, _), _ in scored)
    best_value, best_point = -1.0, starts[0]

    for (value, spec), u in scored:
        for _ in range(iterations):
            top = int(np.argmax(np.abs(spec.eigenvalues)))
            lam = spec.eigenvalues[top]
            if value == 0.0:
                break
            grad = np.sign(lam) * (a.T @ (algebra.left_mult(spec.idempotents[top]).T @ tau))
            target = _symmetry(algebra, np.linalg.solve(gram, grad))
            direction = target - u
            step = 1.0
            improved = None
            while step >= 1.0 / 16.0:
                candidate = u + step * direction
                cand_value, cand_spec = evaluate(candidate)
                if cand_value > value:
                    improved = (cand_value, cand_spec, candidate)
                    break
                step *= 0.5
            if improved is None or improved[0] - value <= step_tol:
                if improved is not None:
                    value, spec, u = improved
                break
            value, spec, u = improved
        if value > best_value:
            best_value, best_point = value, u

    logger.debug(f"op_norm: lower={lower_bound:.6g} estimate={best_value:.6g} ({len(starts)} starts)")
    return OpNormEstimate(
        estimate=max(best_value, lower_bound),
        lower_bound=lower_bound,
        witness=Element(algebra, best_point),
    )


# ============= Analytic functions of ad =============

def _sinhc(lam: np.ndarray) -> np.ndarray:
    """G(l) = sinh(l)/l with G(0) = 1."""
    lam = np.asarray(lam)
    small = np.abs(lam) < 1e-8
    safe = np.where(small, 1.0, lam)
    return np.where(small, 1.0 + lam * lam / 6.0, np.sinh(safe) / safe)


def sinh_ad_apply(x: Element, y: Element) -> Element:
    """
    {G(ad L_x) L_y}(1) with G(l) = sinh(l)/l.

    Gauss-Legendre quadrature of the integral over s in [0, 1] of
    e^{(2s-1)L_x} L_y e^{(1-2s)L_x}(1), starting from the configured node count
    and doubling until successive values agree.
    """
    algebra = check_same_algebra(x, y)
    settings = get_settings()
    spec = spectral_decompose(x)
    lam, c = spec.eigenvalues, spec.idempotents

    def exp_coords(t: float) -> np.ndarray:
        return np.exp(t * lam) @ c

    def integrand(s: float) -> np.ndarray:
        a = 2.0 * s - 1.0
        inner = algebra.product(y.coords, exp_coords(-a))
        return quadratic_matrix(algebra, exp_coords(0.5 * a)) @ inner

    def gauss(n: int) -> np.ndarray:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        total = np.zeros(algebra.dim)
        for node, weight in zip(nodes, weights):
            total += 0.5 * weight * integrand(0.5 * (node + 1.0))
        return total

    n = settings.quadrature_nodes
    previous = gauss(n)
    while n < settings.quadrature_max_nodes:
        n *= 2
        current = gauss(n)
        if np.linalg.norm(current - previous) <= settings.quadrature_tol * (1.0 + np.linalg.norm(current)):
            return Element(algebra, current)
        previous = current
    logger.warning(f"sinh_ad_apply: quadrature did not settle by {n} nodes")
    return Element(algebra, previous)


def sinh_ad_oracle(x: Element, y: Element) -> Element:
    """The same quantity via eigendecomposition of ad L_x on the d^2 operator space."""
    algebra = check_same_algebra(x, y)
    d = algebra.dim
    lx = algebra.left_mult(x.coords)
    eye = np.eye(d)
    ad = np.kron(lx, eye) - np.kron(eye, lx.T)  # row-major vec(AX - XA)
    ly = algebra.left_mult(y.coords).reshape(-1)
    if np.allclose(lx, lx.T, atol=1e-12):
        w, q = np.linalg.eigh(0.5 * (ad + ad.T))
        image = q @ (_sinhc(w) * (q.T @ ly))
    else:
        w, q = np.linalg.eig(ad)
        image = np.real(q @ (_sinhc(w) * np.linalg.solve(q, ly)))
    return Element(algebra, image.reshape(d, d) @ algebra.unit_coords)
