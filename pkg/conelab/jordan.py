"""
Jordan-core operations: products, multiplication and quadratic operators,
spectral decomposition, functional calculus, cone membership and norms.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from conelab.algebras import Algebra
from conelab.config import get_settings
from conelab.elements import Element, LinOp, check_same_algebra
from conelab.errors import DomainError, SingularElementError

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]


def as_rng(seed: Seed) -> np.random.Generator:
    """Per-call generator; Generators pass through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ============= Array kernels =============

def quadratic_matrix(algebra: Algebra, x: np.ndarray) -> np.ndarray:
    """U_x = 2 L_x^2 - L_{x^2}."""
    lx = algebra.left_mult(x)
    return 2.0 * lx @ lx - algebra.left_mult(algebra.product(x, x))


def quadratic_bilinear_matrix(algebra: Algebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """U_{x,y} = L_x L_y + L_y L_x - L_{x o y}, the polarization of U."""
    lx, ly = algebra.left_mult(x), algebra.left_mult(y)
    return lx @ ly + ly @ lx - algebra.left_mult(algebra.product(x, y))


# ============= Products and operators =============

def jordan_product(a: Element, b: Element) -> Element:
    """a o b via the specialized kernel."""
    return a.circ(b)


def generic_product(a: Element, b: Element) -> Element:
    """a o b via the dense structure constants."""
    algebra = check_same_algebra(a, b)
    return Element(algebra, algebra.generic_product(a.coords, b.coords))


def l_operator(x: Element) -> LinOp:
    """L_x y = x o y."""
    return LinOp(x.algebra, x.algebra.left_mult(x.coords))


def u_operator(x: Element) -> LinOp:
    return LinOp(x.algebra, quadratic_matrix(x.algebra, x.coords))


def u_bilinear(x: Element, y: Element) -> LinOp:
    algebra = check_same_algebra(x, y)
    return LinOp(algebra, quadratic_bilinear_matrix(algebra, x.coords, y.coords))


def v_operator(x: Element, y: Element) -> LinOp:
    """V_{x,y} = [L_x, L_y] + L_{x o y}; V_{x,y}(z) = U_{x,z}(y)."""
    algebra = check_same_algebra(x, y)
    lx, ly = algebra.left_mult(x.coords), algebra.left_mult(y.coords)
    return LinOp(algebra, lx @ ly - ly @ lx + algebra.left_mult(algebra.product(x.coords, y.coords)))


# ============= Spectral theory =============

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (decreasing) with a complete system of orthogonal primitive idempotents."""

    algebra: Algebra
    eigenvalues: np.ndarray
    idempotents: np.ndarray  # (rank, dim)

    def idempotent(self, i: int) -> Element:
        return Element(self.algebra, self.idempotents[i])

    def combine(self, values: Sequence[float]) -> Element:
        """Sum of values[i] * c_i."""
        return Element(self.algebra, np.asarray(values, dtype=float) @ self.idempotents)

    def reconstruct(self) -> Element:
        return self.combine(self.eigenvalues)

    def apply(self, f: Callable[[float], float]) -> Element:
        return self.combine([f(float(lam)) for lam in self.eigenvalues])

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def threshold(self) -> float:
        """Scale-aware positivity cutoff eps = factor * (1 + max|lambda|)."""
        return get_settings().positivity_factor * (1.0 + self.max_abs)

    def blocks(self, gap: Optional[float] = None) -> List[Tuple[float, Element]]:
        """Distinct eigenvalues with their spectral projections (sums of grouped idempotents)."""
        if gap is None:
            gap = get_settings().multiplicity_gap
        tol = gap * (1.0 + self.max_abs)
        groups: List[Tuple[List[float], np.ndarray]] = []
        for lam, c in zip(self.eigenvalues, self.idempotents):
            if groups and abs(groups[-1][0][-1] - lam) <= tol:
                groups[-1][0].append(float(lam))
                groups[-1] = (groups[-1][0], groups[-1][1] + c)
            else:
                groups.append(([float(lam)], c.copy()))
        return [(float(np.mean(values)), Element(self.algebra, projection)) for values, projection in groups]


def spectral_decompose(x: Element) -> Spectrum:
    """
    Spectral decomposition x = sum lambda_i c_i.

    Args:
        x: Any element

    Returns:
        Spectrum with eigenvalues sorted decreasing (multiplicities split into primitive idempotents)
    """
    eigenvalues, idempotents = x.algebra.eigh(x.coords)
    order = np.argsort(-eigenvalues, kind="stable")
    return Spectrum(x.algebra, eigenvalues[order], idempotents[order])


def spectrum(x: Element) -> np.ndarray:
    return spectral_decompose(x).eigenvalues


def functional_calculus(x: Element, f: Callable[[float], float]) -> Element:
    """sum f(lambda_i) c_i; f must be defined on the spectrum."""
    return spectral_decompose(x).apply(f)


def _positive_spectrum(x: Element, name: str) -> Spectrum:
    spec = spectral_decompose(x)
    lowest = float(spec.eigenvalues[-1])
    if lowest <= spec.threshold:
        raise DomainError(name, lowest, spec.threshold)
    return spec


def exp(x: Element) -> Element:
    return functional_calculus(x, np.exp)


def log(x: Element) -> Element:
    return _positive_spectrum(x, "log").apply(np.log)


def sqrt(x: Element) -> Element:
    return _positive_spectrum(x, "sqrt").apply(np.sqrt)


def inv_sqrt(x: Element) -> Element:
    return _positive_spectrum(x, "inverse sqrt").apply(lambda lam: 1.0 / np.sqrt(lam))


def power(x: Element, r: float) -> Element:
    """x^r: real r on the cone, integer r on invertible elements."""
    if float(r).is_integer():
        if r >= 0:
            return functional_calculus(x, lambda lam: lam ** int(r))
        return functional_calculus(inverse(x), lambda lam: lam ** int(-r))
    return _positive_spectrum(x, f"power {r}").apply(lambda lam: lam ** r)


def inverse(x: Element) -> Element:
    """x^-1 via lambda -> 1/lambda."""
    spec = spectral_decompose(x)
    smallest = float(np.min(np.abs(spec.eigenvalues)))
    if smallest <= spec.threshold:
        raise SingularElementError(f"Element is singular: min |eigenvalue| = {smallest:.3e}")
    return spec.apply(lambda lam: 1.0 / lam)


def is_invertible(x: Element) -> bool:
    spec = spectral_decompose(x)
    return bool(np.min(np.abs(spec.eigenvalues)) > spec.threshold)


def in_cone(x: Element) -> bool:
    spec = spectral_decompose(x)
    return bool(spec.eigenvalues[-1] > spec.threshold)


def trace(x: Element) -> float:
    """Jordan trace, the sum of eigenvalues, as a linear functional."""
    return float(x.algebra.trace_vector @ x.coords)


def trace_inner(x: Element, y: Element) -> float:
    """tr(x o y)."""
    return trace(x.circ(y))


def functional_derivative(
    x: Element,
    f: Callable[[np.ndarray], np.ndarray],
    f_prime: Callable[[np.ndarray], np.ndarray],
    h: Element,
) -> Element:
    """
    Directional derivative of the functional calculus of f at x along h.

    Uses the Peirce frame of x: sum f'(l_i) U_{c_i} h plus, for i < j, the divided
    difference (f(l_i) - f(l_j)) / (l_i - l_j) times 4 c_i o (c_j o h).
    """
    algebra = check_same_algebra(x, h)
    spec = spectral_decompose(x)
    lam = spec.eigenvalues
    c = spec.idempotents
    values, slopes = np.asarray(f(lam), dtype=float), np.asarray(f_prime(lam), dtype=float)
    scale = get_settings().multiplicity_gap * (1.0 + spec.max_abs)
    out = np.zeros(algebra.dim)
    cjh = [algebra.product(cj, h.coords) for cj in c]
    for i in range(len(lam)):
        out += slopes[i] * (quadratic_matrix(algebra, c[i]) @ h.coords)
        for j in range(i + 1, len(lam)):
            gap = lam[i] - lam[j]
            if abs(gap) <= scale:
                weight = 0.5 * (slopes[i] + slopes[j])
            else:
                weight = (values[i] - values[j]) / gap
            out += 4.0 * weight * algebra.product(c[i], cjh[j])
    return Element(algebra, out)


# ============= Norms =============

def sorted_moduli(values: Sequence[float]) -> np.ndarray:
    """Moduli sorted decreasing; ties broken by signed value decreasing."""
    v = np.asarray(values, dtype=float)
    order = np.lexsort((-v, -np.abs(v)))
    return np.abs(v[order])


class GaugeName(str, Enum):
    """Symmetric gauge families."""
    SUP = "sup"
    LP = "lp"
    KYFAN = "kyfan"


class GaugeFunction(BaseModel):
    """Permutation- and sign-invariant gauge applied to decreasing eigenvalue moduli."""

    model_config = ConfigDict(frozen=True)

    name: GaugeName = GaugeName.SUP
    p: float = Field(default=2.0, ge=1.0)
    k: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _finite_p(self) -> "GaugeFunction":
        if not np.isfinite(self.p):
            raise ValueError("p must be finite; use the sup gauge instead")
        return self

    @classmethod
    def parse(cls, text: str) -> "GaugeFunction":
        """'sup' | 'order' | 'lp:P' | 'kyfan:K'."""
        name, _, arg = text.strip().lower().partition(":")
        if name in ("sup", "order"):
            return cls(name=GaugeName.SUP)
        if name == "lp":
            return cls(name=GaugeName.LP, p=float(arg or 2))
        if name == "kyfan":
            return cls(name=GaugeName.KYFAN, k=int(arg or 1))
        raise ValueError(f"Unknown gauge '{text}'")

    @property
    def label(self) -> str:
        if self.name == GaugeName.LP:
            return f"lp({self.p:g})"
        if self.name == GaugeName.KYFAN:
            return f"kyfan({self.k})"
        return "sup"

    def __call__(self, values: Sequence[float]) -> float:
        moduli = sorted_moduli(values)
        if self.name == GaugeName.SUP:
            return float(moduli[0]) if moduli.size else 0.0
        if self.name == GaugeName.LP:
            return float(np.sum(moduli ** self.p) ** (1.0 / self.p))
        return float(np.sum(moduli[: self.k]))


def jb_norm(x: Element) -> float:
    """Order norm, equal to the spectral sup-norm max |lambda_i|."""
    return spectral_decompose(x).max_abs


def gauge_norm(x: Element, gauge: GaugeFunction) -> float:
    return gauge(spectral_decompose(x).eigenvalues)


def element_norm(x: Element, gauge: Optional[GaugeFunction] = None) -> float:
    """jb_norm when gauge is None, otherwise the gauge norm."""
    return jb_norm(x) if gauge is None else gauge_norm(x, gauge)


# ============= Sampling =============

def random_element(algebra: Algebra, seed: Seed = None, scale: float = 1.0) -> Element:
    """Coordinates i.i.d. normal(0, scale)."""
    return Element(algebra, as_rng(seed).normal(0.0, scale, algebra.dim))


def random_positive(algebra: Algebra, seed: Seed = None, scale: float = 1.0) -> Element:
    """exp(random_element), always in the cone."""
    return exp(random_element(algebra, seed, scale))
