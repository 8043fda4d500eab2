"""
Symmetric-space geometry of the positive cone.

Points carry their spectral data; every map is written with quadratic
representations so the same code serves all supported algebras.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence

import numpy as np

from conelab.config import get_settings
from conelab.elements import Element, LinOp, check_same_algebra
from conelab.errors import DomainError
from conelab.jordan import (
    GaugeFunction,
    Spectrum,
    element_norm,
    exp,
    functional_derivative,
    jb_norm,
    log,
    quadratic_bilinear_matrix,
    quadratic_matrix,
    spectral_decompose,
)
from conelab.operators import op_exp, sinh_ad_apply
from conelab.paths import SampledPath, central_difference, rk4, simpson

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConePoint:
    """Element of the positive cone with cached square roots and logarithm."""

    p: Element

    def __post_init__(self):
        spec = self.spectrum
        lowest = float(spec.eigenvalues[-1])
        if lowest <= spec.threshold:
            raise DomainError("cone point", lowest, spec.threshold)

    @classmethod
    def unit(cls, algebra) -> "ConePoint":
        return cls(Element.unit(algebra))

    @property
    def algebra(self):
        return self.p.algebra

    @cached_property
    def spectrum(self) -> Spectrum:
        return spectral_decompose(self.p)

    @cached_property
    def sqrt(self) -> Element:
        return self.spectrum.apply(np.sqrt)

    @cached_property
    def inv_sqrt(self) -> Element:
        return self.spectrum.apply(lambda lam: 1.0 / np.sqrt(lam))

    @cached_property
    def inverse(self) -> Element:
        return self.spectrum.apply(lambda lam: 1.0 / lam)

    @cached_property
    def log(self) -> Element:
        return self.spectrum.apply(np.log)

    @cached_property
    def u_sqrt(self) -> np.ndarray:
        """Matrix of U_{p^{1/2}}."""
        return quadratic_matrix(self.algebra, self.sqrt.coords)

    @cached_property
    def u_inv_sqrt(self) -> np.ndarray:
        return quadratic_matrix(self.algebra, self.inv_sqrt.coords)

    def __repr__(self) -> str:
        return f"ConePoint({self.p!r})"


@dataclass(frozen=True, eq=False)
class Tangent:
    """Tangent vector vec at base."""

    base: ConePoint
    vec: Element

    def __post_init__(self):
        check_same_algebra(self.base.p, self.vec)


def _as_point(x) -> ConePoint:
    return x if isinstance(x, ConePoint) else ConePoint(x)


# ============= Symmetric-space structure =============

def mu(x: ConePoint, y: ConePoint) -> Element:
    """x . y = U_x(y^-1)."""
    x, y = _as_point(x), _as_point(y)
    return Element(x.algebra, quadratic_matrix(x.algebra, x.p.coords) @ y.inverse.coords)


def mu_star(v: Tangent, w: Tangent) -> Element:
    """Differential of mu: 2 U_{x,v}(y^-1) - U_x U_y^-1 w."""
    x, y = v.base, w.base
    algebra = x.algebra
    yinv = y.inverse.coords
    first = 2.0 * quadratic_bilinear_matrix(algebra, x.p.coords, v.vec.coords) @ yinv
    second = quadratic_matrix(algebra, x.p.coords) @ (quadratic_matrix(algebra, yinv) @ w.vec.coords)
    return Element(algebra, first - second)


def spray(x: ConePoint, v: Element) -> Element:
    """F_x(v) = U_v(x^-1)."""
    x = _as_point(x)
    return Element(x.algebra, quadratic_matrix(x.algebra, v.coords) @ x.inverse.coords)


def christoffel(x: ConePoint, v: Element, w: Element) -> Element:
    """Gamma_x(v, w) = U_{v,w}(x^-1)."""
    x = _as_point(x)
    return Element(x.algebra, quadratic_bilinear_matrix(x.algebra, v.coords, w.coords) @ x.inverse.coords)


def geodesic(p: ConePoint, v: Element, t: float) -> ConePoint:
    """alpha(t) = U_{p^{1/2}} exp(t U_{p^{-1/2}} v)."""
    p = _as_point(p)
    z = Element(p.algebra, p.u_inv_sqrt @ v.coords)
    return ConePoint(Element(p.algebra, p.u_sqrt @ exp(t * z).coords))


def geodesic_velocity(p: ConePoint, v: Element, t: float) -> Element:
    """alpha'(t) = U_{p^{1/2}}(z o exp(tz)) with z = U_{p^{-1/2}} v."""
    p = _as_point(p)
    z = Element(p.algebra, p.u_inv_sqrt @ v.coords)
    return Element(p.algebra, p.u_sqrt @ z.circ(exp(t * z)).coords)


def log_map(x: ConePoint, y: ConePoint) -> Element:
    """exp_x^-1(y) = U_{x^{1/2}} log(U_{x^{-1/2}} y)."""
    x, y = _as_point(x), _as_point(y)
    return Element(x.algebra, x.u_sqrt @ relative_log(x, y).coords)


def relative_log(x: ConePoint, y: ConePoint) -> Element:
    """log(U_{x^{-1/2}} y), the pulled-back direction of alpha_{x,y}."""
    return log(Element(x.algebra, x.u_inv_sqrt @ y.p.coords))


def geodesic_between(x: ConePoint, y: ConePoint, t: float) -> ConePoint:
    """U_{x^{1/2}} exp(t log(U_{x^{-1/2}} y))."""
    x, y = _as_point(x), _as_point(y)
    z = relative_log(x, y)
    return ConePoint(Element(x.algebra, x.u_sqrt @ exp(t * z).coords))


def parallel_transport(x: ConePoint, y: ConePoint, t: float, w: Element) -> Element:
    """Transport of w from x along alpha_{x,y} to time t: U_{x^{1/2}} U_{exp(tz/2)} U_{x^{-1/2}} w."""
    x, y = _as_point(x), _as_point(y)
    z = relative_log(x, y)
    half = quadratic_matrix(x.algebra, exp(0.5 * t * z).coords)
    return Element(x.algebra, x.u_sqrt @ (half @ (x.u_inv_sqrt @ w.coords)))


def parallel_transport_ode(
    x: ConePoint,
    y: ConePoint,
    t: float,
    w: Element,
    steps: Optional[int] = None,
) -> Element:
    """Same transport by RK4 on eta' = U_{gamma', eta}(gamma^-1) along the geodesic."""
    x, y = _as_point(x), _as_point(y)
    algebra = x.algebra
    steps = get_settings().rk4_steps if steps is None else steps
    spec = spectral_decompose(relative_log(x, y))
    lam, c = spec.eigenvalues, spec.idempotents

    def rhs(s: float, eta: np.ndarray) -> np.ndarray:
        velocity = x.u_sqrt @ ((lam * np.exp(s * lam)) @ c)
        position_inv = x.u_inv_sqrt @ (np.exp(-s * lam) @ c)
        return quadratic_bilinear_matrix(algebra, velocity, eta) @ position_inv

    if t == 0.0:
        return w
    states = rk4(rhs, w.coords, 0.0, t, steps)
    return Element(algebra, states[-1])


def curvature(p: ConePoint, v: Element, w: Element, z: Element) -> Element:
    """R_p(V,W)Z = Gamma_p(V, Gamma_p(W, Z)) - Gamma_p(W, Gamma_p(V, Z))."""
    p = _as_point(p)
    return christoffel(p, v, christoffel(p, w, z)) - christoffel(p, w, christoffel(p, v, z))


def curvature_bracket(p: ConePoint, v: Element, w: Element, z: Element) -> Element:
    """U_{p^{1/2}} [L_v', L_w'] z' with primed vectors pulled back by U_{p^{-1/2}}."""
    p = _as_point(p)
    algebra = p.algebra
    vv, ww, zz = (p.u_inv_sqrt @ e.coords for e in (v, w, z))
    lv, lw = algebra.left_mult(vv), algebra.left_mult(ww)
    return Element(algebra, p.u_sqrt @ ((lv @ lw - lw @ lv) @ zz))


def transport_curvature_check(
    x: ConePoint, y: ConePoint, t: float, v: Element, w: Element, z: Element
) -> float:
    """
    Relative gap between P R_x(v,w)z and R_{alpha(t)}(Pv, Pw)Pz, where P is
    parallel transport along alpha_{x,y} up to time t. Vanishes when the
    curvature tensor is parallel.
    """
    x, y = _as_point(x), _as_point(y)
    moved = geodesic_between(x, y, t)
    transported = parallel_transport(x, y, t, curvature(x, v, w, z)).coords
    pv, pw, pz = (parallel_transport(x, y, t, e) for e in (v, w, z))
    recomputed = curvature(moved, pv, pw, pz).coords
    return float(np.linalg.norm(transported - recomputed)) / (1.0 + float(np.linalg.norm(transported)))


# ============= Killing fields =============

def killing_field(x: Element, p: ConePoint) -> Element:
    """X(p) = p o x."""
    return _as_point(p).p.circ(x)


def killing_flow(x: Element, p: ConePoint, t: float) -> ConePoint:
    """rho_t(p) = e^{t L_x}(p)."""
    p = _as_point(p)
    flow = op_exp(LinOp(x.algebra, t * x.algebra.left_mult(x.coords)))
    return ConePoint(flow.apply(p.p))


# ============= Finsler structure =============

def finsler_norm(p: ConePoint, v: Element, gauge: Optional[GaugeFunction] = None) -> float:
    """|v|_p = ||U_{p^{-1/2}} v|| in the order norm or a gauge norm."""
    p = _as_point(p)
    return element_norm(Element(p.algebra, p.u_inv_sqrt @ v.coords), gauge)


def thompson_distance(p: ConePoint, q: ConePoint) -> float:
    """||log(U_{p^{-1/2}} q)||."""
    p, q = _as_point(p), _as_point(q)
    return jb_norm(relative_log(p, q))


def lie_velocity(gamma: Element, dgamma: Element, method: str = "quadrature") -> Element:
    """
    U_{gamma^{-1/2}} gamma' for gamma = exp(Gamma), gamma' along Gamma'.

    method "quadrature" evaluates {G(ad L_Gamma) L_Gamma'}(1); "direct" differentiates
    exp(Gamma + s Gamma') at s = 0 by central differences; "peirce" uses the analytic
    derivative of exp in the Peirce frame of Gamma.
    """
    algebra = check_same_algebra(gamma, dgamma)
    if method == "quadrature":
        return sinh_ad_apply(gamma, dgamma)
    if method == "direct":
        h = get_settings().fd_step
        derivative = central_difference(lambda s: exp(gamma + s * dgamma).coords, 0.0, h)
    elif method == "peirce":
        derivative = functional_derivative(gamma, np.exp, np.exp, dgamma).coords
    else:
        raise ValueError(f"Unknown lie_velocity method '{method}'")
    return Element(algebra, quadratic_matrix(algebra, exp(-0.5 * gamma).coords) @ derivative)


def speed(point: Element, velocity: Element, gauge: Optional[GaugeFunction] = None) -> float:
    """Finsler speed ||U_{gamma^{-1/2}} gamma'|| at one path sample."""
    return finsler_norm(ConePoint(point), velocity, gauge)


def path_length(path: SampledPath, gauge: Optional[GaugeFunction] = None) -> float:
    """Composite Simpson quadrature of the Finsler speed over the path grid."""
    if not path.cone:
        raise ValueError("path_length needs a path flagged as a cone path")
    speeds = [speed(x, path.velocity(t), gauge) for t, x in zip(path.grid, path.points)]
    return float(simpson(speeds))


# ============= Path families =============

def exp_coordinate_path(
    base: ConePoint,
    log_point,
    log_velocity,
    intervals: Optional[int] = None,
) -> SampledPath:
    """t -> U_{b^{1/2}} exp(Gamma(t)) with analytic velocity."""
    base = _as_point(base)
    algebra = base.algebra

    def point(t: float) -> Element:
        return Element(algebra, base.u_sqrt @ exp(log_point(t)).coords)

    def velocity(t: float) -> Element:
        inner = functional_derivative(log_point(t), np.exp, np.exp, log_velocity(t))
        return Element(algebra, base.u_sqrt @ inner.coords)

    return SampledPath(algebra, point, velocity, intervals=intervals)


def competitor_path(
    base: ConePoint,
    v: Element,
    amplitudes: Sequence[float],
    directions: Sequence[Element],
    intervals: Optional[int] = None,
) -> SampledPath:
    """
    Endpoint-preserving perturbation of the geodesic from base with velocity v.

    In log coordinates at base: Gamma(t) = t z + sum_j a_j sin(j pi t) w_j,
    z = U_{b^{-1/2}} v. Zero amplitudes give the geodesic itself.
    """
    base = _as_point(base)
    algebra = base.algebra
    z = Element(algebra, base.u_inv_sqrt @ v.coords)
    modes = list(zip(amplitudes, directions))

    def log_point(t: float) -> Element:
        out = t * z
        for j, (a, w) in enumerate(modes, start=1):
            out = out + (a * np.sin(j * np.pi * t)) * w
        return out

    def log_velocity(t: float) -> Element:
        out = z
        for j, (a, w) in enumerate(modes, start=1):
            out = out + (a * j * np.pi * np.cos(j * np.pi * t)) * w
        return out

    return exp_coordinate_path(base, log_point, log_velocity, intervals)


def convexity_profile(
    a: ConePoint, b: ConePoint, c: ConePoint, d: ConePoint, times: Sequence[float]
) -> List[float]:
    """dist(alpha_{a,b}(t), alpha_{c,d}(t)) at the given times."""
    return [thompson_distance(geodesic_between(a, b, t), geodesic_between(c, d, t)) for t in times]
