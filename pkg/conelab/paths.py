"""
Sampled paths and the fixed-grid integrators shared by cone and group geometry.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
import scipy.integrate

from conelab.algebras import Algebra
from conelab.config import get_settings
from conelab.elements import Element
from conelab.errors import DomainError
from conelab.jordan import spectral_decompose

logger = logging.getLogger(__name__)

State = TypeVar("State")


def simpson(values: Sequence, a: float = 0.0, b: float = 1.0):
    """Composite Simpson rule on an even number of uniform intervals."""
    samples = np.asarray(values, dtype=float)
    n = samples.shape[0] - 1
    if n < 2 or n % 2:
        raise ValueError(f"Simpson needs an even number of intervals, got {n}")
    return scipy.integrate.simpson(samples, dx=(b - a) / n, axis=0)


def central_difference(fn: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    return (np.asarray(fn(t + h)) - np.asarray(fn(t - h))) / (2.0 * h)


def second_difference(fn: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    return (np.asarray(fn(t + h)) - 2.0 * np.asarray(fn(t)) + np.asarray(fn(t - h))) / (h * h)


def rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t1: float,
    steps: int,
    monitor: Optional[Callable[[float, np.ndarray], None]] = None,
) -> List[np.ndarray]:
    """
    Classical fourth-order Runge-Kutta on a fixed grid.

    Args:
        rhs: f(t, y) returning dy/dt with the shape of y
        y0: Initial state
        t0, t1: Integration interval
        steps: Number of fixed steps
        monitor: Called as monitor(t, y) after every step (may raise to abort)

    Returns:
        States at the steps + 1 grid times
    """
    h = (t1 - t0) / steps
    y = np.array(y0, dtype=float)
    states = [y.copy()]
    t = t0
    for i in range(steps):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + (i + 1) * h
        states.append(y.copy())
        if monitor is not None:
            monitor(t, y)
    return states


@dataclass(frozen=True, eq=False)
class SampledPath:
    """
    Curve t -> point(t) on [0, 1], sampled on a uniform grid.

    The velocity is the analytic closure when given, else a central difference
    with step fd_step.
    """

    algebra: Algebra
    point_fn: Callable[[float], Element]
    velocity_fn: Optional[Callable[[float], Element]] = None
    intervals: Optional[int] = None
    fd_step: Optional[float] = None
    cone: bool = True

    def __post_init__(self):
        settings = get_settings()
        if self.intervals is None:
            object.__setattr__(self, "intervals", settings.simpson_intervals)
        if self.fd_step is None:
            object.__setattr__(self, "fd_step", settings.fd_step)
        if self.intervals < 2 or self.intervals % 2:
            raise ValueError(f"intervals must be even and >= 2, got {self.intervals}")

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.intervals + 1)

    def point(self, t: float) -> Element:
        return self.point_fn(float(t))

    def velocity(self, t: float) -> Element:
        if self.velocity_fn is not None:
            return self.velocity_fn(float(t))
        h = self.fd_step
        coords = central_difference(lambda s: self.point_fn(s).coords, float(t), h)
        return Element(self.algebra, coords)

    @cached_property
    def points(self) -> List[Element]:
        samples = [self.point(t) for t in self.grid]
        if self.cone:
            for t, x in zip(self.grid, samples):
                spec = spectral_decompose(x)
                if spec.eigenvalues[-1] <= spec.threshold:
                    raise DomainError(f"cone path at t={t:.6f}", float(spec.eigenvalues[-1]), spec.threshold)
        return samples

    def to_rows(self) -> List[List[float]]:
        """CSV rows (t, coords...)."""
        return [[float(t), *x.coords.tolist()] for t, x in zip(self.grid, self.points)]
