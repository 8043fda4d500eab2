"""
Concrete Euclidean Jordan algebras.

Each algebra works on raw coordinate arrays: a specialized product kernel,
a spectral kernel returning eigenvalues with primitive idempotents, the unit,
and the trace functional. The dense structure-constant tensor is derived from
the specialized kernel and serves as the generic (oracle) product path.

Bases are orthonormal for the trace form up to a per-summand scalar, so every
multiplication operator L_x is a symmetric matrix in coordinates.
"""

import logging
import math
import re
from abc import ABC, abstractmethod
from enum import Enum
from functools import cached_property, lru_cache
from typing import List, Tuple

import numpy as np

from conelab.config import get_settings
from conelab.errors import AlgebraSpecError, ConvergenceError

logger = logging.getLogger(__name__)


class AlgebraKind(str, Enum):
    """Supported algebra families."""
    SYM = "sym"
    SPIN = "spin"
    RN = "rn"
    SUM = "sum"


# ============= Eigen-solver =============

def jacobi_eigh(
    matrix: np.ndarray,
    threshold: float = 1e-13,
    max_sweeps: int = 50,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        matrix: Symmetric n x n array (not modified)
        threshold: Relative off-diagonal Frobenius norm at which sweeps stop
        max_sweeps: Sweep budget before giving up

    Returns:
        (eigenvalues, eigenvectors) with eigenvectors as columns

    Raises:
        ConvergenceError: if the off-diagonal mass is still above threshold
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"Matrix must be square, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n})")
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)

    raise ConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e}, scale {scale:.3e})"
    )


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Apply one in-place rotation annihilating a[p, q]."""
    phi = 0.5 * math.atan2(2.0 * a[p, q], a[q, q] - a[p, p])
    c, s = math.cos(phi), math.sin(phi)

    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = a[q, p] = 0.0

    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def symmetric_eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Dispatch to the configured eigen backend."""
    settings = get_settings()
    if settings.eigen_backend == "lapack":
        return np.linalg.eigh(matrix)
    return jacobi_eigh(matrix, settings.jacobi_threshold, settings.jacobi_max_sweeps)


# ============= Algebras =============

class Algebra(ABC):
    """
    A finite-dimensional Euclidean Jordan algebra in coordinates.

    Subclasses supply the specialized kernels; structure constants, the
    generic product, the Gram matrix of the trace form and multiplication
    operators are derived here.
    """

    kind: AlgebraKind

    def __init__(self, spec: str, dim: int, rank: int):
        self.spec = spec
        self.dim = dim
        self.rank = rank

    # --- kernels supplied by subclasses ---

    @property
    @abstractmethod
    def basis(self) -> List[str]:
        """Basis labels."""

    @property
    @abstractmethod
    def unit_coords(self) -> np.ndarray:
        """Coordinates of the unit."""

    @property
    @abstractmethod
    def trace_vector(self) -> np.ndarray:
        """Coefficients of the Jordan trace functional."""

    @abstractmethod
    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Specialized Jordan product of coordinate vectors."""

    @abstractmethod
    def eigh(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Unsorted eigenvalues (rank,) and primitive idempotents (rank, dim)."""

    # --- derived structure ---

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[i, j, :] = e_i o e_j."""
        eye = np.eye(self.dim)
        c = np.empty((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                c[i, j] = self.product(eye[i], eye[j])
        c.setflags(write=False)
        return c

    @cached_property
    def gram(self) -> np.ndarray:
        """Gram matrix of the trace form tr(e_i o e_j)."""
        g = np.einsum("ijk,k->ij", self.structure_constants, self.trace_vector)
        g.setflags(write=False)
        return g

    def generic_product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product through the dense structure constants."""
        return np.einsum("i,j,ijk->k", a, b, self.structure_constants)

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of L_x (column j is x o e_j)."""
        return np.einsum("i,ijk->kj", x, self.structure_constants)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Algebra) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"Algebra('{self.spec}', dim={self.dim}, rank={self.rank})"


class SymmetricMatrixAlgebra(Algebra):
    """sym(n): real symmetric n x n matrices with x o y = (xy + yx)/2."""

    kind = AlgebraKind.SYM
    MAX_SIZE = 6

    def __init__(self, n: int):
        super().__init__(f"sym:{n}", n * (n + 1) // 2, n)
        self.n = n
        self._rows, self._cols = np.triu_indices(n, 1)

    @property
    def basis(self) -> List[str]:
        diagonal = [f"E{i + 1}{i + 1}" for i in range(self.n)]
        off = [f"(E{i + 1}{j + 1}+E{j + 1}{i + 1})/sqrt2" for i, j in zip(self._rows, self._cols)]
        return diagonal + off

    @property
    def unit_coords(self) -> np.ndarray:
        return self.from_matrix(np.eye(self.n))

    @property
    def trace_vector(self) -> np.ndarray:
        return np.concatenate([np.ones(self.n), np.zeros(self.dim - self.n)])

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        m = np.diag(x[: self.n]).astype(float)
        off = x[self.n:] / math.sqrt(2.0)
        m[self._rows, self._cols] = off
        m[self._cols, self._rows] = off
        return m

    def from_matrix(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        sym = 0.5 * (m + m.T)
        return np.concatenate([np.diag(sym), math.sqrt(2.0) * sym[self._rows, self._cols]])

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        am, bm = self.to_matrix(a), self.to_matrix(b)
        return self.from_matrix(0.5 * (am @ bm + bm @ am))

    def eigh(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        w, q = symmetric_eigh(self.to_matrix(x))
        idempotents = np.array([self.from_matrix(np.outer(q[:, i], q[:, i])) for i in range(self.n)])
        return w, idempotents


class SpinFactor(Algebra):
    """spin(k): R x R^(k-1) with (x0, x) o (y0, y) = (x0 y0 + x.y, x0 y + y0 x)."""

    kind = AlgebraKind.SPIN
    MAX_SIZE = 16

    def __init__(self, k: int):
        super().__init__(f"spin:{k}", k, 2)
        self.k = k

    @property
    def basis(self) -> List[str]:
        return ["e0"] + [f"e{i}" for i in range(1, self.k)]

    @property
    def unit_coords(self) -> np.ndarray:
        u = np.zeros(self.k)
        u[0] = 1.0
        return u

    @property
    def trace_vector(self) -> np.ndarray:
        return 2.0 * self.unit_coords

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.empty(self.k)
        out[0] = a[0] * b[0] + a[1:] @ b[1:]
        out[1:] = a[0] * b[1:] + b[0] * a[1:]
        return out

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        m = x[0] * np.eye(self.k)
        m[0, 1:] = x[1:]
        m[1:, 0] = x[1:]
        return m

    def eigh(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        radius = float(np.linalg.norm(x[1:]))
        gap = get_settings().multiplicity_gap * (1.0 + abs(x[0]) + radius)
        direction = np.zeros(self.k - 1)
        if radius > gap:
            direction = x[1:] / radius
        else:
            # Repeated eigenvalue: any unit direction splits the unit.
            direction[0] = 1.0
        plus = 0.5 * np.concatenate([[1.0], direction])
        minus = 0.5 * np.concatenate([[1.0], -direction])
        return np.array([x[0] + radius, x[0] - radius]), np.array([plus, minus])


class EuclideanSpace(Algebra):
    """rn(k): R^k with the componentwise product."""

    kind = AlgebraKind.RN
    MAX_SIZE = 64

    def __init__(self, k: int):
        super().__init__(f"rn:{k}", k, k)
        self.k = k

    @property
    def basis(self) -> List[str]:
        return [f"e{i + 1}" for i in range(self.k)]

    @property
    def unit_coords(self) -> np.ndarray:
        return np.ones(self.k)

    @property
    def trace_vector(self) -> np.ndarray:
        return np.ones(self.k)

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a * b

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        return np.diag(x).astype(float)

    def eigh(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.array(x, dtype=float), np.eye(self.k)


class DirectSum(Algebra):
    """Binary direct sum A + B with blockwise product."""

    kind = AlgebraKind.SUM

    def __init__(self, first: Algebra, second: Algebra):
        super().__init__(f"sum:{first.spec}+{second.spec}", first.dim + second.dim, first.rank + second.rank)
        self.first = first
        self.second = second

    def _split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return x[: self.first.dim], x[self.first.dim:]

    @property
    def basis(self) -> List[str]:
        return [f"A.{b}" for b in self.first.basis] + [f"B.{b}" for b in self.second.basis]

    @property
    def unit_coords(self) -> np.ndarray:
        return np.concatenate([self.first.unit_coords, self.second.unit_coords])

    @property
    def trace_vector(self) -> np.ndarray:
        return np.concatenate([self.first.trace_vector, self.second.trace_vector])

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a1, a2 = self._split(a)
        b1, b2 = self._split(b)
        return np.concatenate([self.first.product(a1, b1), self.second.product(a2, b2)])

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = self._split(x)
        m = np.zeros((self.dim, self.dim))
        d1 = self.first.dim
        m[:d1, :d1] = self.first.left_mult(x1)
        m[d1:, d1:] = self.second.left_mult(x2)
        return m

    def eigh(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x1, x2 = self._split(x)
        w1, c1 = self.first.eigh(x1)
        w2, c2 = self.second.eigh(x2)
        d1 = self.first.dim
        idempotents = np.zeros((self.rank, self.dim))
        idempotents[: self.first.rank, :d1] = c1
        idempotents[self.first.rank:, d1:] = c2
        return np.concatenate([w1, w2]), idempotents


# ============= Parsing =============

_SIMPLE = re.compile(r"^(sym|spin|rn):(\d+)$")


def _parse_simple(text: str) -> Algebra:
    match = _SIMPLE.match(text)
    if not match:
        raise AlgebraSpecError(f"Unrecognized algebra spec '{text}' (expected sym:n, spin:k, rn:k or sum:A+B)")
    kind, size = match.group(1), int(match.group(2))
    if kind == "sym":
        if not 1 <= size <= SymmetricMatrixAlgebra.MAX_SIZE:
            raise AlgebraSpecError(f"sym:n supports 1 <= n <= {SymmetricMatrixAlgebra.MAX_SIZE}, got {size}")
        return SymmetricMatrixAlgebra(size)
    if kind == "spin":
        if not 2 <= size <= SpinFactor.MAX_SIZE:
            raise AlgebraSpecError(f"spin:k supports 2 <= k <= {SpinFactor.MAX_SIZE}, got {size}")
        return SpinFactor(size)
    if not 1 <= size <= EuclideanSpace.MAX_SIZE:
        raise AlgebraSpecError(f"rn:k supports 1 <= k <= {EuclideanSpace.MAX_SIZE}, got {size}")
    return EuclideanSpace(size)


@lru_cache(maxsize=64)
def make_algebra(spec: str) -> Algebra:
    """
    Parse an algebra specification string.

    Args:
        spec: "sym:3", "spin:4", "rn:5" or a binary sum such as "sum:sym:2+spin:3"

    Returns:
        Shared, immutable Algebra instance

    Raises:
        AlgebraSpecError: on malformed or out-of-range specs
    """
    text = spec.strip().lower().replace(" ", "")
    if text.startswith("sum:"):
        parts = text[len("sum:"):].split("+")
        if len(parts) != 2:
            raise AlgebraSpecError(f"sum expects exactly two summands, got '{spec}'")
        return DirectSum(_parse_simple(parts[0]), _parse_simple(parts[1]))
    return _parse_simple(text)
