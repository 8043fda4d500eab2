"""
Immutable value types: algebra elements and dense linear operators on them.
"""

from dataclasses import dataclass
from typing import Callable, List, Union

import numpy as np

from conelab.algebras import Algebra
from conelab.errors import AlgebraMismatchError, SingularElementError

Scalar = Union[int, float, np.floating]


def _frozen(values, shape) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.shape != shape:
        raise ValueError(f"Expected shape {shape}, got {array.shape}")
    array.setflags(write=False)
    return array


def check_same_algebra(*items) -> Algebra:
    """Return the shared algebra or raise AlgebraMismatchError."""
    algebra = items[0].algebra
    for item in items[1:]:
        if item.algebra != algebra:
            raise AlgebraMismatchError(f"Operands live in {algebra.spec} and {item.algebra.spec}")
    return algebra


@dataclass(frozen=True, eq=False)
class Element:
    """Coordinate vector of a point of V in the algebra's basis."""

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    algebra: Algebra
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords, (self.algebra.dim,)))

    @classmethod
    def zero(cls, algebra: Algebra) -> "Element":
        return cls(algebra, np.zeros(algebra.dim))

    @classmethod
    def unit(cls, algebra: Algebra) -> "Element":
        return cls(algebra, algebra.unit_coords)

    @classmethod
    def basis_vector(cls, algebra: Algebra, j: int) -> "Element":
        return cls(algebra, np.eye(algebra.dim)[j])

    @classmethod
    def from_matrix(cls, algebra: Algebra, matrix) -> "Element":
        """Build a sym(n) element from a symmetric matrix."""
        if not hasattr(algebra, "from_matrix"):
            raise AlgebraMismatchError(f"{algebra.spec} has no matrix model")
        return cls(algebra, algebra.from_matrix(matrix))

    def to_matrix(self) -> np.ndarray:
        if not hasattr(self.algebra, "to_matrix"):
            raise AlgebraMismatchError(f"{self.algebra.spec} has no matrix model")
        return self.algebra.to_matrix(self.coords)

    def circ(self, other: "Element") -> "Element":
        check_same_algebra(self, other)
        return Element(self.algebra, self.algebra.product(self.coords, other.coords))

    def norm2(self) -> float:
        """Euclidean norm of the coordinates (used for residual scaling)."""
        return float(np.linalg.norm(self.coords))

    def __add__(self, other: "Element") -> "Element":
        check_same_algebra(self, other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        check_same_algebra(self, other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __mul__(self, scalar: Scalar) -> "Element":
        return Element(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "Element":
        return Element(self.algebra, self.coords / float(scalar))

    def __repr__(self) -> str:
        return f"Element({self.algebra.spec}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class LinOp:
    """Dense operator on V; column j is the image of basis vector j."""

    __array_ufunc__ = None

    algebra: Algebra
    entries: np.ndarray

    def __post_init__(self):
        d = self.algebra.dim
        object.__setattr__(self, "entries", _frozen(self.entries, (d, d)))

    @classmethod
    def identity(cls, algebra: Algebra) -> "LinOp":
        return cls(algebra, np.eye(algebra.dim))

    @classmethod
    def zeros(cls, algebra: Algebra) -> "LinOp":
        return cls(algebra, np.zeros((algebra.dim, algebra.dim)))

    @classmethod
    def from_function(cls, algebra: Algebra, fn: Callable[[Element], Element]) -> "LinOp":
        """Tabulate a linear map by its action on the basis."""
        columns = [fn(Element.basis_vector(algebra, j)).coords for j in range(algebra.dim)]
        return cls(algebra, np.column_stack(columns))

    def apply(self, x: Element) -> Element:
        check_same_algebra(self, x)
        return Element(self.algebra, self.entries @ x.coords)

    __call__ = apply

    def __matmul__(self, other: "LinOp") -> "LinOp":
        check_same_algebra(self, other)
        return LinOp(self.algebra, self.entries @ other.entries)

    def __add__(self, other: "LinOp") -> "LinOp":
        check_same_algebra(self, other)
        return LinOp(self.algebra, self.entries + other.entries)

    def __sub__(self, other: "LinOp") -> "LinOp":
        check_same_algebra(self, other)
        return LinOp(self.algebra, self.entries - other.entries)

    def __neg__(self) -> "LinOp":
        return LinOp(self.algebra, -self.entries)

    def __mul__(self, scalar: Scalar) -> "LinOp":
        return LinOp(self.algebra, float(scalar) * self.entries)

    __rmul__ = __mul__

    @property
    def T(self) -> "LinOp":
        return LinOp(self.algebra, self.entries.T)

    def inverse(self) -> "LinOp":
        try:
            return LinOp(self.algebra, np.linalg.inv(self.entries))
        except np.linalg.LinAlgError as exc:
            raise SingularElementError(f"Operator is singular: {exc}") from exc

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    def to_rows(self) -> List[List[float]]:
        """Row-major block for CSV dumps."""
        return self.entries.tolist()

    def __repr__(self) -> str:
        return f"LinOp({self.algebra.spec}, d={self.algebra.dim})"
