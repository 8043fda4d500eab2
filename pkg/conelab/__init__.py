# conelab: geometry of symmetric cones and their structure groups
__version__ = "1.0.0"

from conelab.algebras import Algebra, make_algebra
from conelab.elements import Element, LinOp

__all__ = ["Algebra", "Element", "LinOp", "make_algebra", "__version__"]
