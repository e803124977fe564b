"""
tmoebius

Floor diagram engine for tropical curve counts on the tropical Möbius strips.
"""

from .core import HalfInt, LaurentPolynomial, Partition, TruncatedSeries, q_analog, sigma1, sigma1_tilde
from .diagram import (
    FloorDiagram, HomologyClass, SurfaceKind, VertexKind, aut_order, canonical_form, genus, homology_class,
    tangency_profile, validate,
)
from .enumeration import classify_components, enumerate_diagrams, enumerate_markings, iter_diagrams
from .errors import (
    ChamberCrossingError, DiagramStructureError, InvalidRequestError, RegularityFitError, TMoebiusError,
)
from .multiplicity import ExponentConvention, InvariantRequest, compute_invariant, invariant_BG, invariant_N

__version__ = "0.1.0"
