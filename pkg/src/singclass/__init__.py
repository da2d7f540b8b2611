"""Classification of plane-curve singular points at the origin.

Pipeline: tangent cone -> Newton polygon -> Puiseux expansion of all
branches -> pairwise exponents of contact -> weighted tree diagram with
conjugate-pair braces -> canonical key (real or complex equivalence).
"""

from .classify import (CanonicalKey, ClassificationResult, canonical_form,
                       classify_curve, equivalent, multiplicity_at_origin,
                       tangent_cone)
from .contact import (ContactMatrix, build_diagram, contact_exponent,
                      contact_matrix, validate_ultrametric)
from .diagram import Diagram, DNode, parse_diagram
from .parser import parse_poly
from .poly import BivariatePoly
from .polygon import NewtonPolygon, PolygonEdge, face_polynomial, newton_polygon
from .puiseux import (ExpansionSettings, ProBranch, PuiseuxCycle,
                      expand_to_probranches, puiseux_expand,
                      residual_valuation)
from .render import to_text, to_tikz
from .roots import RootCluster, UnivariatePoly, find_roots
from .catalogue import (DiagramSpec, FamilySpec, ParamRange, find_realizations,
                        load_manifest, run_catalogue, sample_instances)

__all__ = [
    "BivariatePoly", "CanonicalKey", "ClassificationResult", "ContactMatrix",
    "Diagram", "DNode", "DiagramSpec", "ExpansionSettings", "FamilySpec",
    "NewtonPolygon", "ParamRange", "PolygonEdge", "ProBranch", "PuiseuxCycle",
    "RootCluster", "UnivariatePoly", "build_diagram", "canonical_form",
    "classify_curve", "contact_exponent", "contact_matrix", "equivalent",
    "expand_to_probranches", "face_polynomial", "find_realizations",
    "find_roots", "load_manifest", "multiplicity_at_origin", "newton_polygon",
    "parse_diagram", "parse_poly", "puiseux_expand", "residual_valuation",
    "run_catalogue", "sample_instances", "tangent_cone", "to_text", "to_tikz",
]

__version__ = "0.1.0"
