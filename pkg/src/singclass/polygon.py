"""Newton polygons of curve germs.

Coordinates here are (a, b) = (x-exponent, y-exponent) and the edge
exponent is mu = da/db along the lower hull from the pure-y intercept down
to the support row of minimal y-exponent.  All slopes are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EdgeMismatch, NeedsPreparation, ZeroPolynomial
from .numbers import CNum
from .poly import BivariatePoly, CPoly
from .roots import UnivariatePoly

Q = Fraction


@dataclass(frozen=True)
class PolygonEdge:
    p1: tuple[int, int]          # high-b endpoint
    p2: tuple[int, int]          # low-b endpoint
    mu: Fraction                 # (a2 - a1) / (b1 - b2) > 0
    height: int                  # b1 - b2
    face: UnivariatePoly         # degree = height, ascending from the low end

    def lattice_points(self):
        """Support-lattice points on the closed edge, low end first."""
        da = self.p2[0] - self.p1[0]
        db = self.p1[1] - self.p2[1]
        from math import gcd
        g = gcd(da, db)
        step_a, step_b = da // g, db // g
        pts = []
        a, b = self.p2
        for _ in range(g + 1):
            pts.append((a, b))
            a -= step_a
            b += step_b
        return pts


@dataclass
class NewtonPolygon:
    edges: list[PolygonEdge]
    support: list[tuple[int, int]]
    y_intercept: tuple[int, int] | None = None
    b_min: int = 0

    @property
    def vertices(self):
        if not self.edges:
            return [self.y_intercept] if self.y_intercept else []
        vs = [self.edges[0].p1]
        vs.extend(e.p2 for e in self.edges)
        return vs

    def total_height(self):
        return sum(e.height for e in self.edges)

    def to_json(self):
        return {
            "support": [list(p) for p in self.support],
            "edges": [
                {
                    "p1": list(e.p1),
                    "p2": list(e.p2),
                    "mu": f"{e.mu.numerator}/{e.mu.denominator}",
                    "height": e.height,
                    "face": [_cnum_str(c) for c in e.face.coeffs],
                }
                for e in self.edges
            ],
        }


def _cnum_str(c: CNum) -> str:
    if c.exact is not None:
        re, im = c.exact
        if im == 0:
            return f"{re.numerator}/{re.denominator}" if re.denominator != 1 else str(re.numerator)
        return f"{re}+{im}i"
    return str(c.v)


def _support_and_coeff(f):
    if isinstance(f, BivariatePoly):
        return f.support(), (lambda k: CNum.from_rational(f.terms[k]))
    if isinstance(f, CPoly):
        return f.support(), (lambda k: f.terms[k])
    raise TypeError(f"unsupported polynomial type {type(f)!r}")


def newton_polygon(f) -> NewtonPolygon:
    """Walker-style lower hull of the support with face polynomials.

    Requires a pure-y term (a term x^0 y^b); callers without one should
    shear into generic position first.
    """
    support, coeff = _support_and_coeff(f)
    if not support:
        raise ZeroPolynomial("Newton polygon of the zero polynomial")
    pure_y = [b for a, b in support if a == 0]
    if not pure_y:
        raise NeedsPreparation(
            "no pure y^m term; shear the curve into generic position")
    start = (0, min(pure_y))
    b_min = min(b for _, b in support)
    bottom_row = [a for a, b in support if b == b_min]
    end = (min(bottom_row), b_min)

    edges = []
    cur = start
    while cur[1] > b_min:
        # next hull vertex: minimal slope mu, then farthest along the edge
        best_mu, best_pt = None, None
        for (a, b) in support:
            if b >= cur[1] or a <= cur[0]:
                continue
            mu = Q(a - cur[0], cur[1] - b)
            if best_mu is None or mu < best_mu or (mu == best_mu and b < best_pt[1]):
                best_mu, best_pt = mu, (a, b)
        if best_pt is None:
            break
        face_coeffs = _face(support, coeff, cur, best_pt)
        edges.append(PolygonEdge(cur, best_pt, best_mu,
                                 cur[1] - best_pt[1], UnivariatePoly(face_coeffs)))
        cur = best_pt
    return NewtonPolygon(edges=edges, support=support,
                         y_intercept=start, b_min=b_min)


def _face(support, coeff, p1, p2):
    """Coefficients of the edge's face polynomial, t^(b - b2) ascending."""
    a1, b1 = p1
    a2, b2 = p2
    da, db = a2 - a1, b1 - b2
    coeffs = [CNum.zero() for _ in range(db + 1)]
    for (a, b) in support:
        if b2 <= b <= b1:
            # on the edge line: (a - a1) * db == (b1 - b) * da
            if (a - a1) * db == (b1 - b) * da:
                coeffs[b - b2] = coeff((a, b))
    return coeffs


def face_polynomial(f, edge: PolygonEdge) -> UnivariatePoly:
    """Face polynomial of an edge, validated against f's polygon."""
    poly = newton_polygon(f)
    for e in poly.edges:
        if e.p1 == edge.p1 and e.p2 == edge.p2:
            return e.face
    raise EdgeMismatch(f"({edge.p1}, {edge.p2}) is not an edge of this polygon")
