"""End-to-end classification of a singular point at the origin."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .contact import build_diagram, contact_matrix
from .diagram import Diagram, DNode, canonical_text, diagram_to_json
from .errors import NeedsPreparation, ZeroPolynomial
from .numbers import CNum
from .poly import BivariatePoly
from .polygon import NewtonPolygon, newton_polygon
from .puiseux import ExpansionSettings, expand_to_probranches, puiseux_expand
from .roots import find_roots, UnivariatePoly

Q = Fraction

SHEAR_SEQUENCE = (1, -1, 2, -2, 3, -3, 4, -4, 5, -5)


@dataclass(frozen=True)
class CanonicalKey:
    mode: str                   # "real" | "complex"
    text: str


@dataclass
class TangentFactor:
    kind: str                   # "linear" | "quadratic" | "y_axis"
    data: tuple                 # linear: (slope,), quadratic: (p, q) for y^2+p*xy+q*x^2
    multiplicity: int

    def __str__(self):
        if self.kind == "y_axis":
            body = "x"
        elif self.kind == "linear":
            (s,) = self.data
            if s == 0:
                body = "y"
            else:
                body = f"(y - {s}*x)" if _sign_ok(s) else f"(y + {-s}*x)"
        else:
            p, q = self.data
            mid = "" if p == 0 else f" + {p}*x*y" if _sign_ok(p) else f" - {-p}*x*y"
            body = f"(y^2{mid} + {q}*x^2)"
        return body if self.multiplicity == 1 else f"{body}^{self.multiplicity}"


def _sign_ok(v):
    try:
        return v >= 0
    except TypeError:  # pragma: no cover
        return True


def multiplicity_at_origin(f: BivariatePoly) -> int:
    """min total degree; 0 (regular, nothing to classify) if f(0,0) != 0."""
    if f.is_zero():
        raise ZeroPolynomial("multiplicity of the zero polynomial")
    return f.multiplicity()


def tangent_cone(f: BivariatePoly, settings: ExpansionSettings | None = None):
    """Factor the lowest homogeneous form over R.

    Returns a list of TangentFactor: real linear factors y - s*x (the pure-x
    factor, i.e. the y-axis, reported distinctly) and irreducible real
    quadratics y^2 + p*xy + q*x^2, with multiplicities.
    """
    settings = settings or ExpansionSettings()
    form = f.lowest_form()
    m = form.multiplicity()
    with mp.workprec(settings.precision_bits):
        k = min(a for a, _ in form.terms)       # x^k | form: y-axis factor
        out = []
        if k:
            out.append(TangentFactor("y_axis", (), k))
        # dehomogenize the rest: p(t) = (form / x^k)(1, t)
        coeffs = {}
        for (a, b), c in form.terms.items():
            coeffs[b] = c
        deg = m - k
        dense = [coeffs.get(b, Q(0)) for b in range(deg + 1)]
        if deg == 0:
            return out
        clusters = find_roots(UnivariatePoly.from_rationals(dense),
                              tol=settings.tol)
        used = [False] * len(clusters)
        for i, cl in enumerate(clusters):
            if used[i]:
                continue
            used[i] = True
            v = cl.value
            if v.is_real(settings.eq_tol):
                slope = v.exact[0] if v.exact is not None else v.v.real
                out.append(TangentFactor("linear", (slope,), cl.multiplicity))
            else:
                partner = None
                for j in range(i + 1, len(clusters)):
                    if used[j]:
                        continue
                    d = abs(clusters[j].value.v - mp.conj(v.v))
                    if d <= 1e-10 * max(1, abs(v.v)):
                        partner = j
                        break
                if partner is None or clusters[partner].multiplicity != cl.multiplicity:
                    from .errors import NumericFailure
                    raise NumericFailure(
                        "complex tangent direction without conjugate partner")
                used[partner] = True
                if v.exact is not None:
                    re, im = v.exact
                    p = -2 * re
                    qq = re * re + im * im
                else:
                    p = -2 * v.v.real
                    qq = abs(v.v) ** 2
                    p = _nice(p)
                    qq = _nice(qq)
                out.append(TangentFactor("quadratic", (p, qq), cl.multiplicity))
        return out


def _nice(x, max_den=10 ** 6):
    """Snap a float to a small rational when it is one to working accuracy."""
    fr = Fraction(float(x)).limit_denominator(max_den)
    if abs(float(fr) - float(x)) <= 1e-25 * max(1.0, abs(float(x))):
        return fr
    return float(x)


@dataclass
class ClassificationResult:
    multiplicity: int
    tangent_cone: list
    polygon: NewtonPolygon | None
    cycles: list
    branches: list
    diagram: Diagram | None
    key_real: CanonicalKey
    key_complex: CanonicalKey
    flags: set = field(default_factory=set)
    shear_lambda: Fraction | None = None

    @property
    def provisional(self):
        return bool({"unseparated", "numeric_low_confidence"} & self.flags)

    def to_json(self):
        return {
            "multiplicity": self.multiplicity,
            "tangent_cone": [str(t) for t in self.tangent_cone],
            "shear": None if self.shear_lambda is None else str(self.shear_lambda),
            "polygon": self.polygon.to_json() if self.polygon else None,
            "cycles": [c.to_json() for c in self.cycles],
            "diagram": diagram_to_json(self.diagram) if self.diagram else None,
            "key_real": self.key_real.text,
            "key_complex": self.key_complex.text,
            "flags": sorted(self.flags),
        }


def canonical_form(d: Diagram, mode: str = "real") -> CanonicalKey:
    if mode not in ("real", "complex"):
        raise ValueError(f"unknown mode {mode!r}")
    return CanonicalKey(mode=mode, text=canonical_text(d, mode))


def equivalent(d1: Diagram, d2: Diagram, mode: str = "real") -> bool:
    return canonical_form(d1, mode) == canonical_form(d2, mode)


def classify_curve(f: BivariatePoly,
                   settings: ExpansionSettings | None = None,
                   shear_policy: str = "auto") -> ClassificationResult:
    """Full pipeline: prepare, expand, contact, diagram, canonical keys."""
    settings = settings or ExpansionSettings()
    if f.is_zero():
        raise ZeroPolynomial("cannot classify the zero polynomial")
    flags = set()
    m = f.multiplicity()
    if m == 0:
        flags.add("regular_point")
        empty = Diagram(root=DNode(leaf_id=0))
        return ClassificationResult(
            multiplicity=0, tangent_cone=[], polygon=None, cycles=[],
            branches=[], diagram=empty,
            key_real=canonical_form(empty, "real"),
            key_complex=canonical_form(empty, "complex"),
            flags=flags)

    cone = tangent_cone(f, settings)
    work = f
    lam = None
    needs = not _has_full_pure_y(work, m)
    if needs:
        if shear_policy == "never":
            raise NeedsPreparation("no y^m term and shearing is disabled")
        for cand in SHEAR_SEQUENCE:
            sheared = work.shear(Q(cand))
            if _has_full_pure_y(sheared, m):
                work = sheared
                lam = Q(cand)
                break
        else:
            raise NeedsPreparation("no shear in the probe sequence worked")

    polygon = newton_polygon(work)
    cycles, pflags = puiseux_expand(work, settings)
    flags |= pflags
    branches = expand_to_probranches(cycles, settings)
    if len(branches) == 1:
        diagram = Diagram(root=DNode(leaf_id=branches[0].branch_id))
    else:
        cm = contact_matrix(branches, settings)
        diagram = build_diagram(cm, branches)
    diagram.flags |= flags
    return ClassificationResult(
        multiplicity=m,
        tangent_cone=cone,
        polygon=polygon,
        cycles=cycles,
        branches=branches,
        diagram=diagram,
        key_real=canonical_form(diagram, "real"),
        key_complex=canonical_form(diagram, "complex"),
        flags=flags,
        shear_lambda=lam,
    )


def _has_full_pure_y(f: BivariatePoly, m: int) -> bool:
    """A y^m term is present, so the polygon realizes the multiplicity."""
    return (0, m) in f.terms
