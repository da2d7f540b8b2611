"""Newton-Puiseux expansion of curve germs at the origin.

The recursion follows the classical scheme: walk the Newton polygon, root
the face polynomial of each edge, and for a root c of an edge of exponent
p/q substitute x = v^q, y = v^p (c + y') and continue on the normalized
result.  Simple face roots switch to plain power-series Newton iteration
(no further ramification can occur there), so polygon recursion is only
ever paid at multiple roots.

Branches come out as pro-branch series y(x) = sum c_e x^e with rational
exponents.  Deck mates (series that differ by x^(1/q) -> zeta * x^(1/q))
are then grouped into cycles, and each cycle is analysed for real points:
a ray test decides on which side of the x-axis, if any, the branch meets
the real plane.  Realness marks and star pairings for the tree diagram are
made after normalizing each cycle to its own real side; this is what keeps
classification keys invariant under x -> -x and y -> -y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .errors import (DepthExceeded, NeedsPreparation, NonReduced,
                     NumericFailure, ProbeUnderflow, ZeroPolynomial)
from .numbers import CNum, root_of_unity_pi, snap
from .poly import BivariatePoly, CPoly
from .polygon import newton_polygon
from .roots import find_roots
from .series import series_inv, series_mul

Q = Fraction

_RECURSION_CAP = 64


@dataclass
class ExpansionSettings:
    precision_bits: int = 256
    tol: float = 1e-30            # root clustering tolerance
    max_order: Fraction | None = None   # None: adaptive separation-driven
    max_depth: int = 12           # adaptive restarts (order doublings)

    @property
    def eq_tol(self) -> float:
        # scale-aware coefficient equality, ~0.15 decimal digits per bit
        return 10.0 ** (-0.15 * self.precision_bits)

    @property
    def drop_tol(self) -> float:
        return math.ldexp(1.0, -int(0.75 * self.precision_bits))


@dataclass
class PuiseuxCycle:
    cycle_id: int
    terms: list[tuple[Fraction, CNum]]    # representative pro-branch
    ramification: int
    trunc_order: Fraction
    exact: bool = False                   # series terminates (polynomial branch)
    real_rays: list[int] = field(default_factory=list)
    conj_class_id: int = -1
    flags: set = field(default_factory=set)

    def is_real_branch(self) -> bool:
        return bool(self.real_rays)

    def to_json(self):
        return {
            "q": self.ramification,
            "terms": [
                {"exp": f"{e.numerator}/{e.denominator}",
                 "re": mp.nstr(c.v.real, 24), "im": mp.nstr(c.v.imag, 24)}
                for e, c in self.terms
            ],
            "trunc": f"{self.trunc_order.numerator}/{self.trunc_order.denominator}",
            "flags": sorted(self.flags),
        }


@dataclass
class ProBranch:
    branch_id: int
    cycle_id: int
    root_of_unity_index: int
    terms: list[tuple[Fraction, CNum]]
    is_real: bool                  # all coefficients real (series over x > 0)
    real_marked: bool              # real after the cycle's side normalization
    conjugate_partner: int | None = None   # true conjugate (original chart)
    star_partner: int | None = None        # diagram pairing (side-normalized)
    trunc_order: Fraction = Q(0)
    exact: bool = False


# ---------------------------------------------------------------------------
# raw expansion
# ---------------------------------------------------------------------------

def _substitute_edge(g: CPoly, qhat: int, p: int, c: CNum, budget: int,
                     drop_tol) -> CPoly:
    """g(v^qhat, v^p (c + y)) normalized by its v-content.

    budget is the v-order still needed after normalization; terms above
    content + budget cannot influence the kept series terms and are cut.
    """
    out = CPoly({})
    binom_cache = {}
    for (i, j), coeff in g.terms.items():
        ve = qhat * i + p * j
        if j not in binom_cache:
            binom_cache[j] = [Q(math.comb(j, k)) for k in range(j + 1)]
        for k in range(j + 1):
            term = coeff.scale_rational(binom_cache[j][k]) * (c ** (j - k))
            out.add_inplace((ve, k), term)
    out = out.clean(drop_tol)
    if not out.terms:
        raise NumericFailure("substitution annihilated the polynomial")
    content = min(a for a, _ in out.terms)
    out = CPoly({(a - content, b): cc for (a, b), cc in out.terms.items()
                 if a - content <= budget})
    return out


def _newton_continuation(g: CPoly, vcap: int, drop_tol) -> dict[int, CNum]:
    """Solve g(v, s(v)) = 0 for the unique series s with s(0) = 0.

    Requires the germ to be regular in y (nonzero (0,1) coefficient).
    """
    lin = g.coeff(0, 1)
    if lin.is_zero():
        raise NumericFailure("regular continuation needs a simple y-term")
    # numeric-only from here: exact Fractions explode through series inversion
    g = CPoly({k: CNum.from_mpc(c.v) for k, c in g.terms.items()})
    gy = g.y_derivative()
    s = [CNum.zero() for _ in range(vcap + 1)]
    steps = max(1, math.ceil(math.log2(vcap + 1))) + 2
    for _ in range(steps):
        gv = g.eval_series(s, vcap)
        dv = gy.eval_series(s, vcap)
        corr = series_mul(gv, series_inv(dv, vcap), vcap)
        s = [a - b for a, b in zip(s, corr)]
    out = {}
    scale = max((abs(c) for c in s), default=0)
    for n, c in enumerate(s):
        c = snap(c, drop_tol)
        if n >= 1 and not c.is_zero(drop_tol * max(1, scale)):
            out[n] = c
    return out


def _expand(g: CPoly, cap: int, depth: int, settings) -> list[tuple[int, dict, bool]]:
    """All pro-branch solutions y(w) of g to w-order <= cap.

    Returns triples (ram, terms, exact) where terms maps n -> CNum and the
    series is sum terms[n] * w^(n/ram).
    """
    if depth > _RECURSION_CAP:
        raise DepthExceeded(depth)
    g = g.clean(settings.drop_tol)
    if g.is_zero():
        raise ZeroPolynomial("expansion of the zero polynomial")
    out = []
    b_min = min(b for _, b in g.terms)
    if b_min >= 2:
        raise NonReduced(
            "y-multiple component: the germ has a repeated analytic factor")
    if b_min == 1:
        out.append((1, {}, True))
    poly = newton_polygon(g)
    for edge in poly.edges:
        p, qhat = edge.mu.numerator, edge.mu.denominator
        budget = cap * qhat - p
        for cluster in find_roots(edge.face, tol=settings.tol):
            c, r = cluster.value, cluster.multiplicity
            g2 = _substitute_edge(g, qhat, p, c, max(budget, 0), settings.drop_tol)
            if r == 1:
                s = _newton_continuation(g2, max(budget, 0), settings.drop_tol)
                terms = {p: c}
                for n, cc in s.items():
                    terms[p + n] = cc
                out.append((qhat, terms, False))
            else:
                for (r2, t2, exact) in _expand(g2, max(budget, 0), depth + 1,
                                               settings):
                    ram = qhat * r2
                    terms = {p * r2: c}
                    for n, cc in t2.items():
                        terms[p * r2 + n] = cc
                    out.append((ram, terms, exact))
    return out


# ---------------------------------------------------------------------------
# cycle grouping and real-side analysis
# ---------------------------------------------------------------------------

def _branch_key(terms):
    return tuple(sorted((e, float(c.v.real), float(c.v.imag))
                        for e, c in terms.items()))


def _twist_terms(terms, k, q):
    out = {}
    for e, c in terms.items():
        n = e.numerator * (q // e.denominator)
        out[e] = c * root_of_unity_pi(2 * k * n % (2 * q), q)
    return out


def _terms_close(t1, t2, tol):
    if set(t1) != set(t2):
        return False
    for e, c in t1.items():
        d = t2[e]
        if abs(c.v - d.v) > tol * max(1.0, abs(c.v), abs(d.v)):
            return False
    return True


def _group_cycles(branches, settings):
    """Group pro-branch series into deck-transformation orbits (cycles)."""
    remaining = list(range(len(branches)))
    groups = []
    while remaining:
        i = remaining.pop(0)
        ram_i, terms_i, exact_i = branches[i]
        q = 1
        for e in terms_i:
            q = q * e.denominator // math.gcd(q, e.denominator)
        orbit = [i]
        for k in range(1, q):
            tw = _twist_terms(terms_i, k, q)
            hit = None
            for j in remaining:
                if _terms_close(branches[j][1], tw, settings.eq_tol):
                    hit = j
                    break
            if hit is None:
                raise NumericFailure(
                    "incomplete deck orbit; branches not separated yet")
            orbit.append(hit)
            remaining.remove(hit)
        groups.append((q, orbit, exact_i))
    return groups


def _real_rays(terms, q, tol):
    rays = []
    for m in range(2 * q):
        ok = True
        for e, c in terms.items():
            n = e.numerator * (q // e.denominator)
            tw = c * root_of_unity_pi(m * n % (2 * q), q)
            if not tw.is_real(tol):
                ok = False
                break
        if ok:
            rays.append(m)
    return rays


def puiseux_expand(f: BivariatePoly, settings: ExpansionSettings | None = None):
    """Expand all branches of f at the origin into Puiseux cycles.

    Returns (cycles, flags).  flags may contain "unseparated" when the
    adaptive deepening hit its cap with some branch pair still agreeing on
    every computed term.
    """
    settings = settings or ExpansionSettings()
    if f.is_zero():
        raise ZeroPolynomial("cannot expand the zero polynomial")
    with mp.workprec(settings.precision_bits):
        m = f.multiplicity()
        if m == 0:
            raise ZeroPolynomial("f(0,0) != 0: no branch through the origin")
        if not any(a == 0 for a, _ in f.terms):
            raise NeedsPreparation("no pure y^m term; shear first")
        b_min = min(b for _, b in f.terms)
        if b_min >= 2:
            raise NonReduced("y^2 divides f")

        mus = [e.mu for e in newton_polygon(f).edges]
        order = settings.max_order
        adaptive = order is None
        if adaptive:
            order = max(Q(4), 2 * max(mus, default=Q(2)))
        flags = set()
        for attempt in range(settings.max_depth):
            cap = math.ceil(order)
            raw = _expand(CPoly.from_exact(f), cap, 0, settings)
            branches = [(ram, {Q(n, ram): c for n, c in terms.items()}, exact)
                        for ram, terms, exact in raw]
            if sum(1 for _ in branches) != m:
                raise NumericFailure(
                    f"got {len(branches)} pro-branches for multiplicity {m}")
            problem = _separation_problem(branches, cap, settings)
            if problem is None:
                try:
                    groups = _group_cycles(branches, settings)
                    break
                except NumericFailure:
                    problem = "deck orbits incomplete"
            if not adaptive:
                flags.add("unseparated")
                groups = _group_cycles_loose(branches, settings)
                break
            order = order * 2
        else:
            flags.add("unseparated")
            groups = _group_cycles_loose(branches, settings)

        cycles = []
        for idx, (q, orbit, exact) in enumerate(groups):
            ram, terms, _ = branches[orbit[0]]
            term_list = sorted(terms.items())
            rays = _real_rays(terms, q, settings.eq_tol)
            cycles.append(PuiseuxCycle(
                cycle_id=idx,
                terms=term_list,
                ramification=q,
                trunc_order=Q(cap) if not exact else Q(10 ** 6),
                exact=exact,
                real_rays=rays,
                flags=set(flags),
            ))
        if sum(c.ramification for c in cycles) != m:
            raise NumericFailure("cycle ramifications do not sum to multiplicity")
        _pair_conjugate_cycles(cycles, settings)
        return cycles, flags


def _separation_problem(branches, cap, settings):
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            _, t1, e1 = branches[i]
            _, t2, e2 = branches[j]
            if _first_difference(t1, t2, settings.eq_tol) is None:
                if e1 and e2:
                    raise NonReduced("two identical exact branches")
                return (i, j)
    return None


def _group_cycles_loose(branches, settings):
    """Fallback grouping when separation failed: single-branch cycles."""
    return [(br[0], [i], br[2]) for i, br in enumerate(branches)]


def _first_difference(t1: dict, t2: dict, tol):
    """Smallest exponent where two exponent->CNum series differ."""
    exps = sorted(set(t1) | set(t2))
    for e in exps:
        c1 = t1.get(e, CNum.zero())
        c2 = t2.get(e, CNum.zero())
        if abs(c1.v - c2.v) > tol * max(1.0, abs(c1.v), abs(c2.v)):
            return e
    return None


def _pair_conjugate_cycles(cycles, settings):
    """Assign conj_class ids; complex cycles pair with their mirror."""
    for c in cycles:
        c.conj_class_id = -1
    next_class = 0
    for c in cycles:
        if c.conj_class_id != -1:
            continue
        if c.is_real_branch():
            c.conj_class_id = next_class
            next_class += 1
            continue
        conj_terms = {e: cc.conj() for e, cc in c.terms}
        partner = None
        for d in cycles:
            if d.conj_class_id == -1 and d.ramification == c.ramification:
                for k in range(d.ramification):
                    tw = _twist_terms(dict(d.terms), k, d.ramification)
                    if _terms_close(tw, conj_terms, settings.eq_tol):
                        partner = d
                        break
            if partner is not None:
                break
        if partner is None:
            raise NumericFailure(
                "complex cycle without a conjugate partner (tolerance failure)")
        c.conj_class_id = next_class
        partner.conj_class_id = next_class
        c.flags.add("complex_pair")
        partner.flags.add("complex_pair")
        next_class += 1


# ---------------------------------------------------------------------------
# pro-branches
# ---------------------------------------------------------------------------

def expand_to_probranches(cycles, settings: ExpansionSettings | None = None):
    """The q conjugate determinations of every cycle, with diagram marks."""
    settings = settings or ExpansionSettings()
    with mp.workprec(settings.precision_bits):
        branches = []
        by_cycle = {}
        for cyc in cycles:
            q = cyc.ramification
            terms = dict(cyc.terms)
            rays = cyc.real_rays
            if rays:
                marked = sorted(k for k in range(q) if (2 * k) % (2 * q) in rays)
                if not marked:
                    marked = [0, q // 2] if q % 2 == 0 else [0]
                k0 = marked[0]
                star = {k: (2 * k0 - k) % q for k in range(q)}
            else:
                marked = []
                star = None
            ids = []
            for k in range(q):
                tk = _twist_terms(terms, k, q)
                is_real = all(c.is_real(settings.eq_tol) for c in tk.values())
                br = ProBranch(
                    branch_id=len(branches),
                    cycle_id=cyc.cycle_id,
                    root_of_unity_index=k,
                    terms=sorted(tk.items()),
                    is_real=is_real,
                    real_marked=(k in marked) if rays else False,
                    trunc_order=cyc.trunc_order,
                    exact=cyc.exact,
                )
                branches.append(br)
                ids.append(br.branch_id)
            by_cycle[cyc.cycle_id] = ids
            if star is not None:
                for k in range(q):
                    p = star[k]
                    branches[ids[k]].star_partner = ids[p] if p != k else None
                # true conjugation: reflection about m0/2 in ray terms
                m0 = cyc.real_rays[0]
                for k in range(q):
                    p = (m0 - k) % q
                    branches[ids[k]].conjugate_partner = ids[p] if p != k else None

        # complex cycles: pair across the conjugate class
        classes = {}
        for cyc in cycles:
            if not cyc.is_real_branch():
                classes.setdefault(cyc.conj_class_id, []).append(cyc)
        for cls in classes.values():
            if len(cls) == 1:
                a = cls[0]
                # self-conjugate complex cycle cannot happen: a self-conjugate
                # cycle always has a real ray; flag and skip pairing
                for bid in by_cycle[a.cycle_id]:
                    branches[bid].star_partner = None
                continue
            a, b = cls
            qa = a.ramification
            conj_a = {e: c.conj() for e, c in a.terms}
            t_match = None
            for t in range(qa):
                tw = _twist_terms(dict(b.terms), t, qa)
                if _terms_close(tw, conj_a, settings.eq_tol):
                    t_match = t
                    break
            if t_match is None:
                raise NumericFailure("conjugate cycle pairing failed")
            ids_a, ids_b = by_cycle[a.cycle_id], by_cycle[b.cycle_id]
            for j in range(qa):
                pa = ids_a[j]
                pb = ids_b[(t_match - j) % qa]
                branches[pa].conjugate_partner = pb
                branches[pb].conjugate_partner = pa
                branches[pa].star_partner = pb
                branches[pb].star_partner = pa
        return branches


# ---------------------------------------------------------------------------
# residual self-check
# ---------------------------------------------------------------------------

def residual_valuation(f: BivariatePoly, branch: ProBranch,
                       probes=(1e-4, 1e-5, 1e-6),
                       precision_bits: int = 256):
    """Estimated x-order of f(x, branch(x)) by log-log regression.

    Returns math.inf when the branch is an exact root (residual vanishes).
    """
    with mp.workprec(precision_bits):
        xs, ys = [], []
        for pxf in probes:
            x = CNum.from_mpc(mp.mpf(pxf))
            yv = CNum.zero()
            for e, c in branch.terms:
                xe = CNum.from_mpc(mp.power(x.v, mp.mpf(e.numerator) / e.denominator))
                yv = yv + c * xe
            val = f.eval_c(x, yv)
            mag = abs(val)
            if mag == 0 or mag < mp.mpf(10) ** (-0.28 * precision_bits):
                return math.inf
            if not mp.isfinite(mag):
                raise ProbeUnderflow("branch evaluation overflowed")
            xs.append(mp.log(abs(x.v)))
            ys.append(mp.log(mag))
        n = len(xs)
        mean_x = sum(xs) / n
        mean_y = sum(ys) / n
        num = sum((a - mean_x) * (b - mean_y) for a, b in zip(xs, ys))
        den = sum((a - mean_x) ** 2 for a in xs)
        if den == 0:
            raise ProbeUnderflow("degenerate probe set")
        return float(num / den)
