"""Univariate complex root finding with multiplicity clustering.

Multiplicity misdetection is the dominant failure mode of the whole
expansion pipeline, so this module is deliberately belt-and-braces:

* polynomials whose coefficients are exact Gaussian rationals get an exact
  square-free decomposition (Yun's algorithm over Q(i)), so multiplicities
  are never a numeric judgement call on exact input;
* the remaining numeric work (Aberth-Ehrlich simultaneous iteration) only
  ever chases simple roots of square-free factors on that path;
* fully numeric input falls back to a tolerance ladder whose every rung is
  verified by re-expanding the clustered model and comparing coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import NonConvergence, NumericFailure
from .numbers import CNum

Q = Fraction

DEFAULT_CLUSTER_TOL = 1e-30
DEFAULT_MAX_ITER = 200
_LADDER = (1e-24, 1e-18, 1e-12, 1e-8)


@dataclass
class RootCluster:
    value: CNum
    multiplicity: int

    def __repr__(self):
        return f"RootCluster({self.value!r}, mult={self.multiplicity})"


class UnivariatePoly:
    """Dense univariate polynomial, ascending degree, CNum coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = list(coeffs)
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @staticmethod
    def from_rationals(rs):
        return UnivariatePoly([CNum.from_rational(r) for r in rs])

    def degree(self):
        return len(self.coeffs) - 1

    def is_exact(self):
        return all(c.is_exact() for c in self.coeffs)

    def eval(self, z: CNum) -> CNum:
        acc = CNum.zero()
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __repr__(self):
        return f"UnivariatePoly({self.coeffs!r})"


# ---------------------------------------------------------------------------
# exact Gaussian-rational polynomial helpers (lists of (Fraction, Fraction))
# ---------------------------------------------------------------------------

def _g_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _g_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _g_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _g_div(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def _gp_trim(p):
    while p and p[-1] == (0, 0):
        p.pop()
    return p


def _gp_deriv(p):
    return _gp_trim([(c[0] * k, c[1] * k) for k, c in enumerate(p)][1:])


def _gp_divmod(num, den):
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    quot = [(Q(0), Q(0))] * max(0, len(num) - dd)
    while len(num) - 1 >= dd and _gp_trim(list(num)):
        k = len(num) - 1 - dd
        c = _g_div(num[-1], lead)
        quot[k] = c
        for i, dc in enumerate(den):
            num[k + i] = _g_sub(num[k + i], _g_mul(c, dc))
        num.pop()
        _gp_trim(num)
        if not num:
            break
    return _gp_trim(quot), _gp_trim(num)


def _gp_gcd(a, b):
    a, b = _gp_trim(list(a)), _gp_trim(list(b))
    while b:
        _, r = _gp_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [_g_div(c, lead) for c in a]
    return a


def _gp_polysub(a, b):
    n = max(len(a), len(b))
    zero = (Q(0), Q(0))
    a_pad = list(a) + [zero] * (n - len(a))
    b_pad = list(b) + [zero] * (n - len(b))
    return _gp_trim([_g_sub(x, y) for x, y in zip(a_pad, b_pad)])


def _gp_squarefree(p):
    """Yun's algorithm: list of (square-free factor, multiplicity)."""
    a = _gp_gcd(p, _gp_deriv(p))
    if len(a) <= 1:
        return [(list(p), 1)]
    out = []
    b, _ = _gp_divmod(p, a)
    c, _ = _gp_divmod(_gp_deriv(p), a)
    d = _gp_polysub(c, _gp_deriv(b))
    i = 1
    while len(b) > 1:
        ai = _gp_gcd(b, d)
        if len(ai) > 1:
            out.append((ai, i))
        b, _ = _gp_divmod(b, ai)
        c, _ = _gp_divmod(d, ai)
        d = _gp_polysub(c, _gp_deriv(b))
        i += 1
    return out


def _rational_root_candidates(p):
    """Rational root candidates of a rational-coefficient poly (cleared)."""
    import math
    lcm = math.lcm(*[c[0].denominator for c in p]) if p else 1
    ints = [int(c[0] * lcm) for c in p]
    while ints and ints[0] == 0:
        ints = ints[1:]
    if not ints:
        return []
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(n):
        n = abs(n)
        out = set()
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.add(d)
                out.add(n // d)
            d += 1
        return out

    cands = set()
    for pnum in divisors(a0):
        for qden in divisors(an):
            cands.add(Q(pnum, qden))
            cands.add(Q(-pnum, qden))
    return sorted(cands)


def _gp_eval(p, z):
    acc = (Q(0), Q(0))
    for c in reversed(p):
        acc = _g_add(_g_mul(acc, z), c)
    return acc


def _exact_roots_of_squarefree(p):
    """Split a square-free Gaussian-rational poly into exact roots + residual.

    Pulls out rational and pure-imaginary-rational roots, and finishes
    degree <= 2 residuals by the quadratic formula when the square root is
    exact in Q or i*Q.
    """
    p = list(p)
    found = []
    if all(c[1] == 0 for c in p):
        for r in _rational_root_candidates(p):
            while len(p) > 1 and _gp_eval(p, (r, Q(0))) == (0, 0):
                p, rem = _gp_divmod(p, [(-r, Q(0)), (Q(1), Q(0))])
                found.append((r, Q(0)))
    # pure-imaginary rational roots t = i*r
    for sign in (1, -1):
        changed = True
        while changed and len(p) > 2:
            changed = False
            for r in _rational_root_candidates(
                    [((c[0] * c[0] + c[1] * c[1]), Q(0)) for c in p]):
                z = (Q(0), sign * r)
                if r != 0 and _gp_eval(p, z) == (0, 0):
                    p, _ = _gp_divmod(p, [(Q(0), -z[1]), (Q(1), Q(0))])
                    found.append(z)
                    changed = True
                    break
    if len(p) == 2:
        found.append(_g_div(_g_mul((Q(-1), Q(0)), p[0]), p[1]))
        p = [p[1]]
    elif len(p) == 3 and all(c[1] == 0 for c in p):
        import math
        a, b, c = p[2][0], p[1][0], p[0][0]
        disc = b * b - 4 * a * c

        def _exact_sqrt(q):
            if q == 0:
                return Q(0)
            num, den = abs(q.numerator), q.denominator
            rn, rd = math.isqrt(num), math.isqrt(den)
            if rn * rn == num and rd * rd == den:
                return Q(rn, rd)
            return None

        s = _exact_sqrt(disc) if disc >= 0 else _exact_sqrt(-disc)
        if s is not None:
            mid = Q(-b) / (2 * a)
            half = s / (2 * a)
            if disc >= 0:
                found.append((mid + half, Q(0)))
                found.append((mid - half, Q(0)))
            else:
                found.append((mid, half))
                found.append((mid, -half))
            p = [p[2]]
    return found, p


# ---------------------------------------------------------------------------
# Aberth-Ehrlich iteration
# ---------------------------------------------------------------------------

def aberth_roots(coeffs, max_iter=DEFAULT_MAX_ITER):
    """All roots of a numeric polynomial by simultaneous iteration.

    coeffs: list of mpc, ascending, leading nonzero, degree >= 1.
    """
    n = len(coeffs) - 1
    if n < 1:
        return []
    lead = coeffs[-1]
    mon = [c / lead for c in coeffs]
    if n == 1:
        return [-mon[0]]
    # Cauchy-style inclusion radius
    radius = 1 + max(abs(c) for c in mon[:-1])
    zs = [radius * 0.5 * mp.exp(mp.mpc(0, 2 * mp.pi * k / n + 0.4)) for k in range(n)]
    dmon = [k * mon[k] for k in range(1, n + 1)]

    def peval(cs, z):
        acc = mp.mpc(0)
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    norm1 = sum(abs(c) for c in mon)
    stop = mp.ldexp(1, -(mp.mp.prec - 12))
    for it in range(max_iter):
        offsets = []
        converged = True
        for i, z in enumerate(zs):
            pv = peval(mon, z)
            bound = stop * max(norm1, sum(abs(c) * abs(z) ** k
                                          for k, c in enumerate(mon)))
            if abs(pv) > bound:
                converged = False
            dv = peval(dmon, z)
            if dv == 0:
                offsets.append(mp.mpc(0.5) * (1 + abs(z)))
                continue
            w = pv / dv
            s = mp.mpc(0)
            for j, zj in enumerate(zs):
                if j != i and z != zj:
                    s += 1 / (z - zj)
            denom = 1 - w * s
            offsets.append(w / denom if denom != 0 else w)
        if converged:
            return zs
        zs = [z - o for z, o in zip(zs, offsets)]
    # final residual check
    worst = max(abs(peval(mon, z)) for z in zs)
    if worst <= mp.ldexp(1, -(mp.mp.prec // 3)):
        return zs
    raise NonConvergence(max_iter, float(worst))


def _symmetrize_conjugates(roots, tol):
    """Pair roots of a real polynomial into exact conjugate pairs."""
    out = [None] * len(roots)
    used = [False] * len(roots)
    for i, z in enumerate(roots):
        if used[i]:
            continue
        scale = max(1, abs(z))
        if abs(z.imag) <= tol * scale:
            out[i] = mp.mpc(z.real, 0)
            used[i] = True
            continue
        best, best_d = None, None
        for j in range(len(roots)):
            if j != i and not used[j]:
                d = abs(roots[j] - mp.conj(z))
                if best_d is None or d < best_d:
                    best, best_d = j, d
        if best is not None and best_d <= 1e-6 * scale:
            zm = (z + mp.conj(roots[best])) / 2
            out[i] = zm
            out[best] = mp.conj(zm)
            used[i] = used[best] = True
        else:
            out[i] = z
            used[i] = True
    return out


def _cluster(roots, rel_tol):
    """Greedy union-find clustering at relative distance rel_tol."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1, abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= rel_tol * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    clusters = []
    for members in groups.values():
        mean = sum(members, mp.mpc(0)) / len(members)
        clusters.append(RootCluster(CNum.from_mpc(mean), len(members)))
    return clusters


def _verify_clusters(coeffs, clusters, verify_tol):
    """Re-expand prod (t - v)^m and compare against the input coefficients."""
    prod = [mp.mpc(1)]
    for cl in clusters:
        v = cl.value.v
        for _ in range(cl.multiplicity):
            nxt = [mp.mpc(0)] * (len(prod) + 1)
            for k, c in enumerate(prod):
                nxt[k] += c * (-v)
                nxt[k + 1] += c
            prod = nxt
    lead = coeffs[-1]
    scale = max(abs(c) for c in coeffs)
    err = max(abs(prod[k] * lead - coeffs[k]) for k in range(len(coeffs)))
    return err <= verify_tol * max(1, scale)


def find_roots(p, tol: float = DEFAULT_CLUSTER_TOL,
               max_iter: int = DEFAULT_MAX_ITER) -> list[RootCluster]:
    """Roots of p with multiplicities; exact on exact input.

    p may be a UnivariatePoly or a list of CNum.  Clusters are sorted by
    (real, imag) of the representative value.
    """
    coeffs = p.coeffs if isinstance(p, UnivariatePoly) else list(p)
    while coeffs and coeffs[-1].is_zero():
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        raise NumericFailure("root finding needs degree >= 1")

    clusters: list[RootCluster] = []
    if all(c.is_exact() for c in coeffs):
        gp = [c.exact for c in coeffs]
        for factor, mult in _gp_squarefree(gp):
            exact, residual = _exact_roots_of_squarefree(factor)
            for z in exact:
                clusters.append(RootCluster(CNum.from_gauss(*z), mult))
            if len(residual) > 1:
                num = [mp.mpc(mp.mpf(c[0].numerator) / c[0].denominator,
                              mp.mpf(c[1].numerator) / c[1].denominator)
                       for c in residual]
                zs = aberth_roots(num, max_iter)
                if all(c[1] == 0 for c in residual):
                    zs = _symmetrize_conjugates(zs, mp.ldexp(1, -(mp.mp.prec // 2)))
                for z in zs:
                    clusters.append(RootCluster(CNum.from_mpc(z), mult))
    else:
        num = [c.v for c in coeffs]
        zs = aberth_roots(num, max_iter)
        if all(c.is_real(mp.ldexp(1, -(mp.mp.prec // 2))) for c in coeffs):
            zs = _symmetrize_conjugates(zs, mp.ldexp(1, -(mp.mp.prec // 2)))
        verify_tol = max(1e-18, float(mp.ldexp(1, -(mp.mp.prec // 2))))
        for rel in (tol,) + _LADDER:
            clusters = _cluster(zs, rel)
            if _verify_clusters(num, clusters, verify_tol):
                break
        else:
            raise NumericFailure("no clustering of the root set verifies")

    total = sum(c.multiplicity for c in clusters)
    if total != len(coeffs) - 1:
        raise NumericFailure(
            f"cluster multiplicities sum to {total}, expected {len(coeffs) - 1}")
    clusters.sort(key=lambda c: (float(c.value.v.real), float(c.value.v.imag)))
    return clusters
