"""Sparse bivariate polynomials.

Two coefficient domains live here:

* :class:`BivariatePoly` -- exact rationals.  Curve input, polygon geometry
  and tangent cones stay in this domain, so every hull and slope is exact.
* :class:`CPoly` -- :class:`~singclass.numbers.CNum` coefficients.  The
  Puiseux recursion substitutes irrational face roots into the curve, after
  which exactness is kept only where it survives (Gaussian rationals).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ZeroPolynomial
from .numbers import CNum

Q = Fraction


def _term_sort_key(item):
    (a, b), _ = item
    return (a + b, -b, a)


class BivariatePoly:
    """Sparse exact-rational polynomial in x and y.

    Terms map (x_exp, y_exp) -> nonzero Fraction.  Instances are treated as
    immutable values; all operations return new polynomials.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (a, b), c in terms.items():
                c = Fraction(c)
                if c != 0:
                    clean[(int(a), int(b))] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero():
        return BivariatePoly()

    @staticmethod
    def constant(c):
        return BivariatePoly({(0, 0): Fraction(c)})

    @staticmethod
    def monomial(a, b, c=1):
        return BivariatePoly({(a, b): Fraction(c)})

    @staticmethod
    def x():
        return BivariatePoly.monomial(1, 0)

    @staticmethod
    def y():
        return BivariatePoly.monomial(0, 1)

    # -- basic queries ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted(self.terms)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(a + b for a, b in self.terms)

    def coeff(self, a, b):
        return self.terms.get((a, b), Q(0))

    def __eq__(self, other):
        return isinstance(other, BivariatePoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, Q(0)) + c
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return BivariatePoly(out)

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                s = out.get(k, Q(0)) + c1 * c2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = BivariatePoly.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return BivariatePoly()
        return BivariatePoly({k: v * c for k, v in self.terms.items()})

    # -- geometry helpers --------------------------------------------------

    def multiplicity(self):
        """Order of vanishing at the origin (min total degree of a term)."""
        if not self.terms:
            raise ZeroPolynomial("multiplicity of the zero polynomial")
        return min(a + b for a, b in self.terms)

    def lowest_form(self):
        """Homogeneous part of minimal total degree."""
        m = self.multiplicity()
        return BivariatePoly(
            {k: c for k, c in self.terms.items() if k[0] + k[1] == m})

    def shear(self, lam):
        """f(x + lam*y, y): preparation move for a missing pure-y term."""
        lam = Fraction(lam)
        x = BivariatePoly({(1, 0): Q(1), (0, 1): lam})
        out = BivariatePoly()
        for (a, b), c in self.terms.items():
            out = out + (x ** a) * BivariatePoly.monomial(0, b, c)
        return out

    def monomial_scale(self, lam, mu):
        """f(lam*x, mu*y) for nonzero rational lam, mu."""
        lam, mu = Fraction(lam), Fraction(mu)
        if lam == 0 or mu == 0:
            raise ValueError("monomial scaling requires nonzero factors")
        return BivariatePoly(
            {(a, b): c * lam ** a * mu ** b for (a, b), c in self.terms.items()})

    def eval_c(self, xv: CNum, yv: CNum) -> CNum:
        out = CNum.zero()
        for (a, b), c in self.terms.items():
            out = out + (xv ** a) * (yv ** b) * CNum.from_rational(c)
        return out

    # -- printing -----------------------------------------------------------

    def __str__(self):
        """Canonical form: graded lexicographic, y before x within a degree."""
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items(), key=_term_sort_key):
            mono = []
            if a:
                mono.append("x" if a == 1 else f"x^{a}")
            if b:
                mono.append("y" if b == 1 else f"y^{b}")
            mono_s = "*".join(mono)
            if not mono_s:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono_s
            else:
                body = f"{abs(c)}*{mono_s}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"BivariatePoly({self})"


class CPoly:
    """Bivariate polynomial with CNum coefficients (expansion workhorse)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms or {}

    @staticmethod
    def from_exact(f: BivariatePoly) -> "CPoly":
        return CPoly({k: CNum.from_rational(c) for k, c in f.terms.items()})

    def clean(self, drop_tol) -> "CPoly":
        """Remove exact zeros and float dust below drop_tol * max-scale."""
        if not self.terms:
            return self
        scale = max((abs(c) for c in self.terms.values()), default=0)
        out = {}
        for k, c in self.terms.items():
            if c.exact is not None:
                if c.exact != (0, 0):
                    out[k] = c
            elif abs(c) > drop_tol * max(1, scale):
                out[k] = c
        return CPoly(out)

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted(self.terms)

    def coeff(self, a, b) -> CNum:
        return self.terms.get((a, b), CNum.zero())

    def add_inplace(self, key, c: CNum):
        cur = self.terms.get(key)
        self.terms[key] = c if cur is None else cur + c

    def y_derivative(self) -> "CPoly":
        out = {}
        for (a, b), c in self.terms.items():
            if b > 0:
                out[(a, b - 1)] = c.scale_rational(Q(b))
        return CPoly(out)

    def eval_series(self, series, cap):
        """Evaluate g(w, s(w)) where s is a dense CNum series, mod w^(cap+1)."""
        from .series import series_add, series_mul
        ydeg = max((b for _, b in self.terms), default=0)
        rows = [dict() for _ in range(ydeg + 1)]
        for (a, b), c in self.terms.items():
            if a <= cap:
                rows[b][a] = rows[b].get(a, CNum.zero()) + c
        row_series = []
        for row in rows:
            dense = [CNum.zero()] * (cap + 1)
            for a, c in row.items():
                dense[a] = c
            row_series.append(dense)
        # Horner in y over truncated series.
        out = row_series[-1]
        for k in range(ydeg - 1, -1, -1):
            out = series_add(series_mul(out, series, cap), row_series[k])
        return out

    def __repr__(self):
        items = ", ".join(f"{k}:{v!r}" for k, v in sorted(self.terms.items()))
        return f"CPoly({{{items}}})"
