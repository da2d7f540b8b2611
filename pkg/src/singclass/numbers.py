"""Coefficient arithmetic for the expansion engine.

Input polynomials are exact rational.  Once Puiseux recursion starts, face
roots are generally irrational, so coefficients are carried as mpmath complex
numbers at a configurable working precision.  A coefficient that is still
known exactly (a Gaussian rational) keeps its exact value alongside the float;
exactness propagates through ring operations and is used wherever an equality
or realness decision would otherwise rest on a tolerance.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

Q = Fraction

#: Exact Gaussian rational as a (real, imag) pair of Fractions.
GaussQ = tuple[Fraction, Fraction]


def _to_mpc(re: Fraction, im: Fraction) -> mp.mpc:
    return mp.mpc(mp.mpf(re.numerator) / re.denominator,
                  mp.mpf(im.numerator) / im.denominator)


class CNum:
    """Complex number with an optional exact Gaussian-rational value."""

    __slots__ = ("v", "exact")

    def __init__(self, v, exact: GaussQ | None = None):
        if exact is not None:
            self.v = _to_mpc(exact[0], exact[1])
        else:
            self.v = mp.mpc(v)
        self.exact = exact

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(q) -> "CNum":
        q = Fraction(q)
        return CNum(0, exact=(q, Q(0)))

    @staticmethod
    def from_gauss(re, im) -> "CNum":
        return CNum(0, exact=(Fraction(re), Fraction(im)))

    @staticmethod
    def from_mpc(z) -> "CNum":
        return CNum(mp.mpc(z))

    @staticmethod
    def zero() -> "CNum":
        return CNum(0, exact=(Q(0), Q(0)))

    @staticmethod
    def one() -> "CNum":
        return CNum(0, exact=(Q(1), Q(0)))

    # -- predicates ----------------------------------------------------

    def is_exact(self) -> bool:
        return self.exact is not None

    def is_zero(self, tol=None) -> bool:
        if self.exact is not None:
            return self.exact == (0, 0)
        if tol is None:
            return self.v == 0
        return abs(self.v) <= tol

    def is_real(self, tol) -> bool:
        if self.exact is not None:
            return self.exact[1] == 0
        return abs(self.v.imag) <= tol * max(1.0, abs(self.v))

    # -- ring operations (exactness propagates) -------------------------

    def __add__(self, other: "CNum") -> "CNum":
        if self.exact is not None and other.exact is not None:
            return CNum(0, exact=(self.exact[0] + other.exact[0],
                                  self.exact[1] + other.exact[1]))
        return CNum(self.v + other.v)

    def __sub__(self, other: "CNum") -> "CNum":
        if self.exact is not None and other.exact is not None:
            return CNum(0, exact=(self.exact[0] - other.exact[0],
                                  self.exact[1] - other.exact[1]))
        return CNum(self.v - other.v)

    def __mul__(self, other: "CNum") -> "CNum":
        if self.exact is not None and other.exact is not None:
            a, b = self.exact
            c, d = other.exact
            return CNum(0, exact=(a * c - b * d, a * d + b * c))
        return CNum(self.v * other.v)

    def __neg__(self) -> "CNum":
        if self.exact is not None:
            return CNum(0, exact=(-self.exact[0], -self.exact[1]))
        return CNum(-self.v)

    def __truediv__(self, other: "CNum") -> "CNum":
        if self.exact is not None and other.exact is not None:
            c, d = other.exact
            n = c * c + d * d
            if n == 0:
                raise ZeroDivisionError("division by exact zero")
            a, b = self.exact
            return CNum(0, exact=((a * c + b * d) / n, (b * c - a * d) / n))
        return CNum(self.v / other.v)

    def __pow__(self, k: int) -> "CNum":
        if k == 0:
            return CNum.one()
        base = self
        if k < 0:
            base = CNum.one() / self
            k = -k
        out = CNum.one()
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "CNum":
        if self.exact is not None:
            return CNum(0, exact=(self.exact[0], -self.exact[1]))
        return CNum(mp.conj(self.v))

    def scale_rational(self, q: Fraction) -> "CNum":
        if self.exact is not None:
            return CNum(0, exact=(self.exact[0] * q, self.exact[1] * q))
        return CNum(self.v * mp.mpf(q.numerator) / q.denominator)

    def __abs__(self):
        return abs(self.v)

    def __repr__(self):
        if self.exact is not None:
            re, im = self.exact
            if im == 0:
                return f"CNum({re})"
            return f"CNum({re}{'+' if im >= 0 else ''}{im}i)"
        return f"CNum({mp.nstr(self.v, 12)})"

    # hash/eq intentionally omitted: values compare through tolerances


def root_of_unity_pi(num: int, den: int) -> CNum:
    """e^(i*pi*num/den), exact when it lands on a Gaussian-rational point."""
    num %= 2 * den
    frac = Fraction(num, den)
    table = {
        Q(0): (Q(1), Q(0)),
        Q(1, 2): (Q(0), Q(1)),
        Q(1): (Q(-1), Q(0)),
        Q(3, 2): (Q(0), Q(-1)),
    }
    if frac in table:
        return CNum(0, exact=table[frac])
    theta = mp.pi * num / den
    return CNum(mp.mpc(mp.cos(theta), mp.sin(theta)))


def snap(z: CNum, tol) -> CNum:
    """Snap near-real / near-imaginary float parts to exact zero.

    Keeps realness and conjugacy decisions stable once a coefficient has
    drifted off the real axis by rounding only.
    """
    if z.exact is not None:
        return z
    re, im = z.v.real, z.v.imag
    scale = max(1.0, abs(z.v))
    changed = False
    if im != 0 and abs(im) <= tol * scale:
        im = mp.mpf(0)
        changed = True
    if re != 0 and abs(re) <= tol * scale:
        re = mp.mpf(0)
        changed = True
    return CNum(mp.mpc(re, im)) if changed else z
