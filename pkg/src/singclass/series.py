"""Dense truncated power-series helpers over CNum (internal)."""

from __future__ import annotations

from .numbers import CNum


def series_zero(cap):
    return [CNum.zero() for _ in range(cap + 1)]


def series_add(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else CNum.zero()
        y = b[i] if i < len(b) else CNum.zero()
        out.append(x + y)
    return out


def series_mul(a, b, cap):
    out = series_zero(cap)
    for i, ai in enumerate(a):
        if i > cap or ai.is_zero():
            continue
        for j, bj in enumerate(b):
            if i + j > cap:
                break
            if bj.is_zero():
                continue
            out[i + j] = out[i + j] + ai * bj
    return out


def series_scale_monomial(a, k, cap):
    """a(w) * w^k, truncated."""
    out = series_zero(cap)
    for i, ai in enumerate(a):
        if i + k <= cap:
            out[i + k] = ai
    return out


def series_inv(a, cap):
    """1/a(w) mod w^(cap+1); requires a[0] nonzero."""
    inv0 = CNum.one() / a[0]
    out = series_zero(cap)
    out[0] = inv0
    for n in range(1, cap + 1):
        acc = CNum.zero()
        for k in range(1, min(n, len(a) - 1) + 1):
            acc = acc + a[k] * out[n - k]
        out[n] = -inv0 * acc
    return out
