"""Rigorous enclosures of integer-order Bessel functions J_n and Y_n.

Everything is computed from the ascending series with explicit tail bounds:

    J_n(x) = (x/2)^n sum_k (-1)^k b_k,          b_k = (x^2/4)^k / (k! (n+k)!)

    Y_n(x) = (2/pi)(log(x/2) + gamma) J_n(x)
             - (1/pi)(x/2)^(-n) sum_{k<n} ((n-1-k)!/k!) (x^2/4)^k
             - (1/pi)(x/2)^( n) sum_k (-1)^k (H_k + H_{n+k}) b_k

with H_k the harmonic numbers.  Truncation errors are bounded by geometric
tails once the term ratio is certified below 1/2.  The alternating series
cancel heavily for large arguments (the largest term grows like e^x), so the
series run with an internal precision boost of ~1.5 bits per unit of the
argument; the requested working precision still governs the width of the
returned enclosure.  The J and harmonic-weighted sums share their base terms
and are accumulated in one pass over raw endpoint pairs (all loop quantities
are nonnegative, so directed rounding needs no sign dispatch).
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from mpmath.libmp import (
    from_float,
    from_int as _from_int,
    mpf_add as _mpf_add,
    mpf_div as _mpf_div,
    mpf_mul as _mpf_mul,
    mpf_sub as _mpf_sub,
    to_float,
)

from .interval import (
    Interval,
    IntervalDomainError,
    _CEIL,
    _FLOOR,
    _mk,
    euler_gamma,
    get_precision,
    pi,
    precision,
)

__all__ = [
    "BesselDomainError",
    "PrecisionExhaustedError",
    "bessel",
    "bessel_many",
    "cyl_scaled_derivatives",
    "j0_first_zero",
]

# largest internal precision boost before giving up on the ascending series
_MAX_GUARD_BITS = int(os.environ.get("TRISPEC_BESSEL_MAX_GUARD", "20000"))


class BesselDomainError(IntervalDomainError):
    """Argument outside the admissible domain (Y_n needs x > 0)."""


class PrecisionExhaustedError(ArithmeticError):
    """The series enclosure cannot be tightened at a tolerable precision."""


_harmonics = [0.0]


def _harmonic_float(k: int) -> float:
    while len(_harmonics) <= k:
        m = len(_harmonics)
        _harmonics.append(_harmonics[-1] + 1.0 / m)
    return _harmonics[k]


# harmonic-number endpoint tables per (bucketed) working precision
_harm_cache = {}


def _harm_table(workprec: int, upto: int):
    bucket = ((workprec + 63) // 64) * 64
    los, his = _harm_cache.setdefault(bucket, ([_from_int(0)], [_from_int(0)]))
    one = _from_int(1)
    while len(los) <= upto:
        m = _from_int(len(los))
        los.append(_mpf_add(los[-1], _mpf_div(one, m, bucket, _FLOOR), bucket, _FLOOR))
        his.append(_mpf_add(his[-1], _mpf_div(one, m, bucket, _CEIL), bucket, _CEIL))
    return los, his


def _guard_bits(x: Interval) -> int:
    hi = x.hi_float
    if not math.isfinite(hi):
        raise BesselDomainError("unbounded Bessel argument")
    guard = int(1.5 * hi) + 32
    if guard > _MAX_GUARD_BITS:
        raise PrecisionExhaustedError(
            f"argument {hi:.3g} needs more than {_MAX_GUARD_BITS} guard bits"
        )
    return guard


def _jy_sums(n: int, z2, workprec: int, with_h: bool):
    """One-pass alternating sums over the shared base terms b_k.

    Returns interval pair (sum (-1)^k b_k, sum (-1)^k (H_k+H_{n+k}) b_k);
    the second is None unless `with_h`.  Tails are certified geometric.
    """
    p = workprec
    z2l, z2h = z2
    nf = _from_int(math.factorial(n))
    one = _from_int(1)
    bl, bh = _mpf_div(one, nf, p, _FLOOR), _mpf_div(one, nf, p, _CEIL)
    jl, jh = bl, bh
    if with_h:
        hlos, hhis = _harm_table(p, n + 8)
        sl = _mpf_mul(bl, hlos[n], p, _FLOOR)
        sh = _mpf_mul(bh, hhis[n], p, _CEIL)
    z2hi_f = to_float(z2h, rnd="n") * (1 + 1e-15)
    eps_stop = math.ldexp(1.0, -(p + 6))
    tmax = to_float(bh, rnd="n")
    kmax = 4 * p + 200
    for k in range(1, kmax):
        kk = _from_int(k * (n + k))
        bl = _mpf_div(_mpf_mul(bl, z2l, p, _FLOOR), kk, p, _FLOOR)
        bh = _mpf_div(_mpf_mul(bh, z2h, p, _CEIL), kk, p, _CEIL)
        if with_h:
            if len(hlos) <= n + k:
                hlos, hhis = _harm_table(p, n + k + 64)
            hsl = _mpf_add(hlos[k], hlos[n + k], p, _FLOOR)
            hsh = _mpf_add(hhis[k], hhis[n + k], p, _CEIL)
            tl = _mpf_mul(bl, hsl, p, _FLOOR)
            th = _mpf_mul(bh, hsh, p, _CEIL)
        if k % 2:
            jl = _mpf_sub(jl, bh, p, _FLOOR)
            jh = _mpf_sub(jh, bl, p, _CEIL)
            if with_h:
                sl = _mpf_sub(sl, th, p, _FLOOR)
                sh = _mpf_sub(sh, tl, p, _CEIL)
        else:
            jl = _mpf_add(jl, bl, p, _FLOOR)
            jh = _mpf_add(jh, bh, p, _CEIL)
            if with_h:
                sl = _mpf_add(sl, tl, p, _FLOOR)
                sh = _mpf_add(sh, th, p, _CEIL)
        bhi = to_float(bh, rnd="n") * (1 + 1e-15)
        hw = (_harmonic_float(k) + _harmonic_float(n + k)) if with_h else 1.0
        tmax = max(tmax, bhi * max(hw, 1.0))
        ratio = z2hi_f / ((k + 1) * (n + k + 1))
        if ratio < 0.5 and (bhi == 0.0 or bhi * max(hw, 1.0) < eps_stop * max(tmax, 1e-300)):
            tail_j = bhi * ratio / (1.0 - ratio) * (1.0 + 1e-12)
            tj = from_float(tail_j)
            j_enc = _mk(_mpf_sub(jl, tj, p, _FLOOR), _mpf_add(jh, tj, p, _CEIL))
            if not with_h:
                return j_enc, None
            hratio = (_harmonic_float(k + 1) + _harmonic_float(n + k + 1)) / max(hw, 1e-300)
            rh = ratio * hratio * (1 + 1e-12)
            if rh >= 0.9:
                continue
            tail_h = bhi * hw * rh / (1.0 - rh) * (1.0 + 1e-12)
            th_ = from_float(tail_h)
            h_enc = _mk(_mpf_sub(sl, th_, p, _FLOOR), _mpf_add(sh, th_, p, _CEIL))
            return j_enc, h_enc
    raise PrecisionExhaustedError(f"Bessel series for order {n} did not converge")


_MAX_ARG_WIDTH = 0.5  # wide arguments are split to keep series widths tame
_MAX_ARG_PIECES = 48


def bessel_many(kind: str, n_max: int, x: Interval) -> list:
    """Enclosures of J_0..J_{n_max} (kind='first') or Y_0..Y_{n_max} at x.

    Wide arguments are evaluated piecewise and hulled per order: the
    ascending series at an interval of width w inflates like e^x * O(w), so
    pieces are capped near _MAX_ARG_WIDTH.
    """
    if kind not in ("first", "second"):
        raise ValueError(f"unknown Bessel kind {kind!r}")
    if x.lo_float < 0 or (kind == "second" and not x.sign_certified() == 1):
        if kind == "second":
            raise BesselDomainError(f"Y_n requires x strictly positive, got {x}")
        raise BesselDomainError(f"J_n requires x >= 0, got {x}")
    w = x.width_float
    if w > _MAX_ARG_WIDTH and math.isfinite(w) and x.lo_float > 0:
        pieces = min(int(math.ceil(w / _MAX_ARG_WIDTH)), _MAX_ARG_PIECES)
        lo, hi = x.lo_float, x.hi_float
        cuts = [lo + (hi - lo) * i / pieces for i in range(pieces + 1)]
        cuts[0], cuts[-1] = lo, hi
        out = None
        for a, b in zip(cuts[:-1], cuts[1:]):
            part = _bessel_many_core(kind, n_max, Interval(a, b))
            out = part if out is None else [u.hull(v) for u, v in zip(out, part)]
        return out
    return _bessel_many_core(kind, n_max, x)


def _bessel_many_core(kind: str, n_max: int, x: Interval) -> list:
    guard = _guard_bits(x)
    base = get_precision()
    wp = base + guard
    out = []
    with precision(wp):
        half_iv = x.mul_2exp(-1)
        z2_iv = half_iv.sqr()
        z2 = (z2_iv.a, z2_iv.b)
        if kind == "second":
            log_half, gamma, pival = half_iv.log(), euler_gamma(), pi()
            two_over_pi = Interval(2) / pival
        half_pow = Interval(1)
        for n in range(n_max + 1):
            j_base, h_base = _jy_sums(n, z2, wp, kind == "second")
            jn = j_base * half_pow
            if kind == "first":
                out.append(jn)
            else:
                finite = Interval(0)
                if n > 0:
                    z2pow = Interval(1)
                    acc = Interval(0)
                    for k in range(n):
                        num = math.factorial(n - 1 - k)
                        den = math.factorial(k)
                        c = Interval(num) if den == 1 else Interval(Fraction(num, den))
                        acc = acc + c * z2pow
                        if k < n - 1:
                            z2pow = z2pow * z2_iv
                    finite = acc / half_pow
                yn = two_over_pi * (log_half + gamma) * jn - (finite + h_base * half_pow) / pival
                out.append(yn)
            half_pow = half_pow * half_iv
    return out


def bessel(kind: str, order: int, x: Interval) -> Interval:
    """Interval containing J_order(t) (or Y_order(t)) for every t in x."""
    if order < 0:
        raise ValueError("order must be a non-negative integer")
    return bessel_many(kind, order, x)[order]


def besselj_normalized_many(n_max: int, q: Interval) -> list:
    """Enclosures of S_n(q) = sum_m (-1)^m q^m / (m! (n+m)!), n = 0..n_max.

    These normalize the first-kind kernels as J_n(x) = (x/2)^n S_n(x^2/4);
    in solid-harmonic form J_n(k r) e^(i n theta) = (k w / 2)^n S_n(k^2 r^2/4)
    with w the complex offset, which is regular through r = 0.
    """
    if q.lo_float < 0:
        raise BesselDomainError(f"normalized series needs q >= 0, got {q}")
    hi = q.hi_float
    if not math.isfinite(hi):
        raise BesselDomainError("unbounded argument")
    w = q.width_float
    if w > _MAX_ARG_WIDTH:
        pieces = min(int(math.ceil(w / _MAX_ARG_WIDTH)), _MAX_ARG_PIECES)
        lo = max(q.lo_float, 0.0)
        cuts = [lo + (q.hi_float - lo) * i / pieces for i in range(pieces + 1)]
        cuts[0], cuts[-1] = lo, q.hi_float
        out = None
        for a, b in zip(cuts[:-1], cuts[1:]):
            part = besselj_normalized_many(n_max, Interval(a, b))
            out = part if out is None else [u.hull(v) for u, v in zip(out, part)]
        return out
    guard = int(3.0 * math.sqrt(hi)) + 32
    if guard > _MAX_GUARD_BITS:
        raise PrecisionExhaustedError("argument too large for the normalized series")
    wp = get_precision() + guard
    out = []
    with precision(wp):
        qq = (q.a, q.b)
        for n in range(n_max + 1):
            s, _ = _jy_sums(n, qq, wp, False)
            out.append(s)
    return out


def _reflect(values: list, n: int) -> Interval:
    """C_n for possibly negative n from C_{|n|}, using C_{-m} = (-1)^m C_m."""
    if n >= 0:
        return values[n]
    m = -n
    return -values[m] if m % 2 else values[m]


def cyl_scaled_derivatives(kind: str, order: int, x: Interval, count: int) -> list:
    """Enclosures of C_order^(j)(x) / j! for j = 0..count.

    Uses the derivative recurrence C_n' = (C_{n-1} - C_{n+1})/2, iterated:
    C_n^(j) = 2^-j sum_i (-1)^i binom(j, i) C_{n-j+2i}.
    """
    vals = bessel_many(kind, order + count, x)
    out = []
    inv_fact = Fraction(1)
    for j in range(count + 1):
        if j > 0:
            inv_fact /= j
        acc = Interval(0)
        for i in range(j + 1):
            c = math.comb(j, i)
            t = _reflect(vals, order - j + 2 * i) * c
            acc = acc - t if i % 2 else acc + t
        out.append(acc.mul_2exp(-j) * Interval(inv_fact))
    return out


_j0_zero_cache = {}


def j0_first_zero() -> Interval:
    """Validated enclosure of the first positive zero of J_0 (bisection)."""
    prec = get_precision()
    cached = _j0_zero_cache.get(prec)
    if cached is not None:
        return cached
    lo, hi = Fraction(24, 10), Fraction(241, 100)
    s_lo = bessel("first", 0, Interval(lo)).sign_certified()
    s_hi = bessel("first", 0, Interval(hi)).sign_certified()
    if s_lo != 1 or s_hi != -1:
        raise PrecisionExhaustedError("cannot certify signs bracketing the J_0 zero")
    target = Fraction(1, 2 ** (prec + 8))
    while hi - lo > target:
        mid = (lo + hi) / 2
        s = bessel("first", 0, Interval(mid)).sign_certified()
        if s == 1:
            lo = mid
        elif s == -1:
            hi = mid
        else:  # undecidable sign at this precision: stop, enclosure is still valid
            break
    result = Interval(lo, hi)
    _j0_zero_cache[prec] = result
    return result
