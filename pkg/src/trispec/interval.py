"""Directed-rounding interval arithmetic on arbitrary-precision floats.

An ``Interval`` stores two raw mpmath bigfloat endpoints and guarantees that
every operation returns an interval containing all pointwise results over the
inputs (outward rounding everywhere).  The working precision is a module-level
runtime parameter, default 256 bits; use :func:`set_precision` or the
:func:`precision` context manager to change it.

Only operations needed by the eigenvalue certification pipeline are provided:
field arithmetic, sqrt, exp, log, integer powers, hulls and certified
comparisons.  All values are immutable after construction.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from decimal import Decimal, localcontext, ROUND_FLOOR, ROUND_CEILING
from fractions import Fraction

from mpmath import libmp
from mpmath.libmp import (
    fnan,
    finf,
    fninf,
    fzero,
    from_float,
    from_int,
    from_rational,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_pow_int,
    mpf_shift,
    mpf_sign,
    mpf_sqrt,
    mpf_sub,
    to_float,
)

__all__ = [
    "DEFAULT_PRECISION",
    "Interval",
    "IntervalDomainError",
    "euler_gamma",
    "get_precision",
    "hull",
    "isum",
    "pi",
    "precision",
    "set_precision",
]

DEFAULT_PRECISION = 256

_FLOOR = libmp.round_floor
_CEIL = libmp.round_ceiling

_ctx = {"prec": DEFAULT_PRECISION}


class IntervalDomainError(ArithmeticError):
    """Operation evaluated outside its mathematical domain."""


def get_precision() -> int:
    return _ctx["prec"]


def set_precision(bits: int) -> None:
    if bits < 8:
        raise ValueError("precision must be at least 8 bits")
    _ctx["prec"] = int(bits)


@contextmanager
def precision(bits: int):
    """Temporarily run with a different working precision."""
    old = _ctx["prec"]
    set_precision(bits)
    try:
        yield
    finally:
        _ctx["prec"] = old


def _mk(a, b) -> "Interval":
    iv = Interval.__new__(Interval)
    iv.a = a
    iv.b = b
    return iv


def _fraction_to_mpf(frac: Fraction, rnd):
    return from_rational(frac.numerator, frac.denominator, _ctx["prec"], rnd)


def _convert_endpoint(x, rnd):
    if isinstance(x, int):
        return from_int(x)
    if isinstance(x, float):
        if math.isnan(x):
            raise ValueError("nan endpoint")
        return from_float(x)
    if isinstance(x, Fraction):
        return _fraction_to_mpf(x, rnd)
    if isinstance(x, str):
        s = x.strip()
        if s in ("inf", "+inf"):
            return finf
        if s == "-inf":
            return fninf
        return _fraction_to_mpf(Fraction(s), rnd)
    if isinstance(x, Decimal):
        return _fraction_to_mpf(Fraction(x), rnd)
    raise TypeError(f"cannot build Interval endpoint from {type(x)!r}")


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x
    if man == 0 and x != fzero:
        raise OverflowError("non-finite endpoint")
    v = Fraction(int(man), 1)
    if exp >= 0:
        v *= 2 ** exp
    else:
        v /= 2 ** (-exp)
    return -v if sign else v


class Interval:
    """Closed interval [a, b] with outward-rounded arithmetic.

    ``a`` and ``b`` are raw mpmath mpf tuples; ``a <= b`` always holds and
    endpoints may be +-inf.  Construct from one value (thin interval, exact
    for int/float; tightly outward-rounded for str/Fraction/Decimal) or two.
    """

    __slots__ = ("a", "b")

    def __init__(self, lo, hi=None):
        if hi is None:
            if isinstance(lo, Interval):
                self.a, self.b = lo.a, lo.b
                return
            self.a = _convert_endpoint(lo, _FLOOR)
            self.b = _convert_endpoint(lo, _CEIL)
        else:
            self.a = _convert_endpoint(lo, _FLOOR)
            self.b = _convert_endpoint(hi, _CEIL)
        if self.a != fnan and self.b != fnan and mpf_cmp(self.a, self.b) > 0:
            raise ValueError(f"empty interval: lo > hi ({self})")

    # ----- accessors -------------------------------------------------

    @property
    def lo_float(self) -> float:
        """Largest float known to be <= the true lower endpoint."""
        f = to_float(self.a, rnd="n")
        while from_float(f) != fninf and mpf_cmp(from_float(f), self.a) > 0:
            f = math.nextafter(f, -math.inf)
        return f

    @property
    def hi_float(self) -> float:
        f = to_float(self.b, rnd="n")
        while from_float(f) != finf and mpf_cmp(from_float(f), self.b) < 0:
            f = math.nextafter(f, math.inf)
        return f

    @property
    def mid_float(self) -> float:
        return to_float(mpf_shift(mpf_add(self.a, self.b, 64, "n"), -1), rnd="n")

    @property
    def rad_float(self) -> float:
        """Float upper bound on max(hi-mid, mid-lo)."""
        w = self.width_float
        return w if math.isinf(w) else 0.5 * w + abs(self.mid_float) * 1e-15 + 5e-324

    @property
    def width_float(self) -> float:
        f = to_float(mpf_sub(self.b, self.a, 64, _CEIL), rnd="n")
        return f * (1.0 + 2e-16) + 5e-324 if math.isfinite(f) else f

    def is_finite(self) -> bool:
        return self.a not in (finf, fninf, fnan) and self.b not in (finf, fninf, fnan)

    # ----- predicates ------------------------------------------------

    def contains(self, other) -> bool:
        o = other if isinstance(other, Interval) else Interval(other)
        return mpf_cmp(self.a, o.a) <= 0 and mpf_cmp(o.b, self.b) <= 0

    def strictly_contains_zero(self) -> bool:
        return mpf_sign(self.a) < 0 and mpf_sign(self.b) > 0

    def sign_certified(self):
        """-1 / +1 when the interval is strictly negative / positive,
        0 when it is exactly [0, 0], else None (sign undecided)."""
        sa, sb = mpf_sign(self.a), mpf_sign(self.b)
        if sa > 0:
            return 1
        if sb < 0:
            return -1
        if sa == 0 and sb == 0:
            return 0
        return None

    def certainly_gt(self, other) -> bool:
        o = other if isinstance(other, Interval) else Interval(other)
        return mpf_cmp(self.a, o.b) > 0

    def certainly_lt(self, other) -> bool:
        o = other if isinstance(other, Interval) else Interval(other)
        return mpf_cmp(self.b, o.a) < 0

    def certainly_ge(self, other) -> bool:
        o = other if isinstance(other, Interval) else Interval(other)
        return mpf_cmp(self.a, o.b) >= 0

    def certainly_le(self, other) -> bool:
        o = other if isinstance(other, Interval) else Interval(other)
        return mpf_cmp(self.b, o.a) <= 0

    def overlaps(self, other: "Interval") -> bool:
        return not (self.certainly_lt(other) or self.certainly_gt(other))

    # ----- arithmetic ------------------------------------------------

    def __neg__(self):
        return _mk(mpf_neg(self.b), mpf_neg(self.a))

    def __add__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        p = _ctx["prec"]
        return _mk(mpf_add(self.a, o.a, p, _FLOOR), mpf_add(self.b, o.b, p, _CEIL))

    __radd__ = __add__

    def __sub__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        p = _ctx["prec"]
        return _mk(mpf_sub(self.a, o.b, p, _FLOOR), mpf_sub(self.b, o.a, p, _CEIL))

    def __rsub__(self, other):
        return Interval(other).__sub__(self)

    def __mul__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        p = _ctx["prec"]
        al, ah, bl, bh = self.a, self.b, o.a, o.b
        sal, sah = mpf_sign(al), mpf_sign(ah)
        sbl, sbh = mpf_sign(bl), mpf_sign(bh)
        if sal >= 0:  # a >= 0
            if sbl >= 0:
                return _mk(mpf_mul(al, bl, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
            if sbh <= 0:
                return _mk(mpf_mul(ah, bl, p, _FLOOR), mpf_mul(al, bh, p, _CEIL))
            return _mk(mpf_mul(ah, bl, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
        if sah <= 0:  # a <= 0
            if sbl >= 0:
                return _mk(mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bl, p, _CEIL))
            if sbh <= 0:
                return _mk(mpf_mul(ah, bh, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
            return _mk(mpf_mul(al, bh, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
        # a straddles zero
        if sbl >= 0:
            return _mk(mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
        if sbh <= 0:
            return _mk(mpf_mul(ah, bl, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
        lo1, lo2 = mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bl, p, _FLOOR)
        hi1, hi2 = mpf_mul(al, bl, p, _CEIL), mpf_mul(ah, bh, p, _CEIL)
        return _mk(
            lo1 if mpf_cmp(lo1, lo2) <= 0 else lo2,
            hi1 if mpf_cmp(hi1, hi2) >= 0 else hi2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        p = _ctx["prec"]
        al, ah, bl, bh = self.a, self.b, o.a, o.b
        sbl, sbh = mpf_sign(bl), mpf_sign(bh)
        if sbl > 0:
            sal, sah = mpf_sign(al), mpf_sign(ah)
            if sal >= 0:
                return _mk(mpf_div(al, bh, p, _FLOOR), mpf_div(ah, bl, p, _CEIL))
            if sah <= 0:
                return _mk(mpf_div(al, bl, p, _FLOOR), mpf_div(ah, bh, p, _CEIL))
            return _mk(mpf_div(al, bl, p, _FLOOR), mpf_div(ah, bl, p, _CEIL))
        if sbh < 0:
            sal, sah = mpf_sign(al), mpf_sign(ah)
            if sal >= 0:
                return _mk(mpf_div(ah, bh, p, _FLOOR), mpf_div(al, bl, p, _CEIL))
            if sah <= 0:
                return _mk(mpf_div(ah, bl, p, _FLOOR), mpf_div(al, bh, p, _CEIL))
            return _mk(mpf_div(ah, bh, p, _FLOOR), mpf_div(al, bh, p, _CEIL))
        raise IntervalDomainError(f"division by interval containing zero: {o}")

    def __rtruediv__(self, other):
        return Interval(other).__truediv__(self)

    def sqr(self) -> "Interval":
        """Tight square (never negative, unlike self*self for straddles)."""
        p = _ctx["prec"]
        sa, sb = mpf_sign(self.a), mpf_sign(self.b)
        if sa >= 0:
            return _mk(mpf_mul(self.a, self.a, p, _FLOOR), mpf_mul(self.b, self.b, p, _CEIL))
        if sb <= 0:
            return _mk(mpf_mul(self.b, self.b, p, _FLOOR), mpf_mul(self.a, self.a, p, _CEIL))
        hi1 = mpf_mul(self.a, self.a, p, _CEIL)
        hi2 = mpf_mul(self.b, self.b, p, _CEIL)
        return _mk(fzero, hi1 if mpf_cmp(hi1, hi2) >= 0 else hi2)

    def sqrt(self) -> "Interval":
        if mpf_sign(self.a) < 0:
            raise IntervalDomainError(f"sqrt of interval with negative part: {self}")
        p = _ctx["prec"]
        return _mk(mpf_sqrt(self.a, p, _FLOOR), mpf_sqrt(self.b, p, _CEIL))

    def exp(self) -> "Interval":
        p = _ctx["prec"]
        return _mk(mpf_exp(self.a, p, _FLOOR), mpf_exp(self.b, p, _CEIL))

    def log(self) -> "Interval":
        if mpf_sign(self.a) <= 0:
            raise IntervalDomainError(f"log of interval touching (-inf, 0]: {self}")
        p = _ctx["prec"]
        return _mk(mpf_log(self.a, p, _FLOOR), mpf_log(self.b, p, _CEIL))

    def abs(self) -> "Interval":
        sa, sb = mpf_sign(self.a), mpf_sign(self.b)
        if sa >= 0:
            return self
        if sb <= 0:
            return self.__neg__()
        na = mpf_neg(self.a)
        return _mk(fzero, na if mpf_cmp(na, self.b) >= 0 else self.b)

    def pow_int(self, n: int) -> "Interval":
        p = _ctx["prec"]
        if n == 0:
            one = from_int(1)
            return _mk(one, one)
        if n < 0:
            return Interval(1) / self.pow_int(-n)
        if n % 2 == 1:
            return _mk(mpf_pow_int(self.a, n, p, _FLOOR), mpf_pow_int(self.b, n, p, _CEIL))
        sa, sb = mpf_sign(self.a), mpf_sign(self.b)
        if sa >= 0:
            return _mk(mpf_pow_int(self.a, n, p, _FLOOR), mpf_pow_int(self.b, n, p, _CEIL))
        if sb <= 0:
            return _mk(mpf_pow_int(self.b, n, p, _FLOOR), mpf_pow_int(self.a, n, p, _CEIL))
        hi1 = mpf_pow_int(self.a, n, p, _CEIL)
        hi2 = mpf_pow_int(self.b, n, p, _CEIL)
        return _mk(fzero, hi1 if mpf_cmp(hi1, hi2) >= 0 else hi2)

    def mul_2exp(self, k: int) -> "Interval":
        """Exact scaling by 2**k."""
        return _mk(mpf_shift(self.a, k), mpf_shift(self.b, k))

    def hull(self, other: "Interval") -> "Interval":
        return _mk(
            self.a if mpf_cmp(self.a, other.a) <= 0 else other.a,
            self.b if mpf_cmp(self.b, other.b) >= 0 else other.b,
        )

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.a if mpf_cmp(self.a, other.a) >= 0 else other.a
        hi = self.b if mpf_cmp(self.b, other.b) <= 0 else other.b
        if mpf_cmp(lo, hi) > 0:
            raise IntervalDomainError("empty intersection")
        return _mk(lo, hi)

    def lower(self) -> "Interval":
        """Thin interval at the lower endpoint."""
        return _mk(self.a, self.a)

    def upper(self) -> "Interval":
        return _mk(self.b, self.b)

    def widened(self, eps: "Interval") -> "Interval":
        """Symmetric inflation by the upper bound of |eps|."""
        e = eps.abs()
        p = _ctx["prec"]
        return _mk(mpf_sub(self.a, e.b, p, _FLOOR), mpf_add(self.b, e.b, p, _CEIL))

    # ----- formatting ------------------------------------------------

    def to_decimal_outward(self, digits: int = 30):
        """Decimal endpoint strings rounded outward to `digits` significant digits."""

        def render(x, mode):
            if x == finf:
                return "inf"
            if x == fninf:
                return "-inf"
            frac = _mpf_to_fraction(x)
            with localcontext() as dctx:
                dctx.prec = digits
                dctx.rounding = mode
                d = Decimal(frac.numerator) / Decimal(frac.denominator)
            return str(d)

        return render(self.a, ROUND_FLOOR), render(self.b, ROUND_CEILING)

    def __repr__(self):
        lo, hi = self.to_decimal_outward(20)
        return f"Interval({lo}, {hi})"

    def __str__(self):
        lo, hi = self.to_decimal_outward(20)
        return f"[{lo}, {hi}]"


def hull(intervals) -> Interval:
    it = iter(intervals)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("hull of empty sequence")
    for x in it:
        acc = acc.hull(x)
    return acc


def isum(intervals) -> Interval:
    """Sum of intervals (order-deterministic, outward per step)."""
    acc = Interval(0)
    for x in intervals:
        acc = acc + x
    return acc


# ----- raw endpoint-pair kernels (hot loops) --------------------------
#
# A "pair" is (lo, hi) of raw mpf tuples.  These mirror the Interval ops
# without object construction; used by the Taylor-jet ladder.


def _raw_mul(a, b, p):
    al, ah = a
    bl, bh = b
    sal, sah = mpf_sign(al), mpf_sign(ah)
    sbl, sbh = mpf_sign(bl), mpf_sign(bh)
    if sal >= 0:
        if sbl >= 0:
            return (mpf_mul(al, bl, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
        if sbh <= 0:
            return (mpf_mul(ah, bl, p, _FLOOR), mpf_mul(al, bh, p, _CEIL))
        return (mpf_mul(ah, bl, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
    if sah <= 0:
        if sbl >= 0:
            return (mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bl, p, _CEIL))
        if sbh <= 0:
            return (mpf_mul(ah, bh, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
        return (mpf_mul(al, bh, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
    if sbl >= 0:
        return (mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bh, p, _CEIL))
    if sbh <= 0:
        return (mpf_mul(ah, bl, p, _FLOOR), mpf_mul(al, bl, p, _CEIL))
    lo1, lo2 = mpf_mul(al, bh, p, _FLOOR), mpf_mul(ah, bl, p, _FLOOR)
    hi1, hi2 = mpf_mul(al, bl, p, _CEIL), mpf_mul(ah, bh, p, _CEIL)
    return (
        lo1 if mpf_cmp(lo1, lo2) <= 0 else lo2,
        hi1 if mpf_cmp(hi1, hi2) >= 0 else hi2,
    )


def _raw_add(a, b, p):
    return (mpf_add(a[0], b[0], p, _FLOOR), mpf_add(a[1], b[1], p, _CEIL))


def _raw_sub(a, b, p):
    return (mpf_sub(a[0], b[1], p, _FLOOR), mpf_sub(a[1], b[0], p, _CEIL))


def pi() -> Interval:
    p = _ctx["prec"]
    return _mk(mpf_pi(p, _FLOOR), mpf_pi(p, _CEIL))


def euler_gamma() -> Interval:
    p = _ctx["prec"]
    return _mk(libmp.mpf_euler(p, _FLOOR), libmp.mpf_euler(p, _CEIL))
