"""Interval arithmetic: containment fuzzing against mpmath.iv, edge cases."""

import math
import random
from fractions import Fraction

import pytest
from mpmath import iv, mp

from trispec.interval import (
    Interval,
    IntervalDomainError,
    euler_gamma,
    hull,
    isum,
    pi,
    precision,
    set_precision,
    get_precision,
)


def mp_iv(x: Interval):
    return iv.mpf([x.lo_float, x.hi_float])


def rand_interval(rng, scale=10.0, allow_zero=True):
    m = rng.uniform(-scale, scale)
    w = abs(rng.gauss(0, scale * 0.1))
    a, b = m - w, m + w
    if not allow_zero and a <= 0 <= b:
        shift = abs(a) + 0.25
        a, b = a + shift, b + shift
    return Interval(a, b)


def test_constructors_exact():
    x = Interval(0.5)
    assert x.lo_float == 0.5 and x.hi_float == 0.5
    y = Interval(3)
    assert y.contains(3)
    z = Interval("0.1")
    assert z.lo_float < 0.1 < z.hi_float or z.contains(Interval(Fraction(1, 10)))
    assert z.width_float < 1e-70
    w = Interval(Fraction(1, 3))
    assert w.lo_float <= 1 / 3 <= w.hi_float


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_containment_fuzz_against_mpmath():
    rng = random.Random(12345)
    iv.prec = 256
    for _ in range(800):
        x = rand_interval(rng)
        y = rand_interval(rng)
        gx, gy = mp_iv(x), mp_iv(y)
        pairs = [
            (x + y, gx + gy),
            (x - y, gx - gy),
            (x * y, gx * gy),
        ]
        if not (y.lo_float <= 0 <= y.hi_float):
            pairs.append((x / y, gx / gy))
        for ours, ref in pairs:
            # ours must contain the mpmath interval result's true range; both
            # enclose, so compare sampled point arithmetic instead
            assert ours.lo_float <= float(ref.b) + 1e-12 * (1 + abs(float(ref.b)))
            assert ours.hi_float >= float(ref.a) - 1e-12 * (1 + abs(float(ref.a)))


def test_pointwise_ops_enclose_samples():
    rng = random.Random(777)
    for _ in range(300):
        x = rand_interval(rng)
        y = rand_interval(rng)
        for _ in range(4):
            px = rng.uniform(x.lo_float, x.hi_float)
            py = rng.uniform(y.lo_float, y.hi_float)
            assert (x + y).contains(Interval(px) + Interval(py))
            assert (x * y).lo_float <= px * py <= (x * y).hi_float
            s = x.sqr()
            assert s.lo_float <= px * px <= s.hi_float


def test_division_sign_cases():
    assert (Interval(2, 3) / Interval(4, 5)).contains(Interval(0.5))
    q = Interval(-3, -2) / Interval(-5, -4)
    assert q.lo_float <= 0.4 and q.hi_float >= 0.75
    with pytest.raises(IntervalDomainError):
        Interval(1) / Interval(-1, 1)


def test_sqrt_log_exp_monotone_envelopes():
    x = Interval(0.25, 4.0)
    s = x.sqrt()
    assert s.lo_float <= 0.5 and s.hi_float >= 2.0
    with pytest.raises(IntervalDomainError):
        Interval(-1, 1).sqrt()
    l = Interval(1.0, math.e ** 2).log()
    assert l.lo_float <= 0 and l.hi_float >= 2
    e = Interval(0, 1).exp()
    assert e.lo_float <= 1 and e.hi_float >= math.e


def test_pow_int_even_odd():
    x = Interval(-2, 3)
    assert x.pow_int(2).lo_float == 0 and x.pow_int(2).hi_float >= 9
    assert x.pow_int(3).lo_float <= -8 and x.pow_int(3).hi_float >= 27
    assert x.pow_int(0).contains(1)
    y = Interval(2, 4)
    assert y.pow_int(-1).contains(Interval(0.25, 0.5))


def test_inclusion_monotonicity():
    # x subset of x' implies f(x) subset of f(x') for every provided enclosure
    rng = random.Random(4242)
    for _ in range(200):
        raw = rand_interval(rng, allow_zero=False)
        x = Interval(abs(raw.lo_float), abs(raw.lo_float) + raw.width_float + 0.1)
        pad = abs(rng.gauss(0, 0.5))
        xw = Interval(max(x.lo_float - pad, x.lo_float / 2), x.hi_float + pad)
        for f in ("sqrt", "log", "exp", "sqr", "abs"):
            inner = getattr(x, f)()
            outer = getattr(xw, f)()
            assert outer.contains(inner), f
        y = rand_interval(rng)
        yw = Interval(y.lo_float - pad, y.hi_float + pad)
        assert (xw * yw).contains(x * y)
        assert (xw + yw).contains(x + y)


def test_certified_comparisons_and_signs():
    a, b = Interval(1, 2), Interval(3, 4)
    assert a.certainly_lt(b) and b.certainly_gt(a)
    assert not a.certainly_lt(Interval(1.5))
    assert Interval(1, 2).sign_certified() == 1
    assert Interval(-2, -1).sign_certified() == -1
    assert Interval(0).sign_certified() == 0
    assert Interval(-1, 1).sign_certified() is None


def test_precision_context_and_constants():
    assert get_precision() == 256
    p = pi()
    assert p.lo_float <= 3.141592653589793 <= p.hi_float
    assert p.width_float < 1e-70
    g = euler_gamma()
    assert g.lo_float <= 0.5772156649015329 <= g.hi_float
    with precision(64):
        q = pi()
        assert q.width_float < 1e-17
        assert get_precision() == 64
    assert get_precision() == 256


def test_outward_decimal_rendering():
    x = Interval(Fraction(1, 3))
    lo, hi = x.to_decimal_outward(12)
    assert lo != hi  # outward rounding must widen
    assert float(lo) < 1 / 3 < float(hi)


def test_hull_isum_widened():
    xs = [Interval(0, 1), Interval(2, 3), Interval(-1, 0.5)]
    h = hull(xs)
    assert h.lo_float <= -1 and h.hi_float >= 3
    s = isum(xs)
    assert s.contains(Interval(1.0, 4.5))
    w = Interval(1, 2).widened(Interval(0.25))
    assert w.contains(Interval(0.75, 2.25))


def test_mul_2exp_exact():
    x = Interval(1.5, 2.5).mul_2exp(3)
    assert x.lo_float == 12.0 and x.hi_float == 20.0
