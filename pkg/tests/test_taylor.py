"""Taylor models: enclosure preservation, quadrature, Bessel composition."""

import random

import pytest
from mpmath import mp

from trispec.interval import Interval
from trispec.taylor import (
    ParityError,
    TaylorModel,
    bessel_taylor,
    integrate_even_part,
)


def enc_contains(enc: Interval, ref, digits=40):
    lo, hi = enc.to_decimal_outward(digits)
    return mp.mpf(lo) <= ref <= mp.mpf(hi)


def test_constant_and_linear_models():
    m = TaylorModel.constant(2.5, 7)
    assert m.range().contains(2.5)
    l = TaylorModel.linear(1.0, 0.5, 7)
    assert l.enclose_at(Interval(-1)).contains(0.5)
    assert l.enclose_at(Interval(1)).contains(1.5)


def test_mul_truncation_is_sound():
    rng = random.Random(5)
    m = 7
    a = TaylorModel([rng.uniform(-1, 1) for _ in range(m + 1)], Interval(-1e-9, 1e-9))
    b = TaylorModel([rng.uniform(-1, 1) for _ in range(m + 1)], Interval(-1e-9, 1e-9))
    prod = a * b
    for _ in range(60):
        t = Interval(rng.uniform(-1, 1))
        va = a.enclose_at(t)
        vb = b.enclose_at(t)
        # the product model must enclose the pointwise products of any
        # admissible values of the factors
        pa = va.mid_float
        pb = vb.mid_float
        assert prod.enclose_at(t).contains(Interval(pa) * Interval(pb))


def test_integrate_constant_model():
    m = TaylorModel.constant(3.0, 25)
    v = integrate_even_part(m, Interval(2.0))
    assert v.contains(6.0)
    assert v.width_float < 1e-60


def test_integrate_t_squared():
    # v(t) = t^2, segment length 2: integral = (2/2) * int t^2 dt = 2/3
    coeffs = [0, 0, 1] + [0] * 23
    v = integrate_even_part(TaylorModel(coeffs), Interval(2))
    from fractions import Fraction

    assert v.contains(Interval(Fraction(2, 3)))


def test_integrate_parity_error():
    with pytest.raises(ParityError):
        integrate_even_part(TaylorModel([1, 0, 0]), Interval(1))


def test_integrate_sin_squared_riemann_oracle():
    # v(t) = sin^2(pi p(t)) on a unit segment, p(t) = (t+1)/2;
    # oracle: adaptive high-resolution Riemann sum (midpoint, 10^6 points,
    # rigorous via |v'| <= pi bound on the mesh error)
    mp.dps = 30
    n = 10 ** 6
    h = mp.mpf(1) / n
    riemann = h * sum(mp.sin(mp.pi * (i + mp.mpf(0.5)) * h) ** 2 for i in range(n))
    # |d/ds sin^2(pi s)| = pi|sin(2 pi s)| <= pi, midpoint rule error <= pi h^2/24 per cell
    err = mp.pi * h / 24
    # model built from the sine series: sin(pi p(t)) = sum (-1)^k (pi p)^(2k+1)/(2k+1)!
    # assembled with exact interval arithmetic on a degree-25 model
    p = TaylorModel.linear(0.5, 0.5, 25)
    pp = p.scale(Interval('3.14159265358979323846264338327950288420'))
    # sin via odd series with rigorous alternating tail on |pp| <= pi
    acc = TaylorModel.constant(0, 25)
    term = pp
    import math

    for k in range(0, 13):
        if k:
            term = term * pp * pp
            term = term.scale(Interval(-1) / ((2 * k) * (2 * k + 1)))
        acc = acc + term
    # alternating tail: |pi^(2k+3)/(2k+3)!| at k=13
    tail = float(mp.pi ** 29 / mp.factorial(29))
    acc = TaylorModel(acc.coeffs, acc.remainder + Interval(-tail, tail))
    model = acc * acc
    v = integrate_even_part(model, Interval(1))
    lo, hi = v.to_decimal_outward(25)
    assert mp.mpf(lo) - err <= riemann <= mp.mpf(hi) + err
    assert float(hi) - float(lo) < 1e-6


def test_bessel_taylor_constant_path():
    m = bessel_taylor("first", 0, TaylorModel.constant(0.0, 9))
    assert m.coeffs[0].contains(1)
    assert m.remainder.contains(0)
    for c in m.coeffs[1:]:
        assert c.contains(0)


def test_bessel_taylor_linear_coefficient():
    # d/dt J0(1 + 0.1 t) at t=0 equals -0.1 J1(1)
    mp.dps = 40
    model = bessel_taylor("first", 0, TaylorModel.linear(1.0, 0.1, 25))
    ref = -mp.mpf(0.1) * mp.besselj(1, 1)
    assert enc_contains(model.coeffs[1], ref)
    # finite-difference cross-check
    fd = (mp.besselj(0, mp.mpf(1) + mp.mpf(0.1) * mp.mpf(1e-8)) -
          mp.besselj(0, mp.mpf(1) - mp.mpf(0.1) * mp.mpf(1e-8))) / mp.mpf(2e-8)
    assert abs(fd - ref) < 1e-12


def test_bessel_taylor_zero_crossing_pointwise_oracle():
    # degree-25 model of J0 along a segment crossing its first zero encloses
    # direct evaluations at 50 sample points
    mp.dps = 45
    model = bessel_taylor("first", 0, TaylorModel.linear(2.4, 0.35, 25))
    rng = random.Random(11)
    for _ in range(50):
        t = rng.uniform(-1, 1)
        ref = mp.besselj(0, mp.mpf(2.4) + mp.mpf(0.35) * mp.mpf(t))
        assert enc_contains(model.enclose_at(Interval(t)), ref)


def test_bessel_taylor_second_kind_containment():
    mp.dps = 45
    model = bessel_taylor("second", 1, TaylorModel.linear(3.0, 0.5, 15))
    rng = random.Random(13)
    for _ in range(40):
        t = rng.uniform(-1, 1)
        ref = mp.bessely(1, mp.mpf(3.0) + mp.mpf(0.5) * mp.mpf(t))
        assert enc_contains(model.enclose_at(Interval(t)), ref)


def test_model_range_contains_samples():
    model = bessel_taylor("first", 2, TaylorModel.linear(1.7, 0.4, 15))
    mp.dps = 40
    r = model.range()
    rng = random.Random(17)
    for _ in range(30):
        t = rng.uniform(-1, 1)
        ref = mp.besselj(2, mp.mpf(1.7) + mp.mpf(0.4) * mp.mpf(t))
        lo, hi = r.to_decimal_outward(30)
        assert mp.mpf(lo) <= ref <= mp.mpf(hi)
