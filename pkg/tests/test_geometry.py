"""Geometry: inradius anchors, homothety certificates, stability radii."""

import math
import random
from fractions import Fraction

import pytest
from mpmath import mp

from trispec.interval import Interval
from trispec.geometry import (
    DegenerateTriangleError,
    ModeMismatchError,
    SegmentPerturbation,
    SignAmbiguousError,
    Triangle,
    containment_homothety,
    eigenvalue_stability_factors,
    incenter_inradius,
    perturbation_mode,
    quotient_stability_radius,
)


def tri(cx, cy):
    return Triangle(Interval(cx), Interval(cy))


def test_degenerate_apex_rejected():
    with pytest.raises(DegenerateTriangleError):
        tri(0.5, 0.0)
    with pytest.raises(DegenerateTriangleError):
        Triangle(Interval(0.5), Interval(-1e-9, 1e-9))


def test_inradius_equilateral():
    T = Triangle(Interval(0.5), Interval(Fraction(3).sqrt() if False else "0.86602540378443864676372317075293618347"))
    (_, _), rho = incenter_inradius(T)
    # 1/(2 sqrt(3)) = 0.2886751345948128...
    assert rho.lo_float <= 0.2886751345948129
    assert rho.hi_float >= 0.2886751345948128
    assert rho.width_float < 1e-30


def test_inradius_right_isosceles():
    T = tri(0.0, 1.0)
    (_, _), rho = incenter_inradius(T)
    ref = (2 - math.sqrt(2)) / 2
    assert rho.lo_float <= ref <= rho.hi_float
    assert abs(rho.mid_float - 0.292893218813452) < 1e-12


def test_inradius_fixture_apex():
    # apex (0.63500, 0.27500); oracle: high-precision area/s evaluation
    mp.dps = 50
    T = Triangle(Interval("0.63500"), Interval("0.27500"))
    (ix, iy), rho = incenter_inradius(T)
    cx, cy = mp.mpf("0.635"), mp.mpf("0.275")
    a = mp.sqrt((cx - 1) ** 2 + cy ** 2)
    b = mp.sqrt(cx ** 2 + cy ** 2)
    s = (a + b + 1) / 2
    ref = (cy / 2) / s
    lo, hi = rho.to_decimal_outward(30)
    assert mp.mpf(lo) <= ref <= mp.mpf(hi)
    # incenter: boundary points satisfy x.n = rho when origin is the incenter
    # check at the base side y = 0: the inward... outward normal is (0,-1),
    # so (P - I).n = iy for every P on the base
    assert iy.overlaps(rho)


def test_incenter_normal_distance_all_sides():
    # for all three sides of a generic triangle, distance from incenter = rho
    mp.dps = 40
    T = Triangle(Interval("0.4"), Interval("0.7"))
    (ix, iy), rho = incenter_inradius(T)
    cx, cy = mp.mpf("0.4"), mp.mpf("0.7")
    I = (mp.mpf(str(ix.mid_float)), mp.mpf(str(iy.mid_float)))
    for (P, Q) in (((0, 0), (1, 0)), ((0, 0), (cx, cy)), ((1, 0), (cx, cy))):
        px, py = mp.mpf(P[0]), mp.mpf(P[1])
        qx, qy = mp.mpf(Q[0]), mp.mpf(Q[1])
        ex, ey = qx - px, qy - py
        nrm = mp.sqrt(ex ** 2 + ey ** 2)
        dist = abs((I[0] - px) * ey - (I[1] - py) * ex) / nrm
        assert abs(dist - mp.mpf(str(rho.mid_float))) < 1e-10


def test_homothety_equal_triangles_rejected():
    T = tri(0.4, 0.5)
    with pytest.raises(SignAmbiguousError):
        containment_homothety(T, T)


def test_homothety_equal_heights_same_sign_case():
    # equal apex heights force p = q; both negative here, factor 1 - p/c_y'
    T = tri(0.4, 0.5)
    Tp = tri(0.5, 0.5)
    cert = containment_homothety(T, Tp)
    assert abs(cert.factor.mid_float - 1.1) < 1e-12


def test_homothety_height_ratio_case():
    # same apex abscissa, T taller: p < 0 < q, factor c_y/c_y' > 1
    T = tri(0.5, 0.6)
    Tp = tri(0.5, 0.4)
    cert = containment_homothety(T, Tp)
    assert abs(cert.factor.mid_float - 1.5) < 1e-12
    # sampled containment in the scaled T' (homothety preserving apex ray)
    rng = random.Random(3)
    f = cert.factor.hi_float
    for _ in range(1000):
        u, v = rng.random(), rng.random()
        if u + v > 1:
            u, v = 1 - u, 1 - v
        px, py = u * 1.0 + v * 0.5, v * 0.6
        # a homothety of T' with ratio f = c_y/c_y' about the point that sends
        # its apex to T's apex: center (0.5 (1-f)/(1-f), ...) -- with equal
        # apex x the scaled triangle is ((1-f)*ax, *), apex (0.5, 0.6)
        ax, ay = 0.5, 0.4
        cxh, cyh = 0.5 + f * (0 - ax) + (ax - 0.5) * 0, 0.6 + f * (0 - ay)
        # vertices of scaled T': apex-anchored homothety
        v0 = (0.5 + f * (0.0 - 0.5), 0.6 + f * (0.0 - 0.4))
        v1 = (0.5 + f * (1.0 - 0.5), 0.6 + f * (0.0 - 0.4))
        v2 = (0.5, 0.6)
        d = (v1[0] - v0[0]) * (v2[1] - v0[1])
        l3 = (py - v0[1]) / (v2[1] - v0[1])
        l2 = ((px - v0[0]) * (v2[1] - v0[1]) - (py - v0[1]) * (v2[0] - v0[0])) / d
        l1 = 1 - l2 - l3
        assert min(l1, l2, l3) >= -1e-12, (px, py)


def point_in_triangle(px, py, cx, cy):
    lam_c = py / cy
    lam_b = (px * cy - py * cx) / cy
    lam_a = 1 - lam_b - lam_c
    return lam_a >= -1e-12 and lam_b >= -1e-12 and lam_c >= -1e-12


def test_homothety_direct_containment_sampling_oracle():
    # T apex (0.5, 0.4) inside T' apex (0.5, 0.5): p > 0, q < 0, factor 1
    T, Tp = tri(0.5, 0.4), tri(0.5, 0.5)
    cert = containment_homothety(T, Tp)
    assert cert.factor.contains(1)
    rng = random.Random(99)
    for _ in range(1000):
        u, v = rng.random(), rng.random()
        if u + v > 1:
            u, v = 1 - u, 1 - v
        # point of T: A + u (B-A) + v (C-A)
        px, py = u * 1.0 + v * 0.5, v * 0.4
        assert point_in_triangle(px, py, 0.5, 0.5)


def test_homothety_factor_scaling_containment_oracle():
    # generic same-sign case: verify containment in the scaled triangle by sampling
    T, Tp = tri(0.30, 0.62), tri(0.45, 0.55)
    cert = containment_homothety(T, Tp)
    f = cert.factor.hi_float
    assert cert.direction == "T_in_scaled_Tprime"
    # homothety of T' fixing vertex B=(1,0) per the containment construction:
    # sample T's points, map through the inverse homothety, check in T'
    rng = random.Random(5)
    for _ in range(2000):
        u, v = rng.random(), rng.random()
        if u + v > 1:
            u, v = 1 - u, 1 - v
        px, py = u * 1.0 + v * 0.30, v * 0.62
        # inverse homothety about B with ratio 1/f
        qx = 1 + (px - 1) / f
        qy = py / f
        assert point_in_triangle(qx, qy, 0.45, 0.55), (px, py)


def test_stability_radius_zero_perturbation():
    S = SegmentPerturbation(tri(0.635, 0.275), (Interval(0.1), Interval(0.1)), Interval(0))
    r = quotient_stability_radius(S, Interval(1.7), "same_sign")
    assert r.contains(0) and r.hi_float == 0


def test_stability_radius_mixed_sign_fixture_height():
    # mixed-sign arithmetic oracle: fixture apex height and |v_y| = 0.00124...,
    # direction chosen so p_v and q_v have opposite certified signs
    # (q_v = p_v - v_y, so 0 < p_v < v_y gives the mixed case)
    T = Triangle(Interval("0.63500"), Interval("0.27500"))
    vy = Interval("0.0012403688839389946")
    vx = vy * (T.c_x - 0.5) / T.c_y  # makes p_v = v_y/2
    S = SegmentPerturbation(T, (vx, vy), Interval(1))
    p_v, q_v = S.cross_products()
    assert p_v.sign_certified() == 1 and q_v.sign_certified() == -1
    assert perturbation_mode(S) == "mixed_sign"
    xi = Interval("1.67675")
    r = quotient_stability_radius(S, xi, "mixed_sign")
    ref = 1.67675 * ((0.275 / (0.275 - 0.0012403688839389946)) ** 2 - 1)
    assert abs(r.mid_float - ref) < 1e-12
    with pytest.raises(ModeMismatchError):
        quotient_stability_radius(S, xi, "same_sign")


def test_stability_radius_same_sign_fixture_vector():
    # the actual fixture direction (v21 at apex A) has both cross products
    # certified negative: same-sign mode
    T = Triangle(Interval("0.63500"), Interval("0.27500"))
    v = (Interval("0.004610608896618232"), Interval("0.0012403688839389946"))
    S = SegmentPerturbation(T, v, Interval(1))
    p_v, q_v = S.cross_products()
    assert p_v.sign_certified() == -1 and q_v.sign_certified() == -1
    assert perturbation_mode(S) == "same_sign"
    r = quotient_stability_radius(S, Interval("1.67675"), "same_sign")
    assert 0 < r.mid_float < 0.1


def test_stability_same_sign_with_parallel_v_collapses_factor():
    # v parallel to AC: p_v = 0 exactly, same-sign bound keeps only the q factor
    T = tri(0.5, 0.25)
    v = (Interval(0.5) * 0.01, Interval(0.25) * 0.01)  # parallel to AC
    S = SegmentPerturbation(T, v, Interval(1))
    p_v, q_v = S.cross_products()
    assert p_v.sign_certified() == 0
    assert perturbation_mode(S) == "same_sign"
    r = quotient_stability_radius(S, Interval(2.0), "same_sign")
    denom = 0.25 - 0.0025
    qv = abs((0.5 - 1) * 0.0025 - 0.25 * 0.005)
    ref = 2.0 * ((1 + qv / denom) ** 2 - 1)
    assert abs(r.mid_float - ref) < 1e-12


def test_sign_ambiguous_perturbation_rejected():
    T = tri(0.5, 0.5)
    v = (Interval(-1e-3, 1e-3), Interval(1e-3))  # p_v straddles zero
    S = SegmentPerturbation(T, v, Interval(0.5))
    with pytest.raises(SignAmbiguousError):
        perturbation_mode(S)


def test_eigenvalue_stability_factor_brackets_one():
    T = Triangle(Interval("0.63500"), Interval("0.27500"))
    v = (Interval("0.004610608896618232"), Interval("0.0012403688839389946"))
    S = SegmentPerturbation(T, v, Interval(1))
    f_lo, f_hi = eigenvalue_stability_factors(S)
    assert f_lo.hi_float <= 1.0 + 1e-15
    assert f_hi.lo_float >= 1.0 - 1e-15
    assert (f_lo * f_hi).contains(1) or abs(f_lo.mid_float * f_hi.mid_float - 1) < 1e-6


def test_degenerate_perturbation_rejected():
    T = tri(0.5, 0.01)
    with pytest.raises(DegenerateTriangleError):
        SegmentPerturbation(T, (Interval(0), Interval(0.02)), Interval(1))
