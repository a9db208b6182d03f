"""Triangle model, incenter/inradius, homothety containment, stability radii.

Triangles are normalized with base vertices (0,0) and (1,0) and apex
(c_x, c_y), c_y > 0; the apex coordinates are intervals so exact decimal
inputs stay exact.  Containment certificates and eigenvalue-quotient
stability radii follow from cross-product sign conditions: if p and q are the
cross products of the apex vectors (or of the apex vector with a perturbation
direction), their certified signs select which homothety sandwiches the
perturbed triangle, and the homothety factor turns into a multiplicative
two-sided bound on every Dirichlet eigenvalue via domain monotonicity and
scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .interval import Interval

__all__ = [
    "DegenerateTriangleError",
    "HomothetyCertificate",
    "ModeMismatchError",
    "SegmentPerturbation",
    "SignAmbiguousError",
    "Triangle",
    "containment_homothety",
    "eigenvalue_stability_factors",
    "incenter_inradius",
    "perturbation_mode",
    "quotient_stability_radius",
]


class DegenerateTriangleError(ValueError):
    pass


class SignAmbiguousError(ArithmeticError):
    """A cross product straddles zero; the lemma hypotheses cannot be certified."""


class ModeMismatchError(ArithmeticError):
    """Certified signs contradict the requested stability mode."""


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(x)


@dataclass(frozen=True)
class Triangle:
    """Normalized triangle with vertices (0,0), (1,0), (c_x, c_y)."""

    c_x: Interval
    c_y: Interval

    def __post_init__(self):
        object.__setattr__(self, "c_x", _as_interval(self.c_x))
        object.__setattr__(self, "c_y", _as_interval(self.c_y))
        if not self.c_y.sign_certified() == 1:
            raise DegenerateTriangleError(f"apex height must be certified positive: {self.c_y}")

    @classmethod
    def from_apex(cls, c_x, c_y) -> "Triangle":
        return cls(_as_interval(c_x), _as_interval(c_y))

    @property
    def apex_mid(self):
        return (self.c_x.mid_float, self.c_y.mid_float)

    def vertices(self):
        z = Interval(0)
        return ((z, z), (Interval(1), z), (self.c_x, self.c_y))

    def vertices_mid(self):
        return ((0.0, 0.0), (1.0, 0.0), self.apex_mid)

    def area(self) -> Interval:
        return self.c_y.mul_2exp(-1)

    def side_lengths(self):
        """(|BC|, |CA|, |AB|) opposite the vertices A=(0,0), B=(1,0), C."""
        a = ((self.c_x - 1).sqr() + self.c_y.sqr()).sqrt()
        b = (self.c_x.sqr() + self.c_y.sqr()).sqrt()
        return a, b, Interval(1)

    def diameter(self) -> Interval:
        a, b, c = self.side_lengths()
        m = a.hull(b).hull(c)
        lo = max(a.lo_float, b.lo_float, c.lo_float)
        return m.intersect(Interval(lo, float("inf")))

    def barycentric(self, px, py):
        """Barycentric coordinates of (px, py) wrt (A, B, C)."""
        px, py = _as_interval(px), _as_interval(py)
        lam_c = py / self.c_y
        lam_b = (px * self.c_y - py * self.c_x) / self.c_y
        lam_a = Interval(1) - lam_b - lam_c
        return lam_a, lam_b, lam_c

    def certainly_outside(self, px, py) -> bool:
        """Certified: (px, py) is outside the closed triangle."""
        return any(l.sign_certified() == -1 for l in self.barycentric(px, py))

    def certainly_inside(self, px, py) -> bool:
        return all(l.sign_certified() == 1 for l in self.barycentric(px, py))


@dataclass(frozen=True)
class HomothetyCertificate:
    """Certifies T subset of (factor-homothety of T'), factor >= 1."""

    factor: Interval
    direction: str  # 'T_in_scaled_Tprime' | 'Tprime_in_scaled_T'

    def __post_init__(self):
        if self.direction not in ("T_in_scaled_Tprime", "Tprime_in_scaled_T"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.factor.lo_float < 1.0 - 1e-15:
            raise ValueError(f"homothety factor must be >= 1: {self.factor}")


@dataclass(frozen=True)
class SegmentPerturbation:
    """Apex perturbations C + t v for t in [-ell, ell]."""

    base: Triangle
    v: tuple
    ell: Interval

    def __post_init__(self):
        object.__setattr__(self, "v", (_as_interval(self.v[0]), _as_interval(self.v[1])))
        object.__setattr__(self, "ell", _as_interval(self.ell))
        if self.ell.lo_float < 0:
            raise ValueError("perturbation range ell must be nonnegative")
        if not self.height_margin().sign_certified() == 1:
            raise DegenerateTriangleError(
                "perturbed triangles may degenerate: c_y - ell*|v_y| is not certified positive"
            )

    def height_margin(self) -> Interval:
        return self.base.c_y - self.ell * self.v[1].abs()

    def cross_products(self):
        """p_v = AC x v and q_v = BC x v."""
        cx, cy = self.base.c_x, self.base.c_y
        vx, vy = self.v
        p_v = cx * vy - cy * vx
        q_v = (cx - 1) * vy - cy * vx
        return p_v, q_v

    def triangle_at(self, t) -> Triangle:
        t = _as_interval(t)
        return Triangle(self.base.c_x + t * self.v[0], self.base.c_y + t * self.v[1])


def incenter_inradius(T: Triangle):
    """Incenter (side-length weighted vertex average) and inradius area/s."""
    a, b, c = T.side_lengths()
    perim = a + b + c
    ix = (b + c * T.c_x) / perim
    iy = (c * T.c_y) / perim
    rho = T.area().mul_2exp(1) / perim  # area/s with s = perim/2
    return (ix, iy), rho


def containment_homothety(T: Triangle, Tp: Triangle) -> HomothetyCertificate:
    """Certificate that T is contained in a homothety of Tp.

    The case is selected by the certified signs of the cross products
    p = AC x AC' and q = BC x BC'; a sign straddling zero is an error and the
    caller must split its input segment instead.
    """
    p = T.c_x * Tp.c_y - T.c_y * Tp.c_x
    q = (T.c_x - 1) * Tp.c_y - T.c_y * (Tp.c_x - 1)
    sp, sq = p.sign_certified(), q.sign_certified()
    if sp is None or sq is None or sp == 0 or sq == 0:
        raise SignAmbiguousError(f"cross product signs undecided: p={p}, q={q}")
    one = Interval(1)
    if sp < 0 and sq < 0:
        return HomothetyCertificate(one - p / Tp.c_y, "T_in_scaled_Tprime")
    if sp > 0 and sq > 0:
        return HomothetyCertificate(one + q / Tp.c_y, "T_in_scaled_Tprime")
    if sp > 0 and sq < 0:
        return HomothetyCertificate(one, "T_in_scaled_Tprime")
    # p < 0 < q: factor c_y/c_y' >= 1 is automatic (p - q = c_y' - c_y < 0)
    return HomothetyCertificate(T.c_y / Tp.c_y, "T_in_scaled_Tprime")


def perturbation_mode(S: SegmentPerturbation) -> str:
    """'same_sign' or 'mixed_sign' from the certified signs of p_v, q_v.

    A certified zero cross product collapses its homothety factor to 1 and is
    compatible with the same-sign bound.
    """
    p_v, q_v = S.cross_products()
    sp, sq = p_v.sign_certified(), q_v.sign_certified()
    if sp is None or sq is None:
        raise SignAmbiguousError(f"perturbation cross products undecided: p_v={p_v}, q_v={q_v}")
    if sp * sq > 0 or sp == 0 or sq == 0:
        return "same_sign"
    return "mixed_sign"


def _stability_factor(S: SegmentPerturbation, mode: str) -> Interval:
    """Multiplicative half-width G with lambda^(t) in [G^-2, G^2] * lambda."""
    denom = S.height_margin()
    if not denom.sign_certified() == 1:
        raise DegenerateTriangleError("c_y - ell |v_y| not certified positive")
    if mode == "mixed_sign":
        return S.base.c_y / denom
    p_v, q_v = S.cross_products()
    fp = Interval(1) + S.ell * p_v.abs() / denom
    fq = Interval(1) + S.ell * q_v.abs() / denom
    return fp * fq


def quotient_stability_radius(S: SegmentPerturbation, xi: Interval, mode: str) -> Interval:
    """Radius r with |xi_n1 at C+tv  -  xi_n1 at C| <= r for all |t| <= ell."""
    if mode not in ("same_sign", "mixed_sign"):
        raise ValueError(f"unknown mode {mode!r}")
    xi = _as_interval(xi)
    if S.ell.sign_certified() == 0:
        return Interval(0)
    actual = perturbation_mode(S)
    if actual != mode:
        raise ModeMismatchError(f"certified signs give mode {actual!r}, requested {mode!r}")
    G = _stability_factor(S, mode)
    bracket = G.sqr() - 1
    r = xi * bracket
    return r.intersect(Interval(0, float("inf")))


def eigenvalue_stability_factors(S: SegmentPerturbation):
    """(f_lo, f_hi) with lambda_n^(t) in [f_lo, f_hi] * lambda_n for |t| <= ell.

    Same machinery as the quotient radius but applied to raw eigenvalues,
    used to push spectral lower bounds and enclosures across a whole side.
    """
    if S.ell.sign_certified() == 0:
        one = Interval(1)
        return one, one
    mode = perturbation_mode(S)
    if mode == "same_sign":
        # only one of the two homothety factors binds per direction of t, but
        # taking the larger of the two is always valid
        denom = S.height_margin()
        p_v, q_v = S.cross_products()
        m = p_v.abs().hull(q_v.abs())
        m = m.intersect(Interval(max(p_v.abs().lo_float, q_v.abs().lo_float), float("inf")))
        G = Interval(1) + S.ell * m / denom
    else:
        G = _stability_factor(S, "mixed_sign")
    G2 = G.sqr()
    return Interval(1) / G2, G2
