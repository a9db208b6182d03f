"""Second pass, search stage: particular-solution basis and eigenvalue dips.

Trial eigenfunctions are exact Helmholtz solutions

    u(x) = sum_i c_i phi_i(x),     (Laplacian + lambda) phi_i = 0,

built from two families: singular charges clustered exponentially outside
each vertex along the exterior angle bisector (second-kind kernels Y_0, Y_1
in polar coordinates around each charge) and a regular fan at the centroid
(first-kind kernels J_n with angular harmonics).  Boundary conditions are
enforced in least squares on Chebyshev collocation nodes; interior sample
rows, orthonormalized together with the boundary block (QR), penalize the
trivial zero function, and eigenvalues are located by a golden-ratio search
on the smallest singular value of the boundary block.

The search runs in plain floating point.  Rigor enters afterwards: the found
coefficients define u exactly (floats are exact rationals), and
`eval_u_taylor` produces certified Taylor models of u^2 along segments using
the cylinder-harmonic ladder

    d/dt [C_n(k r) e^{i n theta}](p(t)) = (k/2) (v_c F_{n-1} - conj(v_c) F_{n+1}),

which pushes Bessel evaluations at the expansion point to all derivative
orders with exact recurrence coefficients.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sps
from scipy.linalg import qr as _qr, solve_triangular, svd as _svd

from .geometry import Triangle
from .interval import Interval
from .records import decode_float, encode_float, read_record, write_record
from .taylor import TaylorModel

__all__ = [
    "BasisSpec",
    "ChargeInsideDomainError",
    "MPSCandidate",
    "NoDipError",
    "SegmentThroughChargeError",
    "build_collocation",
    "eval_u_taylor",
    "golden_search",
    "load_candidate",
    "save_candidate",
    "u_interval",
]


class ChargeInsideDomainError(ValueError):
    pass


class NoDipError(ArithmeticError):
    """No singular-value dip below the ceiling: no eigenvalue in the bracket."""


class SegmentThroughChargeError(ArithmeticError):
    """A segment cannot be certified to avoid every charge point."""


@dataclass(frozen=True)
class BasisSpec:
    """Charge clustering and regular-fan sizes; defaults follow the standard
    exponentially-clustered construction (distance ell0 e^(-sigma j/sqrt(n_c)))."""

    n_c: int = 7
    sigma: float = 2.5
    ell0: float = 1.0
    d: int = 10

    @property
    def size(self) -> int:
        return 9 * self.n_c + 2 * self.d + 1

    def to_json(self) -> dict:
        return {"n_c": self.n_c, "sigma": self.sigma, "ell0": self.ell0, "d": self.d}

    @classmethod
    def from_json(cls, obj) -> "BasisSpec":
        return cls(**obj)


def _charges_for(T: Triangle, spec: BasisSpec):
    """Charge points on the exterior bisector rays, exact floats."""
    verts = [np.array(v, dtype=float) for v in T.vertices_mid()]
    charges = []
    for i, V in enumerate(verts):
        others = [verts[j] for j in range(3) if j != i]
        d1 = others[0] - V
        d2 = others[1] - V
        bis = d1 / np.linalg.norm(d1) + d2 / np.linalg.norm(d2)
        bis /= np.linalg.norm(bis)
        for j in range(spec.n_c):
            dist = spec.ell0 * math.exp(-spec.sigma * j / math.sqrt(spec.n_c))
            charges.append(tuple(V - dist * bis))
    return charges


@dataclass(frozen=True)
class MPSCandidate:
    """Approximate eigenpair: exact lambda and coefficients defining u."""

    lam: float
    coeffs: np.ndarray
    spec: BasisSpec
    charges: tuple  # 3*n_c (x, y) float pairs, vertex-major
    center: tuple  # centroid (x, y)
    smin: float
    triangle: Triangle = field(repr=False)

    def k_interval(self) -> Interval:
        return Interval(self.lam).sqrt()

    def charge_coeffs(self, q: int):
        """(Y0, Y1cos, Y1sin) coefficients of charge q."""
        return tuple(float(c) for c in self.coeffs[3 * q: 3 * q + 3])

    def center_coeffs(self):
        """(J0 coeff, [(cos_n, sin_n) for n = 1..d])."""
        base = 9 * self.spec.n_c
        c0 = float(self.coeffs[base])
        pairs = [
            (float(self.coeffs[base + 2 * n - 1]), float(self.coeffs[base + 2 * n]))
            for n in range(1, self.spec.d + 1)
        ]
        return c0, pairs


def _basis_matrix(points: np.ndarray, lam: float, charges, center, spec: BasisSpec):
    """Float basis values at points, columns ordered charges then center fan."""
    k = math.sqrt(lam)
    cols = []
    for (zx, zy) in charges:
        dx = points[:, 0] - zx
        dy = points[:, 1] - zy
        r = np.hypot(dx, dy)
        th = np.arctan2(dy, dx)
        kr = k * r
        cols.append(sps.y0(kr))
        y1 = sps.y1(kr)
        cols.append(y1 * np.cos(th))
        cols.append(y1 * np.sin(th))
    dx = points[:, 0] - center[0]
    dy = points[:, 1] - center[1]
    r = np.hypot(dx, dy)
    th = np.arctan2(dy, dx)
    kr = k * r
    cols.append(sps.j0(kr))
    for n in range(1, spec.d + 1):
        jn = sps.jv(n, kr)
        cols.append(jn * np.cos(n * th))
        cols.append(jn * np.sin(n * th))
    return np.column_stack(cols)


def _collocation_points(T: Triangle, seed: int, per_side: int, n_interior: int):
    verts = [np.array(v, dtype=float) for v in T.vertices_mid()]
    i = np.arange(1, per_side + 1)
    t = np.cos((2 * i - 1) * math.pi / (2 * per_side))
    boundary = []
    for a in range(3):
        Va, Vb = verts[a], verts[(a + 1) % 3]
        pts = Va[None, :] + (1 + t[:, None]) / 2 * (Vb - Va)[None, :]
        boundary.append(pts)
    boundary = np.vstack(boundary)

    rng = np.random.RandomState(seed)
    cx, cy = T.apex_mid
    xmin, xmax = min(0.0, cx), max(1.0, cx)
    interior = []
    while len(interior) < n_interior:
        px = rng.uniform(xmin, xmax)
        py = rng.uniform(0.0, cy)
        lam_c = py / cy
        lam_b = (px * cy - py * cx) / cy
        lam_a = 1.0 - lam_b - lam_c
        if lam_a > 1e-12 and lam_b > 1e-12 and lam_c > 1e-12:
            interior.append((px, py))
    return boundary, np.array(interior)


def build_collocation(
    T: Triangle,
    spec: BasisSpec,
    lam: float,
    *,
    seed: int = 0,
    per_side: int = 300,
    n_interior: int = 40,
):
    """Collocation matrix: boundary rows stacked over interior rows.

    Interior rows exist to normalize the least-squares problem against the
    trivial zero solution: after a QR factorization of the full matrix the
    smallest singular value of the boundary block of Q measures how small
    boundary values can get at unit discrete norm over all points.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    charges = _charges_for(T, spec)
    for (zx, zy) in charges:
        if not T.certainly_outside(zx, zy):
            raise ChargeInsideDomainError(f"charge {(zx, zy)} not outside the domain")
    center = tuple(np.mean(np.array(T.vertices_mid(), dtype=float), axis=0))
    boundary, interior = _collocation_points(T, seed, per_side, n_interior)
    pts = np.vstack([boundary, interior])
    A = _basis_matrix(pts, lam, charges, center, spec)
    return A, len(boundary), charges, center


def _boundary_smin(A: np.ndarray, n_boundary: int, want_coeffs: bool):
    Q, R = _qr(A, mode="economic")
    QB = Q[:n_boundary]
    if not want_coeffs:
        return float(_svd(QB, compute_uv=False)[-1]), None
    _, s, vh = _svd(QB)
    v = vh[-1]
    try:
        c = solve_triangular(R, v)
    except Exception:
        c, *_ = np.linalg.lstsq(R, v, rcond=None)
    c = c / np.linalg.norm(c)
    return float(s[-1]), c


def golden_search(
    T: Triangle,
    bracket,
    spec: BasisSpec,
    *,
    seed: int = 0,
    rel_tol: float = 1e-13,
    smin_ceiling: float = 1e-6,
    per_side: int = 300,
    n_interior: int = 40,
) -> MPSCandidate:
    """Golden-ratio search for a dip of the smallest boundary singular value."""
    a, b = float(bracket[0]), float(bracket[1])
    if not (0 < a < b):
        raise ValueError(f"invalid bracket {bracket}")

    cache = {}

    def f(lam: float) -> float:
        if lam not in cache:
            A, nb, _, _ = build_collocation(
                T, spec, lam, seed=seed, per_side=per_side, n_interior=n_interior
            )
            cache[lam] = _boundary_smin(A, nb, False)[0]
        return cache[lam]

    invphi = (math.sqrt(5) - 1) / 2
    c = b - (b - a) * invphi
    d = a + (b - a) * invphi
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * max(1.0, abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * invphi
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * invphi
            fd = f(d)
    lam_best = min(cache, key=cache.get)
    A, nb, charges, center = build_collocation(
        T, spec, lam_best, seed=seed, per_side=per_side, n_interior=n_interior
    )
    smin, coeffs = _boundary_smin(A, nb, True)
    if smin > smin_ceiling:
        raise NoDipError(
            f"smallest singular value {smin:.3e} above ceiling {smin_ceiling:.1e}: "
            f"no eigenvalue located in [{bracket[0]}, {bracket[1]}]"
        )
    return MPSCandidate(
        lam=lam_best,
        coeffs=coeffs,
        spec=spec,
        charges=tuple(charges),
        center=center,
        smin=smin,
        triangle=T,
    )


# ----------------------------------------------------------------------
# rigorous evaluation
# ----------------------------------------------------------------------

_SYM = Interval(-1, 1)


def _cmul(a, b):
    ar, ai = a
    br, bi = b
    return (ar * br - ai * bi, ar * bi + ai * br)


def _source_jets(z, kind, n_small, k_iv, mid, half, m_top, bessel_prec=None):
    """Taylor jets at t = 0 (orders 0..m_top) of F_n(p(t)) = C_n(k r) e^(i n theta)
    around source z, for n = 0..n_small, along p(t) = mid + t half.

    Starting values are tight midpoint evaluations; successive orders come
    from the derivative ladder

        (j+1) a_{n,j+1} = (k/2) (v_c a_{n-1,j} - conj(v_c) a_{n+1,j}),

    with v_c the complex half-vector.  Conjugation symmetry
    F_{-n} = (-1)^n conj(F_n) keeps only nonnegative orders; the inner loop
    runs on raw endpoint pairs.
    """
    from .bessel import bessel_many, besselj_normalized_many
    from .interval import _mk, _raw_add, _raw_mul, _raw_sub, get_precision, precision

    dx = mid[0] - z[0]
    dy = mid[1] - z[1]
    r2 = dx.sqr() + dy.sqr()
    n_br = n_small + m_top
    khalf = k_iv.mul_2exp(-1)
    if kind == "second":
        if not r2.sign_certified() == 1:
            raise SegmentThroughChargeError(
                "segment cannot be separated from a basis charge point"
            )
        r = r2.sqrt()
        karg = k_iv * r
        if bessel_prec is not None:
            with precision(bessel_prec):
                C = bessel_many(kind, n_br, karg)
        else:
            C = bessel_many(kind, n_br, karg)
        ex, ey = dx / r, dy / r
        F = []
        e_pow = (Interval(1), Interval(0))
        for n in range(n_br + 1):
            if n:
                e_pow = _cmul(e_pow, (ex, ey))
            F.append((C[n] * e_pow[0], C[n] * e_pow[1]))
    else:
        # regular family in solid-harmonic form, valid through r = 0
        q = k_iv.sqr().mul_2exp(-2) * r2
        if bessel_prec is not None:
            with precision(bessel_prec):
                S = besselj_normalized_many(n_br, q)
        else:
            S = besselj_normalized_many(n_br, q)
        wc = (khalf * dx, khalf * dy)
        F = [(S[0], Interval(0))]
        w_pow = (Interval(1), Interval(0))
        for n in range(1, n_br + 1):
            w_pow = _cmul(w_pow, wc)
            F.append((S[n] * w_pow[0], S[n] * w_pow[1]))

    p = get_precision()
    vc = (khalf * half[0], khalf * half[1])
    # raw pairs: entry = (re_pair, im_pair)
    cur = [((f[0].a, f[0].b), (f[1].a, f[1].b)) for f in F]
    levels = [cur]
    for j in range(m_top):
        scale = Interval(1) / (j + 1)
        wpi = (vc[0] * scale, vc[1] * scale)
        wr, wi = (wpi[0].a, wpi[0].b), (wpi[1].a, wpi[1].b)
        neg_wi = -wpi[1]
        wi_neg = (neg_wi.a, neg_wi.b)
        width = len(cur) - 1
        nxt = []
        for n in range(width):
            if n == 0:
                r1, i1 = cur[1]
                am1 = (_neg_pair(r1), i1)  # a_{-1} = -conj(a_1)
            else:
                am1 = cur[n - 1]
            ap1 = cur[n + 1]
            # wp*am1 - conj(wp)*ap1 with wp = (wr, wi), conj(wp) = (wr, -wi)
            ar, ai = am1
            br, bi = ap1
            t1r = _raw_sub(_raw_mul(wr, ar, p), _raw_mul(wi, ai, p), p)
            t1i = _raw_add(_raw_mul(wr, ai, p), _raw_mul(wi, ar, p), p)
            t2r = _raw_sub(_raw_mul(wr, br, p), _raw_mul(wi_neg, bi, p), p)
            t2i = _raw_add(_raw_mul(wr, bi, p), _raw_mul(wi_neg, br, p), p)
            nxt.append((_raw_sub(t1r, t2r, p), _raw_sub(t1i, t2i, p)))
        levels.append(nxt)
        cur = nxt
    # jets[n][j] as Interval pairs for n <= n_small, j <= m_top
    return [
        [
            (_mk(*levels[j][n][0]), _mk(*levels[j][n][1]))
            for j in range(m_top + 1)
        ]
        for n in range(n_small + 1)
    ]


def _neg_pair(pr):
    from mpmath.libmp import mpf_neg

    return (mpf_neg(pr[1]), mpf_neg(pr[0]))


def _source_mag_bounds(z, kind, k_iv, mid, half, n_top, bessel_prec=None):
    """Float upper bounds W_s >= sup over the segment of |F_s(p(t))|, s <= n_top.

    Uses a crude whole-segment interval evaluation: wide, but only the
    magnitude matters (it is damped by (k l/2)^(M+1)/(M+1)! in the tail)."""
    from .bessel import bessel_many, besselj_normalized_many
    from .interval import precision

    sym = _SYM
    dx = (mid[0] - z[0]) + sym * half[0]
    dy = (mid[1] - z[1]) + sym * half[1]
    r2 = dx.sqr() + dy.sqr()
    # magnitude bounds tolerate low precision
    with precision(48):
        if kind == "second":
            if not r2.sign_certified() == 1:
                raise SegmentThroughChargeError(
                    "segment cannot be separated from a basis charge point"
                )
            karg = k_iv * r2.sqrt()
            C = bessel_many(kind, n_top, karg)
            return [c.abs().hi_float * (1 + 1e-9) for c in C]
        q = k_iv.sqr().mul_2exp(-2) * r2
        S = besselj_normalized_many(n_top, q)
        khalf_w = (k_iv.mul_2exp(-1) * r2.sqrt()).hi_float * (1 + 1e-9)
        out = []
        wp = 1.0
        for n in range(n_top + 1):
            out.append(S[n].abs().hi_float * wp * (1 + 1e-9))
            wp *= khalf_w
    return out


def _u_jets_and_tail(cand: MPSCandidate, mid, half, m_top: int, extra: int, bessel_prec=None):
    """Midpoint jets of u to order M = m_top + extra, plus a tail bound T with
    sup over the segment of |(M+1)-th Taylor coefficient of u at any point|
    <= T.  The tail uses the ladder path-count bound

        |a_{n,j}(tau)| <= (k l/2)^j / j! * sum_i binom(j, i) W_{|n-j+2i|}.
    """
    k_iv = cand.k_interval()
    M = m_top + extra
    zero = Interval(0)
    u = [zero] * (M + 1)
    ell = (half[0].sqr() + half[1].sqr()).sqrt().hi_float
    klh = k_iv.hi_float * ell / 2.0 * (1 + 1e-12)
    # (k l/2)^(M+1) / (M+1)! with upward slop
    damp = 1.0
    for j in range(1, M + 2):
        damp = damp * klh / j * (1 + 1e-15)
    tail = 0.0

    def tail_term(n_small, wmag, coeff_abs):
        t = 0.0
        for n in range(n_small + 1):
            if coeff_abs[n] == 0.0:
                continue
            s = 0.0
            for i in range(M + 2):
                s += math.comb(M + 1, i) * wmag[abs(n - (M + 1) + 2 * i)]
            t += coeff_abs[n] * s
        return t * damp * (1 + 1e-9)

    for qi, z in enumerate(cand.charges):
        c0, c1c, c1s = cand.charge_coeffs(qi)
        if c0 == 0.0 and c1c == 0.0 and c1s == 0.0:
            continue
        zq = (Interval(z[0]), Interval(z[1]))
        jets = _source_jets(zq, "second", 1, k_iv, mid, half, M, bessel_prec)
        for j in range(M + 1):
            acc = u[j]
            if c0:
                acc = acc + jets[0][j][0] * c0
            if c1c:
                acc = acc + jets[1][j][0] * c1c
            if c1s:
                acc = acc + jets[1][j][1] * c1s
            u[j] = acc
        wmag = _source_mag_bounds(zq, "second", k_iv, mid, half, M + 2, bessel_prec)
        # |Re|, |Im| of combinations are bounded by the modulus bounds
        tail += tail_term(1, wmag, [abs(c0), abs(c1c) + abs(c1s)])

    c0, pairs = cand.center_coeffs()
    if c0 or any(a or b for a, b in pairs):
        zc = (Interval(cand.center[0]), Interval(cand.center[1]))
        d = cand.spec.d
        jets = _source_jets(zc, "first", d, k_iv, mid, half, M, bessel_prec)
        for j in range(M + 1):
            acc = u[j]
            if c0:
                acc = acc + jets[0][j][0] * c0
            for n, (cn, sn) in enumerate(pairs, start=1):
                if cn:
                    acc = acc + jets[n][j][0] * cn
                if sn:
                    acc = acc + jets[n][j][1] * sn
            u[j] = acc
        wmag = _source_mag_bounds(zc, "first", k_iv, mid, half, d + M + 2, bessel_prec)
        coeff_abs = [abs(c0)] + [abs(cn) + abs(sn) for (cn, sn) in pairs]
        tail += tail_term(d, wmag, coeff_abs)

    return u, tail


def eval_u_taylor(
    cand: MPSCandidate,
    segment,
    *,
    degree: int = 25,
    extra_orders: int = 8,
    bessel_prec=None,
) -> TaylorModel:
    """Certified Taylor model of t -> u(p(t))^2 on a linearly parametrized
    segment, p(t) = midpoint + t * halfvector for t in [-1, 1].

    Coefficients are midpoint jets.  For the Lagrange remainder, jets of u at
    an arbitrary segment point are enclosed by Taylor-shifting the midpoint
    jets (computed to the deeper order M = degree + 1 + extra_orders) with
    the order-(M+1) shift tail bounded through crude whole-segment magnitude
    bounds; the remainder of u^2 is then the shifted-jet convolution at order
    degree + 1.
    """
    (p0x, p0y), (p1x, p1y) = segment
    p0 = (Interval(p0x), Interval(p0y))
    p1 = (Interval(p1x), Interval(p1y))
    mid = ((p0[0] + p1[0]).mul_2exp(-1), (p0[1] + p1[1]).mul_2exp(-1))
    half = ((p1[0] - p0[0]).mul_2exp(-1), (p1[1] - p0[1]).mul_2exp(-1))

    if not any(cand.coeffs):
        zero = Interval(0)
        return TaylorModel([zero] * (degree + 1), zero)

    mrem = degree + 1
    extra = extra_orders
    max_extra = 48
    while True:
        u_mid, tail = _u_jets_and_tail(
            cand, mid, half, mrem, extra, bessel_prec=bessel_prec
        )
        M = mrem + extra

        # shifted jets with and without the order-(M+1) shift tail:
        # u_j(tau) in sum_{i=j..M} binom(i,j) u_i(0) tau^(i-j) + binom(M+1,j) [-T,T]
        base = []
        for j in range(mrem + 1):
            acc = Interval(0)
            for i in range(M, j, -1):
                acc = (acc + u_mid[i] * math.comb(i, j)) * _SYM
            base.append(acc + u_mid[j])
        shifted = [
            b.widened(Interval(tail * math.comb(M + 1, j)))
            for j, b in enumerate(base)
        ]

        def conv_top(js):
            acc = Interval(0)
            for i in range(0, mrem // 2 + 1):
                j = mrem - i
                p = js[i] * js[j]
                acc = acc + (p if 2 * i == mrem else p.mul_2exp(1))
            return acc

        rem = conv_top(shifted)
        rem_conv = conv_top(base)
        # escalate the ladder depth while the shift tail dominates the
        # genuine convolution remainder
        if extra >= max_extra or rem.width_float <= 4 * rem_conv.width_float + 1e-300:
            break
        klh = cand.k_interval().hi_float * (
            (half[0].sqr() + half[1].sqr()).sqrt().hi_float
        ) / 2.0
        per_order = min(0.5, 2.0 * klh / max(M, 1))
        needed = rem.width_float / max(rem_conv.width_float, 1e-300)
        import math as _m

        bump = int(_m.ceil(_m.log(needed) / -_m.log(max(per_order, 1e-6)))) + 2
        extra = min(max_extra, extra + max(bump, 6))

    coeffs = []
    for kk in range(degree + 1):
        acc = Interval(0)
        for i in range(0, kk // 2 + 1):
            j = kk - i
            p = u_mid[i] * u_mid[j]
            acc = acc + (p if 2 * i == kk else p.mul_2exp(1))
        coeffs.append(acc)
    return TaylorModel(coeffs, rem)


def u_interval(cand: MPSCandidate, x: Interval, y: Interval) -> Interval:
    """Rigorous pointwise enclosure of u (direct evaluation, no jets)."""
    from .bessel import bessel_many, besselj_normalized_many

    k_iv = cand.k_interval()
    total = Interval(0)
    for q, z in enumerate(cand.charges):
        c0, c1c, c1s = cand.charge_coeffs(q)
        if c0 == 0.0 and c1c == 0.0 and c1s == 0.0:
            continue
        dx = x - z[0]
        dy = y - z[1]
        r2 = dx.sqr() + dy.sqr()
        if not r2.sign_certified() == 1:
            raise SegmentThroughChargeError("evaluation point may hit a charge")
        r = r2.sqrt()
        C = bessel_many("second", 1, k_iv * r)
        total = total + C[0] * c0
        if c1c or c1s:
            total = total + (C[1] * (dx / r)) * c1c + (C[1] * (dy / r)) * c1s
    c0, pairs = cand.center_coeffs()
    dx = x - cand.center[0]
    dy = y - cand.center[1]
    r2 = dx.sqr() + dy.sqr()
    # regular family in solid-harmonic form (valid through r = 0)
    q = k_iv.sqr().mul_2exp(-2) * r2
    S = besselj_normalized_many(cand.spec.d, q)
    khalf = k_iv.mul_2exp(-1)
    wc = (khalf * dx, khalf * dy)
    total = total + S[0] * c0
    w_pow = (Interval(1), Interval(0))
    for n, (cn, sn) in enumerate(pairs, start=1):
        w_pow = _cmul(w_pow, wc)
        total = total + (S[n] * w_pow[0]) * cn + (S[n] * w_pow[1]) * sn
    return total


# ----------------------------------------------------------------------
# candidate files
# ----------------------------------------------------------------------


def save_candidate(cand: MPSCandidate, path) -> str:
    from .records import encode_interval

    payload = {
        "kind": "mps_candidate",
        "triangle": {
            "c_x": encode_interval(cand.triangle.c_x),
            "c_y": encode_interval(cand.triangle.c_y),
        },
        "basis": cand.spec.to_json(),
        "lambda": encode_float(cand.lam),
        "smin": encode_float(cand.smin),
        "charges": [[encode_float(a), encode_float(b)] for a, b in cand.charges],
        "center": [encode_float(cand.center[0]), encode_float(cand.center[1])],
        "coeffs": [encode_float(c) for c in cand.coeffs],
    }
    return write_record(path, payload)


def load_candidate(path) -> MPSCandidate:
    from .records import decode_interval

    obj = read_record(path)
    if obj.get("kind") != "mps_candidate":
        raise ValueError(f"{path} is not a candidate record")
    T = Triangle(decode_interval(obj["triangle"]["c_x"]), decode_interval(obj["triangle"]["c_y"]))
    return MPSCandidate(
        lam=decode_float(obj["lambda"]),
        coeffs=np.array([decode_float(c) for c in obj["coeffs"]]),
        spec=BasisSpec.from_json(obj["basis"]),
        charges=tuple((decode_float(a), decode_float(b)) for a, b in obj["charges"]),
        center=(decode_float(obj["center"][0]), decode_float(obj["center"][1])),
        smin=decode_float(obj["smin"]),
        triangle=T,
    )
