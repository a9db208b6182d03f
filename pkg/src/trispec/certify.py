"""Second pass, certification stage: tension bound and spectral distance.

For an exact Helmholtz solution u on the triangle, the ratio

    t[u] = ||u||_{L2(boundary)} / ||u||_{L2(interior)}

controls the distance d from the trial eigenvalue to the spectrum:

    d <= sqrt( 2 lam_up / (rho t^-2 - 28 (1+rho)(1+lam^-1/2)) ),

valid when lam > 1, the denominator is certified positive, lam_up bounds the
(unique) eigenvalue in the window [lam - sqrt(lam), lam + sqrt(lam)], and the
window holds at most one eigenvalue (the isolation evidence, discharged from
first-pass lower bounds and previously certified enclosures).

The boundary norm is integrated from certified Taylor models of u^2 on an
adaptively refined segmentation (segments sized against the distance to the
nearest singular charge); the interior norm is bounded below on a triangular
grid of an interior shrunk triangle, where a positive minimum of u^2 on a
grid-cell boundary propagates to the cell by the minimum principle, with the
isoperimetric spectral inequality excluding interior sign changes for cells
of small enough area.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bessel import j0_first_zero
from .geometry import Triangle, incenter_inradius
from .interval import Interval, get_precision, isum, pi, precision
from .mps import MPSCandidate, SegmentThroughChargeError, eval_u_taylor
from .records import encode_float, encode_interval
from .taylor import integrate_even_part

__all__ = [
    "DenominatorNonpositiveError",
    "EigenEnclosure",
    "FaberKrahnPreconditionError",
    "IsolationWindow",
    "NonconvergentSubdivisionError",
    "SignTestFailureError",
    "TensionBound",
    "boundary_norm_upper",
    "certify_enclosure",
    "interior_norm_lower",
    "tension_bound",
]


class NonconvergentSubdivisionError(ArithmeticError):
    """Boundary segmentation did not reach its width budget by max depth."""


class SignTestFailureError(ArithmeticError):
    """Every interior grid cell failed the positivity test."""


class FaberKrahnPreconditionError(ArithmeticError):
    """Grid cells are not smaller than the nodal-domain area threshold."""


class DenominatorNonpositiveError(ArithmeticError):
    """Tension too large to certify any spectral distance."""


class IsolationUnverifiedError(ArithmeticError):
    """The one-eigenvalue window hypothesis is not covered by the evidence."""


@dataclass(frozen=True)
class TensionBound:
    boundary_sq: Interval  # upper bound of the boundary L2 norm squared
    interior_sq: Interval  # lower bound of the interior L2 norm squared
    t_sq_upper: Interval

    def __post_init__(self):
        if not self.interior_sq.sign_certified() == 1:
            raise ValueError("interior norm lower bound must be certified positive")


def tension_bound(boundary_sq: Interval, interior_sq: Interval) -> TensionBound:
    bsq = boundary_sq.intersect(Interval(0, float("inf")))
    return TensionBound(bsq, interior_sq, bsq / interior_sq)


@dataclass(frozen=True)
class EigenEnclosure:
    """Certified: some Dirichlet eigenvalue of `triangle` lies in `value`;
    `index` is attached only after the position pass."""

    value: Interval
    index: int | None
    triangle: Triangle


@dataclass(frozen=True)
class IsolationWindow:
    """Caller-certified claim: at most one eigenvalue in [lo_clear, hi_clear]."""

    lo_clear: float
    hi_clear: float


# ----------------------------------------------------------------------
# boundary norm upper bound
# ----------------------------------------------------------------------


def _charge_distance(px: float, py: float, charges) -> float:
    return min(math.hypot(px - zx, py - zy) for (zx, zy) in charges)


def _side_breakpoints(Va, Vb, k: float, charges, kl_max: float, dist_ratio: float):
    """Float parameter breakpoints in [0, 1] along one side.

    Segments march geometrically from each endpoint: length limited by the
    oscillation scale kl_max/k and limited to 1/dist_ratio of the distance to
    the nearest singular charge (Taylor convergence).
    """
    L = math.hypot(Vb[0] - Va[0], Vb[1] - Va[1])
    cap = kl_max / k / L  # parameter units

    def local_cap(t: float) -> float:
        px = Va[0] + t * (Vb[0] - Va[0])
        py = Va[1] + t * (Vb[1] - Va[1])
        return min(cap, _charge_distance(px, py, charges) / dist_ratio / L)

    pts_lo, t = [0.0], 0.0
    while t < 0.5:
        t = min(t + max(local_cap(t), 1e-6), 0.5)
        pts_lo.append(t)
    pts_hi, t = [1.0], 1.0
    while t > 0.5:
        t = max(t - max(local_cap(t), 1e-6), 0.5)
        pts_hi.append(t)
    pts = sorted(set(pts_lo + pts_hi))
    return pts


def _segment_points(T: Triangle, side: int, t0: float, t1: float):
    verts = T.vertices()
    Va, Vb = verts[side], verts[(side + 1) % 3]
    p0 = (Va[0] + (Vb[0] - Va[0]) * t0, Va[1] + (Vb[1] - Va[1]) * t0)
    p1 = (Va[0] + (Vb[0] - Va[0]) * t1, Va[1] + (Vb[1] - Va[1]) * t1)
    return p0, p1


def _side_length(T: Triangle, side: int) -> Interval:
    verts = T.vertices()
    Va, Vb = verts[side], verts[(side + 1) % 3]
    return ((Vb[0] - Va[0]).sqr() + (Vb[1] - Va[1]).sqr()).sqrt()


def _eval_boundary_piece(args):
    cand, side, t0, t1, degree, prec = args
    with precision(prec):
        p0, p1 = _segment_points(cand.triangle, side, t0, t1)
        try:
            model = eval_u_taylor(cand, (p0, p1), degree=degree)
        except SegmentThroughChargeError:
            return side, t0, t1, None, None
        length = _side_length(cand.triangle, side) * Interval(t1 - t0)
        contrib = integrate_even_part(model, length)
    return side, t0, t1, (contrib.a, contrib.b), contrib.width_float


def _parallel_map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=1))


def boundary_norm_upper(
    cand: MPSCandidate,
    *,
    degree: int = 25,
    rel_budget: float = 1e-3,
    abs_total_budget: float | None = None,
    max_depth: int = 12,
    kl_max: float = 1.5,
    dist_ratio: float = 5.0,
    jobs: int = 1,
) -> Interval:
    """Rigorous enclosure (used for its upper bound) of the integral of u^2
    over the triangle boundary.

    Per-segment enclosures come from `integrate_even_part` of certified
    Taylor models; a segment is bisected while its enclosure width exceeds
    max(rel_budget * total_estimate / count, abs_total_budget / (2 count)),
    up to `max_depth` halvings of the initial segmentation.
    """
    from .interval import _mk

    k = math.sqrt(cand.lam)
    pieces = {}
    work = []
    for side in range(3):
        verts = cand.triangle.vertices_mid()
        Va, Vb = verts[side], verts[(side + 1) % 3]
        pts = _side_breakpoints(Va, Vb, k, cand.charges, kl_max, dist_ratio)
        for a, b in zip(pts[:-1], pts[1:]):
            work.append((cand, side, a, b, degree, get_precision()))

    depth = {}
    while work:
        results = _parallel_map(_eval_boundary_piece, work, jobs)
        work = []
        for side, t0, t1, enc, width in results:
            d = depth.get((side, t0, t1), 0)
            if enc is None:  # cannot separate from a charge: force a split
                width = float("inf")
            pieces[(side, t0, t1)] = (enc, width, d)
        # width control loop
        total = sum(
            max(0.0, _mk(*enc).hi_float)
            for enc, _, _ in pieces.values()
            if enc is not None
        )
        count = len(pieces)
        budget = rel_budget * max(total, 5e-324) / count
        if abs_total_budget is not None:
            budget = max(budget, abs_total_budget / (2 * count))
        for key, (enc, width, d) in sorted(pieces.items()):
            if width > budget:
                if d >= max_depth:
                    raise NonconvergentSubdivisionError(
                        f"segment {key} still {width:.2e} wide at depth {d} "
                        f"(budget {budget:.2e})"
                    )
                side, t0, t1 = key
                tm = 0.5 * (t0 + t1)
                del pieces[key]
                depth[(side, t0, tm)] = d + 1
                depth[(side, tm, t1)] = d + 1
                work.append((cand, side, t0, tm, degree, get_precision()))
                work.append((cand, side, tm, t1, degree, get_precision()))

    total = isum(_mk(*enc) for _, (enc, _, _) in sorted(pieces.items()))
    return total.intersect(Interval(0, float("inf")))


# ----------------------------------------------------------------------
# interior norm lower bound
# ----------------------------------------------------------------------


def _grid_geometry(T: Triangle, grid_n: int, shrink):
    """Vertices, cells and edges of the shrunk interior triangular grid."""
    shrink = shrink if isinstance(shrink, Interval) else Interval(shrink)
    verts = T.vertices()
    gx = (verts[0][0] + verts[1][0] + verts[2][0]) / 3
    gy = (verts[0][1] + verts[1][1] + verts[2][1]) / 3
    S = [(gx + shrink * (vx - gx), gy + shrink * (vy - gy)) for (vx, vy) in verts]

    def node(i, j):
        fi = Interval(i) / grid_n
        fj = Interval(j) / grid_n
        x = S[0][0] + fi * (S[1][0] - S[0][0]) + fj * (S[2][0] - S[0][0])
        y = S[0][1] + fi * (S[1][1] - S[0][1]) + fj * (S[2][1] - S[0][1])
        return (x, y)

    nodes = {}
    for i in range(grid_n + 1):
        for j in range(grid_n + 1 - i):
            nodes[(i, j)] = node(i, j)
    cells = []
    for i in range(grid_n):
        for j in range(grid_n - i):
            cells.append(((i, j), (i + 1, j), (i, j + 1)))
    for i in range(grid_n):
        for j in range(grid_n - 1 - i):
            cells.append(((i + 1, j), (i + 1, j + 1), (i, j + 1)))
    edges = set()
    for c in cells:
        for a in range(3):
            e = tuple(sorted((c[a], c[(a + 1) % 3])))
            edges.add(e)
    return nodes, cells, sorted(edges)


def _eval_edge_lower(args):
    """Certified lower bound of u^2 on one grid edge.

    One Taylor model per edge; the minimum is then resolved on parameter
    subintervals of the same model (adaptive halving in parameter space,
    which costs only polynomial evaluations).  Halving stops once the piece
    enclosure is relatively tight or certifiably negative.
    """
    cand, ax, ay, bx, by, degree, rel_prec, max_depth, prec = args
    from .interval import _mk

    with precision(prec):
        p0 = (_mk(*ax), _mk(*ay))
        p1 = (_mk(*bx), _mk(*by))
        try:
            model = eval_u_taylor(cand, (p0, p1), degree=degree)
        except SegmentThroughChargeError:
            return float("-inf")

        def piece_min(a: float, b: float, depth: int) -> float:
            enc = model.enclose_at(Interval(a, b))
            lo, mid = enc.lo_float, enc.mid_float
            if (
                depth >= max_depth
                or enc.hi_float <= 0
                or enc.width_float <= rel_prec * max(abs(mid), 1e-300)
            ):
                return lo
            m = 0.5 * (a + b)
            return min(piece_min(a, m, depth + 1), piece_min(m, b, depth + 1))

        return min(piece_min(-1.0, 0.0, 0), piece_min(0.0, 1.0, 0))


def interior_norm_lower(
    cand: MPSCandidate,
    grid_n: int = 8,
    shrink: float = 0.8,
    *,
    degree: int = 11,
    rel_prec: float = 1e-2,
    max_depth: int = 10,
    work_prec: int | None = None,
    jobs: int = 1,
) -> Interval:
    """Certified lower bound of the interior L2 norm squared of u.

    Cells where u^2 is certified positive on the whole cell boundary
    contribute (min of u^2 on the cell boundary) * cell area; cells whose
    boundary value may change sign contribute nothing.
    """
    if not (grid_n >= 1 and 0 < shrink < 1):
        raise ValueError("need grid_n >= 1 and 0 < shrink < 1")
    lam = Interval(cand.lam)
    area_cell = cand.triangle.area() * Interval(shrink).sqr() / (grid_n * grid_n)
    fk_threshold = pi() * j0_first_zero().sqr() / lam
    if not area_cell.certainly_lt(fk_threshold):
        raise FaberKrahnPreconditionError(
            f"grid cell area {area_cell.hi_float:.3g} not below the nodal-domain "
            f"threshold {fk_threshold.lo_float:.3g}; refine the grid"
        )

    nodes, cells, edges = _grid_geometry(cand.triangle, grid_n, shrink)
    prec = work_prec if work_prec is not None else min(get_precision(), 160)
    tasks = []
    for (na, nb) in edges:
        (ax, ay), (bx, by) = nodes[na], nodes[nb]
        tasks.append(
            (
                cand,
                (ax.a, ax.b),
                (ay.a, ay.b),
                (bx.a, bx.b),
                (by.a, by.b),
                degree,
                rel_prec,
                max_depth,
                prec,
            )
        )
    lows = _parallel_map(_eval_edge_lower, tasks, jobs)
    edge_low = {e: lows[i] for i, e in enumerate(edges)}

    total = Interval(0)
    contributed = 0
    for c in cells:
        b_sq = min(
            edge_low[tuple(sorted((c[a], c[(a + 1) % 3])))] for a in range(3)
        )
        if b_sq > 0:
            total = total + Interval(b_sq) * area_cell
            contributed += 1
    if contributed == 0:
        raise SignTestFailureError("no interior grid cell has certified sign")
    return total


# ----------------------------------------------------------------------
# enclosure certification
# ----------------------------------------------------------------------


def certify_enclosure(
    cand: MPSCandidate,
    tb: TensionBound,
    rho: Interval,
    lambda_upper: Interval,
    *,
    isolation: IsolationWindow,
) -> EigenEnclosure:
    """Certified enclosure [lam - d, lam + d] of the eigenvalue nearest to
    the candidate, from the tension bound and the window isolation evidence.
    """
    lam = Interval(cand.lam)
    if not lam.certainly_gt(Interval(1)):
        raise ValueError("certification requires lambda > 1")
    sqrt_lam = lam.sqrt()
    win_lo = lam - sqrt_lam
    win_hi = lam + sqrt_lam
    if not (isolation.lo_clear <= win_lo.lo_float and win_hi.hi_float <= isolation.hi_clear):
        raise IsolationUnverifiedError(
            f"window [{win_lo.lo_float:.6g}, {win_hi.hi_float:.6g}] not inside "
            f"isolation evidence [{isolation.lo_clear:.6g}, {isolation.hi_clear:.6g}]"
        )
    if tb.boundary_sq.hi_float == 0.0:
        return EigenEnclosure(value=lam, index=None, triangle=cand.triangle)
    t_inv_sq_lower = tb.interior_sq.lower() / tb.boundary_sq.upper()
    den = rho * t_inv_sq_lower - Interval(28) * (Interval(1) + rho) * (
        Interval(1) + Interval(1) / sqrt_lam
    )
    if not den.sign_certified() == 1:
        raise DenominatorNonpositiveError(
            f"rho t^-2 - 28(1+rho)(1+lam^-1/2) = {den} not certified positive"
        )
    d = (lambda_upper.mul_2exp(1) / den).sqrt()
    return EigenEnclosure(
        value=lam.widened(d.upper()), index=None, triangle=cand.triangle
    )


def certification_record(
    cand: MPSCandidate, tb: TensionBound, rho: Interval, enc: EigenEnclosure
) -> dict:
    """JSON payload of one certification (outward-rounded decimals)."""
    return {
        "kind": "certification",
        "triangle": {
            "c_x": encode_interval(cand.triangle.c_x),
            "c_y": encode_interval(cand.triangle.c_y),
        },
        "lambda_candidate": encode_float(cand.lam),
        "smin": encode_float(cand.smin),
        "boundary_sq": encode_interval(tb.boundary_sq),
        "interior_sq": encode_interval(tb.interior_sq),
        "tension_sq": encode_interval(tb.t_sq_upper),
        "inradius": encode_interval(rho),
        "enclosure": encode_interval(enc.value),
        "index": enc.index,
    }
