"""First pass: certified separation of the low spectrum via nonconforming FEM.

The triangle is triangulated into N^2 congruent subtriangles similar to the
original with ratio 1/N.  Crouzeix-Raviart basis functions (one per interior
edge, affine per element, matched at edge midpoints) make the mass matrix a
multiple of the identity, so the discrete problem is an ordinary symmetric
eigenproblem M x = lambda x with M = 3 N^2 A / (2 |Omega|).

The certification chain is:
  * assemble M with interval entries (closed-form element gradients);
  * eigendecompose the midpoint matrix numerically (non-rigorous);
  * bound the departure from exact orthonormality s = max |<v_i,v_j> - delta|,
    prove a nearby exactly orthonormal basis exists (valid when 8 m s < 1,
    giving ||v_i - w_i|| <= sqrt(3 s)), and inflate the almost-diagonal matrix
    Q~^T M Q~ entrywise by sqrt(3s)(||Mv_i|| + ||Mv_j||) + 4 s ||M||_2;
  * group the resulting Gershgorin disks into connected components and demand
    that the lowest components carry exactly k disks, isolated from the rest;
  * refine single eigenvalues from the algebraic residual ||M u - lam u||;
  * convert the discrete bound into a continuous lower bound through
    lam_h / (1 + C_h^2 lam_h) with C_h = 0.1893 h.

Dense products run in extended precision (numpy longdouble) and every
floating-point reduction is wrapped in an a-priori rounding-error bound
gamma_n = n u / (1 - n u), so the entrywise enclosures are rigorous without
directed-rounding hardware control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import Triangle
from .interval import Interval, isum

__all__ = [
    "CRMesh",
    "DiscreteOperator",
    "LemmaPreconditionError",
    "ProximityUncertifiedError",
    "SeparationFailureError",
    "SpectralSeparation",
    "approx_eigenbasis",
    "assemble",
    "assemble_float",
    "certify_separation",
    "eigenvalue_estimates",
    "liu_lower_bound",
    "parlett_refine",
]

_LD = np.longdouble
_U_LD = float(np.finfo(_LD).eps) / 2.0
_U_F64 = float(np.finfo(np.float64).eps) / 2.0


class LemmaPreconditionError(ArithmeticError):
    """8 m s >= 1: the near-orthonormality hypothesis fails."""


class SeparationFailureError(ArithmeticError):
    """Gershgorin components do not isolate the first k eigenvalues."""


class ProximityUncertifiedError(ArithmeticError):
    """Cannot certify the approximate eigenvalue is nearest to the target index."""


def _gamma(n: int, u: float) -> float:
    nu = n * u
    if nu >= 0.5:
        raise ArithmeticError("dimension too large for the rounding-error model")
    return nu / (1.0 - nu) * (1.0 + 1e-12)


# ----------------------------------------------------------------------
# mesh and assembly
# ----------------------------------------------------------------------


def _mesh_topology(N: int):
    """Vertex indexing, subtriangle vertex triples, and edge classification."""
    index = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            index[(i, j)] = len(index)
    tris = []  # (v0, v1, v2, orientation) with local edge e_k opposite vertex k
    for i in range(N):
        for j in range(N - i):
            tris.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)], "up"))
    for i in range(N):
        for j in range(N - 1 - i):
            tris.append(
                (index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)], "down")
            )
    edge_tris = {}
    for t, (v0, v1, v2, _) in enumerate(tris):
        for loc, (a, b) in enumerate(((v1, v2), (v2, v0), (v0, v1))):
            key = (a, b) if a < b else (b, a)
            edge_tris.setdefault(key, []).append((t, loc))
    interior = sorted(k for k, v in edge_tris.items() if len(v) == 2)
    edge_id = {k: n for n, k in enumerate(interior)}
    return index, tris, edge_tris, edge_id


# local edge direction of subtriangles, expressed in the parent triangle's
# edge vectors G = (B-C, C-A, A-B); down triangles carry a cyclic shift and a
# sign flip, which cancels in the gradient products
_LOCAL_MAP = {"up": (0, 1, 2), "down": (2, 0, 1)}


@dataclass(frozen=True)
class CRMesh:
    """Similar-subtriangle mesh: N^2 elements, interior-edge indexed basis."""

    N: int
    triangle: Triangle
    edge_id: dict = field(repr=False)
    tris: list = field(repr=False)
    h: Interval = None

    @classmethod
    def build(cls, T: Triangle, N: int) -> "CRMesh":
        if N < 2:
            raise ValueError("mesh subdivision N must be >= 2")
        _, tris, _, edge_id = _mesh_topology(N)
        h = T.diameter() / N
        return cls(N=N, triangle=T, edge_id=edge_id, tris=tris, h=h)

    @property
    def n_interior_edges(self) -> int:
        return len(self.edge_id)


@dataclass
class DiscreteOperator:
    """Symmetric sparse interval matrix M = 3 N^2 A / (2 |Omega|)."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: list  # Interval per stored (upper-triangle) entry
    mesh: CRMesh

    def mid_rad_arrays(self):
        mid = np.empty(len(self.vals))
        rad = np.empty(len(self.vals))
        for i, v in enumerate(self.vals):
            lo, hi = v.lo_float, v.hi_float
            m = 0.5 * (lo + hi)
            mid[i] = m
            rad[i] = max(hi - m, m - lo) * (1 + 4e-16) + 5e-324
        return mid, rad

    def _sym_coo(self, data):
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        d = np.concatenate([data, data[off]])
        return sp.coo_matrix((d, (r, c)), shape=(self.dim, self.dim))

    def mid_csr(self) -> sp.csr_matrix:
        mid, _ = self.mid_rad_arrays()
        return self._sym_coo(mid).tocsr()

    def mid_rad_csr(self):
        mid, rad = self.mid_rad_arrays()
        return self._sym_coo(mid).tocsr(), self._sym_coo(rad).tocsr()

    def dense_mid(self) -> np.ndarray:
        return self.mid_csr().toarray()

    def frobenius_upper(self) -> float:
        mid, rad = self.mid_rad_arrays()
        off = self.rows != self.cols
        w = np.where(off, 2.0, 1.0)
        total = float(np.sum(w * (np.abs(mid) + rad) ** 2))
        return math.sqrt(total) * (1.0 + 1e-12)

    def export_triplets(self, path) -> None:
        """Sparse-triplet debug format: row col lo hi per line."""
        with open(path, "w") as f:
            f.write(f"# dim {self.dim} nnz {len(self.vals)} (upper triangle)\n")
            for r, c, v in zip(self.rows, self.cols, self.vals):
                lo, hi = v.to_decimal_outward(25)
                f.write(f"{r} {c} {lo} {hi}\n")


def assemble(T: Triangle, N: int) -> DiscreteOperator:
    """Interval stiffness assembly from closed-form element gradients.

    Every element is similar to the parent triangle, so for both element
    orientations the gradient products reduce to the parent's edge vectors:
    int grad psi_a . grad psi_b over one element = (G_a . G_b)/|Omega| up to
    the local index map, independent of N.
    """
    mesh = CRMesh.build(T, N)
    cx, cy = T.c_x, T.c_y
    one = Interval(1)
    # parent edge vectors: G0 = B-C, G1 = C-A, G2 = A-B
    G = ((one - cx, -cy), (cx, cy), (-one, Interval(0)))
    area = T.area()
    K = [[(G[a][0] * G[b][0] + G[a][1] * G[b][1]) / area for b in range(3)] for a in range(3)]
    scale = Interval(3 * N * N) / area.mul_2exp(1)  # 3 N^2 / (2 |Omega|)

    _, tris, edge_tris, edge_id = _mesh_topology(N)
    entries = {}
    for t, (v0, v1, v2, orient) in enumerate(tris):
        lmap = _LOCAL_MAP[orient]
        vv = (v0, v1, v2)
        locs = (((vv[1], vv[2]) if vv[1] < vv[2] else (vv[2], vv[1])),
                ((vv[2], vv[0]) if vv[2] < vv[0] else (vv[0], vv[2])),
                ((vv[0], vv[1]) if vv[0] < vv[1] else (vv[1], vv[0])))
        eids = [edge_id.get(k) for k in locs]
        for a in range(3):
            ea = eids[a]
            if ea is None:
                continue
            for b in range(a, 3):
                eb = eids[b]
                if eb is None:
                    continue
                i, j = (ea, eb) if ea <= eb else (eb, ea)
                contrib = K[lmap[a]][lmap[b]]
                prev = entries.get((i, j))
                entries[(i, j)] = contrib if prev is None else prev + contrib
    keys = sorted(entries)
    rows = np.array([k[0] for k in keys], dtype=np.int64)
    cols = np.array([k[1] for k in keys], dtype=np.int64)
    vals = [entries[k] * scale for k in keys]
    return DiscreteOperator(dim=len(edge_id), rows=rows, cols=cols, vals=vals, mesh=mesh)


def assemble_float(verts, N: int) -> sp.csr_matrix:
    """Plain float64 assembly for an arbitrary float triangle (non-rigorous).

    Used for eigenvalue estimates, search brackets and plotting sweeps.
    """
    (ax, ay), (bx, by), (cx, cy) = [(float(x), float(y)) for x, y in verts]
    _, tris, _, edge_id = _mesh_topology(N)
    area = abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)) / 2.0
    G = ((bx - cx, by - cy), (cx - ax, cy - ay), (ax - bx, ay - by))
    K = np.array([[(G[a][0] * G[b][0] + G[a][1] * G[b][1]) / area for b in range(3)] for a in range(3)])
    scale = 3.0 * N * N / (2.0 * area)
    data, ri, ci = [], [], []
    for v0, v1, v2, orient in tris:
        lmap = _LOCAL_MAP[orient]
        vv = (v0, v1, v2)
        locs = (((vv[1], vv[2]) if vv[1] < vv[2] else (vv[2], vv[1])),
                ((vv[2], vv[0]) if vv[2] < vv[0] else (vv[0], vv[2])),
                ((vv[0], vv[1]) if vv[0] < vv[1] else (vv[1], vv[0])))
        eids = [edge_id.get(k) for k in locs]
        for a in range(3):
            if eids[a] is None:
                continue
            for b in range(3):
                if eids[b] is None:
                    continue
                ri.append(eids[a])
                ci.append(eids[b])
                data.append(K[lmap[a]][lmap[b]] * scale)
    m = len(edge_id)
    return sp.coo_matrix((data, (ri, ci)), shape=(m, m)).tocsr()


def eigenvalue_estimates(verts, N: int, k: int) -> np.ndarray:
    """Approximate lowest k discrete eigenvalues (float, ascending)."""
    M = assemble_float(verts, N)
    if M.shape[0] <= max(40, 3 * k):
        w = np.linalg.eigvalsh(M.toarray())
        return w[:k]
    w = spla.eigsh(M.tocsc(), k=k, sigma=0, which="LM", return_eigenvectors=False)
    return np.sort(w)


# ----------------------------------------------------------------------
# verified separation
# ----------------------------------------------------------------------


def approx_eigenbasis(M: DiscreteOperator):
    """Non-rigorous full eigendecomposition of the midpoint matrix."""
    w, Q = np.linalg.eigh(M.dense_mid())
    return Q, w


@dataclass(frozen=True)
class SpectralSeparation:
    """First k eigenvalues isolated below the rest of the discrete spectrum."""

    cluster_enclosures: list  # disjoint Intervals, ascending
    cluster_counts: list  # eigenvalue count per cluster, sums to k
    rest_lower: Interval
    index_certified: int

    def cluster_of_index(self, idx: int):
        """(cluster position, Interval, count) containing eigenvalue #idx."""
        acc = 0
        for pos, (enc, cnt) in enumerate(zip(self.cluster_enclosures, self.cluster_counts)):
            if acc < idx <= acc + cnt:
                return pos, enc, cnt
            acc += cnt
        raise IndexError(f"eigenvalue index {idx} not covered (k={self.index_certified})")


def _sparse_ld_matmul(mid_csr: sp.csr_matrix, Q: np.ndarray) -> np.ndarray:
    """Extended-precision product of a sparse float64 matrix with dense Q."""
    m, n = Q.shape
    out = np.zeros((m, n), dtype=_LD)
    indptr, indices, data = mid_csr.indptr, mid_csr.indices, mid_csr.data
    for r in range(m):
        a, b = indptr[r], indptr[r + 1]
        if a == b:
            continue
        out[r] = data[a:b].astype(_LD) @ Q[indices[a:b]]
    return out


def _gram_s_bound(Q: np.ndarray) -> float:
    """Rigorous upper bound for max_ij |<v_i, v_j> - delta_ij|."""
    m = Q.shape[0]
    G = Q.T @ Q
    dev = float(np.max(np.abs(G - np.identity(m, dtype=_LD))))
    g = _gamma(m, _U_LD)
    colsq = float(np.max(np.abs(np.diag(G)))) * (1 + 2 * g) + 1e-300
    return dev * (1 + 1e-15) + g * colsq


def certify_separation(
    M: DiscreteOperator,
    Qtilde: np.ndarray,
    k: int,
    *,
    s_floor: float = 0.0,
    polish: str = "auto",
) -> SpectralSeparation:
    """Isolate the first k eigenvalues of M below the rest of its spectrum.

    Entrywise enclosures of the exactly-similar matrix D = W^T M W (W the
    orthonormal basis guaranteed by the near-orthonormality lemma) feed a
    grouped Gershgorin argument; the separation succeeds iff the lowest
    connected components of disks carry exactly k disks and everything else
    lies strictly above them.
    """
    m = M.dim
    if Qtilde.shape != (m, m):
        raise ValueError("eigenbasis shape mismatch")
    Q = Qtilde.astype(_LD)
    attempts = [False, True] if polish == "auto" else [polish is True or polish == "always"]
    last_err = None
    for do_polish in attempts:
        if do_polish:
            G = Q.T @ Q
            Q = Q @ (1.5 * np.identity(m, dtype=_LD) - 0.5 * G)
        try:
            return _certify_separation_once(M, Q, k, s_floor)
        except (SeparationFailureError, LemmaPreconditionError) as err:
            last_err = err
    raise last_err


def _certify_separation_once(M, Q, k, s_floor):
    m = M.dim
    s = max(_gram_s_bound(Q), s_floor)
    if 8.0 * m * s >= 1.0:
        raise LemmaPreconditionError(f"8 m s = {8 * m * s:.3g} >= 1")
    sqrt3s = math.sqrt(3.0 * s) * (1 + 1e-12)

    mid_csr, rad_csr = M.mid_rad_csr()
    P = _sparse_ld_matmul(mid_csr, Q)  # M_mid @ Q, extended precision
    D = Q.T @ P

    # rounding + interval-radius error budget for D entries (all float64 upper
    # bounds, inflated for their own rounding)
    absQ = np.abs(Q).astype(np.float64)
    absM = mid_csr.copy()
    absM.data = np.abs(absM.data)
    r_nnz = int(np.max(np.diff(mid_csr.indptr))) if m else 0
    base_mid = absM @ absQ  # |M_mid| |Q|
    base_rad = rad_csr @ absQ  # rad_M |Q|
    g_inner = _gamma(r_nnz + 2, _U_LD)
    g_outer = _gamma(m + 2, _U_LD)
    slop = 1.0 + 2 * _gamma(m + 2, _U_F64) + 1e-12
    W = ((g_inner + g_outer) * (absQ.T @ base_mid) + absQ.T @ base_rad) * slop + 1e-280

    # paper inflation: sqrt(3s)(||Mv_i|| + ||Mv_j||) + 4 s ||M||_2, summed rows
    col_bound = np.sqrt(np.sum((np.abs(P).astype(np.float64) + g_inner * base_mid + base_rad) ** 2, axis=0))
    col_bound = col_bound * (1 + _gamma(m + 2, _U_F64)) * (1 + 1e-12)
    fro = M.frobenius_upper()
    cn_sum = float(np.sum(col_bound)) * (1 + 1e-12)

    absD = np.abs(D).astype(np.float64)
    offdiag_sum = (absD + W).sum(axis=1) - (absD.diagonal() + W.diagonal())
    offdiag_sum = offdiag_sum * (1 + _gamma(m + 2, _U_F64)) * (1 + 1e-12)
    infl = sqrt3s * ((m - 1) * col_bound + (cn_sum - col_bound)) + 4.0 * s * fro * (m - 1)
    radius = offdiag_sum + infl * (1 + 1e-12)
    centers = D.diagonal().astype(np.float64)
    center_err = W.diagonal() + np.abs(centers) * 4e-16

    lo = centers - center_err - radius
    hi = centers + center_err + radius
    lo = np.nextafter(lo, -np.inf)
    hi = np.nextafter(hi, np.inf)

    order = np.argsort(lo, kind="stable")
    comps = []  # (lo, hi, count)
    for i in order:
        if comps and lo[i] <= comps[-1][1]:
            comps[-1][1] = max(comps[-1][1], hi[i])
            comps[-1][2] += 1
        else:
            comps.append([lo[i], hi[i], 1])
    total = 0
    split = None
    for pos, (_, _, cnt) in enumerate(comps):
        total += cnt
        if total == k:
            split = pos + 1
            break
        if total > k:
            raise SeparationFailureError(
                f"component boundary misses k={k}: cumulative count {total}"
            )
    if split is None or split >= len(comps):
        raise SeparationFailureError("no spectral gap above the requested block")
    gap_hi = max(c[1] for c in comps[:split])
    rest_lo = min(c[0] for c in comps[split:])
    if not gap_hi < rest_lo:
        raise SeparationFailureError("disks merge across the intended gap")
    return SpectralSeparation(
        cluster_enclosures=[Interval(c[0], c[1]) for c in comps[:split]],
        cluster_counts=[c[2] for c in comps[:split]],
        rest_lower=Interval(rest_lo),
        index_certified=k,
    )


def parlett_refine(
    M: DiscreteOperator,
    lambda_tilde: float,
    u_tilde: np.ndarray,
    sep: SpectralSeparation,
    idx: int,
) -> Interval:
    """Certified enclosure of the idx-th discrete eigenvalue from a residual.

    The residual bound |lambda_h - lambda~| <= ||M u - lambda~ u|| / ||u||
    locates one discrete eigenvalue; the separation geometry certifies the
    nearest one is the idx-th (its cluster must hold a single eigenvalue and
    lie strictly nearer to lambda~ than every other cluster and the rest of
    the spectrum).
    """
    m = M.dim
    u = u_tilde.astype(_LD)
    mid_csr, rad_csr = M.mid_rad_csr()
    r_nnz = int(np.max(np.diff(mid_csr.indptr))) if m else 0
    g_inner = _gamma(r_nnz + 4, _U_LD)

    Mu = _sparse_ld_matmul(mid_csr, u.reshape(m, 1)).ravel()
    res = Mu - _LD(lambda_tilde) * u
    absu = np.abs(u).astype(np.float64)
    err = g_inner * ((np.abs(mid_csr) @ absu) + np.abs(lambda_tilde) * absu) + rad_csr @ absu
    res_up = float(np.sqrt(np.sum((np.abs(res).astype(np.float64) + err) ** 2)))
    res_up *= 1 + _gamma(m + 2, _U_F64) + 1e-12

    nrm_sq = float(u @ u) * (1 - _gamma(m + 2, _U_LD)) - 1e-280
    if nrm_sq <= 0:
        raise ValueError("zero approximate eigenvector")
    r_norm = res_up / math.sqrt(nrm_sq) * (1 + 1e-12)

    pos, enc, cnt = sep.cluster_of_index(idx)
    if cnt != 1:
        raise ProximityUncertifiedError(
            f"eigenvalue #{idx} shares a cluster with {cnt - 1} others"
        )
    d_target = max(abs(lambda_tilde - enc.lo_float), abs(lambda_tilde - enc.hi_float))
    d_others = [
        min(abs(lambda_tilde - other.lo_float), abs(lambda_tilde - other.hi_float))
        for j, other in enumerate(sep.cluster_enclosures)
        if j != pos
    ]
    d_others.append(abs(sep.rest_lower.lo_float - lambda_tilde))
    if d_others and not d_target < min(d_others):
        raise ProximityUncertifiedError(
            f"approximate eigenvalue {lambda_tilde:.6g} not certifiably nearest "
            f"to eigenvalue #{idx}"
        )
    lam = Interval(lambda_tilde)
    return lam.widened(Interval(r_norm))


def liu_lower_bound(lambda_h_enclosure: Interval, h: Interval) -> Interval:
    """Continuous lower bound lam_h/(1 + C_h^2 lam_h), C_h = 0.1893 h.

    Monotone in lam_h, so the enclosure's lower endpoint is used; the
    returned interval's lower endpoint is the certified bound.
    """
    x = lambda_h_enclosure.lower()
    if not x.sign_certified() == 1:
        raise ValueError("discrete eigenvalue bound must be certified positive")
    ch = Interval("0.1893") * h
    return x / (Interval(1) + ch.sqr() * x)
