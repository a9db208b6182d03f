"""FEM pass: assembly oracle, separation soundness, residual refinement."""

import math
import random

import numpy as np
import pytest

from trispec.interval import Interval
from trispec.geometry import Triangle
from trispec.fem import (
    LemmaPreconditionError,
    ProximityUncertifiedError,
    approx_eigenbasis,
    assemble,
    assemble_float,
    certify_separation,
    eigenvalue_estimates,
    liu_lower_bound,
    parlett_refine,
)

RISO = Triangle(Interval(0), Interval(1))  # right isosceles, legs 1
EQUI = Triangle(Interval(0.5), Interval("0.86602540378443864676372317075293618347"))


def test_assemble_dimension_n2():
    # 4-triangle mesh of any triangle has exactly 3 interior edges
    M = assemble(RISO, 2)
    assert M.dim == 3


def oracle_element_matrix(verts):
    """CR element stiffness by direct affine interpolation at edge midpoints."""
    v = np.asarray(verts, dtype=float)
    mids = np.array([(v[1] + v[2]) / 2, (v[2] + v[0]) / 2, (v[0] + v[1]) / 2])
    e1, e2 = v[1] - v[0], v[2] - v[0]
    area = abs(e1[0] * e2[1] - e1[1] * e2[0]) / 2
    grads = []
    for i in range(3):
        # affine a + b x + c y with value 1 at midpoint i, 0 at the others
        A = np.column_stack([np.ones(3), mids[:, 0], mids[:, 1]])
        rhs = np.zeros(3)
        rhs[i] = 1.0
        coef = np.linalg.solve(A, rhs)
        grads.append(coef[1:])
    K = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            K[a, b] = area * grads[a] @ grads[b]
    return K


def test_assemble_matches_quadrature_oracle():
    # independent per-element assembly of the full matrix, N = 8
    rng = random.Random(42)
    cx, cy = 0.37, 0.81
    T = Triangle(Interval(cx), Interval(cy))
    N = 8
    M = assemble(T, N)
    dense = M.dense_mid()
    assert np.allclose(dense, dense.T, atol=1e-9)

    # oracle assembly from scratch
    from trispec.fem import _mesh_topology

    index, tris, _, edge_id = _mesh_topology(N)
    verts = {}
    A, B, C = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([cx, cy])
    for (i, j), vid in index.items():
        verts[vid] = A + (i / N) * (B - A) + (j / N) * (C - A)
    m = len(edge_id)
    K = np.zeros((m, m))
    for v0, v1, v2, _ in tris:
        kloc = oracle_element_matrix([verts[v0], verts[v1], verts[v2]])
        pairs = [(v1, v2), (v2, v0), (v0, v1)]
        ids = [edge_id.get((min(p), max(p))) for p in pairs]
        for a in range(3):
            if ids[a] is None:
                continue
            for b in range(3):
                if ids[b] is None:
                    continue
                K[ids[a], ids[b]] += kloc[a, b]
    K *= 3 * N * N / (2 * (cy / 2))
    assert np.allclose(dense, K, rtol=1e-10, atol=1e-9)


def test_equilateral_smallest_discrete_eigenvalue():
    M = assemble(EQUI, 16)
    w = np.linalg.eigvalsh(M.dense_mid())
    ref = 16 * math.pi ** 2 / 3
    assert abs(w[0] - ref) / ref < 0.02


def test_approx_eigenbasis_diagonal():
    # hand-rolled DiscreteOperator with diagonal entries 1, 2
    from trispec.fem import DiscreteOperator, CRMesh

    mesh = CRMesh.build(RISO, 2)
    M = DiscreteOperator(
        dim=2,
        rows=np.array([0, 1]),
        cols=np.array([0, 1]),
        vals=[Interval(1), Interval(2)],
        mesh=mesh,
    )
    Q, w = approx_eigenbasis(M)
    assert np.allclose(Q, np.eye(2))
    assert np.allclose(w, [1, 2])


def test_approx_eigenbasis_residual_random():
    rng = np.random.RandomState(0)
    A = rng.randn(50, 50)
    A = (A + A.T) / 2
    w, Q = np.linalg.eigh(A)
    assert np.linalg.norm(A @ Q - Q @ np.diag(w)) < 1e-10


def test_assembled_first_eigenvalues_increasing():
    M = assemble(Triangle(Interval("0.63500"), Interval("0.27500")), 8)
    _, w = approx_eigenbasis(M)
    assert all(w[i] < w[i + 1] for i in range(5))


def _diag_operator(diag):
    from trispec.fem import DiscreteOperator, CRMesh

    mesh = CRMesh.build(RISO, 2)
    n = len(diag)
    return DiscreteOperator(
        dim=n,
        rows=np.arange(n),
        cols=np.arange(n),
        vals=[Interval(d) for d in diag],
        mesh=mesh,
    )


def test_certify_separation_diagonal_points():
    M = _diag_operator([1.0, 2.0, 3.0, 10.0, 11.0])
    sep = certify_separation(M, np.eye(5), 3)
    assert sep.index_certified == 3
    for enc, val in zip(sep.cluster_enclosures, [1.0, 2.0, 3.0]):
        assert enc.contains(val)
        assert enc.width_float < 1e-6
    assert sep.rest_lower.lo_float > 3


def test_certify_separation_perturbed_rotations():
    rng = np.random.RandomState(7)
    diag = np.sort(np.concatenate([rng.uniform(1, 30, 6), rng.uniform(80, 200, 30)]))
    M = _diag_operator(list(diag))
    w, Q = np.linalg.eigh(M.dense_mid())
    # perturb by ~1e-8 rotations
    S = rng.randn(36, 36) * 1e-8
    S = (S - S.T) / 2
    from scipy.linalg import expm

    Qp = Q @ expm(S)
    sep = certify_separation(M, Qp, 6)
    dense = np.linalg.eigvalsh(M.dense_mid())
    for i in range(6):
        _, enc, _ = sep.cluster_of_index(i + 1)
        assert enc.lo_float <= dense[i] <= enc.hi_float


def test_certify_separation_lemma_precondition():
    M = _diag_operator([1.0, 2.0, 3.0, 10.0, 11.0])
    Q = np.eye(5)
    Q[:, 1] = Q[:, 0]  # duplicate column: s = 1, 8 m s >= 1
    with pytest.raises(LemmaPreconditionError):
        certify_separation(M, Q, 3, polish=False)


def test_monotone_degradation_with_inflation():
    M = assemble(RISO, 4)
    Q, _ = approx_eigenbasis(M)
    sep_small = certify_separation(M, Q, 3)
    sep_big = certify_separation(M, Q, 3, s_floor=1e-9)
    for a, b in zip(sep_small.cluster_enclosures, sep_big.cluster_enclosures):
        assert b.contains(a)  # larger s never shrinks any disk


def test_parlett_exact_eigenpair():
    M = _diag_operator([1.0, 5.0, 9.0])
    sep = certify_separation(M, np.eye(3), 2)
    enc = parlett_refine(M, 5.0, np.array([0.0, 1.0, 0.0]), sep, 2)
    assert enc.contains(5.0)
    assert enc.width_float < 1e-10


def test_parlett_noisy_eigenpair_contains_dense():
    M = assemble(RISO, 8)
    Q, w = approx_eigenbasis(M)
    rng = np.random.RandomState(3)
    sep = certify_separation(M, Q, 5)
    dense = np.linalg.eigvalsh(M.dense_mid())
    for idx in (1, 3, 5):
        u = Q[:, idx - 1] + rng.randn(M.dim) * 1e-9
        u /= np.linalg.norm(u)
        enc = parlett_refine(M, float(w[idx - 1]), u, sep, idx)
        assert enc.lo_float <= dense[idx - 1] <= enc.hi_float
        assert enc.width_float < 1e-4


def test_parlett_mixed_vector_rejected():
    M = assemble(RISO, 8)
    Q, w = approx_eigenbasis(M)
    sep = certify_separation(M, Q, 5)
    u = (Q[:, 3] + Q[:, 4]) / math.sqrt(2)
    lam = float((w[3] + w[4]) / 2)
    with pytest.raises(ProximityUncertifiedError):
        parlett_refine(M, lam, u, sep, 4)


def test_liu_bound_h_to_zero():
    enc = Interval(100.0)
    b1 = liu_lower_bound(enc, Interval(1e-9))
    assert abs(b1.lo_float - 100.0) < 1e-6
    # monotone: larger h gives smaller bound
    b2 = liu_lower_bound(enc, Interval(0.1))
    assert b2.lo_float < b1.lo_float


def test_liu_bound_formula_hand_check():
    # lam_h = 100, h = 0.1: bound = 100 / (1 + (0.01893)^2 * 100)
    b = liu_lower_bound(Interval(100.0), Interval("0.1"))
    ref = 100.0 / (1 + 0.01893 ** 2 * 100)
    assert abs(b.lo_float - ref) < 1e-12
    with pytest.raises(ValueError):
        liu_lower_bound(Interval(-1.0, 2.0), Interval(0.1))


def test_containment_random_small_triangles():
    # every certified cluster contains the dense-solver eigenvalue, N in {4, 8}
    rng = random.Random(17)
    for N in (4, 8):
        for _ in range(3):
            T = Triangle(Interval(rng.uniform(0.2, 0.8)), Interval(rng.uniform(0.3, 1.0)))
            M = assemble(T, N)
            Q, _ = approx_eigenbasis(M)
            k = 3
            sep = certify_separation(M, Q, k)
            dense = np.linalg.eigvalsh(M.dense_mid())
            for i in range(1, k + 1):
                _, enc, _ = sep.cluster_of_index(i)
                assert enc.lo_float <= dense[i - 1] <= enc.hi_float
            assert sep.rest_lower.lo_float <= dense[k] * (1 + 1e-10)


def test_estimates_right_isosceles():
    w = eigenvalue_estimates([(0, 0), (1, 0), (0, 1)], 24, 5)
    targets = [5, 10, 13, 17, 20]
    for est, t in zip(w, targets):
        assert abs(est - t * math.pi ** 2) / (t * math.pi ** 2) < 0.02


def test_export_triplets(tmp_path):
    M = assemble(RISO, 2)
    path = tmp_path / "m.txt"
    M.export_triplets(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("# dim 3")
    assert len(lines) == 1 + len(M.vals)
