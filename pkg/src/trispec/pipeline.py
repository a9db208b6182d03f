"""Per-triangle certification pipeline: first pass + second pass + positions.

The two passes cooperate:

  * the FEM pass produces certified lower bounds L_1..L_{k+1} for the low
    continuous eigenvalues (any index, unconditionally);
  * the particular-solutions pass then certifies narrow enclosures E_1, E_2,
    ... in ascending order.  When E_1..E_{j-1} are disjoint, each contains an
    eigenvalue, and all lie below L_j, a counting argument pins them to
    lambda_1..lambda_{j-1}; the window isolation evidence for the next
    enclosure is then (hi(E_{j-1}), L_{j+1}).

`certify_spectrum` runs the chain for a set of indices, accepting externally
supplied enclosures (side-wide intermediate eigenvalues) for skipped indices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .certify import (
    EigenEnclosure,
    IsolationWindow,
    boundary_norm_upper,
    certification_record,
    certify_enclosure,
    interior_norm_lower,
    tension_bound,
)
from .fem import (
    approx_eigenbasis,
    assemble,
    certify_separation,
    eigenvalue_estimates,
    liu_lower_bound,
    parlett_refine,
)
from .geometry import Triangle, incenter_inradius
from .interval import Interval, get_precision
from .mps import BasisSpec, golden_search

__all__ = [
    "CertifyConfig",
    "FirstPass",
    "PositionError",
    "certify_positions_core",
    "certify_spectrum",
    "first_pass",
    "search_brackets",
]


class PositionError(ArithmeticError):
    """Spectral positions cannot be certified (overlap or insufficient gap)."""


@dataclass
class CertifyConfig:
    fem_n: int = 32
    basis: BasisSpec = field(default_factory=BasisSpec)
    seed: int = 0
    smin_ceiling: float = 1e-6
    golden_tol: float = 1e-13
    boundary_degree: int = 25
    interior_degree: int = 11
    interior_grid_n: int = 8
    interior_shrink: float = 0.8
    interior_rel_prec: float = 1e-2
    boundary_rel_budget: float = 1e-3
    boundary_max_depth: int = 12
    kl_max: float = 1.5
    dist_ratio: float = 5.0
    width_target: float = 2e-7
    jobs: int = 1

    @classmethod
    def from_json(cls, obj: dict) -> "CertifyConfig":
        kw = dict(obj)
        if "basis" in kw:
            kw["basis"] = BasisSpec.from_json(kw["basis"])
        return cls(**kw)

    def to_json(self) -> dict:
        out = self.__dict__.copy()
        out["basis"] = self.basis.to_json()
        return out


@dataclass(frozen=True)
class FirstPass:
    """Certified spectral lower bounds at one triangle."""

    triangle: Triangle
    fem_n: int
    lower_bounds: dict  # index -> Interval (the .lo is the certified bound)
    discrete_enclosures: dict  # index -> Interval around the discrete eigenvalue
    estimates: np.ndarray  # float estimates of the low discrete spectrum


def first_pass(T: Triangle, k_max: int, N: int) -> FirstPass:
    """FEM separation and continuous lower bounds for indices 1..k_max+1."""
    M = assemble(T, N)
    Q, w = approx_eigenbasis(M)
    sep = certify_separation(M, Q, k_max + 1)
    lower, discrete = {}, {}
    for idx in range(1, k_max + 2):
        enc = parlett_refine(M, float(w[idx - 1]), Q[:, idx - 1], sep, idx)
        discrete[idx] = enc
        lower[idx] = liu_lower_bound(enc, M.mesh.h)
    return FirstPass(
        triangle=T,
        fem_n=N,
        lower_bounds=lower,
        discrete_enclosures=discrete,
        estimates=w[: k_max + 3].copy(),
    )


def search_brackets(fp: FirstPass, idx: int, rel: float = 0.05):
    """Bracket around the idx-th eigenvalue from float FEM estimates.

    The nonconforming discretization underestimates, so the bracket is skewed
    upward; it is clipped to stay inside the gaps to the neighboring
    eigenvalue estimates.
    """
    est = float(fp.estimates[idx - 1])
    lo = est * (1 - 0.004)
    hi = est * (1 + rel)
    if idx >= 2:
        lo = max(lo, 0.5 * (float(fp.estimates[idx - 2]) + est))
    if idx < len(fp.estimates):
        hi = min(hi, 0.55 * (est + float(fp.estimates[idx])))
    return lo, hi


def _isolation_for(idx: int, fp: FirstPass, priors: dict) -> IsolationWindow:
    """Evidence that at most one eigenvalue lies in the window.

    Eigenvalues below L_{idx+1} are exactly lambda_1..lambda_idx (counting);
    given certified enclosures for indices < idx, the region strictly above
    their maximum and strictly below L_{idx+1} holds at most lambda_idx.
    """
    hi_clear = fp.lower_bounds[idx + 1].lo_float
    if idx == 1:
        lo_clear = 0.0
    else:
        prev = priors.get(idx - 1)
        if prev is None:
            raise PositionError(
                f"certifying index {idx} needs an enclosure for index {idx - 1}"
            )
        lo_clear = prev.value.hi_float
    return IsolationWindow(lo_clear, hi_clear)


def certify_eigenvalue(
    T: Triangle,
    idx: int,
    fp: FirstPass,
    priors: dict,
    cfg: CertifyConfig,
):
    """Search + tension bound + bootstrapped enclosure for one index."""
    bracket = search_brackets(fp, idx)
    cand = golden_search(
        T,
        bracket,
        cfg.basis,
        seed=cfg.seed,
        rel_tol=cfg.golden_tol,
        smin_ceiling=cfg.smin_ceiling,
    )
    isq = interior_norm_lower(
        cand,
        cfg.interior_grid_n,
        cfg.interior_shrink,
        degree=cfg.interior_degree,
        rel_prec=cfg.interior_rel_prec,
        jobs=cfg.jobs,
    )
    (_, _), rho = incenter_inradius(T)
    lam = Interval(cand.lam)
    # absolute boundary budget from the enclosure width target:
    # need rho/t^2 - 28(1+rho)(1+lam^-1/2) >= 2(lam+sqrt(lam))/d^2
    d_target = cfg.width_target / 2
    need = 2.0 * (cand.lam + math.sqrt(cand.lam)) / (d_target * d_target)
    tsq_max = rho.lo_float / (
        need + 28 * (1 + rho.hi_float) * (1 + 1 / math.sqrt(cand.lam)) / rho.lo_float
    )
    abs_budget = 0.25 * tsq_max * isq.lo_float
    bsq = boundary_norm_upper(
        cand,
        degree=cfg.boundary_degree,
        rel_budget=cfg.boundary_rel_budget,
        abs_total_budget=abs_budget,
        max_depth=cfg.boundary_max_depth,
        kl_max=cfg.kl_max,
        dist_ratio=cfg.dist_ratio,
        jobs=cfg.jobs,
    )
    tb = tension_bound(bsq, isq)
    iso = _isolation_for(idx, fp, priors)
    lam_up = (lam + lam.sqrt()).upper()
    enc = certify_enclosure(cand, tb, rho, lam_up, isolation=iso)
    # bootstrap: reuse the first enclosure's upper endpoint
    enc = certify_enclosure(cand, tb, rho, enc.value.upper(), isolation=iso)
    record = certification_record(cand, tb, rho, enc)
    return enc, cand, record


def certify_positions_core(enclosures: dict, rest_lower: Interval, k: int) -> bool:
    """Counting argument: k disjoint enclosures strictly below rest_lower
    contain exactly lambda_1..lambda_k in ascending order."""
    if sorted(enclosures) != list(range(1, k + 1)):
        raise PositionError(f"need enclosures exactly for 1..{k}, got {sorted(enclosures)}")
    items = [enclosures[i].value if isinstance(enclosures[i], EigenEnclosure) else enclosures[i] for i in range(1, k + 1)]
    for i in range(k):
        if not items[i].sign_certified() == 1:
            raise PositionError(f"enclosure {i + 1} not certified positive")
        if items[i].hi_float >= rest_lower.lo_float:
            raise PositionError(
                f"enclosure {i + 1} reaches above the certified lower bound "
                f"for eigenvalue {k + 1}"
            )
        for j in range(i + 1, k):
            if items[i].overlaps(items[j]):
                raise PositionError(f"enclosures {i + 1} and {j + 1} overlap")
    for i in range(k - 1):
        if not items[i].certainly_lt(items[i + 1]):
            raise PositionError(f"enclosures {i + 1}, {i + 2} out of order")
    return True


def certify_spectrum(
    T: Triangle,
    indices,
    cfg: CertifyConfig,
    *,
    fp: FirstPass = None,
    external: dict = None,
):
    """Certified enclosures with positions for the requested indices.

    `external` may inject already-certified enclosures (e.g. side-wide
    intermediate eigenvalues) for indices that are not searched here; they
    participate in the isolation chain and the position check.
    """
    indices = sorted(set(indices))
    k_max = max(indices)
    if fp is None:
        fp = first_pass(T, k_max, cfg.fem_n)
    priors = dict(external or {})
    records = []
    for idx in range(1, k_max + 1):
        if idx in priors:
            continue
        if idx not in indices:
            raise PositionError(
                f"index chain broken: {idx} neither requested nor supplied"
            )
        enc, cand, rec = certify_eigenvalue(T, idx, fp, priors, cfg)
        priors[idx] = enc
        records.append(rec)
    certify_positions_core(priors, fp.lower_bounds[k_max + 1].lower(), k_max)
    out = {
        i: EigenEnclosure(value=priors[i].value, index=i, triangle=T)
        for i in priors
    }
    return out, fp, records
