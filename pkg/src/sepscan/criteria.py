"""Separability criteria.

Each check returns a :class:`CriterionVerdict`; ``detected`` means the state
violates a condition obeyed by every separable state, i.e. it is certified
entangled.  Detection is strict: ``detected`` iff ``statistic > bound``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from sepscan.basis import LooSet
from sepscan.bloch import all_subsets, correlation_matrix, correlation_tensor, svd_adapted_loos, tensor_kf_norm
from sepscan.errors import BadParameter, BadSubset, DimMismatch, NoSignChange
from sepscan.linalg import DensityMatrix, realign, trace_norm
from sepscan.normalform import NormalFormResult, normal_form

CRITERIA = ("cm", "gcm", "lur", "ppt", "ccnr")


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    statistic: float
    bound: float
    used_normal_form: bool = False
    subset: tuple[int, ...] | None = None

    @property
    def margin(self) -> float:
        return self.statistic - self.bound

    @property
    def detected(self) -> bool:
        return self.margin > 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["subset"] = None if self.subset is None else list(self.subset)
        out["margin"] = self.margin
        out["detected"] = self.detected
        return out


def _prepare(rho: DensityMatrix, use_nf: bool, nf: NormalFormResult | None = None) -> DensityMatrix:
    if not use_nf:
        return rho
    if nf is None:
        nf = normal_form(rho)
    return nf.require_converged().nf


def _require_bipartite(rho: DensityMatrix, what: str) -> None:
    if rho.n_parties != 2:
        raise BadSubset(f"{what} needs a bipartite state, got {rho.n_parties} parties")


def cm_bound(m: int, n: int) -> float:
    return math.sqrt(m * n * (m - 1) * (n - 1))


def gcm_bound(dims: Sequence[int]) -> float:
    return math.sqrt(math.prod(d * (d - 1) for d in dims) / 2 ** len(dims))


def cm_bipartite(rho: DensityMatrix, use_nf: bool = False, nf: NormalFormResult | None = None) -> CriterionVerdict:
    """Trace norm of the correlation matrix against ``sqrt(MN(M-1)(N-1))``."""
    _require_bipartite(rho, "CM criterion")
    state = _prepare(rho, use_nf, nf)
    m, n = rho.dims
    return CriterionVerdict("cm", trace_norm(correlation_matrix(state).t), cm_bound(m, n), use_nf, (0, 1))


def cm_general(
    rho: DensityMatrix, subset: Sequence[int], use_nf: bool = False, nf: NormalFormResult | None = None
) -> CriterionVerdict:
    """Correlation-tensor KF norm over ``subset`` against ``sqrt(prod d(d-1) / 2^M)``."""
    state = _prepare(rho, use_nf, nf)
    ct = correlation_tensor(state, subset)
    return CriterionVerdict("gcm", tensor_kf_norm(ct), gcm_bound(ct.dims), use_nf, ct.subset)


def cm_all_subsets(rho: DensityMatrix, use_nf: bool = False, nf: NormalFormResult | None = None) -> list[CriterionVerdict]:
    """Generalized CM verdicts for every party subset of size >= 2."""
    if rho.n_parties < 2:
        raise BadSubset("need at least two parties")
    if use_nf and nf is None:
        nf = normal_form(rho)
    return [cm_general(rho, s, use_nf, nf) for s in all_subsets(rho.n_parties)]


def lur_value(rho: DensityMatrix, loos_a: LooSet, loos_b: LooSet) -> float:
    """``1 - sum_k [<G^A_k (x) G^B_k> + 1/2 <G^A_k (x) I - I (x) G^B_k>^2]``.

    The shorter LOO list is padded with zero observables.
    """
    m, n = rho.dims
    if loos_a.dim != m or loos_b.dim != n:
        raise DimMismatch(f"LOO dims ({loos_a.dim}, {loos_b.dim}) do not match state dims {rho.dims}")
    size = max(m, n)
    ga, gb = loos_a.padded(size), loos_b.padded(size)
    rho_a = rho.reduced([0]).mat
    rho_b = rho.reduced([1]).mat
    t = rho.mat.reshape(m, n, m, n)
    # <G^A_k (x) G^B_k> = sum rho[(i a), (j b)] G^A_k[j, i] G^B_k[b, a]
    corr = np.einsum("iajb,kji,kba->k", t, ga, gb).real
    loc_a = np.einsum("ij,kji->k", rho_a, ga).real
    loc_b = np.einsum("ij,kji->k", rho_b, gb).real
    return float(1.0 - np.sum(corr + 0.5 * (loc_a - loc_b) ** 2))


def lur_check(
    rho: DensityMatrix,
    loos_a: LooSet | None = None,
    loos_b: LooSet | None = None,
    use_nf: bool = False,
    nf: NormalFormResult | None = None,
) -> CriterionVerdict:
    """Local uncertainty relation; detected when its left-hand side is negative.

    Without explicit LOOs the pair adapted to the singular vectors of the
    correlation matrix is used.
    """
    _require_bipartite(rho, "LUR criterion")
    state = _prepare(rho, use_nf, nf)
    if loos_a is None or loos_b is None:
        adapted = svd_adapted_loos(state)
        loos_a = loos_a or adapted[0]
        loos_b = loos_b or adapted[1]
    return CriterionVerdict("lur", -lur_value(state, loos_a, loos_b), 0.0, use_nf, (0, 1))


def lur_nf_bound_check(m: int, n: int) -> tuple[float, float, bool]:
    """Normal-form bounds on ``sum xi``: CM ``sqrt(MN(M-1)(N-1))`` vs LUR ``MN - (M+N)/2``.

    The flag is True when the CM bound is strictly smaller (decided in exact arithmetic).
    """
    if not 2 <= m <= n:
        raise BadParameter(f"need 2 <= M <= N, got ({m}, {n})")
    lur = Fraction(m * n) - Fraction(m + n, 2)
    cm_sq = Fraction(m * n * (m - 1) * (n - 1))
    return cm_bound(m, n), float(lur), cm_sq < lur * lur


def ppt_check(rho: DensityMatrix, party: int = 0, use_nf: bool = False, nf: NormalFormResult | None = None) -> CriterionVerdict:
    """Negative partial transpose on ``party``; statistic is minus the smallest eigenvalue."""
    if not 0 <= party < rho.n_parties:
        raise BadSubset(f"party {party} out of range")
    state = _prepare(rho, use_nf, nf)
    min_eig = float(np.linalg.eigvalsh(state.ptranspose(party))[0])
    return CriterionVerdict("ppt", -min_eig, rho.policy.psd_tol, use_nf, (party,))


def realignment_check(rho: DensityMatrix, use_nf: bool = False, nf: NormalFormResult | None = None) -> CriterionVerdict:
    _require_bipartite(rho, "realignment criterion")
    state = _prepare(rho, use_nf, nf)
    return CriterionVerdict("ccnr", trace_norm(realign(state.mat, state.dims)), 1.0, use_nf, (0, 1))


def evaluate(
    rho: DensityMatrix, criteria: str | Iterable[str] = "all", use_nf: bool = False, nf: NormalFormResult | None = None
) -> list[CriterionVerdict]:
    """Run criteria by id (``cm``, ``gcm``, ``lur``, ``ppt``, ``ccnr`` or ``all``).

    ``all`` skips the bipartite-only criteria on multipartite states.  The
    normal form, when requested, is computed once and shared.
    """
    if isinstance(criteria, str):
        criteria = [criteria]
    names: list[str] = []
    for c in criteria:
        if c == "all":
            names += [x for x in CRITERIA if rho.n_parties == 2 or x in ("gcm", "ppt")]
        elif c in CRITERIA:
            names.append(c)
        else:
            raise BadParameter(f"unknown criterion {c!r}; choose from {CRITERIA + ('all',)}")
    if use_nf and nf is None:
        nf = normal_form(rho)
    out: list[CriterionVerdict] = []
    for name in dict.fromkeys(names):
        if name == "cm":
            out.append(cm_bipartite(rho, use_nf, nf))
        elif name == "gcm":
            out += cm_all_subsets(rho, use_nf, nf)
        elif name == "lur":
            out.append(lur_check(rho, use_nf=use_nf, nf=nf))
        elif name == "ppt":
            parties = [0] if rho.n_parties == 2 else range(rho.n_parties)
            out += [ppt_check(rho, p, use_nf, nf) for p in parties]
        elif name == "ccnr":
            out.append(realignment_check(rho, use_nf, nf))
    return out


def detects(rho: DensityMatrix, criteria: str | Iterable[str] = "all", use_nf: bool = False) -> bool:
    return any(v.detected for v in evaluate(rho, criteria, use_nf))


def scan_threshold(
    family: Callable[[float], DensityMatrix],
    criterion: str | Iterable[str] = "gcm",
    use_nf: bool = False,
    p_lo: float = 0.0,
    p_hi: float = 1.0,
    tol: float = 1e-4,
) -> float:
    """Bisect for the noise weight where detection switches on.

    Assumes detection is monotone in ``p``: off at ``p_lo``, on at ``p_hi``.
    Both endpoints are checked.  Returns the midpoint of the final bracket,
    whose width is below ``tol``.
    """
    if not p_lo < p_hi:
        raise BadParameter(f"need p_lo < p_hi, got {p_lo}, {p_hi}")
    if not tol > 0:
        raise BadParameter("tolerance must be positive")

    def hit(p: float) -> bool:
        return detects(family(p), criterion, use_nf)

    lo_hit, hi_hit = hit(p_lo), hit(p_hi)
    if lo_hit == hi_hit or lo_hit:
        raise NoSignChange(f"detection is {lo_hit} at p={p_lo} and {hi_hit} at p={p_hi}")
    lo, hi = p_lo, p_hi
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if hit(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
