"""Entanglement witnesses built from local orthogonal observables.

Bipartite:     W = I - alpha sum_k G^A_k (x) G^B_k,
               alpha = sqrt(MN) / (sqrt((M-1)(N-1)) + 1)
Multipartite:  W = I - beta sum_k G^(1)_k (x) ... (x) G^(M)_k,
               beta = sqrt(prod d) / (1 + sqrt(prod (d - 1)))

Shorter LOO lists are padded with zero observables; witnesses on a party
subset act as the identity on the remaining parties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sepscan.basis import LooSet, loo_set
from sepscan.bloch import svd_adapted_loos
from sepscan.criteria import cm_bipartite
from sepscan.errors import BadLoo, BadSubset, DimMismatch, NotDetected
from sepscan.linalg import DensityMatrix, embed, hermitize, kron
from sepscan.states import max_entangled


@dataclass(frozen=True)
class Witness:
    mat: np.ndarray
    coefficient: float  # alpha (bipartite) or beta (multipartite)
    provenance: str
    subset: tuple[int, ...]
    full_dims: tuple[int, ...]
    min_eigenvalue: float

    def to_dict(self) -> dict:
        return {
            "coefficient": self.coefficient,
            "provenance": self.provenance,
            "subset": list(self.subset),
            "full_dims": list(self.full_dims),
            "min_eig": self.min_eigenvalue,
        }


def bipartite_alpha(m: int, n: int) -> float:
    return math.sqrt(m * n) / (math.sqrt((m - 1) * (n - 1)) + 1)


def multipartite_beta(dims: Sequence[int]) -> float:
    return math.sqrt(math.prod(dims)) / (1 + math.sqrt(math.prod(d - 1 for d in dims)))


def _loo_sum(loos: Sequence[LooSet]) -> np.ndarray:
    size = max(s.dim for s in loos)
    padded = [s.padded(size) for s in loos]
    total = int(np.prod([s.dim for s in loos]))
    acc = np.zeros((total, total), dtype=complex)
    for k in range(size * size):
        if all(np.any(g[k]) for g in padded):
            acc += kron(*(g[k] for g in padded))
    return acc


def _finish(mat: np.ndarray, coefficient: float, provenance: str, subset, full_dims) -> Witness:
    mat = hermitize(mat)
    mat.setflags(write=False)
    return Witness(mat, coefficient, provenance, tuple(subset), tuple(full_dims), float(np.linalg.eigvalsh(mat)[0]))


def bipartite_witness(loos_a: LooSet, loos_b: LooSet, provenance: str = "explicit LOOs") -> Witness:
    for s in (loos_a, loos_b):
        if not isinstance(s, LooSet):
            raise BadLoo("witness construction needs LooSet inputs")
    m, n = loos_a.dim, loos_b.dim
    alpha = bipartite_alpha(m, n)
    mat = np.eye(m * n, dtype=complex) - alpha * _loo_sum([loos_a, loos_b])
    return _finish(mat, alpha, provenance, (0, 1), (m, n))


def witness_from_state(rho: DensityMatrix) -> Witness:
    """Witness with LOOs aligned to the singular vectors of ``rho``'s correlation matrix.

    Its expectation on ``rho`` is
    ``(sqrt(MN(M-1)(N-1)) - ||T||_KF) / (sqrt(MN) (sqrt((M-1)(N-1)) + 1))``,
    negative exactly when the CM criterion detects ``rho``.
    """
    verdict = cm_bipartite(rho)
    if not verdict.detected:
        raise NotDetected(f"CM criterion not violated (||T||_KF = {verdict.statistic:.6g} <= {verdict.bound:.6g})")
    loos_a, loos_b = svd_adapted_loos(rho)
    return bipartite_witness(loos_a, loos_b, "SVD-adapted LOOs of the input state")


def canonical_bipartite(m: int, n: int) -> Witness:
    """Witness adapted to the maximally entangled state of ``m (x) n``."""
    w = witness_from_state(max_entangled(m, n))
    return Witness(w.mat, w.coefficient, f"SVD-adapted LOOs of the maximally entangled {m}x{n} state",
                   w.subset, w.full_dims, w.min_eigenvalue)


def multipartite_witness(subset: Sequence[int], loos: Sequence[LooSet], full_dims: Sequence[int],
                         provenance: str = "explicit LOOs") -> Witness:
    full_dims = tuple(int(d) for d in full_dims)
    subset = tuple(int(p) for p in subset)
    if len(subset) < 2 or list(subset) != sorted(set(subset)) or subset[0] < 0 or subset[-1] >= len(full_dims):
        raise BadSubset(f"subset {subset} invalid for {len(full_dims)} parties")
    if len(loos) != len(subset):
        raise BadLoo(f"need one LOO set per party in the subset, got {len(loos)}")
    for p, s in zip(subset, loos):
        if not isinstance(s, LooSet) or s.dim != full_dims[p]:
            raise BadLoo(f"LOO set for party {p} must have dimension {full_dims[p]}")
    sub_dims = [full_dims[p] for p in subset]
    beta = multipartite_beta(sub_dims)
    local = np.eye(int(np.prod(sub_dims)), dtype=complex) - beta * _loo_sum(loos)
    return _finish(embed(local, subset, full_dims), beta, provenance, subset, full_dims)


def canonical_multipartite(dims: Sequence[int], subset: Sequence[int] | None = None) -> Witness:
    """Witness from the standard LOOs ``I/sqrt(d)`` plus normalized Gell-Mann matrices."""
    dims = tuple(int(d) for d in dims)
    subset = tuple(range(len(dims))) if subset is None else tuple(subset)
    loos = [loo_set(dims[p]) for p in subset]
    return multipartite_witness(subset, loos, dims, "normalized Gell-Mann LOOs")


def expectation(w: Witness, rho: DensityMatrix) -> float:
    if tuple(rho.dims) != w.full_dims:
        raise DimMismatch(f"witness acts on {w.full_dims}, state has dims {rho.dims}")
    return rho.expect(w.mat)


def min_eig(w: Witness) -> float:
    return float(np.linalg.eigvalsh(w.mat)[0])
