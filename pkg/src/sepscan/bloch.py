"""Bloch representation: local Bloch vectors and correlation tensors.

For a party subset ``S`` and generator bases with ``Tr(g_k g_l) = c delta_kl``
the coefficient of ``g_{a_1} (x) ... (x) g_{a_M}`` in

    rho = (1 / prod(d)) * (I + sum_S sum_a T^S_a g_a ...)

is ``T^S_a = prod_{i in S} d_i / c^M * Tr(rho g_{a_1} ... g_{a_M})``.  With
``c = 2`` this is the usual multipartite correlation tensor; with ``c = 1``
and two parties it is the bipartite correlation matrix ``MN Tr(rho l_i l_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from sepscan.basis import GeneratorBasis, gellmann, loo_set, rotate_loos
from sepscan.errors import BadSubset, DimMismatch, IncompleteCoefficients, NotHermitian
from sepscan.linalg import DensityMatrix, embed, trace_norm


@dataclass(frozen=True)
class BlochVector:
    party: int
    v: np.ndarray


@dataclass(frozen=True)
class CorrelationMatrix:
    m_dim: int
    n_dim: int
    t: np.ndarray  # (M^2 - 1) x (N^2 - 1), orthonormal generators


@dataclass(frozen=True)
class CorrelationTensor:
    subset: tuple[int, ...]
    dims: tuple[int, ...]  # dimensions of the parties in `subset`
    entries: np.ndarray
    norm: float = 2.0

    @property
    def order(self) -> int:
        return self.entries.ndim

    @property
    def dims_minus(self) -> tuple[int, ...]:
        return self.entries.shape


def _bases_for(dims: Sequence[int], subset: Sequence[int], bases, norm: float) -> list[GeneratorBasis]:
    if bases is None:
        return [gellmann(dims[p], norm) for p in subset]
    bases = list(bases)
    if len(bases) != len(subset):
        raise DimMismatch(f"need {len(subset)} bases, got {len(bases)}")
    for p, b in zip(subset, bases):
        if b.dim != dims[p]:
            raise DimMismatch(f"basis of dim {b.dim} supplied for party {p} of dim {dims[p]}")
    return bases


def _subset_expectations(rho: DensityMatrix, subset: Sequence[int], bases: Sequence[GeneratorBasis]) -> np.ndarray:
    """Tensor of ``Tr(rho g_{a_1} (x) ... (x) g_{a_M})`` over the parties in ``subset``."""
    m = len(subset)
    red = rho.reduced(subset).mat if len(subset) < rho.n_parties else rho.mat
    sub_dims = [rho.dims[p] for p in subset]
    t = red.reshape(sub_dims * 2)
    # Tr(rho A (x) B) = sum rho[(i1 i2), (j1 j2)] A[j1, i1] B[j2, i2]
    operands: list = [t, list(range(2 * m))]
    for k, b in enumerate(bases):
        operands += [b.generators, [2 * m + k, m + k, k]]
    out = np.einsum(*operands, list(range(2 * m, 3 * m)), optimize=True)
    resid = float(np.max(np.abs(out.imag))) if out.size else 0.0
    if resid > rho.policy.imag_residue_tol:
        raise NotHermitian(f"expectation values carry imaginary residue {resid:.3e}")
    return out.real


def local_bloch(rho: DensityMatrix, party: int, basis: GeneratorBasis | None = None, norm: float = 2.0) -> BlochVector:
    """Single-party coefficients ``d / c * Tr(rho g_a)``."""
    if not 0 <= party < rho.n_parties:
        raise BadSubset(f"party {party} out of range")
    (basis,) = _bases_for(rho.dims, [party], None if basis is None else [basis], norm)
    d = rho.dims[party]
    v = d / basis.norm * _subset_expectations(rho, [party], [basis])
    return BlochVector(party, v)


def correlation_tensor(
    rho: DensityMatrix,
    subset: Sequence[int],
    bases: Sequence[GeneratorBasis] | None = None,
    norm: float = 2.0,
) -> CorrelationTensor:
    subset = tuple(int(p) for p in subset)
    if len(subset) < 2 or list(subset) != sorted(set(subset)) or subset[0] < 0 or subset[-1] >= rho.n_parties:
        raise BadSubset(f"subset {subset} must be strictly increasing, size >= 2, within 0..{rho.n_parties - 1}")
    bases = _bases_for(rho.dims, subset, bases, norm)
    c = bases[0].norm
    if any(b.norm != c for b in bases):
        raise DimMismatch("all bases of a correlation tensor must share one normalization")
    sub_dims = tuple(rho.dims[p] for p in subset)
    coeff = float(np.prod(sub_dims)) / c ** len(subset)
    entries = coeff * _subset_expectations(rho, subset, bases)
    return CorrelationTensor(subset, sub_dims, entries, c)


def correlation_matrix(rho: DensityMatrix, basis_a: GeneratorBasis | None = None, basis_b: GeneratorBasis | None = None) -> CorrelationMatrix:
    """Bipartite ``T_ij = MN Tr(rho l_i (x) l_j)`` with orthonormal generators."""
    if rho.n_parties != 2:
        raise DimMismatch(f"correlation matrix needs a bipartite state, got {rho.n_parties} parties")
    bases = None if basis_a is None and basis_b is None else [
        basis_a or gellmann(rho.dims[0], 1.0),
        basis_b or gellmann(rho.dims[1], 1.0),
    ]
    ct = correlation_tensor(rho, (0, 1), bases, norm=1.0)
    if ct.norm != 1.0:
        raise DimMismatch("correlation matrix requires orthonormal (norm 1) generators")
    return CorrelationMatrix(rho.dims[0], rho.dims[1], ct.entries)


def unfold(t, mode: int) -> np.ndarray:
    """Mode unfolding: rows by index ``mode``, columns by the remaining indices
    in ascending mode order with the last one fastest. Modes count from 0."""
    arr = t.entries if isinstance(t, CorrelationTensor) else np.asarray(t)
    if not 0 <= mode < arr.ndim:
        raise BadSubset(f"mode {mode} out of range for order-{arr.ndim} tensor")
    return np.moveaxis(arr, mode, 0).reshape(arr.shape[mode], -1)


def tensor_kf_norm(t) -> float:
    """Largest trace norm among all mode unfoldings."""
    arr = t.entries if isinstance(t, CorrelationTensor) else np.asarray(t)
    return max(trace_norm(unfold(arr, m)) for m in range(arr.ndim))


def all_subsets(n: int, min_size: int = 2) -> list[tuple[int, ...]]:
    return [s for r in range(min_size, n + 1) for s in combinations(range(n), r)]


def decompose(rho: DensityMatrix, norm: float = 2.0) -> tuple[list[BlochVector], dict[tuple[int, ...], CorrelationTensor]]:
    """Every Bloch coefficient of ``rho``: one vector per party, one tensor per subset."""
    blochs = [local_bloch(rho, p, norm=norm) for p in range(rho.n_parties)]
    tensors = {s: correlation_tensor(rho, s, norm=norm) for s in all_subsets(rho.n_parties)}
    return blochs, tensors


def _coefficient_operator(coeffs: np.ndarray, bases: Sequence[GeneratorBasis]) -> np.ndarray:
    m = len(bases)
    operands: list = [coeffs, list(range(m))]
    for k, b in enumerate(bases):
        operands += [b.generators, [k, m + k, 2 * m + k]]
    out = np.einsum(*operands, list(range(m, 3 * m)), optimize=True)
    size = int(np.prod([b.dim for b in bases]))
    return out.reshape(size, size)


def reconstruct(
    dims: Sequence[int],
    blochs: Sequence[BlochVector],
    tensors: Mapping[tuple[int, ...], CorrelationTensor],
    norm: float = 2.0,
) -> DensityMatrix:
    """Rebuild a density matrix from a complete set of Bloch coefficients."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    by_party = {b.party: b for b in blochs}
    missing = [p for p in range(n) if p not in by_party]
    missing += [s for s in all_subsets(n) if s not in tensors]
    if missing:
        raise IncompleteCoefficients(f"missing coefficients for {missing}")
    bases = [gellmann(d, norm) for d in dims]
    total = int(np.prod(dims))
    acc = np.eye(total, dtype=complex)
    for p in range(n):
        v = np.asarray(by_party[p].v, dtype=float)
        if v.shape != (dims[p] ** 2 - 1,):
            raise DimMismatch(f"Bloch vector of party {p} has shape {v.shape}")
        acc += embed(_coefficient_operator(v, [bases[p]]), [p], dims)
    for s in all_subsets(n):
        ct = tensors[s]
        expected = tuple(dims[p] ** 2 - 1 for p in s)
        if ct.entries.shape != expected:
            raise DimMismatch(f"tensor for subset {s} has shape {ct.entries.shape}, expected {expected}")
        acc += embed(_coefficient_operator(ct.entries, [bases[p] for p in s]), list(s), dims)
    return DensityMatrix.normalized(acc / total, dims)


def svd_adapted_loos(rho: DensityMatrix):
    """LOO pair that diagonalizes the bipartite correlation matrix.

    With ``T = U diag(s) V^T`` the k-th traceless observables are
    ``sum_l U[l, k] g_l`` on party 0 and ``sum_m V[m, k] g_m`` on party 1, so
    ``sum_k <G^A_k (x) G^B_k> = 1/sqrt(MN) + ||T||_KF / MN``.
    """
    t = correlation_matrix(rho).t
    u, _, vt = np.linalg.svd(t, full_matrices=True)
    return rotate_loos(loo_set(rho.dims[0]), u.T), rotate_loos(loo_set(rho.dims[1]), vt)
