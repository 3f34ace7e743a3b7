"""Dense complex linear algebra and the quantum index reshuffles.

Index convention: a matrix acting on ``H_0 (x) H_1 (x) ... (x) H_{N-1}`` is
flattened row-major with party 0 as the most significant index, so that
``kron(a, b)`` puts ``a`` on party 0.  Partial trace, partial transpose and
realignment all reshape to ``dims + dims`` under that convention.

Parties are numbered from 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from sepscan.errors import BadDimension, BadSubset, NotDensityMatrix, NotHermitian, SingularMatrix
from sepscan.policy import DEFAULT_POLICY, NumericPolicy


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise BadDimension(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise BadDimension("matrix has non-finite entries")
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def herm_eig(m, tol: float = DEFAULT_POLICY.eig_hermitian_tol) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary whose columns are the
    matching eigenvectors, so ``m == V @ diag(e) @ V^dagger``.
    """
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"non-square matrix {m.shape}")
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {asym:.3e}")
    return np.linalg.eigh(hermitize(m))


def herm_power(m, p: float, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """``m ** p`` for a positive (semi)definite Hermitian matrix.

    Negative exponents require every eigenvalue above ``singular_floor``
    times the largest one.
    """
    evals, evecs = herm_eig(m, policy.eig_hermitian_tol)
    top = max(float(evals[-1]), 0.0)
    if p < 0:
        if evals[0] <= policy.singular_floor * top or top == 0.0:
            raise SingularMatrix(f"min eigenvalue {evals[0]:.3e} too small for exponent {p}")
    elif evals[0] < -policy.psd_tol:
        raise SingularMatrix(f"matrix is not positive semidefinite (min eigenvalue {evals[0]:.3e})")
    powered = np.clip(evals, 0.0, None) ** p
    return hermitize((evecs * powered) @ evecs.conj().T)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full singular value decomposition ``m = U[:, :k] diag(sigma) V[:, :k]^dagger``.

    ``U`` and ``V`` are square unitaries; ``sigma`` is descending with
    ``k = min(m.shape)`` entries.
    """
    m = _as_matrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    return u, s, vh.conj().T


def singular_values(m) -> np.ndarray:
    m = np.asarray(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def trace_norm(m) -> float:
    """Sum of singular values (the Ky Fan / trace norm)."""
    return float(np.sum(singular_values(m)))


def kron(*ops) -> np.ndarray:
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(o) for o in ops))


def _check_dims(mat: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise BadDimension(f"invalid dimension list {dims}")
    total = int(np.prod(dims))
    if mat.shape != (total, total):
        raise BadDimension(f"matrix shape {mat.shape} does not match dims {dims}")
    return dims


def _check_parties(parties: Iterable[int], n: int) -> list[int]:
    out = sorted(set(int(p) for p in parties))
    if not out or out[0] < 0 or out[-1] >= n:
        raise BadSubset(f"party subset {list(parties)} invalid for {n} parties")
    return out


def partial_trace(mat, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every party not in ``keep``; kept parties stay in ascending order."""
    mat = np.asarray(mat)
    dims = _check_dims(mat, dims)
    n = len(dims)
    keep = _check_parties(keep, n)
    t = mat.reshape(dims + dims)
    # einsum labels: row index i, column index n+i; traced parties share a label
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    k = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(k, k)


def partial_transpose(mat, dims: Sequence[int], party: int) -> np.ndarray:
    mat = np.asarray(mat)
    dims = _check_dims(mat, dims)
    n = len(dims)
    (party,) = _check_parties([party], n)
    t = mat.reshape(dims + dims)
    t = np.swapaxes(t, party, n + party)
    total = int(np.prod(dims))
    return t.reshape(total, total)


def realign(mat, dims: Sequence[int]) -> np.ndarray:
    """Realignment ``R[(i,j),(k,l)] = rho[(i,k),(j,l)]`` of a bipartite operator (shape M^2 x N^2)."""
    mat = np.asarray(mat)
    dims = _check_dims(mat, dims)
    if len(dims) != 2:
        raise BadSubset(f"realignment needs exactly 2 parties, got {len(dims)}")
    m, n = dims
    t = mat.reshape(m, n, m, n).transpose(0, 2, 1, 3)
    return t.reshape(m * m, n * n)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix on a tensor product of subsystems.

    ``dims`` lists the subsystem dimensions (each at least 2); ``mat`` is the
    ``prod(dims)``-square complex matrix. The stored array is read-only.
    """

    dims: tuple[int, ...]
    mat: np.ndarray = field(repr=False)
    policy: NumericPolicy = field(default=DEFAULT_POLICY, repr=False, compare=False)

    def __post_init__(self):
        mat = _as_matrix(self.mat)
        dims = _check_dims(mat, self.dims)
        if any(d < 2 for d in dims):
            raise BadDimension(f"every subsystem needs dimension >= 2, got {dims}")
        pol = self.policy
        asym = float(np.max(np.abs(mat - mat.conj().T)))
        if asym > pol.hermitian_tol:
            raise NotDensityMatrix(f"not Hermitian (deviation {asym:.3e})")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > pol.trace_tol:
            raise NotDensityMatrix(f"trace is {tr.real:.15g}, expected 1")
        mat = hermitize(mat)
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < -pol.psd_tol:
            raise NotDensityMatrix(f"not positive semidefinite (min eigenvalue {min_eig:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def normalized(cls, mat, dims: Sequence[int], policy: NumericPolicy = DEFAULT_POLICY) -> "DensityMatrix":
        """Hermitize and rescale to unit trace before validating."""
        mat = hermitize(_as_matrix(mat))
        tr = np.trace(mat).real
        if not tr > 0:
            raise NotDensityMatrix(f"cannot normalize a matrix with trace {tr}")
        return cls(tuple(dims), mat / tr, policy)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def min_eig(self) -> float:
        return float(self.eigvals()[0])

    def is_full_rank(self, rel_floor: float | None = None) -> bool:
        floor = self.policy.rank_floor if rel_floor is None else rel_floor
        ev = self.eigvals()
        return bool(ev[0] > floor * ev[-1])

    def reduced(self, keep: Iterable[int]) -> "DensityMatrix":
        keep = _check_parties(keep, self.n_parties)
        red = partial_trace(self.mat, self.dims, keep)
        return DensityMatrix.normalized(red, [self.dims[i] for i in keep], self.policy)

    def ptranspose(self, party: int) -> np.ndarray:
        return partial_transpose(self.mat, self.dims, party)

    def expect(self, op) -> float:
        """Real expectation value ``Tr(rho op)`` of a Hermitian operator."""
        val = complex(np.trace(self.mat @ np.asarray(op)))
        if abs(val.imag) > self.policy.imag_residue_tol:
            raise NotHermitian(f"expectation has imaginary part {val.imag:.3e}")
        return val.real


def embed(op, subset: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Lift an operator on the parties in ``subset`` (ascending) to the full space.

    Identity acts on every other party.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    subset = list(subset)
    if subset != sorted(set(subset)) or not subset or subset[0] < 0 or subset[-1] >= n:
        raise BadSubset(f"subset {subset} must be strictly increasing within 0..{n - 1}")
    rest = [i for i in range(n) if i not in subset]
    sub_dims = [dims[i] for i in subset]
    rest_dims = [dims[i] for i in rest]
    op = np.asarray(op)
    if op.shape != (int(np.prod(sub_dims)),) * 2:
        raise BadDimension(f"operator shape {op.shape} does not match subset dims {sub_dims}")
    full = np.kron(op, np.eye(int(np.prod(rest_dims)), dtype=complex))
    order = subset + rest  # party held by each axis of `full`
    t = full.reshape([dims[p] for p in order] * 2)
    perm = [order.index(p) for p in range(n)]
    t = t.transpose(perm + [n + q for q in perm])
    total = int(np.prod(dims))
    return t.reshape(total, total)
