"""SU(d) generator bases and local orthogonal observable (LOO) sets.

Generators are ordered as: symmetric off-diagonal pairs ``(j, k)`` with
``j < k`` in lexicographic order, then the antisymmetric pairs in the same
order, then the ``d - 1`` diagonal generators.  Correlation-tensor indices
follow this order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sepscan.errors import BadDimension, BadLoo, BadParameter, NotOrthogonal
from sepscan.policy import DEFAULT_POLICY


@dataclass(frozen=True)
class GeneratorBasis:
    """Traceless Hermitian generators with ``Tr(g_k g_l) = norm * delta_kl``."""

    dim: int
    norm: float
    generators: np.ndarray  # shape (d^2 - 1, d, d)

    def __len__(self) -> int:
        return self.generators.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.generators[k]

    def labels(self) -> list[str]:
        d = self.dim
        pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
        return [f"s{j}{k}" for j, k in pairs] + [f"a{j}{k}" for j, k in pairs] + [f"d{l}" for l in range(1, d)]


def gellmann(d: int, norm: float = 2.0) -> GeneratorBasis:
    """Generalized Gell-Mann matrices of dimension ``d``.

    With ``norm=2`` and ``d=2`` these are the Pauli matrices (x, y, z);
    ``norm=1`` gives the orthonormal versions.
    """
    if int(d) != d or d < 2:
        raise BadDimension(f"generator dimension must be an integer >= 2, got {d}")
    if not norm > 0:
        raise BadParameter(f"normalization constant must be positive, got {norm}")
    d = int(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    gens = []
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = g[k, j] = 1.0
        gens.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = -1j
        g[k, j] = 1j
        gens.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        gens.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    # constructed with Tr(g g) = 2
    out = np.array(gens) * np.sqrt(norm / 2.0)
    out.setflags(write=False)
    return GeneratorBasis(d, float(norm), out)


def pauli() -> GeneratorBasis:
    return gellmann(2, 2.0)


@dataclass(frozen=True)
class LooSet:
    """``d^2`` orthonormal Hermitian observables with ``G_0 = I / sqrt(d)``."""

    dim: int
    observables: np.ndarray  # shape (d^2, d, d)

    def __post_init__(self):
        validate_loos(self.dim, self.observables)

    def __len__(self) -> int:
        return self.observables.shape[0]

    def padded(self, n: int) -> np.ndarray:
        """Observables extended with zero matrices up to ``n^2`` entries."""
        d = self.dim
        if n < d:
            raise BadDimension(f"cannot pad a {d}-dim LOO set down to {n}")
        out = np.zeros((n * n, d, d), dtype=complex)
        out[: d * d] = self.observables
        return out

    def conj(self) -> "LooSet":
        """Entrywise complex conjugate; still a valid LOO set."""
        return LooSet(self.dim, self.observables.conj())


def validate_loos(d: int, obs: np.ndarray, tol: float = DEFAULT_POLICY.loo_tol) -> None:
    obs = np.asarray(obs)
    if obs.shape != (d * d, d, d):
        raise BadLoo(f"expected {d * d} observables of size {d}, got array of shape {obs.shape}")
    if np.max(np.abs(obs - obs.conj().transpose(0, 2, 1))) > tol:
        raise BadLoo("observables are not Hermitian")
    if np.max(np.abs(obs[0] - np.eye(d) / np.sqrt(d))) > tol:
        raise BadLoo("G_0 must equal I / sqrt(d)")
    gram = np.einsum("kij,lji->kl", obs, obs)
    err = np.max(np.abs(gram - np.eye(d * d)))
    if err > tol:
        raise BadLoo(f"observables are not orthonormal (Gram deviation {err:.3e})")


def loo_set(d: int) -> LooSet:
    """``I/sqrt(d)`` followed by the orthonormal Gell-Mann generators."""
    gens = gellmann(d, 1.0).generators
    obs = np.concatenate([np.eye(d, dtype=complex)[None] / np.sqrt(d), gens])
    return LooSet(int(d), obs)


def rotate_loos(s: LooSet, r, tol: float = DEFAULT_POLICY.orthogonal_tol) -> LooSet:
    """Mix the traceless observables by a real orthogonal matrix; ``G_0`` is kept.

    ``G'_k = sum_l r[k, l] G_l`` for ``k >= 1``.
    """
    r = np.asarray(r, dtype=float)
    n = s.dim**2 - 1
    if r.shape != (n, n):
        raise NotOrthogonal(f"rotation must be {n}x{n}, got {r.shape}")
    err = np.max(np.abs(r @ r.T - np.eye(n)))
    if err > tol:
        raise NotOrthogonal(f"matrix deviates from orthogonal by {err:.3e}")
    obs = s.observables.copy()
    obs[1:] = np.einsum("kl,lij->kij", r, s.observables[1:])
    return LooSet(s.dim, obs)
