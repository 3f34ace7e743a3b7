"""Benchmark states.

Random families draw from ``numpy.random.default_rng(seed)`` (the PCG64
generator), so a given seed always yields the same matrix.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from sepscan.errors import BadDimension, BadParameter
from sepscan.linalg import DensityMatrix, kron
from sepscan.policy import DEFAULT_POLICY

ACIN_DEFAULT = (2.0, 3.0, 0.6)


def _dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise BadDimension(f"dimensions must all be >= 2, got {dims}")
    return dims


def pure(psi, dims: Sequence[int]) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    return DensityMatrix.normalized(np.outer(psi, psi.conj()), _dims(dims))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    dims = _dims(dims)
    total = int(np.prod(dims))
    return DensityMatrix(dims, np.eye(total, dtype=complex) / total)


def acin_edge(a: float, b: float, c: float) -> DensityMatrix:
    """Three-qubit PPT entangled edge state, normalized by its trace.

    Basis order is ``|000>, |001>, ..., |111>``; the unnormalized matrix has
    ones on the four corners and diagonal ``(1, a, b, c, 1/c, 1/b, 1/a, 1)``.
    """
    if not (a > 0 and b > 0 and c > 0):
        raise BadParameter(f"edge-state parameters must be positive, got {(a, b, c)}")
    m = np.diag([1.0, a, b, c, 1 / c, 1 / b, 1 / a, 1.0]).astype(complex)
    m[0, 7] = m[7, 0] = 1.0
    return DensityMatrix.normalized(m, (2, 2, 2))


def mix_noise(rho: DensityMatrix, p: float) -> DensityMatrix:
    """``p rho + (1 - p) I / D``."""
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"noise weight must lie in [0, 1], got {p}")
    return DensityMatrix.normalized(p * rho.mat + (1 - p) * np.eye(rho.dim) / rho.dim, rho.dims)


def acin_family(a: float = 2.0, b: float = 3.0, c: float = 0.6):
    base = acin_edge(a, b, c)
    return lambda p: mix_noise(base, p)


def bell() -> DensityMatrix:
    """``|Phi+> = (|00> + |11>) / sqrt(2)``."""
    return pure([1, 0, 0, 1], (2, 2))


def ghz(n: int = 3) -> DensityMatrix:
    if n < 2:
        raise BadParameter("GHZ state needs at least 2 parties")
    psi = np.zeros(2**n)
    psi[0] = psi[-1] = 1.0
    return pure(psi, (2,) * n)


def max_entangled(m: int, n: int | None = None) -> DensityMatrix:
    """``sum_{i < min(m, n)} |ii> / sqrt(min(m, n))`` on ``m (x) n``."""
    n = m if n is None else n
    dims = _dims((m, n))
    psi = np.zeros(m * n)
    for i in range(min(m, n)):
        psi[i * n + i] = 1.0
    return pure(psi, dims)


def isotropic(d: int, p: float) -> DensityMatrix:
    """``p |Phi+><Phi+| + (1 - p) I / d^2`` on ``d (x) d``; separable iff ``p <= 1/(d+1)``."""
    return mix_noise(max_entangled(d), p)


def product(*states: DensityMatrix) -> DensityMatrix:
    if not states:
        raise BadParameter("product needs at least one factor")
    dims = tuple(d for s in states for d in s.dims)
    return DensityMatrix.normalized(kron(*(s.mat for s in states)), dims)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_full_rank(dims: Sequence[int], seed=None, epsilon: float = DEFAULT_POLICY.random_epsilon) -> DensityMatrix:
    """``G G^dagger / Tr`` for complex Ginibre ``G``, mixed with ``epsilon I / D``."""
    dims = _dims(dims)
    total = int(np.prod(dims))
    g = _ginibre(_rng(seed), total, total)
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix.normalized((1 - epsilon) * rho + epsilon * np.eye(total) / total, dims)


def random_pure_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = _ginibre(rng, d, 1).ravel()
    return v / np.linalg.norm(v)


def random_product(dims: Sequence[int], seed=None) -> DensityMatrix:
    """Product of independent full-rank random single-party states."""
    dims = _dims(dims)
    rng = _rng(seed)
    factors = []
    for d in dims:
        g = _ginibre(rng, d, d)
        r = g @ g.conj().T
        factors.append(DensityMatrix.normalized(r, (d,)))
    return product(*factors)


def random_separable(dims: Sequence[int], terms: int, seed=None, epsilon: float = DEFAULT_POLICY.random_epsilon) -> DensityMatrix:
    """Uniform mixture of ``terms`` random pure product states plus ``epsilon I / D``."""
    dims = _dims(dims)
    if terms < 1:
        raise BadParameter("a separable mixture needs at least one term")
    rng = _rng(seed)
    total = int(np.prod(dims))
    acc = np.zeros((total, total), dtype=complex)
    for _ in range(terms):
        psi = kron(*(random_pure_vector(d, rng)[:, None] for d in dims)).ravel()
        acc += np.outer(psi, psi.conj())
    acc /= terms
    return DensityMatrix.normalized((1 - epsilon) * acc + epsilon * np.eye(total) / total, dims)


FAMILY_NAMES = ("acin", "bell", "ghz", "isotropic", "mixed", "product", "random", "separable")


def family(name: str, *, a: float = 2.0, b: float = 3.0, c: float = 0.6, d: int = 2, n: int = 3,
           dims: Sequence[int] | None = None, terms: int | None = None, seed=0):
    """One-parameter family ``p -> state`` by name.

    ``isotropic`` uses ``p`` as its entangled weight; every other family is
    ``mix_noise(base, p)``.  ``dims`` defaults to ``(2, 2)`` for the random
    families and ``terms`` to the total dimension.
    """
    if name == "isotropic":
        return lambda p: isotropic(d, p)
    if name == "acin":
        base = acin_edge(a, b, c)
    elif name == "bell":
        base = bell()
    elif name == "ghz":
        base = ghz(n)
    else:
        dd = _dims(dims or (2, 2))
        if name == "mixed":
            base = maximally_mixed(dd)
        elif name == "product":
            base = random_product(dd, seed)
        elif name == "random":
            base = random_full_rank(dd, seed)
        elif name == "separable":
            base = random_separable(dd, terms or int(np.prod(dd)), seed)
        else:
            raise BadParameter(f"unknown family {name!r}; choose from {FAMILY_NAMES}")
    return lambda p: mix_noise(base, p)
