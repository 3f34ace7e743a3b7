"""Filtering (SLOCC) normal form of strictly positive multipartite states.

The normal form is reached by cyclic sweeps over the parties.  Each step
whitens one reduced state: with ``r = Tr_rest(rho)`` the filter
``F = det(r)^(1/2d) r^(-1/2)`` (unit determinant) is applied to that party and
the trace renormalized, which makes that reduced state exactly ``I/d``.  Every
step is an exact coordinate minimization of

    f(t_1, ..., t_N) = Tr[rho (t_1 (x) ... (x) t_N)] / prod_i det(t_i)^(1/d_i)

over the party's factor ``t_i = F_i^dagger F_i``, so ``f`` never increases.
At the fixed point every single-party Bloch vector vanishes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from sepscan.bloch import correlation_matrix, local_bloch
from sepscan.errors import NoConvergence, NotFullRank, NotNormalForm, SingularMatrix, SingularReduction
from sepscan.linalg import DensityMatrix, embed, herm_eig, herm_power, kron, partial_trace
from sepscan.policy import DEFAULT_POLICY, NumericPolicy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalFormResult:
    nf: DensityMatrix
    filters: list[np.ndarray]
    iterations: int
    converged: bool
    objective_trace: list[float] = field(default_factory=list)
    residual: float = float("nan")
    tol: float = DEFAULT_POLICY.nf_tol

    def require_converged(self) -> "NormalFormResult":
        if not self.converged:
            raise NoConvergence(
                f"normal form did not converge in {self.iterations} sweeps (residual {self.residual:.3e})", self
            )
        return self

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "tol": self.tol,
            "objective_initial": self.objective_trace[0] if self.objective_trace else None,
            "objective_final": self.objective_trace[-1] if self.objective_trace else None,
        }


def objective_f(rho: DensityMatrix, taus, policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Filtering objective ``Tr[rho (t_1 (x) ... (x) t_N)] / prod det(t_i)^(1/d_i)``."""
    taus = [np.asarray(t, dtype=complex) for t in taus]
    if len(taus) != rho.n_parties:
        raise ValueError(f"need {rho.n_parties} factors, got {len(taus)}")
    log_denominator = 0.0
    for t, d in zip(taus, rho.dims):
        if t.shape != (d, d):
            raise ValueError(f"factor of shape {t.shape} for party of dimension {d}")
        evals, _ = herm_eig(t, policy.eig_hermitian_tol)
        if evals[0] <= policy.singular_floor * max(evals[-1], 0.0) or evals[-1] <= 0:
            raise SingularMatrix(f"factor is not positive definite (min eigenvalue {evals[0]:.3e})")
        log_denominator += np.sum(np.log(evals)) / d
    num = rho.expect(kron(*taus))
    return float(num * np.exp(-log_denominator))


def _whitening_filter(reduced: np.ndarray, party: int, policy: NumericPolicy) -> np.ndarray:
    evals, _ = herm_eig(reduced, policy.eig_hermitian_tol)
    if evals[0] <= policy.singular_floor * evals[-1]:
        raise SingularReduction(party, float(evals[0]))
    d = reduced.shape[0]
    det_factor = np.exp(np.sum(np.log(evals)) / (2 * d))
    return det_factor * herm_power(reduced, -0.5, policy)


def apply_filters(rho: DensityMatrix, filters) -> DensityMatrix:
    """``(F_1 (x) ... (x) F_N) rho (...)^dagger``, renormalized to unit trace."""
    k = kron(*filters)
    return DensityMatrix.normalized(k @ rho.mat @ k.conj().T, rho.dims, rho.policy)


def filter_once(rho: DensityMatrix, party: int, policy: NumericPolicy | None = None) -> tuple[DensityMatrix, np.ndarray]:
    """Whiten the reduced state of one party; returns the new state and the filter used."""
    policy = policy or rho.policy
    reduced = partial_trace(rho.mat, rho.dims, [party])
    f = _whitening_filter(reduced, party, policy)
    k = embed(f, [party], rho.dims)
    return DensityMatrix.normalized(k @ rho.mat @ k.conj().T, rho.dims, rho.policy), f


def _residual(rho: DensityMatrix) -> float:
    worst = 0.0
    for p, d in enumerate(rho.dims):
        red = partial_trace(rho.mat, rho.dims, [p])
        worst = max(worst, float(np.linalg.norm(red - np.eye(d) / d)))
    return worst


def normal_form(
    rho: DensityMatrix,
    tol: float | None = None,
    max_sweeps: int | None = None,
    policy: NumericPolicy | None = None,
) -> NormalFormResult:
    """Bring a strictly positive state to its filtering normal form.

    Returns a result with ``converged=False`` (and the last iterate) when
    ``max_sweeps`` is exhausted; call :meth:`NormalFormResult.require_converged`
    to turn that into :class:`NoConvergence`.

    Raises
    ------
    NotFullRank
        If the smallest eigenvalue is not above ``rank_floor`` times the largest.
    """
    policy = policy or rho.policy
    tol = policy.nf_tol if tol is None else tol
    max_sweeps = policy.nf_max_sweeps if max_sweeps is None else max_sweeps
    evals = rho.eigvals()
    if evals[0] <= policy.rank_floor * evals[-1]:
        raise NotFullRank(f"state is not strictly positive (min eigenvalue {evals[0]:.3e})")

    filters = [np.eye(d, dtype=complex) for d in rho.dims]
    current = rho
    objective = [objective_f(rho, [f.conj().T @ f for f in filters], policy)]
    residual = _residual(current)
    sweeps = 0
    while residual >= tol and sweeps < max_sweeps:
        for p in range(rho.n_parties):
            current, f = filter_once(current, p, policy)
            filters[p] = f @ filters[p]
        sweeps += 1
        objective.append(objective_f(rho, [f.conj().T @ f for f in filters], policy))
        residual = _residual(current)
    converged = residual < tol
    if not converged:
        log.warning("normal form stopped after %d sweeps with residual %.3e", sweeps, residual)
    return NormalFormResult(current, filters, sweeps, converged, objective, residual, tol)


def xi_values(nf: DensityMatrix, policy: NumericPolicy | None = None) -> np.ndarray:
    """Descending singular values of the correlation matrix of a bipartite normal form."""
    policy = policy or nf.policy
    worst = max(float(np.linalg.norm(local_bloch(nf, p).v)) for p in range(nf.n_parties))
    if worst > policy.nf_bloch_tol:
        raise NotNormalForm(f"local Bloch vectors do not vanish (largest norm {worst:.3e})")
    return np.linalg.svd(correlation_matrix(nf).t, compute_uv=False)
