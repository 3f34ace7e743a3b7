"""Numeric tolerances used across the package, kept in one place."""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class NumericPolicy:
    hermitian_tol: float = 1e-12  # max |rho - rho^dagger| for a density matrix
    eig_hermitian_tol: float = 1e-10  # symmetry required by herm_eig
    trace_tol: float = 1e-12
    psd_tol: float = 1e-10  # eigenvalues above -psd_tol count as nonnegative
    singular_floor: float = 1e-12  # relative to the largest eigenvalue
    rank_floor: float = 1e-9  # relative; strict positivity for normal forms
    imag_residue_tol: float = 1e-10  # expectation values of Hermitian observables
    orthogonal_tol: float = 1e-10
    loo_tol: float = 1e-12
    nf_tol: float = 1e-9  # Frobenius distance of reduced states from I/d
    nf_max_sweeps: int = 500
    nf_bloch_tol: float = 1e-6  # xi_values refuses inputs further from normal form
    random_epsilon: float = 1e-3  # identity admixture of random states

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_POLICY = NumericPolicy()
