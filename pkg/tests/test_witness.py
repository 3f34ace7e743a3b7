import math

import numpy as np
import pytest

import oracles
from conftest import separable_seeds
from sepscan import states
from sepscan.basis import loo_set, rotate_loos
from sepscan.criteria import cm_bipartite
from sepscan.errors import BadLoo, BadSubset, DimMismatch, NotDetected
from sepscan.linalg import random_orthogonal
from sepscan.witness import (
    bipartite_alpha,
    bipartite_witness,
    canonical_bipartite,
    canonical_multipartite,
    expectation,
    min_eig,
    multipartite_beta,
    multipartite_witness,
    witness_from_state,
)


def _detection_value(rho):
    m, n = rho.dims
    s = math.sqrt((m - 1) * (n - 1))
    return (math.sqrt(m * n) * s - cm_bipartite(rho).statistic) / (math.sqrt(m * n) * (s + 1))


def test_alpha_beta():
    assert bipartite_alpha(2, 2) == 1
    assert bipartite_alpha(2, 3) == pytest.approx(math.sqrt(6) / (math.sqrt(2) + 1))
    assert multipartite_beta((2, 2, 2)) == pytest.approx(math.sqrt(2))
    assert multipartite_beta((2, 2)) == pytest.approx(bipartite_alpha(2, 2))


def test_two_qubit_pauli_witness():
    w = bipartite_witness(loo_set(2), loo_set(2))
    assert w.coefficient == 1
    assert np.trace(w.mat).real == pytest.approx(2)
    assert expectation(w, states.maximally_mixed((2, 2))) == pytest.approx(1 - 1 / 2)
    # plain Pauli pairing: I/2 - (xx + yy + zz)/2 has spectrum {0, 0, 0, 2}
    assert np.allclose(oracles.hermitian_eigvals(w.mat), [0, 0, 0, 2], atol=1e-12)
    # pairing with the conjugate set flips yy and gives a genuine witness
    w2 = bipartite_witness(loo_set(2), loo_set(2).conj())
    assert min_eig(w2) == pytest.approx(-1)


def test_witness_needs_valid_loos():
    with pytest.raises(BadLoo):
        bipartite_witness(loo_set(2).observables, loo_set(2))


def test_witness_from_state_examples():
    bell = states.bell()
    assert expectation(witness_from_state(bell), bell) == pytest.approx(-1)
    iso = states.isotropic(2, 0.5)
    assert expectation(witness_from_state(iso), iso) == pytest.approx(-0.25)
    with pytest.raises(NotDetected):
        witness_from_state(states.random_separable((2, 2), 4, 0))


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (3, 2)])
def test_detection_identity(dims):
    candidates = [states.mix_noise(states.max_entangled(*dims), p) for p in (0.6, 0.8, 1.0)]
    candidates += [states.random_full_rank(dims, seed) for seed in range(200)]
    detected = [rho for rho in candidates if cm_bipartite(rho).detected]
    assert len(detected) >= 3
    for rho in detected:
        assert abs(expectation(witness_from_state(rho), rho) - _detection_value(rho)) < 1e-10


def test_canonical_bipartite_has_negative_eigenvalue():
    for m, n in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]:
        w = canonical_bipartite(m, n)
        assert w.min_eigenvalue < 0
        assert expectation(w, states.max_entangled(m, n)) < 0


def test_three_qubit_witness():
    w = canonical_multipartite((2, 2, 2))
    assert w.coefficient == pytest.approx(math.sqrt(2))
    assert min_eig(w) == pytest.approx((1 - math.sqrt(3)) / 2, abs=1e-12)
    assert oracles.hermitian_eigvals(w.mat)[0] == pytest.approx((1 - math.sqrt(3)) / 2, abs=1e-12)
    # explicit form I/2 - (xxx + yyy + zzz)/2
    ops = [oracles.kron_all([oracles.PAULI[k]] * 3) for k in "xyz"]
    assert np.allclose(w.mat, np.eye(8) / 2 - sum(ops) / 2)
    assert expectation(w, states.ghz(3)) == pytest.approx(0, abs=1e-14)


def test_subset_witness_embedding():
    w = canonical_multipartite((2, 2, 2), (0, 2))
    two = canonical_multipartite((2, 2))
    # acting on parties 0 and 2 with identity on party 1
    swap12 = np.eye(8)[[0, 2, 1, 3, 4, 6, 5, 7]]
    assert np.allclose(swap12 @ w.mat @ swap12.T, np.kron(two.mat, np.eye(2)))
    with pytest.raises(BadSubset):
        multipartite_witness((0,), [loo_set(2)], (2, 2))
    with pytest.raises(BadLoo):
        multipartite_witness((0, 1), [loo_set(2), loo_set(3)], (2, 2))


def test_mixed_dimension_multipartite_witness():
    w = canonical_multipartite((2, 3, 2))
    assert w.mat.shape == (12, 12)
    assert w.coefficient == pytest.approx(math.sqrt(12) / (1 + math.sqrt(2)))


def test_expectation_dims():
    with pytest.raises(DimMismatch):
        expectation(canonical_multipartite((2, 2, 2)), states.bell())


def test_min_eig_scales():
    w = canonical_multipartite((2, 2, 2))
    scaled = type(w)(3 * w.mat, w.coefficient, "", w.subset, w.full_dims, 0.0)
    assert min_eig(scaled) == pytest.approx(3 * min_eig(w))


def test_rotated_canonical_witness_stays_negative(rng):
    a, b = loo_set(2), loo_set(2).conj()
    for _ in range(50):
        r = random_orthogonal(3, rng)
        assert min_eig(bipartite_witness(rotate_loos(a, r), rotate_loos(b, r))) < 0


WITNESS_PROFILES = {
    (2, 2): lambda: [canonical_bipartite(2, 2), canonical_multipartite((2, 2))],
    (2, 3): lambda: [canonical_bipartite(2, 3), canonical_multipartite((2, 3))],
    (3, 3): lambda: [canonical_bipartite(3, 3), canonical_multipartite((3, 3))],
    (2, 2, 2): lambda: [canonical_multipartite((2, 2, 2), s) for s in [(0, 1), (0, 2), (1, 2), (0, 1, 2)]],
}


@pytest.mark.parametrize("dims", list(WITNESS_PROFILES))
def test_separable_nonnegativity(dims, rng):
    witnesses = WITNESS_PROFILES[dims]()
    if len(dims) == 2:
        m, n = dims
        for _ in range(5):
            a = rotate_loos(loo_set(m), random_orthogonal(m * m - 1, rng))
            b = rotate_loos(loo_set(n), random_orthogonal(n * n - 1, rng))
            witnesses.append(bipartite_witness(a, b))
    for terms, seed in separable_seeds(dims, 200, offset=500):
        rho = states.random_separable(dims, terms, seed)
        for w in witnesses:
            assert expectation(w, rho) >= -1e-9


def test_multipartite_witness_on_pure_products():
    # the extreme points of the separable set, where the bound is tightest
    w = canonical_multipartite((3, 3, 3))
    rng = np.random.default_rng(5)
    worst = np.inf
    for _ in range(300):
        vecs = [states.random_pure_vector(3, rng) for _ in range(3)]
        psi = oracles.kron_all([v[:, None] for v in vecs]).ravel()
        worst = min(worst, np.vdot(psi, w.mat @ psi).real)
    assert worst >= -1e-9
