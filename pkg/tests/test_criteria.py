import math

import numpy as np
import pytest

import oracles
from conftest import separable_seeds
from sepscan import criteria, states
from sepscan.basis import loo_set, rotate_loos
from sepscan.criteria import (
    CriterionVerdict,
    cm_all_subsets,
    cm_bipartite,
    cm_general,
    evaluate,
    lur_check,
    lur_nf_bound_check,
    lur_value,
    ppt_check,
    realignment_check,
    scan_threshold,
)
from sepscan.errors import BadParameter, BadSubset, NoSignChange, NotFullRank
from sepscan.linalg import random_orthogonal
from sepscan.normalform import normal_form


def test_verdict_detection_is_strict():
    assert not CriterionVerdict("x", 1.0, 1.0).detected
    v = CriterionVerdict("x", 1.5, 1.0)
    assert v.detected and v.margin == 0.5
    assert v.to_dict()["detected"] is True


def test_cm_examples():
    v = cm_bipartite(states.maximally_mixed((2, 2)))
    assert v.statistic == pytest.approx(0) and v.bound == 2 and not v.detected
    v = cm_bipartite(states.bell())
    assert v.statistic == pytest.approx(6) and v.detected
    assert cm_bipartite(states.isotropic(2, 0.34)).statistic == pytest.approx(2.04)
    assert cm_bipartite(states.isotropic(2, 0.34)).detected
    assert not cm_bipartite(states.isotropic(2, 0.33)).detected


def test_cm_nf_requires_full_rank():
    with pytest.raises(NotFullRank):
        cm_bipartite(states.bell(), use_nf=True)


def test_cm_requires_bipartite():
    with pytest.raises(BadSubset):
        cm_bipartite(states.ghz(3))


def test_gcm_examples():
    v = cm_general(states.ghz(3), (0, 1, 2))
    assert v.statistic == pytest.approx(2 * math.sqrt(2)) and v.bound == pytest.approx(1) and v.detected
    for s in [(0, 1), (0, 2), (1, 2), (0, 1, 2)]:
        v = cm_general(states.maximally_mixed((2, 2, 2)), s)
        assert v.statistic == pytest.approx(0) and not v.detected
    with pytest.raises(BadSubset):
        cm_general(states.ghz(3), (0,))


def test_gcm_bound_formula():
    assert criteria.gcm_bound((2, 2, 2)) == pytest.approx(1.0)
    assert criteria.gcm_bound((3, 3)) == pytest.approx(math.sqrt(36 / 4))
    assert criteria.gcm_bound((2, 3, 4)) == pytest.approx(math.sqrt(2 * 6 * 12 / 8))


def test_gcm_acin_threshold_window():
    fam = states.acin_family()
    assert any(v.detected for v in cm_all_subsets(fam(0.928)))
    assert not any(v.detected for v in cm_all_subsets(fam(0.927)))


def test_all_subsets():
    verdicts = cm_all_subsets(states.ghz(3))
    assert [v.subset for v in verdicts] == [(0, 1), (0, 2), (1, 2), (0, 1, 2)]
    assert [v.detected for v in verdicts] == [False, False, False, True]
    assert not any(v.detected for v in cm_all_subsets(states.random_product((2, 2, 2), 1)))


def test_lur_maximally_mixed_with_pauli_loos():
    rho = states.maximally_mixed((2, 2))
    assert lur_value(rho, loo_set(2), loo_set(2)) == pytest.approx(0.5)
    assert not lur_check(rho, loo_set(2), loo_set(2)).detected


def test_lur_literal_formula(rng):
    rho = states.random_full_rank((2, 3), 4)
    ga, gb = loo_set(2).padded(3), loo_set(3).observables
    total = 1.0
    for a, b in zip(ga, gb):
        corr = np.trace(rho.mat @ np.kron(a, b)).real
        diff = np.trace(rho.mat @ (np.kron(a, np.eye(3)) - np.kron(np.eye(2), b))).real
        total -= corr + 0.5 * diff**2
    assert lur_value(rho, loo_set(2), loo_set(3)) == pytest.approx(total, abs=1e-13)


def test_lur_bell_detected():
    v = lur_check(states.bell())
    assert v.detected and v.statistic == pytest.approx(1.0)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_lur_separables_with_random_loos(dims, rng):
    for terms, seed in separable_seeds(dims, 50):
        rho = states.random_separable(dims, terms, seed)
        a = rotate_loos(loo_set(dims[0]), random_orthogonal(dims[0] ** 2 - 1, rng))
        b = rotate_loos(loo_set(dims[1]), random_orthogonal(dims[1] ** 2 - 1, rng))
        assert lur_value(rho, a, b) >= -1e-9


def test_lur_nf_bounds():
    cm, lur, tighter = lur_nf_bound_check(2, 2)
    assert cm == 2 and lur == 2 and not tighter
    cm, lur, tighter = lur_nf_bound_check(2, 3)
    assert cm == pytest.approx(math.sqrt(12)) and lur == 3.5 and tighter
    for m in range(2, 13):
        for n in range(m, 13):
            cm, lur, tighter = lur_nf_bound_check(m, n)
            assert cm <= lur
            # lur^2 - cm^2 = (M - N)^2 / 4, so the bounds coincide exactly when M == N
            assert tighter == (m != n)
            assert lur**2 - cm**2 == pytest.approx((m - n) ** 2 / 4, abs=1e-9)
    with pytest.raises(BadParameter):
        lur_nf_bound_check(3, 2)


def test_lur_nf_statistic_matches_xi_identity():
    # on a normal form with SVD-adapted LOOs: LHS = 1 - sum(xi)/MN - (1/M + 1/N)/2
    rho = states.random_full_rank((2, 3), 12)
    nf = normal_form(rho).nf
    from sepscan.normalform import xi_values

    lhs = -lur_check(nf).statistic
    assert lhs == pytest.approx(1 - xi_values(nf).sum() / 6 - 0.5 * (1 / 2 + 1 / 3), abs=1e-9)


def test_ppt_examples():
    v = ppt_check(states.bell())
    assert v.statistic == pytest.approx(0.5) and v.detected
    acin = states.acin_edge(2, 3, 0.6)
    assert not any(ppt_check(acin, p).detected for p in range(3))
    assert not ppt_check(states.random_separable((2, 3), 6, 0)).detected
    with pytest.raises(BadSubset):
        ppt_check(acin, 3)


def test_realignment_examples():
    mixed = states.maximally_mixed((2, 3))
    v = realignment_check(mixed)
    assert v.statistic == pytest.approx(1 / math.sqrt(6)) and not v.detected
    assert realignment_check(states.bell()).statistic == pytest.approx(2)
    for seed in range(20):
        assert realignment_check(states.random_product((2, 3), seed)).statistic <= 1 + 1e-12
    with pytest.raises(BadSubset):
        realignment_check(states.ghz(3))


def test_evaluate_selection():
    names = [v.criterion for v in evaluate(states.bell())]
    assert names == ["cm", "gcm", "lur", "ppt", "ccnr"]
    names = [v.criterion for v in evaluate(states.ghz(3))]
    assert names == ["gcm"] * 4 + ["ppt"] * 3
    with pytest.raises(BadParameter):
        evaluate(states.bell(), "bogus")


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_bridge(dims):
    for seed in range(20):
        rho = states.random_full_rank(dims, seed)
        a, b = cm_bipartite(rho), cm_general(rho, (0, 1))
        assert a.detected == b.detected
        assert b.statistic == pytest.approx(a.statistic / 2, abs=1e-10)
        assert b.bound == pytest.approx(a.bound / 2, abs=1e-10)


def test_soundness_small():
    for dims in [(2, 2), (2, 3), (3, 3), (2, 2, 2)]:
        for terms, seed in separable_seeds(dims, 20, offset=1000):
            rho = states.random_separable(dims, terms, seed)
            assert not any(v.detected for v in evaluate(rho))


def test_ppt_verdicts_unchanged_by_normal_form():
    for seed in range(25):
        for dims in [(2, 2), (2, 3)]:
            rho = states.random_full_rank(dims, seed)
            assert ppt_check(rho).detected == ppt_check(rho, use_nf=True).detected


def test_scan_isotropic():
    p = scan_threshold(lambda p: states.isotropic(2, p), "cm", tol=1e-5)
    assert p == pytest.approx(1 / 3, abs=1e-4)


def test_scan_acin_improves_with_normal_form():
    fam = states.acin_family()
    plain = scan_threshold(fam, "gcm", False, 0.8, 1.0, 1e-4)
    nf = scan_threshold(fam, "gcm", True, 0.8, 0.9999, 1e-4)
    assert nf <= plain + 1e-6
    assert plain == pytest.approx(0.92744, abs=5e-4)
    assert nf == pytest.approx(0.90285, abs=5e-4)


def test_scan_errors():
    fam = lambda p: states.isotropic(2, p)  # noqa: E731
    with pytest.raises(NoSignChange):
        scan_threshold(fam, "cm", p_lo=0.0, p_hi=0.2)
    with pytest.raises(NoSignChange):
        scan_threshold(fam, "cm", p_lo=0.5, p_hi=1.0)
    with pytest.raises(BadParameter):
        scan_threshold(fam, "cm", p_lo=0.5, p_hi=0.5)


def test_isotropic_threshold_from_oracle():
    # closed form from the oracle correlation matrix: ||T||_KF = 6p, bound 2
    t = oracles.correlation_tensor(states.isotropic(2, 1.0).mat, (2, 2), [0, 1], norm=1.0)
    slope = oracles.trace_norm(t)
    assert slope == pytest.approx(6.0, abs=1e-12)
    assert 2 / slope == pytest.approx(1 / 3)
