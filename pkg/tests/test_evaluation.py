"""Tests for the Amari index and the decomposition report."""
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from icageo import (Dataset, DecompositionReport, DegenerateGain, Rng,
                    SourceSpec, amari_index, diagnose)

UNIFORM_NEGENT = 0.1764852083106725
LAPLACE_NEGENT = 0.07236494292469997
GAUSS_MI_RHO_HALF = 0.14384103622589045


# -- amari index -----------------------------------------------------------------

def test_amari_zero_exactly_on_scaled_permutations():
    assert amari_index(np.eye(3)).value == 0.0
    perm = np.array([[0.0, 2.0, 0.0], [0.0, 0.0, -0.5], [3.0, 0.0, 0.0]])
    assert amari_index(perm).value == 0.0


def test_amari_one_at_maximal_mixing():
    assert amari_index(np.ones((4, 4))).value == pytest.approx(1.0)
    signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert amari_index(signs).value == pytest.approx(1.0)


def test_amari_bounds_and_monotonicity():
    gen = np.random.default_rng(0)
    for _ in range(50):
        g = gen.standard_normal((3, 3)) + 2 * np.eye(3)
        v = amari_index(g).value
        assert 0.0 <= v <= 1.0
    # shrinking the off-diagonal leakage shrinks the index
    base = np.eye(2)
    prev = 0.0
    for eps in (0.0, 0.1, 0.3, 0.6):
        v = amari_index(base + eps * (np.ones((2, 2)) - np.eye(2))).value
        assert v >= prev
        prev = v


def test_amari_invariances_that_hold_exactly():
    g = np.array([[2.0, 0.3, -0.1], [0.4, 1.5, 0.2], [-0.3, 0.1, 1.8]])
    base = amari_index(g).value
    # global scaling
    assert_allclose(amari_index(5.0 * g).value, base, rtol=0, atol=1e-15)
    # row and column permutations
    p = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    assert_allclose(amari_index(p @ g).value, base, rtol=0, atol=1e-15)
    assert_allclose(amari_index(g @ p).value, base, rtol=0, atol=1e-15)
    # sign flips per channel
    d = np.diag([1.0, -1.0, -1.0])
    assert_allclose(amari_index(d @ g @ d).value, base, rtol=0, atol=1e-15)


def test_amari_rejects_degenerate_gains():
    with pytest.raises(DegenerateGain):
        amari_index(np.array([[1.0]]))  # too small
    with pytest.raises(DegenerateGain):
        amari_index(np.ones((2, 3)))  # not square
    with pytest.raises(DegenerateGain):
        amari_index(np.array([[1.0, 0.0], [np.nan, 1.0]]))
    with pytest.raises(DegenerateGain):
        amari_index(np.array([[0.0, 0.0], [1.0, 1.0]]))  # zero row


def test_amari_keeps_the_gain_matrix():
    g = np.array([[1.0, 0.2], [0.1, 1.0]])
    idx = amari_index(g)
    assert_allclose(idx.gain, g)
    with pytest.raises(ValueError):
        idx.gain[0, 0] = 9.0  # frozen


# -- diagnose ----------------------------------------------------------------------

def test_diagnose_independent_sources():
    gen = Rng(3).generator()
    x = np.column_stack([SourceSpec("uniform").sample(gen, 100000),
                         SourceSpec("laplace").sample(gen, 100000)])
    report = diagnose(Dataset(x))
    assert abs(report.correlation) < 1e-3
    gu, gl = (g.value for g in report.marginal_negentropies)
    assert abs(gu - UNIFORM_NEGENT) < 0.02
    assert abs(gl - LAPLACE_NEGENT) < 0.02
    assert report.mi is not None and abs(report.mi.raw) < 0.02
    assert_allclose(report.objective_proxy,
                    report.correlation - gu - gl, rtol=0, atol=1e-15)
    assert report.identity_residual is None


def test_diagnose_correlated_gaussian():
    gen = np.random.default_rng(8)
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    x = gen.multivariate_normal(np.zeros(2), cov, size=100000)
    report = diagnose(Dataset(x))
    assert abs(report.correlation - GAUSS_MI_RHO_HALF) < 0.01
    assert abs(report.mi.value - GAUSS_MI_RHO_HALF) < 0.02
    for g in report.marginal_negentropies:
        assert abs(g.value) < 0.02


def test_diagnose_skips_mi_beyond_three_channels():
    gen = np.random.default_rng(1)
    report = diagnose(Dataset(gen.standard_normal((5000, 4))))
    assert report.mi is None
    assert len(report.marginal_negentropies) == 4
    doc = report.to_json()
    assert "mi" not in doc and "identity_residual" not in doc


def test_diagnose_json_keys():
    gen = np.random.default_rng(5)
    report = diagnose(Dataset(gen.standard_normal((20000, 2))))
    doc = report.to_json()
    assert {"correlation", "marginal_negentropies", "objective_proxy",
            "mi", "mi_raw", "mi_method",
            "near_deterministic_dependence"} <= set(doc)
    assert len(doc["marginal_negentropies"]) == 2
    json.dumps(doc)


def test_diagnose_white_laplace_pair_and_rotation():
    gen = Rng(21).generator()
    lap = SourceSpec("laplace")
    s = np.column_stack([lap.sample(gen, 100000), lap.sample(gen, 100000)])
    before = diagnose(Dataset(s))
    sum_g = sum(g.value for g in before.marginal_negentropies)
    assert abs(before.correlation) < 0.005
    assert abs(sum_g - 2 * LAPLACE_NEGENT) < 0.04
    assert before.mi.value < 0.02
    # a 45-degree rotation moves non-Gaussianity into mutual information
    # but their sum is a linear invariant
    r = np.sqrt(0.5) * np.array([[1.0, -1.0], [1.0, 1.0]])
    after = diagnose(Dataset(s @ r.T))
    assert abs(after.correlation) < 0.005  # rotation preserves whiteness
    total_before = before.mi.value + sum_g
    total_after = after.mi.value + sum(g.value
                                       for g in after.marginal_negentropies)
    assert abs(total_after - total_before) < 0.04


def test_diagnose_permutation_equivariance():
    gen = Rng(33).generator()
    x = np.column_stack([SourceSpec("uniform").sample(gen, 20000),
                         SourceSpec("laplace").sample(gen, 20000)])
    fwd = diagnose(Dataset(x))
    rev = diagnose(Dataset(x[:, ::-1]))
    # equal up to factorization round-off in the log-determinant
    assert rev.correlation == pytest.approx(fwd.correlation, abs=1e-12)
    assert [g.value for g in rev.marginal_negentropies] == \
        [g.value for g in fwd.marginal_negentropies][::-1]
    # continuous draws have no ties, so no jitter: MI is exactly symmetric
    assert rev.mi.raw == pytest.approx(fwd.mi.raw, abs=1e-12)


def test_diagnose_center_flag_removes_mean_effects():
    gen = np.random.default_rng(9)
    x = gen.standard_normal((50000, 2)) + np.array([5.0, -3.0])
    raw = diagnose(Dataset(x))
    centered = diagnose(Dataset(x), center=True)
    # the uncentered second moment sees the means as strong correlation
    assert raw.correlation > 10 * max(centered.correlation, 1e-12)
    assert abs(centered.correlation) < 1e-3
