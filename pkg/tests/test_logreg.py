import numpy as np
import pytest

from seqn import accuracy, make_l1_logreg, make_synthetic_logreg, nnz
from seqn.dataio import parse_libsvm
from seqn.logreg import LogRegProblem, logreg_gradient
from seqn.oracles import full_gradient
from seqn.prox import soft_threshold


def _rng(seed=0):
    return np.random.default_rng(np.random.Philox(seed))


def _small_problem(seed=1, n_rows=20, n_feat=6):
    ds = make_synthetic_logreg(n_rows, n_feat, seed=seed, support=min(4, n_feat),
                               p_support=0.6, val_top=1.2, val_decay=2.0)
    return LogRegProblem(ds)


def test_component_value_nonnegative():
    prob = _small_problem()
    rng = _rng(1)
    for _ in range(50):
        x = rng.normal(0, 2, prob.dim)
        i = int(rng.integers(prob.num_components))
        assert prob.component_value(i, x) >= 0.0


def test_gradient_at_origin_is_half_row():
    prob = _small_problem()
    for i in range(5):
        row = prob.dataset.row(i)
        idx, vals = logreg_gradient(prob, i, np.zeros(prob.dim))
        np.testing.assert_allclose(vals, -row.label * row.values / 2.0, atol=1e-15)
        assert np.array_equal(idx, row.indices)


def test_gradient_saturates_to_zero():
    prob = _small_problem()
    row = prob.dataset.row(0)
    x = np.zeros(prob.dim)
    x[row.indices] = 1e4 * row.label * np.sign(row.values)  # huge aligned margin
    _, vals = logreg_gradient(prob, 0, x)
    assert np.abs(vals).max() < 1e-12


def test_gradient_support_matches_row():
    prob = _small_problem(seed=3)
    x = _rng(2).normal(0, 1, prob.dim)
    for i in range(prob.num_components):
        idx, _ = logreg_gradient(prob, i, x)
        assert np.array_equal(idx, prob.dataset.row(i).indices)


def test_gradient_matches_finite_differences():
    rng = _rng(3)
    h = 1e-6
    for case in range(50):
        prob = _small_problem(seed=100 + case, n_rows=5, n_feat=5)
        x = rng.normal(0, 1, prob.dim)
        g = full_gradient(prob, x)
        for j in range(prob.dim):
            e = np.zeros(prob.dim)
            e[j] = h
            fd = (prob.value(x + e) - prob.value(x - e)) / (2 * h)
            assert abs(fd - g[j]) / max(1.0, abs(g[j])) <= 1e-6


def test_loss_convexity_probe():
    prob = _small_problem(seed=4)
    rng = _rng(4)
    for _ in range(200):
        x, y = rng.normal(0, 2, prob.dim), rng.normal(0, 2, prob.dim)
        mid = prob.value((x + y) / 2)
        assert mid <= (prob.value(x) + prob.value(y)) / 2 + 1e-12


def test_componentwise_lipschitz_certificate():
    prob = _small_problem(seed=5)
    rng = _rng(5)
    for _ in range(200):
        i = int(rng.integers(prob.num_components))
        x, y = rng.normal(0, 2, prob.dim), rng.normal(0, 2, prob.dim)
        gx = prob.component_gradient(i, x)
        gy = prob.component_gradient(i, y)
        bound = prob._sq[i] / 4.0
        assert np.linalg.norm(gx - gy) <= bound * np.linalg.norm(x - y) + 1e-12


def test_lipschitz_constants_floored_and_ordered():
    prob = _small_problem()
    assert prob.lipschitz_avg >= 1.0
    assert prob.lipschitz_uniform >= prob.lipschitz_avg


def test_value_is_stable_for_extreme_margins():
    ds = parse_libsvm("1 1:1\n-1 1:1\n", num_features=1)
    prob = LogRegProblem(ds)
    v = prob.value(np.array([800.0]))
    assert np.isfinite(v) and v == pytest.approx(400.0, rel=1e-12)


def test_accuracy_tie_rule_and_symmetry():
    ds = parse_libsvm("1 1:1\n1 2:1\n-1 1:1 2:1\n", num_features=2)
    # x = 0: every margin is 0, predicted +1 -> accuracy = share of +1 labels
    assert accuracy(np.zeros(2), ds) == pytest.approx(2 / 3)
    x = np.array([1.0, -2.0])
    margins_nonzero = accuracy(x, ds) + accuracy(-x, ds)
    assert margins_nonzero == pytest.approx(1.0)


def test_accuracy_perfectly_separable():
    ds = parse_libsvm("1 1:1\n-1 2:1\n", num_features=2)
    assert accuracy(np.array([1.0, -1.0]), ds) == 1.0
    with pytest.raises(ValueError):
        accuracy(np.zeros(2), parse_libsvm("", num_features=2))


def test_nnz_counts_exact_zeros():
    assert nnz(np.zeros(5)) == 0
    assert nnz(soft_threshold(np.array([1.0, 0.1]), 0.5)) == 1
    x = soft_threshold(_rng(6).normal(0, 1, 100), 0.8)
    assert nnz(x) == int(np.sum(x != 0.0))


def test_make_l1_logreg_default_weight():
    ds = make_synthetic_logreg(40, 6, seed=0)
    comp = make_l1_logreg(ds)
    assert comp.nonsmooth.mu == pytest.approx(1 / 40)
