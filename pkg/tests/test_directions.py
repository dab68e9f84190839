import warnings

import numpy as np
import pytest

from seqn.directions import (CoordLbfgsDirection, CurvatureBuffer, IdentityDirection,
                             LbfgsDirection, coord_lbfgs_apply, coordinate_partition,
                             direction, lbfgs_apply, lbfgs_gamma, nu_bar_bound,
                             try_push_pair)


def _rng(seed=0):
    return np.random.default_rng(np.random.Philox(seed))


def _random_accepted_buffer(rng, n, p, delta=1e-4):
    buf = CurvatureBuffer(memory=p, delta=delta)
    while len(buf) < p:
        u = rng.normal(0, 1, n)
        y = u * rng.uniform(0.2, 2.0) + rng.normal(0, 0.3, n)
        try_push_pair(buf, u, y)
    return buf


def dense_lbfgs(pairs, gamma, n):
    """Explicit construction of the limited-memory matrix, oldest pair first."""
    W = gamma * np.eye(n)
    for u, y in pairs:
        rho = 1.0 / float(y @ u)
        left = np.eye(n) - rho * np.outer(u, y)
        W = left @ W @ left.T + rho * np.outer(u, u)
    return W


def test_push_pair_accepts_aligned():
    buf = CurvatureBuffer(memory=3, delta=1.0)
    u = np.array([1.0, 2.0])
    assert try_push_pair(buf, u, u.copy())
    assert len(buf) == 1


def test_push_pair_rejects_negative_curvature():
    buf = CurvatureBuffer(memory=3)
    u = np.array([1.0, -1.0])
    assert not try_push_pair(buf, u, -u)
    assert len(buf) == 0


def test_push_pair_discards_zero_u():
    buf = CurvatureBuffer(memory=3)
    assert not try_push_pair(buf, np.zeros(2), np.array([1.0, 0.0]))


def test_push_pair_evicts_oldest():
    buf = CurvatureBuffer(memory=2, delta=1e-8)
    for k in range(3):
        u = np.zeros(2)
        u[k % 2] = 1.0 + k
        try_push_pair(buf, u, u.copy())
    assert len(buf) == 2
    assert buf.pairs[0].u[1] == 2.0  # pair k=1 survived, k=0 evicted


def test_gamma_values():
    buf = CurvatureBuffer(memory=2)
    assert lbfgs_gamma(buf) == 1.0
    u = np.array([1.0, 2.0, -1.0])
    try_push_pair(buf, u, u.copy())
    assert lbfgs_gamma(buf) == pytest.approx(1.0)
    buf2 = CurvatureBuffer(memory=2)
    y = np.array([0.5, 1.0, -0.5])
    try_push_pair(buf2, 2 * y, y)  # u = 2y -> gamma = <u,y>/<y,y> = 2
    assert lbfgs_gamma(buf2) == pytest.approx(2.0)


def test_gamma_matches_direct_formula():
    rng = _rng(1)
    buf = _random_accepted_buffer(rng, 6, 3)
    p = buf.pairs[-1]
    assert lbfgs_gamma(buf) == pytest.approx(float(p.u @ p.y) / float(p.y @ p.y), rel=1e-15)


def test_apply_empty_buffer_is_identity():
    buf = CurvatureBuffer()
    r = np.array([1.0, -2.0, 3.0])
    out = lbfgs_apply(buf, r)
    assert np.array_equal(out, r)
    out[0] = 99.0
    assert r[0] == 1.0  # returned array is a copy


def test_apply_single_canonical_pair_collapses_to_identity():
    buf = CurvatureBuffer()
    e1 = np.array([1.0, 0.0, 0.0])
    try_push_pair(buf, e1, e1.copy())
    r = np.array([0.3, -1.0, 2.0])
    np.testing.assert_allclose(lbfgs_apply(buf, r), r, atol=1e-15)


def test_two_loop_matches_dense_recursion():
    rng = _rng(2)
    for case in range(200):
        n = int(rng.integers(2, 9))
        p = int(rng.integers(1, 5))
        buf = _random_accepted_buffer(rng, n, p)
        pairs = [(q.u, q.y) for q in buf.pairs]
        W = dense_lbfgs(pairs, lbfgs_gamma(buf), n)
        r = rng.normal(0, 1, n)
        np.testing.assert_allclose(lbfgs_apply(buf, r), W @ r, atol=1e-11)


def test_positive_definiteness():
    rng = _rng(3)
    buf = _random_accepted_buffer(rng, 6, 4)
    for _ in range(1000):
        r = rng.normal(0, 1, 6)
        if np.linalg.norm(r) == 0:
            continue
        assert float(r @ lbfgs_apply(buf, r)) > 0


def test_coordinate_partition_thresholding():
    part = coordinate_partition(np.array([0.5, 1e-8, -0.2]), 1e-6)
    assert np.array_equal(part.active, [0, 2])
    assert np.array_equal(part.complement, [1])
    all_small = coordinate_partition(np.array([1e-8, -1e-9]), 1e-6)
    assert len(all_small.active) == 0
    all_big = coordinate_partition(np.array([0.5, -0.5]), 1e-6)
    assert np.array_equal(all_big.active, [0, 1])
    with pytest.raises(ValueError):
        coordinate_partition(np.array([0.1]), 0.0)


def test_coord_apply_full_block_matches_plain():
    rng = _rng(4)
    buf = _random_accepted_buffer(rng, 5, 3)
    r = rng.normal(0, 1, 5)
    part = coordinate_partition(np.full(5, 1.0), 1e-6)  # I = [n]
    a = coord_lbfgs_apply(buf, part, r)
    b = lbfgs_apply(buf, r)
    assert np.abs(a - b).max() <= 1e-14


def test_coord_apply_empty_filter_resets_to_full():
    rng = _rng(5)
    n = 6
    buf = _random_accepted_buffer(rng, n, 3)
    # restrict to a block where every pair fails the delta1 test by using a huge delta1
    r = rng.normal(0, 1, n)
    part = coordinate_partition(r, 1e-6)
    out = coord_lbfgs_apply(buf, part, r, delta1=1e12)
    np.testing.assert_allclose(out, lbfgs_apply(buf, r), atol=1e-15)


def test_coord_apply_empty_active_set_resets_to_full():
    rng = _rng(6)
    buf = _random_accepted_buffer(rng, 4, 2)
    r = np.full(4, 1e-9)
    part = coordinate_partition(r, 1e-6)
    assert len(part.active) == 0
    np.testing.assert_allclose(coord_lbfgs_apply(buf, part, r), lbfgs_apply(buf, r),
                               atol=1e-15)


def test_coord_apply_matches_dense_block_oracle():
    rng = _rng(7)
    for case in range(100):
        n = 4
        buf = CurvatureBuffer(memory=2, delta=1e-4)
        while len(buf) < 1:
            u = rng.normal(0, 1, n)
            y = u * rng.uniform(0.5, 1.5) + rng.normal(0, 0.2, n)
            try_push_pair(buf, u, y)
        residual_vec = np.array([1.0, 2.0, 1e-9, -1.5])
        zeta = float(rng.uniform(0.5, 2.0))
        part = coordinate_partition(residual_vec, 1e-6, zeta=zeta)
        I, A = part.active, part.complement
        assert len(I) == 3 and len(A) == 1
        delta1 = 1e-4
        pair = buf.pairs[0]
        inner = float(pair.u[I] @ pair.y[I])
        got = coord_lbfgs_apply(buf, part, residual_vec, delta1=delta1)
        if abs(inner) >= delta1 * float(pair.u @ pair.u):
            gamma = inner / float(pair.y[I] @ pair.y[I])
            W_II = dense_lbfgs([(pair.u[I], pair.y[I])], gamma, len(I))
            W = np.zeros((n, n))
            W[np.ix_(I, I)] = W_II
            W[np.ix_(A, A)] = zeta * np.eye(len(A))
            np.testing.assert_allclose(got, W @ residual_vec, atol=1e-12)
        else:
            np.testing.assert_allclose(got, lbfgs_apply(buf, residual_vec), atol=1e-12)


def test_nu_bar_bound_values():
    assert nu_bar_bound(1, 1.0, 0.0, 1.0) == pytest.approx(364.0)
    assert nu_bar_bound(1, 1.0, 0.0, 1e6) == pytest.approx(1e6)  # zeta dominates
    with pytest.raises(ValueError):
        nu_bar_bound(0, 1.0, 0.0, 1.0)


def test_nu_bar_bound_overflow_warns_inf():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = nu_bar_bound(500, 1e-8, 1e6, 1.0)
    assert out == np.inf
    assert any("conservative" in str(w.message) for w in caught)


def test_norm_certificate_dominates_operator_norm():
    rng = _rng(8)
    for case in range(200):
        n = int(rng.integers(2, 8))
        p = int(rng.integers(1, 5))
        buf = _random_accepted_buffer(rng, n, p)
        pairs = [(q.u, q.y) for q in buf.pairs]
        W = dense_lbfgs(pairs, lbfgs_gamma(buf), n)
        ell = max(0.0, max(np.linalg.norm(y) / np.linalg.norm(u) for u, y in pairs) - 2.0)
        cert = nu_bar_bound(p, buf.delta, ell, 1.0)
        assert np.linalg.norm(W, 2) <= cert


def test_direction_identity_and_zero():
    gen = IdentityDirection()
    r = np.array([1.0, -0.5])
    np.testing.assert_array_equal(direction(gen, r), -r)
    np.testing.assert_array_equal(direction(gen, np.zeros(3)), np.zeros(3))


def test_direction_lbfgs_composes_apply():
    rng = _rng(9)
    gen = LbfgsDirection(memory=4)
    for _ in range(5):
        u = rng.normal(0, 1, 6)
        gen.notify_pair(u, u * rng.uniform(0.5, 1.5) + rng.normal(0, 0.1, 6))
    r = rng.normal(0, 1, 6)
    np.testing.assert_allclose(direction(gen, r), -lbfgs_apply(gen.buffer, r), atol=1e-15)


def test_direction_norm_bounded_by_certificate():
    rng = _rng(10)
    for gen in (IdentityDirection(), LbfgsDirection(memory=3), CoordLbfgsDirection(memory=3)):
        for _ in range(50):
            if gen.wants_pairs:
                u = rng.normal(0, 1, 5)
                gen.notify_pair(u, u * rng.uniform(0.3, 2.0) + rng.normal(0, 0.2, 5))
            r = rng.normal(0, 1, 5)
            d = direction(gen, r)
            assert np.linalg.norm(d) <= gen.certificate_bound() * np.linalg.norm(r) + 1e-12


def test_direction_rejects_non_finite():
    class Broken(IdentityDirection):
        def apply(self, residual):
            return np.full_like(residual, np.nan)

    with pytest.raises(FloatingPointError, match="Broken"):
        direction(Broken(), np.ones(2))
