import numpy as np
import pytest

from seqn import kernels
from seqn.dataio import Dataset
from seqn.synthetic import make_synthetic_logreg


def _random_csr(rng, n_rows=30, n_cols=12):
    ds = make_synthetic_logreg(n_rows, n_cols, seed=int(rng.integers(1 << 20)),
                               support=6, p_support=0.5, val_top=1.3, val_decay=3.0)
    return ds


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("name", ["soft_threshold", "csr_margins",
                                  "csr_accumulate_rows", "csr_row_sq_norms"])
def test_backends_agree(name):
    impls = kernels.available_backends()
    if len(impls) < 2:
        pytest.skip("only one backend available")
    rng = np.random.default_rng(np.random.Philox(0))
    for trial in range(20):
        ds = _random_csr(rng)
        x = rng.normal(0, 1, ds.num_features)
        rows = np.sort(rng.choice(len(ds), size=10, replace=False)).astype(np.int64)
        coef = rng.normal(0, 1, len(rows))
        outs = {}
        for bname, mod in impls.items():
            if name == "soft_threshold":
                outs[bname] = mod.soft_threshold(np.ascontiguousarray(x), 0.4)
            elif name == "csr_margins":
                outs[bname] = np.asarray(mod.csr_margins(ds.data, ds.indices, ds.indptr, rows, x))
            elif name == "csr_row_sq_norms":
                outs[bname] = np.asarray(mod.csr_row_sq_norms(ds.data, ds.indices, ds.indptr, len(ds)))
            else:
                acc = np.zeros(ds.num_features)
                mod.csr_accumulate_rows(ds.data, ds.indices, ds.indptr, rows, coef, acc)
                outs[bname] = acc
        a, b = outs["compiled"], outs["python"]
        np.testing.assert_allclose(a, b, atol=1e-12, rtol=1e-12)


def test_kernels_handle_empty_rows():
    # a dataset with an empty middle row
    ds = Dataset(np.array([1.0, 2.0]), np.array([0, 1], dtype=np.int32),
                 np.array([0, 1, 1, 2]), np.array([1.0, -1.0, 1.0]), num_features=2)
    x = np.array([2.0, 3.0])
    rows = np.array([0, 1, 2], dtype=np.int64)
    t = np.asarray(kernels.csr_margins(ds.data, ds.indices, ds.indptr, rows, x))
    np.testing.assert_allclose(t, [2.0, 0.0, 6.0], atol=1e-15)
    out = np.zeros(2)
    kernels.csr_accumulate_rows(ds.data, ds.indices, ds.indptr, rows,
                                np.array([1.0, 5.0, 2.0]), out)
    np.testing.assert_allclose(out, [1.0, 4.0], atol=1e-15)
    sq = np.asarray(kernels.csr_row_sq_norms(ds.data, ds.indices, ds.indptr, 3))
    np.testing.assert_allclose(sq, [1.0, 0.0, 4.0], atol=1e-15)


def test_kernel_determinism_bitwise():
    rng = np.random.default_rng(np.random.Philox(9))
    ds = _random_csr(rng)
    x = rng.normal(0, 1, ds.num_features)
    rows = np.sort(rng.choice(len(ds), size=12, replace=False)).astype(np.int64)
    coef = rng.normal(0, 1, len(rows))
    a1 = np.asarray(kernels.csr_margins(ds.data, ds.indices, ds.indptr, rows, x))
    a2 = np.asarray(kernels.csr_margins(ds.data, ds.indices, ds.indptr, rows, x))
    assert np.array_equal(a1, a2)
    o1, o2 = np.zeros(ds.num_features), np.zeros(ds.num_features)
    kernels.csr_accumulate_rows(ds.data, ds.indices, ds.indptr, rows, coef, o1)
    kernels.csr_accumulate_rows(ds.data, ds.indices, ds.indptr, rows, coef, o2)
    assert np.array_equal(o1, o2)
