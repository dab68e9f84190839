"""Pure-numpy fallback for the compiled kernels in _kernels.pyx.

Same signatures, same semantics; vectorized through concatenated index
ranges and bincount so it stays usable when the extension is not built.
"""

import numpy as np


def backend_name():
    return "python"


def soft_threshold(x, tau):
    """Componentwise sign(x) * max(|x| - tau, 0); produces exact zeros."""
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def _flat_entries(indptr, rows):
    # Concatenation of the nnz ranges [indptr[r], indptr[r+1]) of the rows.
    starts = indptr[rows].astype(np.int64)
    counts = (indptr[rows + 1] - indptr[rows]).astype(np.int64)
    total = int(counts.sum())
    base = np.concatenate(([0], np.cumsum(counts)[:-1]))
    flat = np.arange(total, dtype=np.int64) + np.repeat(starts - base, counts)
    return flat, counts


def csr_margins(data, indices, indptr, rows, x):
    """Inner products <a_r, x> for the listed CSR rows, in the given order."""
    flat, counts = _flat_entries(indptr, rows)
    prod = data[flat] * x[indices[flat]]
    seg = np.repeat(np.arange(len(rows)), counts)
    return np.bincount(seg, weights=prod, minlength=len(rows))


def csr_accumulate_rows(data, indices, indptr, rows, coef, out):
    """out += sum_j coef[j] * a_{rows[j]}."""
    flat, counts = _flat_entries(indptr, rows)
    vals = data[flat] * np.repeat(coef, counts)
    out += np.bincount(indices[flat], weights=vals, minlength=out.shape[0])


def csr_row_sq_norms(data, indices, indptr, num_rows):
    """Squared euclidean norm of every CSR row."""
    seg = np.repeat(np.arange(num_rows), np.diff(indptr).astype(np.int64))
    return np.bincount(seg, weights=data * data, minlength=num_rows)
