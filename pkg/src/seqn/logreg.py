"""l1-regularized logistic regression model backed by the CSR kernels.

The smooth part is f(x) = (1/N) sum_i log(1 + exp(-b_i <a_i, x>)); each
component gradient is slope_i(x) * a_i with the scalar

    slope_i(x) = -b_i / (1 + exp(b_i <a_i, x>)),

so batches and SVRG corrections reduce to one margin pass plus one
scatter over the rows involved.
"""

import numpy as np

from . import kernels
from .oracles import CompositeProblem, FiniteSumProblem
from .prox import L1Norm


def _stable_sigmoid(t):
    # 1 / (1 + exp(-t)) without overflow on either tail
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class LogRegProblem(FiniteSumProblem):
    """Smooth logistic-loss part of the l1-logistic objective."""

    def __init__(self, dataset):
        self.dataset = dataset
        self._sq = np.asarray(kernels.csr_row_sq_norms(
            dataset.data, dataset.indices, dataset.indptr, len(dataset)))
        comps = self._sq / 4.0
        self._lip_uniform = max(1.0, float(comps.max()) if len(comps) else 0.0)
        self._lip_avg = max(1.0, float(comps.mean()) if len(comps) else 0.0)

    @property
    def num_components(self):
        return len(self.dataset)

    @property
    def dim(self):
        return self.dataset.num_features

    @property
    def lipschitz_uniform(self):
        return self._lip_uniform

    @property
    def lipschitz_avg(self):
        return self._lip_avg

    def margins(self, rows, x):
        d = self.dataset
        return np.asarray(kernels.csr_margins(d.data, d.indices, d.indptr,
                                              np.ascontiguousarray(rows, dtype=np.int64),
                                              np.ascontiguousarray(x)))

    def slopes(self, rows, x):
        t = self.margins(rows, x)
        b = self.dataset.labels[rows]
        return -b * _stable_sigmoid(-b * t)

    def component_value(self, i, x):
        rows = np.array([i], dtype=np.int64)
        t = self.margins(rows, x)[0] * self.dataset.labels[i]
        return float(np.logaddexp(0.0, -t))

    def component_gradient(self, i, x):
        out = np.zeros(self.dim)
        idx, vals = logreg_gradient(self, i, x)
        out[idx] = vals
        return out

    def value(self, x):
        rows = np.arange(len(self.dataset), dtype=np.int64)
        t = self.margins(rows, x) * self.dataset.labels
        return float(np.logaddexp(0.0, -t).mean())

    def batch_gradient(self, rows, x):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        coef = self.slopes(rows, x) / len(rows)
        out = np.zeros(self.dim)
        d = self.dataset
        kernels.csr_accumulate_rows(d.data, d.indices, d.indptr, rows, coef, out)
        return out

    def snapshot_cache(self, x, full_grad):
        # slope scalars at the anchor, one per row; makes grad_S(anchor) a lookup
        rows = np.arange(len(self.dataset), dtype=np.int64)
        return self.slopes(rows, x)

    def batch_gradient_vr(self, rows, x, snapshot):
        if snapshot.cache is None:
            return super().batch_gradient_vr(rows, x, snapshot)
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        coef = (self.slopes(rows, x) - snapshot.cache[rows]) / len(rows)
        out = snapshot.anchor_gradient.copy()
        d = self.dataset
        kernels.csr_accumulate_rows(d.data, d.indices, d.indptr, rows, coef, out)
        return out


def logreg_gradient(problem, i, x):
    """Gradient of one logistic loss term as (indices, values).

    The support equals the support of the data row a_i.
    """
    row = problem.dataset.row(i)
    t = row.label * float(row.values @ x[row.indices])
    slope = -row.label * _stable_sigmoid(np.array([-t]))[0]
    return row.indices, slope * row.values


def make_l1_logreg(dataset, mu=None):
    """Composite l1-logistic problem; mu defaults to 1/N."""
    if mu is None:
        mu = 1.0 / len(dataset)
    return CompositeProblem(smooth=LogRegProblem(dataset), nonsmooth=L1Norm(mu))


def accuracy(x, dataset):
    """Fraction of rows with sign(<a_i, x>) equal to the label; ties predict +1."""
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    rows = np.arange(len(dataset), dtype=np.int64)
    t = np.asarray(kernels.csr_margins(dataset.data, dataset.indices, dataset.indptr,
                                       rows, np.ascontiguousarray(x, dtype=np.float64)))
    pred = np.where(t >= 0.0, 1.0, -1.0)
    return float((pred == dataset.labels).mean())


def nnz(x):
    """Number of exactly-nonzero entries (soft-thresholding gives exact zeros)."""
    return int(np.count_nonzero(x))
