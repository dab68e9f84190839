"""Synthetic problem generators for tests and benchmarks."""

import numpy as np

from .dataio import Dataset
from .oracles import FiniteSumProblem


def make_synthetic_logreg(num_samples, num_features, seed, support=8, p_support=0.2,
                          val_top=0.55, val_decay=16.0, margin_mass=1.1,
                          noise_temp=1.0, p_tail=0.002, tail_val=0.1, name=None):
    """Sparse binary-classification data with a planted sparse weight vector.

    The first `support` features appear with probability p_support and carry
    geometrically decaying values val_top * val_decay^(-j/(support-1)); the
    planted weight scales inversely with the value so every support feature
    contributes the same margin mass, which spreads the objective's
    curvature over `val_decay^2` orders within the support block. Remaining
    features are rare label-free noise whose gradients fall below the
    default l1 weight 1/N, so the solution support matches the planted one.
    Labels are drawn from the logistic model on the standardized margin, so
    the data is never separable; smaller noise_temp means cleaner labels.
    """
    rng = np.random.default_rng(np.random.Philox(seed))
    support = min(support, num_features)
    freqs = np.full(num_features, p_tail)
    freqs[:support] = p_support
    feat_vals = np.full(num_features, tail_val)
    decay = val_decay ** (-np.arange(support) / max(1, support - 1))
    feat_vals[:support] = val_top * decay

    w = np.zeros(num_features)
    signs = np.where(rng.random(support) < 0.5, -1.0, 1.0)
    w[:support] = margin_mass * signs / feat_vals[:support]

    data, indices, indptr, margins = [], [], [0], []
    for _ in range(num_samples):
        mask = rng.random(num_features) < freqs
        if not mask.any():
            mask[0] = True
        cols = np.flatnonzero(mask)
        vals = feat_vals[cols]
        margins.append(float(vals @ w[cols]))
        indices.extend(cols)
        data.extend(vals)
        indptr.append(len(indices))

    margins = np.asarray(margins)
    sd = margins.std() or 1.0
    prob_pos = 1.0 / (1.0 + np.exp(-(margins - np.median(margins)) / (noise_temp * sd)))
    labels = np.where(rng.random(num_samples) < prob_pos, 1.0, -1.0)

    return Dataset(np.array(data), np.array(indices, dtype=np.int32), np.array(indptr),
                   labels, num_features,
                   name=name or f"synth-{num_samples}x{num_features}-s{seed}")


class QuadraticSumProblem(FiniteSumProblem):
    """f_i(x) = 0.5 * (x - c_i)' diag(q_i) (x - c_i); exact Lipschitz constants.

    With q_i = 1 this is the shifted-quadratic toy whose full gradient is
    x - mean(c_i); heterogeneous q_i give the SVRG estimator a nonzero
    variance that scales as ||x - anchor||^2.
    """

    def __init__(self, centers, curvatures=None):
        self.centers = np.asarray(centers, dtype=np.float64)
        n_comp, dim = self.centers.shape
        if curvatures is None:
            curvatures = np.ones((n_comp, dim))
        self.curvatures = np.asarray(curvatures, dtype=np.float64)
        self._lip_comp = self.curvatures.max(axis=1)
        self._lip_uniform = max(1.0, float(self._lip_comp.max()))
        self._lip_avg = max(1.0, float(np.abs(self.curvatures.mean(axis=0)).max()))

    @property
    def num_components(self):
        return self.centers.shape[0]

    @property
    def dim(self):
        return self.centers.shape[1]

    @property
    def lipschitz_uniform(self):
        return self._lip_uniform

    @property
    def lipschitz_avg(self):
        return self._lip_avg

    def component_value(self, i, x):
        d = x - self.centers[i]
        return float(0.5 * (self.curvatures[i] * d * d).sum())

    def component_gradient(self, i, x):
        return self.curvatures[i] * (x - self.centers[i])

    def value(self, x):
        d = x[None, :] - self.centers
        return float(0.5 * (self.curvatures * d * d).sum() / self.num_components)

    def batch_gradient(self, rows, x):
        d = x[None, :] - self.centers[rows]
        return (self.curvatures[rows] * d).mean(axis=0)
