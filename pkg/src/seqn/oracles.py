"""Stochastic gradient oracles for finite-sum objectives.

Provides uniform without-replacement sampling, exact full gradients,
mini-batch estimators, and the variance-reduced estimator

    v = grad_S(x) - grad_S(anchor) + full_grad(anchor)

built around a snapshot of the full gradient. All oracles are pure
functions of (point, sample set, snapshot): the same inputs give
bit-identical outputs.
"""

from dataclasses import dataclass, field

import numpy as np

from .prox import ProxFunction


class FiniteSumProblem:
    """Contract for f(x) = (1/N) sum_i f_i(x) with per-component access.

    Subclasses must provide num_components, dim, component_value,
    component_gradient, and the two Lipschitz constants. Batch evaluation
    hooks may be overridden with vectorized versions; defaults accumulate
    in ascending component order for reproducibility.
    """

    @property
    def num_components(self):
        raise NotImplementedError

    @property
    def dim(self):
        raise NotImplementedError

    def component_value(self, i, x):
        raise NotImplementedError

    def component_gradient(self, i, x):
        raise NotImplementedError

    @property
    def lipschitz_uniform(self):
        """L >= max_i L_i, floored at 1."""
        raise NotImplementedError

    @property
    def lipschitz_avg(self):
        """L_f >= Lipschitz constant of the full gradient, floored at 1."""
        raise NotImplementedError

    def value(self, x):
        n = self.num_components
        return sum(self.component_value(i, x) for i in range(n)) / n

    def batch_gradient(self, rows, x):
        """Mean of component gradients over `rows`, accumulated in given order."""
        out = np.zeros(self.dim)
        for i in rows:
            out += self.component_gradient(int(i), x)
        out /= len(rows)
        return out

    def snapshot_cache(self, x, full_grad):
        """Optional problem-specific payload attached to an SVRG snapshot."""
        return None

    def batch_gradient_vr(self, rows, x, snapshot):
        """Variance-reduced batch estimator; override for a fused fast path."""
        g_x = self.batch_gradient(rows, x)
        g_a = self.batch_gradient(rows, snapshot.anchor)
        return g_x - g_a + snapshot.anchor_gradient


@dataclass(frozen=True)
class CompositeProblem:
    """Smooth finite-sum part paired with a prox-friendly nonsmooth part."""

    smooth: FiniteSumProblem
    nonsmooth: ProxFunction

    def psi(self, x):
        return self.smooth.value(x) + self.nonsmooth.value(x)


@dataclass(frozen=True)
class SampleSet:
    """Distinct component ids in [0, N), stored sorted ascending."""

    indices: np.ndarray

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class SvrgSnapshot:
    """Anchor point with its exact full gradient (and optional cache)."""

    anchor: np.ndarray
    anchor_gradient: np.ndarray
    cache: object = field(default=None, compare=False)


def sample_without_replacement(rng, n, b):
    """Uniform b-subset of [0, n), deterministic given the generator state.

    Partial Fisher-Yates over a virtual index pool for b <= n/2 (O(b)
    expected work), complement sampling otherwise.
    """
    if b <= 0 or b > n:
        raise ValueError(f"batch size must satisfy 0 < b <= n, got b={b}, n={n}")
    if b <= n // 2:
        picked = _partial_fisher_yates(rng, n, b)
    else:
        if b == n:
            return SampleSet(np.arange(n, dtype=np.int64))
        mask = np.ones(n, dtype=bool)
        mask[_partial_fisher_yates(rng, n, n - b)] = False
        picked = np.flatnonzero(mask)
    return SampleSet(np.sort(picked).astype(np.int64))


def _partial_fisher_yates(rng, n, b):
    pool = {}
    out = np.empty(b, dtype=np.int64)
    for i in range(b):
        j = int(rng.integers(i, n))
        vi = pool.get(i, i)
        vj = pool.get(j, j)
        out[i] = vj
        pool[j] = vi
        pool[i] = vj
    return out


def full_gradient(problem, x):
    """Exact mean of all component gradients, fixed accumulation order."""
    rows = np.arange(problem.num_components, dtype=np.int64)
    g = problem.batch_gradient(rows, x)
    if not np.all(np.isfinite(g)):
        bad = int(np.flatnonzero(~np.isfinite(g))[0])
        raise FloatingPointError(f"non-finite full gradient (first bad coordinate {bad})")
    return g


def minibatch_gradient(problem, x, s):
    """Mean of component gradients over the sample set."""
    if len(s) == 0:
        raise ValueError("empty sample set")
    return problem.batch_gradient(s.indices, x)


def make_snapshot(problem, x):
    """Snapshot the anchor and its full gradient for variance reduction."""
    x = np.array(x, dtype=np.float64, copy=True)
    g = full_gradient(problem, x)
    return SvrgSnapshot(anchor=x, anchor_gradient=g, cache=problem.snapshot_cache(x, g))


def svrg_gradient(problem, x, s, snap):
    """Variance-reduced estimator grad_S(x) - grad_S(anchor) + anchor_gradient."""
    if len(s) == 0:
        raise ValueError("empty sample set")
    if snap.anchor.shape != np.shape(x):
        raise ValueError("snapshot dimension does not match the evaluation point")
    return problem.batch_gradient_vr(s.indices, x, snap)


def oracle_at(kind, problem, point, s, snap=None):
    """Evaluate the named oracle at `point` with fixed randomness `s`.

    This is the same-sample-set evaluation used for curvature pairs and
    batch reuse: deterministic in (point, s, snap).
    """
    if kind == "minibatch":
        return minibatch_gradient(problem, point, s)
    if kind == "svrg":
        if snap is None:
            raise ValueError("svrg oracle requires a snapshot")
        return svrg_gradient(problem, point, s, snap)
    raise ValueError(f"unknown oracle kind {kind!r}")
