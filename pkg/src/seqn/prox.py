"""Scaled proximity operators, Moreau envelopes, and the nonsmooth residual.

The step metric is always a scaled identity (1/lam) * I; a larger lam means
a longer proximal step. The residual of a composite problem f + phi at x,
given a gradient estimate v, is

    resid(x, v, lam) = x - prox(x - lam * v)

and vanishes exactly at stationary points when v is the true gradient.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ScaledMetric:
    """Metric (1/lam) * I used for proximal steps and residuals."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0 and np.isfinite(self.lam)):
            raise ValueError(f"step parameter must be positive and finite, got {self.lam}")


class ProxFunction:
    """Contract for the convex nonsmooth part: value plus a scaled prox."""

    def value(self, x):
        raise NotImplementedError

    def prox(self, metric, x):
        """argmin_y value(y) + 1/(2*metric.lam) * ||x - y||^2"""
        raise NotImplementedError


class ZeroFunction(ProxFunction):
    """phi = 0; the prox is the identity."""

    def value(self, x):
        return 0.0

    def prox(self, metric, x):
        return np.array(x, dtype=np.float64, copy=True)


@dataclass(frozen=True)
class L1Norm(ProxFunction):
    """phi(x) = mu * ||x||_1; the prox is componentwise soft-thresholding."""

    mu: float

    def __post_init__(self):
        if not (self.mu >= 0.0 and np.isfinite(self.mu)):
            raise ValueError(f"l1 weight must be nonnegative, got {self.mu}")

    def value(self, x):
        return float(self.mu * np.abs(x).sum())

    def prox(self, metric, x):
        return soft_threshold(x, metric.lam * self.mu)


def soft_threshold(x, tau):
    """sign(x) * max(|x| - tau, 0) with exact zeros for |x| <= tau."""
    if tau < 0.0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    x = np.ascontiguousarray(x, dtype=np.float64)
    return np.asarray(kernels.soft_threshold(x, float(tau)))


def residual(x, v, metric, phi):
    """Fixed-point residual x - prox(x - lam * v) under the scaled metric."""
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if x.shape != v.shape:
        raise ValueError(f"shape mismatch: x {x.shape} vs v {v.shape}")
    return x - phi.prox(metric, x - metric.lam * v)


def moreau_envelope(x, metric, phi):
    """Envelope min_y phi(y) + 1/(2*lam) ||x - y||^2 for the l1 penalty.

    Closed (Huber) form per coordinate: t^2/(2*lam) inside |t| <= lam*mu,
    mu*|t| - lam*mu^2/2 outside. Its gradient is (x - prox(x)) / lam.
    """
    if not isinstance(phi, L1Norm):
        raise TypeError("closed-form envelope implemented for the l1 penalty only")
    lam, mu = metric.lam, phi.mu
    a = np.abs(np.asarray(x, dtype=np.float64))
    thr = lam * mu
    inner = a * a / (2.0 * lam)
    outer = mu * a - lam * mu * mu / 2.0
    return float(np.where(a <= thr, inner, outer).sum())


def residual_scaling_check(x, v, phi, deltas):
    """Values delta^-1 * ||resid(x, v, delta)|| for each delta, ascending.

    Test support: the sequence is nonincreasing in delta for any x, v.
    """
    deltas = [float(d) for d in deltas]
    if any(d <= 0 for d in deltas):
        raise ValueError("all deltas must be positive")
    if sorted(deltas) != deltas:
        raise ValueError("deltas must be sorted ascending")
    out = []
    for d in deltas:
        r = residual(x, v, ScaledMetric(d), phi)
        out.append(float(np.linalg.norm(r)) / d)
    return out
