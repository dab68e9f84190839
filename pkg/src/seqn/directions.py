"""Quasi-Newton direction generators d = -W * residual.

The matrix W is never formed: the limited-memory recursion

    W^0 = gamma * I,
    W^{i+1} = (I - rho_i u_i y_i') W^i (I - rho_i y_i u_i') + rho_i u_i u_i'

is applied matrix-free by the standard two-loop scheme, with pairs ordered
oldest to newest and rho_i = 1 / <y_i, u_i>. Curvature pairs come from
iterate and residual differences, u = z - x and y = resid(z) - resid(x)
under the same step metric and sample set, and are only accepted when
<u, y> >= delta * ||u||^2.

The coordinate variant applies the recursion on the index block where the
residual is large (restricted pairs, filtered by |<u_I, y_I>| >= delta1 *
||u||^2) and a scalar multiple zeta elsewhere; an empty block or filter
falls back to the full update.
"""

import math
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

# acceptance threshold for curvature pairs and for the coordinate filter
DELTA_CURVATURE = 1e-4
DELTA_COORD_PAIR = 1e-4
DELTA_COORD_RESIDUAL = 1e-6

# guard against pathological float underflow in rho and gamma denominators
_DENOM_GUARD = 1e-300


@dataclass
class CurvaturePair:
    u: np.ndarray
    y: np.ndarray


class CurvatureBuffer:
    """Bounded FIFO of accepted curvature pairs, oldest first."""

    def __init__(self, memory=10, delta=DELTA_CURVATURE):
        if memory < 1:
            raise ValueError("memory must be a positive integer")
        self.memory = memory
        self.delta = delta
        self.pairs = deque(maxlen=memory)

    def __len__(self):
        return len(self.pairs)


def try_push_pair(buffer, u, y):
    """Append (u, y) iff <u, y> >= delta * ||u||^2; returns acceptance.

    Zero-u pairs are discarded outright (the condition is vacuous there and
    rho would be undefined).
    """
    u = np.asarray(u, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if u.shape != y.shape:
        raise ValueError(f"shape mismatch: u {u.shape} vs y {y.shape}")
    uu = float(u @ u)
    if uu == 0.0:
        return False
    uy = float(u @ y)
    if uy < buffer.delta * uu:
        return False
    if uy < _DENOM_GUARD or float(y @ y) < _DENOM_GUARD:
        return False
    buffer.pairs.append(CurvaturePair(u=u.copy(), y=y.copy()))
    return True


def lbfgs_gamma(buffer):
    """Initial scaling <u, y> / <y, y> from the newest pair; 1 when empty."""
    if len(buffer) == 0:
        return 1.0
    p = buffer.pairs[-1]
    yy = float(p.y @ p.y)
    if yy < _DENOM_GUARD:
        return 1.0
    return float(p.u @ p.y) / yy


def _two_loop(pairs, gamma, r):
    q = np.array(r, dtype=np.float64, copy=True)
    m = len(pairs)
    rho = np.empty(m)
    alpha = np.empty(m)
    for i in range(m - 1, -1, -1):
        u, y = pairs[i]
        denom = float(y @ u)
        rho[i] = 1.0 / denom
        alpha[i] = rho[i] * float(u @ q)
        q -= alpha[i] * y
    q *= gamma
    for i in range(m):
        u, y = pairs[i]
        beta = rho[i] * float(y @ q)
        q += (alpha[i] - beta) * u
    return q


def lbfgs_apply(buffer, r):
    """W r via the two-loop recursion; identity on an empty buffer."""
    r = np.asarray(r, dtype=np.float64)
    if not np.all(np.isfinite(r)):
        raise FloatingPointError("non-finite residual passed to lbfgs_apply")
    if len(buffer) == 0:
        return r.copy()
    pairs = [(p.u, p.y) for p in buffer.pairs]
    return _two_loop(pairs, lbfgs_gamma(buffer), r)


@dataclass
class CoordinatePartition:
    """Active block I (large residual entries), complement A, scalar zeta."""

    active: np.ndarray
    complement: np.ndarray
    zeta: float = 1.0


def coordinate_partition(residual, delta2=DELTA_COORD_RESIDUAL, zeta=1.0):
    """Split [n] by residual magnitude: I = {i : |residual_i| >= delta2}."""
    if delta2 <= 0:
        raise ValueError("delta2 must be positive")
    residual = np.asarray(residual)
    big = np.abs(residual) >= delta2
    return CoordinatePartition(active=np.flatnonzero(big),
                               complement=np.flatnonzero(~big), zeta=zeta)


def coord_lbfgs_apply(buffer, partition, residual, delta1=DELTA_COORD_PAIR):
    """Block direction: restricted L-BFGS on I, zeta * residual on A.

    Pairs enter the restricted recursion only when |<u_I, y_I>| >=
    delta1 * ||u||^2 (full-space norm on the right). An empty I or an
    empty filtered set resets to the full update on [n].
    """
    residual = np.asarray(residual, dtype=np.float64)
    I = partition.active
    if len(I) == 0:
        return lbfgs_apply(buffer, residual)
    restricted = []
    for p in buffer.pairs:
        uu_full = float(p.u @ p.u)
        u_i, y_i = p.u[I], p.y[I]
        inner = float(u_i @ y_i)
        if abs(inner) >= delta1 * uu_full and abs(inner) >= _DENOM_GUARD:
            restricted.append((u_i, y_i))
    if not restricted:
        return lbfgs_apply(buffer, residual)
    u_n, y_n = restricted[-1]
    yy = float(y_n @ y_n)
    gamma = float(u_n @ y_n) / yy if yy >= _DENOM_GUARD else 1.0
    out = np.empty_like(residual)
    out[partition.complement] = partition.zeta * residual[partition.complement]
    out[I] = _two_loop(restricted, gamma, residual[I])
    return out


def nu_bar_bound(p, delta1, ell_bar, zeta_bar):
    """Certified operator-norm bound for the block quasi-Newton matrix.

    max(zeta_bar, ((2+l+d)/d)^(2(p+2)) - 1) / (2+l)); deliberately
    conservative, overflow reports +inf with a warning.
    """
    if min(p, delta1, zeta_bar) <= 0 or ell_bar < 0:
        raise ValueError("p, delta1, zeta_bar must be positive and ell_bar >= 0")
    try:
        grow = ((2.0 + ell_bar + delta1) / delta1) ** (2 * (p + 2))
        core = (grow - 1.0) / (2.0 + ell_bar)
    except OverflowError:
        core = math.inf
    if math.isinf(core):
        warnings.warn("nu_bar_bound overflowed to +inf (bound is conservative by design)")
    return max(float(zeta_bar), core)


def _buffer_ell_bar(buffer):
    # smallest l with ||y|| <= (2 + l) ||u|| over the stored pairs
    worst = 0.0
    for p in buffer.pairs:
        nu = float(np.linalg.norm(p.u))
        ny = float(np.linalg.norm(p.y))
        if nu > 0:
            worst = max(worst, ny / nu - 2.0)
    return max(0.0, worst)


class DirectionGenerator:
    """Contract: apply W to a residual, ingest pairs, certify a norm bound."""

    wants_pairs = False

    def apply(self, residual):
        raise NotImplementedError

    def notify_pair(self, u, y):
        return False

    def certificate_bound(self):
        raise NotImplementedError


class IdentityDirection(DirectionGenerator):
    """W = I: the stochastic proximal gradient direction."""

    def apply(self, residual):
        return np.array(residual, dtype=np.float64, copy=True)

    def certificate_bound(self):
        return 1.0


class LbfgsDirection(DirectionGenerator):
    """Full stochastic L-BFGS over the accepted curvature pairs."""

    wants_pairs = True

    def __init__(self, memory=10, delta=DELTA_CURVATURE):
        self.buffer = CurvatureBuffer(memory=memory, delta=delta)

    def apply(self, residual):
        return lbfgs_apply(self.buffer, residual)

    def notify_pair(self, u, y):
        return try_push_pair(self.buffer, u, y)

    def certificate_bound(self):
        if len(self.buffer) == 0:
            return 1.0
        return nu_bar_bound(len(self.buffer), self.buffer.delta,
                            _buffer_ell_bar(self.buffer), 1.0)


class CoordLbfgsDirection(DirectionGenerator):
    """Coordinate quasi-Newton: restricted L-BFGS on the large-residual block."""

    wants_pairs = True

    def __init__(self, memory=10, delta=DELTA_CURVATURE, delta1=DELTA_COORD_PAIR,
                 delta2=DELTA_COORD_RESIDUAL, zeta=1.0):
        self.buffer = CurvatureBuffer(memory=memory, delta=delta)
        self.delta1 = delta1
        self.delta2 = delta2
        self.zeta = zeta

    def apply(self, residual):
        part = coordinate_partition(residual, self.delta2, self.zeta)
        return coord_lbfgs_apply(self.buffer, part, residual, self.delta1)

    def notify_pair(self, u, y):
        return try_push_pair(self.buffer, u, y)

    def certificate_bound(self):
        if len(self.buffer) == 0:
            return max(1.0, self.zeta)
        return nu_bar_bound(len(self.buffer), self.delta1,
                            _buffer_ell_bar(self.buffer), max(self.zeta, 1e-12))


def direction(generator, residual):
    """d = -apply(residual); errors on non-finite output, naming the generator."""
    d = -generator.apply(residual)
    if not np.all(np.isfinite(d)):
        raise FloatingPointError(
            f"non-finite direction from {type(generator).__name__}")
    return d


def make_direction_generator(kind, memory=10, zeta=1.0, delta=DELTA_CURVATURE,
                             delta1=DELTA_COORD_PAIR):
    if kind == "identity":
        return IdentityDirection()
    if kind == "lbfgs":
        return LbfgsDirection(memory=memory, delta=delta)
    if kind == "coord_lbfgs":
        return CoordLbfgsDirection(memory=memory, zeta=zeta, delta=delta, delta1=delta1)
    raise ValueError(f"unknown direction kind {kind!r}")
