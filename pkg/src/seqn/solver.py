"""Extra-step quasi-Newton solvers for composite problems.

Every method here iterates some variant of the two-step scheme

    z  = x + beta * d,                 d = -W * resid(x, v, lam)
    x+ = prox_{lam_plus}(x + alpha * d - lam_plus * v_plus)

where v approximates grad f(x) and v_plus approximates grad f(z). The
mini-batch flavor draws a fresh sample set per iteration; the
variance-reduced flavor runs an inner loop of K steps around snapshots of
the full gradient. Baselines (prox_sgd, prox_svrg) are the alpha = beta = 0,
W = I special cases.

Epoch accounting follows the sample-set convention: generating and
evaluating a sample set S charges |S| component-gradient evaluations
(|S|/N epochs), a full-gradient snapshot charges N; re-evaluating an
already generated set at the trial point is free, which makes one
variance-reduced outer cycle cost exactly N + K*(b + b_plus) evaluations
without batch reuse and N + K*b with it.
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .directions import LbfgsDirection, direction, make_direction_generator
from .logreg import LogRegProblem, accuracy, nnz
from .oracles import (full_gradient, make_snapshot, minibatch_gradient,
                      oracle_at, sample_without_replacement)
from .prox import ScaledMetric, residual
from .trace import TraceRecord


@dataclass(frozen=True)
class StepPlan:
    """One iteration's step sizes (lam, lam_plus, alpha, beta)."""

    lam: float
    lam_plus: float
    alpha: float
    beta: float

    def __post_init__(self):
        vals = (self.lam, self.lam_plus, self.alpha, self.beta)
        if any(v < 0 or not np.isfinite(v) for v in vals):
            raise ValueError(f"step plan entries must be finite and nonnegative: {vals}")
        if self.lam <= 0 or self.lam_plus <= 0:
            raise ValueError("lam and lam_plus must be positive")


@dataclass
class SolverConfig:
    method: str = "seqn_vr"            # seqn | seqn_vr | prox_sgd | prox_svrg
    direction_kind: str | None = None  # identity | lbfgs | coord_lbfgs
    policy: str = "adaptive"           # A_theory | B_decaying_alpha | C_corollary | adaptive
    seed: int = 0
    epochs: float = 60.0
    tol: float = 1e-6
    K: int | None = None
    b: int | None = None
    b_plus: int | None = None
    reuse_batch: bool = True
    subspace_enabled: bool = False
    mu: float | None = None            # echoed into manifests only
    psi_star: float | None = None
    nu_bar: float | None = None
    alpha: float = 1.0
    beta: float = 1.0
    rho_bar: float = 0.5
    memory: int = 10
    zeta: float = 1.0
    delta_curvature: float = 1e-4
    sgd_step: float | None = None
    sgd_decaying: bool = True
    batch_growth: float = 1.05         # policy A variance-control schedule
    eps1: float = 1e-2                 # subspace entry threshold on ||F||_inf
    eps2: float = 1e-10                # subspace freeze threshold on |x_i|
    subspace_cap_factor: int = 20
    max_cycles: int | None = None      # exact outer-cycle budget (svrg methods)
    max_iters: int | None = None
    track_iterates: bool = False
    track_steps: bool = False
    x0: np.ndarray | None = None
    clock: str = "wall"                # wall | none (zeroed, for bit-exact traces)

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.epochs <= 0:
            raise ValueError("epochs budget must be positive")


@dataclass
class RunResult:
    x: np.ndarray
    trace: list
    status: str                    # "tol" | "budget"
    epochs: float
    ifo: int
    cycles: int
    psi: float
    history: list | None = None
    history_weights: list | None = None
    step_sq: list | None = None


@dataclass
class ReferenceResult:
    x: np.ndarray
    psi_star: float
    converged: bool
    iterations: int


# ---------------------------------------------------------------------------
# step-size policies


def rel_err(psi, psi_star):
    """(psi - psi_star) / max(1, |psi_star|), unclamped."""
    if not np.isfinite(psi_star):
        raise ValueError("psi_star must be finite")
    return (psi - psi_star) / max(1.0, abs(psi_star))


def policy_A_theory(L_f, nu_bar, alpha, beta, rho_bar):
    """Constant safe steps: lam_plus = (1-rho_bar)/L_f and

    lam = (1-rho_bar) * lam_plus / (1 + nu_bar^2 (alpha + L_f beta lam_plus)^2).
    """
    if not 0.0 < rho_bar < 1.0:
        raise ValueError("rho_bar must be in (0, 1)")
    if nu_bar < 1.0:
        raise ValueError("nu_bar must be >= 1")
    lam_plus = (1.0 - rho_bar) / L_f
    lam = (1.0 - rho_bar) * lam_plus / (1.0 + nu_bar**2 * (alpha + L_f * beta * lam_plus) ** 2)
    return StepPlan(lam=lam, lam_plus=lam_plus, alpha=alpha, beta=beta)


def implied_rho_lower(plan):
    """The lower step-ratio lam/lam_plus implied by a plan."""
    return plan.lam / plan.lam_plus


def policy_B_decaying_alpha(L_f, nu_bar, k):
    """Decaying schedule: lam_plus = 1/(6 L_f sqrt(k+1)), beta = 1/(9 L_f nu_bar),
    alpha = L_f beta lam_plus, lam = lam_plus."""
    if nu_bar <= 0:
        raise ValueError("nu_bar must be positive")
    lam_plus = 1.0 / (6.0 * L_f * math.sqrt(k + 1.0))
    beta = 1.0 / (9.0 * L_f * nu_bar)
    alpha = L_f * beta * lam_plus
    return StepPlan(lam=lam_plus, lam_plus=lam_plus, alpha=alpha, beta=beta)


GOLDEN_GAMMA = (math.sqrt(5.0) - 1.0) / 2.0


def policy_C_corollary(N, L, nu_bar):
    """Complexity-optimal constants: K = ceil(N^(1/3)), b = b_plus = K^2,
    lam_plus = gamma/L, lam = gamma/(L (1 + 3 nu_bar^2)), gamma the golden ratio
    conjugate. Requires nu_bar to dominate alpha_k nu_k and beta_k nu_k."""
    if nu_bar <= 0:
        raise ValueError("nu_bar must be positive")
    K = int(math.ceil(N ** (1.0 / 3.0) - 1e-9))
    b = K * K
    lam_plus = GOLDEN_GAMMA / L
    lam = GOLDEN_GAMMA / (L * (1.0 + 3.0 * nu_bar**2))
    return K, b, b, StepPlan(lam=lam, lam_plus=lam_plus, alpha=1.0, beta=1.0)


ADAPTIVE_CLIP_LO = 1e-3
ADAPTIVE_CLIP_HI = 1e3
ADAPTIVE_EMA = 0.1


def policy_adaptive(prev, x, z, F_x, F_z):
    """Curvature-probe update of lam_plus from the last extra step.

    lam1 = ||z - x|| min(1, lam) / ||F_z - F_x||, clipped to [1e-3, 1e3],
    then blended into the running lam_plus with weight 0.1; lam is half of
    lam_plus and alpha = beta = 1. Degenerate steps keep the previous plan.
    """
    diff = float(np.linalg.norm(F_z - F_x))
    move = float(np.linalg.norm(z - x))
    if diff == 0.0 or move == 0.0:
        return prev
    lam1 = move * min(1.0, prev.lam) / diff
    lam2 = min(ADAPTIVE_CLIP_HI, max(ADAPTIVE_CLIP_LO, lam1))
    lam_plus = (1.0 - ADAPTIVE_EMA) * prev.lam_plus + ADAPTIVE_EMA * lam2
    return StepPlan(lam=0.5 * lam_plus, lam_plus=lam_plus, alpha=1.0, beta=1.0)


class _PolicyDriver:
    """Per-iteration plan supplier, optionally stateful (adaptive)."""

    is_adaptive = False
    check_safety = False

    def plan_for(self, k):
        raise NotImplementedError

    def observe(self, x, z, F_x, F_z):
        pass


class _FixedPolicy(_PolicyDriver):
    def __init__(self, plan, check_safety=False):
        self.plan = plan
        self.check_safety = check_safety

    def plan_for(self, k):
        return self.plan


class _PolicyB(_PolicyDriver):
    def __init__(self, L_f, nu_bar):
        self.L_f = L_f
        self.nu_bar = nu_bar

    def plan_for(self, k):
        return policy_B_decaying_alpha(self.L_f, self.nu_bar, k)


class _SgdPolicy(_PolicyDriver):
    def __init__(self, step, decaying):
        self.step = step
        self.decaying = decaying

    def plan_for(self, k):
        lam = self.step / math.sqrt(k + 1.0) if self.decaying else self.step
        return StepPlan(lam=lam, lam_plus=lam, alpha=0.0, beta=0.0)


class _AdaptivePolicy(_PolicyDriver):
    is_adaptive = True

    def __init__(self, lam_plus0):
        self.plan = StepPlan(lam=0.5 * lam_plus0, lam_plus=lam_plus0, alpha=1.0, beta=1.0)

    def plan_for(self, k):
        return self.plan

    def observe(self, x, z, F_x, F_z):
        self.plan = policy_adaptive(self.plan, x, z, F_x, F_z)


def sample_output(history, weights, rng):
    """Draw one stored iterate with probability proportional to its weight."""
    if len(history) == 0:
        raise ValueError("empty iterate history")
    w = np.asarray(weights, dtype=np.float64)
    if len(w) != len(history) or np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive, finite, one per iterate")
    idx = int(rng.choice(len(history), p=w / w.sum()))
    return history[idx]


# ---------------------------------------------------------------------------
# run loop


class _Tracker:
    """Epoch/IFO accounting plus per-epoch trace logging and termination."""

    def __init__(self, comp, cfg, t0):
        self.comp = comp
        self.cfg = cfg
        self.N = comp.smooth.num_components
        self.ifo = 0
        self.records = []
        self.next_boundary = 0
        self.t0 = t0

    @property
    def epoch(self):
        return self.ifo / self.N

    def charge(self, units):
        self.ifo += int(units)

    def budget_left(self):
        return self.epoch < self.cfg.epochs

    def due(self):
        return self.epoch >= self.next_boundary

    def log(self, x, res_over_lam):
        """Append a trace row; returns True when the tolerance is reached."""
        cfg = self.cfg
        psi = self.comp.psi(x)
        if not np.isfinite(psi):
            raise FloatingPointError(f"non-finite objective at epoch {self.epoch:.3f}")
        err = rel_err(psi, cfg.psi_star) if cfg.psi_star is not None else math.nan
        smooth = self.comp.smooth
        train_acc = test_acc = math.nan
        if isinstance(smooth, LogRegProblem):
            train_acc = accuracy(x, smooth.dataset)
            if getattr(cfg, "_test_dataset", None) is not None:
                test_acc = accuracy(x, cfg._test_dataset)
        wall = 0.0 if cfg.clock == "none" else time.perf_counter() - self.t0
        self.records.append(TraceRecord(
            epoch=self.epoch, wall_seconds=wall, psi=psi, rel_err=err,
            nnz=nnz(x), train_acc=train_acc, test_acc=test_acc,
            residual_norm=res_over_lam))
        self.next_boundary = math.floor(self.epoch) + 1
        if cfg.psi_star is not None:
            return err <= cfg.tol
        return res_over_lam <= cfg.tol


def _default_batch(N):
    return max(1, min(300, int(0.01 * N)))


def _resolve(comp, config):
    cfg = replace(config)
    cfg._test_dataset = getattr(config, "_test_dataset", None)
    smooth = comp.smooth
    N = smooth.num_components
    method = cfg.method
    if method not in ("seqn", "seqn_vr", "prox_sgd", "prox_svrg"):
        raise ValueError(f"unknown method {method!r}")
    allowed = {
        "seqn": {"A_theory", "B_decaying_alpha", "adaptive"},
        "seqn_vr": {"C_corollary", "adaptive"},
        "prox_sgd": {"adaptive"},
        "prox_svrg": {"adaptive"},
    }[method]
    if cfg.policy not in allowed:
        raise ValueError(f"policy {cfg.policy!r} is not valid for method {method!r}")
    if method in ("prox_sgd", "prox_svrg"):
        if cfg.direction_kind not in (None, "identity"):
            raise ValueError(f"method {method!r} only supports the identity direction")
        cfg.direction_kind = "identity"
    elif cfg.direction_kind is None:
        cfg.direction_kind = "coord_lbfgs"
    if cfg.nu_bar is None:
        cfg.nu_bar = 1.0 if cfg.direction_kind == "identity" else 10.0

    if method == "prox_svrg":
        cfg.K = cfg.K if cfg.K is not None else max(1, int(1.5 * N))
        cfg.b = cfg.b if cfg.b is not None else 1
        cfg.b_plus = cfg.b
        cfg.reuse_batch = True
    elif method == "seqn_vr" and cfg.policy == "C_corollary":
        K, b, b_plus, plan = policy_C_corollary(N, smooth.lipschitz_uniform, cfg.nu_bar)
        cfg.K = cfg.K if cfg.K is not None else K
        cfg.b = cfg.b if cfg.b is not None else min(b, N)
        cfg.b_plus = cfg.b_plus if cfg.b_plus is not None else min(b_plus, N)
        cfg._policy_plan = plan
    else:
        cfg.K = cfg.K if cfg.K is not None else 10
        cfg.b = cfg.b if cfg.b is not None else _default_batch(N)
        cfg.b_plus = cfg.b_plus if cfg.b_plus is not None else cfg.b
    if not (0 < cfg.b <= N) or not (0 < cfg.b_plus <= N):
        raise ValueError(f"batch sizes must lie in (0, {N}]")
    return cfg


def _make_policy(cfg, smooth):
    L_f = smooth.lipschitz_avg
    if cfg.method == "prox_sgd":
        step = cfg.sgd_step if cfg.sgd_step is not None else 1.0 / L_f
        return _SgdPolicy(step, cfg.sgd_decaying)
    if cfg.method == "prox_svrg":
        step = cfg.sgd_step if cfg.sgd_step is not None else 1.0 / L_f
        return _FixedPolicy(StepPlan(lam=step, lam_plus=step, alpha=0.0, beta=0.0))
    if cfg.policy == "A_theory":
        plan = policy_A_theory(L_f, cfg.nu_bar, cfg.alpha, cfg.beta, cfg.rho_bar)
        return _FixedPolicy(plan, check_safety=True)
    if cfg.policy == "B_decaying_alpha":
        return _PolicyB(L_f, cfg.nu_bar)
    if cfg.policy == "C_corollary":
        return _FixedPolicy(cfg._policy_plan, check_safety=True)
    # adaptive: first step from the uniform Lipschitz bound
    return _AdaptivePolicy(1.0 / smooth.lipschitz_uniform)


class _SubspacePhase:
    """Freeze near-zero coordinates near optimality and solve the reduced
    fixed-point problem with a fresh full L-BFGS on the free block."""

    def __init__(self, cfg, dim):
        self.cfg = cfg
        self.dim = dim
        self.active = False
        self.done = False
        self.frozen = None
        self.saved_gen = None
        self.entry = math.inf
        self.iters = 0
        self.cap = cfg.subspace_cap_factor * (cfg.K or 10)

    def eligible(self, N):
        return (self.cfg.subspace_enabled and not self.active and not self.done
                and self.dim > N)

    def maybe_enter(self, x, F_x, gen):
        if float(np.abs(F_x).max(initial=0.0)) >= self.cfg.eps1:
            return gen
        frozen = np.flatnonzero(np.abs(x) < self.cfg.eps2)
        if len(frozen) == 0:
            return gen
        if len(frozen) == self.dim:
            self.done = True
            return gen
        self.active = True
        self.frozen = frozen
        self.saved_gen = gen
        self.iters = 0
        return LbfgsDirection(memory=self.cfg.memory, delta=self.cfg.delta_curvature)

    def mask(self, vec):
        out = vec.copy()
        out[self.frozen] = 0.0
        return out

    def maybe_exit(self, res_over_lam, gen):
        self.iters += 1
        if res_over_lam <= min(5e-7, 0.01 * self.entry) or self.iters >= self.cap:
            self.active = False
            self.done = True
            restored, self.saved_gen = self.saved_gen, None
            return restored
        return gen


def resolve_config(comp, config):
    """Public copy of the per-method default resolution (manifest echo)."""
    return _resolve(comp, config)


def _run_loop(comp, config):
    cfg = _resolve(comp, config)
    smooth, phi = comp.smooth, comp.nonsmooth
    N, dim = smooth.num_components, smooth.dim
    rng = np.random.default_rng(np.random.Philox(cfg.seed))
    gen = make_direction_generator(cfg.direction_kind, memory=cfg.memory, zeta=cfg.zeta,
                                   delta=cfg.delta_curvature, delta1=cfg.delta_curvature)
    policy = _make_policy(cfg, smooth)
    svrg = cfg.method in ("seqn_vr", "prox_svrg")

    x = np.zeros(dim) if cfg.x0 is None else np.array(cfg.x0, dtype=np.float64, copy=True)
    tracker = _Tracker(comp, cfg, time.perf_counter())
    history = [] if cfg.track_iterates else None
    hist_w = [] if cfg.track_iterates else None
    step_sq = [] if cfg.track_steps else None
    sub = _SubspacePhase(cfg, dim)

    # initial row from the exact residual; may already satisfy the tolerance
    plan0 = policy.plan_for(0)
    res0 = residual(x, full_gradient(smooth, x), ScaledMetric(plan0.lam), phi)
    status = "budget"
    if tracker.log(x, float(np.linalg.norm(res0)) / plan0.lam):
        return RunResult(x=x, trace=tracker.records, status="tol", epochs=tracker.epoch,
                         ifo=tracker.ifo, cycles=0, psi=tracker.records[-1].psi,
                         history=history, history_weights=hist_w, step_sq=step_sq)

    snap = None
    cycles = 0
    j = 0
    res_over_lam = tracker.records[-1].residual_norm
    while True:
        if not tracker.budget_left() or (cfg.max_iters is not None and j >= cfg.max_iters):
            break
        if svrg and j % cfg.K == 0:
            if cfg.max_cycles is not None and cycles >= cfg.max_cycles:
                break
            snap = make_snapshot(smooth, x)
            tracker.charge(N)
            cycles += 1
            if tracker.due():
                plan_here = policy.plan_for(j)
                exact = residual(x, snap.anchor_gradient, ScaledMetric(plan_here.lam), phi)
                res_over_lam = float(np.linalg.norm(exact)) / plan_here.lam
                if tracker.log(x, res_over_lam):
                    status = "tol"
                    break
            if not tracker.budget_left():
                break

        plan = policy.plan_for(j)
        if policy.check_safety and not (plan.lam <= plan.lam_plus <= 1.0 / smooth.lipschitz_avg + 1e-15):
            raise AssertionError(f"unsafe step plan under policy {cfg.policy}: {plan}")

        if history is not None:
            history.append(x.copy())
            hist_w.append(plan.lam_plus)

        # oracle at x over a fresh sample set
        b = cfg.b
        if cfg.method == "seqn" and cfg.policy == "A_theory":
            grown = cfg.b * cfg.batch_growth**j
            b = N if grown >= N else int(math.ceil(grown))
        S = sample_without_replacement(rng, N, b)
        tracker.charge(len(S))
        v = (oracle_at("svrg", smooth, x, S, snap) if svrg
             else minibatch_gradient(smooth, x, S))
        metric = ScaledMetric(plan.lam)
        F_x = residual(x, v, metric, phi)

        if svrg and sub.eligible(N):
            entered = sub.maybe_enter(x, F_x, gen)
            if sub.active:
                gen = entered
                sub.entry = float(np.linalg.norm(F_x)) / plan.lam
        if sub.active:
            F_x = sub.mask(F_x)

        d = direction(gen, F_x)
        z = x + plan.beta * d

        # trial-point oracle; reuse evaluates the same sample set at z for free
        need_Fz = gen.wants_pairs or policy.is_adaptive
        v_z = None
        if cfg.reuse_batch or need_Fz:
            v_z = (oracle_at("svrg", smooth, z, S, snap) if svrg
                   else oracle_at("minibatch", smooth, z, S))
        if cfg.reuse_batch:
            v_plus = v_z
        else:
            S_plus = sample_without_replacement(rng, N, cfg.b_plus)
            tracker.charge(len(S_plus))
            v_plus = (oracle_at("svrg", smooth, z, S_plus, snap) if svrg
                      else minibatch_gradient(smooth, z, S_plus))

        upd_v = sub.mask(v_plus) if sub.active else v_plus
        x_new = phi.prox(ScaledMetric(plan.lam_plus),
                         x + plan.alpha * d - plan.lam_plus * upd_v)
        if sub.active:
            x_new[sub.frozen] = x[sub.frozen]
        if not np.all(np.isfinite(x_new)):
            raise FloatingPointError(f"non-finite iterate at step {j}")

        # curvature pair from residual differences at the same metric and sample set
        if need_Fz:
            F_z = residual(z, v_z, metric, phi)
            if sub.active:
                F_z = sub.mask(F_z)
            if gen.wants_pairs:
                gen.notify_pair(z - x, F_z - F_x)
            policy.observe(x, z, F_x, F_z)

        if step_sq is not None:
            delta = x_new - x
            step_sq.append(float(delta @ delta))
        x = x_new
        j += 1
        res_over_lam = float(np.linalg.norm(F_x)) / plan.lam
        if sub.active:
            gen = sub.maybe_exit(res_over_lam, gen)

        if tracker.due():
            if tracker.log(x, res_over_lam):
                status = "tol"
                break

    if status != "tol" and tracker.records[-1].epoch < tracker.epoch:
        # close the trace with the final iterate
        if tracker.log(x, res_over_lam):
            status = "tol"
    return RunResult(x=x, trace=tracker.records, status=status, epochs=tracker.epoch,
                     ifo=tracker.ifo, cycles=cycles, psi=tracker.records[-1].psi,
                     history=history, history_weights=hist_w, step_sq=step_sq)


def run_seqn(comp, config):
    """Extra-step quasi-Newton with plain mini-batch oracles."""
    if config.method != "seqn":
        raise ValueError("config.method must be 'seqn'")
    return _run_loop(comp, config)


def run_seqn_vr(comp, config):
    """Extra-step quasi-Newton with variance reduction (snapshot inner loops)."""
    if config.method != "seqn_vr":
        raise ValueError("config.method must be 'seqn_vr'")
    return _run_loop(comp, config)


def run_prox_sgd(comp, config):
    """Proximal SGD baseline: alpha = beta = 0, identity direction."""
    if config.method != "prox_sgd":
        raise ValueError("config.method must be 'prox_sgd'")
    return _run_loop(comp, config)


def run_prox_svrg(comp, config):
    """Vanilla proximal SVRG baseline: b = 1, K = floor(1.5 N), step 1/L_f."""
    if config.method != "prox_svrg":
        raise ValueError("config.method must be 'prox_svrg'")
    return _run_loop(comp, config)


def run(comp, config):
    return _run_loop(comp, config)


# ---------------------------------------------------------------------------
# deterministic reference


def run_reference(comp, tol_ref=1e-10, x0=None, max_iters=500_000):
    """High-accuracy psi* by plain proximal gradient with step 1/L_f.

    Stops once the residual norm over the step drops below tol_ref and the
    objective is stable to 1e-12 relative change; hitting the iteration cap
    returns the best point found with converged=False.
    """
    smooth, phi = comp.smooth, comp.nonsmooth
    lam = 1.0 / smooth.lipschitz_avg
    metric = ScaledMetric(lam)
    x = np.zeros(smooth.dim) if x0 is None else np.array(x0, dtype=np.float64, copy=True)
    psi_prev = math.inf
    for it in range(max_iters):
        g = full_gradient(smooth, x)
        p = phi.prox(metric, x - lam * g)
        res = float(np.linalg.norm(x - p)) / lam
        psi = comp.psi(x)
        if res <= tol_ref and (it == 0 or abs(psi_prev - psi) <= 1e-12 * max(1.0, abs(psi))):
            return ReferenceResult(x=x, psi_star=psi, converged=True, iterations=it)
        x = p
        psi_prev = psi
    return ReferenceResult(x=x, psi_star=comp.psi(x), converged=False, iterations=max_iters)


# ---------------------------------------------------------------------------
# inequality evaluators (test support)


def check_descent_inequality(x, d, v, v_plus, plan, comp, rho=None, slack=1e-8):
    """Evaluate both sides of the one-step objective-change bound.

    The bound is deterministic: it holds for arbitrary d, v, v_plus as long
    as L_f upper-bounds the gradient Lipschitz constant. Returns
    (lhs, rhs, lhs <= rhs + slack).
    """
    smooth, phi = comp.smooth, comp.nonsmooth
    L_f = smooth.lipschitz_avg
    lam, lam_plus, alpha, beta = plan.lam, plan.lam_plus, plan.alpha, plan.beta
    if rho is None:
        rho = 1.0 / lam
    z = x + beta * d
    gx = full_gradient(smooth, x)
    gz = full_gradient(smooth, z)
    p_plus = phi.prox(ScaledMetric(lam_plus), x + alpha * d - lam_plus * v_plus)
    p_v = phi.prox(ScaledMetric(lam), x - lam * v)
    p_exact = phi.prox(ScaledMetric(lam), x - lam * gx)
    F_v = x - p_v
    F_exact = x - p_exact
    ell = lam_plus * (alpha / lam_plus + L_f * beta) ** 2

    def sq(a):
        return float(a @ a)

    lhs = 2.0 * (comp.psi(p_plus) - comp.psi(x))
    rhs = (sq(gx - v) / rho
           + lam_plus * sq(gz - v_plus)
           + (1.0 / lam_plus - 1.0 / lam) * sq(F_v)
           + (L_f - 1.0 / lam_plus) * sq(p_plus - x)
           + (rho - 1.0 / lam) * sq(p_v - p_exact)
           + ell * sq(d)
           - sq(F_exact) / lam
           + 2.0 * float((gz - v_plus) @ (lam_plus * (gx - gz) + alpha * d)))
    return lhs, rhs, lhs <= rhs + slack


class _TiltedSmooth:
    """Smooth part f(y) + ||y - c||^2 / (2 theta) for the proximal subproblem."""

    def __init__(self, base, center, theta):
        self.base = base
        self.center = np.asarray(center, dtype=np.float64)
        self.theta = theta

    @property
    def num_components(self):
        return self.base.num_components

    @property
    def dim(self):
        return self.base.dim

    @property
    def lipschitz_avg(self):
        return self.base.lipschitz_avg + 1.0 / self.theta

    @property
    def lipschitz_uniform(self):
        return self.base.lipschitz_uniform + 1.0 / self.theta

    def value(self, y):
        dlt = y - self.center
        return self.base.value(y) + float(dlt @ dlt) / (2.0 * self.theta)

    def batch_gradient(self, rows, y):
        return self.base.batch_gradient(rows, y) + (y - self.center) / self.theta


def proximal_point(comp, x, theta, tol=1e-12):
    """argmin_y psi(y) + ||y - x||^2/(2 theta), solved by the reference solver."""
    from .oracles import CompositeProblem

    tilted = CompositeProblem(smooth=_TiltedSmooth(comp.smooth, x, theta),
                              nonsmooth=comp.nonsmooth)
    ref = run_reference(tilted, tol_ref=tol, x0=x)
    if not ref.converged:
        raise RuntimeError("inner proximal-point solve did not converge")
    return ref.x


def check_pointdiff_inequality(x, d, v_plus, plan, theta, comp, rho1=None, rho2=1.0,
                               slack=1e-8):
    """Evaluate both sides of the trial-point distance bound to the proximal
    point xbar of psi at x. Defaults rho1 = L_f lam_plus and rho2 = 1 follow
    the decaying-alpha analysis. Returns (lhs, rhs, holds)."""
    smooth, phi = comp.smooth, comp.nonsmooth
    L_f = smooth.lipschitz_avg
    lam_plus, alpha, beta = plan.lam_plus, plan.alpha, plan.beta
    if theta >= 1.0 / L_f:
        raise ValueError("theta must be below 1/L_f")
    if rho1 is None:
        rho1 = L_f * lam_plus
    xbar = proximal_point(comp, x, theta)
    z = x + beta * d
    gz = full_gradient(smooth, z)
    gbar = full_gradient(smooth, xbar)
    tau = 1.0 - lam_plus / theta
    mu_c = alpha + L_f * beta * lam_plus
    p_vec = lam_plus * (gbar - gz) + alpha * d
    p_plus = phi.prox(ScaledMetric(lam_plus), x + alpha * d - lam_plus * v_plus)

    def sq(a):
        return float(a @ a)

    lhs = sq(p_plus - xbar)
    rhs = (((1.0 + rho1) * tau**2 + 2.0 * L_f * lam_plus * tau
            + (1.0 + rho2) * L_f**2 * lam_plus**2) * sq(xbar - x)
           + (1.0 + 1.0 / rho1 + 1.0 / rho2) * mu_c**2 * sq(d)
           + 2.0 * lam_plus * float((tau * (xbar - x) - p_vec) @ (v_plus - gz))
           + lam_plus**2 * sq(gz - v_plus))
    return lhs, rhs, lhs <= rhs + slack
