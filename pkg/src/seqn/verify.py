"""Randomized property suites behind the `verify` CLI command.

Each suite returns a list of failure descriptions (empty = pass) and is
deterministic in the seed, so any reported counterexample can be replayed.
"""

import numpy as np

from . import prox
from .directions import CurvatureBuffer, lbfgs_apply, nu_bar_bound, try_push_pair
from .oracles import CompositeProblem, full_gradient, minibatch_gradient, SampleSet
from .prox import L1Norm, ScaledMetric
from .solver import StepPlan, check_descent_inequality
from .synthetic import QuadraticSumProblem


def _fail(name, seed, case, detail):
    return {"property": name, "seed": seed, "case": case, "detail": detail}


def prox_suite(seed=0, cases=1000):
    """Firm nonexpansiveness, prox optimality, envelope gradient, scaling."""
    rng = np.random.default_rng(np.random.Philox(seed))
    failures = []
    for c in range(cases):
        n = int(rng.integers(1, 12))
        lam = float(10.0 ** rng.uniform(-2, 2))
        mu = float(10.0 ** rng.uniform(-3, 1))
        phi = L1Norm(mu)
        metric = ScaledMetric(lam)
        x = rng.normal(0, 3, n)
        y = rng.normal(0, 3, n)
        px, py = phi.prox(metric, x), phi.prox(metric, y)
        gap = float((px - py) @ (px - py)) - float((x - y) @ (px - py))
        if gap > 1e-12:
            failures.append(_fail("firm_nonexpansive", seed, c,
                                  {"lam": lam, "mu": mu, "x": x.tolist(), "y": y.tolist(),
                                   "violation": gap}))
        # prox optimality against a random competitor
        comp_pt = px + rng.normal(0, 1, n)
        obj_p = phi.value(px) + float((x - px) @ (x - px)) / (2 * lam)
        obj_c = phi.value(comp_pt) + float((x - comp_pt) @ (x - comp_pt)) / (2 * lam)
        if obj_p > obj_c + 1e-12:
            failures.append(_fail("prox_optimality", seed, c,
                                  {"lam": lam, "mu": mu, "x": x.tolist(),
                                   "violation": obj_p - obj_c}))
        # scaling monotonicity of delta -> ||resid||/delta
        v = rng.normal(0, 2, n)
        deltas = np.sort(10.0 ** rng.uniform(-1.5, 1.5, 4)).tolist()
        seq = prox.residual_scaling_check(x, v, phi, deltas)
        for a, b in zip(seq, seq[1:]):
            if b > a + 1e-12:
                failures.append(_fail("residual_scaling", seed, c,
                                      {"deltas": deltas, "seq": seq}))
                break
    # envelope gradient identity on a coarser sample (finite differences)
    for c in range(min(cases, 100)):
        n = int(rng.integers(1, 8))
        lam = float(10.0 ** rng.uniform(-1, 1))
        mu = float(10.0 ** rng.uniform(-2, 0.5))
        phi = L1Norm(mu)
        metric = ScaledMetric(lam)
        x = rng.normal(0, 2, n)
        kink = np.abs(np.abs(x) - lam * mu) < 1e-4
        g_formula = (x - phi.prox(metric, x)) / lam
        h = 1e-6
        for i in range(n):
            if kink[i]:
                continue
            e = np.zeros(n)
            e[i] = h
            fd = (prox.moreau_envelope(x + e, metric, phi)
                  - prox.moreau_envelope(x - e, metric, phi)) / (2 * h)
            denom = max(1.0, abs(g_formula[i]))
            if abs(fd - g_formula[i]) / denom > 1e-6:
                failures.append(_fail("envelope_gradient", seed, c,
                                      {"i": i, "fd": fd, "formula": g_formula[i]}))
    return failures


def oracle_suite(seed=0, cases=50):
    """Exhaustive unbiasedness and the variance-reduction error bound."""
    from itertools import combinations

    rng = np.random.default_rng(np.random.Philox(seed))
    failures = []
    for c in range(cases):
        N = int(rng.integers(2, 7))
        dim = int(rng.integers(1, 5))
        problem = QuadraticSumProblem(rng.normal(0, 1, (N, dim)),
                                      rng.uniform(0.5, 2.0, (N, dim)))
        x = rng.normal(0, 1, dim)
        g = full_gradient(problem, x)
        for b in range(1, N + 1):
            subsets = list(combinations(range(N), b))
            acc = np.zeros(dim)
            for sub in subsets:
                acc += minibatch_gradient(problem, x, SampleSet(np.array(sub)))
            acc /= len(subsets)
            if np.abs(acc - g).max() > 1e-14:
                failures.append(_fail("minibatch_unbiased", seed, c,
                                      {"N": N, "b": b, "max_err": float(np.abs(acc - g).max())}))
        # svrg error bound over all singletons
        from .oracles import make_snapshot, svrg_gradient

        anchor = x + rng.normal(0, 0.5, dim)
        snap = make_snapshot(problem, anchor)
        L = problem.lipschitz_uniform
        bound = L**2 * float((x - anchor) @ (x - anchor))
        mean_sq = 0.0
        for i in range(N):
            v = svrg_gradient(problem, x, SampleSet(np.array([i])), snap)
            mean_sq += float((g - v) @ (g - v)) / N
        if mean_sq > bound + 1e-12:
            failures.append(_fail("svrg_variance_bound", seed, c,
                                  {"mean_sq": mean_sq, "bound": bound}))
    return failures


def _dense_lbfgs(pairs, gamma, n):
    W = gamma * np.eye(n)
    for u, y in pairs:
        rho = 1.0 / float(y @ u)
        left = np.eye(n) - rho * np.outer(u, y)
        W = left @ W @ left.T + rho * np.outer(u, u)
    return W


def direction_suite(seed=0, cases=200):
    """Two-loop vs dense recursion, plus the operator-norm certificate."""
    rng = np.random.default_rng(np.random.Philox(seed))
    failures = []
    for c in range(cases):
        n = int(rng.integers(2, 9))
        p = int(rng.integers(1, 5))
        buf = CurvatureBuffer(memory=p, delta=1e-4)
        while len(buf) < p:
            u = rng.normal(0, 1, n)
            y = u * rng.uniform(0.2, 2.0) + rng.normal(0, 0.3, n)
            try_push_pair(buf, u, y)
        pairs = [(q.u, q.y) for q in buf.pairs]
        gamma = float(pairs[-1][0] @ pairs[-1][1]) / float(pairs[-1][1] @ pairs[-1][1])
        W = _dense_lbfgs(pairs, gamma, n)
        r = rng.normal(0, 1, n)
        two_loop = lbfgs_apply(buf, r)
        if np.abs(two_loop - W @ r).max() > 1e-11:
            failures.append(_fail("lbfgs_dense_equiv", seed, c,
                                  {"n": n, "p": p,
                                   "max_err": float(np.abs(two_loop - W @ r).max())}))
        ell = max(0.0, max(float(np.linalg.norm(y) / np.linalg.norm(u)) - 2.0
                           for u, y in pairs))
        cert = nu_bar_bound(p, buf.delta, ell, 1.0)
        op_norm = float(np.linalg.norm(W, 2))
        if op_norm > cert:
            failures.append(_fail("norm_certificate", seed, c,
                                  {"op_norm": op_norm, "cert": cert}))
    return failures


def descent_suite(seed=0, cases=200):
    """The deterministic one-step objective-change bound under random noise."""
    rng = np.random.default_rng(np.random.Philox(seed))
    failures = []
    for c in range(cases):
        N = int(rng.integers(2, 6))
        dim = int(rng.integers(1, 6))
        problem = QuadraticSumProblem(rng.normal(0, 1, (N, dim)),
                                      rng.uniform(0.5, 3.0, (N, dim)))
        comp = CompositeProblem(smooth=problem, nonsmooth=L1Norm(float(10.0 ** rng.uniform(-3, 0))))
        L_f = problem.lipschitz_avg
        lam_plus = float(rng.uniform(0.05, 1.0)) / L_f
        lam = float(rng.uniform(0.05, 1.0)) * lam_plus
        plan = StepPlan(lam=lam, lam_plus=lam_plus,
                        alpha=float(rng.uniform(0, 1.5)), beta=float(rng.uniform(0, 1.5)))
        x = rng.normal(0, 1, dim)
        d = rng.normal(0, 1, dim)
        v = full_gradient(problem, x) + rng.normal(0, 0.5, dim)
        v_plus = full_gradient(problem, x + plan.beta * d) + rng.normal(0, 0.5, dim)
        lhs, rhs, ok = check_descent_inequality(x, d, v, v_plus, plan, comp)
        if not ok:
            failures.append(_fail("descent_inequality", seed, c,
                                  {"lhs": lhs, "rhs": rhs, "x": x.tolist(), "d": d.tolist()}))
    return failures


SUITES = {
    "prox": prox_suite,
    "oracles": oracle_suite,
    "directions": direction_suite,
    "descent": descent_suite,
}
