"""Command-line harness: run solvers, compute references, compare traces,
and drive the property suites.

Exit codes: run -> 0 tolerance reached, 2 budget exhausted, 1 usage/data
error; reference -> 0 converged, 2 cap hit; verify -> 0 all pass, 3 any
property violation; compare -> 0, or 1 on inconsistent inputs.
"""

import argparse
import datetime
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .dataio import dataset_fingerprint, parse_libsvm
from .logreg import make_l1_logreg
from .solver import SolverConfig, rel_err, resolve_config, run, run_reference
from .trace import read_trace, write_trace

_METHODS = {"seqn": "seqn", "seqn-vr": "seqn_vr",
            "prox-sgd": "prox_sgd", "prox-svrg": "prox_svrg"}
_POLICIES = {"A": "A_theory", "B": "B_decaying_alpha",
             "C": "C_corollary", "adaptive": "adaptive"}


def _bool_flag(v):
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {v!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="seqn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a solver and write a CSV trace")
    run_p.add_argument("--data", required=True, help="LIBSVM training file")
    run_p.add_argument("--test", default=None, help="LIBSVM test file")
    run_p.add_argument("--method", choices=sorted(_METHODS), default="seqn-vr")
    run_p.add_argument("--direction", choices=["identity", "lbfgs", "coord-lbfgs"],
                       default=None)
    run_p.add_argument("--policy", choices=sorted(_POLICIES), default="adaptive")
    run_p.add_argument("--mu", default="auto", help="l1 weight, or 'auto' for 1/N")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--epochs", type=float, default=60.0)
    run_p.add_argument("--tol", type=float, default=1e-6)
    run_p.add_argument("--K", type=int, default=None)
    run_p.add_argument("--batch", type=int, default=None)
    run_p.add_argument("--batch-plus", type=int, default=None)
    run_p.add_argument("--reuse-batch", type=_bool_flag, default=True)
    run_p.add_argument("--subspace", type=_bool_flag, default=False)
    run_p.add_argument("--features", type=int, default=None,
                       help="override the feature count of the data files")
    run_p.add_argument("--ref", default=None, help="reference artifact from 'reference'")
    run_p.add_argument("--out", required=True, help="CSV trace output path")
    run_p.add_argument("--clock", choices=["wall", "none"], default="wall",
                       help="'none' zeroes wall times for bit-exact traces")

    ref_p = sub.add_parser("reference", help="compute a high-accuracy psi*")
    ref_p.add_argument("--data", required=True)
    ref_p.add_argument("--mu", default="auto")
    ref_p.add_argument("--features", type=int, default=None)
    ref_p.add_argument("--tol-ref", type=float, default=1e-10)
    ref_p.add_argument("--out", required=True)

    cmp_p = sub.add_parser("compare", help="summarize traces side by side")
    cmp_p.add_argument("traces", nargs="+", help="trace CSV files")
    cmp_p.add_argument("--tol", type=float, default=1e-6)
    cmp_p.add_argument("--json", default=None, help="JSON-lines mirror output path")

    ver_p = sub.add_parser("verify", help="run the registered property suites")
    ver_p.add_argument("--suite", default=None, help="restrict to one suite")
    ver_p.add_argument("--seeds", type=int, default=1, help="number of seeds per suite")
    ver_p.add_argument("--cases", type=int, default=None, help="cases per suite run")
    return p


def _load_dataset(path, features, name=None):
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset not found: {path}")
    return parse_libsvm(path, num_features=features, name=name or path)


def _resolve_mu(arg, n_train):
    if arg == "auto":
        return 1.0 / n_train
    return float(arg)


def write_reference_artifact(path, psi_star, x_star):
    with open(path, "w") as fh:
        fh.write(f"psi_star={float(psi_star)!r}\n")
        for i in np.flatnonzero(x_star):
            fh.write(f"{int(i)}:{float(x_star[i])!r}\n")


def read_reference_artifact(path, dim=None):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("psi_star="):
        raise ValueError(f"{path}: not a reference artifact")
    psi_star = float(lines[0].split("=", 1)[1])
    entries = []
    for ln in lines[1:]:
        i, v = ln.split(":", 1)
        entries.append((int(i), float(v)))
    x = None
    if dim is not None:
        x = np.zeros(dim)
        for i, v in entries:
            x[i] = v
    return psi_star, x


def cmd_run(args):
    train = _load_dataset(args.data, args.features)
    test = _load_dataset(args.test, args.features) if args.test else None
    if test is not None and args.features is None:
        n = max(train.num_features, test.num_features)
        train, test = train.with_num_features(n), test.with_num_features(n)
    mu = _resolve_mu(args.mu, len(train))
    comp = make_l1_logreg(train, mu)

    seed = int(os.environ.get("SEQN_SEED", args.seed))
    if args.ref:
        psi_star, _ = read_reference_artifact(args.ref)
    else:
        print("no --ref given: computing the reference solution first", file=sys.stderr)
        psi_star = run_reference(comp).psi_star

    config = SolverConfig(
        method=_METHODS[args.method],
        direction_kind=args.direction.replace("-", "_") if args.direction else None,
        policy=_POLICIES[args.policy],
        seed=seed, epochs=args.epochs, tol=args.tol,
        K=args.K, b=args.batch, b_plus=args.batch_plus,
        reuse_batch=args.reuse_batch, subspace_enabled=args.subspace,
        mu=mu, psi_star=psi_star, clock=args.clock)
    config._test_dataset = test

    result = run(comp, config)
    resolved = resolve_config(comp, config)
    manifest = {
        "config": {
            "method": args.method, "direction": resolved.direction_kind,
            "policy": args.policy, "mu": mu, "epochs": args.epochs, "tol": args.tol,
            "K": resolved.K, "batch": resolved.b, "batch_plus": resolved.b_plus,
            "reuse_batch": resolved.reuse_batch, "subspace": resolved.subspace_enabled,
        },
        "seed": seed,
        "dataset": dataset_fingerprint(args.data),
        "version": __version__,
        "started": ("1970-01-01T00:00:00Z" if args.clock == "none" else
                    datetime.datetime.now(datetime.timezone.utc)
                    .isoformat(timespec="seconds")),
    }
    write_trace(args.out, manifest, result.trace)
    final = result.trace[-1]
    print(f"{args.method}: status={result.status} epochs={final.epoch:.2f} "
          f"psi={final.psi:.9g} rel_err={max(0.0, final.rel_err):.3e} nnz={final.nnz}")
    return 0 if result.status == "tol" else 2


def cmd_reference(args):
    train = _load_dataset(args.data, args.features)
    mu = _resolve_mu(args.mu, len(train))
    comp = make_l1_logreg(train, mu)
    ref = run_reference(comp, tol_ref=args.tol_ref)
    write_reference_artifact(args.out, ref.psi_star, ref.x)
    print(f"psi_star={ref.psi_star!r} converged={ref.converged} iters={ref.iterations}")
    return 0 if ref.converged else 2


def _summarize(path, tol):
    manifest, records = read_trace(path)
    final = records[-1]
    epochs_to_tol = None
    for r in records:
        if not math.isnan(r.rel_err) and r.rel_err <= tol:
            epochs_to_tol = r.epoch
            break
    return {
        "trace": path,
        "method": (manifest or {}).get("config", {}).get("method", "?"),
        "dataset": (manifest or {}).get("dataset"),
        "rel_err": max(0.0, final.rel_err) if not math.isnan(final.rel_err) else None,
        "epochs": epochs_to_tol if epochs_to_tol is not None else final.epoch,
        "reached_tol": epochs_to_tol is not None,
        "nnz": final.nnz,
    }


def cmd_compare(args):
    rows = [_summarize(p, args.tol) for p in args.traces]
    prints = [r["dataset"] for r in rows if r["dataset"] is not None]
    if len(set(prints)) > 1:
        print("error: traces come from different datasets", file=sys.stderr)
        return 1
    best = min((r for r in rows if r["reached_tol"]), default=None, key=lambda r: r["epochs"])
    header = f"{'trace':<28} {'method':<10} {'rel_err':>10} {'epochs':>8} {'nnz':>8} best"
    print(header)
    print("-" * len(header))
    for r in rows:
        mark = "*" if best is not None and r is best else ""
        err = "n/a" if r["rel_err"] is None else f"{r['rel_err']:.2e}"
        print(f"{os.path.basename(r['trace']):<28} {r['method']:<10} {err:>10} "
              f"{r['epochs']:>8.2f} {r['nnz']:>8d} {mark}")
    if args.json:
        with open(args.json, "w") as fh:
            for r in rows:
                fh.write(json.dumps({**r, "best": best is not None and r is best},
                                    sort_keys=True) + "\n")
    return 0


def cmd_verify(args):
    from .verify import SUITES

    names = [args.suite] if args.suite else sorted(SUITES)
    for name in names:
        if name not in SUITES:
            print(f"error: unknown suite {name!r} (have {sorted(SUITES)})", file=sys.stderr)
            return 1
    any_fail = False
    for name in names:
        suite = SUITES[name]
        for seed in range(args.seeds):
            kwargs = {"seed": seed}
            if args.cases is not None:
                kwargs["cases"] = args.cases
            failures = suite(**kwargs)
            verdict = "PASS" if not failures else f"FAIL ({len(failures)} violations)"
            print(f"[{name} seed={seed}] {verdict}")
            for f in failures[:5]:
                print("  counterexample: " + json.dumps(f, default=str))
            any_fail = any_fail or bool(failures)
    return 3 if any_fail else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "reference": cmd_reference,
                "compare": cmd_compare, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
