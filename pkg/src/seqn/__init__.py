"""Stochastic extra-step quasi-Newton solvers for composite minimization
f(x) + phi(x), with l1-regularized logistic regression as the benchmark
problem family.
"""

__version__ = "0.1.0"

from .dataio import Dataset, parse_libsvm, split_train_test, write_libsvm
from .directions import (CoordLbfgsDirection, CurvatureBuffer, IdentityDirection,
                         LbfgsDirection, coord_lbfgs_apply, coordinate_partition,
                         direction, lbfgs_apply, lbfgs_gamma, nu_bar_bound,
                         try_push_pair)
from .kernels import BACKEND
from .logreg import LogRegProblem, accuracy, logreg_gradient, make_l1_logreg, nnz
from .oracles import (CompositeProblem, FiniteSumProblem, SampleSet, SvrgSnapshot,
                      full_gradient, make_snapshot, minibatch_gradient, oracle_at,
                      sample_without_replacement, svrg_gradient)
from .prox import (L1Norm, ProxFunction, ScaledMetric, ZeroFunction,
                   moreau_envelope, residual, residual_scaling_check,
                   soft_threshold)
from .solver import (ReferenceResult, RunResult, SolverConfig, StepPlan,
                     check_descent_inequality, check_pointdiff_inequality,
                     policy_A_theory, policy_B_decaying_alpha, policy_C_corollary,
                     policy_adaptive, proximal_point, rel_err, run, run_prox_sgd,
                     run_prox_svrg, run_reference, run_seqn, run_seqn_vr,
                     sample_output)
from .synthetic import QuadraticSumProblem, make_synthetic_logreg
