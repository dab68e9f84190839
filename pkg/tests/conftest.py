import numpy as np
import pytest

from seqn import QuadraticSumProblem, make_l1_logreg, make_synthetic_logreg, run_reference
from seqn.oracles import CompositeProblem
from seqn.prox import L1Norm


@pytest.fixture(scope="session")
def toy_dataset():
    # small, easy instance: mild value spread, frequent support
    return make_synthetic_logreg(200, 20, seed=7, support=6, p_support=0.5,
                                 val_top=1.6, val_decay=2.0, margin_mass=1.0)


@pytest.fixture(scope="session")
def toy_problem(toy_dataset):
    return make_l1_logreg(toy_dataset)


@pytest.fixture(scope="session")
def toy_reference(toy_problem):
    ref = run_reference(toy_problem, tol_ref=1e-12)
    assert ref.converged
    return ref


def random_quadratic_composite(rng, max_components=6, max_dim=6, mu_exp=(-3, 0)):
    n_comp = int(rng.integers(2, max_components + 1))
    dim = int(rng.integers(1, max_dim + 1))
    problem = QuadraticSumProblem(rng.normal(0, 1, (n_comp, dim)),
                                  rng.uniform(0.5, 3.0, (n_comp, dim)))
    mu = float(10.0 ** rng.uniform(*mu_exp))
    return CompositeProblem(smooth=problem, nonsmooth=L1Norm(mu))
