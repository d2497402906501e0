import math

import numpy as np
import pytest

from polytorus import DirichletPolynomial, TorusPointMassMeasure, first_primes


def random_dirichlet(rng, d=3, max_terms=10, max_exp=4, unit_term=False):
    """Random polynomial over the first ``d`` primes with bounded exponents.

    ``unit_term`` forces a frequency-1 term with |a| >= 0.5 so means stay
    bounded away from zero (needed when testing relative tolerances).
    """
    primes = first_primes(d)
    terms = {}
    n_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(n_terms):
        exps = rng.integers(0, max_exp + 1, size=d)
        n = 1
        for p, e in zip(primes, exps):
            n *= p ** int(e)
        mag = rng.uniform(0.3, 1.2)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        terms[n] = mag * complex(math.cos(phase), math.sin(phase))
    if unit_term:
        terms[1] = complex(rng.uniform(0.5, 1.5), 0.0)
    return DirichletPolynomial(terms)


def random_point_mass(rng, d, n_atoms):
    """Random point-mass measure with float-normalized weights."""
    raw = rng.uniform(0.2, 1.0, size=n_atoms)
    weights = raw / raw.sum()
    atoms = [
        (tuple(rng.uniform(0.0, 2.0 * math.pi, size=d)), float(w))
        for w in weights
    ]
    return TorusPointMassMeasure(atoms, dimension=d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
