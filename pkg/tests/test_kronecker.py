import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polytorus import (
    BudgetExhaustedError,
    DomainError,
    KroneckerProblem,
    PrimeBasis,
    circle_distance,
    flow_angles,
    lattice_solve,
    residuals,
    scan_solve,
    solve,
)

TWO_PI = 2.0 * math.pi


def nearest_lattice_time(theta, log_p, t):
    """Closed-form d=1 solution lattice: t_q = (2*pi*q - theta) / log p."""
    q = round((t * log_p + theta) / TWO_PI)
    return (TWO_PI * q - theta) / log_p


class TestCircleDistance:
    @given(st.floats(-50, 50), st.floats(-50, 50))
    @settings(max_examples=100, deadline=None)
    def test_range_and_symmetry(self, a, b):
        d = float(circle_distance(a, b))
        assert 0.0 <= d <= math.pi + 1e-12
        assert d == pytest.approx(float(circle_distance(b, a)), abs=1e-9)

    @given(st.floats(-50, 50), st.integers(-5, 5))
    @settings(max_examples=100, deadline=None)
    def test_periodicity(self, a, k):
        assert float(circle_distance(a + k * TWO_PI, a)) < 1e-9


class TestResiduals:
    def test_zero_time_zero_targets(self):
        res = residuals(PrimeBasis(3), 3, 0.0, (0.0, 0.0, 0.0))
        assert np.all(res == 0.0)

    def test_zero_time_pi_targets(self):
        res = residuals(PrimeBasis(2), 2, 0.0, (math.pi, math.pi))
        assert res == pytest.approx([math.pi, math.pi])

    def test_self_consistency_with_flow(self, rng):
        basis = PrimeBasis(3)
        for _ in range(20):
            t = float(rng.uniform(0, 1e3))
            targets = flow_angles(basis, t)
            assert np.all(residuals(basis, 3, t, targets) < 1e-12)

    def test_dimension_check(self):
        with pytest.raises(Exception):
            residuals(PrimeBasis(1), 2, 0.0, (0.0, 0.0))


class TestClosedFormCases:
    def test_zero_target_above_ten(self):
        problem = KroneckerProblem(PrimeBasis(1), 1, (0.0,), 1e-6, t_min=10.0)
        sol = solve(problem)
        assert sol.t == pytest.approx(2 * TWO_PI / math.log(2), abs=1e-12)
        assert max(sol.residuals) < 1e-9

    def test_pi_target(self):
        problem = KroneckerProblem(PrimeBasis(1), 1, (math.pi,), 1e-6)
        sol = solve(problem)
        assert sol.t == pytest.approx(math.pi / math.log(2), abs=1e-12)

    def test_two_dim_origin(self):
        problem = KroneckerProblem(PrimeBasis(2), 2, (0.0, 0.0), 0.05)
        sol = solve(problem)
        recheck = residuals(PrimeBasis(2), 2, sol.t, (0.0, 0.0))
        assert np.all(recheck < 0.05)

    def test_d1_solutions_sit_on_lattice(self, rng):
        log2 = math.log(2)
        for _ in range(50):
            theta = float(rng.uniform(0, TWO_PI))
            t_min = float(rng.uniform(0, 100))
            problem = KroneckerProblem(PrimeBasis(1), 1, (theta,), 0.05, t_min)
            sol = solve(problem)
            assert abs(sol.t - nearest_lattice_time(theta, log2, sol.t)) < 1e-9


class TestSolverProperties:
    def _random_problem(self, rng, k=None, eps=None):
        k = k or int(rng.integers(1, 4))
        eps = eps or float(rng.uniform(0.05, 0.5))
        targets = tuple(rng.uniform(0, TWO_PI, size=k))
        t_min = float(rng.uniform(0, 50))
        return KroneckerProblem(PrimeBasis(k), k, targets, eps, t_min)

    def test_soundness_both_backends(self, rng):
        for _ in range(25):
            problem = self._random_problem(rng)
            for backend in (lattice_solve, scan_solve):
                sol = backend(problem, 10**8)
                recheck = residuals(
                    problem.basis, problem.k, sol.t, problem.targets
                )
                assert np.all(recheck < problem.eps)
                assert sol.t > problem.t_min

    def test_monotone_restart(self, rng):
        problem = self._random_problem(rng, k=2, eps=0.2)
        first = solve(problem)
        harder = KroneckerProblem(
            problem.basis, problem.k, problem.targets, problem.eps, first.t
        )
        second = solve(harder)
        assert second.t > first.t

    def test_determinism(self, rng):
        problem = self._random_problem(rng, k=3, eps=0.1)
        a, b = solve(problem), solve(problem)
        assert a == b

    def test_scan_completeness(self, rng):
        # plant an exact solution t*; the scan may not skip past it
        basis = PrimeBasis(2)
        for _ in range(10):
            t_star = float(rng.uniform(20, 40))
            targets = tuple(flow_angles(basis, t_star))
            eps = 0.1
            problem = KroneckerProblem(basis, 2, targets, eps, t_min=t_star - 5.0)
            sol = scan_solve(problem, 10**7)
            step = eps / (2.0 * float(basis.logs[-1]))
            assert sol.t <= t_star + step

    def test_budget_error_reports_best(self):
        problem = KroneckerProblem(
            PrimeBasis(3), 3, (1.0, 2.0, 3.0), 0.01, t_min=0.0
        )
        with pytest.raises(BudgetExhaustedError) as info:
            solve(problem, budget=200)
        err = info.value
        assert err.steps == 200
        assert len(err.best_residuals) == 3
        assert math.isfinite(err.best_t)

    def test_budget_must_be_positive(self):
        problem = KroneckerProblem(PrimeBasis(1), 1, (0.0,), 0.1)
        with pytest.raises(DomainError):
            solve(problem, budget=0)

    def test_solution_steps_counts_candidates(self):
        problem = KroneckerProblem(PrimeBasis(1), 1, (0.0,), 0.1, t_min=5.0)
        sol = solve(problem)
        assert sol.steps == 1
        assert sol.method == "lattice"

    def test_backends_cross_validate(self, rng):
        # both find (different) sound answers for the same coarse problems
        for _ in range(5):
            problem = self._random_problem(rng, k=2, eps=0.3)
            fast = lattice_solve(problem)
            slow = scan_solve(problem)
            for sol in (fast, slow):
                assert np.all(
                    residuals(problem.basis, problem.k, sol.t, problem.targets)
                    < problem.eps
                )


class TestProblemValidation:
    def test_eps_range(self):
        with pytest.raises(DomainError):
            KroneckerProblem(PrimeBasis(1), 1, (0.0,), 4.0)
        with pytest.raises(DomainError):
            KroneckerProblem(PrimeBasis(1), 1, (0.0,), 0.0)

    def test_k_range(self):
        with pytest.raises(Exception):
            KroneckerProblem(PrimeBasis(1), 2, (0.0, 0.0), 0.1)

    def test_targets_canonicalized(self):
        p = KroneckerProblem(PrimeBasis(1), 1, (-math.pi,), 0.1)
        assert p.targets[0] == pytest.approx(math.pi)
