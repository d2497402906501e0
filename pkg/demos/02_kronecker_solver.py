"""Steer the vertical-line flow toward chosen torus angles.

The flow t -> (-t log 2, -t log 3, -t log 5) mod 2*pi is dense in the
3-torus; the solver finds explicit times t > t_min landing within eps of any
target angles.  The reference scan and the lattice backend are compared on a
coarse problem, then the lattice backend alone handles a fine tolerance the
scan could not afford.
"""

import numpy as np

from polytorus import KroneckerProblem, PrimeBasis, lattice_solve, residuals, scan_solve


def show(label, problem, solution):
    recheck = residuals(problem.basis, problem.k, solution.t, problem.targets)
    print(f"{label}: t = {solution.t:.6f}  (steps {solution.steps})")
    print(f"   residuals  {np.array2string(np.asarray(solution.residuals), precision=6)}")
    print(f"   recheck ok {bool(np.all(recheck < problem.eps))}, q = {solution.q}")


def main():
    basis = PrimeBasis(3)

    coarse = KroneckerProblem(basis, 2, (1.0, 4.0), eps=0.1, t_min=10.0)
    show("scan   (eps 0.1) ", coarse, scan_solve(coarse))
    show("lattice(eps 0.1) ", coarse, lattice_solve(coarse))
    print()

    fine = KroneckerProblem(basis, 3, (0.5, 2.5, 5.5), eps=2.0**-9, t_min=0.0)
    show("lattice(eps 2^-9)", fine, lattice_solve(fine))
    print()
    print("restarting above the previous solution forces a strictly later hit:")
    later = KroneckerProblem(basis, 3, (0.5, 2.5, 5.5), eps=2.0**-9,
                             t_min=lattice_solve(fine).t)
    show("lattice restart  ", later, lattice_solve(later))


if __name__ == "__main__":
    main()
