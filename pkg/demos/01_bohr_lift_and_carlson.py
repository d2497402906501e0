"""Lift a Dirichlet polynomial to the polytorus and watch vertical-line means.

The script builds f(s) = 1 + 2^{-s} + (0.5+0.5i) 6^{-s}, lifts it to a
polynomial in (z1, z2), and tabulates (1/T) integral_0^T |f(sigma+it)|^2 dt
against its limit sum |a_n|^2 n^{-2 sigma} for a few vertical lines.
"""

from polytorus import (
    DirichletPolynomial,
    PrimeBasis,
    bohr_lift,
    bohr_unlift,
    carlson_target,
    convergence_sweep,
)


def main():
    f = DirichletPolynomial({1: 1.0, 2: 1.0, 6: 0.5 + 0.5j})
    F = bohr_lift(f, PrimeBasis(2))
    print("f  =", f)
    print("F  =", F)
    print("round trip exact:", bohr_unlift(F) == f)
    print()

    for sigma in (0.25, 0.5, 1.0):
        target = carlson_target(f, sigma)
        record = convergence_sweep(
            f, None, target, (1e2, 1e3, 1e4, 1e5), sigma=sigma
        )
        print(f"sigma = {sigma}: limit of the mean square = {target:.6f}")
        for row in record.rows:
            print(f"  T = {row.T:>8.0f}   mean = {row.time_mean:.8f}   "
                  f"error = {row.abs_error:.2e}")
        print()


if __name__ == "__main__":
    main()
