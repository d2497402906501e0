"""Build an atomic measure on the half-line that realizes a point-mass average.

Target: mu = 0.6 delta_{(0.9, 2.2)} + 0.4 delta_{(4.0, 1.1)} on the 2-torus.
The construction places atoms level by level; level k atoms track the torus
points within 2^{-k} on the first min(k, 2) coordinates and are repeated
heavily enough that early coarse atoms carry a vanishing share of the mass.
The normalized time mean of |f(it)|^2 then converges to the space average
of the lifted |F|^2 against mu.
"""

from polytorus import (
    DirichletPolynomial,
    PrimeBasis,
    TorusPointMassMeasure,
    atomic_time_mean,
    bohr_lift,
    boundary_mean_error_bound,
    build_point_mass_lambda,
    point_mass_space_average,
    save_atoms,
)


def main():
    mu = TorusPointMassMeasure([((0.9, 2.2), 0.6), ((4.0, 1.1), 0.4)])
    lam = build_point_mass_lambda(mu, levels=4)
    print(f"built {len(lam)} atoms over [0, {lam.t[-1]:.1f}]")
    print("cumulative mass by level:", lam.total_mass_by_level)
    print("level boundaries:", [round(b, 1) for b in lam.level_boundaries])
    print()

    f = DirichletPolynomial({1: 1.0, 2: 1.0, 6: 0.5 + 0.5j})
    F = bohr_lift(f, PrimeBasis(2))
    target = point_mass_space_average(F, mu)
    print(f"space average of |F|^2 against mu: {target:.6f}")
    for T in lam.level_boundaries:
        mean = atomic_time_mean(f, lam, T)
        print(f"  T = {T:>10.1f}   time mean = {mean:.6f}   "
              f"error = {abs(mean - target):.4f}")
    print()
    print("a-priori error bound at full support:",
          round(boundary_mean_error_bound(f, mu, lam), 4))

    save_atoms(lam, "point_mass_atoms.jsonl")
    print("atoms written to point_mass_atoms.jsonl")


if __name__ == "__main__":
    main()
