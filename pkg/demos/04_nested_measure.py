"""Windowed construction driven by a sequence of approximating measures.

When the target torus measure is only known through a weak-* approximating
sequence of point-mass measures, the half-line is split into windows: window
l of level k blends one normalized block per source measure, each certified
by a window check at tolerance 2^{-k} against the supplied test polynomials.
Here the sequence is constant (every approximant equals mu), so the full
mean must land on mu's own averages.
"""

from polytorus import (
    GrowthSchedule,
    NestedConstructionPlan,
    PrimeBasis,
    TorusPointMassMeasure,
    TorusPolynomial,
    atomic_time_mean,
    bohr_unlift,
    build_nested_lambda,
    point_mass_space_average,
)


def main():
    mu = TorusPointMassMeasure([((0.8, 2.1), 0.5), ((3.6, 0.4), 0.5)])
    basis = PrimeBasis(2)
    polys = [
        TorusPolynomial({(): 1.0}, basis),
        TorusPolynomial({(): 1.0, (1,): 1.0}, basis),
        TorusPolynomial({(1,): 0.5, (0, 1): 1.0, (1, 1): 0.25}, basis),
    ]
    plan = NestedConstructionPlan([mu, mu], polys)
    lam, completed = build_nested_lambda(
        plan, levels=3, growth=GrowthSchedule.constant(2)
    )

    print(f"built {len(lam)} atoms; cumulative mass {lam.total_mass_by_level}")
    for k, (grid, estimates) in enumerate(
        zip(completed.window_boundaries, completed.window_estimates), start=1
    ):
        print(f"level {k}: {len(estimates)} window(s), tolerance {2.0**-k}")
        for l, (hi, worst) in enumerate(zip(grid[1:], estimates), start=1):
            print(f"   window {l}: closes at T = {hi:>10.1f},"
                  f" worst estimate {worst:.5f}")
    print()
    for F in polys:
        f = bohr_unlift(F)
        target = point_mass_space_average(F, mu)
        mean = atomic_time_mean(f, lam, float(lam.t[-1]))
        print(f"poly {F}: target {target:.5f}  mean {mean:.5f}  "
              f"error {abs(mean - target):.5f}")


if __name__ == "__main__":
    main()
