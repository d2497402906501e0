"""Read torus moments back out of a line measure.

A line measure determines the torus measure it came from: the weighted time
average of the character t -> prod p_r^{-it(alpha_r - beta_r)} estimates the
moment integral z^alpha conj(z)^beta dmu.  For a measure built from a single
point mass the moments recover powers of omega; for the Lebesgue line all
off-diagonal moments decay like 1/T.
"""

from polytorus import (
    PrimeBasis,
    TorusPointMassMeasure,
    build_point_mass_lambda,
    recover_moments,
)


def main():
    omega = (0.9, 2.2)
    mu = TorusPointMassMeasure([(omega, 1.0)])
    lam = build_point_mass_lambda(mu, levels=4)
    basis = PrimeBasis(2)

    idx = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]
    pairs = [(a, b) for a in idx for b in idx if a != b]
    print(f"moments of the measure built from a point mass at {omega}:")
    moments = recover_moments(lam, basis, pairs, float(lam.t[-1]), mu=mu)
    for m in sorted(moments, key=lambda m: -abs(m.empirical - m.reference))[:6]:
        print(f"  alpha={m.alpha.exponents!s:>7} beta={m.beta.exponents!s:>7}"
              f"  empirical {m.empirical:+.4f}  reference {m.reference:+.4f}"
              f"  |err| {abs(m.empirical - m.reference):.4f}")
    worst = max(abs(m.empirical - m.reference) for m in moments)
    print(f"worst of {len(moments)} moments: {worst:.4f}")
    print()

    print("Lebesgue line: off-diagonal moments vanish in the limit")
    for T in (1e3, 1e4, 1e5):
        vals = recover_moments(None, basis, pairs, T)
        print(f"  T = {T:>8.0f}: max |moment| = "
              f"{max(abs(m.empirical) for m in vals):.2e}")


if __name__ == "__main__":
    main()
