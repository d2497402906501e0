import json
import math

import numpy as np
import pytest

from polytorus import (
    AtomicLineMeasure,
    CapacityError,
    DomainError,
    GrowthSchedule,
    ParseError,
    PrimeBasis,
    TorusPointMassMeasure,
    TorusPolynomial,
    WindowRepresentationError,
    atoms_from_bytes,
    atoms_to_bytes,
    build_point_mass_lambda,
    empty_measure,
    load_atoms,
    residuals,
    save_atoms,
    window_check,
)

from conftest import random_point_mass

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def delta_measure():
    return TorusPointMassMeasure([((0.7,), 1.0)])


@pytest.fixture(scope="module")
def delta_lambda(delta_measure):
    return build_point_mass_lambda(delta_measure, levels=4)


class TestGrowthSchedule:
    def test_parse(self):
        assert GrowthSchedule.parse("default").name == "2^k"
        assert GrowthSchedule.parse("2^k")(3) == 8
        assert GrowthSchedule.parse("const:2")(5) == 2

    def test_parse_rejects_junk(self):
        with pytest.raises(DomainError):
            GrowthSchedule.parse("fibonacci")
        with pytest.raises(DomainError):
            GrowthSchedule.constant(0)


class TestPointMassMeasure:
    def test_weight_sum_enforced(self):
        with pytest.raises(DomainError, match="sum to 1"):
            TorusPointMassMeasure([((0.0,), 0.5), ((1.0,), 0.4)])

    def test_positive_weights(self):
        with pytest.raises(DomainError):
            TorusPointMassMeasure([((0.0,), 1.5), ((1.0,), -0.5)])

    def test_dimension_consistency(self):
        with pytest.raises(Exception):
            TorusPointMassMeasure([((0.0,), 0.5), ((1.0, 2.0), 0.5)])


class TestPointMassConstruction:
    def test_mass_trace_single_atom(self, delta_lambda):
        assert delta_lambda.total_mass_by_level == (2.0, 10.0, 90.0, 1530.0)

    def test_mass_recursion(self, delta_lambda):
        masses = delta_lambda.total_mass_by_level
        for k in range(2, 5):
            assert masses[k - 1] == pytest.approx(
                (2**k + 1) * masses[k - 2], abs=1e-9
            )

    def test_actual_weight_sums_match_trace(self, rng):
        mu = random_point_mass(rng, d=2, n_atoms=3)
        lam = build_point_mass_lambda(mu, levels=3)
        for k in range(1, 4):
            actual = float(np.sum(lam.w[lam.level <= k]))
            assert actual == pytest.approx(lam.total_mass_by_level[k - 1], abs=1e-9)

    def test_atom_count_example(self, rng):
        # N=2, K=3, default growth: M_k = 2, 8, 80 so N * 90 atoms
        mu = random_point_mass(rng, d=2, n_atoms=2)
        lam = build_point_mass_lambda(mu, levels=3)
        assert len(lam) == 2 * (2 + 8 + 80)

    def test_level_one_coarse_residuals(self):
        # both level-1 atoms of a d=1 delta at angle 0 satisfy the 1/2 bound
        mu = TorusPointMassMeasure([((0.0,), 1.0)])
        lam = build_point_mass_lambda(mu, levels=1)
        assert len(lam) == 2
        res = residuals(PrimeBasis(1), 1, lam.t, (0.0,))
        assert np.all(res < 0.5)

    def test_residual_schedule(self, rng):
        mu = random_point_mass(rng, d=3, n_atoms=2)
        lam = build_point_mass_lambda(mu, levels=4)
        basis = PrimeBasis(3)
        for k in range(1, 5):
            active = min(k, 3)
            for j, (omega, _) in enumerate(mu.atoms, start=1):
                sel = (lam.level == k) & (lam.source == j)
                res = residuals(basis, active, lam.t[sel], omega.angles[:active])
                assert np.all(res < 2.0**-k)

    def test_ordering_and_level_nesting(self, delta_lambda):
        assert np.all(np.diff(delta_lambda.t) > 0)
        bounds = (0.0,) + delta_lambda.level_boundaries
        for k in range(1, delta_lambda.levels + 1):
            ts = delta_lambda.t[delta_lambda.level == k]
            assert np.all(ts > bounds[k - 1])
            assert np.all(ts <= bounds[k])

    def test_chord_bound(self, rng):
        # per atom: euclidean distance of flow point to target on the first
        # min(k, d) coordinates is below sqrt(min(k, d)) * 2^{-k+1}
        mu = random_point_mass(rng, d=2, n_atoms=2)
        lam = build_point_mass_lambda(mu, levels=3)
        basis = PrimeBasis(2)
        for i in range(len(lam)):
            k = int(lam.level[i])
            active = min(k, 2)
            omega = mu.points[int(lam.source[i]) - 1]
            angles = np.mod(-lam.t[i] * basis.logs[:active], TWO_PI)
            chord = np.abs(
                np.exp(1j * angles) - np.exp(1j * np.asarray(omega.angles[:active]))
            )
            assert np.linalg.norm(chord) <= math.sqrt(active) * 2.0 ** (-k + 1)

    def test_early_mass_negligibility(self, delta_lambda):
        masses = delta_lambda.total_mass_by_level
        for k in range(2, 5):
            assert masses[k - 2] / masses[k - 1] == pytest.approx(
                1.0 / (2**k + 1), abs=1e-12
            )

    def test_capacity_error_before_work(self, delta_measure):
        with pytest.raises(CapacityError):
            build_point_mass_lambda(delta_measure, levels=4, atom_cap=100)

    def test_constant_growth(self, delta_measure):
        lam = build_point_mass_lambda(
            delta_measure, levels=3, growth=GrowthSchedule.constant(2)
        )
        assert lam.total_mass_by_level == (2.0, 6.0, 18.0)
        assert lam.growth_name == "const:2"

    def test_determinism(self, rng):
        mu = random_point_mass(rng, d=2, n_atoms=2)
        a = build_point_mass_lambda(mu, levels=2)
        b = build_point_mass_lambda(mu, levels=2)
        assert a == b


@pytest.fixture(scope="module")
def window_setup():
    mu = TorusPointMassMeasure([((0.9,), 0.5), ((4.0,), 0.5)])
    lam = build_point_mass_lambda(mu, levels=4)
    basis = PrimeBasis(1)
    polys = [
        TorusPolynomial({(): 1.0, (1,): 1.0}, basis),
        TorusPolynomial({(1,): 1.0, (2,): 1.0}, basis),
    ]
    return mu, lam, polys


class TestWindowCheck:
    def test_full_support_window_passes_loose(self, window_setup):
        mu, lam, polys = window_setup
        result = window_check(lam, 0.0, lam.level_boundaries[-1], polys, mu, 1.0)
        assert result.passed

    def test_constant_poly_zero_error(self, window_setup):
        mu, lam, _ = window_setup
        one = TorusPolynomial({(): 1.0}, PrimeBasis(1))
        result = window_check(lam, 0.0, lam.level_boundaries[-1], [one], mu, 1e-9)
        assert result.passed
        assert result.worst_error < 1e-12

    def test_level_one_window_too_coarse(self):
        # at level 1 only the first coordinate is pinned, so a window of
        # level-1 atoms cannot serve a polynomial that reads coordinate 2
        mu = TorusPointMassMeasure([((0.9, 2.5), 0.5), ((4.0, 1.2), 0.5)])
        lam = build_point_mass_lambda(mu, levels=3)
        poly = TorusPolynomial({(): 1.0, (1,): 1.0, (0, 1): 1.0}, PrimeBasis(2))
        result = window_check(
            lam, 0.0, lam.level_boundaries[0], [poly], mu, 2.0**-5
        )
        assert not result.passed

    def test_empty_window(self, window_setup):
        mu, lam, polys = window_setup
        gap_lo = float(lam.t[0]) - 1e-6
        with pytest.raises(WindowRepresentationError):
            window_check(lam, gap_lo - 1e-3, gap_lo, polys, mu, 0.5)

    def test_missing_source(self, window_setup):
        mu, lam, polys = window_setup
        # a window holding exactly one atom cannot represent both sources
        lo = float(lam.t[0]) - 1e-9
        hi = float(lam.t[0])
        with pytest.raises(WindowRepresentationError, match="source"):
            window_check(lam, lo, hi, polys, mu, 0.5)

    def test_bad_bounds(self, window_setup):
        mu, lam, polys = window_setup
        with pytest.raises(DomainError):
            window_check(lam, 5.0, 5.0, polys, mu, 0.5)


class TestAtomFiles:
    def test_round_trip(self, delta_lambda, tmp_path):
        path = tmp_path / "atoms.jsonl"
        save_atoms(delta_lambda, path)
        assert load_atoms(path) == delta_lambda

    def test_round_trip_bytes_exact(self, delta_lambda):
        blob = atoms_to_bytes(delta_lambda)
        again = atoms_to_bytes(atoms_from_bytes(blob))
        assert blob == again

    def test_empty_measure_header_only(self):
        blob = atoms_to_bytes(empty_measure())
        assert blob.decode().strip().count("\n") == 0
        loaded = atoms_from_bytes(blob)
        assert len(loaded) == 0
        assert loaded.level_boundaries == ()

    def test_hand_written_fixture(self):
        text = "\n".join([
            json.dumps({"format": "lambda-atoms", "version": 1,
                        "growth": "2^k", "levels": 1}),
            json.dumps({"t": 1.5, "w": 0.25, "k": 1, "j": 1, "m": 1}),
            json.dumps({"t": 2.5, "w": 0.75, "k": 1, "j": 2, "m": 1}),
            json.dumps({"boundaries": [3.0], "masses": [1.0]}),
        ]) + "\n"
        lam = atoms_from_bytes(text.encode())
        assert len(lam) == 2
        assert lam.total_mass() == pytest.approx(1.0)
        assert lam.mass_up_to(2.0) == pytest.approx(0.25)
        assert lam.level_boundaries == (3.0,)

    def test_non_increasing_rejected_with_line_number(self):
        text = "\n".join([
            json.dumps({"format": "lambda-atoms", "version": 1,
                        "growth": "2^k", "levels": 1}),
            json.dumps({"t": 2.0, "w": 0.5, "k": 1, "j": 1, "m": 1}),
            json.dumps({"t": 1.0, "w": 0.5, "k": 1, "j": 1, "m": 2}),
        ])
        with pytest.raises(ParseError, match="line 3"):
            atoms_from_bytes(text.encode())

    def test_malformed_line(self):
        blob = (
            json.dumps({"format": "lambda-atoms", "version": 1,
                        "growth": "2^k", "levels": 0}) + "\n{oops\n"
        ).encode()
        with pytest.raises(ParseError, match="line 2"):
            atoms_from_bytes(blob)

    def test_wrong_format_header(self):
        with pytest.raises(ParseError):
            atoms_from_bytes(b'{"format": "something-else", "version": 1}\n')

    def test_missing_key(self):
        blob = (
            json.dumps({"format": "lambda-atoms", "version": 1,
                        "growth": "2^k", "levels": 1})
            + "\n" + json.dumps({"t": 1.0, "w": 0.5}) + "\n"
        ).encode()
        with pytest.raises(ParseError, match="missing key"):
            atoms_from_bytes(blob)


class TestAtomicLineMeasureValidation:
    def test_strictly_increasing_required(self):
        with pytest.raises(DomainError):
            AtomicLineMeasure([1.0, 1.0], [0.5, 0.5], [1, 1], [1, 2], [1, 1],
                              level_boundaries=(2.0,), total_mass_by_level=(1.0,))

    def test_positive_weights_required(self):
        with pytest.raises(DomainError):
            AtomicLineMeasure([1.0, 2.0], [0.5, 0.0], [1, 1], [1, 2], [1, 1],
                              level_boundaries=(3.0,), total_mass_by_level=(0.5,))
