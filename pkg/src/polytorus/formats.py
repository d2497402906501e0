"""Strict JSON formats for polynomials and torus point-mass measures.

Dirichlet polynomials:
    {"basis_dim": 2, "terms": [{"n": 12, "re": 0.0, "im": 1.0}, ...]}

Torus polynomials:
    {"terms": [{"alpha": [2, 1], "re": 0.5, "im": 0.0}, ...]}
    (an optional "basis_dim" widens the inferred dimension)

Point-mass measures:
    {"dim": 2, "atoms": [{"theta": [0.0, 3.14], "c": 0.5}, ...]}

Parsing rejects duplicate JSON keys, duplicate term entries, and explicit
zero coefficients; writers emit floats exactly (shortest round-trip repr).
"""

from __future__ import annotations

import json

from .errors import ParseError
from .polynomials import (
    DirichletPolynomial,
    MultiIndex,
    TorusPolynomial,
    factor_over_basis,
)
from .measures import TorusPointMassMeasure
from .primes import PrimeBasis


def _reject_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r}")
        seen.add(key)
    return dict(pairs)


def loads_strict(text: str | bytes):
    """``json.loads`` that refuses objects with repeated keys."""
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _term_coefficient(entry, label) -> complex:
    coeff = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
    if coeff == 0:
        raise ParseError(f"zero coefficient for {label} is not stored")
    return coeff


def dirichlet_to_json(f: DirichletPolynomial, basis_dim: int) -> str:
    terms = [
        {"n": n, "re": a.real, "im": a.imag} for n, a in sorted(f.terms.items())
    ]
    return json.dumps({"basis_dim": basis_dim, "terms": terms})


def dirichlet_from_json(text) -> tuple[DirichletPolynomial, PrimeBasis]:
    """Parse and validate a Dirichlet polynomial plus its declared basis."""
    data = loads_strict(text)
    if not isinstance(data, dict) or "terms" not in data:
        raise ParseError("expected an object with a 'terms' list")
    basis = PrimeBasis(int(data.get("basis_dim", 1)))
    terms: dict[int, complex] = {}
    for entry in data["terms"]:
        n = int(entry["n"])
        if n in terms:
            raise ParseError(f"duplicate frequency {n}")
        terms[n] = _term_coefficient(entry, f"frequency {n}")
        factor_over_basis(n, basis)  # raises if n needs a larger basis
    return DirichletPolynomial(terms), basis


def torus_to_json(F: TorusPolynomial) -> str:
    terms = [
        {"alpha": list(alpha.exponents), "re": a.real, "im": a.imag}
        for alpha, a in sorted(F.terms.items(), key=lambda kv: kv[0].exponents)
    ]
    return json.dumps({"basis_dim": F.basis.dimension, "terms": terms})


def torus_from_json(text) -> TorusPolynomial:
    return _torus_from_data(loads_strict(text))


def point_mass_to_json(mu: TorusPointMassMeasure) -> str:
    atoms = [
        {"theta": list(omega.angles), "c": c} for omega, c in mu.atoms
    ]
    return json.dumps({"dim": mu.dimension, "atoms": atoms})


def _point_mass_from_data(data) -> TorusPointMassMeasure:
    if not isinstance(data, dict) or "atoms" not in data or "dim" not in data:
        raise ParseError("expected an object with 'dim' and 'atoms'")
    dim = int(data["dim"])
    atoms = []
    for entry in data["atoms"]:
        theta = [float(x) for x in entry["theta"]]
        if len(theta) != dim:
            raise ParseError(
                f"atom has {len(theta)} angles but dim is {dim}"
            )
        atoms.append((theta, float(entry["c"])))
    return TorusPointMassMeasure(atoms, dimension=dim)


def point_mass_from_json(text) -> TorusPointMassMeasure:
    return _point_mass_from_data(loads_strict(text))


def measure_sequence_from_json(text) -> list[TorusPointMassMeasure]:
    """Parse {"measures": [mu, ...]}; each entry follows the point-mass format."""
    data = loads_strict(text)
    if not isinstance(data, dict) or "measures" not in data:
        raise ParseError("expected an object with a 'measures' list")
    return [_point_mass_from_data(entry) for entry in data["measures"]]


def _torus_from_data(data) -> TorusPolynomial:
    if not isinstance(data, dict) or "terms" not in data:
        raise ParseError("expected an object with a 'terms' list")
    terms: dict[MultiIndex, complex] = {}
    for entry in data["terms"]:
        alpha = MultiIndex(entry["alpha"])
        if alpha in terms:
            raise ParseError(f"duplicate index {alpha.exponents}")
        terms[alpha] = _term_coefficient(entry, f"index {alpha.exponents}")
    inferred = max((alpha.length for alpha in terms), default=1)
    dim = max(int(data.get("basis_dim", inferred)), inferred, 1)
    return TorusPolynomial(terms, PrimeBasis(dim))


def polynomial_family_from_json(text) -> list[TorusPolynomial]:
    """Parse {"polynomials": [F, ...]}; each entry follows the torus format."""
    data = loads_strict(text)
    if not isinstance(data, dict) or "polynomials" not in data:
        raise ParseError("expected an object with a 'polynomials' list")
    return [_torus_from_data(entry) for entry in data["polynomials"]]
