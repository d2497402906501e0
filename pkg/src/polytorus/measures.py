"""Atomic measures on the half-line built from point masses on the polytorus.

Given a probability measure ``mu = sum_j c_j delta_{omega_j}`` on the torus,
:func:`build_point_mass_lambda` places weighted atoms on ``[0, inf)`` whose
flow images approximate the ``omega_j`` with geometrically improving accuracy:
level ``k`` atoms satisfy Kronecker residuals below ``2^{-k}`` on the first
``min(k, d)`` primes and are repeated ``growth(k) * ||lambda_{k-1}||`` times,
so mass concentrates where approximations are good.  The normalized time mean
of ``|f(it)|^2`` against the result converges to the space average of
``|F|^2`` against ``mu``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    ConstructionError,
    DimensionError,
    DomainError,
    ParseError,
    WindowRepresentationError,
)
from .kronecker import KroneckerProblem, solve
from .polynomials import TorusPoint, bohr_unlift, eval_dirichlet
from .primes import PrimeBasis

WEIGHT_SUM_TOL = 1e-12
DEFAULT_ATOM_CAP = 2_000_000


@dataclass(frozen=True)
class GrowthSchedule:
    """Repetition multiplier per level; mass obeys ``(growth(k)+1) ||lambda_{k-1}||``."""

    name: str
    factors: tuple[int, ...] = ()

    def __call__(self, k: int) -> int:
        if self.name == "2^k":
            return 2**k
        return self.factors[0]

    @staticmethod
    def default() -> "GrowthSchedule":
        return GrowthSchedule("2^k")

    @staticmethod
    def constant(factor: int) -> "GrowthSchedule":
        factor = int(factor)
        if factor < 1:
            raise DomainError(f"growth factor must be >= 1, got {factor}")
        return GrowthSchedule(f"const:{factor}", (factor,))

    @staticmethod
    def parse(text: str) -> "GrowthSchedule":
        text = text.strip()
        if text in ("default", "2^k"):
            return GrowthSchedule.default()
        if text.startswith("const:"):
            return GrowthSchedule.constant(int(text.split(":", 1)[1]))
        raise DomainError(f"unknown growth schedule {text!r}")


class TorusPointMassMeasure:
    """``mu = sum_j c_j delta_{omega_j}`` with ``sum c_j = 1`` and all ``c_j > 0``."""

    __slots__ = ("points", "weights", "dimension")

    def __init__(self, atoms, dimension: int | None = None):
        points: list[TorusPoint] = []
        weights: list[float] = []
        for omega, c in atoms:
            if not isinstance(omega, TorusPoint):
                omega = TorusPoint(omega)
            c = float(c)
            if c <= 0:
                raise DomainError(f"point-mass weights must be positive, got {c}")
            points.append(omega)
            weights.append(c)
        if not points:
            raise DomainError("a point-mass measure needs at least one atom")
        dims = {p.dimension for p in points}
        if dimension is None:
            if len(dims) != 1:
                raise DimensionError(f"atoms have mixed dimensions {sorted(dims)}")
            dimension = dims.pop()
        elif dims != {dimension}:
            raise DimensionError(
                f"atoms of dimensions {sorted(dims)} do not match declared {dimension}"
            )
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(
                f"point-mass weights must sum to 1 (tolerance {WEIGHT_SUM_TOL}), "
                f"got {total!r}"
            )
        object.__setattr__(self, "points", tuple(points))
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "dimension", int(dimension))

    def __setattr__(self, name, value):
        raise AttributeError("TorusPointMassMeasure is immutable")

    @property
    def atoms(self) -> tuple[tuple[TorusPoint, float], ...]:
        return tuple(zip(self.points, self.weights))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (
            isinstance(other, TorusPointMassMeasure)
            and other.points == self.points
            and other.weights == self.weights
        )

    def __repr__(self):
        return (
            f"TorusPointMassMeasure(N={len(self)}, dimension={self.dimension})"
        )


class AtomicLineMeasure:
    """Weighted atoms ``(t, w)`` on ``[0, inf)`` with their construction trace.

    ``level``, ``source`` and ``rep`` record, per atom, the construction level
    ``k``, the index ``j`` of the torus point it chases, and the repetition
    ``m`` within its level.  ``level_boundaries[k-1]`` exceeds every level-k
    atom, and ``total_mass_by_level[k-1]`` is the cumulative mass through
    level k.
    """

    __slots__ = ("t", "w", "level", "source", "rep",
                 "level_boundaries", "total_mass_by_level", "growth_name")

    def __init__(self, t, w, level, source, rep,
                 level_boundaries, total_mass_by_level, growth_name="2^k"):
        t = np.asarray(t, dtype=np.float64)
        w = np.asarray(w, dtype=np.float64)
        level = np.asarray(level, dtype=np.int64)
        source = np.asarray(source, dtype=np.int64)
        rep = np.asarray(rep, dtype=np.int64)
        if not (len(t) == len(w) == len(level) == len(source) == len(rep)):
            raise DomainError("atom field arrays must have equal lengths")
        if len(t) and np.any(np.diff(t) <= 0):
            raise DomainError("atom positions must be strictly increasing")
        if len(t) and (t[0] < 0 or np.any(w <= 0)):
            raise DomainError("atoms need t >= 0 and positive weights")
        for arr in (t, w, level, source, rep):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "level_boundaries", tuple(float(b) for b in level_boundaries))
        object.__setattr__(self, "total_mass_by_level",
                           tuple(float(m) for m in total_mass_by_level))
        object.__setattr__(self, "growth_name", str(growth_name))

    def __setattr__(self, name, value):
        raise AttributeError("AtomicLineMeasure is immutable")

    @property
    def levels(self) -> int:
        return len(self.level_boundaries)

    def __len__(self):
        return len(self.t)

    def total_mass(self) -> float:
        return math.fsum(self.w)

    def mass_up_to(self, T: float) -> float:
        """``lambda([0, T])``."""
        return math.fsum(self.w[self.t <= T])

    def __eq__(self, other):
        return (
            isinstance(other, AtomicLineMeasure)
            and np.array_equal(other.t, self.t)
            and np.array_equal(other.w, self.w)
            and np.array_equal(other.level, self.level)
            and np.array_equal(other.source, self.source)
            and np.array_equal(other.rep, self.rep)
            and other.level_boundaries == self.level_boundaries
            and other.total_mass_by_level == self.total_mass_by_level
            and other.growth_name == self.growth_name
        )

    def __repr__(self):
        return (
            f"AtomicLineMeasure(atoms={len(self)}, levels={self.levels}, "
            f"growth={self.growth_name!r})"
        )


def _level_plan(n_sources: int, levels: int, growth: GrowthSchedule):
    """Repetition counts ``M_k`` and cumulative masses; mass of level 0 is 1."""
    reps = []
    masses = []
    prev = 1.0
    for k in range(1, levels + 1):
        m_k = growth(k) * prev
        m_int = int(round(m_k))
        if abs(m_k - m_int) > 1e-9 or m_int < 1:
            raise ConstructionError(
                f"repetition count {m_k} at level {k} is not a positive integer",
                level=k,
            )
        reps.append(m_int)
        total = (prev if k > 1 else 0.0) + m_int
        masses.append(total)
        prev = total
    return reps, masses


def build_point_mass_lambda(
    mu: TorusPointMassMeasure,
    levels: int,
    growth: GrowthSchedule | None = None,
    solver_budget: int = 10**8,
    *,
    method: str = "auto",
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> AtomicLineMeasure:
    """Place the atoms of the half-line measure chasing ``mu``.

    Level ``k`` performs ``M_k = growth(k) * ||lambda_{k-1}||`` repetitions
    (with ``||lambda_0|| = 1``); each repetition places one atom of weight
    ``c_j`` per torus point, at a time whose Kronecker residuals on the first
    ``min(k, d)`` primes are below ``2^{-k}``.  Atoms are strictly increasing
    in ``t``, repetitions do not interleave, and the level boundary ``T_k``
    exceeds every level-k atom by one scan step.
    """
    if levels < 1:
        raise DomainError(f"levels must be >= 1, got {levels}")
    growth = growth or GrowthSchedule.default()
    basis = PrimeBasis(mu.dimension)
    reps_per_level, masses = _level_plan(len(mu), levels, growth)
    total_atoms = len(mu) * sum(reps_per_level)
    if total_atoms > atom_cap:
        raise CapacityError(
            f"construction would place {total_atoms} atoms, exceeding the cap "
            f"of {atom_cap}; lower the level count or raise the cap"
        )

    t_out = np.empty(total_atoms)
    w_out = np.empty(total_atoms)
    lvl_out = np.empty(total_atoms, dtype=np.int64)
    src_out = np.empty(total_atoms, dtype=np.int64)
    rep_out = np.empty(total_atoms, dtype=np.int64)

    boundaries = []
    t_cursor = 0.0
    pos = 0
    for k in range(1, levels + 1):
        eps = 2.0**-k
        active = min(k, mu.dimension)
        step = eps / (2.0 * float(basis.logs[active - 1]))
        for m in range(1, reps_per_level[k - 1] + 1):
            for j, (omega, c_j) in enumerate(mu.atoms, start=1):
                problem = KroneckerProblem(
                    basis=basis,
                    k=active,
                    targets=omega.angles[:active],
                    eps=eps,
                    t_min=t_cursor,
                )
                try:
                    sol = solve(problem, solver_budget, method=method)
                except Exception as exc:
                    raise ConstructionError(
                        f"solver failed: {exc}", level=k, source=j, repetition=m
                    ) from exc
                t_out[pos] = sol.t
                w_out[pos] = c_j
                lvl_out[pos] = k
                src_out[pos] = j
                rep_out[pos] = m
                pos += 1
                t_cursor = sol.t
            t_cursor += step
        boundaries.append(t_cursor)

    return AtomicLineMeasure(
        t_out, w_out, lvl_out, src_out, rep_out,
        level_boundaries=boundaries,
        total_mass_by_level=masses,
        growth_name=growth.name,
    )


@dataclass(frozen=True)
class WindowCheckResult:
    """Outcome of a window estimate: worst error over the polynomial family."""

    passed: bool
    worst_error: float
    worst_index: int
    errors: tuple[float, ...]
    window_mass: float


def windowed_time_means(lam, t_lo: float, t_hi: float, polys) -> list[float]:
    """Normalized means of ``|f_m(it)|^2`` over atoms with ``t_lo < t <= t_hi``."""
    inside = (lam.t > t_lo) & (lam.t <= t_hi)
    w = lam.w[inside]
    if not len(w):
        raise WindowRepresentationError(
            f"window ({t_lo}, {t_hi}] contains no atoms"
        )
    times = lam.t[inside]
    mass = math.fsum(w)
    means = []
    for F in polys:
        f = bohr_unlift(F)
        values = np.abs(eval_dirichlet(f, 0.0, times)) ** 2
        means.append(math.fsum(values * w) / mass)
    return means


def window_check(
    lam: AtomicLineMeasure,
    t_lo: float,
    t_hi: float,
    polys,
    mu: TorusPointMassMeasure,
    eps: float,
) -> WindowCheckResult:
    """Compare windowed time means against the space averages of ``mu``.

    Requires every torus point of ``mu`` to be represented by at least one
    atom inside ``(t_lo, t_hi]``, mirroring the representation requirement of
    windowed estimates.
    """
    from .averages import point_mass_space_average

    if not t_lo < t_hi:
        raise DomainError(f"need t_lo < t_hi, got [{t_lo}, {t_hi}]")
    polys = list(polys)
    if not polys:
        raise DomainError("window_check needs at least one polynomial")
    inside = (lam.t > t_lo) & (lam.t <= t_hi)
    if not inside.any():
        raise WindowRepresentationError(
            f"window ({t_lo}, {t_hi}] contains no atoms"
        )
    present = set(np.unique(lam.source[inside]).tolist())
    missing = [j for j in range(1, len(mu) + 1) if j not in present]
    if missing:
        raise WindowRepresentationError(
            f"window ({t_lo}, {t_hi}] has no atoms for source point(s) {missing}"
        )
    means = windowed_time_means(lam, t_lo, t_hi, polys)
    errors = tuple(
        abs(mean - point_mass_space_average(F, mu))
        for mean, F in zip(means, polys)
    )
    worst = int(np.argmax(errors))
    return WindowCheckResult(
        passed=bool(errors[worst] < eps),
        worst_error=float(errors[worst]),
        worst_index=worst,
        errors=errors,
        window_mass=math.fsum(lam.w[inside]),
    )


# ---------------------------------------------------------------------------
# Atom file format: JSON Lines with a header, one line per atom, and a
# trailing boundaries/masses line.  Floats survive the round trip exactly.
# ---------------------------------------------------------------------------

FORMAT_NAME = "lambda-atoms"
FORMAT_VERSION = 1


def atoms_to_bytes(lam: AtomicLineMeasure) -> bytes:
    buf = io.StringIO()
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "growth": lam.growth_name,
        "levels": lam.levels,
    }
    buf.write(json.dumps(header) + "\n")
    for i in range(len(lam)):
        line = {
            "t": float(lam.t[i]),
            "w": float(lam.w[i]),
            "k": int(lam.level[i]),
            "j": int(lam.source[i]),
            "m": int(lam.rep[i]),
        }
        buf.write(json.dumps(line) + "\n")
    if len(lam) or lam.level_boundaries:
        trailer = {
            "boundaries": list(lam.level_boundaries),
            "masses": list(lam.total_mass_by_level),
        }
        buf.write(json.dumps(trailer) + "\n")
    return buf.getvalue().encode("utf-8")


def atoms_from_bytes(data: bytes) -> AtomicLineMeasure:
    lines = data.decode("utf-8").splitlines()
    if not lines:
        raise ParseError("empty atom stream, expected a header line", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad header: {exc}", 1) from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise ParseError(f"not a {FORMAT_NAME} stream", 1)
    if header.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported version {header.get('version')!r}", 1)

    t, w, level, source, rep = [], [], [], [], []
    boundaries: list[float] = []
    masses: list[float] = []
    saw_trailer = False
    for number, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        if saw_trailer:
            raise ParseError("content after the boundaries line", number)
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed line: {exc}", number) from exc
        if not isinstance(record, dict):
            raise ParseError("expected a JSON object", number)
        if "boundaries" in record:
            boundaries = [float(b) for b in record["boundaries"]]
            masses = [float(m) for m in record.get("masses", [])]
            saw_trailer = True
            continue
        try:
            t_i = float(record["t"])
            w_i = float(record["w"])
            k_i = int(record["k"])
            j_i = int(record["j"])
            m_i = int(record["m"])
        except KeyError as exc:
            raise ParseError(f"atom line missing key {exc}", number) from exc
        if t and t_i <= t[-1]:
            raise ParseError(
                f"atom positions must strictly increase ({t_i} after {t[-1]})",
                number,
            )
        t.append(t_i)
        w.append(w_i)
        level.append(k_i)
        source.append(j_i)
        rep.append(m_i)
    try:
        return AtomicLineMeasure(
            t, w, level, source, rep,
            level_boundaries=boundaries,
            total_mass_by_level=masses,
            growth_name=header.get("growth", "2^k"),
        )
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def save_atoms(lam: AtomicLineMeasure, path) -> None:
    with open(path, "wb") as handle:
        handle.write(atoms_to_bytes(lam))


def load_atoms(path) -> AtomicLineMeasure:
    with open(path, "rb") as handle:
        return atoms_from_bytes(handle.read())


def empty_measure(growth_name: str = "2^k") -> AtomicLineMeasure:
    return AtomicLineMeasure([], [], [], [], [],
                             level_boundaries=(), total_mass_by_level=(),
                             growth_name=growth_name)
