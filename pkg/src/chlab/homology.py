"""Filtered chain complexes over the rationals and their graded homology.

The generators in each filtration level are the good Reeb orbits below
that level's action threshold.  Their gradings are all even, so the
differential vanishes for parity reasons and homology equals the graded
generator count; the module still carries an explicit sparse rational
differential and a generic row-reduction rank computation so the data
model covers nonzero differentials.  Inclusions between levels pair
orbits with the same base and multiplicity, and the direct limit is
compared degreewise against the closed form and the Dynkin diagram of
the group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groups import dynkin_type
from .orbits import enumerate_orbits, orbit_row
from .orbits import _spec as _parse


class ParityViolation(AssertionError):
    """Two good generators landed in adjacent gradings."""


class PairingFailure(AssertionError):
    """Inclusion pairing is not a unique same-base same-multiplicity match."""


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finitely supported map degree -> rank."""

    ranks: dict

    def __post_init__(self):
        for degree, rank in self.ranks.items():
            if degree < 0 or rank < 0:
                raise ValueError(f"bad graded rank {rank} in degree {degree}")

    def rank(self, degree):
        return self.ranks.get(degree, 0)

    @property
    def total(self):
        return sum(self.ranks.values())

    def __eq__(self, other):
        if not isinstance(other, GradedVectorSpace):
            return NotImplemented
        mine = {d: r for d, r in self.ranks.items() if r}
        theirs = {d: r for d, r in other.ranks.items() if r}
        return mine == theirs


@dataclass
class FilteredComplex:
    """Chain complex of one filtration level: generators plus differential.

    generators maps grading -> list of good orbits; differential maps
    grading d -> sparse matrix (dict (row, col) -> Fraction) representing
    the map from degree d to degree d - 1.
    """

    spec: object
    N: int
    generators: dict
    differential: dict = field(default_factory=dict)

    def degree_rank(self, degree):
        return len(self.generators.get(degree, ()))

    @property
    def degrees(self):
        return sorted(self.generators)


@dataclass(frozen=True)
class InclusionMap:
    source: int
    target: int
    pairing: dict   # source orbit -> target orbit


def build_complex(spec, N):
    """Good orbits below L_N, grouped by grading, with zero differential."""
    spec = _parse(spec)
    generators = {}
    for orbit in enumerate_orbits(spec, N):
        if orbit.good:
            generators.setdefault(orbit.grading, []).append(orbit)
    degrees = sorted(generators)
    for d in degrees:
        if d + 1 in generators:
            raise ParityViolation(
                f"{spec.label} N={N}: good generators in adjacent gradings "
                f"{d} and {d + 1}")
    differential = {}
    for d in degrees:
        rows = len(generators.get(d - 1, ()))
        if rows:
            raise ParityViolation(
                f"{spec.label} N={N}: degree {d} would map onto occupied "
                f"degree {d - 1}")
        differential[d] = {}
    return FilteredComplex(spec=spec, N=N, generators=generators,
                           differential=differential)


def _matrix_rank(entries, rows, cols):
    """Rank of a sparse rational matrix by exact Gaussian elimination."""
    if not entries or rows == 0 or cols == 0:
        return 0
    dense = [[Fraction(0)] * cols for _ in range(rows)]
    for (i, j), value in entries.items():
        dense[i][j] = Fraction(value)
    rank = 0
    pivot_row = 0
    for j in range(cols):
        pivot = next((i for i in range(pivot_row, rows) if dense[i][j] != 0), None)
        if pivot is None:
            continue
        dense[pivot_row], dense[pivot] = dense[pivot], dense[pivot_row]
        lead = dense[pivot_row][j]
        for i in range(pivot_row + 1, rows):
            if dense[i][j] != 0:
                factor = dense[i][j] / lead
                dense[i] = [a - factor * b for a, b in zip(dense[i], dense[pivot_row])]
        pivot_row += 1
        rank += 1
        if pivot_row == rows:
            break
    return rank


def homology_ranks(complex):
    """Graded homology ranks: dim ker(d_deg) - rank(d_{deg+1})."""
    ranks = {}
    for degree in complex.degrees:
        dim = complex.degree_rank(degree)
        out_rank = _matrix_rank(complex.differential.get(degree, {}),
                                complex.degree_rank(degree - 1), dim)
        in_rank = _matrix_rank(complex.differential.get(degree + 1, {}),
                               dim, complex.degree_rank(degree + 1))
        ranks[degree] = dim - out_rank - in_rank
    return GradedVectorSpace({d: r for d, r in ranks.items() if r})


def closed_form(spec, N):
    """Predicted homology: m-1 at the extremes, m at even degrees between."""
    spec = _parse(spec)
    m = spec.class_count
    top = 4 * N - 2
    ranks = {0: m - 1, top: m - 1}
    for degree in range(2, top, 2):
        ranks[degree] = m
    return GradedVectorSpace(ranks)


def inclusion_map(spec, N, M):
    """Pair each good orbit below L_N with its twin below L_M (N <= M)."""
    spec = _parse(spec)
    if N > M:
        raise ValueError(f"inclusion requires N <= M, got {N} > {M}")
    source = [o for o in enumerate_orbits(spec, N) if o.good]
    target = [o for o in enumerate_orbits(spec, M) if o.good]
    index = {}
    for orbit in target:
        key = (orbit.base.name, orbit.k)
        if key in index:
            raise PairingFailure(f"{spec.label} N={M}: duplicate orbit {key}")
        index[key] = orbit
    pairing = {}
    for orbit in source:
        twin = index.get((orbit.base.name, orbit.k))
        if twin is None:
            raise PairingFailure(
                f"{spec.label}: {orbit.name} below L_{N} has no match below L_{M}")
        if twin.grading != orbit.grading:
            raise PairingFailure(
                f"{spec.label}: {orbit.name} changes grading "
                f"{orbit.grading} -> {twin.grading} under inclusion")
        pairing[orbit] = twin
    if len(set(pairing.values())) != len(pairing):
        raise PairingFailure(f"{spec.label}: inclusion {N}->{M} not injective")
    return InclusionMap(source=N, target=M, pairing=pairing)


def direct_limit(spec, N_max):
    """Stabilized graded ranks up to degree 4*N_max - 4, plus a report.

    For each even degree the rank as a function of N is eventually
    constant; the report records the first level at which it reaches its
    final value and the stabilized value is checked against the closed
    form (m - 1 in degree 0, m in even degrees >= 2).
    """
    spec = _parse(spec)
    if N_max < 2:
        raise ValueError(f"direct limit needs N_max >= 2, got {N_max}")
    m = spec.class_count
    levels = {N: homology_ranks(build_complex(spec, N)) for N in range(1, N_max + 1)}
    top_stable = 4 * N_max - 4
    limit = {}
    first_stable = {}
    for degree in range(0, top_stable + 1, 2):
        values = [levels[N].rank(degree) for N in range(1, N_max + 1)]
        final = values[-1]
        first = next(N for N in range(N_max, 0, -1)
                     if values[N - 1] != final) + 1 if values[0] != final else 1
        expected = m - 1 if degree == 0 else m
        if final != expected:
            raise AssertionError(
                f"{spec.label}: degree {degree} stabilizes at {final}, "
                f"closed form says {expected}")
        limit[degree] = final
        first_stable[degree] = first
    report = {"check": "direct_limit", "spec": spec.label, "n_max": N_max,
              "first_stable": first_stable, "violations": 0}
    return GradedVectorSpace(limit), report


def mckay_check(spec):
    """Dynkin vertex count == class count - 1 == stabilized degree-0 rank."""
    spec = _parse(spec)
    vertices = dynkin_type(spec).vertices
    m_minus_one = spec.class_count - 1
    rank0 = homology_ranks(build_complex(spec, 1)).rank(0)
    if not (vertices == m_minus_one == rank0):
        raise AssertionError(
            f"{spec.label}: Dynkin {vertices}, classes-1 {m_minus_one}, "
            f"degree-0 rank {rank0} disagree")
    return {"check": "mckay", "spec": spec.label,
            "triple": (vertices, m_minus_one, rank0), "violations": 0}


def homology_report(spec, N):
    """JSON-ready record comparing computed ranks with the closed form."""
    spec = _parse(spec)
    complex = build_complex(spec, N)
    computed = homology_ranks(complex)
    predicted = closed_form(spec, N)
    return {
        "spec": spec.label,
        "N": N,
        "generators": [orbit_row(o) for d in complex.degrees
                       for o in complex.generators[d]],
        "ranks": {str(d): r for d, r in sorted(computed.ranks.items())},
        "closed_form": {str(d): r for d, r in sorted(predicted.ranks.items())},
        "match": computed == predicted,
    }
