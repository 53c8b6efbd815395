"""Reeb orbits of the perturbed contact forms below each action threshold.

Every closed Reeb orbit sits over one of the exceptional points of the
quotient sphere (a minimum, saddle or maximum of the invariant perturbing
function) and is an iterate of the embedded orbit there.  For each group
and threshold level this module enumerates those iterates with exact
actions and rotation numbers, carried as first-order jets a + b*eps in a
formal infinitesimal, and attaches Conley-Zehnder indices, good/bad flags
and free homotopy classes.  Index formulas are computed twice, once by
formal floor+ceiling of the rotation number and once per closed family
formula, and the homotopy lookup tables are validated against the
group-theoretic lift computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .groups import (
    BINARY_DIHEDRAL,
    CYCLIC,
    GroupSpec,
    OrbifoldPointKind,
    build_group,
    fiber_isotropy_generator,
    fixed_points,
    parse_group_spec,
)

ELLIPTIC = "Elliptic"
POSITIVE_HYPERBOLIC = "PositiveHyperbolic"
NEGATIVE_HYPERBOLIC = "NegativeHyperbolic"


class DegenerateRotation(ArithmeticError):
    """Rotation number of an elliptic orbit landed exactly on an integer."""


class MonotonicityViolation(AssertionError):
    """A same-class orbit pair broke the index/action ordering."""


class LiftMismatch(AssertionError):
    """Homotopy lookup table disagrees with the group-theoretic lift."""


class FormalScalar:
    """Exact first-order jet a + b*eps, eps a positive formal infinitesimal.

    The total order is lexicographic on (a, b), which is the limit order
    as eps -> 0+.  Ring operations are exact over Fraction; a product of
    two eps-terms is truncated (eps^2 := 0) and the truncation is flagged
    by the sticky `truncated` attribute.
    """

    __slots__ = ("a", "b", "truncated")

    def __init__(self, a, b=0, truncated=False):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.truncated = bool(truncated)

    @staticmethod
    def _coerce(x):
        if isinstance(x, FormalScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return FormalScalar(x)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FormalScalar(self.a + o.a, self.b + o.b, self.truncated or o.truncated)

    __radd__ = __add__

    def __neg__(self):
        return FormalScalar(-self.a, -self.b, self.truncated)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        dropped = self.b != 0 and o.b != 0
        return FormalScalar(self.a * o.a, self.a * o.b + self.b * o.a,
                            self.truncated or o.truncated or dropped)

    __rmul__ = __mul__

    def _cmp_key(self):
        return (self.a, self.b)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp_key() == o._cmp_key()

    def __hash__(self):
        return hash(self._cmp_key())

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp_key() < o._cmp_key()

    def __le__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp_key() <= o._cmp_key()

    def __gt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp_key() > o._cmp_key()

    def __ge__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp_key() >= o._cmp_key()

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        op, mag = ("-", -self.b) if self.b < 0 else ("+", self.b)
        return f"{self.a} {op} {mag}*eps"

    def __repr__(self):
        return f"FormalScalar({self.a}, {self.b})"


def formal_floor(x):
    """Floor of a + b*eps: for integer a the sign of b breaks the tie."""
    if x.a.denominator != 1:
        return math.floor(x.a)
    n = int(x.a)
    return n - 1 if x.b < 0 else n


def formal_ceil(x):
    """Ceiling of a + b*eps, the dual tie-break."""
    if x.a.denominator != 1:
        return math.ceil(x.a)
    n = int(x.a)
    return n + 1 if x.b > 0 else n


@dataclass(frozen=True)
class BaseData:
    """One exceptional point under the embedded orbits: the base datum.

    sign is -1 over a minimum, 0 over a saddle, +1 over a maximum of the
    perturbing function; cov is the multiplicity at which iterates of the
    embedded orbit become contractible.
    """

    name: str
    sign: int
    morse_index: int
    isotropy: int
    cov: int


def _spec(spec):
    return parse_group_spec(spec) if isinstance(spec, str) else spec


def base_table(spec):
    """The base data in serialization order (minimum, saddle, maximum)."""
    spec = _spec(spec)
    if spec.kind == CYCLIC:
        n = spec.n
        iso = n if n % 2 else n // 2
        return (BaseData("SouthPole", -1, 0, iso, n),
                BaseData("NorthPole", +1, 2, iso, n))
    if spec.kind == BINARY_DIHEDRAL:
        n = spec.n
        return (BaseData("Minus", -1, 0, 2, 4),
                BaseData("Saddle", 0, 1, 2, 4),
                BaseData("Plus", +1, 2, n, 2 * n))
    iv = spec.vertex_isotropy
    return (BaseData("Vertex", -1, 0, iv, 2 * iv),
            BaseData("Edge", 0, 1, 2, 4),
            BaseData("Face", +1, 2, 3, 6))


def _base_by_name(spec, name):
    for base in base_table(spec):
        if base.name == name:
            return base
    raise KeyError(f"no base named {name!r} for {_spec(spec).label}")


@dataclass(frozen=True)
class ReebOrbit:
    """The k-th iterate of the embedded Reeb orbit over one base point."""

    group: GroupSpec
    base: OrbifoldPointKind
    k: int
    action: FormalScalar        # in units of pi
    rotation: FormalScalar
    cz: int
    grading: int
    orbit_type: str
    good: bool
    class_label: str
    contractible: bool

    @property
    def name(self):
        return f"{self.base.name}^{self.k}"


def action_threshold(spec, N):
    """Threshold L_N in units of pi; the eps-part is zero."""
    spec = _spec(spec)
    if N < 1:
        raise ValueError(f"threshold level must be >= 1, got {N}")
    if spec.kind == CYCLIC:
        d = spec.n
    elif spec.kind == BINARY_DIHEDRAL:
        d = 2 * spec.n
    else:
        d = 10
    return FormalScalar(2 * N - Fraction(1, d))


def _action_of(base, k):
    a = Fraction(2 * k, base.cov)
    return FormalScalar(a, base.sign * a)


def _rotation_of(base, k):
    return FormalScalar(Fraction(2 * k, base.cov), base.sign * Fraction(k, base.cov))


def _cz_closed(base, k):
    ratio = Fraction(2 * k, base.cov)
    if base.sign < 0:
        return 2 * math.ceil(ratio) - 1
    if base.sign > 0:
        return 2 * math.floor(ratio) + 1
    if ratio.denominator not in (1, 2):
        raise AssertionError(f"saddle rotation 2*{k}/{base.cov} is not half-integral")
    return int(2 * ratio)


def _classify(base, k):
    if base.sign != 0:
        return ELLIPTIC, True
    # the embedded saddle orbit is negative hyperbolic; its even iterates
    # are positive hyperbolic and exactly they are bad
    if k % 2:
        return NEGATIVE_HYPERBOLIC, True
    return POSITIVE_HYPERBOLIC, False


# Free homotopy class lookup, keyed by k modulo the covering multiplicity.
# Two equal-order classes carry suffixes A/B tied to the Vertex orbit.
_POLY_CLASS_TABLE = {
    ("T", "Vertex"): {0: "T_Id", 3: "T_-Id", 1: "T_{6,A}", 5: "T_{6,B}",
                      2: "T_{3,A}", 4: "T_{3,B}"},
    ("T", "Edge"): {0: "T_Id", 2: "T_-Id", 1: "T_4", 3: "T_4"},
    ("T", "Face"): {0: "T_Id", 3: "T_-Id", 5: "T_{6,A}", 1: "T_{6,B}",
                    4: "T_{3,A}", 2: "T_{3,B}"},
    ("O", "Vertex"): {0: "O_Id", 4: "O_-Id", 1: "O_{8,A}", 7: "O_{8,A}",
                      3: "O_{8,B}", 5: "O_{8,B}", 2: "O_{4,A}", 6: "O_{4,A}"},
    ("O", "Edge"): {0: "O_Id", 2: "O_-Id", 1: "O_{4,B}", 3: "O_{4,B}"},
    ("O", "Face"): {0: "O_Id", 3: "O_-Id", 1: "O_6", 5: "O_6",
                    2: "O_3", 4: "O_3"},
    ("I", "Vertex"): {0: "I_Id", 5: "I_-Id", 1: "I_{10,A}", 9: "I_{10,A}",
                      3: "I_{10,B}", 7: "I_{10,B}", 2: "I_{5,A}", 8: "I_{5,A}",
                      4: "I_{5,B}", 6: "I_{5,B}"},
    ("I", "Edge"): {0: "I_Id", 2: "I_-Id", 1: "I_4", 3: "I_4"},
    ("I", "Face"): {0: "I_Id", 3: "I_-Id", 1: "I_6", 5: "I_6",
                    2: "I_3", 4: "I_3"},
}


def _class_label(spec, base_name, k):
    spec = _spec(spec)
    if spec.kind == CYCLIC:
        n = spec.n
        m = k % n if base_name == "NorthPole" else (-k) % n
        return "Id" if m == 0 else f"g^{m}"
    if spec.kind == BINARY_DIHEDRAL:
        n = spec.n
        if base_name == "Plus":
            r = k % (2 * n)
            if r == 0:
                return "Id"
            if r == n:
                return "-Id"
            return f"A^{min(r, 2 * n - r)}"
        r = k % 4
        if r == 0:
            return "Id"
        if r == 2:
            return "-Id"
        # the embedded Minus orbit lifts by AB, the Saddle one by B; the
        # cube of either is conjugate to the other exactly when n is odd
        if base_name == "Minus":
            return "AB" if r == 1 else ("B" if n % 2 else "AB")
        return "B" if r == 1 else ("AB" if n % 2 else "B")
    table = _POLY_CLASS_TABLE[(spec.label, base_name)]
    return table[k % _base_by_name(spec, base_name).cov]


@lru_cache(maxsize=None)
def _validate_class_tables(kind, n):
    """Check the lookup tables against lifts through the fiber geometry.

    The embedded orbit over p lifts to the fiber arc of length 2*pi/cov,
    so its deck transformation is the fiber isotropy generator g_p with
    the smallest positive phase, and iterates lift to powers of g_p.
    """
    spec = GroupSpec(kind, n)
    group = build_group(spec)
    bases = base_table(spec)
    fixed = fixed_points(group)
    checked = 0
    for fx, base in zip(fixed, bases):
        if fx.kind.name != base.name or fx.kind.isotropy != base.isotropy:
            raise LiftMismatch(
                f"{spec.label}: fixed orbit {fx.kind} does not match base {base}")
        gi, phase = fiber_isotropy_generator(group, fx.representative)
        if group.element_order(gi) != base.cov:
            raise LiftMismatch(
                f"{spec.label}/{base.name}: lift has order "
                f"{group.element_order(gi)}, expected {base.cov}")
        if abs(phase - 2.0 * math.pi / base.cov) > 1e-8:
            raise LiftMismatch(
                f"{spec.label}/{base.name}: generator phase {phase} "
                f"is not 2*pi/{base.cov}")
        for k in range(1, base.cov + 1):
            want = _class_label(spec, base.name, k)
            got = group.class_of(group.power_index(gi, k)).label
            if got != want:
                raise LiftMismatch(
                    f"{spec.label}: {base.name}^{k} lifts into [{got}], "
                    f"table says [{want}]")
            checked += 1
    return checked


def make_orbit(spec, base, k):
    """Assemble the full orbit record for the k-th iterate over a base."""
    spec = _spec(spec)
    if isinstance(base, str):
        base = _base_by_name(spec, base)
    if k < 1:
        raise ValueError(f"multiplicity must be >= 1, got {k}")
    _validate_class_tables(spec.kind, spec.n)
    rotation = _rotation_of(base, k)
    cz = formal_floor(rotation) + formal_ceil(rotation)
    closed = _cz_closed(base, k)
    if cz != closed:
        raise AssertionError(
            f"{spec.label} {base.name}^{k}: floor+ceil gives {cz}, "
            f"closed formula gives {closed}")
    orbit_type, good = _classify(base, k)
    return ReebOrbit(
        group=spec,
        base=OrbifoldPointKind(base.name, base.isotropy),
        k=k,
        action=_action_of(base, k),
        rotation=rotation,
        cz=cz,
        grading=cz - 1,
        orbit_type=orbit_type,
        good=good,
        class_label=_class_label(spec, base.name, k),
        contractible=(k % base.cov == 0),
    )


def _max_multiplicity(spec, base, N):
    # closed-form largest k with action below L_N, per base family
    spec = _spec(spec)
    if spec.kind == CYCLIC:
        return spec.n * N - 1
    if spec.kind == BINARY_DIHEDRAL:
        return 2 * spec.n * N - 1 if base.sign > 0 else 4 * N - 1
    if base.sign < 0:
        return 2 * N * spec.vertex_isotropy - 1
    return 4 * N - 1 if base.sign == 0 else 6 * N - 1


def enumerate_orbits(spec, N):
    """All orbits with action below L_N, ordered by base then multiplicity."""
    spec = _spec(spec)
    limit = action_threshold(spec, N)
    out = []
    for base in base_table(spec):
        k = 1
        while _action_of(base, k) < limit:
            out.append(make_orbit(spec, base, k))
            k += 1
        if k - 1 != _max_multiplicity(spec, base, N):
            raise AssertionError(
                f"{spec.label}/{base.name}: enumerated up to k={k - 1}, "
                f"closed range says {_max_multiplicity(spec, base, N)}")
    return out


def cz_index(orbit):
    """Conley-Zehnder index from the closed per-family formula."""
    base = _base_by_name(orbit.group, orbit.base.name)
    return _cz_closed(base, orbit.k)


def rotation_number(orbit):
    """Rotation number as a formal scalar; floor+ceil recovers cz_index."""
    base = _base_by_name(orbit.group, orbit.base.name)
    theta = _rotation_of(base, orbit.k)
    if base.sign != 0 and theta.b == 0 and theta.a.denominator == 1:
        raise DegenerateRotation(
            f"{orbit.name}: elliptic rotation number {theta} is an exact integer")
    return theta


def classify(orbit):
    """(orbit_type, good) recomputed from the base kind and multiplicity."""
    base = _base_by_name(orbit.group, orbit.base.name)
    return _classify(base, orbit.k)


def covering_multiplicity(spec, base):
    """Iteration order at which orbits over the base become contractible."""
    spec = _spec(spec)
    name = base.name if isinstance(base, OrbifoldPointKind) else base
    data = _base_by_name(spec, name)
    expected = 2 * data.isotropy if spec.order % 2 == 0 else data.isotropy
    if data.cov != expected:
        raise AssertionError(
            f"{spec.label}/{name}: stored covering {data.cov} != {expected}")
    return data.cov


def homotopy_class(orbit):
    """Free homotopy class label, from the validated lookup tables."""
    spec = _spec(orbit.group)
    _validate_class_tables(spec.kind, spec.n)
    return _class_label(spec, orbit.base.name, orbit.k)


def degree_census(spec, N):
    """Map grading -> (good count, bad count) below L_N."""
    census = {}
    for orbit in enumerate_orbits(spec, N):
        good, bad = census.get(orbit.grading, (0, 0))
        if orbit.good:
            good += 1
        else:
            bad += 1
        census[orbit.grading] = (good, bad)
    return dict(sorted(census.items()))


def verify_monotonicity(spec, N_max):
    """Exhaustive same-class index/action ordering check below L_{N_max}.

    Under the shared formal eps every admissible pair of levels N <= M
    collapses to: for each ordered pair of same-class orbits below
    L_{N_max}, equal cz forces the identical orbit, and strictly smaller
    cz forces strictly smaller action.
    """
    spec = _spec(spec)
    if N_max < 1:
        raise ValueError(f"N_max must be >= 1, got {N_max}")
    orbits = enumerate_orbits(spec, N_max)
    by_class = {}
    for orbit in orbits:
        by_class.setdefault(orbit.class_label, []).append(orbit)
    pairs = 0
    for members in by_class.values():
        for gp in members:
            for gm in members:
                pairs += 1
                if gp.cz == gm.cz:
                    if gp.base.name != gm.base.name or gp.k != gm.k:
                        raise MonotonicityViolation(
                            f"{spec.label}: distinct orbits {gp.name} and "
                            f"{gm.name} share class [{gp.class_label}] "
                            f"and cz={gp.cz}")
                elif gp.cz < gm.cz and not gp.action < gm.action:
                    raise MonotonicityViolation(
                        f"{spec.label}: pair ({gp.name}, {gm.name}) in class "
                        f"[{gp.class_label}] has cz {gp.cz} < {gm.cz} but "
                        f"action {gp.action} >= {gm.action}")
    return {"check": "monotonicity", "spec": spec.label, "n_max": N_max,
            "orbits": len(orbits), "pairs": pairs, "violations": 0}


def orbit_row(orbit):
    """Flat serializable row for the CLI and file outputs."""
    return {
        "base": orbit.base.name,
        "k": orbit.k,
        "action_a": str(orbit.action.a),
        "action_b": str(orbit.action.b),
        "cz": orbit.cz,
        "grading": orbit.grading,
        "type": orbit.orbit_type,
        "good": orbit.good,
        "class": orbit.class_label,
        "contractible": orbit.contractible,
    }
