"""Finite subgroups of the unit quaternions and their spherical geometry.

Builds the binary cyclic, dihedral, tetrahedral, octahedral and icosahedral
groups by closing hard-coded generator sets under multiplication, computes
their conjugacy classes with stable labels, the 2-to-1 projection to
rotations, the fiber projection S^3 -> S^2, the fixed-point orbits of the
rotation image on S^2, and the ADE type attached to each group.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np

TOL_EQ = 1e-9       # element equality, max component difference
TOL_NORM = 1e-12    # unit norm drift
TOL_POINT = 1e-6    # fixed point clustering on S^2

CYCLIC = "cyclic"
BINARY_DIHEDRAL = "binary_dihedral"
BINARY_TETRAHEDRAL = "binary_tetrahedral"
BINARY_OCTAHEDRAL = "binary_octahedral"
BINARY_ICOSAHEDRAL = "binary_icosahedral"

_POLYHEDRAL = (BINARY_TETRAHEDRAL, BINARY_OCTAHEDRAL, BINARY_ICOSAHEDRAL)

N_MIN, N_MAX = 2, 64


class ParseError(ValueError):
    """Malformed group spec string; carries the offending position."""

    def __init__(self, text, position, message):
        self.text = text
        self.position = position
        super().__init__(f"{message} in {text!r} at position {position}")


class NonClosure(RuntimeError):
    """Generator closure did not produce the expected group order."""


class AmbiguousLabel(RuntimeError):
    """Conjugacy classes could not be separated into stable labels."""


class EquivarianceViolation(AssertionError):
    """Fiber projection failed to intertwine the two group actions."""


class Quaternion:
    """Unit quaternion a + bi + cj + dk, identified with the 2x2 matrix
    [[alpha, -conj(beta)], [beta, conj(alpha)]] where alpha = a + ib and
    beta = c + id.  Multiplication matches the matrix product exactly.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self.d = float(d)

    @staticmethod
    def identity():
        return Quaternion(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_complex_pair(alpha, beta):
        return Quaternion(alpha.real, alpha.imag, beta.real, beta.imag)

    @property
    def alpha(self):
        return complex(self.a, self.b)

    @property
    def beta(self):
        return complex(self.c, self.d)

    def components(self):
        return (self.a, self.b, self.c, self.d)

    def norm(self):
        return math.sqrt(self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d)

    def normalized(self):
        r = self.norm()
        return Quaternion(self.a / r, self.b / r, self.c / r, self.d / r)

    def conjugate(self):
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def inverse(self):
        # unit quaternion: inverse is the conjugate
        return self.conjugate()

    def trace(self):
        # trace of the corresponding SU(2) matrix
        return 2.0 * self.a

    def __mul__(self, other):
        a1, b1 = self.alpha, self.beta
        a2, b2 = other.alpha, other.beta
        alpha = a1 * a2 - b1.conjugate() * b2
        beta = b1 * a2 + a1.conjugate() * b2
        return Quaternion.from_complex_pair(alpha, beta)

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def apply(self, z1, z2):
        """Act on (z1, z2) in C^2 by the SU(2) matrix."""
        return (self.alpha * z1 - self.beta.conjugate() * z2,
                self.beta * z1 + self.alpha.conjugate() * z2)

    def close_to(self, other, tol=TOL_EQ):
        return (abs(self.a - other.a) <= tol and abs(self.b - other.b) <= tol
                and abs(self.c - other.c) <= tol and abs(self.d - other.d) <= tol)

    def is_identity(self, tol=TOL_EQ):
        return self.close_to(Quaternion.identity(), tol)

    def __repr__(self):
        return f"Quaternion({self.a:+.6f}, {self.b:+.6f}, {self.c:+.6f}, {self.d:+.6f})"


@dataclass(frozen=True)
class GroupSpec:
    """Which finite subgroup: kind plus the parameter n where applicable."""

    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind in (CYCLIC, BINARY_DIHEDRAL):
            if self.n is None or not (N_MIN <= self.n <= N_MAX):
                raise ValueError(f"{self.kind} requires {N_MIN} <= n <= {N_MAX}, got {self.n}")
        elif self.kind in _POLYHEDRAL:
            if self.n is not None:
                raise ValueError(f"{self.kind} takes no parameter")
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @property
    def order(self):
        if self.kind == CYCLIC:
            return self.n
        if self.kind == BINARY_DIHEDRAL:
            return 4 * self.n
        return {BINARY_TETRAHEDRAL: 24, BINARY_OCTAHEDRAL: 48, BINARY_ICOSAHEDRAL: 120}[self.kind]

    @property
    def class_count(self):
        if self.kind == CYCLIC:
            return self.n
        if self.kind == BINARY_DIHEDRAL:
            return self.n + 3
        return {BINARY_TETRAHEDRAL: 7, BINARY_OCTAHEDRAL: 8, BINARY_ICOSAHEDRAL: 9}[self.kind]

    @property
    def vertex_isotropy(self):
        """Rotation order around a vertex axis (polyhedral kinds only)."""
        return {BINARY_TETRAHEDRAL: 3, BINARY_OCTAHEDRAL: 4, BINARY_ICOSAHEDRAL: 5}[self.kind]

    @property
    def is_polyhedral(self):
        return self.kind in _POLYHEDRAL

    @property
    def label(self):
        if self.kind == CYCLIC:
            return f"C:{self.n}"
        if self.kind == BINARY_DIHEDRAL:
            return f"D:{self.n}"
        return {BINARY_TETRAHEDRAL: "T", BINARY_OCTAHEDRAL: "O", BINARY_ICOSAHEDRAL: "I"}[self.kind]

    def __str__(self):
        return self.label


_SPEC_RE = re.compile(r"^([CDTOI])(?::(\d+))?$")


def parse_group_spec(text):
    """Parse 'C:<n>', 'D:<n>', 'T', 'O', 'I' into a GroupSpec."""
    m = _SPEC_RE.match(text.strip())
    if m is None:
        bad = next((i for i, ch in enumerate(text) if ch not in "CDTOI:0123456789"), 0)
        raise ParseError(text, bad, "unrecognized group spec")
    letter, num = m.group(1), m.group(2)
    if letter in "CD":
        if num is None:
            raise ParseError(text, len(text), f"{letter} requires a parameter, e.g. {letter}:3")
        n = int(num)
        if not (N_MIN <= n <= N_MAX):
            raise ParseError(text, text.index(":") + 1, f"parameter must satisfy {N_MIN} <= n <= {N_MAX}")
        return GroupSpec(CYCLIC if letter == "C" else BINARY_DIHEDRAL, n)
    if num is not None:
        raise ParseError(text, text.index(":"), f"{letter} takes no parameter")
    return GroupSpec({"T": BINARY_TETRAHEDRAL, "O": BINARY_OCTAHEDRAL, "I": BINARY_ICOSAHEDRAL}[letter])


def _generators(spec):
    if spec.kind == CYCLIC:
        t = 2.0 * math.pi / spec.n
        return [Quaternion(math.cos(t), math.sin(t), 0.0, 0.0)]
    if spec.kind == BINARY_DIHEDRAL:
        t = math.pi / spec.n
        return [Quaternion(math.cos(t), math.sin(t), 0.0, 0.0),   # A
                Quaternion(0.0, 0.0, 1.0, 0.0)]                   # B
    i = Quaternion(0.0, 1.0, 0.0, 0.0)
    omega = Quaternion(0.5, 0.5, 0.5, 0.5)
    if spec.kind == BINARY_TETRAHEDRAL:
        return [i, omega]
    if spec.kind == BINARY_OCTAHEDRAL:
        s = Quaternion(math.sqrt(0.5), math.sqrt(0.5), 0.0, 0.0)  # (1+i)/sqrt(2)
        return [omega, s]
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    t = Quaternion(phi / 2.0, 1.0 / (2.0 * phi), 0.5, 0.0)
    return [omega, t]


def dihedral_generators(n):
    """The distinguished pair (A, B) of the binary dihedral group."""
    a, b = _generators(GroupSpec(BINARY_DIHEDRAL, n))
    return a, b


class _ElementTable:
    """Element list with tolerance-aware membership lookup.

    Distinct elements of the groups handled here are separated by at least
    ~1e-2 per component scale, so a rounded-key dict is a safe fast path;
    a linear scan backs it up for boundary-straddling floats.
    """

    def __init__(self):
        self.elements = []
        self._bykey = {}

    @staticmethod
    def _key(q):
        return (round(q.a, 6), round(q.b, 6), round(q.c, 6), round(q.d, 6))

    def find(self, q):
        idx = self._bykey.get(self._key(q))
        if idx is not None and self.elements[idx].close_to(q):
            return idx
        for i, e in enumerate(self.elements):
            if e.close_to(q):
                return i
        return None

    def add(self, q):
        self._bykey.setdefault(self._key(q), len(self.elements))
        self.elements.append(q)


@dataclass(frozen=True)
class ConjugacyClass:
    label: str
    members: tuple          # element indices into FiniteSubgroup.elements
    element_order: int
    trace: float

    @property
    def size(self):
        return len(self.members)


@dataclass(frozen=True)
class OrbifoldPointKind:
    """Kind of exceptional fiber: name plus the rotation isotropy order."""

    name: str
    isotropy: int


@dataclass(frozen=True)
class DynkinType:
    family: str   # "A", "D" or "E"
    rank: int

    @property
    def vertices(self):
        return self.rank

    def __str__(self):
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class FixedOrbit:
    kind: OrbifoldPointKind
    representative: tuple   # point on S^2
    size: int
    points: tuple           # all points of the orbit


class FiniteSubgroup:
    """A finite subgroup of the unit quaternions with its class data."""

    def __init__(self, spec, elements, table):
        self.spec = spec
        self.elements = elements
        self._table = table
        self._classes = None
        self._class_of = None

    @property
    def order(self):
        return len(self.elements)

    def index_of(self, q):
        idx = self._table.find(q)
        if idx is None:
            raise NonClosure(f"element {q!r} not in the group {self.spec}")
        return idx

    def element_order(self, idx):
        q = self.elements[idx]
        p = q
        for k in range(1, self.order + 1):
            if p.is_identity():
                return k
            p = p * q
        raise NonClosure(f"element {q!r} has no finite order within {self.order} steps")

    def power_index(self, idx, k):
        """Index of elements[idx] raised to the k-th power (k >= 0)."""
        out = Quaternion.identity()
        base = self.elements[idx]
        for _ in range(k % (2 * self.order)):
            out = out * base
        return self.index_of(out)

    @property
    def classes(self):
        if self._classes is None:
            self._classes = conjugacy_classes(self)
        return self._classes

    def class_of(self, idx):
        """The ConjugacyClass containing element index idx."""
        if self._class_of is None:
            lookup = {}
            for c in self.classes:
                for m in c.members:
                    lookup[m] = c
            self._class_of = lookup
        return self._class_of[idx]

    def __repr__(self):
        return f"FiniteSubgroup({self.spec.label}, order={self.order})"


def build_group(spec):
    """Close the hard-coded generators under multiplication."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    gens = _generators(spec)
    table = _ElementTable()
    table.add(Quaternion.identity())
    frontier = [Quaternion.identity()]
    expected = spec.order
    while frontier:
        fresh = []
        for x in frontier:
            for g in gens:
                y = (g * x).normalized()
                if abs(y.norm() - 1.0) > TOL_NORM:
                    raise NonClosure(f"norm drift beyond {TOL_NORM} while closing {spec.label}")
                if table.find(y) is None:
                    table.add(y)
                    fresh.append(y)
                    if len(table.elements) > expected:
                        raise NonClosure(
                            f"closure of {spec.label} exceeded expected order {expected}; "
                            "generator set or tolerance is wrong")
        frontier = fresh
    if len(table.elements) != expected:
        raise NonClosure(
            f"closure of {spec.label} stopped at {len(table.elements)}, expected {expected}")
    return FiniteSubgroup(spec, table.elements, table)


def project_so3(q):
    """The 2-to-1 projection to SO(3); P(-g) = P(g)."""
    al, be = q.alpha, q.beta
    r = np.array([
        [abs(al) ** 2 - abs(be) ** 2, 2 * (al * be).imag, 2 * (al * be).real],
        [-2 * (al.conjugate() * be).imag, (al * al + be * be).real, -(al * al + be * be).imag],
        [-2 * (al.conjugate() * be).real, (al * al - be * be).imag, (al * al - be * be).real],
    ])
    if abs(np.linalg.det(r) - 1.0) > 1e-10:
        raise AssertionError("projection left SO(3)")
    return r


def hopf(z1, z2=None):
    """Fiber projection S^3 -> S^2 in coordinates."""
    if z2 is None:
        z1, z2 = z1
    al, be = complex(z1), complex(z2)
    w = al.conjugate() * be
    return np.array([abs(al) ** 2 - abs(be) ** 2, -2.0 * w.imag, -2.0 * w.real])


def fiber_point(p):
    """Some (z1, z2) on S^3 with hopf(z1, z2) = p."""
    x, y, w = float(p[0]), float(p[1]), float(p[2])
    if x < -1.0 + 1e-12:
        return (0j, 1 + 0j)
    al = complex(math.sqrt((1.0 + x) / 2.0), 0.0)
    be = complex(-w / 2.0, -y / 2.0) / al.conjugate()
    return (al, be)


def fiber_phase(g, z):
    """Phase theta in [0, 2pi) with g.z = e^{i theta} z, for g fixing the fiber of z."""
    w1, w2 = g.apply(*z)
    inner = w1 * z[0].conjugate() + w2 * z[1].conjugate()
    if abs(abs(inner) - 1.0) > 1e-8:
        raise AssertionError("element does not preserve the fiber")
    return cmath.phase(inner) % (2.0 * math.pi)


def fiber_isotropy_generator(group, p):
    """The fiber isotropy element over p with smallest positive phase.

    The elements fixing the fiber through p form a cyclic group; the
    returned index generates it.
    """
    z = fiber_point(p)
    best = None
    for i, g in enumerate(group.elements):
        img = hopf(*g.apply(*z))
        if np.max(np.abs(img - np.asarray(p, dtype=float))) > TOL_POINT:
            continue
        theta = fiber_phase(g, z)
        if theta > 1e-9 and (best is None or theta < best[0]):
            best = (theta, i)
    if best is None:
        raise AmbiguousLabel(f"no nontrivial fiber isotropy over {p}")
    return best[1], best[0]


def _rotation_image(group):
    """Unique rotations P(g), each tagged with one preimage index."""
    rots = []
    seen = {}
    for i, g in enumerate(group.elements):
        r = project_so3(g)
        key = tuple(np.round(r, 6).ravel())
        if key not in seen:
            seen[key] = True
            rots.append(r)
    return rots


def _rotation_axis(r):
    v = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]]) / 2.0
    s = np.linalg.norm(v)
    if s > 1e-6:
        return v / s
    # angle-pi rotation: any column of R + I spans the axis
    m = r + np.eye(3)
    col = m[:, int(np.argmax(np.linalg.norm(m, axis=0)))]
    return col / np.linalg.norm(col)


def fixed_points(group):
    """Orbits of fixed points of the rotation image on S^2.

    Returns FixedOrbit entries sorted by their named kind.
    """
    spec = group.spec
    rots = _rotation_image(group)

    def _isotropy(p):
        return sum(1 for r in rots if np.max(np.abs(r @ p - p)) < TOL_POINT)

    if spec.kind == CYCLIC:
        # the rotation image fixes the first axis; for n = 2 it is trivial
        # but the axis endpoints still carry the exceptional fibers
        north = np.array([1.0, 0.0, 0.0])
        south = -north
        iso = _isotropy(north)
        return [
            FixedOrbit(OrbifoldPointKind("SouthPole", iso), tuple(south), 1, (tuple(south),)),
            FixedOrbit(OrbifoldPointKind("NorthPole", iso), tuple(north), 1, (tuple(north),)),
        ]

    nontrivial = [r for r in rots if np.max(np.abs(r - np.eye(3))) > 1e-8]

    pts = []

    def _register(p):
        for q in pts:
            if np.max(np.abs(q - p)) < TOL_POINT:
                return
        pts.append(p)

    for r in nontrivial:
        ax = _rotation_axis(r)
        _register(ax)
        _register(-ax)

    # partition into rotation orbits
    orbits = []
    remaining = list(range(len(pts)))
    while remaining:
        i0 = remaining[0]
        orbit = []
        for r in rots:
            img = r @ pts[i0]
            for j in list(remaining):
                if np.max(np.abs(pts[j] - img)) < TOL_POINT:
                    if j not in orbit:
                        orbit.append(j)
        orbit = sorted(set(orbit) | {i0})
        remaining = [j for j in remaining if j not in orbit]
        orbits.append(orbit)

    def _orbit_entry(name, members):
        iso = _isotropy(pts[members[0]])
        pt_list = tuple(tuple(pts[j]) for j in members)
        rep = max(pt_list)  # deterministic representative
        return FixedOrbit(OrbifoldPointKind(name, iso), rep, len(members), pt_list)

    def _orbit_containing(point):
        for members in orbits:
            for j in members:
                if np.max(np.abs(pts[j] - point)) < TOL_POINT:
                    return members
        raise AssertionError(f"expected fixed point {point} not found")

    out = []
    if spec.kind == BINARY_DIHEDRAL:
        plus = _orbit_containing(np.array([1.0, 0.0, 0.0]))
        saddle = _orbit_containing(np.array([0.0, 1.0, 0.0]))
        minus = next(o for o in orbits if o not in (plus, saddle))
        out.append(_orbit_entry("Minus", minus))
        out.append(_orbit_entry("Saddle", saddle))
        out.append(_orbit_entry("Plus", plus))
    else:
        iv = spec.vertex_isotropy
        by_iso = {}
        for members in orbits:
            by_iso.setdefault(_isotropy(pts[members[0]]), []).append(members)
        edge = by_iso[2]
        if len(edge) != 1:
            raise AssertionError("expected a single order-2 orbit")
        if iv == 3:
            # tetrahedral: two order-3 orbits, Vertex is the one holding the
            # lexicographically largest point (a labeling convention)
            pair = by_iso[3]
            if len(pair) != 2:
                raise AssertionError("expected two order-3 orbits")
            keyed = sorted(pair, key=lambda mem: max(tuple(pts[j]) for j in mem), reverse=True)
            vertex, face = keyed[0], keyed[1]
        else:
            vertex = by_iso[iv][0]
            face = by_iso[3][0]
        out.append(_orbit_entry("Vertex", vertex))
        out.append(_orbit_entry("Edge", edge[0]))
        out.append(_orbit_entry("Face", face))
    return out


def _raw_classes(group):
    """Conjugation orbits as sorted index tuples."""
    order = group.order
    assigned = [False] * order
    classes = []
    for i in range(order):
        if assigned[i]:
            continue
        orbit = set()
        gi = group.elements[i]
        for x in group.elements:
            j = group.index_of(x * gi * x.inverse())
            orbit.add(j)
        for j in orbit:
            assigned[j] = True
        classes.append(tuple(sorted(orbit)))
    return classes


def _validate_class(group, members):
    orders = {group.element_order(j) for j in members}
    if len(orders) != 1:
        raise AmbiguousLabel(f"class {members} mixes element orders {sorted(orders)}")
    traces = [group.elements[j].trace() for j in members]
    if max(traces) - min(traces) > TOL_EQ:
        raise AmbiguousLabel(f"class {members} mixes traces beyond {TOL_EQ}")
    return orders.pop(), sum(traces) / len(traces)


def _power_tower(group, gen_idx, raw):
    """Map conjugacy class -> first power of the generator hitting it."""
    tower = {}
    idx = gen_idx
    k = 1
    while True:
        cls = next(c for c in raw if idx in c)
        if cls not in tower:
            tower[cls] = k
        if group.elements[idx].is_identity():
            break
        idx = group.index_of(group.elements[idx] * group.elements[gen_idx])
        k += 1
        if k > 2 * group.order + 1:
            raise AmbiguousLabel("generator power tower did not close")
    return tower


def conjugacy_classes(group):
    """Conjugacy classes with stable labels.

    Labels: cyclic 'Id'/'g^m'; dihedral 'Id'/'-Id'/'A^m'/'B'/'AB';
    polyhedral classes are prefixed by T/O/I with element-order subscripts,
    two classes of equal order separated by the vertex-fiber power tower
    (first one reached gets suffix A).
    """
    spec = group.spec
    raw = _raw_classes(group)
    meta = {members: _validate_class(group, members) for members in raw}

    labels = {}
    ident = next(m for m in raw if group.elements[m[0]].is_identity())
    labels[ident] = "Id"

    def _neg_class():
        # -Id is the unique order-2 element of these groups
        neg = [m for m in raw if meta[m][0] == 2]
        if len(neg) != 1 or len(neg[0]) != 1:
            raise AmbiguousLabel("expected a single central order-2 class")
        return neg[0]

    if spec.kind == CYCLIC:
        gen_idx = group.index_of(_generators(spec)[0])
        tower = _power_tower(group, gen_idx, raw)
        for members, first in tower.items():
            if members not in labels:
                labels[members] = f"g^{first}"
    elif spec.kind == BINARY_DIHEDRAL:
        labels[_neg_class()] = "-Id"
        a, b = _generators(spec)
        ia, ib = group.index_of(a), group.index_of(b)
        iab = group.index_of(a * b)
        tower = _power_tower(group, ia, raw)
        for members, first in tower.items():
            if members not in labels:
                m = min(first, 2 * spec.n - first)
                labels[members] = f"A^{m}"
        for members in raw:
            if members in labels:
                continue
            if ib in members:
                labels[members] = "B"
            elif iab in members:
                labels[members] = "AB"
            else:
                raise AmbiguousLabel(f"unlabeled dihedral class {members}")
    else:
        prefix = spec.label
        labels[ident] = f"{prefix}_Id"
        labels[_neg_class()] = f"{prefix}_-Id"
        orbits = fixed_points(group)
        vertex = next(o for o in orbits if o.kind.name == "Vertex")
        gv, _ = fiber_isotropy_generator(group, vertex.representative)
        tower = _power_tower(group, gv, raw)
        by_order = {}
        for members in raw:
            if members in labels:
                continue
            by_order.setdefault(meta[members][0], []).append(members)
        for order, shared in sorted(by_order.items()):
            if len(shared) == 1:
                labels[shared[0]] = f"{prefix}_{order}"
            elif len(shared) == 2:
                hits = sorted((t, m) for m in shared if (t := tower.get(m)) is not None)
                if not hits:
                    raise AmbiguousLabel(f"neither order-{order} class lies in the vertex tower")
                first = hits[0][1]
                second = next(m for m in shared if m != first)
                labels[first] = f"{prefix}_{{{order},A}}"
                labels[second] = f"{prefix}_{{{order},B}}"
            else:
                raise AmbiguousLabel(f"{len(shared)} classes share element order {order}")

    out = []
    for members in raw:
        order, trace = meta[members]
        out.append(ConjugacyClass(labels[members], members, order, trace))
    if len(out) != spec.class_count:
        raise AmbiguousLabel(
            f"{spec.label}: found {len(out)} classes, expected {spec.class_count}")
    return out


def dynkin_type(spec):
    """ADE type whose diagram has (class count - 1) vertices."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    if spec.kind == CYCLIC:
        return DynkinType("A", spec.n - 1)
    if spec.kind == BINARY_DIHEDRAL:
        return DynkinType("D", spec.n + 2)
    return DynkinType("E", {BINARY_TETRAHEDRAL: 6, BINARY_OCTAHEDRAL: 7, BINARY_ICOSAHEDRAL: 8}[spec.kind])


def check_equivariance(group, pairs=100, seed=0, tol=TOL_EQ):
    """Random check that hopf(A.z) = P(A).hopf(z)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        z = (complex(v[0], v[1]), complex(v[2], v[3]))
        g = group.elements[int(rng.integers(group.order))]
        lhs = hopf(*g.apply(*z))
        rhs = project_so3(g) @ hopf(*z)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    if worst > tol:
        raise EquivarianceViolation(f"fiber equivariance residual {worst:.3e} exceeds {tol:.1e}")
    return {"check": "equivariance", "instances": pairs, "failures": 0, "max_residual": worst}
