"""Symmetry-invariant Morse theory on the quotient two-sphere.

The rotation image H of a binary group acts on S^2 with finitely many
exceptional axes; their endpoints form Fix(H).  This module builds a smooth
H-invariant Morse function whose critical set is exactly Fix(H), classifies
the critical points by Morse index, counts gradient flow lines between
critical orbits by shooting along Hessian eigen-directions, assembles the
weighted orbifold Morse complex over the orientable generators, and checks
the index bookkeeping that ties Morse indices downstairs to Conley-Zehnder
indices of the covering closed orbits upstairs.

Construction of the invariant function
--------------------------------------
For a cyclic image (a rotation group about one axis, possibly trivial) the
height along that axis is used: it is invariant and has exactly two critical
points, the poles.  Otherwise the function is a difference of smooth bump
sums

    f(x) = sum_{p in Max} ((1 + <x, p>)/2)^m  -  sum_{q in Min} ((1 + <x, q>)/2)^m

where Max and Min are the full H-orbits of maximum- and minimum-type fixed
points and m is an integer sharpness.  Because each sum ranges over a whole
orbit, f is exactly H-invariant: group-averaging it is a no-op, which the
constructor verifies numerically rather than assuming.  Saddle points then
appear at the remaining fixed points, forced by symmetry.  The sharpness is
escalated through a small ladder until a quasi-uniform scan certifies that
the critical set is exactly Fix(H) and every Hessian index matches the
expected assignment (minima on minimum-type points, and so on).

Flow lines and the weighted complex
-----------------------------------
Trajectories between consecutive-index critical points are found by
displacing 1e-4 along the saddle's Hessian eigen-directions and integrating
the (plus or minus) gradient with a fourth-order tangent-space stepper and
re-projection to the sphere, declaring convergence within 1e-6 of a critical
point.  The H-action permutes trajectories; quotient classes give the
downstairs counts, and each class carries the integer weight
|H_p| / |H_x| (source isotropy over trajectory stabilizer).

Index-1 critical points with order-2 isotropy are non-orientable downstairs
(the isotropy involution acts on the unstable direction by -1), so the
orbifold complex keeps only the orientable generators; for every supported
group those sit in degrees 0 and 2, the differential vanishes, and the
homology ranks are (1, 0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groups import (
    OrbifoldPointKind,
    build_group,
    fixed_points,
    parse_group_spec,
    _rotation_image,
)
from .orbits import base_table, covering_multiplicity, make_orbit

__all__ = [
    "InvariantMorseFunction",
    "CriticalPoint",
    "Trajectory",
    "FlowLines",
    "OrbifoldComplex",
    "SpuriousCriticalPoint",
    "IndexMismatch",
    "NonConvergentTrajectory",
    "HomologyMismatch",
    "IndexCorrespondenceFailure",
    "build_invariant_morse",
    "find_critical_points",
    "count_flow_lines",
    "orbifold_complex",
    "seifert_index_check",
]

# ---------------------------------------------------------------------------
# tolerances and budgets

#: maximum allowed |f(h.x) - f(x)| over group elements and sample points
TOL_INVARIANCE = 1e-10
#: critical points must refine to within this distance of the fixed points
TOL_CRITICAL_MATCH = 1e-6
#: scan neighborhoods around Fix(H) excluded from the gradient-floor check
MASK_RADIUS = 1e-2
#: the tangent gradient norm must exceed this floor outside the mask
GRADIENT_FLOOR = 1e-6
#: scan points whose gradient norm falls below this are refined and must
#: land back on Fix(H); otherwise the critical set has a spurious member
CANDIDATE_THRESHOLD = 1e-3
#: number of quasi-uniform scan points on the sphere
SCAN_POINTS = 100_000
#: initial displacement along a Hessian eigen-direction when shooting
SEED_DISPLACEMENT = 1e-4
#: a trajectory converges when it comes within this distance of a critical point
TOL_CONVERGENCE = 1e-6
#: chordal distance at which an endpoint Newton snap is attempted
SNAP_RADIUS = 5e-4
#: hard cap on integrator steps per batch before giving up
STEP_LIMIT = 20_000
#: arc-length step of the unit-speed integrator (shrunk near the targets)
STEP_BASE = 2e-3

_EXPECTED_UPSTAIRS = None  # count check is derived from the fixed orbits


class SpuriousCriticalPoint(ArithmeticError):
    """The invariant function has (or cannot exclude) critical points off Fix(H)."""


class IndexMismatch(AssertionError):
    """A critical point's Hessian index disagrees with its expected assignment."""


class NonConvergentTrajectory(ArithmeticError):
    """A shot gradient trajectory failed to converge to the expected target set."""


class HomologyMismatch(AssertionError):
    """The orbifold complex does not have the homology ranks of the two-sphere."""


class IndexCorrespondenceFailure(AssertionError):
    """Morse index differences disagree with covering-orbit index differences."""


def _spec(spec):
    return parse_group_spec(spec) if isinstance(spec, str) else spec


def _normalize(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _fibonacci_sphere(count):
    """Quasi-uniform sample of the unit sphere (golden-angle lattice)."""
    i = np.arange(count, dtype=float) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / count)
    azimuth = math.pi * (1.0 + math.sqrt(5.0)) * i
    return np.stack(
        [np.cos(polar), np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth)],
        axis=1,
    )


def _tangent_frame(x):
    """An orthonormal basis (u, v) of the tangent plane at a unit vector x."""
    axis = int(np.argmin(np.abs(x)))
    u = np.cross(np.eye(3)[axis], x)
    u /= np.linalg.norm(u)
    v = np.cross(x, u)
    return u, v


# ---------------------------------------------------------------------------
# the invariant function


class InvariantMorseFunction:
    """A smooth H-invariant function on S^2 with critical set Fix(H).

    ``centers_max``/``centers_min`` hold the bump centers (full H-orbits of
    maximum- and minimum-type fixed points); both are ``None`` for the cyclic
    height function, which is ``f(x) = x[0]`` along the symmetry axis.
    Evaluation, ambient gradient, and the spherical (tangential) gradient all
    accept batched inputs of shape ``(..., 3)``.
    """

    def __init__(self, spec, group, rotations, fixed_orbits, centers_max, centers_min, sharpness):
        self.spec = spec
        self.group = group
        self.rotations = rotations
        self.fixed_orbits = tuple(fixed_orbits)
        self.centers_max = centers_max
        self.centers_min = centers_min
        self.sharpness = sharpness
        self._critical_cache = None

    @property
    def kind(self):
        """"height" for the cyclic axis function, else "bump-sum"."""
        return "height" if self.centers_max is None else "bump-sum"

    # -- evaluation ---------------------------------------------------------

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.centers_max is None:
            return x[..., 0]
        plus = ((1.0 + x @ self.centers_max.T) / 2.0) ** self.sharpness
        minus = ((1.0 + x @ self.centers_min.T) / 2.0) ** self.sharpness
        return plus.sum(axis=-1) - minus.sum(axis=-1)

    def gradient_ambient(self, x):
        x = np.asarray(x, dtype=float)
        if self.centers_max is None:
            out = np.zeros(x.shape)
            out[..., 0] = 1.0
            return out
        m = self.sharpness
        gp = (m / 2.0) * ((1.0 + x @ self.centers_max.T) / 2.0) ** (m - 1)
        gm = (m / 2.0) * ((1.0 + x @ self.centers_min.T) / 2.0) ** (m - 1)
        return gp @ self.centers_max - gm @ self.centers_min

    def gradient(self, x):
        """Spherical gradient: the ambient gradient projected to the tangent plane."""
        x = np.asarray(x, dtype=float)
        g = self.gradient_ambient(x)
        return g - np.sum(g * x, axis=-1, keepdims=True) * x

    def hessian_ambient(self, x):
        x = np.asarray(x, dtype=float)
        if self.centers_max is None:
            return np.zeros((3, 3))
        m = self.sharpness
        out = np.zeros((3, 3))
        for centers, sgn in ((self.centers_max, 1.0), (self.centers_min, -1.0)):
            w = (m * (m - 1) / 4.0) * ((1.0 + centers @ x) / 2.0) ** (m - 2)
            out += sgn * (centers.T * w) @ centers
        return out

    def sphere_hessian(self, x, frame=None):
        """The 2x2 Hessian of f|_{S^2} in an orthonormal tangent frame at x.

        With P the tangent projection this is P (Hess F) P - (x . grad F) I
        restricted to the frame; at a critical point it is frame-covariant,
        so eigenvalue signs (the Morse index) do not depend on the frame.
        """
        x = np.asarray(x, dtype=float)
        u, v = frame if frame is not None else _tangent_frame(x)
        amb = self.hessian_ambient(x)
        radial = float(self.gradient_ambient(x) @ x)
        basis = np.stack([u, v], axis=1)
        return basis.T @ amb @ basis - radial * np.eye(2)

    # -- invariance ---------------------------------------------------------

    def invariance_residual(self, samples=2048):
        """max |f(R x) - f(x)| over the rotation image and a sphere sample."""
        pts = _fibonacci_sphere(samples)
        base = self.value(pts)
        worst = 0.0
        for rot in self.rotations:
            worst = max(worst, float(np.max(np.abs(self.value(pts @ rot.T) - base))))
        return worst

    def averaging_residual(self, samples=2048):
        """max |avg_R f(R x) - f(x)|: group-averaging must be a no-op."""
        pts = _fibonacci_sphere(samples)
        base = self.value(pts)
        acc = np.zeros_like(base)
        for rot in self.rotations:
            acc += self.value(pts @ rot.T)
        return float(np.max(np.abs(acc / len(self.rotations) - base)))


# ---------------------------------------------------------------------------
# critical points


@dataclass
class CriticalPoint:
    """One critical point of the invariant function (a fixed point of H)."""

    point: tuple
    kind: OrbifoldPointKind
    index: int
    isotropy: int
    orientable: bool
    value: float
    hessian_eigenvalues: tuple
    frame: tuple = field(repr=False, default=())
    eigenvectors: tuple = field(repr=False, default=())

    @property
    def location(self):
        return np.array(self.point)

    def eigendirection(self, which):
        """The 3-vector tangent eigen-direction for eigenvalue slot `which`."""
        u, v = (np.array(b) for b in self.frame)
        a, b = self.eigenvectors[which]
        w = a * u + b * v
        return w / np.linalg.norm(w)


def _newton_refine(func, start, iters=60):
    """Newton iteration on the spherical gradient field from `start`.

    Returns (point, converged).  Divergence (a step longer than 0.5) or a
    singular Hessian aborts with converged=False.
    """
    x = _normalize(np.asarray(start, dtype=float))
    for _ in range(iters):
        g = func.gradient(x)
        gnorm = float(np.linalg.norm(g))
        u, v = _tangent_frame(x)
        hess = func.sphere_hessian(x, (u, v))
        try:
            sol = np.linalg.solve(hess, np.array([g @ u, g @ v]))
        except np.linalg.LinAlgError:
            return x, False
        step = sol[0] * u + sol[1] * v
        if float(np.linalg.norm(step)) > 0.5:
            return x, False
        x = _normalize(x - step)
        if float(np.linalg.norm(step)) < 1e-14 and gnorm < 1e-12:
            break
    return x, float(np.linalg.norm(func.gradient(x))) < 1e-10


def _all_fixed_point_array(fixed_orbits):
    return np.array([p for fo in fixed_orbits for p in fo.points], dtype=float)


def _scan_critical_set(func):
    """Certify that the critical set is exactly Fix(H).

    Scans a quasi-uniform lattice; outside MASK_RADIUS neighborhoods of
    Fix(H) the tangent gradient norm must exceed GRADIENT_FLOOR, and every
    scan point below CANDIDATE_THRESHOLD must Newton-refine back into a
    Fix(H) neighborhood.  Returns None on success, else a failure reason.
    """
    pts = _fibonacci_sphere(SCAN_POINTS)
    norms = np.linalg.norm(func.gradient(pts), axis=-1)
    fixed = _all_fixed_point_array(func.fixed_orbits)
    # chordal distance to the nearest fixed point
    nearest = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * np.max(pts @ fixed.T, axis=1)))
    outside = nearest > MASK_RADIUS
    if not np.any(outside):
        return "mask covered the whole scan lattice"
    floor = float(np.min(norms[outside]))
    if floor <= GRADIENT_FLOOR:
        return f"gradient floor {floor:.3e} at distance {np.min(nearest[outside]):.3e}"
    for idx in np.nonzero(outside & (norms < CANDIDATE_THRESHOLD))[0]:
        refined, converged = _newton_refine(func, pts[idx])
        if not converged:
            continue  # wandered off: no critical point certified here
        gap = float(np.min(np.linalg.norm(fixed - refined, axis=1)))
        if gap > CANDIDATE_THRESHOLD:
            return f"refined critical point at {tuple(np.round(refined, 6))} off Fix(H) by {gap:.3e}"
    return None


def _classify_critical_points(func, expected_indices):
    """Refine every fixed point and classify it; raises on any mismatch."""
    out = []
    for fo in func.fixed_orbits:
        want = expected_indices[fo.kind.name]
        for p in fo.points:
            refined, converged = _newton_refine(func, np.array(p))
            if not converged:
                raise SpuriousCriticalPoint(
                    f"{func.spec.label}/{fo.kind.name}: refinement from {p} did not converge")
            drift = float(np.linalg.norm(refined - np.array(p)))
            if drift > TOL_CRITICAL_MATCH:
                raise SpuriousCriticalPoint(
                    f"{func.spec.label}/{fo.kind.name}: critical point drifted {drift:.3e} "
                    f"from the fixed point {p}")
            frame = _tangent_frame(refined)
            hess = func.sphere_hessian(refined, frame)
            eigvals, eigvecs = np.linalg.eigh(hess)
            if float(np.min(np.abs(eigvals))) < 1e-8:
                raise SpuriousCriticalPoint(
                    f"{func.spec.label}/{fo.kind.name}: degenerate Hessian {tuple(eigvals)}")
            index = int(np.sum(eigvals < 0.0))
            if index != want:
                raise IndexMismatch(
                    f"{func.spec.label}/{fo.kind.name}: Hessian index {index}, expected {want} "
                    f"(eigenvalues {tuple(np.round(eigvals, 6))})")
            orientable = not (index == 1 and fo.kind.isotropy == 2)
            out.append(CriticalPoint(
                point=tuple(refined),
                kind=fo.kind,
                index=index,
                isotropy=fo.kind.isotropy,
                orientable=orientable,
                value=float(func.value(refined)),
                hessian_eigenvalues=tuple(float(e) for e in eigvals),
                frame=tuple(tuple(b) for b in frame),
                eigenvectors=tuple(tuple(col) for col in eigvecs.T),
            ))
    return tuple(out)


def _expected_index_map(spec):
    return {entry.name: entry.morse_index for entry in base_table(spec)}


#: sharpness ladder tried in order when building a bump-sum function
_SHARPNESS_LADDER = (4, 6, 8, 12, 16, 24, 32, 48)


def build_invariant_morse(spec):
    """Build the invariant Morse function for the rotation image of `spec`.

    Cyclic images get the axis height function.  Dihedral and polyhedral
    images get the bump-sum construction, escalating the sharpness until the
    critical-set scan and the index classification both pass; if no ladder
    entry passes, SpuriousCriticalPoint reports the last failure.
    """
    spec = _spec(spec)
    group = build_group(spec)
    rotations = _rotation_image(group)
    fixed = fixed_points(group)
    expected = _expected_index_map(spec)

    def _finish(func):
        residual = func.invariance_residual()
        if residual > TOL_INVARIANCE:
            raise SpuriousCriticalPoint(
                f"{spec.label}: invariance residual {residual:.3e} exceeds {TOL_INVARIANCE}")
        averaging = func.averaging_residual()
        if averaging > TOL_INVARIANCE:
            raise SpuriousCriticalPoint(
                f"{spec.label}: group averaging moved the function by {averaging:.3e}")
        reason = _scan_critical_set(func)
        if reason is not None:
            raise SpuriousCriticalPoint(f"{spec.label}: {reason}")
        func._critical_cache = _classify_critical_points(func, expected)
        return func

    if spec.kind == "cyclic":
        return _finish(InvariantMorseFunction(spec, group, rotations, fixed, None, None, None))

    by_name = {fo.kind.name: fo for fo in fixed}
    max_name = next(e.name for e in base_table(spec) if e.morse_index == 2)
    min_name = next(e.name for e in base_table(spec) if e.morse_index == 0)
    centers_max = np.array(by_name[max_name].points, dtype=float)
    centers_min = np.array(by_name[min_name].points, dtype=float)

    last_error = None
    for sharpness in _SHARPNESS_LADDER:
        func = InvariantMorseFunction(
            spec, group, rotations, fixed, centers_max, centers_min, sharpness)
        try:
            return _finish(func)
        except (SpuriousCriticalPoint, IndexMismatch) as err:
            last_error = err
    raise SpuriousCriticalPoint(
        f"{spec.label}: no sharpness in {_SHARPNESS_LADDER} produced a clean critical set "
        f"(last failure: {last_error})")


def find_critical_points(func):
    """All critical points of the invariant function, one per fixed point.

    Points are refined by Newton iteration from the fixed-point seeds and
    classified by the eigenvalue signs of the spherical Hessian; the result
    is cached on the function.  Order follows the fixed-point orbits
    (minimum kind first, then saddle, then maximum).
    """
    if func._critical_cache is None:
        func._critical_cache = _classify_critical_points(func, _expected_index_map(func.spec))
    return func._critical_cache


# ---------------------------------------------------------------------------
# flow lines


@dataclass
class Trajectory:
    """One gradient flow line, recorded in flow direction (descending f)."""

    start: tuple
    end: tuple
    orbit_class: int
    polyline: tuple = field(repr=False, default=())


@dataclass
class FlowLines:
    """Unsigned flow-line count between two critical orbits.

    ``upstairs`` counts trajectories on the sphere; ``downstairs`` counts
    their H-orbit classes; ``weights[c]`` is |H_p| / |H_x| for class c
    (source isotropy over trajectory stabilizer).
    """

    source: str
    target: str
    upstairs: int
    downstairs: int
    weights: tuple
    trajectories: tuple


def _resolve_kind_name(spec, kind):
    name = kind.name if isinstance(kind, OrbifoldPointKind) else str(kind)
    for entry in base_table(spec):
        if entry.name == name:
            return entry
    raise KeyError(f"{spec.label}: no orbifold point named {name!r}")


def _integrate_batch(func, seeds, sign, target_points):
    """March every seed along the unit gradient flow until it hits a target.

    The normalized field sign*grad/|grad| traces the same flow lines at unit
    speed, so progress never stalls where the gradient is weak; the
    arc-length step shrinks near the targets so a trajectory cannot hop over
    its destination.  Once a seed comes within SNAP_RADIUS of a target it is
    finished by Newton iteration (the linear basin), which must land within
    TOL_CONVERGENCE of that target.  Returns (endpoint indices, polylines).
    Raises NonConvergentTrajectory when the step budget runs out or a snap
    lands elsewhere.
    """
    x = np.array(seeds, dtype=float)
    n = len(x)
    endpoints = np.full(n, -1, dtype=int)
    polylines = [[tuple(row)] for row in x]
    active = np.ones(n, dtype=bool)
    targets = np.asarray(target_points, dtype=float)

    def field_at(pts):
        g = func.gradient(pts)
        speed = np.linalg.norm(g, axis=-1, keepdims=True)
        return sign * g / np.maximum(speed, 1e-15)

    steps = 0
    while np.any(active):
        if steps >= STEP_LIMIT:
            stuck = [tuple(np.round(row, 6)) for row in x[active]][:3]
            raise NonConvergentTrajectory(
                f"{func.spec.label}: {int(active.sum())} trajectories unresolved after "
                f"{STEP_LIMIT} steps (sample positions {stuck})")
        idx = np.nonzero(active)[0]
        cur = x[idx]
        dist = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * cur @ targets.T))
        near = np.min(dist, axis=1)
        # step at most a quarter of the remaining distance once close
        h = STEP_BASE * np.clip(near[:, None] / (4.0 * STEP_BASE), 1e-2, 1.0)
        k1 = field_at(cur)
        k2 = field_at(_normalize(cur + 0.5 * h * k1))
        k3 = field_at(_normalize(cur + 0.5 * h * k2))
        k4 = field_at(_normalize(cur + h * k3))
        cur = _normalize(cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        x[idx] = cur
        steps += 1
        dist = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * cur @ targets.T))
        near = np.min(dist, axis=1)
        which = np.argmin(dist, axis=1)
        if steps % 50 == 0:
            for row, i in enumerate(idx):
                polylines[i].append(tuple(cur[row]))
        for row in np.nonzero(near < SNAP_RADIUS)[0]:
            i = idx[row]
            tgt = targets[which[row]]
            refined, converged = _newton_refine(func, cur[row], iters=30)
            if not converged or float(np.linalg.norm(refined - tgt)) > TOL_CONVERGENCE:
                raise NonConvergentTrajectory(
                    f"{func.spec.label}: endpoint snap near {tuple(np.round(tgt, 6))} "
                    f"failed to converge")
            endpoints[i] = int(which[row])
            polylines[i].append(tuple(tgt))
            active[i] = False
    return endpoints, [tuple(line) for line in polylines]


def _critical_permutations(func, crits):
    """For each rotation R, the permutation R induces on the critical points."""
    pts = np.array([c.point for c in crits])
    perms = []
    for rot in func.rotations:
        imgs = pts @ rot.T
        dist = np.linalg.norm(imgs[:, None, :] - pts[None, :, :], axis=-1)
        perm = np.argmin(dist, axis=1)
        if float(np.max(dist[np.arange(len(pts)), perm])) > TOL_CRITICAL_MATCH:
            raise AssertionError("rotation failed to permute the critical points")
        perms.append(perm)
    return perms


def count_flow_lines(func, source, target):
    """Count gradient flow lines from `source` to `target` critical orbits.

    `source` and `target` name orbifold points (strings or kinds).  When the
    Morse index does not drop by exactly one the count is empty.  Otherwise
    each saddle is seeded 1e-4 along its unstable (descending pairs) or
    stable (ascending pairs) eigen-directions; trajectories are integrated
    to convergence and then grouped into H-orbit classes with their
    isotropy weights.
    """
    spec = func.spec
    src = _resolve_kind_name(spec, source)
    tgt = _resolve_kind_name(spec, target)
    if src.morse_index - tgt.morse_index != 1:
        return FlowLines(src.name, tgt.name, 0, 0, (), ())

    crits = find_critical_points(func)
    saddle_kind = src if src.morse_index == 1 else tgt
    far_kind = tgt if src.morse_index == 1 else src
    descending = src.morse_index == 1  # saddle -> minimum, following -grad
    far_targets = [c for c in crits if c.kind.name == far_kind.name]
    target_points = np.array([c.point for c in far_targets])

    seeds = []
    seed_info = []  # (saddle critical index, signed eigen-direction)
    eig_slot = 0 if descending else 1  # unstable (negative) vs stable eigenvalue
    for ci, crit in enumerate(crits):
        if crit.kind.name != saddle_kind.name:
            continue
        w = crit.eigendirection(eig_slot)
        for s in (+1.0, -1.0):
            seeds.append(_normalize(crit.location + SEED_DISPLACEMENT * s * w))
            seed_info.append((ci, s * w))
    if not seeds:
        return FlowLines(src.name, tgt.name, 0, 0, (), ())

    sign = -1.0 if descending else +1.0
    endpoints, polylines = _integrate_batch(func, seeds, sign, target_points)
    for endpoint in endpoints:
        if far_targets[endpoint].kind.name != far_kind.name:
            raise NonConvergentTrajectory(
                f"{spec.label}: trajectory terminated on "
                f"{far_targets[endpoint].kind.name}, expected {far_kind.name}")

    # quotient the trajectory set by the H-action: R maps the trajectory
    # seeded at (saddle, w) to the one seeded at (R.saddle, R.w)
    perms = _critical_permutations(func, crits)
    parent = list(range(len(seeds)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    lookup = {}
    for ti, (ci, w) in enumerate(seed_info):
        lookup.setdefault(ci, []).append((ti, w))
    for rot, perm in zip(func.rotations, perms):
        for ti, (ci, w) in enumerate(seed_info):
            cj = int(perm[ci])
            img = rot @ w
            match = None
            for tj, wj in lookup[cj]:
                if float(np.linalg.norm(img - wj)) < TOL_CRITICAL_MATCH:
                    match = tj
                    break
            if match is None:
                raise AssertionError(
                    f"{spec.label}: rotation did not permute the trajectory seeds")
            union(ti, match)

    order = len(func.rotations)
    class_ids = {}
    class_sizes = {}
    for ti in range(len(seeds)):
        root = find(ti)
        class_ids.setdefault(root, len(class_ids))
        class_sizes[root] = class_sizes.get(root, 0) + 1

    weights = []
    for root, cid in sorted(class_ids.items(), key=lambda kv: kv[1]):
        size = class_sizes[root]
        if order % size != 0:
            raise AssertionError(f"{spec.label}: trajectory class size {size} "
                                 f"does not divide the group order {order}")
        stabilizer = order // size
        if src.isotropy % stabilizer != 0:
            raise AssertionError(
                f"{spec.label}: trajectory stabilizer {stabilizer} does not divide "
                f"the source isotropy {src.isotropy}")
        weights.append(src.isotropy // stabilizer)

    trajectories = []
    for ti, (ci, _w) in enumerate(seed_info):
        saddle_pt = crits[ci].point
        far_pt = far_targets[endpoints[ti]].point
        start, end = (saddle_pt, far_pt) if descending else (far_pt, saddle_pt)
        line = polylines[ti] if descending else tuple(reversed(polylines[ti]))
        trajectories.append(Trajectory(
            start=start, end=end, orbit_class=class_ids[find(ti)], polyline=line))

    return FlowLines(
        source=src.name,
        target=tgt.name,
        upstairs=len(seeds),
        downstairs=len(class_ids),
        weights=tuple(weights),
        trajectories=tuple(trajectories),
    )


# ---------------------------------------------------------------------------
# the orbifold complex


@dataclass
class OrbifoldComplex:
    """The weighted Morse complex over the orientable critical orbits.

    For every supported group the saddle orbit is non-orientable (order-2
    isotropy acting by a half-turn reverses the unstable direction), so the
    generators sit in degrees 0 and 2, every differential is the zero
    matrix, and the homology ranks are those of the two-sphere.
    """

    spec_label: str
    generators: dict
    excluded: tuple
    differential: dict
    flow_counts: dict
    ranks: tuple

    def homology_ranks(self):
        return self.ranks


def orbifold_complex(spec):
    """Assemble the orbifold Morse complex and verify its homology ranks."""
    spec = _spec(spec)
    func = build_invariant_morse(spec)
    crits = find_critical_points(func)

    by_kind = {}
    for crit in crits:
        by_kind.setdefault(crit.kind.name, []).append(crit)

    generators = {0: (), 1: (), 2: ()}
    excluded = []
    for entry in base_table(spec):
        sample = by_kind[entry.name][0]
        if sample.orientable:
            generators[entry.morse_index] = generators[entry.morse_index] + (entry.name,)
        else:
            excluded.append(entry.name)

    flow_counts = {}
    entries = {e.morse_index: e for e in base_table(spec)}
    if 1 in entries:
        for hi, lo in ((2, 1), (1, 0)):
            flow = count_flow_lines(func, entries[hi].name, entries[lo].name)
            flow_counts[(entries[hi].name, entries[lo].name)] = flow

    # the differential between surviving generators: index gaps are 2, so
    # every matrix is empty or zero; assemble shapes honestly and verify
    differential = {}
    for deg in (2, 1):
        rows = len(generators[deg - 1])
        cols = len(generators[deg])
        differential[deg] = np.zeros((rows, cols), dtype=int)

    boundary_sq = differential[1] @ differential[2]
    if boundary_sq.size and np.any(boundary_sq):
        raise HomologyMismatch(f"{spec.label}: the squared differential is nonzero")

    ranks = []
    for deg in (0, 1, 2):
        dim = len(generators[deg])
        rank_in = np.linalg.matrix_rank(differential[deg + 1]) if deg + 1 in differential and differential[deg + 1].size else 0
        rank_out = np.linalg.matrix_rank(differential[deg]) if deg in differential and differential[deg].size else 0
        ranks.append(dim - rank_in - rank_out)
    ranks = tuple(ranks)
    if ranks != (1, 0, 1):
        raise HomologyMismatch(f"{spec.label}: homology ranks {ranks}, expected (1, 0, 1)")

    return OrbifoldComplex(
        spec_label=spec.label,
        generators=generators,
        excluded=tuple(excluded),
        differential=differential,
        flow_counts=flow_counts,
        ranks=ranks,
    )


# ---------------------------------------------------------------------------
# the index correspondence


def seifert_index_check(spec):
    """Check Morse-index gaps against covering-orbit index gaps.

    For each ordered pair of distinct orbifold points (p, q), the Morse
    index difference downstairs must equal the Conley-Zehnder index
    difference of the covering closed orbits upstairs, each taken at its
    covering multiplicity.  Pure integer bookkeeping; raises
    IndexCorrespondenceFailure on any mismatch.
    """
    spec = _spec(spec)
    entries = base_table(spec)
    rows = []
    failures = []
    for p in entries:
        for q in entries:
            if p.name == q.name:
                continue
            mu_p = make_orbit(spec, p.name, covering_multiplicity(spec, p.name)).cz
            mu_q = make_orbit(spec, q.name, covering_multiplicity(spec, q.name)).cz
            morse_gap = p.morse_index - q.morse_index
            cz_gap = mu_p - mu_q
            row = {
                "pair": (p.name, q.name),
                "morse_gap": morse_gap,
                "cz_gap": cz_gap,
                "cz": (mu_p, mu_q),
                "ok": morse_gap == cz_gap,
            }
            rows.append(row)
            if not row["ok"]:
                failures.append(row)
    if failures:
        raise IndexCorrespondenceFailure(
            f"{spec.label}: {len(failures)} pair(s) violate the index correspondence, "
            f"first {failures[0]}")
    return {
        "check": "seifert_index",
        "spec": spec.label,
        "instances": len(rows),
        "failures": (),
        "max_residual": 0.0,
        "rows": tuple(rows),
    }
