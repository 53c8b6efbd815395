"""Numerical Conley-Zehnder machinery for paths of symplectic matrices.

This module computes the Conley-Zehnder index of nondegenerate symplectic
paths by three independent routes and cross-validates them:

* crossing forms -- locate the times where ``det(Phi(t) - Id) = 0`` and sum
  the signatures of the restricted quadratic form (``cz_crossing_form``);
* rotation numbers -- for 2x2 paths, unwrap a rotation angle and convert it
  through ``floor + ceil`` (``rotation_cz_sp2``);
* spectral flow -- count eigenvalue sign changes of the associated family
  of first-order self-adjoint operators in a Fourier truncation
  (``spectral_flow``).

It also provides the local-model paths of the linearized Reeb return map
near the critical points of a perturbing Morse function
(``local_model_path``), the Maslov winding of symplectic loops
(``maslov_loop``), Fredholm index bookkeeping for holomorphic buildings
(``building_index``), a randomized axiom checker for the index
(``cz_axiom_suite``), and a verifier for the sign relation between operator
crossings and return-map crossings (``verify_crossing_sign_lemma``).

Conventions: coordinates are ordered ``(q_1..q_n, p_1..p_n)``; the standard
complex structure is ``J0 = [[0, -I], [I, 0]]``; the symplectic form is
``omega0(x, y) = (J0 x) . y``, so that the crossing form of a path at
``t = 0`` is the generator ``S(0)`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import orbits as _orbits

__all__ = [
    "DriftExceeded",
    "DegenerateEndpoint",
    "IrregularCrossing",
    "UnwrapFailure",
    "EndpointDegenerate",
    "TrackingAmbiguity",
    "NoCrossingFound",
    "AxiomViolation",
    "SymmetricPath",
    "SymplecticPath",
    "CrossingRecord",
    "AsymptoticFamily",
    "standard_j",
    "omega0",
    "solve_path",
    "crossing_records",
    "cz_crossing_form",
    "rotation_cz_sp2",
    "maslov_loop",
    "local_model_path",
    "local_model_for",
    "path_product",
    "path_inverse",
    "path_direct_sum",
    "spectral_flow",
    "spectral_crossings",
    "verify_crossing_sign_lemma",
    "building_index",
    "cz_axiom_suite",
]

# Tolerances (all absolute unless stated otherwise).
TOL_SYMMETRY = 1e-12        # symmetry defect allowed in a generator sample
TOL_DRIFT = 1e-8            # symplecticity drift allowed along a solved path
TOL_ENDPOINT = 1e-8         # |det(Phi(1) - Id)| must exceed this
TOL_BISECTION = 1e-10       # width to which crossing times are refined
TOL_KERNEL_REL = 1e-7       # relative singular-value threshold for kernels
TOL_DEAD_ZONE = 1e-9        # crossing-form eigenvalues below this are irregular
TOL_ENDPOINT_GAP = 1e-6     # crossings may not sit this close to an endpoint
TOL_SPECTRAL_END = 1e-6     # smallest |eigenvalue| required at family ends
TOL_TRACKING = 1e-8         # eigenvalue gap below which tracking is ambiguous
MIN_SAMPLES = 512
DEFAULT_SAMPLES = 1024
DEFAULT_EPSILON = 1e-3
MAX_EPSILON = 1e-2


class DriftExceeded(ArithmeticError):
    """A path's symplecticity residual exceeded the allowed drift."""


class DegenerateEndpoint(ArithmeticError):
    """det(Phi(1) - Id) is numerically zero; the index is undefined."""


class IrregularCrossing(ArithmeticError):
    """A crossing form has an eigenvalue inside the numerical dead zone."""


class UnwrapFailure(ArithmeticError):
    """Angle unwrapping stepped too far or could not pick a branch."""


class EndpointDegenerate(ArithmeticError):
    """An operator family endpoint has an eigenvalue too close to zero."""


class TrackingAmbiguity(ArithmeticError):
    """Eigenvalue continuation could not disambiguate a crossing."""


class NoCrossingFound(ValueError):
    """A crossing was required but none could be located."""


class AxiomViolation(AssertionError):
    """A randomized index-axiom check failed."""


def standard_j(n):
    """The standard complex structure J0 on R^(2n), block [[0, -I], [I, 0]]."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def omega0(x, y):
    """Standard symplectic form omega0(x, y) = (J0 x) . y."""
    n = len(x) // 2
    jx = np.concatenate([-np.asarray(x)[n:], np.asarray(x)[:n]])
    return float(np.dot(jx, np.asarray(y)))


def _sym_defect(a):
    return float(np.max(np.abs(a - np.swapaxes(a, -1, -2))))


def _drift(values, j0):
    res = np.swapaxes(values, -1, -2) @ j0 @ values - j0
    return float(np.max(np.abs(res)))


class SymmetricPath:
    """A path of symmetric matrices S : [0,1] -> Sym(2n) on a uniform grid.

    Stores at least ``MIN_SAMPLES`` uniform samples (endpoints included) and
    optionally an exact evaluator; off-grid values come from the evaluator
    when present and from 4-point Lagrange interpolation otherwise.
    """

    __slots__ = ("values", "ts", "func", "dim")

    def __init__(self, values, func=None):
        values = np.asarray(values, dtype=float)
        if values.ndim != 3 or values.shape[1] != values.shape[2]:
            raise ValueError("generator samples must be an (m, d, d) array")
        if values.shape[0] < MIN_SAMPLES:
            raise ValueError(
                f"generator grid needs >= {MIN_SAMPLES} samples, got {values.shape[0]}"
            )
        if values.shape[1] % 2 != 0:
            raise ValueError("generator dimension must be even")
        defect = _sym_defect(values)
        if defect > TOL_SYMMETRY:
            raise ValueError(f"generator samples not symmetric: defect {defect:.3e}")
        self.values = values
        self.ts = np.linspace(0.0, 1.0, values.shape[0])
        self.func = func
        self.dim = values.shape[1]

    @classmethod
    def from_callable(cls, func, samples=DEFAULT_SAMPLES):
        samples = max(int(samples), MIN_SAMPLES)
        ts = np.linspace(0.0, 1.0, samples)
        values = np.stack([np.asarray(func(t), dtype=float) for t in ts])
        values = 0.5 * (values + np.swapaxes(values, -1, -2))
        return cls(values, func=func)

    @property
    def samples(self):
        return self.values.shape[0]

    def at(self, t):
        """Evaluate S(t); exact when an evaluator is attached."""
        if self.func is not None:
            s = np.asarray(self.func(t), dtype=float)
            return 0.5 * (s + s.T)
        m = self.samples
        x = float(t) * (m - 1)
        i0 = int(np.clip(math.floor(x) - 1, 0, m - 4))
        w = np.ones(4)
        xs = x - i0
        for a in range(4):
            for b in range(4):
                if a != b:
                    w[a] *= (xs - b) / (a - b)
        return np.tensordot(w, self.values[i0 : i0 + 4], axes=(0, 0))

    def max_norm(self):
        return float(np.max(np.sqrt(np.sum(self.values ** 2, axis=(1, 2)))))


class SymplecticPath:
    """A path Phi : [0,1] -> Sp(2n) with Phi(0) = Id and its generator.

    Invariants checked at construction: the initial value is the identity,
    and the symplecticity residual ``Phi^T J0 Phi - J0`` stays within
    ``TOL_DRIFT`` at every sample.  ``endpoint_nondegenerate`` records
    whether ``det(Phi(1) - Id)`` clears ``TOL_ENDPOINT``.
    """

    __slots__ = ("values", "ts", "generator", "func", "n", "drift", "endpoint_nondegenerate")

    def __init__(self, values, generator, func=None):
        values = np.asarray(values, dtype=float)
        if values.shape[0] != generator.samples or values.shape[1] != generator.dim:
            raise ValueError("path samples must match the generator grid")
        if np.max(np.abs(values[0] - np.eye(generator.dim))) > 1e-10:
            raise ValueError("path must start at the identity")
        self.n = generator.dim // 2
        j0 = standard_j(self.n)
        self.drift = _drift(values, j0)
        if self.drift > TOL_DRIFT:
            raise DriftExceeded(
                f"symplecticity drift {self.drift:.3e} exceeds {TOL_DRIFT:.1e}"
            )
        self.values = values
        self.ts = np.linspace(0.0, 1.0, values.shape[0])
        self.generator = generator
        self.func = func
        self.endpoint_nondegenerate = (
            abs(float(np.linalg.det(values[-1] - np.eye(2 * self.n)))) > TOL_ENDPOINT
        )

    @property
    def samples(self):
        return self.values.shape[0]

    def at(self, t):
        """Evaluate Phi(t); off-grid values come from the exact evaluator
        when present, else from one Runge-Kutta substep off the nearest
        lower grid node."""
        if self.func is not None:
            return np.asarray(self.func(t), dtype=float)
        m = self.samples
        x = float(t) * (m - 1)
        i0 = int(np.clip(math.floor(x), 0, m - 1))
        t0 = self.ts[i0]
        h = float(t) - t0
        if abs(h) < 1e-15:
            return self.values[i0]
        return _rk4_step(self.generator, self.values[i0], t0, h)

    def dot_at(self, t, value=None):
        """Phi'(t) = J0 S(t) Phi(t)."""
        phi = self.at(t) if value is None else value
        j0 = standard_j(self.n)
        return j0 @ self.generator.at(t) @ phi

    def endpoint(self):
        return self.values[-1]


@dataclass(frozen=True)
class CrossingRecord:
    """One solution of det(Phi(t) - Id) = 0 with its crossing-form data."""

    time: float
    kernel_dimension: int
    signature: int

    def __post_init__(self):
        if self.kernel_dimension < 1:
            raise ValueError("a crossing must have kernel dimension >= 1")
        if abs(self.signature) > 2 * self.kernel_dimension:
            raise ValueError("crossing signature exceeds twice the kernel dimension")
        if (self.signature - self.kernel_dimension) % 2 != 0:
            raise ValueError("crossing signature parity must match the kernel dimension")


class AsymptoticFamily:
    """A two-parameter generator S(s, t), s in [-1, 1], t in S^1.

    ``func(s, t)`` must return a symmetric 2n x 2n matrix, 1-periodic in t
    exactly on the sample grid.  ``fourier_order`` fixes the truncation used
    when the family is turned into self-adjoint operators
    ``A_s = -J0 d/dt - S(s, .)`` acting on loops."""

    __slots__ = ("func", "n", "fourier_order", "ds_func", "name")

    def __init__(self, func, n, fourier_order=32, ds_func=None, name=""):
        if fourier_order < 4:
            raise ValueError("fourier truncation order must be >= 4")
        self.func = func
        self.n = int(n)
        self.fourier_order = int(fourier_order)
        self.ds_func = ds_func
        self.name = name
        for s in (-1.0, 0.0, 1.0):
            for t in (0.0, 0.37, 0.74):
                m = np.asarray(func(s, t), dtype=float)
                if m.shape != (2 * self.n, 2 * self.n):
                    raise ValueError("family values must be 2n x 2n")
                if _sym_defect(m[None]) > TOL_SYMMETRY:
                    raise ValueError("family values must be symmetric")
            period = np.max(np.abs(np.asarray(func(s, 0.0)) - np.asarray(func(s, 1.0))))
            if period > TOL_SYMMETRY:
                raise ValueError(f"family not 1-periodic in t: defect {period:.3e}")

    def path_at(self, s, samples=DEFAULT_SAMPLES):
        """The generator path t -> S(s, t) as a SymmetricPath."""
        return SymmetricPath.from_callable(lambda t: self.func(s, t), samples=samples)


# ---------------------------------------------------------------------------
# ODE solving
# ---------------------------------------------------------------------------


def _rk4_step(gen, phi, t0, h):
    j0 = standard_j(gen.dim // 2)
    k1 = j0 @ gen.at(t0) @ phi
    s_mid = gen.at(t0 + 0.5 * h)
    k2 = j0 @ s_mid @ (phi + 0.5 * h * k1)
    k3 = j0 @ s_mid @ (phi + 0.5 * h * k2)
    k4 = j0 @ gen.at(t0 + h) @ (phi + h * k3)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def solve_path(generator):
    """Integrate Phi' = J0 S(t) Phi, Phi(0) = Id with one-step Runge-Kutta.

    No re-orthonormalization is applied: the symplecticity drift is kept as
    an accuracy witness and ``DriftExceeded`` is raised if it passes
    ``TOL_DRIFT``.
    """
    m = generator.samples
    d = generator.dim
    j0 = standard_j(d // 2)
    values = np.empty((m, d, d))
    values[0] = np.eye(d)
    ts = generator.ts
    h = ts[1] - ts[0]
    have_func = generator.func is not None
    for i in range(m - 1):
        phi = values[i]
        s0 = generator.values[i]
        s1 = generator.values[i + 1]
        if have_func:
            s_mid = generator.at(ts[i] + 0.5 * h)
        else:
            i0 = int(np.clip(i - 1, 0, m - 4))
            w = _midpoint_weights(i - i0)
            s_mid = np.tensordot(w, generator.values[i0 : i0 + 4], axes=(0, 0))
        k1 = j0 @ s0 @ phi
        k2 = j0 @ s_mid @ (phi + 0.5 * h * k1)
        k3 = j0 @ s_mid @ (phi + 0.5 * h * k2)
        k4 = j0 @ s1 @ (phi + h * k3)
        values[i + 1] = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return SymplecticPath(values, generator)


def _midpoint_weights(offset):
    """Lagrange weights for the midpoint of cell [offset, offset+1] on a
    4-node stencil 0..3; the interior case is (-1/16, 9/16, 9/16, -1/16)."""
    x = offset + 0.5
    w = np.ones(4)
    for a in range(4):
        for b in range(4):
            if a != b:
                w[a] *= (x - b) / (a - b)
    return w


# ---------------------------------------------------------------------------
# Crossing-form index
# ---------------------------------------------------------------------------


def _signature(sym, dead_zone=TOL_DEAD_ZONE, context=""):
    eigs = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    scale = max(1.0, float(np.max(np.abs(eigs))))
    if np.any(np.abs(eigs) < dead_zone * scale):
        raise IrregularCrossing(
            f"crossing form eigenvalue inside dead zone {dead_zone:.1e}{context}"
        )
    return int(np.sum(eigs > 0) - np.sum(eigs < 0))


def _det_minus_id(path, t):
    d = 2 * path.n
    return float(np.linalg.det(path.at(t) - np.eye(d)))


def _bisect_sign_change(path, a, b, fa, fb):
    while b - a > TOL_BISECTION:
        m = 0.5 * (a + b)
        fm = _det_minus_id(path, m)
        if fm == 0.0:
            return m
        if (fa < 0) != (fm < 0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _refine_touch(path, a, b):
    """Ternary-search the minimum of |det(Phi(t) - Id)| on [a, b]."""
    f = lambda t: abs(_det_minus_id(path, t))
    while b - a > TOL_BISECTION:
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) <= f(m2):
            b = m2
        else:
            a = m1
    return 0.5 * (a + b)


def _kernel_basis(path, t):
    d = 2 * path.n
    m = path.at(t) - np.eye(d)
    u, sig, vt = np.linalg.svd(m)
    scale = max(1.0, float(sig[0]))
    mask = sig < TOL_KERNEL_REL * scale
    return vt[mask].T  # columns span the kernel


def crossing_records(path):
    """Locate all interior crossings of ``det(Phi(t) - Id) = 0``.

    Sign changes of the determinant are bisected and even-order touches are
    found as refined local minima; each candidate is confirmed through the
    singular values of Phi(t*) - Id.  Crossings closer than
    ``TOL_ENDPOINT_GAP`` to either endpoint raise ``IrregularCrossing``.
    """
    if not path.endpoint_nondegenerate:
        raise DegenerateEndpoint(
            "det(Phi(1) - Id) is within tolerance of zero; the path is degenerate"
        )
    d = 2 * path.n
    g = np.linalg.det(path.values - np.eye(d))
    m = path.samples
    scale = max(1.0, float(np.max(np.abs(g))))
    j0 = standard_j(path.n)
    times = []
    # Sign changes (vectorized scan over interior cells).
    prod = g[1:-1] * g[2:]
    for i in np.nonzero(prod < 0.0)[0] + 1:
        times.append(_bisect_sign_change(path, path.ts[i], path.ts[i + 1], g[i], g[i + 1]))
    for i in np.nonzero(g[1:-1] == 0.0)[0] + 1:
        times.append(float(path.ts[i]))
    # Even-order touches: interior local minima of |g| that dip low enough.
    absg = np.abs(g)
    dips = (
        (absg[1:-1] < absg[:-2])
        & (absg[1:-1] <= absg[2:])
        & (absg[1:-1] < 1e-3 * scale)
        & ((g[:-2] < 0) == (g[2:] < 0))
    )
    for i in np.nonzero(dips)[0] + 1:
        t_star = _refine_touch(path, path.ts[i - 1], path.ts[i + 1])
        if abs(_det_minus_id(path, t_star)) < 1e-8 * scale:
            times.append(t_star)
    # Merge detections that refined to the same crossing.
    times.sort()
    merged = []
    for t in times:
        if not merged or t - merged[-1] > 10.0 * TOL_BISECTION:
            merged.append(t)
    records = []
    for t_star in merged:
        if t_star < TOL_ENDPOINT_GAP or t_star > 1.0 - TOL_ENDPOINT_GAP:
            raise IrregularCrossing(
                f"crossing at t = {t_star:.3e} sits within {TOL_ENDPOINT_GAP:.0e} of an endpoint"
            )
        kernel = _kernel_basis(path, t_star)
        if kernel.shape[1] == 0:
            continue  # a near-miss dip, not a crossing
        phi = path.at(t_star)
        phi_dot = j0 @ path.generator.at(t_star) @ phi
        # Crossing form Gamma(v) = omega0(v, Phi'(t*) v) restricted to the kernel.
        w = (j0 @ kernel).T @ (phi_dot @ kernel)
        sig = _signature(0.5 * (w + w.T), context=f" at t = {t_star:.6f}")
        records.append(CrossingRecord(float(t_star), int(kernel.shape[1]), sig))
    return records


def cz_crossing_form(path):
    """Conley-Zehnder index as 1/2 Sign(S(0)) plus the sum of interior
    crossing signatures."""
    records = crossing_records(path)
    s0 = path.generator.at(0.0)
    sign0 = _signature(s0, context=" at t = 0 (initial crossing form)")
    total = Fraction(sign0, 2) + sum(r.signature for r in records)
    if total.denominator != 1:
        raise IrregularCrossing("crossing-form total is not an integer")
    return int(total)


# ---------------------------------------------------------------------------
# Rotation numbers in Sp(2)
# ---------------------------------------------------------------------------


def _unwrapped_angle(values, what):
    ang = np.unwrap(np.arctan2(values.imag, values.real))
    steps = np.abs(np.diff(ang))
    if steps.size and float(np.max(steps)) > 0.5 * math.pi:
        raise UnwrapFailure(
            f"{what}: angle step {float(np.max(steps)):.3f} exceeds pi/2; refine the grid"
        )
    return ang


def rotation_cz_sp2(path):
    """Rotation number and index of a nondegenerate path in Sp(2).

    Elliptic endpoints: the angle of the conjugated-rotation invariant
    ``w(t) = tr Phi(t) + i (Phi21 - Phi12)`` is unwrapped along the path and
    the endpoint eigenvalue angle pins the rotation number to the nearest
    admissible branch.  Hyperbolic endpoints: the winding of a real
    eigenvector image ``Phi(t) v`` is integer or half-integer.  In both
    cases ``mu = floor(theta) + ceil(theta)``.
    """
    if path.n != 1:
        raise ValueError("rotation_cz_sp2 requires a path in Sp(2)")
    if not path.endpoint_nondegenerate:
        raise DegenerateEndpoint("endpoint has eigenvalue 1 within tolerance")
    end = path.endpoint()
    tr = float(end[0, 0] + end[1, 1])
    if abs(tr) < 2.0:
        w = (path.values[:, 0, 0] + path.values[:, 1, 1]) + 1j * (
            path.values[:, 1, 0] - path.values[:, 0, 1]
        )
        ang = _unwrapped_angle(w, "elliptic rotation form")
        delta = (ang[-1] - ang[0]) / (2.0 * math.pi)
        rho = math.acos(max(-1.0, min(1.0, tr / 2.0))) / (2.0 * math.pi)
        best = None
        for j in range(int(math.floor(delta)) - 2, int(math.ceil(delta)) + 3):
            for branch in (+1, -1):
                cand = j + branch * rho
                if best is None or abs(cand - delta) < abs(best[0] - delta):
                    best = (cand, j, branch)
        theta, j, branch = best
        if abs(theta - delta) > 0.45:
            raise UnwrapFailure(
                f"elliptic winding estimate {delta:.4f} is too far from"
                f" admissible branch {theta:.4f}"
            )
        mu = 2 * j + 1 if branch > 0 else 2 * j - 1
        return float(theta), int(mu)
    # Hyperbolic: wind the image of an eigenvector of the endpoint.
    eigvals, eigvecs = np.linalg.eig(end)
    idx = int(np.argmax(np.abs(eigvals)))
    v = np.real(eigvecs[:, idx])
    v /= np.linalg.norm(v)
    u = path.values @ v
    ang = _unwrapped_angle(u[:, 0] + 1j * u[:, 1], "hyperbolic eigenvector winding")
    two_theta = (ang[-1] - ang[0]) / math.pi
    mu = int(round(two_theta))
    if abs(two_theta - mu) > 1e-4:
        raise UnwrapFailure(
            f"hyperbolic winding {two_theta / 2.0:.6f} is not a half-integer"
        )
    return 0.5 * mu, mu


def maslov_loop(path):
    """Maslov index of a symplectic loop via the winding of the determinant
    of the unitary polar factor."""
    d = 2 * path.n
    if np.max(np.abs(path.endpoint() - path.values[0])) > 1e-8:
        raise ValueError("maslov_loop requires a loop: Phi(1) must equal Phi(0)")
    dets = np.empty(path.samples, dtype=complex)
    for i, phi in enumerate(path.values):
        u, _, vt = np.linalg.svd(phi)
        q = u @ vt  # orthogonal polar factor, in Sp(2n) hence of the form [[X,-Y],[Y,X]]
        x = q[: path.n, : path.n]
        y = q[path.n :, : path.n]
        if (
            np.max(np.abs(q[: path.n, path.n :] + y)) > 1e-8
            or np.max(np.abs(q[path.n :, path.n :] - x)) > 1e-8
        ):
            raise ValueError("polar factor is not unitary-block structured")
        dets[i] = np.linalg.det(x + 1j * y)
    ang = _unwrapped_angle(dets, "polar determinant winding")
    winding = (ang[-1] - ang[0]) / (2.0 * math.pi)
    k = int(round(winding))
    if abs(winding - k) > 1e-6:
        raise UnwrapFailure(f"loop winding {winding:.8f} is not an integer")
    return k


# ---------------------------------------------------------------------------
# Local models of the linearized return map
# ---------------------------------------------------------------------------


def _rot2(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _expm2_traceless(m):
    """exp(M) for a traceless 2x2 matrix in closed form."""
    delta = float(np.linalg.det(m))
    if delta > 1e-300:
        r = math.sqrt(delta)
        return math.cos(r) * np.eye(2) + (math.sin(r) / r) * m
    if delta < -1e-300:
        r = math.sqrt(-delta)
        return math.cosh(r) * np.eye(2) + (math.sinh(r) / r) * m
    return np.eye(2) + m


def local_model_path(f_value, hessian, eps=DEFAULT_EPSILON, k=1, samples=None):
    """Linearized return-map path near a critical point of the perturbing
    function: ``Phi(tau) = R(a tau) exp(-b tau J0 H)`` on tau in [0, 1] with
    ``a = 4 pi k``, ``b = 2 pi k eps / f_eps`` and ``f_eps = 1 + eps f``.

    ``k`` counts turns around the fiber; integer values model contractible
    lifts and rational values extend the same model over one period of a
    non-contractible orbit.  For integer k the crossing-form index is
    ``4k + index(H) - 1``.
    """
    if not 0.0 < eps <= MAX_EPSILON:
        raise ValueError(f"eps must lie in (0, {MAX_EPSILON}], got {eps}")
    k = Fraction(k)
    if k <= 0:
        raise ValueError("fiber turning number k must be positive")
    h = np.asarray(hessian, dtype=float)
    if h.shape != (2, 2) or abs(h[0, 1] - h[1, 0]) > TOL_SYMMETRY:
        raise ValueError("hessian must be a symmetric 2x2 matrix")
    if abs(np.linalg.det(h)) < 1e-12:
        raise ValueError("hessian must be nondegenerate")
    f_eps = 1.0 + eps * float(f_value)
    if f_eps <= 0.0:
        raise ValueError("perturbed value 1 + eps*f must be positive")
    kf = float(k)
    a = 4.0 * math.pi * kf
    b = 2.0 * math.pi * kf * eps / f_eps
    j0 = standard_j(1)
    m0 = -b * (j0 @ h)  # traceless; exp(tau * m0) in closed form

    def phi(tau):
        return _rot2(a * tau) @ _expm2_traceless(tau * m0)

    def gen(tau):
        r = _rot2(a * tau)
        return a * np.eye(2) - b * (r @ h @ r.T)

    if samples is None:
        if float(np.linalg.det(h)) < 0.0:
            # A saddle Hessian produces near-resonant crossing *pairs* whose
            # separation scales like eps/k; the grid must resolve them.
            samples = max(DEFAULT_SAMPLES, int(12.0 * kf / eps) + 1)
        else:
            samples = max(DEFAULT_SAMPLES, 64 * (int(a) + 1))
    ts = np.linspace(0.0, 1.0, max(int(samples), MIN_SAMPLES))
    # Vectorized sampling of both the generator and the path.
    ca, sa = np.cos(a * ts), np.sin(a * ts)
    rots = np.empty((ts.size, 2, 2))
    rots[:, 0, 0] = ca
    rots[:, 0, 1] = -sa
    rots[:, 1, 0] = sa
    rots[:, 1, 1] = ca
    svals = a * np.eye(2) - b * np.einsum("tij,jk,tlk->til", rots, h, rots)
    delta = float(np.linalg.det(m0))
    if delta > 0.0:
        r = np.sqrt(delta) * ts
        coef = np.where(r > 1e-12, np.sin(np.maximum(r, 1e-300)) / np.maximum(r, 1e-300), 1.0)
        evals_exp = np.cos(r)[:, None, None] * np.eye(2) + (coef * ts)[:, None, None] * m0
    elif delta < 0.0:
        r = np.sqrt(-delta) * ts
        coef = np.where(r > 1e-12, np.sinh(np.maximum(r, 1e-300)) / np.maximum(r, 1e-300), 1.0)
        evals_exp = np.cosh(r)[:, None, None] * np.eye(2) + (coef * ts)[:, None, None] * m0
    else:
        evals_exp = np.broadcast_to(np.eye(2), (ts.size, 2, 2)) + ts[:, None, None] * m0
    values = rots @ evals_exp
    s_path = SymmetricPath(0.5 * (svals + np.swapaxes(svals, 1, 2)), func=gen)
    return SymplecticPath(values, s_path, func=phi)


def local_model_for(orbit, eps=DEFAULT_EPSILON):
    """Local-model path of a Reeb orbit's linearized return map.

    The critical value and Hessian are read off the orbit's base type
    (minimum, saddle, maximum) and the turning number is the orbit
    multiplicity divided by the covering multiplicity of its base.
    """
    cov = _orbits.covering_multiplicity(orbit.group, orbit.base)
    b_part = orbit.rotation.b
    if b_part < 0:
        f_value, hess = -1.0, np.diag([1.0, 1.0])
    elif b_part == 0:
        f_value, hess = 0.0, np.diag([1.0, -1.0])
    else:
        f_value, hess = 1.0, np.diag([-1.0, -1.0])
    return local_model_path(f_value, hess, eps=eps, k=Fraction(orbit.k, cov))


# ---------------------------------------------------------------------------
# Path algebra (products, inverses, direct sums)
# ---------------------------------------------------------------------------


def _symplectic_inverse(m, j0):
    return -j0 @ m.T @ j0


def path_product(p, q, samples=None):
    """Pointwise product path t -> P(t) Q(t).

    The generator is ``S_P + J0 P J0 S_Q J0 P^T J0``, which is exactly
    symmetric for symplectic P.
    """
    if p.n != q.n:
        raise ValueError("paths must share a dimension")
    j0 = standard_j(p.n)

    def gen(t):
        pt = p.at(t)
        return p.generator.at(t) + j0 @ pt @ j0 @ q.generator.at(t) @ j0 @ pt.T @ j0

    def func(t):
        return p.at(t) @ q.at(t)

    if samples is None:
        samples = max(p.samples, q.samples)
    s_path = SymmetricPath.from_callable(gen, samples=samples)
    values = np.stack([func(t) for t in s_path.ts])
    return SymplecticPath(values, s_path, func=func)


def path_inverse(p):
    """Pointwise inverse path t -> P(t)^{-1}, generator -P^T S P."""
    j0 = standard_j(p.n)

    def gen(t):
        pt = p.at(t)
        return -(pt.T @ p.generator.at(t) @ pt)

    def func(t):
        return _symplectic_inverse(p.at(t), j0)

    s_path = SymmetricPath.from_callable(gen, samples=p.samples)
    values = np.stack([func(t) for t in s_path.ts])
    return SymplecticPath(values, s_path, func=func)


def _interleave_indices(n1, n2):
    """Index map embedding R^(2n1) x R^(2n2) into R^(2(n1+n2)) with the
    (q..., p...) coordinate convention."""
    n = n1 + n2
    first = list(range(n1)) + list(range(n, n + n1))
    second = list(range(n1, n)) + list(range(n + n1, 2 * n))
    return first, second


def path_direct_sum(p, q):
    """Direct-sum path in Sp(2(n1+n2)) with block coordinates interleaved
    into the (q..., p...) convention."""
    n = p.n + q.n
    i1, i2 = _interleave_indices(p.n, q.n)

    def embed(a, b):
        m = np.zeros((2 * n, 2 * n))
        m[np.ix_(i1, i1)] = a
        m[np.ix_(i2, i2)] = b
        return m

    def gen(t):
        return embed(p.generator.at(t), q.generator.at(t))

    def func(t):
        return embed(p.at(t), q.at(t))

    samples = max(p.samples, q.samples)
    s_path = SymmetricPath.from_callable(gen, samples=samples)
    values = np.stack([func(t) for t in s_path.ts])
    return SymplecticPath(values, s_path, func=func)


# ---------------------------------------------------------------------------
# Spectral flow
# ---------------------------------------------------------------------------


def _operator_matrix(family, s, order=None):
    """Galerkin truncation of A_s = -J0 d/dt - S(s, .) on loops.

    Real Fourier basis per coordinate: 1, sqrt2 cos(2 pi m t),
    sqrt2 sin(2 pi m t) for m = 1..K; the result is a symmetric matrix of
    size 2n(2K+1)."""
    k = family.fourier_order if order is None else order
    d = 2 * family.n
    m_quad = max(256, 8 * k)
    ts = np.arange(m_quad) / m_quad
    svals = np.stack([np.asarray(family.func(s, t), dtype=float) for t in ts])
    basis = np.empty((2 * k + 1, m_quad))
    basis[0] = 1.0
    for m in range(1, k + 1):
        basis[2 * m - 1] = math.sqrt(2.0) * np.cos(2.0 * math.pi * m * ts)
        basis[2 * m] = math.sqrt(2.0) * np.sin(2.0 * math.pi * m * ts)
    gram = np.einsum("aj,bj,juv->aubv", basis, basis, svals) / m_quad
    dim = d * (2 * k + 1)
    a = -gram.reshape(dim, dim)
    j0 = standard_j(family.n)
    for m in range(1, k + 1):
        c = (2 * m - 1) * d
        sblk = (2 * m) * d
        a[sblk : sblk + d, c : c + d] += 2.0 * math.pi * m * j0
        a[c : c + d, sblk : sblk + d] += -2.0 * math.pi * m * j0
    return 0.5 * (a + a.T)


def _neg_count(eigs):
    return int(np.sum(eigs < 0.0))


def _min_abs(eigs):
    return float(np.min(np.abs(eigs)))


def _locate_crossings(family, order):
    """March s over [-1, 1] and localize the eigenvalue crossings.

    Steps whose negative-eigenvalue counts differ are bisected until the
    crossing is pinned to width 1e-10 (simultaneous multiple crossings are
    recorded with their net direction and kernel size).  Steps with equal
    counts are swept for interior dips of the smallest |eigenvalue|; a dip
    that reveals a sign change is refined like a crossing, while a dip that
    bottoms out below ``TOL_TRACKING`` without one is an unresolvable touch
    and raises ``TrackingAmbiguity``.  An even number of crossings hiding in
    one grid cell without an interior dip at its midpoint is outside this
    heuristic; the families used in practice have well-separated crossings.
    """
    evals = {}

    def eigs(s):
        if s not in evals:
            evals[s] = np.linalg.eigvalsh(_operator_matrix(family, s, order))
        return evals[s]

    for s_end in (-1.0, 1.0):
        if _min_abs(eigs(s_end)) <= TOL_SPECTRAL_END:
            raise EndpointDegenerate(
                f"family endpoint s = {s_end:+.0f} has an eigenvalue within"
                f" {TOL_SPECTRAL_END:.0e} of zero"
            )
    crossings = []

    def record(a, b):
        mid = 0.5 * (a + b)
        na, nb = _neg_count(eigs(a)), _neg_count(eigs(b))
        kernel_dim = int(np.sum(np.abs(eigs(mid)) < 1e-5))
        crossings.append(
            {
                "s": mid,
                "direction": nb - na,
                "kernel_dimension": max(kernel_dim, abs(nb - na)),
            }
        )

    def refine(a, b, depth):
        na, nb = _neg_count(eigs(a)), _neg_count(eigs(b))
        if na == nb:
            return
        if b - a <= 1e-10 or depth >= 60:
            record(a, b)
            return
        m = 0.5 * (a + b)
        refine(a, m, depth + 1)
        refine(m, b, depth + 1)

    def sweep(a, b, depth):
        """Look for even crossings inside a step with equal end counts."""
        na, nb = _neg_count(eigs(a)), _neg_count(eigs(b))
        m = 0.5 * (a + b)
        if _neg_count(eigs(m)) != na:
            refine(a, m, depth + 1)
            refine(m, b, depth + 1)
            sweep(a, m, depth + 1)
            sweep(m, b, depth + 1)
            return
        dip = _min_abs(eigs(m))
        if dip >= 1e-7 or dip >= min(_min_abs(eigs(a)), _min_abs(eigs(b))):
            return
        if dip < TOL_TRACKING or depth >= 40:
            raise TrackingAmbiguity(
                f"eigenvalue touches zero near s = {m:.6f} without a resolvable"
                " sign change; refine the s-grid"
            )
        sweep(a, m, depth + 1)
        sweep(m, b, depth + 1)

    base = np.linspace(-1.0, 1.0, 17)
    for i in range(len(base) - 1):
        a, b = float(base[i]), float(base[i + 1])
        if _neg_count(eigs(a)) != _neg_count(eigs(b)):
            refine(a, b, 0)
        else:
            sweep(a, b, 0)
    crossings.sort(key=lambda c: c["s"])
    # Merge records that refined to numerically identical parameter values
    # (simultaneous crossings of a degenerate eigenvalue pair).
    merged = []
    for c in crossings:
        if merged and c["s"] - merged[-1]["s"] < 1e-8:
            prev = merged[-1]
            prev["direction"] += c["direction"]
            prev["kernel_dimension"] = max(
                prev["kernel_dimension"], c["kernel_dimension"], abs(prev["direction"])
            )
        else:
            merged.append(dict(c))
    flow = _neg_count(eigs(1.0)) - _neg_count(eigs(-1.0))
    return merged, flow


def spectral_crossings(family, order=None):
    """Refined list of operator-family crossings: s*, net direction, kernel size."""
    order = family.fourier_order if order is None else order
    crossings, _ = _locate_crossings(family, order)
    return crossings


def spectral_flow(family, order=None):
    """Net signed count of operator eigenvalues crossing zero from s = -1 to
    s = +1 in the Fourier truncation; equals the difference of negative
    counts at the endpoints, and matches the Conley-Zehnder index difference
    of the endpoint return maps."""
    order = family.fourier_order if order is None else order
    crossings, flow = _locate_crossings(family, order)
    if sum(c["direction"] for c in crossings) != flow:
        raise TrackingAmbiguity("crossing directions do not telescope to the flow")
    return flow


# ---------------------------------------------------------------------------
# Crossing sign relation (operator family vs return-map family)
# ---------------------------------------------------------------------------


def _eval_loop_at_zero(coeffs, n, order):
    """Evaluate the loop with the given Fourier coefficients at t = 0."""
    d = 2 * n
    v = coeffs[:d].copy()
    for m in range(1, order + 1):
        v += math.sqrt(2.0) * coeffs[(2 * m - 1) * d : (2 * m - 1) * d + d]
    return v


def verify_crossing_sign_lemma(family, solver_samples=DEFAULT_SAMPLES):
    """At each crossing of the operator family, compare the operator
    crossing form with the return-map crossing form.

    For a kernel element eta of the truncated ``A_{s*}`` the operator form
    is ``Gamma_A = eta^T (dA/ds) eta``; for ``v = eta(0)`` the return-map
    form is ``Gamma_Psi = omega0(v, d/ds Psi_s(1) v)`` where ``Psi_s`` solves
    the path equation for ``S(s, .)``.  The two must have opposite signs and
    agree in magnitude within relative 1e-4.

    A family with no crossings returns an empty report when its endpoint
    negative counts agree (nothing to check); ``NoCrossingFound`` is raised
    only when a crossing must exist but could not be localized.
    """
    order = family.fourier_order
    crossings, flow = _locate_crossings(family, order)
    if not crossings:
        if flow != 0:
            raise NoCrossingFound(
                "nonzero spectral flow but no crossing could be localized"
            )
        return {
            "check": "crossing_sign_lemma",
            "instances": 0,
            "failures": [],
            "max_residual": 0.0,
        }
    j0 = standard_j(family.n)
    h_op = 1e-5
    h_path = 1e-4
    failures = []
    instances = 0
    max_residual = 0.0
    for crossing in crossings:
        s_star = crossing["s"]
        a_star = _operator_matrix(family, s_star, order)
        eigvals, eigvecs = np.linalg.eigh(a_star)
        kernel_idx = np.where(np.abs(eigvals) < 1e-5)[0]
        if kernel_idx.size == 0:
            kernel_idx = np.array([int(np.argmin(np.abs(eigvals)))])
        da = (
            _operator_matrix(family, s_star + h_op, order)
            - _operator_matrix(family, s_star - h_op, order)
        ) / (2.0 * h_op)
        psi_plus = solve_path(family.path_at(s_star + h_path, samples=solver_samples))
        psi_minus = solve_path(family.path_at(s_star - h_path, samples=solver_samples))
        psi_star = solve_path(family.path_at(s_star, samples=solver_samples))
        dpsi = (psi_plus.endpoint() - psi_minus.endpoint()) / (2.0 * h_path)
        for idx in kernel_idx:
            eta = eigvecs[:, idx]
            gamma_a = float(eta @ da @ eta)
            v = _eval_loop_at_zero(eta, family.n, order)
            kernel_residual = float(
                np.linalg.norm((psi_star.endpoint() - np.eye(2 * family.n)) @ v)
            )
            gamma_psi = float((j0 @ v) @ (dpsi @ v))
            rel = abs(gamma_a + gamma_psi) / max(abs(gamma_a), abs(gamma_psi))
            max_residual = max(max_residual, rel)
            instances += 1
            if gamma_a * gamma_psi >= 0.0 or rel >= 1e-4:
                failures.append(
                    {
                        "s": s_star,
                        "gamma_operator": gamma_a,
                        "gamma_return_map": gamma_psi,
                        "relative_difference": rel,
                        "kernel_residual": kernel_residual,
                    }
                )
    return {
        "check": "crossing_sign_lemma",
        "instances": instances,
        "failures": failures,
        "max_residual": max_residual,
    }


# ---------------------------------------------------------------------------
# Index bookkeeping for holomorphic buildings
# ---------------------------------------------------------------------------


def building_index(top, bottoms):
    """Fredholm index of a genus-zero level with one positive end of index
    ``top`` and negative ends of indices ``bottoms``:
    ``(#bottoms - 1) + top - sum(bottoms)``."""
    bottoms = list(bottoms)
    if not bottoms:
        raise ValueError("a building level needs at least one negative end")
    return len(bottoms) - 1 + int(top) - sum(int(b) for b in bottoms)


# ---------------------------------------------------------------------------
# Randomized axiom suite
# ---------------------------------------------------------------------------


def _random_generator(rng, n, scale=1.0):
    """Random low-mode Fourier generator path with norm about `scale`."""
    d = 2 * n

    def sym(amp):
        m = rng.normal(0.0, amp, size=(d, d))
        return 0.5 * (m + m.T)

    a0 = sym(scale)
    coeffs = [(sym(scale / (m + 1)), sym(scale / (m + 1))) for m in (1, 2)]

    def func(t):
        s = a0.copy()
        for m, (c, dcoef) in enumerate(coeffs, start=1):
            s = s + c * math.cos(2.0 * math.pi * m * t) + dcoef * math.sin(2.0 * math.pi * m * t)
        return s

    return SymmetricPath.from_callable(func, samples=DEFAULT_SAMPLES)


def _random_nondegenerate_path(rng, n, scale=1.0, tries=40):
    for _ in range(tries):
        gen = _random_generator(rng, n, scale=scale)
        path = solve_path(gen)
        if not path.endpoint_nondegenerate:
            continue
        s0_eigs = np.linalg.eigvalsh(gen.at(0.0))
        if np.min(np.abs(s0_eigs)) < 1e-6:
            continue
        try:
            cz_crossing_form(path)
        except IrregularCrossing:
            continue
        return path
    raise RuntimeError("could not draw a nondegenerate random path")


def _rotation_loop(k, n=1):
    """Loop exp(2 pi k t J0) acting in the first Sp(2) block."""
    def func(t):
        m = np.eye(2 * n)
        r = _rot2(2.0 * math.pi * k * t)
        m[np.ix_([0, n], [0, n])] = r
        return m

    def gen(t):
        s = np.zeros((2 * n, 2 * n))
        s[np.ix_([0, n], [0, n])] = 2.0 * math.pi * k * np.eye(2)
        return s

    s_path = SymmetricPath.from_callable(gen, samples=DEFAULT_SAMPLES)
    values = np.stack([func(t) for t in s_path.ts])
    return SymplecticPath(values, s_path, func=func)


def _check(report, name, detail, ok, failures):
    report["instances"] += 1
    if not ok:
        failures.append({"axiom": name, **detail})


def cz_axiom_suite(seed, instances=50):
    """Randomized verification of the index axioms on nondegenerate paths.

    Checks per drawn path: determinant parity, agreement of the rotation
    route (Sp(2) only), inverse antisymmetry, homotopy invariance under an
    endpoint-fixing perturbation, naturality under conjugation by a path,
    and loop composition; plus product additivity on path pairs, the zero
    axiom on hyperbolic-spectrum paths, and the signature axiom on constant
    generators.  Raises ``AxiomViolation`` if any check fails.
    """
    rng = np.random.default_rng(seed)
    report = {"check": "cz_axioms", "instances": 0, "failures": [], "max_residual": 0.0}
    failures = report["failures"]
    sp2_pool = []
    n_paths = max(10, int(instances))
    for i in range(n_paths):
        n = 1 if i % 3 != 2 else 2
        scale = 1.0 + 1.5 * rng.random()
        path = _random_nondegenerate_path(rng, n, scale=scale)
        report["max_residual"] = max(report["max_residual"], path.drift)
        mu = cz_crossing_form(path)
        end = path.endpoint()
        det_end = float(np.linalg.det(end - np.eye(2 * n)))
        _check(
            report,
            "determinant",
            {"instance": i, "mu": mu, "det": det_end},
            ((-1.0) ** (n - mu)) * det_end > 0.0,
            failures,
        )
        if n == 1:
            sp2_pool.append((i, path, mu))
            theta, mu_rot = rotation_cz_sp2(path)
            _check(
                report,
                "rotation_agreement",
                {"instance": i, "mu": mu, "mu_rotation": mu_rot, "theta": theta},
                mu_rot == mu,
                failures,
            )
        inv = path_inverse(path)
        _check(
            report,
            "inverse",
            {"instance": i, "mu": mu, "mu_inverse": cz_crossing_form(inv)},
            cz_crossing_form(inv) == -mu,
            failures,
        )
        # Homotopy invariance: endpoint-fixing perturbation Phi * exp(lambda sin(pi t) J0 Stilde).
        for attempt in range(8):
            lam = 0.35 * (1.0 + rng.random())
            stilde = rng.normal(0.0, 1.0, size=(2 * n, 2 * n))
            stilde = 0.5 * (stilde + stilde.T)
            j0 = standard_j(n)
            m0 = j0 @ stilde

            def bfunc(t, lam=lam, m0=m0):
                return _expm(lam * math.sin(math.pi * t) * m0)

            def bgen(t, lam=lam, stilde=stilde):
                return lam * math.pi * math.cos(math.pi * t) * stilde

            b_sym = SymmetricPath.from_callable(bgen, samples=path.samples)
            b_vals = np.stack([bfunc(t) for t in b_sym.ts])
            b_path = SymplecticPath(b_vals, b_sym, func=bfunc)
            try:
                mu_pert = cz_crossing_form(path_product(path, b_path))
                break
            except IrregularCrossing:
                continue
        else:
            raise RuntimeError("homotopy perturbation kept hitting irregular crossings")
        _check(
            report,
            "homotopy",
            {"instance": i, "mu": mu, "mu_perturbed": mu_pert, "lambda": lam},
            mu_pert == mu,
            failures,
        )
        # Naturality: conjugation by a path N(t).
        n_gen = _random_generator(rng, n, scale=0.7)
        n_path = solve_path(n_gen)
        conj = path_product(path_product(n_path, path), path_inverse(n_path))
        _check(
            report,
            "naturality",
            {"instance": i, "mu": mu, "mu_conjugated": cz_crossing_form(conj)},
            cz_crossing_form(conj) == mu,
            failures,
        )
        # Loop composition: mu(L Phi) = 2 maslov(L) + mu(Phi).
        k = int(rng.integers(-2, 3))
        if k != 0:
            loop = _rotation_loop(k, n=n)
            wind = maslov_loop(loop)
            mu_loop = cz_crossing_form(path_product(loop, path))
            _check(
                report,
                "loop",
                {"instance": i, "mu": mu, "k": k, "winding": wind, "mu_composed": mu_loop},
                wind == k and mu_loop == 2 * k + mu,
                failures,
            )
    # Product axiom on Sp(2) pairs.
    for (i1, p1, m1), (i2, p2, m2) in zip(sp2_pool[0::2], sp2_pool[1::2]):
        total = cz_crossing_form(path_direct_sum(p1, p2))
        _check(
            report,
            "product",
            {"instances_paired": (i1, i2), "mu_sum": m1 + m2, "mu_product": total},
            total == m1 + m2,
            failures,
        )
    # Zero axiom: hyperbolic-spectrum paths have index zero.
    for i in range(12):
        n = 1 if i % 2 == 0 else 2
        while True:
            s = rng.normal(0.0, 1.0, size=(2 * n, 2 * n))
            s = 0.5 * (s + s.T)
            j0 = standard_j(n)
            eigs = np.linalg.eigvals(j0 @ s)
            if np.max(np.abs(eigs.imag)) < 1e-12 and np.min(np.abs(eigs.real)) > 0.05:
                break
        s_const = SymmetricPath.from_callable(lambda t, s=s: s, samples=DEFAULT_SAMPLES)
        path = solve_path(s_const)
        _check(
            report,
            "zero",
            {"instance": i, "mu": cz_crossing_form(path)},
            cz_crossing_form(path) == 0,
            failures,
        )
    # Signature axiom: constant generator with norm below 2 pi.
    for i in range(12):
        while True:
            s = rng.normal(0.0, 1.5, size=(2, 2))
            s = 0.5 * (s + s.T)
            eigs = np.linalg.eigvalsh(s)
            if np.max(np.abs(eigs)) < 0.95 * 2.0 * math.pi and np.min(np.abs(eigs)) > 0.05:
                break
        s_const = SymmetricPath.from_callable(lambda t, s=s: s, samples=DEFAULT_SAMPLES)
        path = solve_path(s_const)
        expected = int(np.sum(eigs > 0) - np.sum(eigs < 0)) // 2
        _check(
            report,
            "signature",
            {"instance": i, "expected": expected, "mu": cz_crossing_form(path)},
            cz_crossing_form(path) == expected,
            failures,
        )
    if failures:
        raise AxiomViolation(
            f"{len(failures)} axiom check(s) failed out of {report['instances']}: "
            f"{failures[:3]}"
        )
    return report


def _expm(m):
    """Dense matrix exponential by scaling-and-squaring with a Taylor core."""
    norm = float(np.max(np.abs(m)))
    j = max(0, int(math.ceil(math.log2(max(norm, 1e-30) / 0.25))))
    a = m / (2.0 ** j)
    term = np.eye(m.shape[0])
    out = np.eye(m.shape[0])
    for i in range(1, 19):
        term = term @ a / i
        out = out + term
    for _ in range(j):
        out = out @ out
    return out
