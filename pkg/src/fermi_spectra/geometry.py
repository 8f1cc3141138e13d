"""Symmetric planar curves in arc-length form and the strips built over them.

A curve is stored as uniform arc-length samples of position, tangent, and
signed curvature on [0, L], mirror symmetric about the vertical axis: the
midpoint sits at the origin with horizontal tangent, x is odd and y even
about s = L/2, so curvature is even.  A strip (domain) attaches a width
profile delta(s) > 0 along the clockwise normal (y', -x'); the area factor
of that map is 1 + r k(s), which must stay positive for the strip to be
embedded.  All sampled quantities interpolate linearly between nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .errors import (
    AsymmetricCurvature,
    AsymmetricWeight,
    InvalidDomain,
    NonpositiveWeight,
    OutOfDomain,
    SymmetryViolation,
    ZeroSpeed,
)

DEFAULT_VALIDATION_GRID = (1024, 128)


@dataclass
class CurveSpec:
    """Arc-length samples of a symmetric planar curve."""

    L: float
    k_samples: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    symmetry_tol: float = 1e-6

    @property
    def n(self):
        return len(self.k_samples)

    @property
    def s_samples(self):
        return np.linspace(0.0, self.L, self.n)


@dataclass
class WidthProfile:
    """Positive even width samples and their arc-length derivative."""

    delta_samples: np.ndarray
    ddelta_samples: np.ndarray
    evenness_tol: float = 1e-8


@dataclass
class ValidationReport:
    jacobian_min: float
    collision_count: int
    point_symmetry_residual: float
    curvature_evenness_residual: float
    width_evenness_residual: float
    injectivity_checked: bool
    grid: tuple
    valid: bool


@dataclass
class FermiDomain:
    """A validated strip: curve, width, and the outcome of validation."""

    curve: CurveSpec
    width: WidthProfile
    jacobian_min: float
    offset_curve: np.ndarray
    valid: bool
    injectivity_checked: bool
    validation: ValidationReport = None

    @property
    def L(self):
        return self.curve.L

    @property
    def s_samples(self):
        return self.curve.s_samples

    def k_at(self, s):
        return np.interp(s, self.s_samples, self.curve.k_samples)

    def delta_at(self, s):
        return np.interp(s, self.s_samples, self.width.delta_samples)

    def ddelta_at(self, s):
        return np.interp(s, self.s_samples, self.width.ddelta_samples)

    def require_valid(self):
        if not self.valid:
            raise InvalidDomain(
                f"domain failed validation (jacobian_min={self.jacobian_min:.6g}, "
                f"collisions={self.validation.collision_count if self.validation else 'unknown'})"
            )


def _vectorized(f):
    """Make a scalar or vector callable accept numpy arrays."""

    def g(t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(f(t), dtype=float)
            if out.shape == t.shape:
                return out
        except (TypeError, ValueError):
            pass
        flat = np.atleast_1d(t).ravel()
        out = np.array([float(f(float(ti))) for ti in flat])
        return out.reshape(t.shape)

    return g


def _fd_derivatives(f, h):
    """Fourth-order central difference first and second derivatives of f."""

    def d1(t):
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def d2(t):
        return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (
            12 * h * h
        )

    return d1, d2


def check_curve(spec):
    """Raise if the sampled curve violates its symmetry or unit-speed contract."""
    k = np.asarray(spec.k_samples, dtype=float)
    pts = np.asarray(spec.points, dtype=float)
    tan = np.asarray(spec.tangents, dtype=float)
    tol = spec.symmetry_tol

    speed_err = np.max(np.abs(np.hypot(tan[:, 0], tan[:, 1]) - 1.0))
    if speed_err > 1e-8:
        raise SymmetryViolation(f"tangent samples deviate from unit length by {speed_err:.3g}")

    k_res = np.max(np.abs(k - k[::-1])) if len(k) else 0.0
    if k_res > tol * (1.0 + np.max(np.abs(k))):
        raise AsymmetricCurvature(f"curvature samples are not even about L/2 (residual {k_res:.3g})")

    scale = 1.0 + np.max(np.abs(pts))
    x_res = np.max(np.abs(pts[:, 0] + pts[::-1, 0]))
    y_res = np.max(np.abs(pts[:, 1] - pts[::-1, 1]))
    if max(x_res, y_res) > tol * scale:
        raise SymmetryViolation(
            f"curve samples are not mirror symmetric (x residual {x_res:.3g}, y residual {y_res:.3g})"
        )


def curvature_from_parametric(x, y, t_range, n_samples=1024, derivatives=None, symmetry_tol=1e-6):
    """Resample a twice differentiable parametric curve by arc length.

    x, y map the parameter to coordinates.  derivatives, when given, is a
    tuple (dx, dy, ddx, ddy) of exact derivative callables; otherwise
    derivatives come from fourth-order central differences.  Returns a
    CurveSpec with n_samples uniform arc-length nodes.  Raises ZeroSpeed
    when the parametrization stalls, SymmetryViolation when the traced
    curve is not mirror symmetric about the vertical axis.
    """
    t0, t1 = float(t_range[0]), float(t_range[1])
    if not t1 > t0:
        raise ValueError("t_range must be increasing")
    fx, fy = _vectorized(x), _vectorized(y)
    if derivatives is not None:
        dx, dy, ddx, ddy = (_vectorized(f) for f in derivatives)
    else:
        h = 2e-4 * (t1 - t0)
        dx, ddx = _fd_derivatives(fx, h)
        dy, ddy = _fd_derivatives(fy, h)

    def speed(t):
        return np.hypot(dx(t), dy(t))

    dense_n = max(4096, 4 * n_samples)
    t_dense = np.linspace(t0, t1, dense_n + 1)
    sp_dense = speed(t_dense)
    if np.min(sp_dense) < 1e-9 * np.max(sp_dense):
        raise ZeroSpeed(f"speed vanishes near t={t_dense[np.argmin(sp_dense)]:.6g}")

    L = quad(lambda t: float(speed(t)), t0, t1, limit=200, epsabs=1e-13, epsrel=1e-13)[0]

    # Cumulative arc length by per-interval Gauss panels, then spline inversion.
    gx, gw = np.polynomial.legendre.leggauss(5)
    mid = 0.5 * (t_dense[:-1] + t_dense[1:])
    half = 0.5 * np.diff(t_dense)
    t_nodes = mid[:, None] + half[:, None] * gx[None, :]
    panel = half * (speed(t_nodes.ravel()).reshape(-1, 5) @ gw)
    s_dense = np.concatenate(([0.0], np.cumsum(panel)))
    s_dense *= L / s_dense[-1]
    arc = CubicSpline(t_dense, s_dense)

    s_targets = np.linspace(0.0, L, n_samples)
    t_of_s = np.empty(n_samples)
    t_of_s[0], t_of_s[-1] = t0, t1
    idx = np.searchsorted(s_dense, s_targets[1:-1])
    for j, sj in enumerate(s_targets[1:-1], start=1):
        a = t_dense[max(idx[j - 1] - 1, 0)]
        b = t_dense[min(idx[j - 1] + 1, dense_n)]
        t_of_s[j] = brentq(lambda t: arc(t) - sj, a, b, xtol=1e-14 * max(1.0, abs(t1)))

    xd, yd = dx(t_of_s), dy(t_of_s)
    sp = np.hypot(xd, yd)
    pts = np.column_stack([fx(t_of_s), fy(t_of_s)])
    tangents = np.column_stack([xd / sp, yd / sp])
    k = (xd * ddy(t_of_s) - yd * ddx(t_of_s)) / sp**3

    spec = CurveSpec(L=L, k_samples=k, points=pts, tangents=tangents, symmetry_tol=symmetry_tol)
    check_curve(spec)
    return spec


def reconstruct_from_curvature(L, k, n_samples=1024, symmetry_tol=1e-6):
    """Integrate an even curvature description into curve samples.

    k may be a callable of arc length, a constant, or samples on a uniform
    grid over [0, L].  The tangent angle solves theta' = k anchored at
    theta(L/2) = 0 and gamma(L/2) = (0, 0); integration is one-step RK4 on
    the right half, mirrored onto the left so the symmetry invariants hold
    exactly.  Raises AsymmetricCurvature when k is not even about L/2.
    """
    L = float(L)
    if L <= 0:
        raise ValueError("L must be positive")
    s_grid = np.linspace(0.0, L, n_samples)
    if callable(k):
        k_eval = _vectorized(k)
        k_samples = k_eval(s_grid)
    else:
        arr = np.asarray(k, dtype=float)
        if arr.ndim == 0:
            k_samples = np.full(n_samples, float(arr))
            k_eval = _vectorized(lambda s: np.full_like(np.asarray(s, dtype=float), float(arr)))
        else:
            own = np.linspace(0.0, L, len(arr))
            k_samples = np.interp(s_grid, own, arr)
            k_eval = _vectorized(lambda s: np.interp(s, own, arr))

    k_res = np.max(np.abs(k_samples - k_samples[::-1]))
    if k_res > symmetry_tol * (1.0 + np.max(np.abs(k_samples))):
        raise AsymmetricCurvature(f"curvature is not even about L/2 (residual {k_res:.3g})")

    # One RK4 step of (theta, x, y)' = (k, cos theta, sin theta).
    def rk4_step(state, s, h):
        theta, xx, yy = state
        k1 = (float(k_eval(s)), np.cos(theta), np.sin(theta))
        t2 = theta + 0.5 * h * k1[0]
        k2 = (float(k_eval(s + 0.5 * h)), np.cos(t2), np.sin(t2))
        t3 = theta + 0.5 * h * k2[0]
        k3 = (k2[0], np.cos(t3), np.sin(t3))
        t4 = theta + h * k3[0]
        k4 = (float(k_eval(s + h)), np.cos(t4), np.sin(t4))
        return (
            theta + h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0,
            xx + h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0,
            yy + h * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) / 6.0,
        )

    pts = np.zeros((n_samples, 2))
    thetas = np.zeros(n_samples)
    right = np.nonzero(s_grid >= 0.5 * L - 1e-12 * L)[0]
    state, s_cur = (0.0, 0.0, 0.0), 0.5 * L
    for i in right:
        h = s_grid[i] - s_cur
        if h > 0:
            state = rk4_step(state, s_cur, h)
            s_cur = s_grid[i]
        thetas[i] = state[0]
        pts[i] = (state[1], state[2])

    # Mirror the left half; evenness of k makes this the exact solution there.
    for i in range(n_samples):
        j = n_samples - 1 - i
        if i < right[0]:
            pts[i] = (-pts[j, 0], pts[j, 1])
            thetas[i] = -thetas[j]

    tangents = np.column_stack([np.cos(thetas), np.sin(thetas)])
    spec = CurveSpec(
        L=L, k_samples=k_samples, points=pts, tangents=tangents, symmetry_tol=symmetry_tol
    )
    check_curve(spec)
    return spec


def width_profile(width, L, n_samples=1024, evenness_tol=1e-8):
    """Sample a width description (callable, constant, or samples) on [0, L]."""
    s_grid = np.linspace(0.0, float(L), n_samples)
    if callable(width):
        delta = _vectorized(width)(s_grid)
    else:
        arr = np.asarray(width, dtype=float)
        if arr.ndim == 0:
            delta = np.full(n_samples, float(arr))
        else:
            own = np.linspace(0.0, float(L), len(arr))
            delta = np.interp(s_grid, own, arr)

    if np.min(delta) <= 0.0:
        raise NonpositiveWeight(f"width must be positive (min {np.min(delta):.6g})")
    res = np.max(np.abs(delta - delta[::-1]))
    if res > evenness_tol * np.max(delta):
        raise AsymmetricWeight(f"width is not even about L/2 (residual {res:.3g})")
    ddelta = np.gradient(delta, s_grid[1] - s_grid[0])
    return WidthProfile(delta_samples=delta, ddelta_samples=ddelta, evenness_tol=evenness_tol)


def fermi_map(domain, s, r):
    """Map strip coordinates (s, r) to the plane; r runs along the clockwise normal.

    Accepts scalars or arrays (broadcast together); raises OutOfDomain when a
    point leaves [0, L] x [0, delta(s)] beyond interpolation tolerance.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    s, r = np.broadcast_arrays(s, r)
    L = domain.L
    tol_s = 1e-9 * L
    if np.any(s < -tol_s) or np.any(s > L + tol_s):
        raise OutOfDomain("arc length outside [0, L]")
    delta = domain.delta_at(s)
    tol_r = 1e-9 * (1.0 + np.max(domain.width.delta_samples))
    if np.any(r < -tol_r) or np.any(r > delta + tol_r):
        raise OutOfDomain("offset outside [0, delta(s)]")

    grid = domain.s_samples
    px = np.interp(s, grid, domain.curve.points[:, 0])
    py = np.interp(s, grid, domain.curve.points[:, 1])
    tx = np.interp(s, grid, domain.curve.tangents[:, 0])
    ty = np.interp(s, grid, domain.curve.tangents[:, 1])
    out = np.stack([px + r * ty, py - r * tx], axis=-1)
    return out


def _collision_count(curve, width, grid):
    """Count grid-cell pairs mapped closer than half their local spacing."""
    ns_g, nr_g = grid
    s_vals = np.linspace(0.0, curve.L, ns_g)
    own = curve.s_samples
    delta = np.interp(s_vals, own, width.delta_samples)
    px = np.interp(s_vals, own, curve.points[:, 0])
    py = np.interp(s_vals, own, curve.points[:, 1])
    tx = np.interp(s_vals, own, curve.tangents[:, 0])
    ty = np.interp(s_vals, own, curve.tangents[:, 1])

    t_vals = np.linspace(0.0, 1.0, nr_g)
    r = delta[:, None] * t_vals[None, :]
    X = px[:, None] + r * ty[:, None]
    Y = py[:, None] - r * tx[:, None]
    P = np.stack([X.ravel(), Y.ravel()], axis=1)

    # Local spacing per grid direction (nearest structured neighbor).
    ds = np.hypot(np.diff(X, axis=0), np.diff(Y, axis=0))
    dr = np.hypot(np.diff(X, axis=1), np.diff(Y, axis=1))
    ds_local = np.full((ns_g, nr_g), np.inf)
    ds_local[:-1, :] = np.minimum(ds_local[:-1, :], ds)
    ds_local[1:, :] = np.minimum(ds_local[1:, :], ds)
    dr_local = np.full((ns_g, nr_g), np.inf)
    dr_local[:, :-1] = np.minimum(dr_local[:, :-1], dr)
    dr_local[:, 1:] = np.minimum(dr_local[:, 1:], dr)
    ds_local, dr_local = ds_local.ravel(), dr_local.ravel()
    diag = np.hypot(ds_local, dr_local)

    # Two cells collide when their mapped points sit closer than half the
    # local cell size AND far closer than their grid offset predicts; the
    # second clause keeps non-adjacent cells of one healthy sheet (whose
    # distance simply is their grid offset) from being flagged.
    tree = cKDTree(P)
    pairs = tree.query_pairs(0.5 * float(np.max(diag)), output_type="ndarray")
    if len(pairs) == 0:
        return 0
    a, b = pairs[:, 0], pairs[:, 1]
    ia, ja = a // nr_g, a % nr_g
    ib, jb = b // nr_g, b % nr_g
    di, dj = np.abs(ia - ib), np.abs(ja - jb)
    adjacent = (di <= 1) & (dj <= 1)
    dist = np.hypot(P[a, 0] - P[b, 0], P[a, 1] - P[b, 1])
    expected_a = np.hypot(di * ds_local[a], dj * dr_local[a])
    expected_b = np.hypot(di * ds_local[b], dj * dr_local[b])
    threshold = 0.5 * np.minimum.reduce([diag[a], diag[b], expected_a, expected_b])
    hit = (~adjacent) & (dist < threshold)
    return int(np.count_nonzero(hit))


def _validate(curve, width, grid, check_injectivity):
    k = curve.k_samples
    delta = width.delta_samples
    s_vals = np.linspace(0.0, curve.L, grid[0])
    kg = np.interp(s_vals, curve.s_samples, k)
    dg = np.interp(s_vals, curve.s_samples, delta)
    # 1 + r k is linear in r, so the grid minimum sits at r = 0 or r = delta.
    jac_min = float(min(1.0, np.min(1.0 + dg * kg)))

    pts = curve.points
    point_res = float(
        max(np.max(np.abs(pts[:, 0] + pts[::-1, 0])), np.max(np.abs(pts[:, 1] - pts[::-1, 1])))
    )
    k_res = float(np.max(np.abs(k - k[::-1])))
    w_res = float(np.max(np.abs(delta - delta[::-1])))

    collisions = 0
    if check_injectivity and jac_min > 0.0:
        collisions = _collision_count(curve, width, grid)

    return ValidationReport(
        jacobian_min=jac_min,
        collision_count=collisions,
        point_symmetry_residual=point_res,
        curvature_evenness_residual=k_res,
        width_evenness_residual=w_res,
        injectivity_checked=bool(check_injectivity and jac_min > 0.0),
        grid=tuple(grid),
        valid=bool(jac_min > 0.0 and collisions == 0),
    )


def make_domain(curve, width, grid=DEFAULT_VALIDATION_GRID, check_injectivity=True):
    """Attach a width profile to a curve and validate the resulting strip."""
    if len(width.delta_samples) != curve.n:
        raise ValueError(
            f"width samples ({len(width.delta_samples)}) must match curve samples ({curve.n})"
        )
    report = _validate(curve, width, grid, check_injectivity)
    tangents = curve.tangents
    normal = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    offset = curve.points + width.delta_samples[:, None] * normal
    return FermiDomain(
        curve=curve,
        width=width,
        jacobian_min=report.jacobian_min,
        offset_curve=offset,
        valid=report.valid,
        injectivity_checked=report.injectivity_checked,
        validation=report,
    )


def validate_domain(domain, grid=DEFAULT_VALIDATION_GRID, check_injectivity=True):
    """Re-run validation of an existing domain on a chosen grid."""
    return _validate(domain.curve, domain.width, grid, check_injectivity)


def scale_width(domain, factor, grid=None, check_injectivity=True):
    """A new domain over the same curve with the width scaled by factor > 0."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    scaled = WidthProfile(
        delta_samples=domain.width.delta_samples * factor,
        ddelta_samples=domain.width.ddelta_samples * factor,
        evenness_tol=domain.width.evenness_tol,
    )
    if grid is None:
        grid = domain.validation.grid if domain.validation else DEFAULT_VALIDATION_GRID
    return make_domain(domain.curve, scaled, grid=grid, check_injectivity=check_injectivity)
