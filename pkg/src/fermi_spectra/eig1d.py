"""First nonzero Neumann eigenvalue of the weighted one-dimensional p-Laplacian.

The problem on (0, L) with positive even weight w reads

    -(w |u'|^(p-2) u')' = mu w |u|^(p-2) u,   u'(0) = u'(L) = 0.

Evenness of w makes the first nonzero eigenfunction odd about L/2 and
strictly monotone, so shooting only needs the half interval with a zero
target at L/2.  A discretized Rayleigh quotient minimizer provides the
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .analysis import lyapunov_bound
from .errors import (
    AsymmetricWeight,
    BadExponent,
    NoCrossing,
    NonpositiveWeight,
    StiffFailure,
)

PHI_FLOOR = 1e-14


@dataclass
class OneDimProblem:
    L: float
    p: float
    w_samples: np.ndarray
    evenness_tol: float = 1e-8

    def __post_init__(self):
        if not self.p > 1.0:
            raise BadExponent(f"p must exceed 1 (got {self.p})")
        if not self.L > 0.0:
            raise ValueError("L must be positive")
        w = np.asarray(self.w_samples, dtype=float)
        if len(w) < 8:
            raise ValueError("need at least 8 weight samples")
        if np.min(w) <= 0.0:
            raise NonpositiveWeight(f"weight must be positive (min {np.min(w):.6g})")
        res = np.max(np.abs(w - w[::-1]))
        if res > self.evenness_tol * np.max(w):
            raise AsymmetricWeight(f"weight is not even about L/2 (residual {res:.3g})")
        self.w_samples = w

    @property
    def s_samples(self):
        return np.linspace(0.0, self.L, len(self.w_samples))


@dataclass
class EigenResult:
    mu: float
    u_samples: np.ndarray
    residual: float
    method: str
    iterations: int
    converged: bool = True
    du_samples: np.ndarray = None


def _phi(z, power):
    """|z|^power * sign(z) with a small floor keeping the fractional power finite."""
    if z == 0.0:
        return 0.0
    az = abs(z)
    if az < PHI_FLOOR:
        az = PHI_FLOOR
    r = az**power
    return r if z > 0.0 else -r


def _shoot(mu, p, q, w_stage, h, n_steps, record=False):
    """RK4 integration of u' = phi_q(v/w), v' = -mu w phi_p(u) from (1, 0).

    Without record, stops at the first nonpositive u and reports the step
    index; with record, integrates the whole half interval and returns the
    sampled trajectory.
    """
    pm1 = p - 1.0
    qm1 = q - 1.0
    u = 1.0
    v = 0.0
    us = [1.0] if record else None
    vs = [0.0] if record else None
    crossed_at = -1
    for i in range(n_steps):
        j = 2 * i
        w0 = w_stage[j]
        wm = w_stage[j + 1]
        w1 = w_stage[j + 2]
        du1 = _phi(v / w0, qm1)
        dv1 = -mu * w0 * _phi(u, pm1)
        ua = u + 0.5 * h * du1
        va = v + 0.5 * h * dv1
        du2 = _phi(va / wm, qm1)
        dv2 = -mu * wm * _phi(ua, pm1)
        ub = u + 0.5 * h * du2
        vb = v + 0.5 * h * dv2
        du3 = _phi(vb / wm, qm1)
        dv3 = -mu * wm * _phi(ub, pm1)
        uc = u + h * du3
        vc = v + h * dv3
        du4 = _phi(vc / w1, qm1)
        dv4 = -mu * w1 * _phi(uc, pm1)
        u += h * (du1 + 2.0 * (du2 + du3) + du4) / 6.0
        v += h * (dv1 + 2.0 * (dv2 + dv3) + dv4) / 6.0
        if u != u or v != v:
            raise StiffFailure(f"integration produced non-finite state at mu={mu:.6g}")
        if record:
            us.append(u)
            vs.append(v)
        elif u <= 0.0:
            crossed_at = i + 1
            return True, crossed_at, None, None
    if record:
        return u <= 0.0, n_steps, np.array(us), np.array(vs)
    return u <= 0.0, n_steps, None, None


def solve_shooting(problem, tol=1e-10, n_steps=4096):
    """Locate the smallest mu whose shot from s = 0 vanishes by L/2.

    Brackets by doubling from the Lyapunov lower bound, then bisects the
    crossing predicate, which is monotone in mu.  tol is relative on mu.
    Returns the eigenfunction on the problem grid, extended oddly to [0, L].
    """
    p = problem.p
    q = p / (p - 1.0)
    L = problem.L
    half = 0.5 * L
    h = half / n_steps
    stage_s = np.linspace(0.0, half, 2 * n_steps + 1)
    w_stage = np.interp(stage_s, problem.s_samples, problem.w_samples).tolist()

    shots = 0

    def crossed(mu):
        nonlocal shots
        shots += 1
        return _shoot(mu, p, q, w_stage, h, n_steps)[0]

    lo = lyapunov_bound(problem.w_samples, L, p, evenness_tol=problem.evenness_tol)
    guard = 0
    while crossed(lo):
        lo *= 0.5
        guard += 1
        if guard > 60:
            raise NoCrossing("no uncrossed lower bracket found")
    hi = lo
    guard = 0
    while not crossed(hi):
        hi *= 2.0
        guard += 1
        if guard > 60:
            raise NoCrossing("doubling never produced a crossing")
    lo = hi * 0.5 if guard > 0 else lo

    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if crossed(mid):
            hi = mid
        else:
            lo = mid

    mu = 0.5 * (lo + hi)
    # Sample the eigenfunction at the certified uncrossed end so it stays
    # positive up to the midpoint; the boundary defect goes into residual.
    _, _, us, vs = _shoot(lo, p, q, w_stage, h, n_steps, record=True)
    residual = abs(us[-1]) / np.max(np.abs(us))
    dus = np.array([_phi(v / w, q - 1.0) for v, w in zip(vs, w_stage[::2])])

    s_grid = problem.s_samples
    n = len(s_grid)
    left = s_grid[s_grid <= half + 1e-12 * L]
    u_left = np.interp(left, stage_s[::2], us)
    du_left = np.interp(left, stage_s[::2], dus)
    u_full = np.empty(n)
    du_full = np.empty(n)
    u_full[: len(left)] = u_left
    du_full[: len(left)] = du_left
    for i in range(len(left), n):
        u_full[i] = -u_full[n - 1 - i]
        du_full[i] = du_full[n - 1 - i]
    if n % 2 == 1:
        u_full[n // 2] = 0.0

    return EigenResult(
        mu=mu,
        u_samples=u_full,
        residual=float(residual),
        method="shooting",
        iterations=shots,
        converged=True,
        du_samples=du_full,
    )


def pmean_shift(values, weights, p):
    """The scalar c with sum w |v - c|^(p-2) (v - c) = 0; monotone, by bisection."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    pm1 = p - 1.0

    def g(c):
        d = v - c
        return float(np.sum(w * np.abs(d) ** pm1 * np.sign(d)))

    lo, hi = float(np.min(v)), float(np.max(v))
    if hi - lo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi) + abs(lo)):
            break
    return 0.5 * (lo + hi)


def _discrete_quotient(u, h, w_mid, m_lumped, p):
    du = np.diff(u) / h
    num = float(np.sum(w_mid * h * np.abs(du) ** p))
    den = float(np.sum(m_lumped * np.abs(u) ** p))
    return num, den


def _cumtrap(f, h):
    out = np.empty(len(f))
    out[0] = 0.0
    np.cumsum(0.5 * h * (f[:-1] + f[1:]), out=out[1:])
    return out


def solve_discretized(problem, n=512, max_iter=400, tol=1e-8):
    """Independent discrete route on a uniform grid.

    For p = 2 this is the generalized eigenproblem of the assembled
    piecewise-linear stiffness and mass matrices (second eigenvalue; the
    first is the constant mode at zero).  For p != 2 it runs inverse power
    iteration: each step solves -(w phi_p(v'))' = mu w phi_p(u) by
    integrating the flux from the left Neumann end, inverting phi_p, and
    integrating again, then restores the weighted p-mean-zero constraint
    with a scalar shift.  The solve is exact up to trapezoid quadrature
    because the flux has an explicit antiderivative in one dimension.
    """
    if n < 32:
        raise ValueError("n must be at least 32")
    p = problem.p
    L = problem.L
    s = np.linspace(0.0, L, n + 1)
    h = L / n
    w = np.interp(s, problem.s_samples, problem.w_samples)
    w_mid = 0.5 * (w[:-1] + w[1:])

    # Exact element integrals for linear w: stiffness w_mid/h, mass by rows.
    main = np.zeros(n + 1)
    upper = np.zeros(n)
    m_main = np.zeros(n + 1)
    m_upper = np.zeros(n)
    main[:-1] += w_mid / h
    main[1:] += w_mid / h
    upper -= w_mid / h
    m_main[:-1] += h * (3.0 * w[:-1] + w[1:]) / 12.0
    m_main[1:] += h * (w[:-1] + 3.0 * w[1:]) / 12.0
    m_upper += h * (w[:-1] + w[1:]) / 12.0

    K = np.diag(main) + np.diag(upper, 1) + np.diag(upper, -1)
    M = np.diag(m_main) + np.diag(m_upper, 1) + np.diag(m_upper, -1)
    vals, vecs = scipy.linalg.eigh(K, M, subset_by_index=(0, 2))
    u2 = vecs[:, 1]
    if abs(u2[0]) > 1e-12 * np.max(np.abs(u2)):
        u2 = u2 / u2[0]

    if p == 2.0:
        mu = float(vals[1])
        r = K @ u2 - mu * (M @ u2)
        residual = float(np.linalg.norm(r) / np.linalg.norm(K @ u2))
        u_out = np.interp(problem.s_samples, s, u2)
        return EigenResult(
            mu=mu,
            u_samples=u_out,
            residual=residual,
            method="discretized",
            iterations=1,
            converged=True,
        )

    # Lumped weights keep the p-mean constraint a clean nodal sum.
    m_lumped = np.zeros(n + 1)
    m_lumped[:-1] += 0.5 * h * w_mid
    m_lumped[1:] += 0.5 * h * w_mid
    pm1 = p - 1.0

    def project(u):
        u = u - pmean_shift(u, m_lumped, p)
        return u / np.max(np.abs(u))

    u = project(u2.copy())
    num, den = _discrete_quotient(u, h, w_mid, m_lumped, p)
    value = num / den
    converged = False
    iterations = 0
    shift = 0.0
    window = []
    for iterations in range(1, max_iter + 1):
        f = value * w * np.abs(u) ** pm1 * np.sign(u)
        flux = -_cumtrap(f, h)
        # The weighted p-mean of u vanishes, so the total load does too up
        # to quadrature; recenter the flux so both ends are exact Neumann.
        flux -= flux[-1] * np.linspace(0.0, 1.0, n + 1)
        dv = np.abs(flux / w) ** (1.0 / pm1) * np.sign(flux)
        v = project(_cumtrap(dv, h))
        shift = float(np.max(np.abs(v - u)))
        num, den = _discrete_quotient(v, h, w_mid, m_lumped, p)
        u = v
        value = num / den
        # Near p = 1 the iterate can keep moving in directions the quotient
        # barely sees, so convergence is judged on the eigenvalue itself.
        window.append(value)
        if len(window) > 5:
            window.pop(0)
        spread = max(window) - min(window)
        if shift <= 1e-8 or (len(window) == 5 and spread <= tol * value):
            value = float(np.mean(window))
            converged = True
            break

    u_out = np.interp(problem.s_samples, s, u)
    return EigenResult(
        mu=float(value),
        u_samples=u_out,
        residual=shift,
        method="discretized",
        iterations=iterations,
        converged=converged,
    )
