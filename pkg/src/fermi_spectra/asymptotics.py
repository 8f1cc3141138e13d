"""Thin-width limit of the strip eigenvalue.

Shrinking the width profile by a factor eps sends the first nonzero
Neumann eigenvalue of the strip to the first nonzero eigenvalue of the
one-dimensional problem weighted by the width.  The sweep measures that
convergence, fits its rate, evaluates the certification threshold along
the way, and bounds each strip eigenvalue from above through the
one-dimensional minimizer transplanted back onto the strip.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .analysis import certify_odd, fermi_layer_integral
from .eig1d import OneDimProblem, solve_shooting
from .eig2d import solve_mu1_linear, solve_mu1_nonlinear
from .errors import FermiSpectraError
from .geometry import scale_width


@dataclass
class MeshPolicy:
    ns: int = 256
    nt: int = 16
    refine_check: bool = True

    def __post_init__(self):
        if self.nt < 16:
            raise ValueError("nt below 16 under-resolves the width direction")
        if self.ns % 2 != 0:
            raise ValueError("ns must be even")


@dataclass
class SweepResult:
    p: float
    epsilons: np.ndarray
    mu_values: np.ndarray
    mu_star: float
    rel_errors: np.ndarray
    upper_bounds: np.ndarray
    thresholds: np.ndarray
    certified: np.ndarray
    refine_estimates: np.ndarray
    converged: np.ndarray
    failures: list = field(default_factory=list)
    fitted_rate: float = None


def limit_problem(domain, p):
    """The thin-limit one-dimensional problem: weight equal to the width."""
    return OneDimProblem(
        L=domain.L, p=p, w_samples=np.asarray(domain.width.delta_samples, dtype=float)
    )


def upper_bound_epsilon(domain, p, eps, limit_result=None):
    """Quotient of the transplanted one-dimensional minimizer on the eps-strip.

    The minimizer u(s) of the limit problem, used as an s-only test
    function on the strip with width eps * delta, has Dirichlet integrand
    |u'|^p (1 + r k)^(1-p) and mass |u|^p (1 + r k); integrating the layer
    exactly in r leaves two one-dimensional Simpson integrals.  The value
    bounds the strip eigenvalue from above for every eps.
    """
    if limit_result is None:
        limit_result = solve_shooting(limit_problem(domain, p))
    s = domain.s_samples
    delta_eps = eps * np.asarray(domain.width.delta_samples, dtype=float)
    k = np.asarray(domain.curve.k_samples, dtype=float)
    layer_dirichlet = fermi_layer_integral(delta_eps, k, 1.0 - p)
    layer_mass = fermi_layer_integral(delta_eps, k, 1.0)
    num = simpson(np.abs(limit_result.du_samples) ** p * layer_dirichlet, x=s)
    den = simpson(np.abs(limit_result.u_samples) ** p * layer_mass, x=s)
    return float(num / den)


def _solve_strip(domain, p, ns, nt):
    if p == 2.0:
        return solve_mu1_linear(domain, ns, nt)
    return solve_mu1_nonlinear(domain, p, ns, nt)


def epsilon_sweep(domain, p, epsilons, policy=None):
    """Eigenvalues of the eps-scaled strips against the thin-limit value.

    Each width factor gets its own validated domain and solve; failures
    (a folded strip, a stalled solver) are recorded per entry instead of
    aborting the sweep.  With refine_check the mesh is doubled once per
    entry, the difference between the two solves becomes the
    discretization estimate, and the reported value is the h^2
    extrapolation of the pair; without it the transplant upper bound can
    fall inside the discretization error of a thin entry, which would make
    a valid inequality look violated.  The convergence rate is fitted on
    the last three successful entries in log-log coordinates.
    """
    domain.require_valid()
    policy = policy or MeshPolicy()
    eps_arr = np.asarray(list(epsilons), dtype=float)
    n = len(eps_arr)
    mu_values = np.full(n, np.nan)
    upper_bounds = np.full(n, np.nan)
    thresholds = np.full(n, np.nan)
    certified = np.zeros(n, dtype=bool)
    refine_estimates = np.full(n, np.nan)
    converged = np.zeros(n, dtype=bool)
    failures = [None] * n

    limit_result = solve_shooting(limit_problem(domain, p))
    mu_star = limit_result.mu
    # Certification always compares the quadratic-case eigenvalue bound
    # against the curvature threshold, so a p != 2 sweep needs the
    # quadratic limit minimizer as well.
    limit_quad = limit_result if p == 2.0 else solve_shooting(limit_problem(domain, 2.0))

    for i, eps in enumerate(eps_arr):
        try:
            d_eps = scale_width(domain, float(eps))
            res = _solve_strip(d_eps, p, policy.ns, policy.nt)
            mu = res.mu
            ok = res.converged
            if policy.refine_check:
                fine = _solve_strip(d_eps, p, 2 * policy.ns, 2 * policy.nt)
                refine_estimates[i] = abs(fine.mu - mu)
                mu = fine.mu + (fine.mu - mu) / 3.0
                ok = ok and fine.converged
            mu_values[i] = mu
            converged[i] = ok
            ub = upper_bound_epsilon(domain, p, float(eps), limit_result)
            upper_bounds[i] = ub
            ub_quad = ub if p == 2.0 else upper_bound_epsilon(
                domain, 2.0, float(eps), limit_quad
            )
            cert = certify_odd(d_eps, mu1_upper=ub_quad)
            thresholds[i] = cert.threshold
            certified[i] = cert.certified
        except FermiSpectraError as exc:
            failures[i] = f"{type(exc).__name__}: {exc}"

    rel_errors = np.abs(mu_values - mu_star) / abs(mu_star)
    good = np.flatnonzero(~np.isnan(mu_values) & (rel_errors > 0))
    fitted_rate = None
    if len(good) >= 3:
        tail = good[-3:]
        slope = np.polyfit(np.log(eps_arr[tail]), np.log(rel_errors[tail]), 1)[0]
        fitted_rate = float(slope)

    return SweepResult(
        p=p,
        epsilons=eps_arr,
        mu_values=mu_values,
        mu_star=mu_star,
        rel_errors=rel_errors,
        upper_bounds=upper_bounds,
        thresholds=thresholds,
        certified=certified,
        refine_estimates=refine_estimates,
        converged=converged,
        failures=failures,
        fitted_rate=fitted_rate,
    )
