"""Explicit spectral bounds, thresholds, and certificates for strip domains.

Everything here is closed-form or low-dimensional quadrature: no PDE solves.
The quantities revolve around the area factor 1 + r k(s) of the strip map
and the one-dimensional reference eigenvalue (pi_p / L)^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, simpson

from .errors import AsymmetricWeight, BadExponent, NonpositiveWeight

# Curvature magnitudes below this count as zero when classifying signs.
K_ZERO = 1e-12


def _require_p(p):
    if not p > 1.0:
        raise BadExponent(f"p must exceed 1 (got {p})")


def pi_p(p):
    """Half-period of the p-trigonometric sine: 2 pi (p-1)^(1/p) / (p sin(pi/p))."""
    _require_p(p)
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def pi_p_quadrature(p):
    """Evaluate pi_p from its integral definition, 2 * int_0^inf dt / (1 + t^p/(p-1)).

    Substituting t = (p-1)^(1/p) u turns the integrand into 1/(1+u^p); the
    tail over [1, inf) maps onto [0, 1] via u -> 1/u.  Serves as the
    independent oracle for the closed form.
    """
    _require_p(p)
    head = quad(lambda u: 1.0 / (1.0 + u**p), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
    tail = quad(
        lambda u: u ** (p - 2.0) / (1.0 + u**p), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200
    )[0]
    return 2.0 * (p - 1.0) ** (1.0 / p) * (head + tail)


def c_p(p):
    """Constant with (a^2+b^2)^(p/2) >= c_p (a^p + b^p) for a, b >= 0."""
    _require_p(p)
    return 2.0 ** ((p - 2.0) / 2.0) if p < 2.0 else 1.0


def _max_fermi_factor(domain):
    """max over the closed strip of 1 + r k(s); attained at r = 0 or r = delta."""
    edge = 1.0 + domain.width.delta_samples * domain.curve.k_samples
    return max(1.0, float(np.max(edge)))


def a_p(domain, p):
    """min over the closed strip of (1 + r k)^(-p); monotone in r, so edges suffice."""
    _require_p(p)
    domain.require_valid()
    return _max_fermi_factor(domain) ** (-p)


def b_p(domain, p):
    """Prefactor 2^(-p/2) (p < 2) or 2^(1-p) (p >= 2) times min{1, min (1+rk)^(-p)}."""
    _require_p(p)
    domain.require_valid()
    inner = min(1.0, _max_fermi_factor(domain) ** (-p))
    prefactor = 2.0 ** (-p / 2.0) if p < 2.0 else 2.0 ** (1.0 - p)
    return prefactor * inner


@dataclass
class ConcavityResult:
    passed: bool
    worst_residual: float


def concavity_check(samples, tol=1e-9):
    """Concavity of uniform samples: every centered second difference <= tol * scale."""
    u = np.asarray(samples, dtype=float)
    if len(u) < 3:
        return ConcavityResult(True, 0.0)
    d2 = u[:-2] - 2.0 * u[1:-1] + u[2:]
    worst = float(np.max(d2))
    scale = float(np.max(np.abs(u)))
    return ConcavityResult(bool(worst <= tol * scale), worst)


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    residual: float


@dataclass
class BoundReport:
    label: str
    value: float
    constants: dict
    hypothesis_results: list
    applicable: bool


@dataclass
class Certificate:
    case_label: str
    threshold: float
    mu1_upper: float
    certified: bool


@dataclass
class ProofConstants:
    s: float
    B1_sq: float | None
    B2_sq: float | None
    B1_sq_closed: float | None
    B2_sq_closed: float | None
    C1_lower: float | None
    C2_lower: float | None


def oddness_threshold(domain):
    """Case label and smallness threshold from the curvature sign pattern.

    Case 'a' (k >= 0): 1 / max_s (2 delta + delta^2 k)^2.
    Case 'b' (k < 0):  1 / max_s (4 delta^2 / (1 + delta k)^2).
    Case 'c' (mixed):  the smaller of the two.
    Samples with |k| < 1e-12 count as nonnegative; strictly negative means
    every sample below -1e-12.
    """
    domain.require_valid()
    k = domain.curve.k_samples
    delta = domain.width.delta_samples

    convex_denom = float(np.max((2.0 * delta + delta**2 * k) ** 2))
    concave_denom = float(np.max(4.0 * delta**2 / (1.0 + delta * k) ** 2))

    if np.all(k >= -K_ZERO):
        return "a", 1.0 / convex_denom
    if np.all(k < -K_ZERO):
        return "b", 1.0 / concave_denom
    return "c", 1.0 / max(convex_denom, concave_denom)


def fermi_layer_integral(delta, k, q):
    """int_0^delta (1 + r k)^q dr, exact in every regime, elementwise on arrays.

    Uses a four-term series when |delta k| < 1e-8, the logarithm when the
    antiderivative exponent q + 1 vanishes, and expm1/log1p otherwise so
    the formula stays stable as q + 1 -> 0 or k -> 0.
    """
    if np.ndim(delta) == 0 and np.ndim(k) == 0:
        delta = float(delta)
        k = float(k)
        a = delta * k
        if abs(a) < 1e-8:
            q2, q3 = q * (q - 1.0), q * (q - 1.0) * (q - 2.0)
            return delta * (1.0 + q * a / 2.0 + q2 * a * a / 6.0 + q3 * a**3 / 24.0)
        if abs(q + 1.0) < 1e-12:
            return math.log1p(a) / k
        return math.expm1((q + 1.0) * math.log1p(a)) / ((q + 1.0) * k)
    d, kk = np.broadcast_arrays(
        np.asarray(delta, dtype=float), np.asarray(k, dtype=float)
    )
    a = d * kk
    out = np.empty_like(a)
    small = np.abs(a) < 1e-8
    if np.any(small):
        q2, q3 = q * (q - 1.0), q * (q - 1.0) * (q - 2.0)
        asm = a[small]
        out[small] = d[small] * (
            1.0 + q * asm / 2.0 + q2 * asm * asm / 6.0 + q3 * asm**3 / 24.0
        )
    rest = ~small
    if np.any(rest):
        ar, kr = a[rest], kk[rest]
        if abs(q + 1.0) < 1e-12:
            out[rest] = np.log1p(ar) / kr
        else:
            out[rest] = np.expm1((q + 1.0) * np.log1p(ar)) / ((q + 1.0) * kr)
    return out


def _panel_rule(L, panels=256, order=10):
    """Nodes and weights of a composite Gauss rule on [0, L]."""
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, L, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * gx[None, :]).ravel()
    weights = np.tile(half * gw, panels)
    return nodes, weights


def test_function_upper_bound(domain, p):
    """Rayleigh quotient of the profile cos(pi s / L) over the strip.

    The quotient is (pi/L)^p times the ratio of int |sin|^p I_{1-p} ds to
    int |cos|^p I_1 ds, where I_q(s) integrates (1+rk)^q across the layer;
    I_1 is the layer mass delta + delta^2 k / 2.  The profile has weighted
    p-mean zero by symmetry, so this dominates the first nonzero eigenvalue.
    """
    _require_p(p)
    domain.require_valid()
    L = domain.L
    nodes, weights = _panel_rule(L)
    delta = domain.delta_at(nodes)
    k = domain.k_at(nodes)
    layer_mass = delta + 0.5 * delta**2 * k
    layer_grad = np.array(
        [fermi_layer_integral(d, kk, 1.0 - p) for d, kk in zip(delta, k)]
    )
    phase = math.pi * nodes / L
    num = float(np.dot(weights, np.abs(np.sin(phase)) ** p * layer_grad))
    den = float(np.dot(weights, np.abs(np.cos(phase)) ** p * layer_mass))
    return (math.pi / L) ** p * num / den


def certify_odd(domain, mu1_upper=None):
    """Certify that the first nonzero Neumann eigenvalue has an odd eigenfunction.

    Compares a computable upper bound for the p = 2 eigenvalue (the cosine
    profile quotient unless the caller supplies a tighter one) with the
    smallness threshold for the curvature case at hand.
    """
    case_label, threshold = oddness_threshold(domain)
    if mu1_upper is None:
        mu1_upper = test_function_upper_bound(domain, 2.0)
    return Certificate(
        case_label=case_label,
        threshold=threshold,
        mu1_upper=float(mu1_upper),
        certified=bool(mu1_upper < threshold),
    )


def lyapunov_bound(w_samples, L, p, evenness_tol=1e-8):
    """Lower bound min w / int_0^{L/2} (L/2 - s)^(p-1) w(s) ds.

    w must be positive and even about L/2; the integral uses composite
    Simpson on the sample grid (the L/2 node is interpolated when the grid
    has no node there).  Equals p (2/L)^p exactly when w is constant.
    """
    _require_p(p)
    w = np.asarray(w_samples, dtype=float)
    if np.min(w) <= 0.0:
        raise NonpositiveWeight(f"weight must be positive (min {np.min(w):.6g})")
    res = np.max(np.abs(w - w[::-1]))
    if res > evenness_tol * np.max(w):
        raise AsymmetricWeight(f"weight is not even about L/2 (residual {res:.3g})")

    s = np.linspace(0.0, float(L), len(w))
    half = 0.5 * float(L)
    left = s[s <= half + 1e-12 * L]
    w_left = w[: len(left)]
    if abs(left[-1] - half) > 1e-12 * L:
        left = np.append(left, half)
        w_left = np.append(w_left, np.interp(half, s, w))
    integrand = (half - left) ** (p - 1.0) * w_left
    integral = float(simpson(integrand, x=left))
    return float(np.min(w)) / integral


def figure2_data(p_grid):
    """Table of x = 1/p, sin(pi x)/(pi x), (1-x)^x, and their gap.

    A positive gap at x = 1/p is equivalent to 2 p^(1/p) < pi_p, the strict
    comparison between the constant-weight Lyapunov bound and the true
    one-dimensional eigenvalue.
    """
    p_arr = np.asarray(p_grid, dtype=float)
    if np.any(p_arr <= 1.0):
        raise BadExponent("p grid must lie in (1, inf)")
    x = 1.0 / p_arr
    r = np.sinc(x)  # sin(pi x) / (pi x)
    b = np.exp(x * np.log1p(-x))
    return np.column_stack([x, r, b, b - r])


FIGURE2_COLUMNS = ("x", "r", "b", "b_minus_r")


def _golden_max(f, a, b, coarse=64, iters=120):
    """Maximum of a unimodal-ish f on [a, b]: coarse scan, then golden section."""
    xs = np.linspace(a, b, coarse + 1)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, coarse)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        if hi - lo < 1e-13 * max(1.0, abs(b)):
            break
    return max(f1, f2, vals[i])


def proof_constants(domain, s):
    """Interior estimate data at arc position s.

    For k(s) > 0 the relevant product pairs the outward layer mass above r
    with the inverse-factor mass below it; for k(s) < 0 the roles reverse
    and the product integrates from the far edge.  Each exact maximum over
    r is certified against its closed-form bound; the output also carries
    the Poincare-type constants 1/(4 B^2).
    """
    domain.require_valid()
    k = float(domain.k_at(s))
    delta = float(domain.delta_at(s))

    B1_sq = B2_sq = B1_closed = B2_closed = None
    if k > K_ZERO:

        def product_up(r):
            outer = (delta - r) * (1.0 + 0.5 * (delta + r) * k)
            inner = math.log1p(r * k) / k
            return outer * inner

        B1_sq = _golden_max(product_up, 0.0, delta)
        B1_closed = (delta + 0.5 * delta**2 * k) ** 2
    elif k < -K_ZERO:

        def product_down(r):
            outer = (delta - r) * (1.0 + 0.5 * (delta - r) * k)
            inner = (math.log1p((delta - r) * k) - math.log1p(delta * k)) / (-k)
            return outer * inner

        B2_sq = _golden_max(product_down, 0.0, delta)
        B2_closed = delta**2 / (1.0 + delta * k) ** 2
    else:
        # Flat case: both products degenerate to (delta - r) r.
        B1_sq = B2_sq = _golden_max(lambda r: (delta - r) * r, 0.0, delta)
        B1_closed = B2_closed = delta**2

    return ProofConstants(
        s=float(s),
        B1_sq=B1_sq,
        B2_sq=B2_sq,
        B1_sq_closed=B1_closed,
        B2_sq_closed=B2_closed,
        C1_lower=None if B1_sq is None else 1.0 / (4.0 * B1_sq),
        C2_lower=None if B2_sq is None else 1.0 / (4.0 * B2_sq),
    )


def _jacobian_hypothesis(domain):
    jmin = float(domain.jacobian_min)
    return HypothesisCheck("positive area factor", jmin > 0.0, jmin)


def lower_bound_constant_width(domain, p, concavity_tol=1e-9, width_tol=1e-9):
    """Lower bound A_p (pi_p / L)^p for constant width and concave curvature."""
    _require_p(p)
    delta = domain.width.delta_samples
    k = domain.curve.k_samples
    L = domain.L

    spread = float((np.max(delta) - np.min(delta)) / np.max(delta))
    conc = concavity_check(k, concavity_tol)
    checks = [
        HypothesisCheck("constant width", spread <= width_tol, spread),
        HypothesisCheck("concave curvature", conc.passed, conc.worst_residual),
        _jacobian_hypothesis(domain),
    ]

    A_p = _max_fermi_factor(domain) ** (-p)
    value = A_p * (pi_p(p) / L) ** p
    return BoundReport(
        label="constant-width",
        value=float(value),
        constants={"pi_p": pi_p(p), "A_p": A_p, "L": L, "p": p},
        hypothesis_results=checks,
        applicable=all(c.passed for c in checks),
    )


def lower_bound_variable_width(domain, p, concavity_tol=1e-9, slope_tol=1e-9):
    """Lower bound B_p (pi_p / L)^p for concave width with moderate slope.

    Hypotheses: delta concave; delta * k or delta^2 * k concave (either
    suffices); |delta'| <= 1; positive area factor.
    """
    _require_p(p)
    delta = domain.width.delta_samples
    k = domain.curve.k_samples
    L = domain.L

    conc_w = concavity_check(delta, concavity_tol)
    conc_dk = concavity_check(delta * k, concavity_tol)
    conc_d2k = concavity_check(delta**2 * k, concavity_tol)
    slope = float(np.max(np.abs(domain.width.ddelta_samples)))
    checks = [
        HypothesisCheck("concave width", conc_w.passed, conc_w.worst_residual),
        HypothesisCheck(
            "concave width-curvature product",
            conc_dk.passed or conc_d2k.passed,
            min(conc_dk.worst_residual, conc_d2k.worst_residual),
        ),
        HypothesisCheck("width slope at most one", slope <= 1.0 + slope_tol, slope - 1.0),
        _jacobian_hypothesis(domain),
    ]

    inner = min(1.0, _max_fermi_factor(domain) ** (-p))
    prefactor = 2.0 ** (-p / 2.0) if p < 2.0 else 2.0 ** (1.0 - p)
    B_p = prefactor * inner
    value = B_p * (pi_p(p) / L) ** p
    return BoundReport(
        label="variable-width",
        value=float(value),
        constants={"pi_p": pi_p(p), "B_p": B_p, "L": L, "p": p},
        hypothesis_results=checks,
        applicable=all(c.passed for c in checks),
    )


def lyapunov_bound_report(domain, p, evenness_tol=1e-8):
    """The one-dimensional Lyapunov bound packaged for the width weight."""
    w = domain.width.delta_samples
    checks = [
        HypothesisCheck("positive weight", bool(np.min(w) > 0.0), float(np.min(w))),
        HypothesisCheck(
            "even weight",
            bool(np.max(np.abs(w - w[::-1])) <= evenness_tol * np.max(w)),
            float(np.max(np.abs(w - w[::-1]))),
        ),
    ]
    value = lyapunov_bound(w, domain.L, p, evenness_tol=evenness_tol)
    return BoundReport(
        label="lyapunov",
        value=float(value),
        constants={"min_w": float(np.min(w)), "L": domain.L, "p": p},
        hypothesis_results=checks,
        applicable=all(c.passed for c in checks),
    )
