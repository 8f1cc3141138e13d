"""Weighted one dimensional eigenvalue solvers, shooting and discretized."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermi_spectra import (
    OneDimProblem,
    lyapunov_bound,
    pi_p,
    solve_discretized,
    solve_shooting,
)
from fermi_spectra.eig1d import pmean_shift
from fermi_spectra.errors import AsymmetricWeight, BadExponent, NonpositiveWeight


def constant_problem(p, L, n=257):
    return OneDimProblem(L=L, p=p, w_samples=np.ones(n))


def even_weight(fn, L, n=513):
    s = np.linspace(0.0, L, n)
    w = fn(s)
    return OneDimProblem(L=L, p=2.0, w_samples=w)


class TestValidation:
    def test_rejects_small_exponent(self):
        with pytest.raises(BadExponent):
            OneDimProblem(L=1.0, p=1.0, w_samples=np.ones(16))

    def test_rejects_nonpositive_weight(self):
        w = np.ones(16)
        w[7] = 0.0
        with pytest.raises(NonpositiveWeight):
            OneDimProblem(L=1.0, p=2.0, w_samples=w)

    def test_rejects_uneven_weight(self):
        s = np.linspace(0.0, 1.0, 64)
        with pytest.raises(AsymmetricWeight):
            OneDimProblem(L=1.0, p=2.0, w_samples=1.0 + s)

    def test_rejects_too_few_samples(self):
        with pytest.raises(ValueError):
            OneDimProblem(L=1.0, p=2.0, w_samples=np.ones(4))


class TestConstantWeight:
    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 5.0])
    @pytest.mark.parametrize("L", [1.0, math.pi])
    def test_shooting_matches_closed_form(self, p, L):
        result = solve_shooting(constant_problem(p, L))
        exact = (pi_p(p) / L) ** p
        assert result.mu == pytest.approx(exact, rel=1e-6)
        assert result.converged

    def test_p2_eigenfunction_is_cosine(self):
        problem = constant_problem(2.0, math.pi, n=513)
        result = solve_shooting(problem)
        s = problem.s_samples
        scale = result.u_samples[0]
        assert np.max(np.abs(result.u_samples - scale * np.cos(s))) < 1e-6
        assert np.max(np.abs(result.du_samples + scale * np.sin(s))) < 1e-6

    def test_discretized_linear_route(self):
        problem = constant_problem(2.0, math.pi, n=513)
        result = solve_discretized(problem, n=512)
        assert result.mu == pytest.approx(1.0, rel=1e-4)
        assert result.method == "discretized"


class TestEigenfunctionShape:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_odd_and_single_sign_change(self, p):
        L = math.pi
        s = np.linspace(0.0, L, 513)
        problem = OneDimProblem(L=L, p=p, w_samples=1.0 + 0.3 * np.cos(2 * s))
        result = solve_shooting(problem)
        u = result.u_samples
        assert np.max(np.abs(u + u[::-1])) < 1e-8 * np.max(np.abs(u))
        signs = np.sign(u[np.abs(u) > 1e-10 * np.max(np.abs(u))])
        assert np.count_nonzero(np.diff(signs)) == 1
        assert result.residual < 1e-8

    def test_du_vanishes_at_ends(self):
        result = solve_shooting(constant_problem(3.0, math.pi))
        assert abs(result.du_samples[0]) < 1e-10
        assert abs(result.du_samples[-1]) < 1e-10


class TestWeightedProperties:
    def test_weight_scaling_leaves_mu_unchanged(self):
        L = math.pi
        s = np.linspace(0.0, L, 513)
        w = 1.0 + 0.4 * np.sin(s)
        a = solve_shooting(OneDimProblem(L=L, p=2.5, w_samples=w))
        b = solve_shooting(OneDimProblem(L=L, p=2.5, w_samples=7.0 * w))
        assert a.mu == pytest.approx(b.mu, rel=1e-9)

    def test_log_concave_weight_dominates_constant(self):
        # Gaussian bump, log-concave and even
        L = math.pi
        s = np.linspace(0.0, L, 513)
        w = np.exp(-((s - L / 2.0) ** 2))
        for p in (1.5, 2.0, 3.0):
            problem = OneDimProblem(L=L, p=p, w_samples=w)
            result = solve_shooting(problem)
            assert result.mu >= (pi_p(p) / L) ** p * (1.0 - 1e-9)

    def test_truncation_increases_mu(self):
        # restriction of a half-period cosine weight stays even
        L = math.pi
        full_s = np.linspace(0.0, L, 1025)
        w_fn = lambda s: 1.0 + 0.2 * np.cos(4.0 * np.pi * s / L)
        mu_full = solve_shooting(OneDimProblem(L=L, p=2.0, w_samples=w_fn(full_s))).mu
        half_s = np.linspace(0.0, L / 2.0, 513)
        mu_half = solve_shooting(
            OneDimProblem(L=L / 2.0, p=2.0, w_samples=w_fn(half_s))
        ).mu
        assert mu_half > mu_full

    def test_lyapunov_below_and_rayleigh_above(self):
        L = math.pi
        s = np.linspace(0.0, L, 513)
        w = 1.2 + 0.5 * np.cos(2.0 * s)
        p = 2.0
        problem = OneDimProblem(L=L, p=p, w_samples=w)
        mu = solve_shooting(problem).mu
        assert lyapunov_bound(w, L, p) <= mu * (1.0 + 1e-9)
        phi = np.cos(np.pi * s / L)
        dphi = -(np.pi / L) * np.sin(np.pi * s / L)
        quotient = np.trapezoid(w * np.abs(dphi) ** p, s) / np.trapezoid(
            w * np.abs(phi) ** p, s
        )
        assert mu <= quotient * (1.0 + 1e-6)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_two_routes_agree(self, p):
        L = math.pi
        s = np.linspace(0.0, L, 513)
        w = 1.0 + 0.3 * np.cos(2.0 * s) + 0.1 * np.cos(4.0 * s)
        problem = OneDimProblem(L=L, p=p, w_samples=w)
        shot = solve_shooting(problem)
        disc = solve_discretized(problem, n=512)
        assert disc.converged
        assert shot.mu == pytest.approx(disc.mu, rel=1e-3)


class TestPMeanShift:
    def test_p2_is_weighted_mean(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=50)
        w = rng.uniform(0.5, 2.0, 50)
        got = pmean_shift(v, w, 2.0)
        assert got == pytest.approx(np.sum(w * v) / np.sum(w), abs=1e-10)

    def test_defines_zero_pmean(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=50)
        w = rng.uniform(0.5, 2.0, 50)
        p = 3.0
        c = pmean_shift(v, w, p)
        d = v - c
        assert abs(np.sum(w * np.abs(d) ** (p - 1.0) * np.sign(d))) < 1e-8


@given(
    st.lists(st.floats(min_value=0.2, max_value=2.0), min_size=8, max_size=24),
    st.sampled_from([1.5, 2.0, 3.0]),
)
@settings(max_examples=15, deadline=None)
def test_lyapunov_never_exceeds_eigenvalue(half, p):
    w_half = np.asarray(half)
    w = np.concatenate([w_half, w_half[::-1]])
    L = math.pi
    problem = OneDimProblem(L=L, p=p, w_samples=w)
    mu = solve_shooting(problem, tol=1e-8, n_steps=1024).mu
    assert lyapunov_bound(w, L, p) <= mu * (1.0 + 1e-6)
