"""Strip eigenvalue solvers on the tensor mesh in frame coordinates.

The curved reference case is the annular sector (constant curvature -0.5,
constant width 0.5, length pi, radii 1.5 to 2).  Its first nonzero
Neumann eigenvalue separates in polar coordinates; the angular mode
solves a radial equation that an independent shooting oracle integrates
below.  The frozen oracle value is asserted against a fresh recompute so
the constant cannot drift from its derivation.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from fermi_spectra import (
    build_mesh,
    make_domain,
    pi_p,
    reconstruct_from_curvature,
    scale_width,
    solve_mu1_linear,
    solve_mu1_nonlinear,
    solve_mu1_odd_linear,
    width_profile,
)
from fermi_spectra.eig2d import assemble
from fermi_spectra.errors import DegenerateCell

ANNULUS_MU1_RADIAL = 1.3139311581  # frozen output of radial_oracle(nu=2)


def radial_oracle(nu, lo=1.0, hi=1.6):
    """First Neumann eigenvalue of -(rho h')' + nu^2 h / rho = mu rho h on [1.5, 2]."""

    def end_slope(mu):
        def rhs(rho, y):
            h, dh = y
            return [dh, -dh / rho + (nu**2 / rho**2 - mu) * h]

        sol = solve_ivp(rhs, (1.5, 2.0), [1.0, 0.0], rtol=1e-11, atol=1e-12)
        return sol.y[1, -1]

    return brentq(end_slope, lo, hi, xtol=1e-10)


class TestMesh:
    def test_node_count(self, annulus):
        mesh = build_mesh(annulus, 32, 8)
        assert mesh.n_nodes == 33 * 9

    def test_total_mass_rectangle(self, rectangle):
        mesh = build_mesh(rectangle, 64, 8)
        assert mesh.total_mass() == pytest.approx(math.pi * 0.4, rel=1e-12)

    def test_total_mass_annulus(self, annulus):
        # quarter turn between radii 1.5 and 2: area (Phi/2)(R^2 - r^2)
        mesh = build_mesh(annulus, 64, 8)
        assert mesh.total_mass() == pytest.approx(0.4375 * math.pi, rel=1e-9)

    def test_folding_domain_degenerate(self):
        curve = reconstruct_from_curvature(math.pi, lambda s: -2.0)
        width = width_profile(1.0, math.pi)
        domain = make_domain(curve, width, check_injectivity=False)
        with pytest.raises(DegenerateCell):
            build_mesh(domain, 32, 8)


class TestAssembly:
    def test_matches_physical_assembly_on_rectangle(self, rectangle):
        # same mesh assembled directly in physical coordinates with the
        # textbook bilinear element matrices
        mesh = build_mesh(rectangle, 24, 6)
        K, M = assemble(mesh)
        hx = rectangle.L / 24
        hy = 0.4 / 6
        k_x = (hy / (6.0 * hx)) * np.array(
            [[2, -2, -1, 1], [-2, 2, 1, -1], [-1, 1, 2, -2], [1, -1, -2, 2]]
        )
        k_y = (hx / (6.0 * hy)) * np.array(
            [[2, 1, -1, -2], [1, 2, -2, -1], [-1, -2, 2, 1], [-2, -1, 1, 2]]
        )
        m_e = (hx * hy / 36.0) * np.array(
            [[4, 2, 1, 2], [2, 4, 2, 1], [1, 2, 4, 2], [2, 1, 2, 4]]
        )
        n = mesh.n_nodes
        K_ref = np.zeros((n, n))
        M_ref = np.zeros((n, n))
        for cell in mesh.conn:
            K_ref[np.ix_(cell, cell)] += k_x + k_y
            M_ref[np.ix_(cell, cell)] += m_e
        assert np.max(np.abs(K.toarray() - K_ref)) < 1e-12
        assert np.max(np.abs(M.toarray() - M_ref)) < 1e-12

    def test_constant_in_stiffness_kernel(self, wavy):
        mesh = build_mesh(wavy, 32, 8)
        K, M = assemble(mesh)
        ones = np.ones(mesh.n_nodes)
        assert np.max(np.abs(K @ ones)) < 1e-12
        assert M @ ones @ ones == pytest.approx(mesh.total_mass(), rel=1e-12)


class TestLinearSolver:
    def test_rectangle_eigenvalue(self, rectangle):
        result = solve_mu1_linear(rectangle, ns=128, nt=8)
        assert result.mu == pytest.approx(1.0, rel=1e-3)
        assert result.converged
        assert result.residual < 1e-9

    def test_annulus_against_radial_oracle(self, annulus):
        oracle = radial_oracle(2)
        assert oracle == pytest.approx(ANNULUS_MU1_RADIAL, abs=1e-8)
        result = solve_mu1_linear(annulus, ns=256, nt=16)
        assert result.mu == pytest.approx(ANNULUS_MU1_RADIAL, rel=2e-4)

    def test_conforming_mesh_overestimates(self, annulus):
        coarse = solve_mu1_linear(annulus, ns=64, nt=8)
        fine = solve_mu1_linear(annulus, ns=256, nt=16)
        assert coarse.mu >= fine.mu >= ANNULUS_MU1_RADIAL * (1.0 - 1e-9)

    def test_odd_solver_matches_full(self, annulus):
        # symmetric data: the first nonzero mode is odd, so the half-strip
        # solve must reproduce the full eigenvalue
        full = solve_mu1_linear(annulus, ns=64, nt=8)
        odd = solve_mu1_odd_linear(annulus, ns=64, nt=8)
        assert odd.mu == pytest.approx(full.mu, rel=1e-12)

    def test_odd_solver_rejects_odd_ns(self, annulus):
        with pytest.raises(ValueError):
            solve_mu1_odd_linear(annulus, ns=63, nt=8)

    def test_eigenfunction_odd_in_s(self, rectangle):
        result = solve_mu1_linear(rectangle, ns=64, nt=4)
        grid = result.u.reshape(65, 5)
        assert np.max(np.abs(grid + grid[::-1])) < 1e-8 * np.max(np.abs(grid))

    def test_dilation_scaling(self, annulus):
        c = 2.0
        curve = reconstruct_from_curvature(c * math.pi, lambda s: -0.5 / c)
        width = width_profile(c * 0.5, c * math.pi)
        dilated = make_domain(curve, width, check_injectivity=False)
        a = solve_mu1_linear(annulus, ns=96, nt=8)
        b = solve_mu1_linear(dilated, ns=96, nt=8)
        assert b.mu == pytest.approx(a.mu / c**2, rel=1e-9)


class TestNonlinearSolver:
    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_rectangle_matches_segment_value(self, rectangle, p):
        result = solve_mu1_nonlinear(rectangle, p, ns=96, nt=8)
        exact = (pi_p(p) / math.pi) ** p
        assert result.converged
        assert result.mu == pytest.approx(exact, rel=2e-3)

    def test_p2_consistency_with_linear(self, annulus):
        lin = solve_mu1_linear(annulus, ns=64, nt=8)
        non = solve_mu1_nonlinear(annulus, 2.0, ns=64, nt=8)
        assert non.mu == pytest.approx(lin.mu, rel=1e-6)

    def test_odd_mode(self, annulus):
        full = solve_mu1_nonlinear(annulus, 3.0, ns=64, nt=8)
        odd = solve_mu1_nonlinear(annulus, 3.0, ns=64, nt=8, odd=True)
        assert odd.converged
        assert odd.mu == pytest.approx(full.mu, rel=1e-6)

    def test_narrower_strip_approaches_segment_value(self, annulus):
        # constant width and curvature: the thin limit weight is constant,
        # so mu drifts toward (pi_p / L)^p as the strip narrows
        p = 1.5
        limit = (pi_p(p) / math.pi) ** p
        a = solve_mu1_nonlinear(annulus, p, ns=64, nt=8)
        b = solve_mu1_nonlinear(scale_width(annulus, 0.5), p, ns=64, nt=8)
        assert abs(b.mu - limit) < abs(a.mu - limit)
