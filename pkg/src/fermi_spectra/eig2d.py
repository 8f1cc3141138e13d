"""First nonzero Neumann eigenvalue of the p-Laplacian on a curved strip.

The strip is never meshed in physical coordinates.  The map
(s, t) -> curve(s) + t delta(s) n(s) pulls everything back to the unit
reference band, where the Dirichlet integrand becomes grad^T G grad with

    G = [[a^2, a*b], [a*b, b^2 + 1/delta^2]],
    a = 1/(1 + r k),  b = -t delta' / ((1 + r k) delta),  r = t delta,

and the area element (1 + r k) delta ds dt.  Bilinear quadrilaterals with
2 x 2 Gauss quadrature discretize the band.  Odd eigenvalues use the half
band with a homogeneous essential condition on the midline, which is
equivalent to odd reflection when the weight data is even.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .eig1d import pmean_shift
from .errors import BadExponent, DegenerateCell, SolveFailure

_GPTS = np.array([-1.0, 1.0]) / np.sqrt(3.0)


@dataclass
class Mesh2D:
    L: float
    ns: int
    nt: int
    s_nodes: np.ndarray
    t_nodes: np.ndarray
    conn: np.ndarray
    node_s: np.ndarray
    node_t: np.ndarray
    gauss_weight: np.ndarray
    metric: np.ndarray
    shape: np.ndarray
    shape_grad: np.ndarray

    @property
    def n_nodes(self):
        return len(self.node_s)

    def total_mass(self):
        return float(np.sum(self.gauss_weight))


@dataclass
class Eigen2DResult:
    mu: float
    u: np.ndarray
    residual: float
    method: str
    iterations: int
    converged: bool
    mesh: Mesh2D


def build_mesh(domain, ns, nt, s_range=None):
    """Tensor mesh over [s0, s1] x [0, 1] with frame-metric quadrature data.

    Cells where the area factor 1 + r k is not strictly positive at a
    quadrature point are reported as degenerate rather than silently
    flipping orientation.
    """
    if ns < 2 or nt < 1:
        raise ValueError("mesh needs at least 2 x 1 cells")
    s0, s1 = (0.0, domain.L) if s_range is None else map(float, s_range)
    s_nodes = np.linspace(s0, s1, ns + 1)
    t_nodes = np.linspace(0.0, 1.0, nt + 1)
    hs = (s1 - s0) / ns
    ht = 1.0 / nt

    jj, ii = np.meshgrid(np.arange(nt + 1), np.arange(ns + 1))
    node_s = s_nodes[ii].ravel()
    node_t = t_nodes[jj].ravel()

    ci, cj = np.meshgrid(np.arange(ns), np.arange(nt), indexing="ij")
    ci = ci.ravel()
    cj = cj.ravel()
    stride = nt + 1
    conn = np.stack(
        [
            ci * stride + cj,
            (ci + 1) * stride + cj,
            (ci + 1) * stride + cj + 1,
            ci * stride + cj + 1,
        ],
        axis=1,
    )

    xi, eta = np.meshgrid(_GPTS, _GPTS, indexing="ij")
    xi = xi.ravel()
    eta = eta.ravel()
    shape = 0.25 * np.stack(
        [
            (1 - xi) * (1 - eta),
            (1 + xi) * (1 - eta),
            (1 + xi) * (1 + eta),
            (1 - xi) * (1 + eta),
        ],
        axis=1,
    )
    dxi = 0.25 * np.stack([-(1 - eta), (1 - eta), (1 + eta), -(1 + eta)], axis=1)
    deta = 0.25 * np.stack([-(1 - xi), -(1 + xi), (1 + xi), (1 - xi)], axis=1)
    shape_grad = np.stack([dxi * (2.0 / hs), deta * (2.0 / ht)], axis=2)

    s_g = s_nodes[ci][:, None] + hs * 0.5 * (1.0 + xi)[None, :]
    t_g = t_nodes[cj][:, None] + ht * 0.5 * (1.0 + eta)[None, :]
    delta = domain.delta_at(s_g)
    ddelta = domain.ddelta_at(s_g)
    k = domain.k_at(s_g)
    jac = 1.0 + t_g * delta * k
    if np.min(jac) <= 0.0:
        raise DegenerateCell(
            f"area factor reaches {np.min(jac):.6g}; the strip folds over itself"
        )
    alpha = 1.0 / jac
    beta = -t_g * ddelta / (jac * delta)
    metric = np.empty(jac.shape + (2, 2))
    metric[..., 0, 0] = alpha**2
    metric[..., 0, 1] = alpha * beta
    metric[..., 1, 0] = alpha * beta
    metric[..., 1, 1] = beta**2 + 1.0 / delta**2
    gauss_weight = jac * delta * (hs * ht * 0.25)

    return Mesh2D(
        L=domain.L,
        ns=ns,
        nt=nt,
        s_nodes=s_nodes,
        t_nodes=t_nodes,
        conn=conn,
        node_s=node_s,
        node_t=node_t,
        gauss_weight=gauss_weight,
        metric=metric,
        shape=shape,
        shape_grad=shape_grad,
    )


def assemble(mesh):
    """Sparse stiffness and mass matrices for the quadratic (p = 2) forms."""
    w = mesh.gauss_weight
    dN = mesh.shape_grad
    N = mesh.shape
    k_cells = np.einsum("cg,gax,cgxy,gby->cab", w, dN, mesh.metric, dN, optimize=True)
    m_cells = np.einsum("cg,ga,gb->cab", w, N, N, optimize=True)
    rows = np.broadcast_to(mesh.conn[:, :, None], k_cells.shape).ravel()
    cols = np.broadcast_to(mesh.conn[:, None, :], k_cells.shape).ravel()
    n = mesh.n_nodes
    K = scipy.sparse.coo_matrix((k_cells.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = scipy.sparse.coo_matrix((m_cells.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return K, M


def _inverse_iterate(A_lu, K, M, u0, deflate=None, tol=1e-12, max_iter=200):
    u = u0 / np.sqrt(u0 @ (M @ u0))
    if deflate is not None:
        u = u - deflate * (deflate @ (M @ u))
    mu_prev = np.inf
    mu = float(u @ (K @ u))
    it = 0
    for it in range(1, max_iter + 1):
        v = A_lu.solve(M @ u)
        if deflate is not None:
            v = v - deflate * (deflate @ (M @ v))
        v = v / np.sqrt(v @ (M @ v))
        mu_prev, mu = mu, float(v @ (K @ v))
        u = v
        if abs(mu - mu_prev) <= tol * abs(mu):
            break
    else:
        raise SolveFailure(f"inverse iteration stalled at mu={mu:.9g}")
    r = K @ u - mu * (M @ u)
    residual = float(np.linalg.norm(r) / max(np.linalg.norm(K @ u), 1e-300))
    return mu, u, residual, it


def solve_mu1_linear(domain, ns=256, nt=16, tol=1e-12, max_iter=200):
    """First nonzero Neumann eigenvalue for p = 2 on the full strip.

    Shifted inverse iteration with the constant mode deflated in the mass
    inner product; deterministic cosine start.
    """
    domain.require_valid()
    mesh = build_mesh(domain, ns, nt)
    K, M = assemble(mesh)
    ones = np.ones(mesh.n_nodes)
    ones = ones / np.sqrt(ones @ (M @ ones))
    u0 = np.cos(np.pi * mesh.node_s / domain.L)
    u0 = u0 - ones * (ones @ (M @ u0))
    sigma = 0.5 * float(u0 @ (K @ u0)) / float(u0 @ (M @ u0))
    A_lu = scipy.sparse.linalg.splu((K + sigma * M).tocsc())
    mu, u, residual, it = _inverse_iterate(
        A_lu, K, M, u0, deflate=ones, tol=tol, max_iter=max_iter
    )
    return Eigen2DResult(
        mu=mu, u=u, residual=residual, method="linear", iterations=it,
        converged=True, mesh=mesh,
    )


def _half_mesh_reduction(domain, ns, nt):
    if ns % 2 != 0:
        raise ValueError("odd-mode solves need an even ns")
    mesh = build_mesh(domain, ns // 2, nt, s_range=(0.0, 0.5 * domain.L))
    K, M = assemble(mesh)
    essential = mesh.node_s >= 0.5 * domain.L - 1e-12 * domain.L
    keep = np.flatnonzero(~essential)
    K_red = K[keep][:, keep].tocsr()
    M_red = M[keep][:, keep].tocsr()
    return mesh, K_red, M_red, keep


def solve_mu1_odd_linear(domain, ns=256, nt=16, tol=1e-12, max_iter=200):
    """Smallest eigenvalue among modes odd about the midline, p = 2.

    Solved on the half strip with the midline held at zero; for even
    curvature and width data this is the odd-reflection eigenvalue.
    """
    domain.require_valid()
    mesh, K_red, M_red, keep = _half_mesh_reduction(domain, ns, nt)
    A_lu = scipy.sparse.linalg.splu(K_red.tocsc())
    u0 = np.cos(np.pi * mesh.node_s[keep] / domain.L)
    mu, u_red, residual, it = _inverse_iterate(
        A_lu, K_red, M_red, u0, deflate=None, tol=tol, max_iter=max_iter
    )
    u = np.zeros(mesh.n_nodes)
    u[keep] = u_red
    return Eigen2DResult(
        mu=mu, u=u, residual=residual, method="linear-odd", iterations=it,
        converged=True, mesh=mesh,
    )


def _p_rayleigh(mesh, u, p, floor=1e-60):
    ue = u[mesh.conn]
    grad = np.einsum("gax,ca->cgx", mesh.shape_grad, ue)
    energy = np.einsum("cgx,cgxy,cgy->cg", grad, mesh.metric, grad)
    energy = np.maximum(energy, floor)
    ug = np.einsum("ga,ca->cg", mesh.shape, ue)
    w = mesh.gauss_weight
    num = float(np.sum(w * energy ** (0.5 * p)))
    den = float(np.sum(w * np.abs(ug) ** p))
    return num, den, grad, energy, ug


def _p_rayleigh_grad(mesh, p, num, den, grad, energy, ug):
    w = mesh.gauss_weight
    flux = np.einsum("cgxy,cgy->cgx", mesh.metric, grad)
    s1 = w * energy ** (0.5 * p - 1.0)
    gnum_local = p * np.einsum("cg,cgx,gax->ca", s1, flux, mesh.shape_grad)
    s2 = w * np.abs(ug) ** (p - 1.0) * np.sign(ug)
    gden_local = p * np.einsum("cg,ga->ca", s2, mesh.shape)
    n = mesh.n_nodes
    gnum = np.zeros(n)
    gden = np.zeros(n)
    np.add.at(gnum, mesh.conn, gnum_local)
    np.add.at(gden, mesh.conn, gden_local)
    return (gnum - (num / den) * gden) / den


def solve_mu1_nonlinear(
    domain,
    p,
    ns=256,
    nt=16,
    odd=False,
    max_iter=20000,
    stall_window=50,
    stall_tol=1e-9,
):
    """First nonzero eigenvalue for general p > 1 by Rayleigh descent.

    Minimizes the discrete p-quotient along directions preconditioned by
    the factored quadratic operator (a Sobolev gradient), with
    Barzilai-Borwein steps and a backtracking safeguard, warm-started
    from the p = 2 eigenvector.  The full-strip variant enforces the zero
    weighted p-mean constraint with a scalar shift; the odd variant works
    on the half strip with the midline pinned, where no constraint is
    needed.  converged reports stagnation of the quotient, which for a
    descent method is the attainable notion of success; mu is then an
    upper estimate of the discrete minimum.
    """
    if not p > 1.0:
        raise BadExponent(f"p must exceed 1 (got {p})")
    domain.require_valid()
    if p == 2.0:
        res = solve_mu1_odd_linear(domain, ns, nt) if odd else solve_mu1_linear(domain, ns, nt)
        return res

    if odd:
        mesh, K_red, M_red, keep = _half_mesh_reduction(domain, ns, nt)
        A_lu = scipy.sparse.linalg.splu(K_red.tocsc())
        u0 = np.cos(np.pi * mesh.node_s[keep] / domain.L)
        _, u_red, _, _ = _inverse_iterate(A_lu, K_red, M_red, u0)
        u = np.zeros(mesh.n_nodes)
        u[keep] = u_red
        free = keep

        def precondition(vec):
            out = np.zeros(mesh.n_nodes)
            out[free] = A_lu.solve(vec[free])
            return out

    else:
        lin = solve_mu1_linear(domain, ns, nt)
        mesh = lin.mesh
        u = lin.u
        free = None
        K2, M = assemble(mesh)
        m_lump = np.asarray(M.sum(axis=1)).ravel()
        P_lu = scipy.sparse.linalg.splu((K2 + lin.mu * M).tocsc())
        precondition = P_lu.solve

    def project(vec):
        if free is None:
            vec = vec - pmean_shift(vec, m_lump, p)
        else:
            out = np.zeros(mesh.n_nodes)
            out[free] = vec[free]
            vec = out
        return vec / np.max(np.abs(vec))

    def evaluate(vec):
        num, den, grad, energy, ug = _p_rayleigh(mesh, vec, p)
        g = _p_rayleigh_grad(mesh, p, num, den, grad, energy, ug)
        return num / den, precondition(g)

    u = project(u)
    value, d = evaluate(u)
    step = 1.0
    history = [value]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        trial = step
        accepted = False
        for _ in range(40):
            cand = project(u - trial * d)
            cval, cd = evaluate(cand)
            if cval < value:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            converged = True
            break
        du = cand - u
        dd = cd - d
        bb = float(du @ dd)
        step = float(du @ du) / bb if bb > 0 else trial * 2.0
        u, d, value = cand, cd, cval
        history.append(value)
        if len(history) > stall_window:
            drop = history[-stall_window - 1] - value
            if drop <= stall_tol * value:
                converged = True
                break

    residual = float(np.linalg.norm(d) / value)
    return Eigen2DResult(
        mu=float(value),
        u=u,
        residual=residual,
        method="descent-odd" if odd else "descent",
        iterations=iterations,
        converged=converged,
        mesh=mesh,
    )
