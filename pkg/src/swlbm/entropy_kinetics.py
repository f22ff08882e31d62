"""Kinetic decomposition of the dual entropy ``eta* = p``.

The dual entropy is split into one convex potential ``h_j*`` per lattice
velocity.  The equilibria are the gradients of those potentials with respect
to the entropy variables, and the Legendre duals ``h_j`` of the potentials sum
to the microscopic entropy ``H``.

Velocity order is ``(0, +, -)`` on D1Q3 and ``(0, +x, +y, -x, -y)`` on D2Q5.
The momentum families carry no rest population, so ``g``, ``gx`` and ``gy``
are indexed over the moving velocities only.

Entropy variables are passed as plain sequences ``(theta, beta)`` in 1D and
``(theta, u, v)`` in 2D; every entry may be an array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .sw_core import MacroState1D, MacroState2D, PhysParams, entropy_vars, pressure

#: unit lattice directions, rest velocity first
DIRECTIONS = {
    1: np.array([[0.0], [1.0], [-1.0]]),
    2: np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
}


@dataclass(frozen=True)
class KineticParams:
    a: float
    lam: float
    phys: PhysParams = field(default_factory=PhysParams)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        self.phys.require_gamma2()

    @property
    def K(self) -> float:
        return self.phys.K


class Equilibrium1D(NamedTuple):
    f_eq: np.ndarray  # (3, ...)
    g_eq: np.ndarray  # (2, ...)


class Equilibrium2D(NamedTuple):
    f_eq: np.ndarray  # (5, ...)
    gx_eq: np.ndarray  # (4, ...)
    gy_eq: np.ndarray  # (4, ...)


class LegendreError(RuntimeError):
    def __init__(self, message, last_iterate):
        super().__init__(message)
        self.last_iterate = last_iterate


class LegendreResult(NamedTuple):
    value: float
    phi: np.ndarray


class ConvexityReport(NamedTuple):
    convex: bool
    min_eigenvalue: float
    eigenvalues: list


class EntropyTotal(NamedTuple):
    value: float
    n_failed: int


# --------------------------------------------------------------------------
# potentials


def h_star_1d(j: int, phi, kp: KineticParams):
    """Potential ``h_j*`` on D1Q3, ``j`` in ``(0, 1, 2)`` for ``(0, +, -)``."""
    theta, beta = (np.asarray(x, dtype=float) for x in phi)
    K, a = kp.K, kp.a
    if j == 0:
        return 0.5 * a * K * theta * theta
    sign = 1.0 if j == 1 else -1.0
    c2 = theta + 0.5 * beta * beta
    return 0.5 * K * c2 * c2 * (1.0 + sign * beta / kp.lam) - 0.25 * a * K * theta * theta


def h_star_2d(j: int, phi, kp: KineticParams):
    """Potential ``h_j*`` on D2Q5.

    ``h0* = a K theta^2 / 2`` and, for the moving velocities, a quarter of
    ``p - h0*`` plus the share ``p (v_j . u) / (2 lambda^2)`` of the flux.
    """
    theta, u, v = (np.asarray(x, dtype=float) for x in phi)
    K = kp.K
    h0 = 0.5 * kp.a * K * theta * theta
    if j == 0:
        return h0
    c2 = theta + 0.5 * (u * u + v * v)
    p = K * c2 * c2
    cx, cy = DIRECTIONS[2][j]
    return 0.25 * (p - h0) + p * (cx * u + cy * v) / (2.0 * kp.lam)


def h_star(j, phi, kp, dim):
    return (h_star_1d if dim == 1 else h_star_2d)(j, phi, kp)


def _h_star_derivatives(j, phi, kp, dim):
    """Value, gradient and Hessian of ``h_j*`` over the full entropy vector.

    ``phi`` has shape ``(1 + dim, N)``; gradient ``(1 + dim, N)``; Hessian
    ``(N, 1 + dim, 1 + dim)``.
    """
    K, a, lam = kp.K, kp.a, kp.lam
    m = 1 + dim
    theta, beta = phi[0], phi[1:]
    n = phi.shape[1]

    e0 = np.zeros((m, n))
    e0[0] = 1.0
    h0 = 0.5 * a * K * theta * theta
    dh0 = e0 * (a * K * theta)
    Hh0 = np.zeros((n, m, m))
    Hh0[:, 0, 0] = a * K
    if j == 0:
        return h0, dh0, Hh0

    c2 = theta + 0.5 * np.sum(beta * beta, axis=0)
    p = K * c2 * c2
    w = np.vstack([np.ones(n), beta])  # (1, beta)
    dp = 2.0 * K * c2 * w
    Hp = 2.0 * K * np.einsum("in,jn->nij", w, w)
    for k in range(1, m):
        Hp[:, k, k] += 2.0 * K * c2

    e = DIRECTIONS[dim][j]
    b = e @ beta
    db = np.zeros((m, n))
    db[1:] = e[:, None]
    share = 1.0 / (2 * dim)
    val = share * (p - h0) + p * b / (2.0 * lam)
    grad = share * (dp - dh0) + (b * dp + p * db) / (2.0 * lam)
    cross = np.einsum("in,jn->nij", dp, db)
    hess = share * (Hp - Hh0) + (b[:, None, None] * Hp + cross + cross.transpose(0, 2, 1)) / (2.0 * lam)
    return val, grad, hess


# --------------------------------------------------------------------------
# equilibria


def _k_theta(rho, speed2, K):
    # K theta = K c^2 - K |u|^2 / 2 with K c^2 = rho / 2
    return 0.5 * rho - 0.5 * K * speed2


def equilibrium_1d(state: MacroState1D, kp: KineticParams) -> Equilibrium1D:
    """Closed-form D1Q3Q2 equilibrium (gradients of :func:`h_star_1d`)."""
    rho = np.asarray(state[0], dtype=float)
    q = np.asarray(state[1], dtype=float)
    p = pressure(rho, kp.phys)
    u = q / rho
    lam = kp.lam
    akt = kp.a * _k_theta(rho, u * u, kp.K)
    half = 0.5 * rho
    f_eq = np.stack([akt, half * (1.0 + u / lam) - 0.5 * akt, half * (1.0 - u / lam) - 0.5 * akt])
    g_eq = np.stack([
        0.5 * q * (1.0 + u / lam) + p / (2.0 * lam),
        0.5 * q * (1.0 - u / lam) - p / (2.0 * lam),
    ])
    return Equilibrium1D(f_eq, g_eq)


def equilibrium_2d(state: MacroState2D, kp: KineticParams) -> Equilibrium2D:
    """Closed-form D2Q5Q4Q4 equilibrium (gradients of :func:`h_star_2d`)."""
    rho = np.asarray(state[0], dtype=float)
    qx = np.asarray(state[1], dtype=float)
    qy = np.asarray(state[2], dtype=float)
    p = pressure(rho, kp.phys)
    u = qx / rho
    v = qy / rho
    lam2 = 2.0 * kp.lam
    akt = kp.a * _k_theta(rho, u * u + v * v, kp.K)
    base = 0.25 * (rho - akt)
    f_eq = np.stack([akt, base + qx / lam2, base + qy / lam2, base - qx / lam2, base - qy / lam2])
    fxx = qx * u + p
    fyy = qy * v + p
    fxy = qx * v
    gx_eq = np.stack([0.25 * qx + fxx / lam2, 0.25 * qx + fxy / lam2,
                      0.25 * qx - fxx / lam2, 0.25 * qx - fxy / lam2])
    gy_eq = np.stack([0.25 * qy + fxy / lam2, 0.25 * qy + fyy / lam2,
                      0.25 * qy - fxy / lam2, 0.25 * qy - fyy / lam2])
    return Equilibrium2D(f_eq, gx_eq, gy_eq)


# --------------------------------------------------------------------------
# convexity


def fd_hessian(fun, x, h=1e-5):
    """Central finite-difference Hessian of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    m = x.size
    steps = h * (np.abs(x) + 1.0)
    H = np.empty((m, m))
    for i in range(m):
        for k in range(i, m):
            ei = np.zeros(m)
            ek = np.zeros(m)
            ei[i] = steps[i]
            ek[k] = steps[k]
            val = (fun(x + ei + ek) - fun(x + ei - ek) - fun(x - ei + ek) + fun(x - ei - ek)) / (
                4.0 * steps[i] * steps[k]
            )
            H[i, k] = H[k, i] = val
    return H


def hessian_convexity_check(phi, kp: KineticParams, dim: int, h=1e-5, rtol=1e-5) -> ConvexityReport:
    """Check that every ``h_j*`` has a positive semidefinite Hessian at ``phi``.

    Hessians come from central differences, so eigenvalues down to
    ``-rtol * max|eig|`` count as zero.
    """
    x = np.asarray(phi, dtype=float).ravel()
    eigs = []
    convex = True
    worst = np.inf
    for j in range(2 * dim + 1):
        H = fd_hessian(lambda y, j=j: float(h_star(j, y, kp, dim)), x, h)
        ev = np.linalg.eigvalsh(H)
        eigs.append(ev)
        worst = min(worst, ev[0])
        scale = max(np.max(np.abs(ev)), kp.K)
        if ev[0] < -rtol * scale:
            convex = False
    return ConvexityReport(convex, float(worst), eigs)


# --------------------------------------------------------------------------
# Legendre duals and microscopic entropy


def _reduced(j, dim):
    # rest potential depends on theta only
    return (0,) if j == 0 else tuple(range(dim + 1))


def legendre_batch(j, pops, kp: KineticParams, dim, phi0, tol=1e-10, max_iter=100):
    """Vectorized damped Newton for ``h_j(f) = sup_phi (phi . f - h_j*(phi))``.

    Parameters
    ----------
    j : int
        Velocity index.
    pops : ndarray, shape (m, N)
        Populations of velocity ``j`` in each family, ``m = 1`` for the rest
        velocity and ``1 + dim`` otherwise.
    phi0 : ndarray, shape (m, N)
        Starting entropy variables, usually those of the local macro state.

    Returns
    -------
    value, phi, converged : ndarray
        Dual value, maximizer and convergence flag per node.
    """
    idx = _reduced(j, dim)
    pops = np.atleast_2d(np.asarray(pops, dtype=float))
    phi = np.array(np.atleast_2d(phi0), dtype=float)
    m, n = pops.shape
    full = np.zeros((dim + 1, n))

    def derivs(ph):
        full[:] = 0.0
        full[list(idx)] = ph
        val, grad, hess = _h_star_derivatives(j, full, kp, dim)
        sel = np.ix_(range(n), idx, idx)
        return val, grad[list(idx)], hess[sel]

    def objective(ph):
        full[:] = 0.0
        full[list(idx)] = ph
        return np.sum(ph * pops, axis=0) - h_star(j, full, kp, dim)

    scale = 1.0 + np.linalg.norm(pops, axis=0)
    converged = np.zeros(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        val, grad, hess = derivs(phi)
        resid = pops - grad
        rnorm = np.linalg.norm(resid, axis=0)
        converged = (rnorm <= tol * scale) & ~failed
        active = ~converged & ~failed & np.isfinite(rnorm)
        failed |= ~np.isfinite(rnorm)
        if not active.any():
            break
        step = np.zeros_like(phi)
        try:
            step[:, active] = np.linalg.solve(hess[active], resid[:, active].T[..., None])[..., 0].T
        except np.linalg.LinAlgError:
            for k in np.flatnonzero(active):
                try:
                    step[:, k] = np.linalg.solve(hess[k], resid[:, k])
                except np.linalg.LinAlgError:
                    failed[k] = True
        slope = np.sum(step * resid, axis=0)
        # outside the convex region the Newton direction is not an ascent direction
        failed |= active & ~(slope > 0)
        active &= ~failed
        if not active.any():
            continue
        g0 = objective(phi)
        t = np.ones(n)
        # near the optimum the gain drops below round-off; take full steps there
        pending = active & (rnorm > 1e-6 * scale)
        for _ in range(40):
            if not pending.any():
                break
            trial = objective(phi + t * step)
            ok = trial >= g0 + 1e-4 * t * slope
            pending &= ~ok
            t = np.where(pending, 0.5 * t, t)
        phi = np.where(active, phi + t * step, phi)
    value = objective(phi)
    return value, phi, converged


def legendre_value(j: int, pops, kp: KineticParams, dim: int, phi0=None) -> LegendreResult:
    """Legendre dual ``h_j`` of one potential at one node.

    ``pops`` holds the populations of velocity ``j`` in each family:
    ``(f_0,)`` for the rest velocity, ``(f_j, g_j)`` in 1D and
    ``(f_j, gx_j, gy_j)`` in 2D.  ``phi0`` is the Newton starting point in the
    same reduced layout; by default the entropy variables of a state built
    from the populations themselves.
    """
    idx = _reduced(j, dim)
    pops = np.asarray(pops, dtype=float).reshape(len(idx), 1)
    if phi0 is None:
        phi0 = np.zeros((len(idx), 1))
        phi0[0] = max(float(pops[0, 0]), 1e-3) / kp.K
    phi0 = np.asarray(phi0, dtype=float).reshape(len(idx), 1)
    value, phi, ok = legendre_batch(j, pops, kp, dim, phi0)
    if not ok[0]:
        raise LegendreError(f"Newton iteration for h_{j} did not converge", phi[:, 0])
    return LegendreResult(float(value[0]), phi[:, 0])


def microscopic_entropy_total(populations, kp: KineticParams) -> EntropyTotal:
    """Microscopic entropy ``H = sum over nodes and velocities of h_j(f_j)``.

    ``populations`` is ``(f, g)`` in 1D or ``(f, gx, gy)`` in 2D with the
    velocity index first.  Nodes where the Newton solve fails are left out of
    the sum and counted in ``n_failed``.
    """
    dim = len(populations) - 1
    f = np.asarray(populations[0], dtype=float).reshape(2 * dim + 1, -1)
    gs = [np.asarray(g, dtype=float).reshape(2 * dim, -1) for g in populations[1:]]
    rho = f.sum(axis=0)
    moms = [g.sum(axis=0) for g in gs]
    bad = ~(rho > 0)
    safe_rho = np.where(bad, 1.0, rho)
    phi_node = entropy_vars((safe_rho,) + tuple(np.where(bad, 0.0, m) for m in moms), kp.phys)
    guess = np.vstack([phi_node.theta, *phi_node.beta])

    values = []
    failed = bad.copy()
    for j in range(2 * dim + 1):
        if j == 0:
            pops, phi0 = f[:1], guess[:1]
        else:
            pops, phi0 = np.vstack([f[j]] + [g[j - 1] for g in gs]), guess
        value, _, ok = legendre_batch(j, pops, kp, dim, phi0)
        values.append(value)
        failed |= ~ok
    per_node = np.sum(values, axis=0)
    return EntropyTotal(float(np.sum(per_node[~failed])), int(failed.sum()))
