"""Exact Riemann solver for the shallow water system with ``p = kappa rho^2``.

Across a rarefaction the Riemann invariant ``u +/- 2c`` is constant
(``c^2 = 2 kappa rho``); across a shock the Hugoniot locus gives
``|u* - u_K| = (rho* - rho_K) sqrt(kappa (rho* + rho_K) / (rho* rho_K))``.
The star density solves ``f_L(rho*) + f_R(rho*) + u_R - u_L = 0`` by
bisection accelerated with Newton steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sw_core import PhysParams


class VacuumError(ValueError):
    """The two states separate fast enough to create a dry region."""


def _wave_function(rho, rho_k, kappa):
    """Velocity jump across the wave joining ``rho_k`` to ``rho`` (vectorized)."""
    shock = (rho - rho_k) * np.sqrt(kappa * (rho + rho_k) / (rho * rho_k))
    rare = 2.0 * (np.sqrt(2.0 * kappa * rho) - np.sqrt(2.0 * kappa * rho_k))
    return np.where(rho > rho_k, shock, rare)


def _wave_derivative(rho, rho_k, kappa):
    g = np.sqrt(kappa * (rho + rho_k) / (rho * rho_k))
    shock = g - (rho - rho_k) * kappa / (2.0 * g * rho * rho)
    rare = np.sqrt(2.0 * kappa / rho)
    return np.where(rho > rho_k, shock, rare)


def star_density(rho_l, u_l, rho_r, u_r, kappa, tol=1e-12):
    """Safeguarded root search for the star density; works elementwise on arrays.

    The star function is increasing in the density, so a bisection bracket
    is kept at all times; Newton steps are taken when they stay inside it,
    otherwise the bracket is halved.  Iteration stops once the bracket or
    the last step is below ``tol`` relative to ``max(rho, 1)``.
    """
    rho_l, u_l, rho_r, u_r = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho_l, u_l, rho_r, u_r)))
    shape = rho_l.shape
    rho_l, u_l, rho_r, u_r = (a.ravel() for a in (rho_l, u_l, rho_r, u_r))
    du = u_r - u_l

    def fun(r, idx):
        return _wave_function(r, rho_l[idx], kappa) + _wave_function(r, rho_r[idx], kappa) + du[idx]

    def dfun(r, idx):
        return _wave_derivative(r, rho_l[idx], kappa) + _wave_derivative(r, rho_r[idx], kappa)

    every = np.arange(rho_l.size)
    lo = np.full(rho_l.size, 1e-8)
    hi = 10.0 * np.maximum(rho_l, rho_r)
    # widen the bracket in rare strong-shock cases
    f_hi = fun(hi, every)
    while np.any(f_hi < 0):
        hi = np.where(f_hi < 0, 4.0 * hi, hi)
        f_hi = fun(hi, every)

    # start from the two-rarefaction estimate, exact when no shock forms
    c_est = 0.5 * (np.sqrt(2.0 * kappa * rho_l) + np.sqrt(2.0 * kappa * rho_r)) - 0.25 * du
    x = np.clip(c_est * c_est / (2.0 * kappa), lo, hi)
    active = every
    for _ in range(200):
        xa = x[active]
        fa = fun(xa, active)
        neg = fa < 0
        lo[active] = np.where(neg, xa, lo[active])
        hi[active] = np.where(neg, hi[active], xa)
        la, ha = lo[active], hi[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xa - fa / dfun(xa, active)
        ok = np.isfinite(newton) & (newton > la) & (newton < ha)
        xn = np.where(ok, newton, 0.5 * (la + ha))
        x[active] = xn
        scale = tol * np.maximum(xn, 1.0)
        done = (np.abs(xn - xa) <= scale) | (ha - la <= scale) | (fa == 0)
        x[active[fa == 0]] = xa[fa == 0]
        active = active[~done]
        if not active.size:
            break
    return x.reshape(shape)


def check_vacuum(rho_l, u_l, rho_r, u_r, kappa):
    c_l = np.sqrt(2.0 * kappa * np.asarray(rho_l, dtype=float))
    c_r = np.sqrt(2.0 * kappa * np.asarray(rho_r, dtype=float))
    if np.any(2.0 * (c_l + c_r) <= np.asarray(u_r) - np.asarray(u_l)):
        raise VacuumError("initial data create a vacuum")


@dataclass(frozen=True)
class RiemannSolution:
    """Self-similar solution of one Riemann problem.

    ``left_wave`` and ``right_wave`` are ``"shock"`` or ``"rarefaction"``.
    ``left_speeds``/``right_speeds`` hold ``(head, tail)`` of a rarefaction
    or ``(s, s)`` for a shock.
    """

    rho_l: float
    u_l: float
    rho_r: float
    u_r: float
    rho_star: float
    u_star: float
    kappa: float
    left_wave: str
    right_wave: str
    left_speeds: tuple
    right_speeds: tuple

    def sample(self, xi):
        """Density and velocity at ``xi = (x - x_diaphragm) / t``."""
        xi = np.asarray(xi, dtype=float)
        rho = np.empty(xi.shape)
        u = np.empty(xi.shape)
        kap = self.kappa
        third = 1.0 / 3.0

        left = xi < self.u_star
        # left side of the contact-free middle
        if self.left_wave == "shock":
            outer = left & (xi < self.left_speeds[0])
            fan = np.zeros_like(left)
        else:
            head, tail = self.left_speeds
            outer = left & (xi <= head)
            fan = left & (xi > head) & (xi < tail)
        star = left & ~outer & ~fan
        rho[outer], u[outer] = self.rho_l, self.u_l
        rho[star], u[star] = self.rho_star, self.u_star
        if fan.any():
            # u + 2c constant and u - c = xi inside the fan
            r_inv = self.u_l + 2.0 * np.sqrt(2.0 * kap * self.rho_l)
            c = third * (r_inv - xi[fan])
            rho[fan], u[fan] = c * c / (2.0 * kap), xi[fan] + c

        right = ~left
        if self.right_wave == "shock":
            outer = right & (xi > self.right_speeds[0])
            fan = np.zeros_like(right)
        else:
            tail, head = self.right_speeds
            outer = right & (xi >= head)
            fan = right & (xi > tail) & (xi < head)
        star = right & ~outer & ~fan
        rho[outer], u[outer] = self.rho_r, self.u_r
        rho[star], u[star] = self.rho_star, self.u_star
        if fan.any():
            r_inv = self.u_r - 2.0 * np.sqrt(2.0 * kap * self.rho_r)
            c = third * (xi[fan] - r_inv)
            rho[fan], u[fan] = c * c / (2.0 * kap), xi[fan] - c
        return rho, u

    @property
    def shock_speeds(self):
        out = []
        if self.left_wave == "shock":
            out.append(self.left_speeds[0])
        if self.right_wave == "shock":
            out.append(self.right_speeds[0])
        return out


def _shock_speed(rho_k, u_k, rho_s, u_s):
    if rho_s == rho_k:
        return u_k
    return (rho_s * u_s - rho_k * u_k) / (rho_s - rho_k)


def exact_riemann(left, right, params: PhysParams = PhysParams(), tol=1e-12) -> RiemannSolution:
    """Solve the Riemann problem between primitive states ``(rho, u)``."""
    params.require_gamma2()
    rho_l, u_l = (float(v) for v in left)
    rho_r, u_r = (float(v) for v in right)
    if not (rho_l > 0 and rho_r > 0):
        raise ValueError("densities must be positive")
    kap = params.kappa
    check_vacuum(rho_l, u_l, rho_r, u_r, kap)
    if rho_l == rho_r and u_l == u_r:
        rho_s = rho_l
    else:
        rho_s = float(star_density(rho_l, u_l, rho_r, u_r, kap, tol))
    u_s = 0.5 * (u_l + u_r) + 0.5 * float(
        _wave_function(rho_s, rho_r, kap) - _wave_function(rho_s, rho_l, kap)
    )
    c_s = np.sqrt(2.0 * kap * rho_s)

    if rho_s > rho_l:
        s = _shock_speed(rho_l, u_l, rho_s, u_s)
        lw, ls = "shock", (s, s)
    else:
        lw, ls = "rarefaction", (u_l - np.sqrt(2.0 * kap * rho_l), u_s - c_s)
    if rho_s > rho_r:
        s = _shock_speed(rho_r, u_r, rho_s, u_s)
        rw, rs = "shock", (s, s)
    else:
        rw, rs = "rarefaction", (u_s + c_s, u_r + np.sqrt(2.0 * kap * rho_r))
    return RiemannSolution(rho_l, u_l, rho_r, u_r, rho_s, u_s, kap, lw, rw,
                           tuple(float(v) for v in ls), tuple(float(v) for v in rs))


def interface_state(rho_l, u_l, rho_r, u_r, kappa):
    """Vectorized solution sampled at ``xi = 0`` (the Godunov state).

    Returns density, normal velocity and a boolean telling whether the
    interface sees the left side of the contact (for upwinding passive
    quantities).
    """
    rho_l, u_l, rho_r, u_r = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho_l, u_l, rho_r, u_r)))
    check_vacuum(rho_l, u_l, rho_r, u_r, kappa)
    same = (rho_l == rho_r) & (u_l == u_r)
    rho_s = np.where(same, rho_l, 0.0)
    diff = ~same
    if diff.any():
        rho_s[diff] = star_density(rho_l[diff], u_l[diff], rho_r[diff], u_r[diff], kappa)
    u_s = 0.5 * (u_l + u_r) + 0.5 * (_wave_function(rho_s, rho_r, kappa) - _wave_function(rho_s, rho_l, kappa))
    u_s = np.where(same, u_l, u_s)

    c_l = np.sqrt(2.0 * kappa * rho_l)
    c_r = np.sqrt(2.0 * kappa * rho_r)
    c_s = np.sqrt(2.0 * kappa * rho_s)
    rho = np.empty_like(rho_l)
    u = np.empty_like(rho_l)
    from_left = u_s >= 0.0

    # left of the contact
    with np.errstate(invalid="ignore", divide="ignore"):
        s_l = np.where(rho_s != rho_l, (rho_s * u_s - rho_l * u_l) / (rho_s - rho_l), u_l)
    l_shock = rho_s > rho_l
    l_outer = np.where(l_shock, s_l >= 0.0, u_l - c_l >= 0.0)
    l_fan = ~l_shock & (u_l - c_l < 0.0) & (u_s - c_s > 0.0)
    c_fan_l = (u_l + 2.0 * c_l) / 3.0

    with np.errstate(invalid="ignore", divide="ignore"):
        s_r = np.where(rho_s != rho_r, (rho_s * u_s - rho_r * u_r) / (rho_s - rho_r), u_r)
    r_shock = rho_s > rho_r
    r_outer = np.where(r_shock, s_r <= 0.0, u_r + c_r <= 0.0)
    r_fan = ~r_shock & (u_r + c_r > 0.0) & (u_s + c_s < 0.0)
    c_fan_r = (2.0 * c_r - u_r) / 3.0

    rho[:] = rho_s
    u[:] = u_s
    m = from_left & l_outer
    rho[m], u[m] = rho_l[m], u_l[m]
    m = from_left & ~l_outer & l_fan
    rho[m], u[m] = c_fan_l[m] ** 2 / (2.0 * kappa), c_fan_l[m]
    m = ~from_left & r_outer
    rho[m], u[m] = rho_r[m], u_r[m]
    m = ~from_left & ~r_outer & r_fan
    rho[m], u[m] = c_fan_r[m] ** 2 / (2.0 * kappa), -c_fan_r[m]
    return rho, u, from_left
