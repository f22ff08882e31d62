"""First-order Godunov finite volume schemes for shallow water.

Interface fluxes are the physical flux of the exact Riemann solution at
``x/t = 0``.  In 2D each face solves a Riemann problem in its normal
direction and advects the tangential velocity passively (upwinded with the
contact).  Obstacle faces and walls use mirror ghost states.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..boundaries import Dirichlet, Outflow, Periodic, Sides1D, Sides2D, Wall
from ..sw_core import PhysParams
from .riemann import interface_state


class PositivityError(RuntimeError):
    def __init__(self, cell, value):
        super().__init__(f"non-positive density {value!r} at cell {cell}")
        self.cell = cell


def _normal_flux(rho_l, un_l, ut_l, rho_r, un_r, ut_r, kappa):
    rho, un, from_left = interface_state(rho_l, un_l, rho_r, un_r, kappa)
    ut = np.where(from_left, ut_l, ut_r)
    mass = rho * un
    return mass, mass * un + kappa * rho * rho, mass * ut


def _ghost(side, inner, wrap, normal_index, swap=False):
    """Ghost primitive state for one side; ``inner`` is the adjacent cell layer.

    States are ordered (rho, normal velocity, tangential velocity); ``swap``
    reorders a Dirichlet ``(rho, u, v)`` for faces normal to y.
    """
    if isinstance(side, Periodic):
        return tuple(np.copy(w) for w in wrap)
    if isinstance(side, Dirichlet):
        n = None if np.ndim(inner[0]) == 0 else np.shape(inner[0])[0]
        state = side.primitive(n)
        return (state[0], state[2], state[1]) if swap else state
    if isinstance(side, Outflow):
        return tuple(np.copy(w) for w in inner)
    if isinstance(side, Wall):
        out = [np.copy(w) for w in inner]
        out[normal_index] = -out[normal_index]
        return tuple(out)
    raise TypeError(f"unknown boundary {side!r}")


def max_speed_1d(rho, q, params):
    return float(np.max(np.abs(q / rho) + np.sqrt(2.0 * params.kappa * rho)))


def godunov_fluxes_1d(rho, q, params: PhysParams, sides: Sides1D):
    u = q / rho
    left = _ghost(sides.left, (rho[0], u[0]), (rho[-1], u[-1]), 1)
    right = _ghost(sides.right, (rho[-1], u[-1]), (rho[0], u[0]), 1)
    r = np.concatenate([[left[0]], rho, [right[0]]])
    v = np.concatenate([[left[1]], u, [right[1]]])
    zero = np.zeros(r.size - 1)
    fm, fq, _ = _normal_flux(r[:-1], v[:-1], zero, r[1:], v[1:], zero, params.kappa)
    return fm, fq


def godunov_step(rho, q, dx, params: PhysParams = PhysParams(), cfl=0.45, sides=Sides1D(), dt=None):
    """Advance 1D cell averages by one step; returns ``(rho, q, dt)``."""
    params.require_gamma2()
    if not 0 < cfl <= 1:
        raise ValueError("cfl must lie in (0, 1]")
    if dt is None:
        dt = cfl * dx / max_speed_1d(rho, q, params)
    fm, fq = godunov_fluxes_1d(rho, q, params, sides)
    r = rho - dt / dx * np.diff(fm)
    m = q - dt / dx * np.diff(fq)
    bad = ~(r > 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise PositivityError(i, float(r[i]))
    return r, m, dt


def run_godunov_1d(rho, q, dx, t_end, params=PhysParams(), cfl=0.45, sides=Sides1D()):
    rho = np.array(rho, dtype=float)
    q = np.array(q, dtype=float)
    t = 0.0
    steps = 0
    while t < t_end * (1 - 1e-14):
        dt = min(cfl * dx / max_speed_1d(rho, q, params), t_end - t)
        rho, q, _ = godunov_step(rho, q, dx, params, cfl, sides, dt=dt)
        t += dt
        steps += 1
    return rho, q, steps


# --------------------------------------------------------------------------
# 2D


@dataclass
class GodunovResult2D:
    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray
    t: float
    steps: int
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


def _face_states(rho, u, v, solid, sides_lo, sides_hi, axis):
    """Left/right primitive states on faces normal to ``axis`` (0 = x, 1 = y).

    Arrays are moved so that ``axis`` is first; the returned states have
    shape ``(n_axis + 1, n_other)`` and are ordered (rho, normal, tangential).
    """
    if axis == 0:
        prim = (rho, u, v)
    else:
        prim = tuple(np.swapaxes(a, 0, 1) for a in (rho, v, u))
        solid = np.swapaxes(solid, 0, 1)
    swap = axis == 1
    lo = _ghost(sides_lo, tuple(a[0] for a in prim), tuple(a[-1] for a in prim), 1, swap)
    hi = _ghost(sides_hi, tuple(a[-1] for a in prim), tuple(a[0] for a in prim), 1, swap)
    n_other = prim[0].shape[1]
    padded = [np.vstack([np.broadcast_to(g_lo, (n_other,)), a, np.broadcast_to(g_hi, (n_other,))])
              for a, g_lo, g_hi in zip(prim, lo, hi)]
    L = [p[:-1].copy() for p in padded]
    R = [p[1:].copy() for p in padded]
    edge = np.zeros((1, n_other), dtype=bool)
    ps = np.vstack([edge, solid, edge])
    solid_l, solid_r = ps[:-1], ps[1:]
    # mirror the fluid neighbour into obstacle cells
    m = solid_l & ~solid_r
    L[0][m], L[1][m], L[2][m] = R[0][m], -R[1][m], R[2][m]
    m = solid_r & ~solid_l
    R[0][m], R[1][m], R[2][m] = L[0][m], -L[1][m], L[2][m]
    dead = solid_l & solid_r
    for k, a in enumerate(L + R):
        a[dead] = 1.0 if k % 3 == 0 else 0.0
    return L, R, dead


def godunov_fluxes_2d(rho, qx, qy, params, sides: Sides2D, solid):
    u = qx / rho
    v = qy / rho
    kap = params.kappa
    L, R, dead = _face_states(rho, u, v, solid, sides.left, sides.right, 0)
    fm, fn, ft = _normal_flux(L[0], L[1], L[2], R[0], R[1], R[2], kap)
    for a in (fm, fn, ft):
        a[dead] = 0.0
    fx = (fm, fn, ft)
    L, R, dead = _face_states(rho, u, v, solid, sides.bottom, sides.top, 1)
    gm, gn, gt = _normal_flux(L[0], L[1], L[2], R[0], R[1], R[2], kap)
    for a in (gm, gn, gt):
        a[dead] = 0.0
    # back to (x, y) layout; for y-faces normal momentum is qy and tangential is qx
    fy = (gm.T, gt.T, gn.T)
    return fx, fy


def stable_dt_2d(rho, qx, qy, dx, dy, params, cfl, solid):
    fluid = ~solid
    r = rho[fluid]
    speed = np.maximum(np.abs(qx[fluid] / r), np.abs(qy[fluid] / r)) + np.sqrt(2.0 * params.kappa * r)
    return cfl * min(dx, dy) / float(np.max(speed))


def godunov_step_2d(rho, qx, qy, dx, dy, params=PhysParams(), cfl=0.45, sides=Sides2D(), solid=None, dt=None):
    """One unsplit first-order Godunov step on a Cartesian grid; returns ``(rho, qx, qy, dt)``."""
    params.require_gamma2()
    if solid is None:
        solid = np.zeros(rho.shape, dtype=bool)
    fluid = ~solid
    r_safe = np.where(fluid, rho, 1.0)
    if dt is None:
        dt = stable_dt_2d(rho, qx, qy, dx, dy, params, cfl, solid)
    fx, fy = godunov_fluxes_2d(r_safe, np.where(fluid, qx, 0.0), np.where(fluid, qy, 0.0), params, sides, solid)
    out = []
    for U, Fx, Fy in zip((rho, qx, qy), fx, fy):
        upd = U - dt / dx * (Fx[1:] - Fx[:-1]) - dt / dy * (Fy[:, 1:] - Fy[:, :-1])
        out.append(np.where(fluid, upd, U))
    bad = fluid & ~(out[0] > 0)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise PositivityError(idx, float(out[0][idx]))
    return out[0], out[1], out[2], dt


def run_godunov_2d(rho, qx, qy, dx, dy, t_end, params=PhysParams(), cfl=0.45, sides=Sides2D(),
                   solid=None, output_times=()) -> GodunovResult2D:
    rho, qx, qy = (np.array(a, dtype=float) for a in (rho, qx, qy))
    if solid is None:
        solid = np.zeros(rho.shape, dtype=bool)
    t = 0.0
    steps = 0
    pending = sorted(output_times)
    res = GodunovResult2D(rho, qx, qy, 0.0, 0)
    while t < t_end * (1 - 1e-14):
        target = pending[0] if pending and pending[0] < t_end else t_end
        dt = min(stable_dt_2d(rho, qx, qy, dx, dy, params, cfl, solid), target - t)
        rho, qx, qy, dt = godunov_step_2d(rho, qx, qy, dx, dy, params, cfl, sides, solid, dt=dt)
        t += dt
        steps += 1
        if pending and abs(t - pending[0]) <= 1e-12 * max(1.0, t):
            res.times.append(t)
            res.snapshots.append((rho.copy(), qx.copy(), qy.copy()))
            pending.pop(0)
    res.rho, res.qx, res.qy = rho, qx, qy
    res.t = t
    res.steps = steps
    return res
