"""D2Q5Q4Q4 vectorial lattice Boltzmann scheme for 2D shallow water.

Populations are stored velocity-first: ``f`` has shape ``(5, nx, ny)`` on
velocities ``(0, +x, +y, -x, -y)`` and ``gx``, ``gy`` have shape
``(4, nx, ny)`` on the four moving velocities.  Index ``i`` runs along x and
``j`` along y; cell ``(i, j)`` is centred at ``(x0 + (i + 1/2) dx, y0 + (j + 1/2) dx)``.

Walls sit on cell faces (half-way bounce-back).  ``f`` bounces back
unchanged; the momentum family aligned with the wall normal bounces back
with a sign change and the tangential family unchanged, which makes the wall
impermeable and free-slip.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .boundaries import Dirichlet, Outflow, Periodic, Sides2D, Wall
from .entropy_kinetics import KineticParams, equilibrium_2d
from .lbm1d import BlowUpError, _check_density, _partition, _run_chunks, relaxation_rates
from .sw_core import pressure

# moving velocity k (1..4) -> (cx, cy) and its opposite
VELOCITIES = {1: (1, 0), 2: (0, 1), 3: (-1, 0), 4: (0, -1)}
OPPOSITE = {1: 3, 2: 4, 3: 1, 4: 2}
N_NONCONSERVED = 10

__all__ = [
    "BlowUpError",
    "Grid2D",
    "Lattice2D",
    "Moments2D",
    "Trajectory2D",
    "boundary_mass_flux",
    "collide_2d",
    "moments_from_populations_2d",
    "populations_from_moments_2d",
    "run_2d",
    "stream_2d",
]


@dataclass(frozen=True, eq=False)
class Grid2D:
    nx: int
    ny: int
    dx: float
    lam: float
    x0: float = 0.0
    y0: float = 0.0
    solid: np.ndarray | None = None

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 cells per direction")
        if not (self.dx > 0 and self.lam > 0):
            raise ValueError("dx and lam must be positive")
        if self.solid is not None and np.shape(self.solid) != (self.nx, self.ny):
            raise ValueError("solid mask shape must be (nx, ny)")

    @property
    def dy(self):
        return self.dx

    @property
    def dt(self):
        return self.dx / self.lam

    @property
    def mask(self):
        return np.zeros((self.nx, self.ny), bool) if self.solid is None else np.asarray(self.solid, bool)

    @property
    def x(self):
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self):
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dx

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")


class Moments2D(NamedTuple):
    rho: np.ndarray
    jx_rho: np.ndarray
    jy_rho: np.ndarray
    eps_rho: np.ndarray
    xx_rho: np.ndarray
    qx: np.ndarray
    fxx: np.ndarray
    fxy: np.ndarray
    xx_u: np.ndarray
    qy: np.ndarray
    fyx: np.ndarray
    fyy: np.ndarray
    xx_v: np.ndarray


def moments_from_populations_2d(f, gx, gy, lam) -> Moments2D:
    f0, f1, f2, f3, f4 = f
    a1, a2, a3, a4 = gx
    b1, b2, b3, b4 = gy
    return Moments2D(
        f0 + f1 + f2 + f3 + f4, lam * (f1 - f3), lam * (f2 - f4), f1 + f2 + f3 + f4 - 4.0 * f0, f1 - f2 + f3 - f4,
        a1 + a2 + a3 + a4, lam * (a1 - a3), lam * (a2 - a4), a1 - a2 + a3 - a4,
        b1 + b2 + b3 + b4, lam * (b1 - b3), lam * (b2 - b4), b1 - b2 + b3 - b4,
    )


def _g_from_moments(q, first, second, xx, lam, out):
    even = 0.5 * (q + xx)
    odd = 0.5 * (q - xx)
    out[0] = 0.5 * (even + first / lam)
    out[2] = 0.5 * (even - first / lam)
    out[1] = 0.5 * (odd + second / lam)
    out[3] = 0.5 * (odd - second / lam)


def _f_from_moments(rho, jx, jy, eps, xx, lam, out):
    out[0] = 0.2 * (rho - eps)
    rest = rho - out[0]
    even = 0.5 * (rest + xx)
    odd = 0.5 * (rest - xx)
    out[1] = 0.5 * (even + jx / lam)
    out[3] = 0.5 * (even - jx / lam)
    out[2] = 0.5 * (odd + jy / lam)
    out[4] = 0.5 * (odd - jy / lam)


def populations_from_moments_2d(m: Moments2D, lam):
    shape = np.shape(m.rho)
    f = np.empty((5,) + shape)
    gx = np.empty((4,) + shape)
    gy = np.empty((4,) + shape)
    _f_from_moments(m.rho, m.jx_rho, m.jy_rho, m.eps_rho, m.xx_rho, lam, f)
    _g_from_moments(m.qx, m.fxx, m.fxy, m.xx_u, lam, gx)
    _g_from_moments(m.qy, m.fyx, m.fyy, m.xx_v, lam, gy)
    return f, gx, gy


def _collide_block(f, gx, gy, kp, rates, fo, gxo, gyo):
    lam = kp.lam
    m = moments_from_populations_2d(f, gx, gy, lam)
    rho, qx, qy = m.rho, m.qx, m.qy
    u = qx / rho
    v = qy / rho
    p = pressure(rho, kp.phys)
    akt = kp.a * (0.5 * rho - 0.5 * kp.K * (u * u + v * v))
    ruv = qx * v
    s = rates
    jx = m.jx_rho + s[0] * (qx - m.jx_rho)
    jy = m.jy_rho + s[1] * (qy - m.jy_rho)
    eps = m.eps_rho + s[2] * (rho - 5.0 * akt - m.eps_rho)
    xx = m.xx_rho - s[3] * m.xx_rho
    fxx = m.fxx + s[4] * (qx * u + p - m.fxx)
    fxy = m.fxy + s[5] * (ruv - m.fxy)
    xxu = m.xx_u - s[6] * m.xx_u
    fyx = m.fyx + s[7] * (ruv - m.fyx)
    fyy = m.fyy + s[8] * (qy * v + p - m.fyy)
    xxv = m.xx_v - s[9] * m.xx_v
    _f_from_moments(rho, jx, jy, eps, xx, lam, fo)
    _g_from_moments(qx, fxx, fxy, xxu, lam, gxo)
    _g_from_moments(qy, fyx, fyy, xxv, lam, gyo)


def collide_2d(f, gx, gy, kp: KineticParams, s, out=None, step=None, workers=1, skip=None):
    """MRT relaxation of the 10 non-conserved moments in every cell.

    Rates are ordered ``(Jx, Jy, eps, XX_rho, fxx, fxy, XX_u, fyx, fyy, XX_v)``;
    a scalar applies to all of them.  Cells flagged in ``skip`` (obstacles)
    are not checked for positivity.  Work is split along x for ``workers > 1``.
    """
    rates = relaxation_rates(s, N_NONCONSERVED)
    if out is None:
        out = (np.empty_like(f), np.empty_like(gx), np.empty_like(gy))
    fo, gxo, gyo = out

    def work(sl):
        rho = f[0, sl] + f[1, sl] + f[2, sl] + f[3, sl] + f[4, sl]
        check = rho if skip is None else np.where(skip[sl], 1.0, rho)
        _check_density(check, step, sl.start)
        _collide_block(f[:, sl], gx[:, sl], gy[:, sl], kp, rates, fo[:, sl], gxo[:, sl], gyo[:, sl])

    _run_chunks(work, _partition(f.shape[1], workers))
    return fo, gxo, gyo


# --------------------------------------------------------------------------
# streaming


class Lattice2D:
    """Grid, obstacles and boundary sides with everything streaming needs precomputed."""

    def __init__(self, grid: Grid2D, sides: Sides2D, kp: KineticParams):
        if not math.isclose(grid.lam, kp.lam, rel_tol=1e-14):
            raise ValueError("grid and kinetic parameters disagree on lambda")
        self.grid = grid
        self.sides = sides
        self.kp = kp
        self.solid = grid.mask
        self.fluid = ~self.solid
        nx, ny = grid.nx, grid.ny
        s = self.solid
        # fluid cells whose upstream neighbour along velocity k is an obstacle
        self.from_solid = {}
        for k, (cx, cy) in VELOCITIES.items():
            up = np.zeros((nx, ny), bool)
            src = s[max(0, -cx): nx - max(0, cx), max(0, -cy): ny - max(0, cy)]
            up[max(0, cx): nx - max(0, -cx), max(0, cy): ny - max(0, -cy)] = src
            self.from_solid[k] = up & self.fluid
        rest = equilibrium_2d((kp.phys.rho0, 0.0, 0.0), kp)
        self.rest = (rest.f_eq, rest.gx_eq, rest.gy_eq)
        # incoming equilibria for Dirichlet sides
        self.ghost = {}
        for k, name, n in ((1, "left", ny), (2, "bottom", nx), (3, "right", ny), (4, "top", nx)):
            side = getattr(sides, name)
            if isinstance(side, Dirichlet):
                rho, u, v = side.primitive(n)
                eq = equilibrium_2d((rho, rho * u, rho * v), kp)
                self.ghost[k] = (eq.f_eq[k], eq.gx_eq[k - 1], eq.gy_eq[k - 1])

    @property
    def side_of(self):
        return {1: self.sides.left, 2: self.sides.bottom, 3: self.sides.right, 4: self.sides.top}

    def initial_field(self, rho, qx, qy):
        shape = (self.grid.nx, self.grid.ny)
        rho = np.where(self.solid, self.kp.phys.rho0, np.broadcast_to(rho, shape))
        qx = np.where(self.solid, 0.0, np.broadcast_to(qx, shape))
        qy = np.where(self.solid, 0.0, np.broadcast_to(qy, shape))
        eq = equilibrium_2d((rho, qx, qy), self.kp)
        return eq.f_eq.copy(), eq.gx_eq.copy(), eq.gy_eq.copy()


def _edge(k):
    """Index of the cell layer receiving populations of velocity k from outside."""
    return {1: (0, slice(None)), 2: (slice(None), 0), 3: (-1, slice(None)), 4: (slice(None), -1)}[k]


def _shift(src, dst, k):
    if k == 1:
        dst[1:, :] = src[:-1, :]
    elif k == 2:
        dst[:, 1:] = src[:, :-1]
    elif k == 3:
        dst[:-1, :] = src[1:, :]
    else:
        dst[:, :-1] = src[:, 1:]


def stream_2d(f, gx, gy, lattice: Lattice2D, out=None):
    """Streaming with periodic, Dirichlet, outflow and wall sides plus obstacles."""
    if out is None:
        out = (np.empty_like(f), np.empty_like(gx), np.empty_like(gy))
    fo, gxo, gyo = out
    fo[0] = f[0]
    for k, (cx, cy) in VELOCITIES.items():
        o = OPPOSITE[k]
        # sign of the momentum families under bounce-back: normal one flips
        sx, sy = (-1.0, 1.0) if cx else (1.0, -1.0)
        _shift(f[k], fo[k], k)
        _shift(gx[k - 1], gxo[k - 1], k)
        _shift(gy[k - 1], gyo[k - 1], k)

        edge = _edge(k)
        side = lattice.side_of[k]
        if isinstance(side, Periodic):
            wrap = _edge(o)
            fo[k][edge] = f[k][wrap]
            gxo[k - 1][edge] = gx[k - 1][wrap]
            gyo[k - 1][edge] = gy[k - 1][wrap]
        elif isinstance(side, Dirichlet):
            gf, ggx, ggy = lattice.ghost[k]
            fo[k][edge] = gf
            gxo[k - 1][edge] = ggx
            gyo[k - 1][edge] = ggy
        elif isinstance(side, Outflow):
            fo[k][edge] = f[k][edge]
            gxo[k - 1][edge] = gx[k - 1][edge]
            gyo[k - 1][edge] = gy[k - 1][edge]
        elif isinstance(side, Wall):
            fo[k][edge] = f[o][edge]
            gxo[k - 1][edge] = sx * gx[o - 1][edge]
            gyo[k - 1][edge] = sy * gy[o - 1][edge]
        else:
            raise TypeError(f"unknown boundary {side!r}")

        m = lattice.from_solid[k]
        if m.any():
            fo[k][m] = f[o][m]
            gxo[k - 1][m] = sx * gx[o - 1][m]
            gyo[k - 1][m] = sy * gy[o - 1][m]

    if lattice.solid.any():
        s = lattice.solid
        for arr, rest in zip((fo, gxo, gyo), lattice.rest):
            arr[:, s] = rest[:, None]
    return fo, gxo, gyo


def boundary_mass_flux(f_post, lattice: Lattice2D):
    """Net mass entering the fluid through open sides in the next stream.

    ``f_post`` is the post-collision ``f``.  Walls and periodic sides
    contribute nothing; Dirichlet sides inject their ghost equilibria and
    outflow sides re-inject the cell's own population.
    """
    net = 0.0
    fluid = lattice.fluid
    for k in VELOCITIES:
        side = lattice.side_of[k]
        if not isinstance(side, (Dirichlet, Outflow)):
            continue
        edge = _edge(k)
        live = fluid[edge]
        incoming = lattice.ghost[k][0] if isinstance(side, Dirichlet) else f_post[k][edge]
        net += float(np.sum(np.broadcast_to(incoming, live.shape)[live]))
    for k in VELOCITIES:
        # populations leaving through the far side of velocity k
        side = lattice.side_of[OPPOSITE[k]]
        if not isinstance(side, (Dirichlet, Outflow)):
            continue
        edge = _edge(OPPOSITE[k])
        net -= float(np.sum(f_post[k][edge][fluid[edge]]))
    return net


# --------------------------------------------------------------------------
# time loop


@dataclass
class Trajectory2D:
    lattice: Lattice2D
    steps: list = field(default_factory=list)
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (rho, qx, qy)
    mass: list = field(default_factory=list)
    momentum: list = field(default_factory=list)
    min_rho: float = math.inf
    max_speed_ratio: float = 0.0
    change_per_step: list = field(default_factory=list)
    steady: bool = False
    final: tuple | None = None

    @property
    def n_steps(self):
        return self.steps[-1] if self.steps else 0

    def mass_drift(self):
        m = np.asarray(self.mass)
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))


def run_2d(
    rho,
    qx,
    qy,
    lattice: Lattice2D,
    s=1.8,
    *,
    t_end=None,
    n_steps=None,
    output_every=0,
    steady_tol=None,
    workers=1,
) -> Trajectory2D:
    """Run the D2Q5Q4Q4 scheme from equilibrium populations.

    Snapshots of ``(rho, qx, qy)`` are taken at step 0, every
    ``output_every`` steps and at the last step.  With ``steady_tol`` the run
    stops early once the mean absolute density change between two snapshots,
    divided by the steps separating them, falls below the tolerance.
    """
    grid = lattice.grid
    kp = lattice.kp
    if n_steps is None:
        if t_end is None:
            raise ValueError("give t_end or n_steps")
        n_steps = int(round(t_end / grid.dt))
    if steady_tol is not None and not output_every:
        raise ValueError("steady detection needs output_every")
    fluid = lattice.fluid
    f, gx, gy = lattice.initial_field(rho, qx, qy)
    _check_density(np.where(fluid, f.sum(axis=0), 1.0), 0)
    buf_c = tuple(np.empty_like(a) for a in (f, gx, gy))
    buf_s = tuple(np.empty_like(a) for a in (f, gx, gy))
    traj = Trajectory2D(lattice)
    c_fac = kp.phys.gamma * kp.phys.kappa
    warned = False

    def record(step, f, gx, gy, force=False):
        nonlocal warned
        r = f.sum(axis=0)
        mx = gx.sum(axis=0)
        my = gy.sum(axis=0)
        rf = r[fluid]
        traj.mass.append(float(np.sum(rf)))
        traj.momentum.append((float(np.sum(mx[fluid])), float(np.sum(my[fluid]))))
        traj.min_rho = min(traj.min_rho, float(np.min(rf)))
        if force or step == 0 or (output_every and step % output_every == 0):
            speed = np.max(np.hypot(mx[fluid], my[fluid]) / rf + np.sqrt(c_fac * rf ** (kp.phys.gamma - 1)))
            traj.max_speed_ratio = max(traj.max_speed_ratio, float(speed / kp.lam))
            if speed > 0.9 * kp.lam and not warned:
                warnings.warn(f"max(|u|+c) = {speed:.3g} exceeds 0.9*lambda", RuntimeWarning, stacklevel=3)
                warned = True
            snap = (np.where(fluid, r, 0.0), np.where(fluid, mx, 0.0), np.where(fluid, my, 0.0))
            if traj.snapshots and step > traj.steps[-1]:
                prev = traj.snapshots[-1][0]
                change = float(np.mean(np.abs(snap[0][fluid] - prev[fluid]))) / (step - traj.steps[-1])
                traj.change_per_step.append(change)
            traj.steps.append(step)
            traj.times.append(step * grid.dt)
            traj.snapshots.append(snap)
            return True
        return False

    record(0, f, gx, gy)
    step = 0
    for step in range(1, n_steps + 1):
        fc = collide_2d(f, gx, gy, kp, s, out=buf_c, step=step, workers=workers, skip=lattice.solid)
        new = stream_2d(*fc, lattice, out=buf_s)
        _check_density(np.where(fluid, new[0].sum(axis=0), 1.0), step)
        took = record(step, *new, force=step == n_steps)
        buf_s, (f, gx, gy) = (f, gx, gy), new
        if took and steady_tol is not None and traj.change_per_step and traj.change_per_step[-1] < steady_tol:
            traj.steady = True
            break
    if traj.steps[-1] != step:
        record(step, f, gx, gy, force=True)
    traj.final = (f.copy(), gx.copy(), gy.copy())
    return traj
