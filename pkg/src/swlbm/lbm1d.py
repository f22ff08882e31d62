"""D1Q3Q2 vectorial lattice Boltzmann scheme for 1D shallow water.

Two population families live on every cell: ``f`` (velocities ``0, +lam,
-lam``) carries the mass and ``g`` (velocities ``+lam, -lam``) carries the
momentum.  A time step is an MRT collision in moment space followed by
streaming.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .boundaries import Dirichlet, Outflow, Periodic, Sides1D, Wall
from .entropy_kinetics import KineticParams, equilibrium_1d, microscopic_entropy_total
from .sw_core import pressure


class BlowUpError(RuntimeError):
    """Non-positive or non-finite density during a run."""

    def __init__(self, step, cell, value):
        super().__init__(f"non-physical density {value!r} at cell {cell} in step {step}")
        self.step = step
        self.cell = cell
        self.value = value


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    dx: float
    lam: float
    x0: float = 0.0

    def __post_init__(self):
        if self.n_cells < 4:
            raise ValueError("need at least 4 cells")
        if not (self.dx > 0 and self.lam > 0):
            raise ValueError("dx and lam must be positive")

    @property
    def dt(self) -> float:
        return self.dx / self.lam

    @property
    def x(self) -> np.ndarray:
        return self.x0 + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.n_cells * self.dx


class Moments1D(NamedTuple):
    rho: np.ndarray
    j_rho: np.ndarray
    eps_rho: np.ndarray
    q: np.ndarray
    j_q: np.ndarray


def relaxation_rates(s, n):
    """Broadcast a scalar rate to ``n`` non-conserved moments."""
    rates = np.atleast_1d(np.asarray(s, dtype=float))
    if rates.size == 1:
        rates = np.repeat(rates, n)
    if rates.shape != (n,):
        raise ValueError(f"expected 1 or {n} relaxation rates, got {rates.size}")
    if np.any((rates < 0) | (rates > 2)):
        raise ValueError("relaxation rates must lie in [0, 2]")
    return tuple(float(r) for r in rates)


def moments_from_populations(f, g, lam) -> Moments1D:
    f0, fp, fm = f
    gp, gm = g
    return Moments1D(f0 + fp + fm, lam * (fp - fm), lam * lam * (fp + fm - 2.0 * f0), gp + gm, lam * (gp - gm))


def populations_from_moments(m: Moments1D, lam):
    f0 = (m.rho - m.eps_rho / (lam * lam)) / 3.0
    side = m.rho - f0
    jr = m.j_rho / lam
    jq = m.j_q / lam
    f = np.stack([f0, 0.5 * (side + jr), 0.5 * (side - jr)])
    g = np.stack([0.5 * (m.q + jq), 0.5 * (m.q - jq)])
    return f, g


def _collide_block(f, g, kp, rates, fo, go):
    s_jr, s_eps, s_jq = rates
    lam = kp.lam
    lam2 = lam * lam
    f0, fp, fm = f
    gp, gm = g
    rho = f0 + fp + fm
    q = gp + gm
    jr = lam * (fp - fm)
    eps = lam2 * (fp + fm - 2.0 * f0)
    jq = lam * (gp - gm)

    u = q / rho
    p = pressure(rho, kp.phys)
    akt = kp.a * (0.5 * rho - 0.5 * kp.K * u * u)
    jr = jr + s_jr * (q - jr)
    eps = eps + s_eps * (lam2 * rho - 3.0 * lam2 * akt - eps)
    jq = jq + s_jq * (q * u + p - jq)

    fo[0] = (rho - eps / lam2) / 3.0
    side = rho - fo[0]
    fo[1] = 0.5 * (side + jr / lam)
    fo[2] = 0.5 * (side - jr / lam)
    go[0] = 0.5 * (q + jq / lam)
    go[1] = 0.5 * (q - jq / lam)


def _check_density(rho, step, offset=0):
    bad = ~(np.isfinite(rho) & (rho > 0))
    if bad.any():
        idx = np.argwhere(bad)[0]
        cell = tuple(int(i) for i in idx) if len(idx) > 1 else int(idx[0])
        if offset:
            cell = cell + offset if isinstance(cell, int) else (cell[0] + offset,) + cell[1:]
        raise BlowUpError(step, cell, float(rho[tuple(idx)]))


def collide(f, g, kp: KineticParams, s, out=None, step=None, workers=1):
    """MRT relaxation of every cell.

    ``s`` is one rate for all non-conserved moments or a triple
    ``(s_jrho, s_eps, s_jq)``.  Density and momentum are untouched.
    With ``workers > 1`` cells are split into contiguous ranges processed in
    threads; the arithmetic per cell is identical, so results do not depend
    on the partition.
    """
    rates = relaxation_rates(s, 3)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    fo, go = out if out is not None else (np.empty_like(f), np.empty_like(g))
    n = f.shape[1]
    chunks = _partition(n, workers)

    def work(sl):
        rho = f[0, sl] + f[1, sl] + f[2, sl]
        _check_density(rho, step, sl.start)
        _collide_block(f[:, sl], g[:, sl], kp, rates, fo[:, sl], go[:, sl])

    _run_chunks(work, chunks)
    return fo, go


def _partition(n, workers):
    workers = max(1, min(int(workers), n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _run_chunks(work, chunks):
    if len(chunks) == 1:
        work(chunks[0])
        return
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        for fut in [pool.submit(work, sl) for sl in chunks]:
            fut.result()


def _ghost_1d(side, kp, end):
    """Incoming populations from outside, or None when handled from the cell itself."""
    if isinstance(side, Dirichlet):
        rho, u = side.primitive()
        eq = equilibrium_1d((rho, rho * u), kp)
        # index 1 enters at the left end, index 2 at the right
        k = 1 if end == "left" else 2
        return eq.f_eq[k], eq.g_eq[k - 1]
    return None


def stream(f, g, sides: Sides1D, kp: KineticParams, out=None):
    """Move ``f+``/``g+`` one cell right and ``f-``/``g-`` one cell left.

    Incoming values at the ends come from ``sides``: periodic wrap, the
    equilibrium of a Dirichlet state, a zero-gradient copy (outflow), or
    bounce-back at a wall (``g`` changes sign there so the wall reflects
    momentum).
    """
    fo, go = out if out is not None else (np.empty_like(f), np.empty_like(g))
    fo[0] = f[0]
    fo[1, 1:] = f[1, :-1]
    go[0, 1:] = g[0, :-1]
    fo[2, :-1] = f[2, 1:]
    go[1, :-1] = g[1, 1:]

    # left end receives the + populations
    side = sides.left
    if isinstance(side, Periodic):
        fo[1, 0], go[0, 0] = f[1, -1], g[0, -1]
    elif isinstance(side, Dirichlet):
        fo[1, 0], go[0, 0] = _ghost_1d(side, kp, "left")
    elif isinstance(side, Outflow):
        fo[1, 0], go[0, 0] = f[1, 0], g[0, 0]
    elif isinstance(side, Wall):
        fo[1, 0], go[0, 0] = f[2, 0], -g[1, 0]
    else:
        raise TypeError(f"unknown boundary {side!r}")

    side = sides.right
    if isinstance(side, Periodic):
        fo[2, -1], go[1, -1] = f[2, 0], g[1, 0]
    elif isinstance(side, Dirichlet):
        fo[2, -1], go[1, -1] = _ghost_1d(side, kp, "right")
    elif isinstance(side, Outflow):
        fo[2, -1], go[1, -1] = f[2, -1], g[1, -1]
    elif isinstance(side, Wall):
        fo[2, -1], go[1, -1] = f[1, -1], -g[0, -1]
    else:
        raise TypeError(f"unknown boundary {side!r}")
    return fo, go


@dataclass
class Field1D:
    f: np.ndarray
    g: np.ndarray

    @classmethod
    def at_equilibrium(cls, rho, q, kp: KineticParams):
        eq = equilibrium_1d((np.asarray(rho, float), np.asarray(q, float)), kp)
        return cls(eq.f_eq.copy(), eq.g_eq.copy())

    def macro(self):
        return self.f.sum(axis=0), self.g.sum(axis=0)


@dataclass
class Trajectory1D:
    grid: Grid1D
    steps: list = field(default_factory=list)
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (rho, q) pairs
    mass: list = field(default_factory=list)
    momentum: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    min_rho: float = math.inf
    final: Field1D | None = None

    @property
    def n_steps(self):
        return self.steps[-1] if self.steps else 0

    def mass_drift(self):
        m = np.asarray(self.mass)
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))


def n_steps_for(t_end, dt):
    return int(round(t_end / dt))


def run_1d(
    rho,
    q,
    grid: Grid1D,
    kp: KineticParams,
    s=1.8,
    *,
    t_end=None,
    n_steps=None,
    sides: Sides1D = Sides1D(),
    output_every=0,
    track_entropy=False,
    workers=1,
) -> Trajectory1D:
    """Run the D1Q3Q2 scheme from equilibrium populations of ``(rho, q)``.

    Steps are collide-then-stream; snapshots are taken after streaming at
    step 0, every ``output_every`` steps (0 disables) and at the last step.
    Mass and momentum totals are recorded every step, the microscopic entropy
    too when ``track_entropy`` is set.
    """
    if not math.isclose(grid.lam, kp.lam, rel_tol=1e-14):
        raise ValueError("grid and kinetic parameters disagree on lambda")
    if n_steps is None:
        if t_end is None:
            raise ValueError("give t_end or n_steps")
        n_steps = n_steps_for(t_end, grid.dt)
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (grid.n_cells,))
    q = np.broadcast_to(np.asarray(q, dtype=float), (grid.n_cells,))
    _check_density(rho, 0)

    field_ = Field1D.at_equilibrium(rho, q, kp)
    buf_c = (np.empty_like(field_.f), np.empty_like(field_.g))
    buf_s = (np.empty_like(field_.f), np.empty_like(field_.g))
    traj = Trajectory1D(grid)
    warned = False

    def record(step, f, g):
        nonlocal warned
        r = f.sum(axis=0)
        m = g.sum(axis=0)
        traj.mass.append(float(np.sum(r)))
        traj.momentum.append(float(np.sum(m)))
        traj.min_rho = min(traj.min_rho, float(np.min(r)))
        if track_entropy:
            traj.entropy.append(microscopic_entropy_total((f, g), kp).value)
        if not warned and np.all(r > 0):
            speed = np.max(np.abs(m / r) + np.sqrt(kp.phys.gamma * pressure(r, kp.phys) / r))
            if speed > 0.9 * kp.lam:
                warnings.warn(
                    f"max(|u|+c) = {speed:.3g} exceeds 0.9*lambda = {0.9 * kp.lam:.3g}",
                    RuntimeWarning,
                    stacklevel=3,
                )
                warned = True
        if step == 0 or step == n_steps or (output_every and step % output_every == 0):
            traj.steps.append(step)
            traj.times.append(step * grid.dt)
            traj.snapshots.append((r, m))

    f, g = field_.f, field_.g
    record(0, f, g)
    for step in range(1, n_steps + 1):
        fc, gc = collide(f, g, kp, s, out=buf_c, step=step, workers=workers)
        f_new, g_new = stream(fc, gc, sides, kp, out=buf_s)
        _check_density(f_new.sum(axis=0), step)
        record(step, f_new, g_new)
        # swap buffers
        buf_s, f, g = (f, g), f_new, g_new
    traj.final = Field1D(f.copy(), g.copy())
    return traj
