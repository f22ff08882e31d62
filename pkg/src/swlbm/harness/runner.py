"""Execute a configured case, write its outputs and measure it against references."""
from __future__ import annotations

import math
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..entropy_kinetics import KineticParams
from ..lbm1d import BlowUpError, Grid1D, run_1d
from ..lbm2d import Grid2D, Lattice2D, run_2d
from ..reference import PositivityError, VacuumError, exact_riemann, run_godunov_1d, run_godunov_2d
from ..reference.reflection import reflected_front_angle, reflection_exact
from ..sw_core import PhysParams, pressure
from . import io, metrics
from .cases import reflection_states, setup_1d, setup_2d
from .config import CaseConfig

OUTPUT_ENV = "SWLBM_OUTPUT_DIR"
SOLVER_ABORTS = (BlowUpError, PositivityError, VacuumError)


@dataclass
class RunReport:
    name: str
    kind: str
    solver: str
    status: str = "ok"
    error: str | None = None
    wall_time: float = 0.0
    steps: int = 0
    t_final: float = 0.0
    mass_drift: float | None = None
    min_rho: float | None = None
    metrics: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    fields: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self):
        return self.status == "ok"

    def to_dict(self):
        d = asdict(self)
        d.pop("fields")
        return d


def output_directory(cfg: CaseConfig, override=None):
    """Command-line override, then the environment variable, then the config."""
    return override or os.environ.get(OUTPUT_ENV) or cfg.output.directory


def _phys(cfg):
    return PhysParams(gamma=cfg.phys.gamma, rho0=cfg.phys.rho0, p0=cfg.phys.p0)


def _kinetic(cfg):
    return KineticParams(cfg.scheme.a, cfg.scheme.lam, _phys(cfg))


def _stem(cfg, k):
    return f"{cfg.name}_{cfg.solver}_{k:04d}"


# --------------------------------------------------------------------------
# 1D


def _riemann_metrics(cfg, x, rho, t, dx, params):
    p = cfg.payload
    sol = exact_riemann(tuple(p["left"]), tuple(p["right"]), params)
    ex_rho, _ = sol.sample((x - p["diaphragm"]) / t)
    out = {"l1_rho": metrics.l1_error(rho, ex_rho), "rho_star_exact": sol.rho_star}
    shocks = [s + 0.0 for s in sol.shock_speeds]
    if len(shocks) == 1:
        xs_exact = p["diaphragm"] + shocks[0] * t
        side = 1 if shocks[0] > sol.u_star else -1
        region = (p["diaphragm"] + sol.u_star * t, x[-1]) if side > 0 else (x[0], p["diaphragm"] + sol.u_star * t)
        try:
            xs = metrics.shock_position_1d(x, rho, region=region)
            out.update(shock_position=xs, shock_exact=xs_exact, shock_error_dx=(xs - xs_exact) / dx)
        except metrics.MetricUnavailable as exc:
            out["shock_position"] = f"unavailable: {exc}"
    if sol.left_wave == "rarefaction":
        head = p["diaphragm"] + sol.left_speeds[0] * t
        tail = p["diaphragm"] + sol.left_speeds[1] * t
        sel = x < p["diaphragm"] + sol.u_star * t
        try:
            h, tl = metrics.rarefaction_endpoints(x[sel], rho[sel], sol.rho_l, sol.rho_star)
            out.update(rarefaction_head=h, rarefaction_head_exact=head, rarefaction_head_error_dx=(h - head) / dx,
                       rarefaction_tail=tl, rarefaction_tail_exact=tail, rarefaction_tail_error_dx=(tl - tail) / dx)
        except metrics.MetricUnavailable as exc:
            out["rarefaction"] = f"unavailable: {exc}"
        if sol.right_wave == "shock":
            # plateau cells, kept 3 cells clear of both bounding waves
            right = p["diaphragm"] + sol.right_speeds[0] * t
            plateau = (x > tail + 3 * dx) & (x < right - 3 * dx)
            if plateau.any():
                dev = np.max(np.abs(rho[plateau] - sol.rho_star)) / sol.rho_star
                out.update(plateau_cells=int(plateau.sum()), plateau_max_rel_dev=float(dev))
    return out


def _run_1d(cfg: CaseConfig, report: RunReport, outdir):
    st = setup_1d(cfg)
    params = _phys(cfg)
    x = st.x
    q = st.rho * st.u
    snaps = []
    if cfg.solver == "lbm":
        kp = _kinetic(cfg)
        grid = Grid1D(st.n, st.dx, cfg.scheme.lam, st.x0)
        traj = run_1d(st.rho, q, grid, kp, list(cfg.rates()), t_end=cfg.time.t_end, sides=st.sides,
                      output_every=cfg.time.output_every, workers=cfg.scheme.workers)
        report.steps = traj.n_steps
        report.t_final = traj.times[-1]
        report.mass_drift = traj.mass_drift()
        report.min_rho = traj.min_rho
        snaps = list(zip(traj.times, traj.snapshots))
    elif cfg.solver == "godunov":
        r, m, steps = run_godunov_1d(st.rho, q, st.dx, cfg.time.t_end, params, cfg.scheme.cfl, st.sides)
        report.steps = steps
        report.t_final = cfg.time.t_end
        m0 = float(np.sum(st.rho))
        report.mass_drift = abs(float(np.sum(r)) - m0) / m0
        report.min_rho = float(min(np.min(r), np.min(st.rho)))
        snaps = [(0.0, (st.rho, q)), (cfg.time.t_end, (r, m))]
    else:
        t = cfg.time.t_end
        if cfg.kind == "riemann1d":
            p = cfg.payload
            sol = exact_riemann(tuple(p["left"]), tuple(p["right"]), params)
            r, u = sol.sample((x - p["diaphragm"]) / t)
        else:
            r, u = st.rho.copy(), st.u.copy()
        report.t_final = t
        report.min_rho = float(np.min(r))
        snaps = [(t, (r, r * u))]

    t_last, (r, m) = snaps[-1]
    report.fields = {"x": x, "rho": r, "u": m / r}
    if cfg.kind == "riemann1d":
        report.metrics.update(_riemann_metrics(cfg, x, r, t_last, st.dx, params))
    elif cfg.kind == "uniform":
        report.metrics["l1_rho"] = metrics.l1_error(r, np.full_like(r, cfg.payload["state"][0]))

    chosen = snaps if cfg.output.snapshots == "all" else snaps[-1:]
    for k, (_, (rr, mm)) in enumerate(chosen):
        path = os.path.join(outdir, _stem(cfg, k) + ".csv")
        report.files.append(io.write_csv_1d(path, x, rr, mm / rr, pressure(rr, params)))


# --------------------------------------------------------------------------
# 2D


def _run_2d(cfg: CaseConfig, report: RunReport, outdir):
    st = setup_2d(cfg)
    params = _phys(cfg)
    fluid = ~st.solid
    snaps = []
    if cfg.solver == "lbm":
        kp = _kinetic(cfg)
        grid = Grid2D(st.nx, st.ny, st.dx, cfg.scheme.lam, solid=st.solid if st.solid.any() else None)
        lat = Lattice2D(grid, st.sides, kp)
        traj = run_2d(st.rho, st.rho * st.u, st.rho * st.v, lat, list(cfg.rates()), t_end=cfg.time.t_end,
                      output_every=cfg.time.output_every, steady_tol=cfg.time.steady_tol,
                      workers=cfg.scheme.workers)
        report.steps = traj.n_steps
        report.t_final = traj.times[-1]
        report.mass_drift = traj.mass_drift()
        report.min_rho = traj.min_rho
        report.metrics["max_speed_over_lambda"] = traj.max_speed_ratio
        if cfg.time.steady_tol is not None:
            report.metrics["steady"] = traj.steady
            report.metrics["change_per_step"] = traj.change_per_step[-1] if traj.change_per_step else None
        snaps = list(zip(traj.times, traj.snapshots))
    elif cfg.solver == "godunov":
        res = run_godunov_2d(st.rho, st.rho * st.u, st.rho * st.v, st.dx, st.dx, cfg.time.t_end, params,
                             cfg.scheme.cfl, st.sides, st.solid)
        report.steps = res.steps
        report.t_final = res.t
        m0 = float(np.sum(st.rho[fluid]))
        report.mass_drift = abs(float(np.sum(res.rho[fluid])) - m0) / m0
        report.min_rho = float(np.min(res.rho[fluid]))
        snaps = [(res.t, (res.rho, res.qx, res.qy))]
    else:
        report.t_final = cfg.time.t_end
        report.min_rho = float(np.min(st.rho))
        snaps = [(cfg.time.t_end, (st.rho, st.rho * st.u, st.rho * st.v))]

    x, y = st.x, st.y
    _, (r, mx, my) = snaps[-1]
    safe = np.where(fluid, r, 1.0)
    report.fields = {"x": x, "y": y, "rho": r, "u": np.where(fluid, mx / safe, 0.0),
                     "v": np.where(fluid, my / safe, 0.0), "fluid": fluid}

    if cfg.kind == "reflection2d":
        states = reflection_states(cfg)
        X, Y = np.meshgrid(x, y, indexing="ij")
        ex = reflection_exact(X, Y, states)[0]
        report.metrics["l1_rho_exact"] = metrics.l1_error(r, ex)
        report.metrics["front_angle_exact"] = math.degrees(reflected_front_angle(states))
        try:
            report.metrics["front_angle"] = metrics.shock_angle_2d(r, x, y)
        except metrics.MetricUnavailable as exc:
            report.metrics["front_angle"] = f"unavailable: {exc}"
    elif cfg.kind == "emery2d":
        try:
            xb, jump = metrics.bow_shock(r, x, mask=fluid, x_max=cfg.payload["step_x"])
            report.metrics.update(bow_shock_x=xb, bow_shock_jump=jump)
        except metrics.MetricUnavailable as exc:
            report.metrics["bow_shock_x"] = f"unavailable: {exc}"
    elif cfg.kind == "uniform":
        report.metrics["l1_rho"] = metrics.l1_error(r, np.full_like(r, cfg.payload["state"][0]))

    chosen = snaps if cfg.output.snapshots == "all" else snaps[-1:]
    for k, (_, (rr, mx, my)) in enumerate(chosen):
        rr = np.where(fluid, rr, 0.0)
        safe = np.where(fluid, rr, 1.0)
        u = np.where(fluid, mx / safe, 0.0)
        v = np.where(fluid, my / safe, 0.0)
        p = np.where(fluid, pressure(safe, params), 0.0)
        stem = os.path.join(outdir, _stem(cfg, k))
        if cfg.output.format == "vtk":
            report.files.append(io.write_vtk_2d(stem + ".vtk", x, y, rr, u, v, p, title=f"{cfg.name} {cfg.solver}"))
        else:
            report.files.append(io.write_csv_2d(stem + ".csv", x, y, rr, u, v, p))


def run_case(cfg: CaseConfig, out_dir=None) -> RunReport:
    """Run one validated case.

    Solver aborts (blow-up, positivity loss, vacuum) are caught and recorded
    in the report with ``status = "aborted"``; nothing is written then.
    """
    report = RunReport(cfg.name, cfg.kind, cfg.solver)
    outdir = output_directory(cfg, out_dir)
    t0 = time.perf_counter()
    try:
        if cfg.dim == 1:
            _run_1d(cfg, report, outdir)
        else:
            _run_2d(cfg, report, outdir)
    except SOLVER_ABORTS as exc:
        report.status = "aborted"
        report.error = f"{type(exc).__name__}: {exc}"
    report.wall_time = time.perf_counter() - t0
    return report
