"""Built-in case library and the geometry/initial data behind each case kind."""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from ..boundaries import Dirichlet, Outflow, Periodic, Sides1D, Sides2D, Wall
from ..reference.reflection import DOMAIN as REFLECTION_DOMAIN
from ..reference.reflection import REFLECTION_STATES, Primitive2D, ReflectionStates, reflection_exact
from .config import CaseConfig, config_from_dict

BUILTIN: dict[str, dict] = {
    "riemann1d": {"kind": "riemann1d", "solver": "lbm"},
    "riemann1d-godunov": {"kind": "riemann1d", "solver": "godunov"},
    "riemann1d-exact": {"kind": "riemann1d", "solver": "exact"},
    "reflection2d": {"kind": "reflection2d", "solver": "lbm", "output": {"format": "vtk"}},
    "reflection2d-70x40": {"kind": "reflection2d", "mesh": {"nx": 70, "ny": 40}, "output": {"format": "vtk"}},
    "reflection2d-35x20": {"kind": "reflection2d", "mesh": {"nx": 35, "ny": 20}, "output": {"format": "vtk"}},
    "reflection2d-godunov": {"kind": "reflection2d", "solver": "godunov", "time": {"t_end": 3.0},
                             "output": {"format": "vtk"}},
    "emery2d": {"kind": "emery2d"},
    "emery2d-240x80": {"kind": "emery2d", "mesh": {"nx": 240, "ny": 80}},
    "emery2d-120x40": {"kind": "emery2d", "mesh": {"nx": 120, "ny": 40}},
    "emery2d-early": {"kind": "emery2d", "mesh": {"nx": 120, "ny": 40}, "time": {"t_end": 0.5}},
    "uniform": {"kind": "uniform"},
}

DESCRIPTIONS = {
    "riemann1d": "shock tube rho 2 | 0.5 at rest, 80 cells, lambda 8, a 0.15, s 1.8",
    "riemann1d-godunov": "same shock tube with the first-order Godunov scheme",
    "riemann1d-exact": "same shock tube sampled from the exact Riemann solution",
    "reflection2d": "regular shock reflection, 140x80, run to steady state",
    "reflection2d-70x40": "regular shock reflection, 70x40",
    "reflection2d-35x20": "regular shock reflection, 35x20",
    "reflection2d-godunov": "regular shock reflection with Godunov, 140x80, t = 3",
    "emery2d": "Froude 3 channel with a forward step, 480x160, lambda 80, a 0.05, t = 4",
    "emery2d-240x80": "Froude 3 forward step, 240x80",
    "emery2d-120x40": "Froude 3 forward step, 120x40",
    "emery2d-early": "Froude 3 forward step, 120x40, t = 0.5",
    "uniform": "uniform flow on a periodic line (fixed point check)",
}


def builtin_names():
    return list(BUILTIN)


def builtin_dict(name) -> dict:
    try:
        return copy.deepcopy(BUILTIN[name])
    except KeyError:
        raise KeyError(f"unknown built-in case {name!r}; see 'cases list'") from None


def builtin_config(name, **overrides) -> CaseConfig:
    raw = builtin_dict(name)
    raw.setdefault("name", name)
    for k, v in overrides.items():
        raw[k] = v
    return config_from_dict(raw)


# --------------------------------------------------------------------------
# geometry and initial data


@dataclass
class Setup1D:
    x0: float
    dx: float
    n: int
    rho: np.ndarray
    u: np.ndarray
    sides: Sides1D

    @property
    def x(self):
        return self.x0 + (np.arange(self.n) + 0.5) * self.dx


@dataclass
class Setup2D:
    nx: int
    ny: int
    dx: float
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    sides: Sides2D
    solid: np.ndarray

    @property
    def x(self):
        return (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self):
        return (np.arange(self.ny) + 0.5) * self.dx


def _side(name, state=None):
    return {"periodic": Periodic(), "wall": Wall(), "outflow": Outflow()}.get(name) or Dirichlet(tuple(state))


def reflection_states(cfg: CaseConfig) -> ReflectionStates:
    st = cfg.payload.get("states")
    if not st:
        return REFLECTION_STATES
    return ReflectionStates(*(Primitive2D(*st[k]) for k in ("left", "top", "right")))


def setup_1d(cfg: CaseConfig) -> Setup1D:
    p = cfg.payload
    n = cfg.mesh.n
    if cfg.kind == "riemann1d":
        lo, hi = p["domain"]
        dx = (hi - lo) / n
        x = lo + (np.arange(n) + 0.5) * dx
        left = x < p["diaphragm"]
        rho = np.where(left, p["left"][0], p["right"][0])
        u = np.where(left, p["left"][1], p["right"][1])
        if p["boundary"] == "dirichlet":
            sides = Sides1D(Dirichlet(tuple(p["left"])), Dirichlet(tuple(p["right"])))
        else:
            sides = Sides1D(Outflow(), Outflow())
        return Setup1D(lo, dx, n, rho, u, sides)
    if cfg.kind == "uniform":
        lo, hi = p["domain"]
        rho0, u0 = p["state"]
        return Setup1D(lo, (hi - lo) / n, n, np.full(n, rho0), np.full(n, u0), Sides1D())
    if cfg.kind == "custom":
        lo, hi = p["domain"]
        dx = (hi - lo) / n
        x = lo + (np.arange(n) + 0.5) * dx
        rho = np.empty(n)
        u = np.empty(n)
        start = -np.inf
        for x_end, r, v in p["segments"]:
            m = (x >= start) & (x < x_end)
            rho[m], u[m] = r, v
            start = x_end
        return Setup1D(lo, dx, n, rho, u, Sides1D(_side(p["left"]), _side(p["right"])))
    raise ValueError(f"kind {cfg.kind!r} is not one-dimensional")


def setup_2d(cfg: CaseConfig) -> Setup2D:
    p = cfg.payload
    nx, ny = cfg.mesh.nx, cfg.mesh.ny
    if cfg.kind == "reflection2d":
        states = reflection_states(cfg)
        dx = REFLECTION_DOMAIN[0] / nx
        x = (np.arange(nx) + 0.5) * dx
        y = (np.arange(ny) + 0.5) * dx
        X, Y = np.meshgrid(x, y, indexing="ij")
        rho, u, v = reflection_exact(X, Y, states)
        top = reflection_exact(x, np.full(nx, REFLECTION_DOMAIN[1]), states)
        sides = Sides2D(left=Dirichlet(tuple(states.left)), right=Outflow(), bottom=Wall(), top=Dirichlet(top))
        return Setup2D(nx, ny, dx, rho, u, v, sides, np.zeros((nx, ny), bool))
    if cfg.kind == "emery2d":
        dx = p["length"] / nx
        x = (np.arange(nx) + 0.5) * dx
        y = (np.arange(ny) + 0.5) * dx
        X, Y = np.meshgrid(x, y, indexing="ij")
        solid = (X >= p["step_x"]) & (Y < p["step_height"])
        r0, u0, v0 = p["inflow"]
        shape = (nx, ny)
        sides = Sides2D(left=Dirichlet((r0, u0, v0)), right=Outflow(), bottom=Wall(), top=Wall())
        return Setup2D(nx, ny, dx, np.full(shape, r0), np.full(shape, u0), np.full(shape, v0), sides, solid)
    if cfg.kind == "uniform":
        lx, _ = p["domain"]
        dx = lx / nx
        r0, u0, v0 = p["state"]
        shape = (nx, ny)
        return Setup2D(nx, ny, dx, np.full(shape, r0), np.full(shape, u0), np.full(shape, v0),
                       Sides2D(), np.zeros(shape, bool))
    raise ValueError(f"kind {cfg.kind!r} is not two-dimensional")
