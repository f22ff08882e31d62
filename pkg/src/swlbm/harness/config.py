"""Case configuration: parsing, defaults and validation.

A configuration is one JSON object::

    {
      "kind": "riemann1d",
      "solver": "lbm",
      "phys":   {"gamma": 2, "rho0": 1, "p0": 0.5},
      "scheme": {"lambda": 8, "a": 0.15, "s": 1.8},
      "mesh":   {"n": 80},
      "time":   {"t_end": 0.25, "output_every": 0},
      "payload": {"left": [2, 0], "right": [0.5, 0]},
      "output": {"directory": "output", "format": "csv"}
    }

Every section is optional except ``kind``; missing values take the defaults
of the case kind.  Errors name the offending key path (``scheme.a``).
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Any

KINDS = ("riemann1d", "reflection2d", "emery2d", "uniform", "custom")
SOLVERS = ("lbm", "godunov", "exact")
FORMATS = ("csv", "vtk")
SIDE_NAMES = ("periodic", "wall", "outflow", "dirichlet")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted key that failed."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class PhysSection:
    gamma: float = 2.0
    rho0: float = 1.0
    p0: float = 0.5


@dataclass(frozen=True)
class SchemeSection:
    lam: float = 8.0
    a: float = 0.15
    s: tuple = (1.8,)
    cfl: float = 0.45
    workers: int = 1


@dataclass(frozen=True)
class MeshSection:
    n: int | None = None
    nx: int | None = None
    ny: int | None = None

    @property
    def dim(self):
        return 1 if self.n is not None else 2


@dataclass(frozen=True)
class TimeSection:
    t_end: float = 0.25
    output_every: int = 0
    steady_tol: float | None = None


@dataclass(frozen=True)
class OutputSection:
    directory: str = "output"
    format: str = "csv"
    snapshots: str = "final"


@dataclass(frozen=True)
class CaseConfig:
    kind: str
    solver: str = "lbm"
    name: str = ""
    phys: PhysSection = PhysSection()
    scheme: SchemeSection = SchemeSection()
    mesh: MeshSection = MeshSection(n=80)
    time: TimeSection = TimeSection()
    payload: dict = field(default_factory=dict)
    output: OutputSection = OutputSection()

    @property
    def dim(self):
        return self.mesh.dim

    def rates(self):
        """Relaxation rates expanded to every non-conserved moment."""
        n = 3 if self.dim == 1 else 10
        return self.scheme.s * n if len(self.scheme.s) == 1 else self.scheme.s


# --------------------------------------------------------------------------
# defaults per kind

DEFAULTS: dict[str, dict] = {
    "riemann1d": {
        "scheme": {"lambda": 8.0, "a": 0.15, "s": 1.8},
        "mesh": {"n": 80},
        "time": {"t_end": 0.25},
        "payload": {"left": [2.0, 0.0], "right": [0.5, 0.0], "diaphragm": 0.5,
                    "domain": [0.0, 1.0], "boundary": "dirichlet"},
    },
    "reflection2d": {
        "scheme": {"lambda": 8.0, "a": 0.15, "s": 1.8},
        "mesh": {"nx": 140, "ny": 80},
        "time": {"t_end": 10.0, "output_every": 100, "steady_tol": 1e-8},
        "payload": {},
    },
    "emery2d": {
        "scheme": {"lambda": 80.0, "a": 0.05, "s": 1.8},
        "mesh": {"nx": 480, "ny": 160},
        "time": {"t_end": 4.0},
        "payload": {"inflow": [1.0, 3.0, 0.0], "length": 3.0, "height": 1.0,
                    "step_x": 0.6, "step_height": 0.2},
        "output": {"format": "vtk"},
    },
    "uniform": {
        "scheme": {"lambda": 8.0, "a": 0.15, "s": 1.8},
        "mesh": {"n": 64},
        "time": {"t_end": 0.5},
        "payload": {"state": [1.0, 0.5], "domain": [0.0, 1.0]},
    },
    "custom": {
        "scheme": {"lambda": 8.0, "a": 0.15, "s": 1.8},
        "mesh": {"n": 100},
        "time": {"t_end": 0.1},
        "payload": {"domain": [0.0, 1.0], "left": "outflow", "right": "outflow"},
    },
}

PAYLOAD_KEYS = {
    "riemann1d": {"left", "right", "diaphragm", "domain", "boundary"},
    "reflection2d": {"states"},
    "emery2d": {"inflow", "length", "height", "step_x", "step_height"},
    "uniform": {"state", "domain"},
    "custom": {"segments", "domain", "left", "right"},
}

SECTION_KEYS = {
    "phys": {"gamma", "rho0", "p0"},
    "scheme": {"lambda", "a", "s", "cfl", "workers"},
    "mesh": {"n", "nx", "ny"},
    "time": {"t_end", "output_every", "steady_tol"},
    "output": {"directory", "format", "snapshots"},
}
TOP_KEYS = {"kind", "solver", "name", "payload"} | set(SECTION_KEYS)


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _number(path, value, *, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    if integer and int(value) != value:
        raise ConfigError(path, "must be an integer")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    if nonneg and value < 0:
        raise ConfigError(path, f"must be non-negative, got {value!r}")
    return int(value) if integer else float(value)


def _vector(path, value, length):
    lengths = (length,) if isinstance(length, int) else length
    if not isinstance(value, (list, tuple)) or len(value) not in lengths:
        raise ConfigError(path, f"expected a list of {' or '.join(map(str, lengths))} numbers")
    return [_number(f"{path}[{i}]", v) for i, v in enumerate(value)]


def _state(path, value, dim):
    vals = _vector(path, value, dim + 1)
    if not vals[0] > 0:
        raise ConfigError(f"{path}[0]", "density must be positive")
    return vals


def _interval(path, value):
    lo, hi = _vector(path, value, 2)
    if not hi > lo:
        raise ConfigError(path, "needs lower < upper")
    return [lo, hi]


def _unknown(path, got, allowed):
    extra = sorted(set(got) - set(allowed))
    if extra:
        where = f"{path}.{extra[0]}" if path else extra[0]
        raise ConfigError(where, "unknown key")


def _section(raw, name):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, "expected an object")
    _unknown(name, sec, SECTION_KEYS[name])
    return sec


def _payload(kind, raw, dim, solver):
    p = raw
    _unknown("payload", p, PAYLOAD_KEYS[kind])
    out = {}
    if kind == "riemann1d":
        out["left"] = _state("payload.left", p["left"], 1)
        out["right"] = _state("payload.right", p["right"], 1)
        out["domain"] = _interval("payload.domain", p["domain"])
        out["diaphragm"] = _number("payload.diaphragm", p["diaphragm"])
        if not out["domain"][0] < out["diaphragm"] < out["domain"][1]:
            raise ConfigError("payload.diaphragm", "must lie inside the domain")
        if p["boundary"] not in ("dirichlet", "outflow"):
            raise ConfigError("payload.boundary", "must be 'dirichlet' or 'outflow'")
        out["boundary"] = p["boundary"]
    elif kind == "reflection2d":
        if "states" in p:
            st = p["states"]
            if not isinstance(st, dict):
                raise ConfigError("payload.states", "expected an object with left, top, right")
            _unknown("payload.states", st, {"left", "top", "right"})
            out["states"] = {k: _state(f"payload.states.{k}", st[k], 2) for k in ("left", "top", "right")
                             if k in st}
            if len(out["states"]) != 3:
                raise ConfigError("payload.states", "needs left, top and right")
    elif kind == "emery2d":
        out["inflow"] = _state("payload.inflow", p["inflow"], 2)
        for k in ("length", "height", "step_x", "step_height"):
            out[k] = _number(f"payload.{k}", p[k], positive=True)
        if out["step_x"] >= out["length"]:
            raise ConfigError("payload.step_x", "must lie inside the channel")
        if out["step_height"] >= out["height"]:
            raise ConfigError("payload.step_height", "must be lower than the channel")
    elif kind == "uniform":
        out["state"] = _state("payload.state", p["state"], dim)
        if dim == 1:
            out["domain"] = _interval("payload.domain", p["domain"])
        else:
            lx, ly = _vector("payload.domain", p["domain"], 2) if len(p["domain"]) == 2 else (None, None)
            if not (lx and ly and lx > 0 and ly > 0):
                raise ConfigError("payload.domain", "2D uniform case needs [Lx, Ly] > 0")
            out["domain"] = [lx, ly]
    elif kind == "custom":
        if dim != 1:
            raise ConfigError("mesh", "custom cases are one-dimensional; give mesh.n")
        out["domain"] = _interval("payload.domain", p["domain"])
        segs = p.get("segments")
        if not isinstance(segs, list) or not segs:
            raise ConfigError("payload.segments", "expected a non-empty list of [x_end, rho, u]")
        prev = out["domain"][0]
        parsed = []
        for i, seg in enumerate(segs):
            x_end, rho, u = _vector(f"payload.segments[{i}]", seg, 3)
            if x_end <= prev:
                raise ConfigError(f"payload.segments[{i}]", "segment ends must increase")
            if not rho > 0:
                raise ConfigError(f"payload.segments[{i}]", "density must be positive")
            parsed.append([x_end, rho, u])
            prev = x_end
        if parsed[-1][0] < out["domain"][1]:
            raise ConfigError("payload.segments", "segments must cover the domain")
        out["segments"] = parsed
        for side in ("left", "right"):
            if p[side] not in SIDE_NAMES or p[side] == "dirichlet":
                raise ConfigError(f"payload.{side}", "must be 'periodic', 'wall' or 'outflow'")
            out[side] = p[side]
        if (out["left"] == "periodic") != (out["right"] == "periodic"):
            raise ConfigError("payload.right", "periodic boundaries must be set on both ends")
    if solver == "exact" and kind in ("emery2d", "custom"):
        raise ConfigError("solver", f"no exact solution for kind '{kind}'")
    return out


def config_from_dict(raw: dict[str, Any]) -> CaseConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    _unknown("", raw, TOP_KEYS)
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError("kind", f"expected one of {', '.join(KINDS)}; got {kind!r}")
    base = copy.deepcopy(DEFAULTS[kind])
    if "mesh" in raw:
        # a given mesh replaces the default instead of mixing n with nx, ny
        base.pop("mesh", None)
    raw = _merge(base, raw)

    solver = raw.get("solver", "lbm")
    if solver not in SOLVERS:
        raise ConfigError("solver", f"expected one of {', '.join(SOLVERS)}; got {solver!r}")

    ph = _section(raw, "phys")
    phys = PhysSection(
        gamma=_number("phys.gamma", ph.get("gamma", 2.0)),
        rho0=_number("phys.rho0", ph.get("rho0", 1.0), positive=True),
        p0=_number("phys.p0", ph.get("p0", 0.5), positive=True),
    )
    if phys.gamma != 2.0:
        raise ConfigError("phys.gamma", "only gamma = 2 is supported by the kinetic scheme")

    sc = _section(raw, "scheme")
    s_raw = sc.get("s", 1.8)
    s_list = list(s_raw) if isinstance(s_raw, (list, tuple)) else [s_raw]
    s_vals = tuple(_number(f"scheme.s[{i}]" if len(s_list) > 1 else "scheme.s", v) for i, v in enumerate(s_list))
    for i, v in enumerate(s_vals):
        if not 0.0 <= v <= 2.0:
            raise ConfigError(f"scheme.s[{i}]" if len(s_vals) > 1 else "scheme.s", "must lie in [0, 2]")
    cfl = _number("scheme.cfl", sc.get("cfl", 0.45), positive=True)
    if cfl > 1.0:
        raise ConfigError("scheme.cfl", "must lie in (0, 1]")
    scheme = SchemeSection(
        lam=_number("scheme.lambda", sc.get("lambda", 8.0), positive=True),
        a=_number("scheme.a", sc.get("a", 0.15), positive=True),
        s=s_vals,
        cfl=cfl,
        workers=_number("scheme.workers", sc.get("workers", 1), positive=True, integer=True),
    )

    me = _section(raw, "mesh")
    if "n" in me and ("nx" in me or "ny" in me):
        raise ConfigError("mesh", "give either n (1D) or nx, ny (2D), not both")
    if "n" in me:
        mesh = MeshSection(n=_number("mesh.n", me["n"], positive=True, integer=True))
        if mesh.n < 4:
            raise ConfigError("mesh.n", "needs at least 4 cells")
    else:
        if "nx" not in me or "ny" not in me:
            raise ConfigError("mesh", "give n (1D) or both nx and ny (2D)")
        mesh = MeshSection(nx=_number("mesh.nx", me["nx"], positive=True, integer=True),
                           ny=_number("mesh.ny", me["ny"], positive=True, integer=True))
        if mesh.nx < 2 or mesh.ny < 2:
            raise ConfigError("mesh", "needs at least 2 cells per direction")
    expected_dim = {"riemann1d": 1, "custom": 1, "reflection2d": 2, "emery2d": 2}.get(kind)
    if expected_dim is not None and mesh.dim != expected_dim:
        raise ConfigError("mesh", f"kind '{kind}' is {expected_dim}D")
    n_rates = 3 if mesh.dim == 1 else 10
    if len(s_vals) not in (1, n_rates):
        raise ConfigError("scheme.s", f"give one rate or {n_rates} rates")

    ti = _section(raw, "time")
    steady = ti.get("steady_tol")
    time = TimeSection(
        t_end=_number("time.t_end", ti.get("t_end", 0.25), positive=True),
        output_every=_number("time.output_every", ti.get("output_every", 0), nonneg=True, integer=True),
        steady_tol=None if steady is None else _number("time.steady_tol", steady, positive=True),
    )
    if time.steady_tol is not None and not time.output_every:
        raise ConfigError("time.output_every", "steady detection needs a positive output cadence")

    ou = _section(raw, "output")
    fmt = ou.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("output.format", f"expected csv or vtk; got {fmt!r}")
    if fmt == "vtk" and mesh.dim == 1:
        raise ConfigError("output.format", "vtk output is for 2D cases")
    snaps = ou.get("snapshots", "final")
    if snaps not in ("final", "all"):
        raise ConfigError("output.snapshots", "expected 'final' or 'all'")
    directory = ou.get("directory", "output")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory", "expected a non-empty string")
    output = OutputSection(directory=directory, format=fmt, snapshots=snaps)

    pay = raw.get("payload", {})
    if not isinstance(pay, dict):
        raise ConfigError("payload", "expected an object")
    payload = _payload(kind, pay, mesh.dim, solver)

    if kind == "emery2d":
        dx = payload["length"] / mesh.nx
        dy = payload["height"] / mesh.ny
        if not math.isclose(dx, dy, rel_tol=1e-12):
            raise ConfigError("mesh.ny", f"cells must be square: length/nx = {dx:g}, height/ny = {dy:g}")
    if kind == "uniform" and mesh.dim == 2:
        lx, ly = payload["domain"]
        if not math.isclose(lx / mesh.nx, ly / mesh.ny, rel_tol=1e-12):
            raise ConfigError("mesh.ny", "cells must be square")
    if kind == "reflection2d" and not math.isclose(1.75 / mesh.nx, 1.0 / mesh.ny, rel_tol=1e-12):
        raise ConfigError("mesh.ny", "reflection domain is 1.75 x 1; cells must be square")

    name = raw.get("name", "") or kind
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")
    return CaseConfig(kind=kind, solver=solver, name=name, phys=phys, scheme=scheme, mesh=mesh,
                      time=time, payload=payload, output=output)


def parse_config(text: str) -> CaseConfig:
    """Parse and validate a JSON configuration document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    return config_from_dict(raw)


def load_config(path) -> CaseConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
