"""CSV and legacy VTK writers (plus a CSV reader for round trips)."""
from __future__ import annotations

import os

import numpy as np

NUMBER = "%.17g"


class OutputError(OSError):
    pass


def _open(path):
    try:
        d = os.path.dirname(os.fspath(path))
        if d:
            os.makedirs(d, exist_ok=True)
        return open(path, "w", newline="\n", encoding="ascii")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _rows(fh, columns):
    data = np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns])
    np.savetxt(fh, data, fmt=NUMBER, delimiter=",")


def write_csv_1d(path, x, rho, u, p):
    """Header ``x,rho,u,p`` and one row per cell."""
    with _open(path) as fh:
        fh.write("x,rho,u,p\n")
        _rows(fh, (x, rho, u, p))
    return path


def write_csv_2d(path, x, y, rho, u, v, p):
    """Header ``x,y,rho,u,v,p``; rows run over x fastest within each y row."""
    X, Y = np.meshgrid(x, y, indexing="ij")
    cols = [np.asarray(a).T for a in (X, Y, rho, u, v, p)]
    with _open(path) as fh:
        fh.write("x,y,rho,u,v,p\n")
        _rows(fh, cols)
    return path


def write_vtk_2d(path, x, y, rho, u, v, p, title="shallow water"):
    """Legacy ASCII ``STRUCTURED_POINTS`` file with point data on cell centres."""
    nx, ny = len(x), len(y)
    dx = x[1] - x[0] if nx > 1 else 1.0
    dy = y[1] - y[0] if ny > 1 else 1.0

    def flat(a):
        # VTK orders points with x varying fastest
        return np.asarray(a, dtype=float).T.ravel()

    with _open(path) as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(title.replace("\n", " ")[:255] + "\n")
        fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} 1\n")
        fh.write(f"ORIGIN {NUMBER % x[0]} {NUMBER % y[0]} 0\n")
        fh.write(f"SPACING {NUMBER % dx} {NUMBER % dy} 1\n")
        fh.write(f"POINT_DATA {nx * ny}\n")
        for name, arr in (("rho", rho), ("pressure", p)):
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            np.savetxt(fh, flat(arr)[:, None], fmt=NUMBER)
        fh.write("VECTORS velocity double\n")
        vel = np.column_stack([flat(u), flat(v), np.zeros(nx * ny)])
        np.savetxt(fh, vel, fmt=NUMBER, delimiter=" ")
    return path


def read_csv(path):
    """Columns of a file written above, as a dict of arrays."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, k] for k, name in enumerate(header)}
