"""Error norms and shock diagnostics for computed fields."""
from __future__ import annotations

import math

import numpy as np


class MetricUnavailable(ValueError):
    """The field has no discontinuity strong enough to measure."""


# a jump must exceed this fraction of max(rho) to count as a discontinuity
JUMP_THRESHOLD = 0.05


def l1_error(field, reference, cell_volume=None, mask=None):
    """Cell-averaged L1 norm of ``field - reference`` over the domain measure.

    ``reference`` is an array of the same shape or a callable returning one.
    With uniform cells the result is simply the mean absolute difference;
    ``mask`` selects the cells taking part (obstacles excluded).
    """
    field = np.asarray(field, dtype=float)
    ref = np.asarray(reference() if callable(reference) else reference, dtype=float)
    if field.shape != ref.shape:
        raise ValueError(f"shape mismatch: {field.shape} vs {ref.shape}")
    diff = np.abs(field - ref)
    w = np.ones_like(diff) if cell_volume is None else np.broadcast_to(np.asarray(cell_volume, float), diff.shape)
    if mask is not None:
        m = np.asarray(mask, bool)
        diff, w = diff[m], w[m]
    return float(np.sum(diff * w) / np.sum(w))


def shock_position_1d(x, rho, region=None, halo=3):
    """Sub-cell location of the strongest jump in a 1D density profile.

    The face with maximum ``|drho|`` is found first.  The levels ``halo``
    cells either side of it define a mid level and the position is where the
    piecewise linear profile crosses that level, searching outward from the
    face.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    d = np.diff(rho)
    faces = np.arange(d.size)
    if region is not None:
        xm = 0.5 * (x[:-1] + x[1:])
        faces = faces[(xm >= region[0]) & (xm <= region[1])]
    if faces.size == 0:
        raise MetricUnavailable("empty probe region")
    i = int(faces[np.argmax(np.abs(d[faces]))])
    lo = max(i - halo, 0)
    hi = min(i + 1 + halo, rho.size - 1)
    # a captured shock is smeared over a few cells: judge the jump across the halo
    if abs(rho[hi] - rho[lo]) < JUMP_THRESHOLD * float(np.max(rho)):
        raise MetricUnavailable(f"largest jump {abs(rho[hi] - rho[lo]):.3g} is below threshold")
    mid = 0.5 * (rho[lo] + rho[hi])
    best = None
    for j in range(lo, hi):
        a, b = rho[j] - mid, rho[j + 1] - mid
        if a == 0.0 or a * b < 0:
            frac = 0.0 if a == 0.0 else a / (a - b)
            pos = x[j] + frac * (x[j + 1] - x[j])
            if best is None or abs(j - i) < best[0]:
                best = (abs(j - i), pos)
    return best[1]


def rarefaction_endpoints(x, rho, rho_outer, rho_inner, window=(0.25, 0.75)):
    """Head and tail of a rarefaction fan by tangent extrapolation.

    Inside an exact shallow-water fan the sound speed, hence ``sqrt(rho)``,
    is linear in ``x``.  A straight line is fitted to ``sqrt(rho)`` on the
    cells whose normalized amplitude lies in ``window`` and is extrapolated
    to the undisturbed level (head) and to the plateau level (tail).
    Returns ``(x_head, x_tail)``.
    """
    x = np.asarray(x, dtype=float)
    c = np.sqrt(np.asarray(rho, dtype=float))
    c_out, c_in = math.sqrt(rho_outer), math.sqrt(rho_inner)
    if c_out == c_in:
        raise MetricUnavailable("no rarefaction between equal levels")
    level = (c - c_in) / (c_out - c_in)
    sel = (level > window[0]) & (level < window[1])
    if np.count_nonzero(sel) < 2:
        raise MetricUnavailable("too few cells inside the fan window")
    slope, icpt = np.polyfit(x[sel], c[sel], 1)
    if slope == 0.0:
        raise MetricUnavailable("flat profile")
    return (c_out - icpt) / slope, (c_in - icpt) / slope


def shock_angle_2d(rho, x, y, x_range=(1.1, 1.6), mask=None, halo=3):
    """Angle in degrees (from the x axis) of a front crossing the columns in ``x_range``.

    In every column the face with the largest ``|drho/dy|`` is taken as a
    front point, provided the density change across ``halo`` cells either
    side of it is a real jump; a least-squares line through those points
    gives the angle.
    """
    rho = np.asarray(rho, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cols = np.where((x >= x_range[0]) & (x <= x_range[1]))[0]
    if cols.size < 2:
        raise MetricUnavailable("fewer than two columns in the probe range")
    jump_tol = JUMP_THRESHOLD * float(np.max(rho if mask is None else rho[np.asarray(mask, bool)]))
    px, py = [], []
    ym = 0.5 * (y[:-1] + y[1:])
    for i in cols:
        d = np.abs(np.diff(rho[i]))
        if mask is not None:
            m = np.asarray(mask, bool)[i]
            d = np.where(m[:-1] & m[1:], d, 0.0)
        j = int(np.argmax(d))
        lo, hi = max(j - halo, 0), min(j + 1 + halo, d.size)
        if abs(rho[i, hi] - rho[i, lo]) >= jump_tol:
            px.append(x[i])
            py.append(ym[j])
    if len(px) < 2:
        raise MetricUnavailable("no front found in the probe range")
    slope = np.polyfit(px, py, 1)[0]
    return math.degrees(math.atan(slope))


def bow_shock(rho, x, mask=None, x_max=0.6):
    """Strongest streamwise relative density jump between adjacent columns left of ``x_max``.

    Returns ``(x_face, jump)`` where ``jump = rho[i+1]/rho[i] - 1`` maximized
    over rows and faces with both cells fluid.
    """
    rho = np.asarray(rho, dtype=float)
    x = np.asarray(x, dtype=float)
    fluid = np.ones(rho.shape, bool) if mask is None else np.asarray(mask, bool)
    faces = np.where(0.5 * (x[:-1] + x[1:]) < x_max)[0]
    if faces.size == 0:
        raise MetricUnavailable("no columns upstream of x_max")
    a = rho[faces]
    b = rho[faces + 1]
    ok = fluid[faces] & fluid[faces + 1]
    jump = np.where(ok, b / np.where(ok, a, 1.0) - 1.0, -np.inf)
    i, j = np.unravel_index(int(np.argmax(jump)), jump.shape)
    face = faces[i]
    return float(0.5 * (x[face] + x[face + 1])), float(jump[i, j])
