import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swlbm.boundaries import Dirichlet, Outflow, Periodic, Sides1D, Wall
from swlbm.entropy_kinetics import KineticParams, equilibrium_1d
from swlbm.lbm1d import (
    BlowUpError,
    Field1D,
    Grid1D,
    collide,
    moments_from_populations,
    populations_from_moments,
    relaxation_rates,
    run_1d,
    stream,
)

KP = KineticParams(0.15, 8.0)
LAM = KP.lam


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(3, 0.1, 1.0)
    with pytest.raises(ValueError):
        Grid1D(10, 0.0, 1.0)
    g = Grid1D(10, 0.1, 8.0)
    assert g.dt == pytest.approx(0.0125)
    assert g.x[0] == pytest.approx(0.05)


def test_relaxation_rates():
    assert relaxation_rates(1.8, 3) == (1.8, 1.8, 1.8)
    with pytest.raises(ValueError):
        relaxation_rates(2.5, 3)
    with pytest.raises(ValueError):
        relaxation_rates([1.0, 1.0], 3)


def test_moment_examples():
    m = moments_from_populations(np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0]), LAM)
    assert (m.rho, m.j_rho, m.eps_rho, m.q, m.j_q) == (1.0, 0.0, -2 * LAM**2, 0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_moment_round_trip(vals):
    f = np.array(vals[:3])
    g = np.array(vals[3:])
    f2, g2 = populations_from_moments(moments_from_populations(f, g, LAM), LAM)
    np.testing.assert_allclose(f2, f, atol=1e-14)
    np.testing.assert_allclose(g2, g, atol=1e-14)


def test_rest_equilibrium_fluxes():
    eq = equilibrium_1d((1.0, 0.0), KP)
    m = moments_from_populations(eq.f_eq, eq.g_eq, LAM)
    assert m.j_rho == 0.0
    assert m.j_q == pytest.approx(0.5)


def test_collide_limits():
    rng = np.random.default_rng(0)
    rho = rng.uniform(0.8, 1.2, 16)
    q = rng.uniform(-0.2, 0.2, 16)
    eq = equilibrium_1d((rho, rho * q), KP)
    f = eq.f_eq + rng.normal(0, 1e-3, eq.f_eq.shape)
    g = eq.g_eq + rng.normal(0, 1e-3, eq.g_eq.shape)
    rho, q = f.sum(0), g.sum(0)
    fc, gc = collide(f, g, KP, 1.0)
    eq = equilibrium_1d((rho, q), KP)
    np.testing.assert_allclose(fc, eq.f_eq, atol=1e-14)
    np.testing.assert_allclose(gc, eq.g_eq, atol=1e-14)
    f0, g0 = collide(f, g, KP, 0.0)
    # identity up to the round-off of the moment transform
    np.testing.assert_allclose(f0, f, rtol=0, atol=1e-15)
    np.testing.assert_allclose(g0, g, rtol=0, atol=1e-15)


def test_collide_single_moment():
    eq = equilibrium_1d((np.array([1.0]), np.array([0.3])), KP)
    m = moments_from_populations(eq.f_eq, eq.g_eq, LAM)
    pert = m._replace(j_rho=m.j_rho + 0.01)
    f, g = populations_from_moments(pert, LAM)
    fc, gc = collide(f, g, KP, 1.8)
    post = moments_from_populations(fc, gc, LAM)
    assert post.j_rho[0] == pytest.approx(pert.j_rho[0] + 1.8 * (0.3 - pert.j_rho[0]), abs=1e-14)
    for name in ("rho", "eps_rho", "q", "j_q"):
        assert getattr(post, name)[0] == pytest.approx(getattr(m, name)[0], abs=1e-13)


def test_collide_reports_bad_density():
    f = np.array([[0.1, 0.1], [0.1, -1.0], [0.1, 0.1]])
    g = np.zeros((2, 2))
    with pytest.raises(BlowUpError) as exc:
        collide(f, g, KP, 1.8, step=7)
    assert exc.value.cell == 1 and exc.value.step == 7


def test_collide_partition_is_bitwise_identical():
    rng = np.random.default_rng(5)
    rho = rng.uniform(0.5, 2, 103)
    q = rng.uniform(-1, 1, 103)
    field = Field1D.at_equilibrium(rho, q, KP)
    f = field.f + rng.normal(0, 1e-3, field.f.shape)
    a = collide(f, field.g, KP, 1.8, workers=1)
    b = collide(f, field.g, KP, 1.8, workers=4)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_stream_periodic_permutes():
    f = np.arange(15.0).reshape(3, 5)
    g = np.arange(10.0).reshape(2, 5)
    fs, gs = stream(f, g, Sides1D(), KP)
    np.testing.assert_array_equal(fs[1], np.roll(f[1], 1))
    np.testing.assert_array_equal(fs[2], np.roll(f[2], -1))
    np.testing.assert_array_equal(gs[0], np.roll(g[0], 1))


def test_stream_wall_bounce_back():
    f = np.zeros((3, 4))
    g = np.zeros((2, 4))
    f[1, -1] = 1.0
    g[0, -1] = 0.5
    fs, gs = stream(f, g, Sides1D(Wall(), Wall()), KP)
    assert fs[2, -1] == 1.0
    assert gs[1, -1] == -0.5


def test_stream_dirichlet_and_outflow():
    f = np.ones((3, 4))
    g = np.zeros((2, 4))
    eq = equilibrium_1d((2.0, 0.0), KP)
    fs, _ = stream(f, g, Sides1D(Dirichlet((2.0, 0.0)), Outflow()), KP)
    assert fs[1, 0] == pytest.approx(eq.f_eq[1])
    assert fs[2, -1] == 1.0


@pytest.mark.parametrize("s", [0.0, 0.7, 1.0, 1.8, 2.0])
def test_uniform_fixed_point(s):
    grid = Grid1D(32, 1 / 32, LAM)
    tr = run_1d(1.3, 0.4, grid, KP, s, n_steps=100)
    r, q = tr.snapshots[-1]
    np.testing.assert_allclose(r, 1.3, rtol=1e-13)
    np.testing.assert_allclose(q, 0.4, rtol=1e-13)


def test_uniform_rest_beside_walls():
    grid = Grid1D(16, 1 / 16, LAM)
    tr = run_1d(1.0, 0.0, grid, KP, 1.8, n_steps=100, sides=Sides1D(Wall(), Wall()))
    r, q = tr.snapshots[-1]
    np.testing.assert_allclose(r, 1.0, atol=1e-13)
    np.testing.assert_allclose(q, 0.0, atol=1e-13)


def test_closed_tube_conserves_mass():
    grid = Grid1D(64, 1 / 64, LAM)
    x = grid.x
    rho = 1 + 0.3 * np.exp(-50 * (x - 0.5) ** 2)
    tr = run_1d(rho, 0.0, grid, KP, 1.8, n_steps=500, sides=Sides1D(Wall(), Wall()))
    assert tr.mass_drift() < 1e-13


def test_snapshot_cadence_and_warning():
    grid = Grid1D(20, 0.05, LAM)
    tr = run_1d(1.0, 0.0, grid, KP, 1.8, n_steps=25, output_every=10)
    assert tr.steps == [0, 10, 20, 25]
    slow = KineticParams(0.15, 1.2)
    with pytest.warns(RuntimeWarning):
        run_1d(1.0, 0.5, Grid1D(20, 0.05, 1.2), slow, 1.0, n_steps=2)


def test_blow_up_is_reported():
    grid = Grid1D(80, 1 / 80, 1.0)
    kp = KineticParams(0.15, 1.0)
    x = grid.x
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(BlowUpError):
            run_1d(np.where(x < 0.5, 2.0, 0.5), 0.0, grid, kp, 1.8, n_steps=50)


def test_periodic_requires_both_sides():
    with pytest.raises(ValueError):
        Sides1D(Periodic(), Wall())
