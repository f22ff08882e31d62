import json
import math
import os
import warnings

import numpy as np
import pytest

from swlbm.harness import ConfigError, MetricUnavailable, config_from_dict, l1_error, parse_config, run_case
from swlbm.harness.cases import builtin_config, builtin_names, reflection_states
from swlbm.harness.cli import EXIT_ABORT, EXIT_INVALID, EXIT_OK, main
from swlbm.harness.io import read_csv, write_csv_1d, write_csv_2d, write_vtk_2d
from swlbm.harness.metrics import bow_shock, rarefaction_endpoints, shock_angle_2d, shock_position_1d
from swlbm.harness.runner import OUTPUT_ENV
from swlbm.reference.reflection import DOMAIN, reflected_front_angle, reflection_exact

BLOWUP = {"kind": "riemann1d", "scheme": {"lambda": 1.0}, "name": "blowup"}


# -- config -------------------------------------------------------------------


def test_defaults_and_rate_broadcast():
    cfg = parse_config('{"kind": "riemann1d"}')
    assert cfg.solver == "lbm" and cfg.mesh.n == 80
    assert cfg.scheme.lam == 8.0 and cfg.scheme.a == 0.15
    assert cfg.rates() == (1.8, 1.8, 1.8)
    assert cfg.time.t_end == 0.25
    emery = parse_config('{"kind": "emery2d"}')
    assert (emery.mesh.nx, emery.mesh.ny) == (480, 160)
    assert emery.output.format == "vtk"


def test_user_mesh_replaces_default():
    cfg = config_from_dict({"kind": "reflection2d", "mesh": {"nx": 70, "ny": 40}})
    assert (cfg.mesh.nx, cfg.mesh.ny) == (70, 40)


@pytest.mark.parametrize(
    "raw, path",
    [
        ({"kind": "riemann1d", "scheme": {"a": -1}}, "scheme.a"),
        ({"kind": "riemann1d", "scheme": {"s": 2.5}}, "scheme.s"),
        ({"kind": "riemann1d", "scheme": {"bogus": 1}}, "scheme.bogus"),
        ({"kind": "riemann1d", "payload": {"left": [2]}}, "payload.left"),
        ({"kind": "riemann1d", "phys": {"gamma": 1.4}}, "phys.gamma"),
        ({"kind": "warp"}, "kind"),
        ({"kind": "riemann1d", "output": {"format": "vtk"}}, "output.format"),
        ({"kind": "emery2d", "solver": "exact"}, "solver"),
        ({"kind": "reflection2d", "mesh": {"nx": 100, "ny": 80}}, "mesh"),
    ],
)
def test_invalid_configs_name_the_key(raw, path):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(raw)
    assert str(exc.value).startswith(path)


def test_bad_json():
    with pytest.raises(ConfigError):
        parse_config("{kind: riemann1d")


def test_every_builtin_validates():
    for name in builtin_names():
        assert builtin_config(name).name == name


# -- metrics ------------------------------------------------------------------


def test_l1_error_basics():
    a = np.linspace(0, 1, 11)
    assert l1_error(a, a) == 0.0
    assert l1_error(a, a + 0.5) == pytest.approx(0.5)
    mask = np.ones(11, bool)
    mask[0] = False
    b = a.copy()
    b[0] += 10
    assert l1_error(b, a, mask=mask) == 0.0


def test_shock_position_on_synthetic_step():
    x = (np.arange(100) + 0.5) / 100
    for xs in (0.3137, 0.5, 0.7251):
        rho = np.where(x < xs, 1.5, 0.5)
        assert abs(shock_position_1d(x, rho) - xs) <= 0.5 / 100


def test_smooth_field_has_no_shock():
    x = np.linspace(0, 1, 50)
    with pytest.raises(MetricUnavailable):
        shock_position_1d(x, 1 + 0.01 * np.sin(x))


def test_rarefaction_endpoints_on_exact_fan():
    from swlbm.reference import exact_riemann

    sol = exact_riemann((2.0, 0.0), (0.5, 0.0))
    n, t = 400, 0.25
    x = (np.arange(n) + 0.5) / n
    rho = sol.sample((x - 0.5) / t)[0]
    keep = x < 0.5 + sol.u_star * t
    head, tail = rarefaction_endpoints(x[keep], rho[keep], 2.0, sol.rho_star)
    assert head == pytest.approx(0.5 + sol.left_speeds[0] * t, abs=2 / n)
    assert tail == pytest.approx(0.5 + sol.left_speeds[1] * t, abs=2 / n)


def test_angle_of_the_exact_reflection_field():
    nx, ny = 140, 80
    x = (np.arange(nx) + 0.5) * DOMAIN[0] / nx
    y = (np.arange(ny) + 0.5) * DOMAIN[1] / ny
    X, Y = np.meshgrid(x, y, indexing="ij")
    rho = reflection_exact(X, Y)[0]
    got = shock_angle_2d(rho, x, y)
    assert abs(got - math.degrees(reflected_front_angle())) <= 1.0


def test_smeared_weak_front_is_found():
    # a 15% jump spread over about eight cells, as a captured shock looks
    x = (np.arange(70) + 0.5) / 40
    y = (np.arange(40) + 0.5) / 40
    X, Y = np.meshgrid(x, y, indexing="ij")
    rho = 1.2 + 0.1 * np.tanh((Y - 1.25 * (X - 1.0)) / 0.05)
    assert abs(shock_angle_2d(rho, x, y) - math.degrees(math.atan(1.25))) <= 0.5
    line = rho[:, 20]
    assert shock_position_1d(x, line[::-1]) > 0


def test_bow_shock_on_synthetic_front():
    x = (np.arange(60) + 0.5) / 20
    rho = np.ones((60, 10))
    rho[x > 0.4, :] = 1.8
    xb, jump = bow_shock(rho, x, x_max=0.6)
    assert xb == pytest.approx(0.4, abs=0.05) and jump == pytest.approx(0.8)
    assert bow_shock(np.ones((60, 10)), x)[1] == 0.0
    with pytest.raises(MetricUnavailable):
        bow_shock(rho, x, x_max=0.0)


# -- io -----------------------------------------------------------------------


def test_csv_1d_layout_and_round_trip(tmp_path):
    x = np.array([0.125, 0.375, 0.625, 0.875])
    rho = np.array([1.0, 1.0 / 3.0, 2.0, math.pi])
    path = write_csv_1d(tmp_path / "a.csv", x, rho, 0 * x, 0.5 * rho**2)
    lines = open(path).read().splitlines()
    assert len(lines) == 5 and lines[0] == "x,rho,u,p"
    back = read_csv(path)
    np.testing.assert_allclose(back["rho"], rho, rtol=1e-10)


def test_csv_2d_is_x_fastest(tmp_path):
    x, y = np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0])
    rho = np.arange(6.0).reshape(3, 2)
    path = write_csv_2d(tmp_path / "b.csv", x, y, rho, rho, rho, rho)
    back = read_csv(path)
    np.testing.assert_array_equal(back["x"], [0, 1, 2, 0, 1, 2])
    np.testing.assert_array_equal(back["rho"], rho.T.ravel())


def test_vtk_header(tmp_path):
    x, y = np.array([0.5, 1.5, 2.5]), np.array([0.5, 1.5])
    z = np.ones((3, 2))
    path = write_vtk_2d(tmp_path / "c.vtk", x, y, z, z, z, z)
    text = open(path).read()
    assert text.startswith("# vtk DataFile Version")
    for token in ("ASCII", "DATASET STRUCTURED_POINTS", "DIMENSIONS 3 2 1", "POINT_DATA 6",
                  "SCALARS rho double", "VECTORS velocity double"):
        assert token in text


# -- runner -------------------------------------------------------------------


def test_uniform_case_is_exact(tmp_path):
    rep = run_case(builtin_config("uniform"), out_dir=tmp_path)
    assert rep.ok and rep.metrics["l1_rho"] < 1e-13
    assert os.path.exists(rep.files[0])


def test_riemann_reports(tmp_path):
    for solver in ("lbm", "godunov", "exact"):
        rep = run_case(builtin_config("riemann1d", solver=solver), out_dir=tmp_path)
        assert rep.ok
        m = rep.metrics
        assert abs(m["shock_error_dx"]) < 2
        if solver == "exact":
            assert m["l1_rho"] < 0.01
        else:
            assert m["l1_rho"] < 0.05


def test_env_var_sets_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    rep = run_case(builtin_config("uniform"))
    assert rep.files[0].startswith(str(tmp_path / "env"))
    rep = run_case(builtin_config("uniform"), out_dir=tmp_path / "cli")
    assert str(rep.files[0]).startswith(str(tmp_path / "cli"))


def test_blow_up_is_aborted_not_raised(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = run_case(config_from_dict(BLOWUP), out_dir=tmp_path)
    assert rep.status == "aborted" and "BlowUpError" in rep.error
    assert rep.files == []


def test_reflection_states_from_config():
    st = reflection_states(builtin_config("reflection2d"))
    assert st.left.rho == 1.0


# -- command line -------------------------------------------------------------


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["cases", "list"]) == EXIT_OK
    assert main(["cases", "show", "emery2d"]) == EXIT_OK
    assert main(["cases", "show", "nope"]) == EXIT_INVALID
    assert main(["run", "uniform", "--out", str(tmp_path)]) == EXIT_OK
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_INVALID
    assert main(["frobnicate"]) == EXIT_INVALID

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "riemann1d", "scheme": {"s": 3}}))
    assert main(["run", str(bad)]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "scheme.s" in err

    blow = tmp_path / "blow.json"
    blow.write_text(json.dumps(BLOWUP))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert main(["run", str(blow), "--out", str(tmp_path)]) == EXIT_ABORT


def test_cli_exact_riemann(tmp_path, capsys):
    out = tmp_path / "ex.csv"
    code = main(["exact-riemann", "--left", "2,0", "--right", "0.5,0", "--time", "0.25", "--csv", str(out)])
    assert code == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["rho_star"] == pytest.approx(1.1034938538, abs=1e-9)
    assert len(read_csv(out)["x"]) == 80
    # a vacuum is a solver abort, bad input is a validation failure
    assert main(["exact-riemann", "--left", "1,-5", "--right", "1,5", "--time", "1"]) == EXIT_ABORT
    assert main(["exact-riemann", "--left", "1", "--right", "1,5", "--time", "1"]) == EXIT_INVALID


def test_cli_compare(capsys, tmp_path):
    assert main(["compare", "riemann1d", "riemann1d-exact", "--out", str(tmp_path)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert 0 < rep["l1_rho"] < 0.05


def test_output_files_are_deterministic(tmp_path):
    a = run_case(builtin_config("riemann1d"), out_dir=tmp_path / "a")
    b = run_case(builtin_config("riemann1d"), out_dir=tmp_path / "b")
    assert open(a.files[0], "rb").read() == open(b.files[0], "rb").read()
