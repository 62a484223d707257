import numpy as np
import pytest

from grhd.scenarios import (A_R, SCENARIO_IDS, icf1d_scenario, ReferenceFormatError, ReferenceProfile,
                            build_scenario, interpolate, load_reference, marshak_scenario,
                            rankine_hugoniot, shock_case, shock_params, write_reference)
from grhd.thermo import check_admissible


@pytest.mark.parametrize("name", SCENARIO_IDS)
def test_initial_data_admissible(name):
    scn = build_scenario(name, 33)
    assert check_admissible(scn.U0, scn.params).in_A
    assert scn.U0.shape == (4, 33)


def test_marshak_setup():
    scn = marshak_scenario(65)
    assert scn.er_dirichlet == {0: pytest.approx(1.3720172e-2)}
    assert not scn.hydro_enabled and scn.cfl == 0.25
    assert scn.mesh.nodes[-1] == pytest.approx(0.025)
    np.testing.assert_allclose(scn.U0[3], A_R * 0.01**4)


@pytest.mark.parametrize("mach, rho1, T1", [(1.2, 1.29732, 0.119476), (3.0, 3.00179, 0.366275),
                                            (30.0, 6.0313, 6.5768)])
def test_rankine_hugoniot_end_states(mach, rho1, T1):
    params = shock_params(shock_case(mach))
    (r0, v0, t0), (r, v, T) = rankine_hugoniot(mach, params)
    assert r == pytest.approx(rho1, rel=2e-5)
    assert T == pytest.approx(T1, rel=2e-5)
    # jump conditions with equilibrium radiation
    g, cv, a = params.gamma, params.cv_tilde, params.a_r
    def fluxes(rho, v, T):
        p, er = (g - 1) * rho * cv * T, a * T**4
        return np.array([rho * v, rho * v * v + p + er / 3,
                         v * (0.5 * rho * v * v + rho * cv * T + p + 4 * er / 3)])
    np.testing.assert_allclose(fluxes(r, v, T), fluxes(r0, v0, t0), rtol=1e-12)


def test_unknown_ids():
    with pytest.raises(KeyError):
        build_scenario("nope", 10)
    with pytest.raises(KeyError):
        shock_case(7.0)


def test_reference_round_trip(tmp_path):
    x = np.linspace(0.0, 1.0, 5)
    prof = ReferenceProfile(x, 1 + x, x / 3, 0.1 + x, 1e-3 * (1 + x))
    path = tmp_path / "ref.csv"
    write_reference(prof, path)
    back = load_reference(path)
    for k in ("x", "rho", "v", "T", "Er"):
        np.testing.assert_array_equal(getattr(back, k), getattr(prof, k))


def test_reference_interpolation(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("# comment\nx,rho,v,T,Er,extra\n0,1,0,1,2,9\n1,3,2,3,4,9\n")
    prof = load_reference(path)
    assert [float(q) for q in interpolate(prof, 0.5)] == [2.0, 1.0, 2.0, 3.0]
    assert [float(q) for q in interpolate(prof, 7.0)] == [3.0, 2.0, 3.0, 4.0]


@pytest.mark.parametrize("text, msg", [
    ("x,rho,v,T\n0,1,0,1\n1,1,0,1\n", "header"),
    ("x,rho,v,T,Er\n0,1,0,1,1\n1,1,0,1\n", "line 3"),
    ("x,rho,v,T,Er\n0,1,0,1,1\n0,1,0,1,1\n", "line 3"),
    ("x,rho,v,T,Er\n0,1,0,1,1\n1,a,0,1,1\n", "line 3"),
])
def test_reference_errors(tmp_path, text, msg):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ReferenceFormatError, match=msg):
        load_reference(path)


def test_missing_reference(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_reference(tmp_path / "none.csv")


def test_shock_from_reference(tmp_path):
    params = shock_params(shock_case(3.0))
    (r0, v0, t0), (r1, v1, t1) = rankine_hugoniot(3.0, params)
    x = np.array([-0.02, 0.0, 0.02])
    prof = ReferenceProfile(x, np.array([r0, r0, r1]), np.array([v0, v0, v1]),
                            np.array([t0, t0, t1]), A_R * np.array([t0, t0, t1]) ** 4)
    scn = build_scenario("shock-M3", 11, prof)
    assert scn.reference is prof
    assert scn.U0[0, -1] == pytest.approx(r1)


def test_icf_domain_and_regions():
    scn = icf1d_scenario(601)
    x, rho = scn.mesh.nodes, scn.U0[0]
    assert x[0] == -0.3 and x[-1] == 0.3
    assert rho[np.abs(x) < 0.13].max() == 5e-4 and rho[np.abs(x) > 0.15].max() == 1e-4
    assert icf1d_scenario(601, r_ext=0.6).mesh.nodes[-1] == 0.6
    with pytest.raises(ValueError):
        icf1d_scenario(11, r_ext=0.1)
