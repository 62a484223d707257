import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grhd.grid1d import Mesh1D, build_ops
from grhd.parabolic import (ConvergenceError, ParabolicConfig, matter_temperature,
                            newton_T_star, parabolic_step, solve_radiation_system,
                            temperature_closure, thomas)
from grhd.scenarios import icf1d_scenario
from grhd.thermo import OpacityLaw, OracleParams
from fields import random_case
from oracles import single_node_relaxation

# rho c_v = 0.15, a_r = 1, dt sigma_a c = 1
ONE = OracleParams(cv_tilde=0.15, a_r=1.0, c_light=1.0, opacity=OpacityLaw(1.0, sigma_t0=1e300))


def _one_node():
    # three nodes decoupled by an opaque stiffness; node 1 is the test node
    ops = build_ops(Mesh1D.uniform(0.0, 2.0, 3))
    U = np.array([[1.0] * 3, [0.0] * 3, [0.15] * 3, [0.0] * 3])
    return U, ops


def test_thomas_matches_dense():
    rng = np.random.default_rng(0)
    n = 9
    lo, up = -rng.random(n - 1), -rng.random(n - 1)
    d = 3.0 + rng.random(n)
    A = np.diag(d) + np.diag(up, 1) + np.diag(lo, -1)
    b = rng.random(n)
    np.testing.assert_allclose(thomas(lo, d, up, b), np.linalg.solve(A, b), rtol=1e-13)


def test_single_node_linear_solve():
    U, ops = _one_node()
    E = solve_radiation_system(U, np.ones(3), ops, ONE, 1.0)
    assert E[1] == pytest.approx(0.15 / 1.3, rel=1e-14)


def test_single_node_newton_oracle():
    E = 0.15 / 1.3
    T = newton_T_star(1.0, E, 1.0, 1.0, ONE, 1.0, tol=1e-15)
    f = lambda t: 0.15 * (t - 1.0) + (t**4 - E)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    assert T == pytest.approx(0.5 * (lo + hi), abs=1e-12)


def test_single_node_closure():
    U, ops = _one_node()
    E = np.full(3, 0.15 / 1.3)
    T = temperature_closure(np.ones(3), E, U, ONE, 1.0)
    assert T[1] == pytest.approx(0.15 / 0.65, rel=1e-14)
    assert 0.15 * T[1] + E[1] == pytest.approx(0.15, rel=1e-14)


def test_single_node_step_one_sweep():
    U, ops = _one_node()
    res = parabolic_step(U, np.ones(3), ops, ONE, 1.0, ParabolicConfig(eps_picard=1.0))
    assert res.picard_iterations == 1
    assert res.T[1] == pytest.approx(0.15 / 0.65, abs=1e-12)
    assert res.U[3, 1] == pytest.approx(0.15 / 1.3, abs=1e-12)
    assert res.U[2, 1] + res.U[3, 1] == pytest.approx(0.15, abs=1e-14)


def test_single_node_step_converged():
    U, ops = _one_node()
    res = parabolic_step(U, np.ones(3), ops, ONE, 1.0, ParabolicConfig(eps_picard=1e-12))
    T_ref, E_ref = single_node_relaxation(0.15, 1.0, 0.0, 1.0, 1.0, res.picard_iterations)
    assert res.T[1] == pytest.approx(T_ref, rel=1e-9)
    assert res.U[3, 1] == pytest.approx(E_ref, rel=1e-9)
    assert res.U[2, 1] + res.U[3, 1] == pytest.approx(0.15, rel=1e-13)


def test_equilibrium_is_fixed_point():
    P = OracleParams(opacity=OpacityLaw(300.0, t_exp=3.0))
    ops = build_ops(Mesh1D.uniform(0.0, 1.0, 8))
    T = 0.7
    U = np.tile(np.array([[2.0], [0.0], [2.0 * P.cv_tilde * T], [P.a_r * T**4]]), (1, 8))
    res = parabolic_step(U, np.full(8, T), ops, P, 1e-3)
    assert res.picard_iterations == 1
    np.testing.assert_allclose(res.U, U, rtol=1e-13)


def test_no_coupling_is_identity():
    P = OracleParams(opacity=OpacityLaw(0.0, sigma_t0=1e300))
    rng = np.random.default_rng(1)
    U, ops, _ = random_case(rng, "rough", 10)
    T = matter_temperature(U, P)
    res = parabolic_step(U, T, ops, P, 0.3)
    np.testing.assert_allclose(res.U, U, rtol=1e-13)
    assert newton_T_star(0.5, 1.0, 1.0, 0.7, P, 1.0, tol=1e-14) == 0.7


def test_newton_equilibrium_root():
    P = OracleParams(opacity=OpacityLaw(7.0))
    T = newton_T_star(0.3, P.a_r * 0.8**4, 1.0, 0.8, P, 0.1, tol=1e-14)
    assert T == 0.8


def test_picard_budget_error():
    P = OracleParams(opacity=OpacityLaw(300.0, t_exp=3.0))
    ops = build_ops(Mesh1D.uniform(0.0, 1.0, 8))
    U = np.tile(np.array([[2.0], [0.0], [2.0 * P.cv_tilde * 0.01], [P.a_r]]), (1, 8))
    with pytest.raises(ConvergenceError, match="Picard"):
        parabolic_step(U, np.full(8, 0.01), ops, P, 1.0,
                       ParabolicConfig(eps_picard=1e-14, max_picard=1))


def test_config_validation():
    with pytest.raises(ValueError):
        ParabolicConfig(eps_picard=0.0)
    with pytest.raises(ValueError):
        ParabolicConfig(max_picard=0)


def _random_parabolic(rng):
    U, ops, params = random_case(rng)
    law = [OpacityLaw(10.0 ** rng.uniform(-2, 3)),
           OpacityLaw(300.0, t_exp=3.0),
           OpacityLaw(500.0, rho_exp=1.0, t_exp=3.5, t_ref=0.1)][rng.integers(3)]
    params = OracleParams(gamma=params.gamma, cv_tilde=params.cv_tilde, opacity=law)
    dt = 10.0 ** rng.uniform(-6, 1)
    eps = 10.0 ** rng.uniform(-8, -1)
    return U, ops, params, dt, eps


@given(st.integers(0, 2**32 - 1))
def test_positivity_lower_bound_and_conservation(seed):
    rng = np.random.default_rng(seed)
    U, ops, params, dt, eps = _random_parabolic(rng)
    T_h = matter_temperature(U, params)
    res = parabolic_step(U, T_h, ops, params, dt, ParabolicConfig(eps_picard=eps))
    E = res.U[3]
    assert np.all(E > 0.0) and np.all(res.T > 0.0)
    bound = np.minimum(U[3], params.a_r * res.T_star_old**3 * T_h)
    assert E.min() >= bound.min()
    e0 = ops.m @ (U[2] + U[3])
    # rounding floor: energy moved by diffusion within the step, not only the energy content
    K = res.K
    moved = dt * np.sum(np.abs(K.diag * E) + np.abs(np.r_[K.off * E[1:], 0.0])
                        + np.abs(np.r_[0.0, K.off * E[:-1]]))
    assert abs(ops.m @ (res.U[2] + res.U[3]) - e0) <= 1e-12 * (e0 + moved)


def test_dirichlet_row_and_influx():
    P = OracleParams(opacity=OpacityLaw(300.0, t_exp=3.0))
    n = 20
    ops = build_ops(Mesh1D.uniform(0.0, 0.025, n))
    T0 = 0.01
    U = np.tile(np.array([[2.0], [0.0], [2.0 * P.cv_tilde * T0], [P.a_r * T0**4]]), (1, n))
    res = parabolic_step(U, np.full(n, T0), ops, P, 1e-4, er_dirichlet={0: P.a_r})
    assert res.U[3, 0] == P.a_r
    dE = ops.m @ (res.U[2] + res.U[3]) - ops.m @ (U[2] + U[3])
    assert dE == pytest.approx(res.influx, rel=1e-11)


def test_conservation_when_diffusion_dwarfs_content():
    # thin hot exterior and a large first step: diffusion moves ~1e5 times the energy held
    scn = icf1d_scenario(257)
    ops = build_ops(scn.mesh)
    U, P = scn.U0, scn.params
    res = parabolic_step(U, matter_temperature(U, P), ops, P, 4.77e-3,
                         ParabolicConfig(sigma_ref=scn.sigma_ref, er_ref=scn.er_ref),
                         scn.er_dirichlet)
    content = ops.m @ (U[2] + U[3])
    moved = 4.77e-3 * np.sum(np.abs(res.K.diag * res.U[3]))
    assert moved > 1e4 * content
    dE = ops.m @ (res.U[2] + res.U[3]) - content
    assert abs(dE - res.influx) <= 1e-13 * content
