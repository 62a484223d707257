"""Linearized backward-Euler radiation/matter exchange and diffusion.

One step eliminates the matter temperature from the energy exchange,
solves the tridiagonal M-matrix system for E_r, re-estimates the
linearization temperature T* node by node with Newton, and repeats
(Picard) until T* settles. The final temperature uses the penultimate
T*, which is what makes the step exactly energy conservative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .grid1d import GAUSS_W, GAUSS_X, DiscreteOps, StiffnessMatrix
from .thermo import OracleParams, opacities

OK, PICARD_BUDGET, NEWTON_BUDGET = 0, 1, 2


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ParabolicConfig:
    eps_picard: float = 1e-5
    sigma_ref: float = 1.0
    er_ref: float = 1.0
    max_picard: int = 200
    max_newton: int = 50

    def __post_init__(self):
        if not (self.eps_picard > 0.0 and self.sigma_ref > 0.0 and self.er_ref > 0.0):
            raise ValueError("tolerances and reference scales must be positive")
        if self.max_picard < 1 or self.max_newton < 1:
            raise ValueError("iteration budgets must be positive")

    def newton_tol(self, dt: float, params: OracleParams) -> float:
        return self.eps_picard * dt * self.sigma_ref * params.c_light * self.er_ref


@dataclass
class ParabolicResult:
    U: np.ndarray
    T: np.ndarray
    T_star_old: np.ndarray
    picard_iterations: int
    err: float
    K: StiffnessMatrix
    influx: float  # energy entering through Dirichlet rows


@nb.njit(cache=True)
def _ipow(x, a):
    # small integer exponents by multiplication, pow otherwise
    if a == 1.0:
        return x
    if a == 3.0:
        return x * x * x
    return x**a


@nb.njit(cache=True)
def _sigma(rho, T, s0, rho_exp, t_exp, rho_ref, t_ref):
    s = s0
    if rho_exp != 0.0:
        s *= _ipow(rho / rho_ref, rho_exp)
    if t_exp != 0.0:
        s *= _ipow(t_ref / T, t_exp)
    return s


@nb.njit(cache=True)
def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system; lower[i] couples row i+1 to i, upper[i] row i to i+1."""
    n = diag.size
    cp = np.empty(n)
    x = np.empty(n)
    beta = diag[0]
    x[0] = rhs[0] / beta
    for i in range(1, n):
        cp[i - 1] = upper[i - 1] / beta
        beta = diag[i] - lower[i - 1] * cp[i - 1]
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


@nb.njit(cache=True)
def stiffness_kernel(h, rho, T, c_light, st0, rho_exp, t_exp, rho_ref, t_ref):
    n = rho.size
    off = np.empty(n - 1)
    diag = np.zeros(n)
    for k in range(n - 1):
        inv = 0.0
        for q in range(3):
            s = GAUSS_X[q]
            rq = (1.0 - s) * rho[k] + s * rho[k + 1]
            tq = (1.0 - s) * T[k] + s * T[k + 1]
            inv += GAUSS_W[q] / _sigma(rq, tq, st0, rho_exp, t_exp, rho_ref, t_ref)
        off[k] = -c_light * inv / (3.0 * h[k])
        diag[k] -= off[k]
        diag[k + 1] -= off[k]
    return diag, off


@nb.njit(cache=True)
def radiation_solve_kernel(m, h, rho, T_h, E_h, T_star, dt, cv, a_r, c_light,
                           opac, dir_mask, dir_val):
    """Return (E_new, k_diag, k_off) for a fixed linearization temperature T_star."""
    sa0, st0, rho_exp, t_exp, rho_ref, t_ref = opac
    n = rho.size
    kd, ko = stiffness_kernel(h, rho, T_star, c_light, st0, rho_exp, t_exp, rho_ref, t_ref)
    diag = np.empty(n)
    rhs = np.empty(n)
    coup = np.zeros(n)
    target = np.empty(n)
    lower = dt * ko.copy()
    upper = dt * ko.copy()
    floor = math.inf
    for i in range(n):
        if dir_mask[i]:
            diag[i] = 1.0
            rhs[i] = dir_val[i]
            target[i] = dir_val[i]
            floor = min(floor, dir_val[i])
            if i > 0:
                lower[i - 1] = 0.0
            if i < n - 1:
                upper[i] = 0.0
            continue
        S = dt * c_light * _sigma(rho[i], T_star[i], sa0, rho_exp, t_exp, rho_ref, t_ref)
        A = rho[i] * cv
        B = S * a_r * T_star[i] ** 3
        coup[i] = S * A / (A + B)
        target[i] = a_r * T_star[i] ** 3 * T_h[i]
        floor = min(floor, E_h[i], target[i])
        diag[i] = m[i] * (1.0 + coup[i]) + dt * kd[i]
        rhs[i] = m[i] * (E_h[i] + coup[i] * target[i])
    E = thomas(lower, diag, upper, rhs)

    # one refinement step with the residual in flux form: when diffusion moves far more
    # energy than the nodes hold, rounding in the plain solve shows up as energy drift
    r = np.empty(n)
    for i in range(n):
        if dir_mask[i]:
            r[i] = dir_val[i] - E[i]
            continue
        flux = 0.0
        if i > 0:
            flux += ko[i - 1] * (E[i - 1] - E[i])
        if i < n - 1:
            flux += ko[i] * (E[i + 1] - E[i])
        r[i] = m[i] * (E_h[i] - E[i]) + m[i] * coup[i] * (target[i] - E[i]) - dt * flux
    E2 = E + thomas(lower, diag, upper, r)
    # keep the refined values only if they keep the positivity and lower-bound guarantees
    if E2.min() > 0.0 and E2.min() >= min(floor, E.min()):
        return E2, kd, ko
    return E, kd, ko


@nb.njit(cache=True)
def newton_kernel(T0, E, rho, T_h, dt, cv, a_r, c_light, opac, tol, max_iter):
    """Solve rho cv (T - T_h) + dt sigma_a(T) c (a_r T^4 - E) = 0; return (T, status)."""
    sa0, st0, rho_exp, t_exp, rho_ref, t_ref = opac
    A = rho * cv
    t_eq = (max(E, 0.0) / a_r) ** 0.25
    lo = min(T_h, t_eq)
    hi = max(T_h, t_eq)
    if hi == lo:
        return lo, OK
    lo = max(lo, 1e-14 * hi)
    T = min(max(T0, lo), hi)
    for _ in range(max_iter):
        sig = _sigma(rho, T, sa0, rho_exp, t_exp, rho_ref, t_ref)
        q = a_r * T**4 - E
        R = A * (T - T_h) + dt * sig * c_light * q
        if abs(R) <= tol:
            return T, OK
        if R > 0.0:
            hi = T
        else:
            lo = T
        if hi - lo <= 4e-16 * hi:
            return T, OK
        dR = A + dt * c_light * (sig * 4.0 * a_r * T**3 - t_exp * sig / T * q)
        x = T - R / dR if dR > 0.0 else 0.5 * (lo + hi)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        T = x
    return T, NEWTON_BUDGET


@nb.njit(cache=True)
def closure_kernel(T_star, E, rho, T_h, dt, cv, a_r, c_light, opac):
    sa0, st0, rho_exp, t_exp, rho_ref, t_ref = opac
    n = rho.size
    T = np.empty(n)
    for i in range(n):
        S = dt * c_light * _sigma(rho[i], T_star[i], sa0, rho_exp, t_exp, rho_ref, t_ref)
        T[i] = (rho[i] * cv * T_h[i] + S * E[i]) / (rho[i] * cv + S * a_r * T_star[i] ** 3)
    return T


@nb.njit(cache=True)
def picard_kernel(m, h, rho, T_h, E_h, T_n, dt, cv, a_r, c_light, opac, dir_mask, dir_val,
                  eps, tol_newton, max_picard, max_newton):
    n = rho.size
    T_star = T_n.copy()
    T_old = T_star.copy()
    E = E_h.copy()
    kd = np.zeros(n)
    ko = np.zeros(n - 1)
    err = math.inf
    status = PICARD_BUDGET
    bad = -1
    it = 0
    while it < max_picard:
        it += 1
        E, kd, ko = radiation_solve_kernel(m, h, rho, T_h, E_h, T_star, dt, cv, a_r, c_light,
                                           opac, dir_mask, dir_val)
        T_old[:] = T_star
        for i in range(n):
            T_star[i], st = newton_kernel(T_star[i], E[i], rho[i], T_h[i], dt, cv, a_r, c_light,
                                          opac, tol_newton, max_newton)
            if st != OK:
                return E, T_old, it, err, NEWTON_BUDGET, i, kd, ko
        num = 0.0
        den = 0.0
        for i in range(n):
            num += abs(T_star[i] - T_old[i])
            den += abs(T_old[i])
        err = num / den
        if err <= eps:
            status = OK
            break
    return E, T_old, it, err, status, bad, kd, ko


def _dirichlet_arrays(n: int, er_dirichlet: dict | None):
    mask = np.zeros(n, dtype=np.bool_)
    val = np.zeros(n)
    for i, v in (er_dirichlet or {}).items():
        mask[i] = True
        val[i] = v
    return mask, val


def matter_temperature(U, params: OracleParams) -> np.ndarray:
    rho, mom, em, _ = U
    return ((em - 0.5 * mom * mom / rho) / rho - params.e_cold) / params.cv_tilde


def solve_radiation_system(Uh, T_star, ops: DiscreteOps, params: OracleParams, dt: float,
                           er_dirichlet: dict | None = None) -> np.ndarray:
    Uh = np.asarray(Uh, dtype=float)
    mask, val = _dirichlet_arrays(ops.n, er_dirichlet)
    E, _, _ = radiation_solve_kernel(ops.m, ops.h, Uh[0], matter_temperature(Uh, params), Uh[3],
                                     np.asarray(T_star, dtype=float), float(dt),
                                     params.cv_tilde, params.a_r, params.c_light,
                                     params.opacity.as_tuple(), mask, val)
    return E


def newton_T_star(T0: float, E_new: float, rho: float, T_h: float, params: OracleParams,
                  dt: float, tol: float, max_iter: int = 50, node: int = -1) -> float:
    T, st = newton_kernel(float(T0), float(E_new), float(rho), float(T_h), float(dt),
                          params.cv_tilde, params.a_r, params.c_light,
                          params.opacity.as_tuple(), float(tol), int(max_iter))
    if st != OK:
        sig = float(opacities(rho, T, params)[0])
        res = rho * params.cv_tilde * (T - T_h) + dt * sig * params.c_light * (params.a_r * T**4 - E_new)
        raise ConvergenceError(f"Newton budget exhausted at node {node}, residual ~{res:.3e}")
    return T


def temperature_closure(T_star_old, E_new, Uh, params: OracleParams, dt: float) -> np.ndarray:
    Uh = np.asarray(Uh, dtype=float)
    return closure_kernel(np.asarray(T_star_old, dtype=float), np.asarray(E_new, dtype=float),
                          Uh[0], matter_temperature(Uh, params), float(dt), params.cv_tilde,
                          params.a_r, params.c_light, params.opacity.as_tuple())


def parabolic_step(Uh, T_n, ops: DiscreteOps, params: OracleParams, dt: float,
                   cfg: ParabolicConfig = ParabolicConfig(),
                   er_dirichlet: dict | None = None) -> ParabolicResult:
    """Advance (T, E_r) over dt from the hyperbolic output Uh; rho and m are untouched."""
    Uh = np.ascontiguousarray(Uh, dtype=float)
    rho, mom = Uh[0], Uh[1]
    T_h = matter_temperature(Uh, params)
    mask, val = _dirichlet_arrays(ops.n, er_dirichlet)
    opac = params.opacity.as_tuple()
    E, T_old, it, err, status, bad, kd, ko = picard_kernel(
        ops.m, ops.h, rho, T_h, Uh[3], np.asarray(T_n, dtype=float), float(dt),
        params.cv_tilde, params.a_r, params.c_light, opac, mask, val, cfg.eps_picard,
        cfg.newton_tol(dt, params), cfg.max_picard, cfg.max_newton)
    if status == NEWTON_BUDGET:
        raise ConvergenceError(f"Newton budget exhausted at node {bad} (Picard sweep {it})")
    if status == PICARD_BUDGET:
        raise ConvergenceError(f"Picard budget exhausted after {it} sweeps, err={err:.3e}")
    T = closure_kernel(T_old, E, rho, T_h, float(dt), params.cv_tilde, params.a_r,
                       params.c_light, opac)
    U = Uh.copy()
    kin = 0.5 * mom * mom / rho
    U[2] = rho * (params.cv_tilde * T + params.e_cold) + kin
    U[3] = E
    K = StiffnessMatrix(diag=kd, off=ko)
    influx = 0.0
    if mask.any():
        KE = K.apply(E)
        d_tot = (U[2] + U[3]) - (Uh[2] + Uh[3])
        influx = float(np.sum(ops.m[mask] * d_tot[mask]) + dt * np.sum(KE[mask]))
    return ParabolicResult(U=U, T=T, T_star_old=T_old, picard_iterations=int(it),
                           err=float(err), K=K, influx=influx)
