"""Explicit graph-viscosity updates for the two hyperbolic stages.

Nodal fields are arrays of shape (4, N) holding (rho, m, E_m, E_r).
Stage 1 is Euler with E_r advected; stage 2 carries the radiation
pressure on the reduced unknowns (rho, m, E_t) with the internal energy
frozen pointwise. Both run from the same state and are blended with
theta = dt2 / (dt1 + dt2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .grid1d import DiscreteOps
from .riemann_euler import lambda_max_kernel
from .riemann_rad import mu_max_kernel
from .thermo import DomainError, OracleParams, check_admissible


@dataclass(frozen=True)
class ViscosityPair:
    """Edge viscosities; entry k couples nodes k and k+1 (d_ij = d_ji)."""

    d1: np.ndarray
    d2: np.ndarray


@dataclass(frozen=True)
class StepSizes:
    dt1: float
    dt2: float
    theta: float
    dt: float
    cfl: float

    @property
    def dt_stage1(self) -> float:
        return self.dt / self.theta

    @property
    def dt_stage2(self) -> float:
        return self.dt / (1.0 - self.theta) if self.theta < 1.0 else math.inf

    def clipped(self, dt_max: float) -> "StepSizes":
        if self.dt <= dt_max:
            return self
        return StepSizes(self.dt1, self.dt2, self.theta, dt_max, self.cfl)


@nb.njit(cache=True)
def gas_pressure(rho, mom, em, gamma, b, e_cold):
    e = (em - 0.5 * mom * mom / rho) / rho
    return (gamma - 1.0) * rho * (e - e_cold) / (1.0 - b * rho)


@nb.njit(cache=True)
def _local_gamma(rho, mom, em, p, b):
    e = (em - 0.5 * mom * mom / rho) / rho
    return 1.0 + p * (1.0 - b * rho) / (rho * e)


@nb.njit(cache=True)
def viscosity_kernel(U, c_up, c_dn, gamma, b, e_cold):
    n = U.shape[1]
    d1 = np.empty(n - 1)
    d2 = np.empty(n - 1)
    p = np.empty(n)
    g = np.empty(n)
    v = np.empty(n)
    pr = np.empty(n)
    for i in range(n):
        rho, mom, em, er = U[0, i], U[1, i], U[2, i], U[3, i]
        p[i] = gas_pressure(rho, mom, em, gamma, b, e_cold)
        # without a cold energy the extended gamma is gamma itself; skip the rounding
        g[i] = gamma if e_cold == 0.0 else _local_gamma(rho, mom, em, p[i], b)
        v[i] = mom / rho
        pr[i] = max(er, 0.0) / 3.0
    for k in range(n - 1):
        i, j = k, k + 1
        nij = abs(c_up[k])
        nji = abs(c_dn[k])
        lij, _ = lambda_max_kernel(U[0, i], v[i], p[i], g[i], U[0, j], v[j], p[j], g[j], b)
        lji, _ = lambda_max_kernel(U[0, j], -v[j], p[j], g[j], U[0, i], -v[i], p[i], g[i], b)
        d1[k] = max(lij * nij, lji * nji)
        mij = mu_max_kernel(U[0, i], v[i], pr[i], U[0, j], v[j], pr[j])
        mji = mu_max_kernel(U[0, j], -v[j], pr[j], U[0, i], -v[i], pr[i])
        d2[k] = max(mij * nij, mji * nji)
    return d1, d2


@nb.njit(cache=True)
def dt_kernel(m, d):
    n = m.size
    dt = math.inf
    for i in range(n):
        s = 0.0
        if i > 0:
            s += d[i - 1]
        if i < n - 1:
            s += d[i]
        if s > 0.0:
            dt = min(dt, m[i] / (2.0 * s))
    return dt


@nb.njit(cache=True)
def _flux1(U, i, gamma, b, e_cold):
    rho, mom, em, er = U[0, i], U[1, i], U[2, i], U[3, i]
    v = mom / rho
    p = gas_pressure(rho, mom, em, gamma, b, e_cold)
    return mom, mom * v + p, v * (em + p), v * er


@nb.njit(cache=True)
def stage1_kernel(U, m, c_up, c_dn, c_diag, d1, dt, gamma, b, e_cold):
    n = U.shape[1]
    G = np.empty((4, n))
    for i in range(n):
        f = _flux1(U, i, gamma, b, e_cold)
        for q in range(4):
            G[q, i] = f[q]
    out = np.empty((4, n))
    for i in range(n):
        for q in range(4):
            acc = -2.0 * G[q, i] * c_diag[i]
            if i > 0:
                j = i - 1
                acc += -(G[q, j] + G[q, i]) * c_dn[j] + d1[j] * (U[q, j] - U[q, i])
            if i < n - 1:
                j = i + 1
                acc += -(G[q, j] + G[q, i]) * c_up[i] + d1[i] * (U[q, j] - U[q, i])
            out[q, i] = U[q, i] + dt / m[i] * acc
    return out


@nb.njit(cache=True)
def _bar_er(ri, vi, pi_, eri, rj, vj, pj, erj, q):
    # E_r of the stage-2 bar state, written without the E_t - kinetic cancellation
    s = ri + rj
    dv = vi - vj
    dp = pj - pi_
    return (0.5 * (eri + erj) + ri * rj * dv * dv / (4.0 * s)
            + q * dv * (ri * pj + rj * pi_) / s - q * q * dp * dp / s)


@nb.njit(cache=True)
def stage2_kernel(U, m, c_up, c_dn, d2, dt):
    n = U.shape[1]
    rho = U[0]
    mom = U[1]
    v = mom / rho
    er = U[3]
    pr = er / 3.0
    eps = U[2] - 0.5 * mom * v
    out = np.empty((4, n))
    wr = np.empty(3)
    wrho = np.empty(3)
    wv = np.empty(3)
    wer = np.empty(3)
    for i in range(n):
        acc_r = 0.0
        acc_m = 0.0
        nb_ = 0
        beta0 = 1.0
        for side in range(2):
            if side == 0:
                if i == 0:
                    continue
                j = i - 1
                cij = c_dn[j]
                d = d2[j]
            else:
                if i == n - 1:
                    continue
                j = i + 1
                cij = c_up[i]
                d = d2[i]
            acc_r += d * (rho[j] - rho[i])
            acc_m += -(pr[j] - pr[i]) * cij + d * (mom[j] - mom[i])
            if d > 0.0:
                a = 2.0 * dt * d / m[i]
                q = cij / (2.0 * d)
                rb = 0.5 * (rho[i] + rho[j])
                mb = 0.5 * (mom[i] + mom[j]) - q * (pr[j] - pr[i])
                wr[nb_] = a
                wrho[nb_] = rb
                wv[nb_] = mb / rb
                wer[nb_] = _bar_er(rho[i], v[i], pr[i], er[i], rho[j], v[j], pr[j], er[j], q)
                beta0 -= a
                nb_ += 1
        r_new = rho[i] + dt / m[i] * acc_r
        m_new = mom[i] + dt / m[i] * acc_m
        # convex-combination form of E_r, including the Jensen gap of the kinetic energy
        e_new = beta0 * er[i]
        R = beta0 * rho[i]
        for k in range(nb_):
            e_new += wr[k] * wer[k]
            R += wr[k] * wrho[k]
        gap = 0.0
        for k in range(nb_):
            dvk = v[i] - wv[k]
            gap += beta0 * wr[k] * rho[i] * wrho[k] * dvk * dvk
            for l in range(k + 1, nb_):
                dvl = wv[k] - wv[l]
                gap += wr[k] * wr[l] * wrho[k] * wrho[l] * dvl * dvl
        e_new += 0.5 * gap / R
        out[0, i] = r_new
        out[1, i] = m_new
        out[2, i] = eps[i] + 0.5 * m_new * m_new / r_new
        out[3, i] = e_new
    return out


def _check_field(U, params: OracleParams, where: str = ""):
    rep = check_admissible(U, params)
    if rep.in_A:
        return
    rho, mom, em, er = U
    with np.errstate(divide="ignore", invalid="ignore"):
        e = (em - 0.5 * mom * mom / rho) / rho
        bad = ~((rho > 0) & (1.0 - params.b * rho > 0) & (e > params.e_cold) & (er > 0))
    idx = int(np.flatnonzero(bad)[0])
    raise DomainError(f"inadmissible state at node {idx}{where}: " + ", ".join(rep.violated))


def compute_viscosities(U: np.ndarray, ops: DiscreteOps, params: OracleParams) -> ViscosityPair:
    _check_field(U, params)
    d1, d2 = viscosity_kernel(np.ascontiguousarray(U, dtype=float), ops.c_up, ops.c_dn,
                              params.gamma, params.b, params.e_cold)
    return ViscosityPair(d1=d1, d2=d2)


def compute_dt(visc: ViscosityPair, ops: DiscreteOps, cfl: float) -> StepSizes:
    if not 0.0 < cfl <= 1.0:
        raise ValueError("cfl must lie in (0, 1]")
    dt1 = dt_kernel(ops.m, visc.d1)
    dt2 = dt_kernel(ops.m, visc.d2)
    if math.isinf(dt1) and math.isinf(dt2):
        raise ValueError("all viscosities vanish; no time step can be computed")
    if math.isinf(dt2):
        return StepSizes(dt1, dt2, 1.0, cfl * dt1, cfl)
    if math.isinf(dt1):
        return StepSizes(dt1, dt2, 0.0, cfl * dt2, cfl)
    theta = dt2 / (dt1 + dt2)
    return StepSizes(dt1, dt2, theta, cfl * dt1 * dt2 / (dt1 + dt2), cfl)


def stage1_update(U, ops: DiscreteOps, visc: ViscosityPair, dt_eff: float,
                  params: OracleParams) -> np.ndarray:
    return stage1_kernel(np.ascontiguousarray(U, dtype=float), ops.m, ops.c_up, ops.c_dn,
                         ops.c_diag, visc.d1, float(dt_eff), params.gamma, params.b,
                         params.e_cold)


def stage2_update(U, ops: DiscreteOps, visc: ViscosityPair, dt_eff: float) -> np.ndarray:
    return stage2_kernel(np.ascontiguousarray(U, dtype=float), ops.m, ops.c_up, ops.c_dn,
                         visc.d2, float(dt_eff))


@dataclass
class HyperbolicResult:
    U: np.ndarray
    steps: StepSizes
    U1: np.ndarray
    U2: np.ndarray | None
    influx: np.ndarray  # boundary influx of (rho, m, E_m + E_r)


def _boundary_influx(U, Unew, ops, d, dt, flux, conserved):
    """m_j du_j - dt * (exchange with interior neighbours), summed over the two ends."""
    n = U.shape[1]
    q_old = conserved(U)
    q_new = conserved(Unew)
    f = flux(U)
    tot = np.zeros(q_old.shape[0])
    for j, i, cji, dji in ((0, 1, ops.c_up[0], d[0]), (n - 1, n - 2, ops.c_dn[n - 2], d[n - 2])):
        exch = -(f[:, i] + f[:, j]) * cji + dji * (q_old[:, i] - q_old[:, j])
        tot += ops.m[j] * (q_new[:, j] - q_old[:, j]) - dt * exch
    return tot


def _cons1(U):
    return np.array([U[0], U[1], U[2] + U[3]])


def _cons2(U):
    kin = 0.5 * U[1] * U[1] / U[0]
    return np.array([U[0], U[1], U[3] + kin])


def _make_flux1(params):
    def flux(U):
        rho, mom, em, er = U
        v = mom / rho
        e = (em - 0.5 * mom * v) / rho
        p = (params.gamma - 1.0) * rho * (e - params.e_cold) / (1.0 - params.b * rho)
        return np.array([mom, mom * v + p, v * (em + p + er)])
    return flux


def _flux2(U):
    rho, mom, em, er = U
    v = mom / rho
    pr = er / 3.0
    return np.array([np.zeros_like(rho), pr, v * pr])


def additive_combine(U, ops: DiscreteOps, params: OracleParams, cfl: float,
                     dt_max: float = math.inf, check: bool = False) -> HyperbolicResult:
    """One blended hyperbolic step from U; returns u^h and the step sizes."""
    U = np.ascontiguousarray(U, dtype=float)
    visc = compute_viscosities(U, ops, params)
    steps = compute_dt(visc, ops, cfl).clipped(dt_max)
    th = steps.theta
    U1 = stage1_update(U, ops, visc, steps.dt_stage1, params) if th > 0.0 else U.copy()
    if th < 1.0:
        U2 = stage2_update(U, ops, visc, steps.dt_stage2)
        Uh = th * U1 + (1.0 - th) * U2
    else:
        U2 = None
        Uh = U1.copy()
    if check:
        _check_field(U1, params, " after stage 1")
        if U2 is not None:
            _check_field(U2, params, " after stage 2")
        _check_field(Uh, params, " after the hyperbolic combine")
    influx = np.zeros(3)
    if th > 0.0:
        influx += th * _boundary_influx(U, U1, ops, visc.d1, steps.dt_stage1,
                                        _make_flux1(params), _cons1)
    if U2 is not None:
        # internal energy is frozen in stage 2, so E_t carries the whole energy change
        influx += (1.0 - th) * _boundary_influx(U, U2, ops, visc.d2, steps.dt_stage2,
                                                _flux2, _cons2)
    return HyperbolicResult(U=Uh, steps=steps, U1=U1, U2=U2, influx=influx)
