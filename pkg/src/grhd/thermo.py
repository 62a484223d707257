"""Ideal-gas (covolume) oracle, state algebra and admissibility checks.

States are plain tuples of floats or numpy arrays, so every function here
works on a single node or on a whole nodal field at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when a state lies outside the admissible set."""


class FullState(NamedTuple):
    rho: float
    mom: float
    e_mech: float
    e_rad: float


class ReducedState(NamedTuple):
    rho: float
    mom: float
    e_t: float


@dataclass(frozen=True)
class OpacityLaw:
    """sigma(rho, T) = sigma0 * (rho / rho_ref)**rho_exp * (t_ref / T)**t_exp.

    ``sigma_a0`` and ``sigma_t0`` are the absorption and total prefactors;
    a law with both exponents zero is the constant law.
    """

    sigma_a0: float
    sigma_t0: float | None = None
    rho_exp: float = 0.0
    t_exp: float = 0.0
    rho_ref: float = 1.0
    t_ref: float = 1.0

    def __post_init__(self):
        if self.sigma_t0 is None:
            object.__setattr__(self, "sigma_t0", self.sigma_a0)
        if self.sigma_a0 < 0.0 or self.sigma_t0 <= 0.0:
            raise ValueError("need sigma_a0 >= 0 and sigma_t0 > 0")
        if self.rho_ref <= 0.0 or self.t_ref <= 0.0:
            raise ValueError("reference density and temperature must be positive")

    @property
    def is_constant(self) -> bool:
        return self.rho_exp == 0.0 and self.t_exp == 0.0

    def as_tuple(self):
        """Flat float tuple consumed by the compiled kernels."""
        return (float(self.sigma_a0), float(self.sigma_t0), float(self.rho_exp),
                float(self.t_exp), float(self.rho_ref), float(self.t_ref))


@dataclass(frozen=True)
class OracleParams:
    gamma: float = 5.0 / 3.0
    cv_tilde: float = 0.15
    b: float = 0.0
    e_cold: float = 0.0
    a_r: float = 1.3720172e-2
    c_light: float = 2.99792458e2
    opacity: OpacityLaw = field(default_factory=lambda: OpacityLaw(1.0))

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not self.cv_tilde > 0.0:
            raise ValueError("cv_tilde must be positive")
        if self.b < 0.0:
            raise ValueError("covolume must be nonnegative")
        if not (self.a_r > 0.0 and self.c_light > 0.0):
            raise ValueError("a_r and c_light must be positive")


@dataclass
class AdmissibilityReport:
    in_B: bool
    in_A: bool
    violated: list[str]

    def __bool__(self):
        return self.in_A


def velocity(U):
    return np.asarray(U[1]) / np.asarray(U[0])


def internal_energy(U):
    """Internal energy density eps = E_m - rho v^2 / 2."""
    rho, mom, em = U[0], U[1], U[2]
    return em - 0.5 * mom * mom / rho


def specific_internal_energy(U):
    return internal_energy(U) / U[0]


def _raise_if_outside_B(U, params: OracleParams):
    rep = check_admissible(U, params)
    if not rep.in_B:
        raise DomainError("state outside B(b): " + ", ".join(rep.violated))


def pressure(U, params: OracleParams):
    """Mechanical pressure p = (gamma-1) rho e / (1 - b rho)."""
    _raise_if_outside_B(U, params)
    rho = np.asarray(U[0], dtype=float)
    e = specific_internal_energy(U) - params.e_cold
    return (params.gamma - 1.0) * rho * e / (1.0 - params.b * rho)


def temperature(U, params: OracleParams):
    _raise_if_outside_B(U, params)
    return (specific_internal_energy(U) - params.e_cold) / params.cv_tilde


def sound_speed(U, params: OracleParams):
    rho = np.asarray(U[0], dtype=float)
    p = pressure(U, params)
    return np.sqrt(params.gamma * p / (rho * (1.0 - params.b * rho)))


def opacities(rho, T, params: OracleParams):
    """Return (sigma_a, sigma_t) in 1/cm."""
    law = params.opacity
    rho = np.asarray(rho, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("opacity needs rho > 0")
    if law.t_exp != 0.0 and np.any(T <= 0.0):
        raise DomainError("temperature-dependent opacity is singular at T <= 0")
    f = (rho / law.rho_ref) ** law.rho_exp
    if law.t_exp != 0.0:
        f = f * (law.t_ref / T) ** law.t_exp
    return law.sigma_a0 * f, law.sigma_t0 * f


def check_admissible(U, params: OracleParams, tol: float = 0.0) -> AdmissibilityReport:
    """Membership in B(b) and A(b) with strict inequalities.

    ``tol`` only loosens the tests for logging; it defaults to zero.
    Array inputs are reduced with ``all`` over nodes.
    """
    rho = np.asarray(U[0], dtype=float)
    er = np.asarray(U[3], dtype=float)
    violated = []
    with np.errstate(divide="ignore", invalid="ignore"):
        if not np.all(rho > -tol):
            violated.append("rho > 0")
        if not np.all(1.0 - params.b * rho > -tol):
            violated.append("1 - b rho > 0")
        e = specific_internal_energy(U)
        if not np.all(e - params.e_cold > -tol):
            violated.append("e > e_cold")
    in_B = not violated
    if not np.all(er > -tol):
        violated.append("E_r > 0")
    return AdmissibilityReport(in_B=in_B, in_A=not violated, violated=violated)


def reduce(U) -> ReducedState:
    rho, mom, em, er = U
    return ReducedState(rho, mom, er + 0.5 * mom * mom / rho)


def expand(W, eps0) -> FullState:
    rho, mom, et = W
    kin = 0.5 * mom * mom / rho
    return FullState(rho, mom, eps0 + kin, et - kin)


def state_from_primitive(rho, v, T, params: OracleParams, e_rad=None) -> FullState:
    """Build (rho, m, E_m, E_r) from density, velocity and temperature.

    E_r defaults to the equilibrium value a_r T^4.
    """
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    T = np.asarray(T, dtype=float)
    if e_rad is None:
        e_rad = params.a_r * T**4
    e = params.cv_tilde * T + params.e_cold
    return FullState(rho, rho * v, rho * e + 0.5 * rho * v * v, np.asarray(e_rad, dtype=float))
