"""Benchmark set-ups: Marshak wave, radiative shocks and a 1D ICF-like implosion.

Units: cm, g, sh (1e-8 s), keV, GJ.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .grid1d import Mesh1D
from .thermo import OpacityLaw, OracleParams, check_admissible, state_from_primitive

C_LIGHT = 2.99792458e2  # cm/sh
A_R = 1.3720172e-2  # GJ/(cm^3 keV^4)
CV_TILDE = 0.15  # GJ/(keV g)
GAMMA = 5.0 / 3.0

REFERENCE_COLUMNS = ("x", "rho", "v", "T", "Er")


class ReferenceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceProfile:
    x: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    T: np.ndarray
    Er: np.ndarray

    def __post_init__(self):
        if self.x.size < 2 or not np.all(np.diff(self.x) > 0.0):
            raise ReferenceFormatError("reference x must be strictly increasing with >= 2 rows")


@dataclass
class Scenario:
    name: str
    mesh: Mesh1D
    params: OracleParams
    U0: np.ndarray  # (4, N)
    t_final: float
    cfl: float = 1.0
    hydro_enabled: bool = True
    dirichlet: dict[int, np.ndarray] = field(default_factory=dict)  # full-state Dirichlet
    er_dirichlet: dict[int, float] = field(default_factory=dict)
    slip_nodes: tuple[int, ...] = ()
    sigma_ref: float = 1.0
    er_ref: float = 1.0
    reference: ReferenceProfile | None = None

    def __post_init__(self):
        rep = check_admissible(self.U0, self.params)
        if not rep.in_A:
            raise ValueError(f"{self.name}: initial data not admissible ({rep.violated})")

    @property
    def conservation_closed(self) -> bool:
        """True when nothing can enter through the ends except logged Dirichlet influx."""
        return self.hydro_enabled


def load_reference(path) -> ReferenceProfile:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"reference profile not found: {path}")
    rows = []
    header = None
    with path.open(newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if header is None:
                if s.startswith("#"):
                    continue
                header = [h.strip() for h in s.split(",")]
                missing = [c for c in REFERENCE_COLUMNS if c not in header]
                if missing:
                    raise ReferenceFormatError(f"line {lineno}: header lacks {missing}")
                cols = [header.index(c) for c in REFERENCE_COLUMNS]
                continue
            parts = s.split(",")
            if len(parts) != len(header):
                raise ReferenceFormatError(
                    f"line {lineno}: expected {len(header)} fields, got {len(parts)}")
            try:
                rows.append([float(parts[k]) for k in cols])
            except ValueError as exc:
                raise ReferenceFormatError(f"line {lineno}: {exc}") from None
            if len(rows) > 1 and not rows[-1][0] > rows[-2][0]:
                raise ReferenceFormatError(f"line {lineno}: x is not strictly increasing")
    if header is None or len(rows) < 2:
        raise ReferenceFormatError(f"{path}: need a header and at least two samples")
    a = np.array(rows)
    return ReferenceProfile(*(np.ascontiguousarray(a[:, k]) for k in range(5)))


def write_reference(profile: ReferenceProfile, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REFERENCE_COLUMNS)
        for row in zip(profile.x, profile.rho, profile.v, profile.T, profile.Er):
            w.writerow([repr(float(q)) for q in row])


def interpolate(profile: ReferenceProfile, x):
    """Piecewise-linear (rho, v, T, Er) at x, clamped to the end samples."""
    x = np.asarray(x, dtype=float)
    return tuple(np.interp(x, profile.x, getattr(profile, c)) for c in ("rho", "v", "T", "Er"))


def profile_state(profile: ReferenceProfile, x, params: OracleParams) -> np.ndarray:
    rho, v, T, er = interpolate(profile, x)
    return np.array(state_from_primitive(rho, v, T, params, er))


# ---------------------------------------------------------------- Marshak

def marshak_scenario(n_points: int, t_final: float = 0.02) -> Scenario:
    if n_points < 3:
        raise ValueError("need at least 3 points")
    t_ref, t0, rho0 = 1.0, 0.01, 2.0
    law = OpacityLaw(300.0, t_exp=3.0, t_ref=t_ref)
    params = OracleParams(gamma=GAMMA, cv_tilde=CV_TILDE, a_r=A_R, c_light=C_LIGHT, opacity=law)
    mesh = Mesh1D.uniform(0.0, 0.025, n_points)
    n = mesh.n
    U0 = np.array(state_from_primitive(np.full(n, rho0), np.zeros(n), np.full(n, t0), params))
    return Scenario("marshak", mesh, params, U0, t_final, cfl=0.25, hydro_enabled=False,
                    er_dirichlet={0: A_R * t_ref**4}, sigma_ref=300.0, er_ref=A_R * t_ref**4)


# ---------------------------------------------------------------- radiative shocks

@dataclass(frozen=True)
class ShockCase:
    mach: float
    x_lo: float
    x_hi: float
    t_final: float
    law: OpacityLaw
    gamma: float = GAMMA


RHO_REF, T_REF = 1.0, 0.1
_CONST = OpacityLaw(500.0)
_VAR35 = OpacityLaw(500.0, rho_exp=1.0, t_exp=3.5, rho_ref=RHO_REF, t_ref=T_REF)

SHOCK_CASES = {
    ("1.2", "constant"): ShockCase(1.2, -0.02, 0.02, 1.0, _CONST),
    ("3", "constant"): ShockCase(3.0, -0.02, 0.02, 1.0, _CONST),
    ("3", "variable"): ShockCase(3.0, -0.3, 0.3, 10.0, _VAR35),
    ("10", "variable"): ShockCase(10.0, -2.0, 5.0, 50.0, _VAR35),
    ("30", "constant"): ShockCase(30.0, -0.1, 0.4, 1.0, _CONST),
    ("50", "constant"): ShockCase(50.0, -0.1, 0.6, 10.0, _CONST, gamma=1.2),
}


def _mach_key(mach) -> str:
    return f"{float(mach):g}"


def shock_case(mach, law: str = "constant") -> ShockCase:
    key = (_mach_key(mach), law)
    if key not in SHOCK_CASES:
        raise KeyError(f"no radiative shock case for Mach {mach} with {law} opacity")
    return SHOCK_CASES[key]


def rankine_hugoniot(mach: float, params: OracleParams, rho0: float = RHO_REF,
                     T0: float = T_REF):
    """Far-field states (rho, v, T) of a steady shock with equilibrium radiation.

    The upstream gas moves at mach times its adiabatic sound speed toward
    +x; the downstream state satisfies the jump conditions of the
    radiation-hydrodynamic fluxes with E_r = a_r T^4 on both sides.
    """
    g, cv, a = params.gamma, params.cv_tilde, params.a_r
    p0 = (g - 1.0) * rho0 * cv * T0
    v0 = mach * np.sqrt(g * p0 / rho0)
    J = rho0 * v0
    er0 = a * T0**4
    P = J * v0 + p0 + er0 / 3.0
    H = J * (0.5 * v0**2 + cv * T0 + p0 / rho0) + v0 * 4.0 / 3.0 * er0

    def temperature_from_momentum(rho1):
        v1 = J / rho1
        target = P - J * v1

        def f(T):
            return (g - 1.0) * rho1 * cv * T + a * T**4 / 3.0 - target

        hi = max(T0, 1.0)
        while f(hi) < 0.0:
            hi *= 2.0
        return brentq(f, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)

    def energy_residual(rho1):
        v1 = J / rho1
        T1 = temperature_from_momentum(rho1)
        p1 = (g - 1.0) * rho1 * cv * T1
        return J * (0.5 * v1**2 + cv * T1 + p1 / rho1) + v1 * 4.0 / 3.0 * a * T1**4 - H

    # scan for the nontrivial root (rho1 = rho0 is always a root)
    grid = rho0 * np.geomspace(1.0 + 1e-6, 40.0, 4000)
    vals = []
    for r in grid:
        try:
            vals.append(energy_residual(r))
        except ValueError:
            vals.append(np.nan)
    vals = np.array(vals)
    roots = []
    for k in range(grid.size - 1):
        if np.isfinite(vals[k]) and np.isfinite(vals[k + 1]) and vals[k] * vals[k + 1] < 0.0:
            roots.append(brentq(energy_residual, grid[k], grid[k + 1], xtol=1e-300, rtol=1e-15))
    if not roots:
        raise RuntimeError(f"no downstream state found for Mach {mach}")
    rho1 = roots[0]
    T1 = temperature_from_momentum(rho1)
    return (rho0, v0, T0), (rho1, J / rho1, T1)


def shock_params(case: ShockCase) -> OracleParams:
    return OracleParams(gamma=case.gamma, cv_tilde=CV_TILDE, a_r=A_R, c_light=C_LIGHT,
                        opacity=case.law)


def radiative_shock_scenario(mach, law: str = "constant", n_points: int = 101,
                             reference=None, t_final: float | None = None) -> Scenario:
    """Steady radiative shock at x = 0 with Dirichlet data at both ends.

    With a reference profile (path or ReferenceProfile) the initial data
    interpolate it; without one the run starts from the Rankine-Hugoniot
    step, which relaxes toward the radiative shock structure.
    """
    case = shock_case(mach, law)
    params = shock_params(case)
    mesh = Mesh1D.uniform(case.x_lo, case.x_hi, n_points)
    x = mesh.nodes
    if reference is not None:
        prof = reference if isinstance(reference, ReferenceProfile) else load_reference(reference)
        U0 = profile_state(prof, x, params)
        name = f"shock_m{_mach_key(mach)}_{law}"
    else:
        prof = None
        (r0, v0, T0), (r1, v1, T1) = rankine_hugoniot(case.mach, params)
        up = x < 0.0
        rho = np.where(up, r0, r1)
        v = np.where(up, v0, v1)
        T = np.where(up, T0, T1)
        U0 = np.array(state_from_primitive(rho, v, T, params))
        name = f"shock_m{_mach_key(mach)}_{law}_step"
    n = mesh.n
    dirichlet = {0: U0[:, 0].copy(), n - 1: U0[:, -1].copy()}
    er_dir = {0: float(U0[3, 0]), n - 1: float(U0[3, -1])}
    T_down = float(U0[2, -1] - 0.5 * U0[1, -1] ** 2 / U0[0, -1]) / (U0[0, -1] * CV_TILDE)
    sig_ref = float(case.law.sigma_a0)
    return Scenario(name, mesh, params, U0,
                    case.t_final if t_final is None else t_final, cfl=1.0,
                    dirichlet=dirichlet, er_dirichlet=er_dir,
                    sigma_ref=sig_ref, er_ref=A_R * T_down**4, reference=prof)


# ---------------------------------------------------------------- ICF

def icf1d_scenario(n_points: int, t_final: float = 4.0, r_ext: float = 0.3) -> Scenario:
    if n_points < 3:
        raise ValueError("need at least 3 points")
    r_int, r_sh = 0.13, 0.15
    if not r_ext > r_sh:
        raise ValueError("r_ext must exceed the shell radius")
    rho_int, rho_sh, rho_ext = 5e-4, 3.5, 1e-4
    T_int, T_ref = 2.6e-6, 0.25
    law = OpacityLaw(5e3, rho_exp=1.0, rho_ref=1.0)
    params = OracleParams(gamma=GAMMA, cv_tilde=CV_TILDE, a_r=A_R, c_light=C_LIGHT, opacity=law)
    mesh = Mesh1D.uniform(-r_ext, r_ext, n_points)
    r = np.abs(mesh.nodes)
    inner = r < r_int
    shell = (r >= r_int) & (r < r_sh)
    rho = np.where(inner, rho_int, np.where(shell, rho_sh, rho_ext))
    T = rho_int / rho * T_int
    er = np.where(inner | shell, A_R * T**4, A_R * T_ref**4)
    U0 = np.array(state_from_primitive(rho, np.zeros_like(rho), T, params, er))
    n = mesh.n
    e_bc = A_R * T_ref**4
    return Scenario("icf1d", mesh, params, U0, t_final, cfl=1.0,
                    er_dirichlet={0: e_bc, n - 1: e_bc}, slip_nodes=(0, n - 1),
                    sigma_ref=5e3, er_ref=e_bc)


def build_scenario(name: str, n_points: int, reference=None) -> Scenario:
    """Scenario by id: marshak, icf1d, or shock-M<mach>[-variable]."""
    if name == "marshak":
        return marshak_scenario(n_points)
    if name == "icf1d":
        return icf1d_scenario(n_points)
    if name.startswith("shock-M"):
        tag = name[len("shock-M"):]
        law = "constant"
        if tag.endswith("-variable"):
            tag, law = tag[: -len("-variable")], "variable"
        return radiative_shock_scenario(float(tag), law, n_points, reference)
    raise KeyError(f"unknown scenario {name!r}")


SCENARIO_IDS = ("marshak", "icf1d", "shock-M1.2", "shock-M3", "shock-M3-variable",
                "shock-M10-variable", "shock-M30", "shock-M50")
