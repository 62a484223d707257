"""Time loop, conservation diagnostics, error metric and convergence tables."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .grid1d import DiscreteOps, Mesh1D, build_ops
from .hyperbolic import _check_field, additive_combine, compute_dt, compute_viscosities
from .parabolic import ParabolicConfig, matter_temperature, parabolic_step
from .scenarios import (ReferenceProfile, Scenario, build_scenario, load_reference,
                        profile_state)
from .thermo import OracleParams


@dataclass
class RunConfig:
    scenario: str = "marshak"
    points: int = 129
    cfl: float | None = None  # None: scenario default
    t_final: float | None = None
    eps: float = 1e-5
    out_dir: str | None = None
    dump_every: int = 0
    reference: str | None = None
    self_reference: bool = False
    reference_points: int | None = None
    check_idp: bool = False
    max_steps: int | None = None

    def __post_init__(self):
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.points < 3:
            raise ValueError("need at least 3 points")


@dataclass
class StepDiagnostics:
    n: int
    t: float
    dt: float
    dt1: float
    dt2: float
    theta: float
    picard: int
    drift_mass: float
    drift_mom: float
    drift_energy: float
    influx_mass: float
    influx_mom: float
    influx_energy: float
    rho_min: float
    rho_max: float
    T_min: float
    T_max: float
    Er_min: float
    Er_max: float


DIAG_FIELDS = [f.name for f in StepDiagnostics.__dataclass_fields__.values()]


@dataclass
class RunResult:
    U: np.ndarray
    T: np.ndarray
    t: float
    steps: int
    mesh: Mesh1D
    params: OracleParams
    diagnostics: list[StepDiagnostics] = field(default_factory=list)

    @property
    def max_drift(self) -> float:
        if not self.diagnostics:
            return 0.0
        return max(max(abs(d.drift_mass), abs(d.drift_mom), abs(d.drift_energy))
                   for d in self.diagnostics)


def conserved_totals(U: np.ndarray, ops: DiscreteOps) -> np.ndarray:
    return np.array([ops.m @ U[0], ops.m @ U[1], ops.m @ (U[2] + U[3])])


def _scales(U, ops):
    return np.array([ops.m @ np.abs(U[0]), ops.m @ np.abs(U[1]),
                     ops.m @ np.abs(U[2] + U[3])])


def _cons(col):
    return np.array([col[0], col[1], col[2] + col[3]])


def _apply_hydro_bc(U, scn: Scenario, ops: DiscreteOps) -> np.ndarray:
    """Slip walls and full Dirichlet states; returns what the overwrite injected."""
    injected = np.zeros(3)
    for j in scn.slip_nodes:
        old = _cons(U[:, j])
        U[1, j] = 0.0
        injected += ops.m[j] * (_cons(U[:, j]) - old)
    for j, state in scn.dirichlet.items():
        old = _cons(U[:, j])
        U[:, j] = state
        injected += ops.m[j] * (_cons(U[:, j]) - old)
    return injected


def run_scenario(scn: Scenario, cfl: float | None = None, t_final: float | None = None,
                 eps: float = 1e-5, check_idp: bool = False, max_steps: int | None = None,
                 on_step: Callable[[int, float, np.ndarray, StepDiagnostics], None] | None = None,
                 keep_diagnostics: bool = True) -> RunResult:
    """March the scenario to t_final; the last step is clipped to land on it exactly."""
    cfl = scn.cfl if cfl is None else cfl
    t_end = scn.t_final if t_final is None else t_final
    params = scn.params
    ops = build_ops(scn.mesh)
    cfg = ParabolicConfig(eps_picard=eps, sigma_ref=scn.sigma_ref, er_ref=scn.er_ref)
    U = scn.U0.copy()
    T = matter_temperature(U, params)
    t = 0.0
    n = 0
    diags = []
    while t < t_end:
        if max_steps is not None and n >= max_steps:
            break
        tot0 = conserved_totals(U, ops)
        dt_max = t_end - t
        try:
            if scn.hydro_enabled:
                hyp = additive_combine(U, ops, params, cfl, dt_max, check=check_idp)
                Uh, steps, influx = hyp.U, hyp.steps, hyp.influx.copy()
            else:
                steps = compute_dt(compute_viscosities(U, ops, params), ops, cfl).clipped(dt_max)
                Uh, influx = U.copy(), np.zeros(3)
            influx += _apply_hydro_bc(Uh, scn, ops)
            T_n = matter_temperature(U, params)
            par = parabolic_step(Uh, T_n, ops, params, steps.dt, cfg, scn.er_dirichlet)
            U, T = par.U, par.T
            influx[2] += par.influx
            influx += _apply_hydro_bc(U, scn, ops)
            if check_idp:
                _check_field(U, params, " after the parabolic stage")
        except Exception as exc:
            raise RuntimeError(f"step {n + 1} (t={t:.6e}): {exc}") from exc
        t = t_end if steps.dt >= dt_max else t + steps.dt
        n += 1
        drift = (conserved_totals(U, ops) - tot0 - influx) / np.maximum(_scales(U, ops), 1e-300)
        er = U[3]
        d = StepDiagnostics(n, t, steps.dt, steps.dt1, steps.dt2, steps.theta,
                            par.picard_iterations, *drift, *influx,
                            float(U[0].min()), float(U[0].max()), float(T.min()),
                            float(T.max()), float(er.min()), float(er.max()))
        if keep_diagnostics:
            diags.append(d)
        if on_step is not None:
            on_step(n, t, U, d)
    return RunResult(U=U, T=T if n else matter_temperature(U, params), t=t, steps=n,
                     mesh=scn.mesh, params=params, diagnostics=diags)


def _scenario_from_config(config: RunConfig) -> Scenario:
    # shock runs start from the reference profile when one is given
    ref = config.reference if config.scenario.startswith("shock") else None
    return build_scenario(config.scenario, config.points, ref)


def time_loop(config: RunConfig) -> RunResult:
    """Run one configuration, streaming diag.csv and dumps into config.out_dir."""
    scn = _scenario_from_config(config)
    out = Path(config.out_dir) if config.out_dir else None
    writer = None
    fh = None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        fh = (out / "diag.csv").open("w", newline="")
        writer = csv.DictWriter(fh, fieldnames=DIAG_FIELDS, lineterminator="\n")
        writer.writeheader()

    def on_step(n, t, U, d):
        if writer is not None:
            writer.writerow(asdict(d))
        if out is not None and config.dump_every and n % config.dump_every == 0:
            dump_fields(U, scn.mesh, scn.params, out / f"fields_{n:07d}.csv")

    try:
        res = run_scenario(scn, cfl=config.cfl, t_final=config.t_final, eps=config.eps,
                           check_idp=config.check_idp, max_steps=config.max_steps,
                           on_step=on_step)
    finally:
        if fh is not None:
            fh.close()
    if out is not None:
        dump_fields(res.U, scn.mesh, scn.params, out / "final.csv")
    return res


# ---------------------------------------------------------------- errors and tables

def _trapz_abs(q, x):
    q = np.abs(q)
    return float(np.sum(0.5 * (q[:-1] + q[1:]) * np.diff(x)))


def composite_l1_error(U: np.ndarray, reference: ReferenceProfile, mesh: Mesh1D,
                       params: OracleParams) -> float:
    """Sum of relative L1 errors of rho, m, E_m and E_r against the reference.

    A component whose reference norm vanishes contributes zero when the
    discrete field vanishes too (e.g. momentum in a static problem).
    """
    x = mesh.nodes
    R = profile_state(reference, x, params)
    total = 0.0
    for q in range(4):
        num = _trapz_abs(U[q] - R[q], x)
        den = _trapz_abs(R[q], x)
        if den == 0.0:
            if num == 0.0:
                continue
            raise ZeroDivisionError(f"reference component {q} has zero L1 norm")
        total += num / den
    return total


def convergence_rates(points: Iterable[int], errors: Iterable[float]) -> list[tuple]:
    """Rows (I, error, rate) with rate = log(e_prev/e) / log(h_prev/h)."""
    rows = []
    prev = None
    for I, e in zip(points, errors):
        rate = None
        if prev is not None:
            I0, e0 = prev
            rate = math.log(e0 / e) / math.log((I - 1) / (I0 - 1))
        rows.append((int(I), float(e), rate))
        prev = (I, e)
    return rows


def profile_from_fields(U: np.ndarray, mesh: Mesh1D, params: OracleParams) -> ReferenceProfile:
    T = matter_temperature(U, params)
    return ReferenceProfile(mesh.nodes.copy(), U[0].copy(), U[1] / U[0], T, U[3].copy())


def convergence_table(config: RunConfig, points: list[int],
                      reference: ReferenceProfile | None = None,
                      successive: bool = False, cache_dir: str | None = None,
                      log: Callable[[str], None] | None = None) -> list[tuple]:
    """Errors and rates for a list of meshes.

    The reference is, in order: the given profile, ``config.reference``,
    a self-reference run on ``config.reference_points`` nodes, or, with
    ``successive``, the next finer mesh of the list (Cauchy differences).
    """
    if len(points) < 2:
        raise ValueError("need at least two meshes")
    points = sorted(points)
    if reference is None and config.reference:
        reference = load_reference(config.reference)
    if reference is None and config.self_reference:
        if not config.reference_points:
            raise ValueError("self reference needs reference_points")
        reference = self_reference(config, config.reference_points, cache_dir, log)
    if reference is None and not successive:
        raise ValueError("no reference: pass a profile, --reference or --self-reference")
    results = {}
    for I in points:
        cfg = RunConfig(**{**asdict(config), "points": I})
        scn = _scenario_from_config(cfg)
        res = run_scenario(scn, cfl=cfg.cfl, t_final=cfg.t_final, eps=cfg.eps,
                           keep_diagnostics=False)
        results[I] = res
        if log:
            log(f"I={I} steps={res.steps}")
    if successive:
        pts = points[:-1]
        errs = [composite_l1_error(results[I].U,
                                   profile_from_fields(results[J].U, results[J].mesh,
                                                       results[J].params),
                                   results[I].mesh, results[I].params)
                for I, J in zip(points[:-1], points[1:])]
    else:
        pts = points
        errs = [composite_l1_error(results[I].U, reference, results[I].mesh, results[I].params)
                for I in points]
    return convergence_rates(pts, errs)


def self_reference(config: RunConfig, n_points: int, cache_dir: str | None = None,
                   log: Callable[[str], None] | None = None) -> ReferenceProfile:
    """Fine-mesh run used as the reference; cached as a dump when cache_dir is set."""
    tag = f"{config.scenario}_I{n_points}_cfl{config.cfl}_t{config.t_final}_eps{config.eps:g}"
    path = Path(cache_dir) / f"ref_{tag}.csv" if cache_dir else None
    if path is not None and path.exists():
        return load_reference(path)
    cfg = RunConfig(**{**asdict(config), "points": n_points})
    scn = _scenario_from_config(cfg)
    res = run_scenario(scn, cfl=cfg.cfl, t_final=cfg.t_final, eps=cfg.eps,
                       keep_diagnostics=False)
    if log:
        log(f"reference I={n_points} steps={res.steps}")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        dump_fields(res.U, scn.mesh, scn.params, path)
        return load_reference(path)
    return profile_from_fields(res.U, scn.mesh, scn.params)


DUMP_COLUMNS = ("x", "rho", "v", "T", "Er", "Em", "p")


def dump_fields(U: np.ndarray, mesh: Mesh1D, params: OracleParams, path) -> None:
    rho, mom, em, er = U
    v = mom / rho
    T = matter_temperature(U, params)
    e = (em - 0.5 * mom * v) / rho
    p = (params.gamma - 1.0) * rho * (e - params.e_cold) / (1.0 - params.b * rho)
    cols = (mesh.nodes, rho, v, T, er, em, p)
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(DUMP_COLUMNS) + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{float(q):.17g}" for q in row) + "\n")
