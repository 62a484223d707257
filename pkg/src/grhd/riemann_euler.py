"""Upper bound on the maximum wave speed for the Euler stage.

E_r rides along as a passive scalar, so only the gas states matter. Each
side is treated as a covolume gamma-law gas with its own local gamma,
and p* is bracketed with a Newton step from below and a secant step
from above (phi is increasing and concave). The speed is evaluated at
the upper end of the bracket, so it never underestimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb

from .thermo import DomainError, OracleParams, check_admissible, pressure

SHOCK, RAREFACTION, VACUUM = 0, 1, 2
WAVE_NAMES = ("shock", "rarefaction", "vacuum")

_REL_TOL = 1e-12
_MAX_ITER = 100


@dataclass(frozen=True)
class ExtendedState:
    rho: float
    mom_n: float
    e_mech: float
    e_rad: float
    Gamma: float

    @property
    def gamma_local(self) -> float:
        return self.Gamma / self.rho


@dataclass(frozen=True)
class WaveSpeedBound:
    lambda_max: float
    p_star: float
    wave_types: tuple[str, str]


def project_pi1(U, n: float = 1.0):
    """Drop the tangential kinetic energy; in 1D this only orients the momentum."""
    rho, mom, em, er = U
    return (rho, n * mom, em, er)


def extend(U, params: OracleParams) -> ExtendedState:
    rho, mom, em, er = (float(u) for u in U)
    p = float(pressure((rho, mom, em, er), params))
    e = (em - 0.5 * mom * mom / rho) / rho
    return ExtendedState(rho, mom, em, er, rho + p * (1.0 - params.b * rho) / e)


def restrict(ext: ExtendedState):
    return (ext.rho, ext.mom_n, ext.e_mech, ext.e_rad)


@nb.njit(cache=True)
def _f(p, rho, pz, g, b):
    cov = 1.0 - b * rho
    if p >= pz:
        A = 2.0 * cov / ((g + 1.0) * rho)
        B = (g - 1.0) / (g + 1.0) * pz
        return (p - pz) * math.sqrt(A / (p + B))
    c = math.sqrt(g * pz / (rho * cov))
    return 2.0 * c * cov / (g - 1.0) * ((p / pz) ** ((g - 1.0) / (2.0 * g)) - 1.0)


@nb.njit(cache=True)
def _df(p, rho, pz, g, b):
    cov = 1.0 - b * rho
    if p >= pz:
        A = 2.0 * cov / ((g + 1.0) * rho)
        B = (g - 1.0) / (g + 1.0) * pz
        return math.sqrt(A / (p + B)) * (1.0 - 0.5 * (p - pz) / (p + B))
    if p <= 0.0:
        return math.inf
    c = math.sqrt(g * pz / (rho * cov))
    return c * cov / (g * pz) * (p / pz) ** (-(g + 1.0) / (2.0 * g))


@nb.njit(cache=True)
def _phi(p, rl, vl, pl, gl, rr, vr, pr, gr, b):
    return _f(p, rl, pl, gl, b) + _f(p, rr, pr, gr, b) + vr - vl


@nb.njit(cache=True)
def _speed(p, rl, vl, pl, gl, rr, vr, pr, gr, b):
    # c_Z sqrt(1 + (g+1)/(2g) (p - p_Z)/p_Z) without dividing by a possibly tiny p_Z
    lam_l = vl - math.sqrt((gl * pl + 0.5 * (gl + 1.0) * max(p - pl, 0.0))
                           / (rl * (1.0 - b * rl)))
    lam_r = vr + math.sqrt((gr * pr + 0.5 * (gr + 1.0) * max(p - pr, 0.0))
                           / (rr * (1.0 - b * rr)))
    return max(abs(lam_l), abs(lam_r))


@nb.njit(cache=True)
def _two_shock_bound(rl, vl, pl, gl, rr, vr, pr, gr, b):
    # p + B_Z <= 2p above both data pressures, which bounds f_Z from below
    al = math.sqrt((1.0 - b * rl) / ((gl + 1.0) * rl))
    ar = math.sqrt((1.0 - b * rr) / ((gr + 1.0) * rr))
    qa = al + ar
    qb = vr - vl
    qc = -(al * pl + ar * pr)
    sq = math.sqrt(qb * qb - 4.0 * qa * qc)
    # positive root without cancellation when qb > 0
    x = -2.0 * qc / (qb + sq) if qb > 0.0 else (-qb + sq) / (2.0 * qa)
    return x * x


@nb.njit(cache=True)
def initial_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b):
    """Return (lo, hi, vacuum) with phi(lo) <= 0 <= phi(hi)."""
    if _phi(0.0, rl, vl, pl, gl, rr, vr, pr, gr, b) >= 0.0:
        return 0.0, 0.0, True
    pmin = min(pl, pr)
    pmax = max(pl, pr)
    if _phi(pmin, rl, vl, pl, gl, rr, vr, pr, gr, b) >= 0.0:
        return 0.0, pmin, False
    if _phi(pmax, rl, vl, pl, gl, rr, vr, pr, gr, b) >= 0.0:
        return pmin, pmax, False
    hi = _two_shock_bound(rl, vl, pl, gl, rr, vr, pr, gr, b)
    hi = max(hi, pmax)
    grow = 1e-12
    while _phi(hi, rl, vl, pl, gl, rr, vr, pr, gr, b) < 0.0:
        hi = max(hi * (1.0 + grow), 1e-300)
        grow *= 2.0
    return pmax, hi, False


@nb.njit(cache=True)
def p_star_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b):
    """Return (lo, hi, vacuum, iterations) with the root of phi in [lo, hi]."""
    lo, hi, vac = initial_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b)
    if vac:
        return 0.0, 0.0, True, 0
    flo = _phi(lo, rl, vl, pl, gl, rr, vr, pr, gr, b)
    fhi = _phi(hi, rl, vl, pl, gl, rr, vr, pr, gr, b)
    it = 0
    while it < _MAX_ITER:
        if flo == 0.0:
            hi = lo
            break
        if fhi == 0.0:
            lo = hi
            break
        width = hi - lo
        if width <= _REL_TOL * hi:
            break
        # phi' is decreasing, so phi'(hi) bounds phi' on [lo, hi] from below:
        # p* <= lo - phi(lo) / phi'(hi) and p* >= hi - phi(hi) / phi'(hi)
        dhi = _df(hi, rl, pl, gl, b) + _df(hi, rr, pr, gr, b)
        ub = min(hi, lo - flo / dhi)
        lb = max(lo, hi - fhi / dhi)
        if ub - lb <= _REL_TOL * ub:
            lo, hi = lb, ub
            break
        it += 1
        # Newton from the lower end stays below the root (concavity)
        d = _df(lo, rl, pl, gl, b) + _df(lo, rr, pr, gr, b)
        if d < math.inf and d > 0.0:
            x = lo - flo / d
            if lo < x < hi:
                fx = _phi(x, rl, vl, pl, gl, rr, vr, pr, gr, b)
                if fx <= 0.0:
                    lo, flo = x, fx
                else:
                    hi, fhi = x, fx
        # secant through the bracket ends lands above the root
        if flo < 0.0 < fhi:
            x = lo - flo * (hi - lo) / (fhi - flo)
            if lo < x < hi:
                fx = _phi(x, rl, vl, pl, gl, rr, vr, pr, gr, b)
                if fx <= 0.0:
                    lo, flo = x, fx
                else:
                    hi, fhi = x, fx
        if hi - lo > 0.5 * width:
            x = 0.5 * (lo + hi)
            fx = _phi(x, rl, vl, pl, gl, rr, vr, pr, gr, b)
            if fx <= 0.0:
                lo, flo = x, fx
            else:
                hi, fhi = x, fx
    return lo, hi, False, it


@nb.njit(cache=True)
def lambda_max_kernel(rl, vl, pl, gl, rr, vr, pr, gr, b):
    """Return (lambda_max, p_star upper estimate)."""
    if rl == rr and vl == vr and pl == pr and gl == gr:
        return _speed(pl, rl, vl, pl, gl, rr, vr, pr, gr, b), pl
    lo, hi, vac, it = p_star_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b)
    return _speed(hi, rl, vl, pl, gl, rr, vr, pr, gr, b), hi


@nb.njit(cache=True)
def lambda_cheap_kernel(rl, vl, pl, gl, rr, vr, pr, gr, b):
    """Non-iterated bound from the initial bracket; never below the iterated one."""
    lo, hi, vac = initial_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b)
    return _speed(hi, rl, vl, pl, gl, rr, vr, pr, gr, b)


def _side(U, params: OracleParams):
    rho, mom, em, er = (float(u) for u in U)
    rep = check_admissible((rho, mom, em, er), params)
    if not rep.in_A:
        raise DomainError("inadmissible Riemann data: " + ", ".join(rep.violated))
    ext = extend((rho, mom, em, er), params)
    p = float(pressure((rho, mom, em, er), params))
    return rho, mom / rho, p, ext.gamma_local


def lambda_max_euler(UL, UR, params: OracleParams, cheap: bool = False) -> WaveSpeedBound:
    """Wave-speed bound for projected states UL (left) and UR (right)."""
    rl, vl, pl, gl = _side(UL, params)
    rr, vr, pr, gr = _side(UR, params)
    b = params.b
    if cheap:
        lam = lambda_cheap_kernel(rl, vl, pl, gl, rr, vr, pr, gr, b)
        lo, ps, vac = initial_bracket(rl, vl, pl, gl, rr, vr, pr, gr, b)
    else:
        lam, ps = lambda_max_kernel(rl, vl, pl, gl, rr, vr, pr, gr, b)
        vac = _phi(0.0, rl, vl, pl, gl, rr, vr, pr, gr, b) >= 0.0
    if vac:
        waves = ("vacuum", "vacuum")
    else:
        waves = (WAVE_NAMES[SHOCK if ps > pl else RAREFACTION],
                 WAVE_NAMES[SHOCK if ps > pr else RAREFACTION])
    return WaveSpeedBound(lambda_max=float(lam), p_star=float(ps), wave_types=waves)


def pressure_function(p: float, UL, UR, params: OracleParams) -> float:
    rl, vl, pl, gl = _side(UL, params)
    rr, vr, pr, gr = _side(UR, params)
    return float(_phi(p, rl, vl, pl, gl, rr, vr, pr, gr, params.b))

