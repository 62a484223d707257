"""Riemann problem for the radiation-pressure subsystem.

Each side carries (rho, v, p) with p = E_r / 3. The pressure function
phi(p) = f_L(p) + f_R(p) + v_R - v_L is increasing and concave, so p* is
found by safeguarded bracketing and reported as the upper end of the
final bracket; the wave speeds only depend on max(p*, p_Z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb

VACUUM, TWO_EXPANSION, MIXED, TWO_SHOCK = 0, 1, 2, 3
CASE_NAMES = ("vacuum", "two_expansion", "mixed", "two_shock")

_REL_TOL = 1e-14
_MAX_ITER = 2000


@dataclass(frozen=True)
class RadRiemannInput:
    rho_L: float
    v_L: float
    p_L: float
    rho_R: float
    v_R: float
    p_R: float

    def __post_init__(self):
        if not (self.rho_L > 0.0 and self.rho_R > 0.0):
            raise ValueError("densities must be positive")
        if not (self.p_L >= 0.0 and self.p_R >= 0.0):
            raise ValueError("radiation pressures must be nonnegative")


@dataclass(frozen=True)
class RadRiemannSolution:
    p_star: float
    case_tag: str
    lambda_L_minus: float
    lambda_R_plus: float

    @property
    def mu_max(self) -> float:
        return max(-self.lambda_L_minus, self.lambda_R_plus)


def project_pi2(W, n: float = 1.0):
    """(rho, v.n, p_r) of one side from a reduced state (rho, m, E_t)."""
    rho, mom, et = W
    v = mom / rho
    er = et - 0.5 * rho * v * v
    return rho, n * v, er / 3.0


@nb.njit(cache=True)
def f_side(p, rho, pz):
    if p == pz:
        return 0.0
    if p > pz:
        return math.sqrt(6.0 / rho) * (p - pz) / math.sqrt(p + pz)
    return math.sqrt(12.0 / rho) * (math.sqrt(p) - math.sqrt(pz))


@nb.njit(cache=True)
def phi(p, rl, vl, pl, rr, vr, pr):
    return f_side(p, rl, pl) + f_side(p, rr, pr) + vr - vl


@nb.njit(cache=True)
def df_side(p, rho, pz):
    if p <= 0.0:
        return math.inf
    if p >= pz:
        # grouped so tiny pressures do not underflow
        return math.sqrt(6.0 / rho) * ((p + 3.0 * pz) / (p + pz)) / (2.0 * math.sqrt(p + pz))
    return math.sqrt(3.0 / rho) / math.sqrt(p)


@nb.njit(cache=True)
def _dphi(p, rl, pl, rr, pr):
    return df_side(p, rl, pl) + df_side(p, rr, pr)


@nb.njit(cache=True)
def _refine(lo, hi, rl, vl, pl, rr, vr, pr):
    """Shrink a bracket phi(lo) <= 0 <= phi(hi); returns the final upper end.

    phi is increasing and concave: a Newton step from lo stays below the
    root and a secant step lands above it; bisection is the fallback.
    """
    flo = phi(lo, rl, vl, pl, rr, vr, pr)
    fhi = phi(hi, rl, vl, pl, rr, vr, pr)
    for _ in range(_MAX_ITER):
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        width = hi - lo
        if width <= _REL_TOL * hi:
            break
        dhi = _dphi(hi, rl, pl, rr, pr)
        ub = min(hi, lo - flo / dhi)
        lb = max(lo, hi - fhi / dhi)
        if ub - lb <= _REL_TOL * ub:
            return ub
        d = _dphi(lo, rl, pl, rr, pr)
        if d < math.inf:
            x = lo - flo / d
            if lo < x < hi:
                fx = phi(x, rl, vl, pl, rr, vr, pr)
                if fx <= 0.0:
                    lo, flo = x, fx
                else:
                    hi, fhi = x, fx
        if flo < 0.0 < fhi:
            x = lo - flo * (hi - lo) / (fhi - flo)
            if lo < x < hi:
                fx = phi(x, rl, vl, pl, rr, vr, pr)
                if fx <= 0.0:
                    lo, flo = x, fx
                else:
                    hi, fhi = x, fx
        if hi - lo > 0.5 * width:
            x = 0.5 * (lo + hi)
            fx = phi(x, rl, vl, pl, rr, vr, pr)
            if fx <= 0.0:
                lo, flo = x, fx
            else:
                hi, fhi = x, fx
    return hi


@nb.njit(cache=True)
def two_shock_majorant(rl, vl, pl, rr, vr, pr):
    a = math.sqrt(3.0 / rl) + math.sqrt(3.0 / rr)
    b = vr - vl
    c = -math.sqrt(3.0 / rl) * pl - math.sqrt(3.0 / rr) * pr
    sq = math.sqrt(b * b - 4.0 * a * c)
    # positive root without cancellation when b > 0
    x = -2.0 * c / (b + sq) if b > 0.0 else (-b + sq) / (2.0 * a)
    return x * x


@nb.njit(cache=True)
def solve_kernel(rl, vl, pl, rr, vr, pr):
    """Return (p_star, case, lambda_L_minus, lambda_R_plus)."""
    sl = math.sqrt(12.0 / rl)
    sr = math.sqrt(12.0 / rr)
    if vr - vl > sl * math.sqrt(pl) + sr * math.sqrt(pr):
        ps = 0.0
        case = VACUUM
    else:
        pmin = min(pl, pr)
        pmax = max(pl, pr)
        if phi(pmin, rl, vl, pl, rr, vr, pr) > 0.0:
            case = TWO_EXPANSION
            x = (vl - vr + sl * math.sqrt(pl) + sr * math.sqrt(pr)) / (sl + sr)
            ps = x * x
        elif phi(pmax, rl, vl, pl, rr, vr, pr) >= 0.0:
            case = MIXED
            ps = _refine(pmin, pmax, rl, vl, pl, rr, vr, pr)
        else:
            case = TWO_SHOCK
            hi = max(two_shock_majorant(rl, vl, pl, rr, vr, pr), pmax)
            # guard against rounding at the majorant itself
            grow = 1e-12
            while phi(hi, rl, vl, pl, rr, vr, pr) < 0.0:
                hi = max(hi * (1.0 + grow), 1e-300)
                grow *= 2.0
            ps = _refine(pmax, hi, rl, vl, pl, rr, vr, pr)
    lam_l = -math.sqrt((pl + max(ps, pl)) / (6.0 * rl))
    lam_r = math.sqrt((pr + max(ps, pr)) / (6.0 * rr))
    return ps, case, lam_l, lam_r


@nb.njit(cache=True)
def mu_max_kernel(rl, vl, pl, rr, vr, pr):
    ps, case, lam_l, lam_r = solve_kernel(rl, vl, pl, rr, vr, pr)
    return max(-lam_l, lam_r)


def wave_function_f(p: float, side: str, inp: RadRiemannInput) -> float:
    if p < 0.0:
        raise ValueError("p must be nonnegative")
    if side == "L":
        return f_side(p, inp.rho_L, inp.p_L)
    if side == "R":
        return f_side(p, inp.rho_R, inp.p_R)
    raise ValueError("side must be 'L' or 'R'")


def phi_of(p: float, inp: RadRiemannInput) -> float:
    return phi(p, inp.rho_L, inp.v_L, inp.p_L, inp.rho_R, inp.v_R, inp.p_R)


def solve_p_star(inp: RadRiemannInput) -> RadRiemannSolution:
    ps, case, lam_l, lam_r = solve_kernel(inp.rho_L, inp.v_L, inp.p_L,
                                          inp.rho_R, inp.v_R, inp.p_R)
    return RadRiemannSolution(p_star=ps, case_tag=CASE_NAMES[case],
                              lambda_L_minus=lam_l, lambda_R_plus=lam_r)


def mu_max_pair(WL, WR, n: float = 1.0) -> float:
    """Wave-speed bound between two reduced states along direction n."""
    rl, vl, pl = project_pi2(WL, n)
    rr, vr, pr = project_pi2(WR, n)
    return float(mu_max_kernel(rl, vl, max(pl, 0.0), rr, vr, max(pr, 0.0)))

