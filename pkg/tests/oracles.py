"""Independent reference implementations used only by the tests.

Plain Python and scipy, no numba, written from the textbook formulas.
"""
import math

from scipy.optimize import brentq


def toro_f(p, rho, pz, g):
    """Gamma-law wave curve (b = 0)."""
    a = math.sqrt(g * pz / rho)
    if p > pz:
        A = 2.0 / ((g + 1.0) * rho)
        B = (g - 1.0) / (g + 1.0) * pz
        return (p - pz) * math.sqrt(A / (p + B))
    return 2.0 * a / (g - 1.0) * ((p / pz) ** ((g - 1.0) / (2.0 * g)) - 1.0)


def toro_exact_speed(rl, vl, pl, rr, vr, pr, g):
    """Exact max |wave speed| and p* of the gamma-law Riemann problem."""
    al = math.sqrt(g * pl / rl)
    ar = math.sqrt(g * pr / rr)
    if 2.0 * (al + ar) / (g - 1.0) <= vr - vl:
        # vacuum: the fan spans from the left head to the right head
        return max(abs(vl - al), abs(vr + ar)), 0.0

    def phi(p):
        return toro_f(p, rl, pl, g) + toro_f(p, rr, pr, g) + vr - vl

    hi = max(pl, pr)
    while phi(hi) < 0.0:
        hi *= 2.0
    ps = brentq(phi, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    if ps > pl:
        sl = vl - al * math.sqrt(1.0 + (g + 1.0) / (2.0 * g) * (ps / pl - 1.0))
    else:
        sl = vl - al
    if ps > pr:
        sr = vr + ar * math.sqrt(1.0 + (g + 1.0) / (2.0 * g) * (ps / pr - 1.0))
    else:
        sr = vr + ar
    return max(abs(sl), abs(sr)), ps


def rad_f(p, rho, pz):
    if p == pz:
        return 0.0
    if p > pz:
        return math.sqrt(6.0 / rho) * (p - pz) / math.sqrt(p + pz)
    return math.sqrt(12.0 / rho) * (math.sqrt(p) - math.sqrt(pz))


def rad_phi(p, rl, vl, pl, rr, vr, pr):
    return rad_f(p, rl, pl) + rad_f(p, rr, pr) + vr - vl


def rad_bisect(rl, vl, pl, rr, vr, pr, tol=1e-15):
    """p* by plain bisection on phi; 0 when phi(0) >= 0 (vacuum)."""
    if rad_phi(0.0, rl, vl, pl, rr, vr, pr) >= 0.0:
        return 0.0
    lo, hi = 0.0, max(pl, pr, 1e-300)
    while rad_phi(hi, rl, vl, pl, rr, vr, pr) < 0.0:
        hi *= 2.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if rad_phi(mid, rl, vl, pl, rr, vr, pr) < 0.0:
            lo = mid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 2 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)


def single_node_relaxation(rho_cv, T_h, E_h, s, a_r, sweeps):
    """Picard sweeps of the linearized relaxation on one node, then the closure.

    s = dt * sigma_a * c (constant opacity). Returns (T, E).
    """
    T_star = T_h
    T_old = T_star
    E = E_h
    for _ in range(sweeps):
        A, B = rho_cv, s * a_r * T_star**3
        E = (E_h + s * A / (A + B) * a_r * T_star**3 * T_h) / (1.0 + s * A / (A + B))
        T_old = T_star
        T_star = brentq(lambda T: rho_cv * (T - T_h) + s * (a_r * T**4 - E), 1e-14, 10.0,
                        xtol=1e-16, rtol=1e-15)
    T = (rho_cv * T_h + s * E) / (rho_cv + s * a_r * T_old**3)
    return T, E
