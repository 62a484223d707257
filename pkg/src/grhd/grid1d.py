"""P1 finite elements on a 1D mesh: lumped masses, gradient coefficients, stiffness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thermo import OracleParams, opacities

# 3-point Gauss rule on the unit cell; exact for polynomial integrands up to degree 5
GAUSS_X = np.array([0.5 - 0.5 * np.sqrt(0.6), 0.5, 0.5 + 0.5 * np.sqrt(0.6)])
GAUSS_W = np.array([5.0, 8.0, 5.0]) / 18.0


@dataclass(frozen=True)
class Mesh1D:
    nodes: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("a mesh needs at least 3 nodes")
        if not np.all(np.diff(x) > 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)

    @classmethod
    def uniform(cls, x_lo: float, x_hi: float, n_points: int) -> "Mesh1D":
        return cls(np.linspace(x_lo, x_hi, n_points))

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def boundary(self) -> tuple[int, int]:
        return (0, self.n - 1)

    @property
    def interior(self) -> np.ndarray:
        return np.arange(1, self.n - 1)


@dataclass(frozen=True)
class DiscreteOps:
    """Lumped masses and gradient coefficients of a P1 mesh.

    ``c_up[i]`` is c_{i,i+1} and ``c_dn[i]`` is c_{i+1,i}; ``c_diag[i]`` is c_ii.
    ``h`` keeps the cell sizes so the stiffness can be rebuilt from the ops alone.
    """

    m: np.ndarray
    h: np.ndarray
    c_up: np.ndarray
    c_dn: np.ndarray
    c_diag: np.ndarray

    @property
    def n(self) -> int:
        return self.m.size

    def stencil(self, i: int) -> list[int]:
        return [j for j in (i - 1, i, i + 1) if 0 <= j < self.n]

    def coef(self, i: int, j: int) -> float:
        if j == i + 1:
            return float(self.c_up[i])
        if j == i - 1:
            return float(self.c_dn[j])
        if j == i:
            return float(self.c_diag[i])
        return 0.0

    def dense_c(self) -> np.ndarray:
        n = self.n
        C = np.diag(self.c_diag.copy())
        idx = np.arange(n - 1)
        C[idx, idx + 1] = self.c_up
        C[idx + 1, idx] = self.c_dn
        return C


def build_ops(mesh: Mesh1D) -> DiscreteOps:
    h = mesh.h
    m = np.empty(mesh.n)
    m[0] = 0.5 * h[0]
    m[-1] = 0.5 * h[-1]
    m[1:-1] = 0.5 * (h[:-1] + h[1:])
    c_up = np.full(mesh.n - 1, 0.5)
    c_dn = np.full(mesh.n - 1, -0.5)
    c_diag = np.zeros(mesh.n)
    # close row sums to zero
    c_diag[:-1] -= c_up
    c_diag[1:] -= c_dn
    h = h.copy()
    for a in (m, h, c_up, c_dn, c_diag):
        a.setflags(write=False)
    return DiscreteOps(m=m, h=h, c_up=c_up, c_dn=c_dn, c_diag=c_diag)


@dataclass(frozen=True)
class StiffnessMatrix:
    """Symmetric tridiagonal k_ij: ``diag[i]`` = k_ii, ``off[i]`` = k_{i,i+1}."""

    diag: np.ndarray
    off: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def cell_diffusion(rho, T, params: OracleParams) -> np.ndarray:
    """Cell average of c / (3 sigma_t) along the P1 interpolants of rho and T."""
    rho = np.asarray(rho, dtype=float)
    T = np.asarray(T, dtype=float)
    inv = np.zeros(rho.size - 1)
    for s, w in zip(GAUSS_X, GAUSS_W):
        _, sig_t = opacities((1.0 - s) * rho[:-1] + s * rho[1:], (1.0 - s) * T[:-1] + s * T[1:],
                             params)
        if not np.all(sig_t > 0.0):
            raise ValueError("assembly needs sigma_t > 0 in every cell")
        inv += w / sig_t
    return params.c_light * inv / 3.0


def assemble_stiffness(mesh, rho, T, params: OracleParams) -> StiffnessMatrix:
    """Accepts a Mesh1D or a DiscreteOps (both expose the cell sizes ``h``)."""
    D = cell_diffusion(rho, T, params)
    off = -D / mesh.h
    diag = np.zeros(off.size + 1)
    diag[:-1] -= off
    diag[1:] -= off
    return StiffnessMatrix(diag=diag, off=off)
