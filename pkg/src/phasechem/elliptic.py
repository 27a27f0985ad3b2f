"""Iterative solvers for the elliptic problems of the model.

Three zero-flux problems recur: the (minus) Neumann Laplacian inverse, the
variable-coefficient operator -div(m(a) grad u), and the variable-density
pressure Poisson equation of the projection step.  All are symmetric positive
definite on the mean-zero subspace and are solved by preconditioned conjugate
gradients.

Because the grid is a uniform rectangle, the constant-coefficient operator
diagonalizes exactly in a cosine (Neumann) or Fourier (periodic) basis; that
exact inverse is used as the preconditioner, so constant-coefficient solves
converge in one iteration and variable-coefficient ones in a handful, with
iteration counts governed by the coefficient contrast only.

Every solve enforces the solvability condition (mean-zero right-hand side up
to a strict tolerance), normalizes the solution to zero mean, and returns a
report with the final relative residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft

from .errors import SolvabilityError, SolverFailure
from .grid import BcMode, Grid

DEFAULT_TOL = 1e-10
DEFAULT_MAXITER = 500

MEAN_ZERO_REL = 1e-10   # |mean(f)| <= MEAN_ZERO_REL * ||f||_rms distinguishes
                        # rounding from modelling bugs


@dataclass
class SolveReport:
    iterations: int
    residual: float
    converged: bool

    def require(self, what: str = "elliptic solve") -> "SolveReport":
        if not self.converged:
            raise SolverFailure(
                f"{what} did not converge: residual {self.residual:.3e} "
                f"after {self.iterations} iterations")
        return self


# ---------------------------------------------------------------------------
# spectral (exact) constant-coefficient inverse, used as preconditioner
# ---------------------------------------------------------------------------

from functools import lru_cache


@lru_cache(maxsize=32)
def laplacian_eigenvalues(grid: Grid) -> np.ndarray:
    """Eigenvalues of the discrete -Laplacian in the grid's modal basis."""
    scale = 2.0 * np.pi if grid.periodic else np.pi
    kx = np.arange(grid.nx)
    ky = np.arange(grid.ny)
    lx = (2.0 - 2.0 * np.cos(scale * kx / grid.nx)) / grid.hx ** 2
    ly = (2.0 - 2.0 * np.cos(scale * ky / grid.ny)) / grid.hy ** 2
    eigs = lx[:, None] + ly[None, :]
    eigs.setflags(write=False)
    return eigs


class SpectralInverse:
    """Exact inverse of a constant-coefficient operator on the grid.

    The operator is described by its symbol as a function of the discrete
    (nonnegative) Laplacian eigenvalues lam; e.g. ``lambda lam: c0*lam`` for
    -c0*Delta or ``lambda lam: 1 + dt*lam`` for a backward-Euler heat step.
    Zero symbol entries (the constant mode of a pure Neumann operator) are
    projected out.
    """

    def __init__(self, grid: Grid, symbol: Callable[[np.ndarray], np.ndarray]):
        self.grid = grid
        self.laplacian_eigs = laplacian_eigenvalues(grid)
        sym = np.asarray(symbol(self.laplacian_eigs), dtype=float)
        self._zero = sym == 0.0
        sym = np.where(self._zero, 1.0, sym)
        self._inv = 1.0 / sym

    def __call__(self, r: np.ndarray) -> np.ndarray:
        g = self.grid
        if g.periodic:
            rhat = scipy.fft.fft2(r)
            rhat *= self._inv
            rhat[self._zero] = 0.0
            return np.real(scipy.fft.ifft2(rhat))
        rhat = scipy.fft.dctn(r, type=2, norm="ortho")
        rhat *= self._inv
        rhat[self._zero] = 0.0
        return scipy.fft.idctn(rhat, type=2, norm="ortho")


def helmholtz_solve(grid: Grid, shift_dt: float, rhs: np.ndarray) -> np.ndarray:
    """Backward-Euler heat solve (I - dt*Delta) u = rhs, done spectrally (exact).

    Solved in residual form u = rhs + correction so states annihilated by the
    discrete Laplacian (e.g. uniform fields) are exact fixed points bit for
    bit, not merely to transform rounding.
    """
    inv = SpectralInverse(grid, lambda lam: 1.0 + shift_dt * lam)
    defect = shift_dt * grid.laplacian(rhs)
    if not defect.any():
        return rhs.copy()
    return rhs + inv(defect)


# ---------------------------------------------------------------------------
# preconditioned conjugate gradients (matrix-free, arrays as vectors)
# ---------------------------------------------------------------------------

def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a, b).real)


def cg(apply_a: Callable[[np.ndarray], np.ndarray],
       b: np.ndarray,
       precond: Callable[[np.ndarray], np.ndarray] | None = None,
       tol: float = DEFAULT_TOL,
       maxiter: int = DEFAULT_MAXITER,
       project_mean: bool = False,
       x0: np.ndarray | None = None):
    """Classic PCG on an SPD operator; returns (x, SolveReport).

    ``project_mean`` keeps all iterates in the zero-mean subspace, which makes
    semidefinite pure-Neumann operators definite in exact arithmetic and stops
    rounding from re-injecting the constant mode.  A warm start ``x0`` that
    already satisfies the system returns unchanged (zero iterations).
    """
    norm_b = np.sqrt(_dot(b, b))
    if norm_b == 0.0 and x0 is None:
        return np.zeros_like(b), SolveReport(0, 0.0, True)

    def clean(v):
        if project_mean:
            return v - v.mean()
        return v

    b = clean(b)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = clean(np.array(x0, dtype=float, copy=True))
        r = b - clean(apply_a(x))
    if norm_b == 0.0:
        norm_b = 1.0
    if not r.any():
        return x, SolveReport(0, 0.0, True)
    z = clean(precond(r)) if precond is not None else r.copy()
    p = z.copy()
    rz = _dot(r, z)
    res = np.sqrt(_dot(r, r)) / norm_b
    it = 0
    while res > tol and it < maxiter:
        ap = clean(apply_a(p))
        pap = _dot(p, ap)
        if pap <= 0.0:
            break  # loss of positive definiteness; report as non-converged
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        res = np.sqrt(_dot(r, r)) / norm_b
        it += 1
        if res <= tol:
            break
        z = clean(precond(r)) if precond is not None else r.copy()
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return clean(x), SolveReport(it, res, res <= tol)


# ---------------------------------------------------------------------------
# the three model solves
# ---------------------------------------------------------------------------

def _require_mean_zero(f: np.ndarray) -> np.ndarray:
    rms = float(np.sqrt(np.mean(f * f)))
    fbar = float(f.mean())
    if abs(fbar) > MEAN_ZERO_REL * max(rms, 1e-300):
        raise SolvabilityError(
            f"right-hand side must be mean-zero: |mean|={abs(fbar):.3e} "
            f"exceeds {MEAN_ZERO_REL:g} * rms={rms:.3e}")
    return f - fbar


def apply_flux_operator(grid: Grid, cx: np.ndarray, cy: np.ndarray,
                        u: np.ndarray) -> np.ndarray:
    """-div(c grad u) with given face coefficients and zero-flux boundaries."""
    gx, gy = grid.gradient(u)
    return -grid.divergence(cx * gx, cy * gy)


def neumann_solve(grid: Grid, f: np.ndarray,
                  tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER):
    """Solve -Delta u = f with zero-flux boundaries; u normalized to zero mean."""
    f = _require_mean_zero(np.asarray(f, dtype=float))
    precond = SpectralInverse(grid, lambda lam: lam)
    u, report = cg(grid_neg_laplacian(grid), f, precond, tol, maxiter,
                   project_mean=True)
    return u, report


def grid_neg_laplacian(grid: Grid):
    def apply_a(u):
        return -grid.laplacian(u)
    return apply_a


def var_coeff_solve(grid: Grid, coeff_cells: np.ndarray, f: np.ndarray,
                    tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER):
    """Solve -div(c grad u) = f for a strictly positive cell coefficient c.

    The coefficient is averaged harmonically onto faces, which preserves flux
    continuity and keeps the operator symmetric positive definite.
    """
    coeff_cells = np.asarray(coeff_cells, dtype=float)
    if not np.all(coeff_cells > 0):
        raise ValueError("coefficient must be strictly positive")
    f = _require_mean_zero(np.asarray(f, dtype=float))
    cx = grid.harmonic_to_xface(coeff_cells)
    cy = grid.harmonic_to_yface(coeff_cells)
    cbar = float(coeff_cells.mean())
    precond = SpectralInverse(grid, lambda lam: cbar * lam)

    def apply_a(u):
        return apply_flux_operator(grid, cx, cy, u)

    u, report = cg(apply_a, f, precond, tol, maxiter, project_mean=True)
    return u, report


def pressure_solve(grid: Grid, rho_cells: np.ndarray, rhs: np.ndarray,
                   tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER):
    """Solve -div((1/rho) grad p) = rhs for the projection step.

    The face coefficient is the harmonic mean of 1/rho, i.e. the reciprocal of
    the arithmetically averaged face density -- the same face density used in
    the velocity correction, so the corrected field is divergence-free to the
    solver tolerance.  Returns (p, (cx, cy), report).
    """
    rho_cells = np.asarray(rho_cells, dtype=float)
    if not np.all(rho_cells > 0):
        raise ValueError("density must be strictly positive")
    rhs = _require_mean_zero(np.asarray(rhs, dtype=float))
    cx = 1.0 / grid.center_to_xface(rho_cells)
    cy = 1.0 / grid.center_to_yface(rho_cells)
    cbar = float(1.0 / rho_cells.mean())
    precond = SpectralInverse(grid, lambda lam: cbar * lam)

    def apply_a(p):
        return apply_flux_operator(grid, cx, cy, p)

    p, report = cg(apply_a, rhs, precond, tol, maxiter, project_mean=True)
    return p, (cx, cy), report
