"""Uniform rectangular grid, field containers and discrete operators.

Scalars (phase field, chemical potential, concentration, pressure) live at
cell centers; velocity components live on cell faces (MAC staggering) so that
the discrete incompressibility constraint and the pressure projection are
exact.  Two boundary modes are supported:

* ``neumann_noslip`` -- homogeneous Neumann for scalars (ghost reflection),
  no-slip walls for the velocity.  All boundary-face fluxes vanish, which
  makes the flux-form divergence telescope to zero exactly.
* ``periodic`` -- fully periodic wrap, used for analytic verification runs
  (Taylor-Green); face arrays keep a duplicated boundary face so array shapes
  match the Neumann layout.

All operators are linear maps on plain float64 arrays; the composition
``divergence(gradient(f))`` *is* the Laplacian, bit for bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class BcMode(enum.Enum):
    NEUMANN_NOSLIP = "neumann_noslip"
    PERIODIC = "periodic"


def _as_bc(mode) -> BcMode:
    if isinstance(mode, BcMode):
        return mode
    return BcMode(str(mode))


@dataclass(frozen=True)
class Grid:
    """Uniform nx-by-ny cell grid on [0, lx] x [0, ly]."""

    nx: int
    ny: int
    lx: float
    ly: float
    bc: BcMode = BcMode.NEUMANN_NOSLIP

    def __post_init__(self):
        object.__setattr__(self, "bc", _as_bc(self.bc))
        if self.nx < 4 or self.ny < 4:
            raise ValueError(f"grid needs nx, ny >= 4, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0 and np.isfinite(self.lx) and np.isfinite(self.ly)):
            raise ValueError("domain lengths must be positive and finite")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def cell_volume(self) -> float:
        return self.hx * self.hy

    @property
    def periodic(self) -> bool:
        return self.bc is BcMode.PERIODIC

    def cell_centers(self):
        """Coordinate arrays (x[nx, 1], y[1, ny]) broadcastable over cells."""
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return x[:, None], y[None, :]

    def zeros_cells(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny))

    def zeros_xfaces(self) -> np.ndarray:
        return np.zeros((self.nx + 1, self.ny))

    def zeros_yfaces(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny + 1))

    # ---- discrete operators -------------------------------------------------

    def gradient(self, f: np.ndarray):
        """Two-point difference of a cell field onto faces.

        Returns (gx, gy) with shapes (nx+1, ny) and (nx, ny+1).  Boundary
        faces carry 0 in Neumann mode (ghost reflection) and the wrapped
        difference in periodic mode, duplicated at both ends.
        """
        gx = self.zeros_xfaces()
        gy = self.zeros_yfaces()
        gx[1:-1, :] = (f[1:, :] - f[:-1, :]) / self.hx
        gy[:, 1:-1] = (f[:, 1:] - f[:, :-1]) / self.hy
        if self.periodic:
            gx[0, :] = (f[0, :] - f[-1, :]) / self.hx
            gx[-1, :] = gx[0, :]
            gy[:, 0] = (f[:, 0] - f[:, -1]) / self.hy
            gy[:, -1] = gy[:, 0]
        return gx, gy

    def divergence(self, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
        """Flux-form divergence of a face field back onto cells.

        In ``neumann_noslip`` mode the boundary-face fluxes must be exactly
        zero (zero-flux boundary condition); anything else is a usage error,
        not a rounding issue, and is rejected.
        """
        if not self.periodic:
            if (fx[0, :].any() or fx[-1, :].any()
                    or fy[:, 0].any() or fy[:, -1].any()):
                raise ValueError("nonzero boundary-face flux in neumann_noslip mode")
        return (fx[1:, :] - fx[:-1, :]) / self.hx + (fy[:, 1:] - fy[:, :-1]) / self.hy

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """Five-point Laplacian; literally divergence(gradient(f))."""
        return self.divergence(*self.gradient(f))

    def integrate(self, f: np.ndarray) -> float:
        """Midpoint quadrature sum(f) * hx * hy."""
        return float(f.sum()) * self.cell_volume

    def mean(self, f: np.ndarray) -> float:
        return float(f.mean())

    # ---- interpolation helpers ---------------------------------------------

    def center_to_xface(self, f: np.ndarray) -> np.ndarray:
        """Arithmetic average of cell values onto x-faces (mirror/wrap ghosts)."""
        out = np.empty((self.nx + 1, self.ny))
        out[1:-1, :] = 0.5 * (f[1:, :] + f[:-1, :])
        if self.periodic:
            out[0, :] = 0.5 * (f[0, :] + f[-1, :])
            out[-1, :] = out[0, :]
        else:
            out[0, :] = f[0, :]
            out[-1, :] = f[-1, :]
        return out

    def center_to_yface(self, f: np.ndarray) -> np.ndarray:
        out = np.empty((self.nx, self.ny + 1))
        out[:, 1:-1] = 0.5 * (f[:, 1:] + f[:, :-1])
        if self.periodic:
            out[:, 0] = 0.5 * (f[:, 0] + f[:, -1])
            out[:, -1] = out[:, 0]
        else:
            out[:, 0] = f[:, 0]
            out[:, -1] = f[:, -1]
        return out

    def harmonic_to_xface(self, f: np.ndarray) -> np.ndarray:
        """Harmonic average onto x-faces; f must be strictly positive."""
        out = np.empty((self.nx + 1, self.ny))
        out[1:-1, :] = 2.0 * f[1:, :] * f[:-1, :] / (f[1:, :] + f[:-1, :])
        if self.periodic:
            out[0, :] = 2.0 * f[0, :] * f[-1, :] / (f[0, :] + f[-1, :])
            out[-1, :] = out[0, :]
        else:
            out[0, :] = f[0, :]
            out[-1, :] = f[-1, :]
        return out

    def harmonic_to_yface(self, f: np.ndarray) -> np.ndarray:
        out = np.empty((self.nx, self.ny + 1))
        out[:, 1:-1] = 2.0 * f[:, 1:] * f[:, :-1] / (f[:, 1:] + f[:, :-1])
        if self.periodic:
            out[:, 0] = 2.0 * f[:, 0] * f[:, -1] / (f[:, 0] + f[:, -1])
            out[:, -1] = out[:, 0]
        else:
            out[:, 0] = f[:, 0]
            out[:, -1] = f[:, -1]
        return out

    def xface_to_center(self, u: np.ndarray) -> np.ndarray:
        return 0.5 * (u[1:, :] + u[:-1, :])

    def yface_to_center(self, v: np.ndarray) -> np.ndarray:
        return 0.5 * (v[:, 1:] + v[:, :-1])

    def face_norm_sq(self, gx: np.ndarray, gy: np.ndarray,
                     wx: np.ndarray | None = None,
                     wy: np.ndarray | None = None) -> float:
        """Quadrature of |g|^2 (optionally w-weighted) over faces.

        Interior faces each own one cell volume; in periodic mode the
        duplicated closing face is skipped so every physical face counts once.
        """
        sx = slice(0, -1) if self.periodic else slice(1, -1)
        sy = sx
        qx = gx[sx, :] ** 2 if wx is None else wx[sx, :] * gx[sx, :] ** 2
        qy = gy[:, sy] ** 2 if wy is None else wy[:, sy] * gy[:, sy] ** 2
        return (float(qx.sum()) + float(qy.sum())) * self.cell_volume


def require_finite(name: str, *arrays: np.ndarray):
    for a in arrays:
        if not np.isfinite(a).all():
            raise FloatingPointError(f"non-finite values in {name}")


@dataclass
class ScalarField:
    """Cell-centered scalar field bound to a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})")
        require_finite("ScalarField", self.values)

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, grid.zeros_cells())

    @classmethod
    def full(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full((grid.nx, grid.ny), float(value)))

    def integrate(self) -> float:
        return self.grid.integrate(self.values)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class MacVelocity:
    """Face-centered velocity: u on x-faces, v on y-faces."""

    grid: Grid
    u: np.ndarray = field(default=None)
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.u is None:
            self.u = self.grid.zeros_xfaces()
        if self.v is None:
            self.v = self.grid.zeros_yfaces()
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != (self.grid.nx + 1, self.grid.ny):
            raise ValueError(f"u shape {self.u.shape} wrong for grid")
        if self.v.shape != (self.grid.nx, self.grid.ny + 1):
            raise ValueError(f"v shape {self.v.shape} wrong for grid")
        require_finite("MacVelocity", self.u, self.v)

    @classmethod
    def zeros(cls, grid: Grid) -> "MacVelocity":
        return cls(grid, grid.zeros_xfaces(), grid.zeros_yfaces())

    def divergence(self) -> np.ndarray:
        g = self.grid
        return (self.u[1:, :] - self.u[:-1, :]) / g.hx + (self.v[:, 1:] - self.v[:, :-1]) / g.hy

    def enforce_boundary(self):
        """Zero wall-normal components (no-slip) or re-tie periodic duplicates."""
        if self.grid.periodic:
            self.u[-1, :] = self.u[0, :]
            self.v[:, -1] = self.v[:, 0]
        else:
            self.u[0, :] = 0.0
            self.u[-1, :] = 0.0
            self.v[:, 0] = 0.0
            self.v[:, -1] = 0.0

    def max_abs(self) -> float:
        m = 0.0
        if self.u.size:
            m = max(m, float(np.abs(self.u).max()))
        if self.v.size:
            m = max(m, float(np.abs(self.v).max()))
        return m

    def copy(self) -> "MacVelocity":
        return MacVelocity(self.grid, self.u.copy(), self.v.copy())

    def speed_at_centers(self) -> np.ndarray:
        g = self.grid
        uc = g.xface_to_center(self.u)
        vc = g.yface_to_center(self.v)
        return np.sqrt(uc ** 2 + vc ** 2)
