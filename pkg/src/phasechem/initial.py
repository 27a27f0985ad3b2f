"""Deterministic initial-condition generators.

All generators produce smooth fields (the solver's structure diagnostics
assume initial data resolved on the grid) and are reproducible bit for bit
from the seed: the noise source is the counter-based Philox generator, whose
stream is platform independent.

Generators:

* phi: ``spinodal`` (seeded uniform noise, low-pass filtered to a physical
  correlation width, amplitude-normalized and mean-adjusted), ``tanh_strip``
  (flat horizontal interface), ``zero``.
* sigma: ``gaussian_bump`` (nonnegative by construction), ``uniform``,
  ``zero``.
* velocity: ``taylor_green`` (periodic mode only; built from a discrete
  streamfunction curl, hence divergence-free to rounding), ``zero``.
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .elliptic import SpectralInverse
from .errors import ConfigError
from .grid import Grid, MacVelocity
from .simulation import SimState


def _noise(grid: Grid, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.Philox(seed))
    return 2.0 * rng.random((grid.nx, grid.ny)) - 1.0


def smooth_noise(grid: Grid, seed: int, amplitude: float,
                 width: float) -> np.ndarray:
    """Uniform noise passed through a Gaussian spectral filter of the given
    physical width, rescaled so max|field| = amplitude and mean = 0."""
    raw = _noise(grid, seed)
    if width > 0:
        filt = SpectralInverse(grid, lambda lam: np.exp(0.5 * width ** 2 * lam))
        raw = filt(raw)
    raw -= raw.mean()
    peak = float(np.abs(raw).max())
    if peak > 0 and amplitude > 0:
        return raw * (amplitude / peak)
    return np.zeros_like(raw)


def phi_field(grid: Grid, cfg: RunConfig) -> np.ndarray:
    ic = cfg.ic
    if ic.phi == "zero":
        return grid.zeros_cells()
    if ic.phi == "spinodal":
        width = ic.phi_smooth if ic.phi_smooth >= 0 else grid.lx / 16.0
        phi = smooth_noise(grid, ic.seed, ic.phi_amplitude, width)
        return phi + ic.phi_mean
    if ic.phi == "tanh_strip":
        _, y = grid.cell_centers()
        x, _ = grid.cell_centers()
        return np.tanh((y - 0.5 * grid.ly) / ic.tanh_width) * np.ones_like(x)
    raise ConfigError([f"unknown phi generator '{ic.phi}'"])


def sigma_field(grid: Grid, cfg: RunConfig) -> np.ndarray:
    ic = cfg.ic
    if ic.sigma == "zero":
        return grid.zeros_cells()
    if ic.sigma == "uniform":
        return np.full((grid.nx, grid.ny), ic.sigma_background)
    if ic.sigma == "gaussian_bump":
        x, y = grid.cell_centers()
        r2 = (x - 0.5 * grid.lx) ** 2 + (y - 0.5 * grid.ly) ** 2
        return ic.sigma_background + ic.sigma_amplitude * np.exp(
            -r2 / (2.0 * ic.sigma_width ** 2))
    raise ConfigError([f"unknown sigma generator '{ic.sigma}'"])


def velocity_field(grid: Grid, cfg: RunConfig) -> MacVelocity:
    ic = cfg.ic
    if ic.velocity == "zero":
        return MacVelocity.zeros(grid)
    if ic.velocity == "taylor_green":
        if not grid.periodic:
            raise ConfigError(["taylor_green velocity requires periodic "
                               "boundary conditions"])
        k = 2.0 * np.pi / grid.lx
        xk = np.arange(grid.nx + 1)[:, None] * grid.hx
        yk = np.arange(grid.ny + 1)[None, :] * grid.hy
        psi = -(ic.velocity_amplitude / k) * np.cos(k * xk) * np.cos(k * yk)
        u = (psi[:, 1:] - psi[:, :-1]) / grid.hy
        v = -(psi[1:, :] - psi[:-1, :]) / grid.hx
        vel = MacVelocity(grid, u, v)
        vel.enforce_boundary()
        return vel
    raise ConfigError([f"unknown velocity generator '{ic.velocity}'"])


def generate_ic(cfg: RunConfig) -> SimState:
    """Build the initial simulation state described by the configuration."""
    grid = cfg.grid.build()
    phi = phi_field(grid, cfg)
    sigma = sigma_field(grid, cfg)
    vel = velocity_field(grid, cfg)
    return SimState.initial(grid, cfg.params, vel, phi, sigma)
