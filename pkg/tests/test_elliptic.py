import numpy as np
import numpy.testing as npt
import pytest

from phasechem.elliptic import (SpectralInverse, apply_flux_operator, cg,
                                helmholtz_solve, neumann_solve,
                                pressure_solve, var_coeff_solve)
from phasechem.errors import SolvabilityError
from phasechem.grid import Grid


def mean_zero(rng, shape):
    f = rng.standard_normal(shape)
    return f - f.mean()


def l2(grid, f):
    return np.sqrt(grid.integrate(f * f))


def test_neumann_zero_rhs(grid):
    u, rep = neumann_solve(grid, np.zeros((grid.nx, grid.ny)))
    assert not u.any() and rep.converged and rep.iterations == 0


def test_neumann_eigenfunction_oracle():
    errs = []
    for nx in (32, 64):
        g = Grid(nx, 4, 1.0, 1.0)
        x, _ = g.cell_centers()
        exact = np.cos(np.pi * x / g.lx) * np.ones((1, 4))
        f = (np.pi / g.lx) ** 2 * exact
        u, rep = neumann_solve(g, f - f.mean())
        assert rep.converged
        errs.append(np.abs(u - (exact - exact.mean())).max())
    assert np.log2(errs[0] / errs[1]) > 1.9


def test_neumann_linearity(grid, rng):
    f = mean_zero(rng, (grid.nx, grid.ny))
    u1, _ = neumann_solve(grid, f)
    u2, _ = neumann_solve(grid, 2.0 * f)
    npt.assert_allclose(u2, 2.0 * u1, rtol=0, atol=1e-9 * np.abs(u1).max())


def test_neumann_rejects_nonzero_mean(grid):
    with pytest.raises(SolvabilityError):
        neumann_solve(grid, np.ones((grid.nx, grid.ny)))


def test_residual_contract_and_mean(grid, rng):
    f = mean_zero(rng, (grid.nx, grid.ny))
    u, rep = neumann_solve(grid, f, tol=1e-11)
    assert rep.converged and rep.residual <= 1e-11
    assert abs(u.mean()) < 1e-13 * np.abs(u).max()
    resid = l2(grid, -grid.laplacian(u) - f) / l2(grid, f)
    assert resid <= 2e-11


def test_operator_symmetry_probes(grid, rng):
    a = 0.5 + rng.random((grid.nx, grid.ny))
    cx = grid.harmonic_to_xface(a)
    cy = grid.harmonic_to_yface(a)
    u = rng.standard_normal((grid.nx, grid.ny))
    w = rng.standard_normal((grid.nx, grid.ny))
    lhs = (apply_flux_operator(grid, cx, cy, u) * w).sum()
    rhs = (apply_flux_operator(grid, cx, cy, w) * u).sum()
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_var_coeff_constant_reduces_to_neumann(grid, rng):
    m0 = 0.7
    f = mean_zero(rng, (grid.nx, grid.ny))
    u_var, rep = var_coeff_solve(grid, np.full((grid.nx, grid.ny), m0), f)
    u_neu, _ = neumann_solve(grid, f)
    assert rep.converged
    npt.assert_allclose(u_var, u_neu / m0, rtol=0, atol=1e-9 * np.abs(u_neu).max())


def test_var_coeff_adjoint_symmetry(rng):
    g = Grid(16, 16, 1.0, 1.0)
    a = 0.5 + 0.5 * rng.random((16, 16))
    f1 = mean_zero(rng, (16, 16))
    f2 = mean_zero(rng, (16, 16))
    g1, _ = var_coeff_solve(g, a, f1, tol=1e-13)
    g2, _ = var_coeff_solve(g, a, f2, tol=1e-13)
    s1 = g.integrate(f1 * g2)
    s2 = g.integrate(f2 * g1)
    assert abs(s1 - s2) <= 1e-10 * max(abs(s1), abs(s2))


def test_var_coeff_norm_equivalence(params, rng):
    # two-sided bound between the plain and weighted solution gradients
    g = Grid(16, 16, 1.0, 1.0)
    a_field = 2.0 * rng.random((16, 16)) - 1.0         # in [-1, 1]
    m_cells = params.mobility(a_field)
    m_lo, m_hi = params.m_star, params.m_star_upper
    for _ in range(5):
        f = mean_zero(rng, (16, 16))
        u_g, _ = var_coeff_solve(g, m_cells, f, tol=1e-13)
        u_n, _ = neumann_solve(g, f, tol=1e-13)
        mx = g.harmonic_to_xface(m_cells)
        my = g.harmonic_to_yface(m_cells)
        weighted = np.sqrt(g.face_norm_sq(*g.gradient(u_g), mx, my))
        plain = np.sqrt(g.face_norm_sq(*g.gradient(u_n)))
        assert np.sqrt(m_lo) * weighted <= plain * (1 + 1e-8)
        assert plain <= np.sqrt(m_hi) * weighted * (1 + 1e-8)


def test_var_coeff_requires_positive_coefficient(grid):
    with pytest.raises(ValueError):
        var_coeff_solve(grid, np.zeros((grid.nx, grid.ny)),
                        np.zeros((grid.nx, grid.ny)))


def test_pressure_uniform_density_reduction(grid, rng):
    rho0 = 2.0
    f = mean_zero(rng, (grid.nx, grid.ny))
    p_var, _, rep = pressure_solve(grid, np.full((grid.nx, grid.ny), rho0), f)
    u_neu, _ = neumann_solve(grid, f)
    assert rep.converged
    npt.assert_allclose(p_var, rho0 * u_neu, rtol=0, atol=1e-8 * np.abs(u_neu).max())


def test_pressure_zero_rhs(grid, params):
    rho = params.rho_hat(np.zeros((grid.nx, grid.ny)))
    p, _, rep = pressure_solve(grid, rho, np.zeros((grid.nx, grid.ny)))
    assert not p.any() and rep.converged


def test_pressure_projection_divergence(grid, params, rng):
    # project a random face field and check the corrected divergence
    phi = np.clip(0.5 * rng.standard_normal((grid.nx, grid.ny)), -0.9, 0.9)
    rho = params.rho_hat(phi)
    u = grid.zeros_xfaces()
    v = grid.zeros_yfaces()
    u[1:-1, :] = rng.standard_normal((grid.nx - 1, grid.ny))
    v[:, 1:-1] = rng.standard_normal((grid.nx, grid.ny - 1))
    div = (u[1:, :] - u[:-1, :]) / grid.hx + (v[:, 1:] - v[:, :-1]) / grid.hy
    p, (cx, cy), rep = pressure_solve(grid, rho, -div, tol=1e-12)
    assert rep.converged
    gx, gy = grid.gradient(p)
    u2 = u - cx * gx
    v2 = v - cy * gy
    div2 = (u2[1:, :] - u2[:-1, :]) / grid.hx + (v2[:, 1:] - v2[:, :-1]) / grid.hy
    scale = max(np.abs(u2).max(), np.abs(v2).max()) / min(grid.hx, grid.hy)
    assert np.abs(div2).max() <= 1e-8 * scale


def test_helmholtz_discrete_eigen_factor():
    g = Grid(64, 4, 1.0, 1.0)
    x, _ = g.cell_centers()
    mode = np.cos(np.pi * x / g.lx) * np.ones((1, 4))
    dt = 0.01
    lam_h = (2.0 - 2.0 * np.cos(np.pi / g.nx)) / g.hx ** 2
    out = helmholtz_solve(g, dt, mode)
    npt.assert_allclose(out, mode / (1.0 + dt * lam_h), rtol=1e-12)


@pytest.mark.parametrize("bc", ["neumann_noslip", "periodic"])
def test_spectral_inverse_inverts_operator(bc, rng):
    g = Grid(16, 24, 1.0, 2.0, bc)
    f = mean_zero(rng, (16, 24))
    inv = SpectralInverse(g, lambda lam: lam)
    u = inv(f)
    npt.assert_allclose(-g.laplacian(u), f, rtol=0, atol=1e-10 * np.abs(f).max())


def test_cg_zero_rhs(grid):
    x, rep = cg(lambda u: -grid.laplacian(u), np.zeros((grid.nx, grid.ny)))
    assert not x.any() and rep.converged
