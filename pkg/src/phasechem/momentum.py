"""One time step of the variable-density momentum equation.

The momentum balance is taken in convective form,

    rho_hat(phi) dv/dt + ((rho_hat(phi) v + J) . grad) v
        = div(2 nu(phi) D(v)) - grad P + (mu - beta'(phi) sigma) grad phi,

where J = -rho_hat'(phi) m(phi) grad(mu) is the diffusive mass flux that
appears when the two densities differ.  The convective form is used because
the discrete continuity correction behind the divergence form holds only
approximately; it is discretized as a conservative face flux minus the
compressibility defect, which is skew-symmetric-consistent (it conserves
kinetic energy exactly when the advecting mass flux is discretely
divergence-free).

Each step:
  1. explicit advection by rho_hat(phi) v + J;
  2. removal of the discrete-gradient part of the net explicit force through
     a density-weighted Poisson solve (this makes hydrostatic-type balances,
     e.g. a flat interface with uniform chemical potential, exact fixed
     points);
  3. implicit viscous solve with the full symmetric-gradient stress, lagged
     viscosity, assembled variationally so the operator is symmetric
     positive definite;
  4. pressure projection with the lagged density 1/rho_hat(phi) in the
     Poisson coefficient, restoring a discretely divergence-free field.

The bounded density extension rho_hat is used throughout so transient phase
excursions beyond [-1, 1] can never produce a non-positive density.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import ModelParams
from .errors import SolverFailure
from .grid import Grid, MacVelocity
from . import elliptic

CFL_DEFAULT = 0.4
DIV_FREE_REL = 1e-8
PROJECTION_TOL = 1e-11


@dataclass
class NsStepResult:
    v: MacVelocity
    pressure: np.ndarray
    kinetic: float
    div_inf: float
    reports: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# face fluxes and forces
# ---------------------------------------------------------------------------

def relative_flux(grid: Grid, params: ModelParams, phi: np.ndarray,
                  mu: np.ndarray):
    """Diffusive mass flux J = -rho_hat'(phi) m(phi) grad(mu) at faces."""
    gx, gy = grid.gradient(mu)
    coeff = params.rho_hat_prime(phi) * params.mobility(phi)
    jx = -grid.center_to_xface(coeff) * gx
    jy = -grid.center_to_yface(coeff) * gy
    return jx, jy


def capillary_force(grid: Grid, params: ModelParams, phi: np.ndarray,
                    mu: np.ndarray, sigma: np.ndarray):
    """Interfacial force (mu - beta'(phi) sigma) grad(phi) at faces."""
    w = mu - params.beta_prime(phi) * sigma
    gx, gy = grid.gradient(phi)
    return grid.center_to_xface(w) * gx, grid.center_to_yface(w) * gy


def kinetic_energy(grid: Grid, params: ModelParams, v: MacVelocity,
                   phi: np.ndarray) -> float:
    """(1/2) integral of rho_hat(phi) |v|^2, velocity interpolated to centers."""
    uc = grid.xface_to_center(v.u)
    vc = grid.yface_to_center(v.v)
    return 0.5 * grid.integrate(params.rho_hat(phi) * (uc ** 2 + vc ** 2))


def cfl_ns(grid: Grid, v: MacVelocity, c_cfl: float = CFL_DEFAULT) -> float:
    """Advective step bound for the explicit momentum transport."""
    mu_ = float(np.abs(v.u).max())
    mv_ = float(np.abs(v.v).max())
    if mu_ == 0.0 and mv_ == 0.0:
        return float("inf")
    bound = float("inf")
    if mu_ > 0.0:
        bound = min(bound, grid.hx / mu_)
    if mv_ > 0.0:
        bound = min(bound, grid.hy / mv_)
    return c_cfl * bound


def _wrap_u(u):
    return np.vstack([u[-1:, :], u, u[:1, :]])


def _wrap_v(v):
    return np.hstack([v[:, -1:], v, v[:, :1]])


def advection_term(grid: Grid, mx: np.ndarray, my: np.ndarray,
                   v: MacVelocity):
    """Convective term ((M . grad) v) at faces, flux form minus v*div(M).

    mx, my is the advecting mass flux on x-/y-faces.  Returns full face
    arrays; entries on fixed (wall) faces are zero.
    """
    u, w = v.u, v.v
    hx, hy = grid.hx, grid.hy
    au = grid.zeros_xfaces()
    av = grid.zeros_yfaces()

    if grid.periodic:
        # drop duplicated closing faces, work on the nx x ny cores with wrap
        uc_ = u[:-1, :]
        wc_ = w[:, :-1]
        mxc_ = mx[:-1, :]
        myc_ = my[:, :-1]

        # u-momentum
        mx_cell = 0.5 * (mxc_ + np.roll(mxc_, -1, axis=0))
        u_cell = 0.5 * (uc_ + np.roll(uc_, -1, axis=0))
        fxx = mx_cell * u_cell
        my_k = 0.5 * (myc_ + np.roll(myc_, 1, axis=0))      # corner below u-face
        u_k = 0.5 * (uc_ + np.roll(uc_, 1, axis=1))
        fuy = my_k * u_k
        divm_u = (mx_cell - np.roll(mx_cell, 1, axis=0)) / hx \
            + (np.roll(my_k, -1, axis=1) - my_k) / hy
        au_core = (fxx - np.roll(fxx, 1, axis=0)) / hx \
            + (np.roll(fuy, -1, axis=1) - fuy) / hy - uc_ * divm_u
        au[:-1, :] = au_core
        au[-1, :] = au_core[0, :]

        # v-momentum
        my_cell = 0.5 * (myc_ + np.roll(myc_, -1, axis=1))
        w_cell = 0.5 * (wc_ + np.roll(wc_, -1, axis=1))
        fyy = my_cell * w_cell
        mx_k = 0.5 * (mxc_ + np.roll(mxc_, 1, axis=1))      # corner left of v-face
        w_k = 0.5 * (wc_ + np.roll(wc_, 1, axis=0))
        fvx = mx_k * w_k
        divm_v = (np.roll(mx_k, -1, axis=0) - mx_k) / hx \
            + (my_cell - np.roll(my_cell, 1, axis=1)) / hy
        av_core = (np.roll(fvx, -1, axis=0) - fvx) / hx \
            + (fyy - np.roll(fyy, 1, axis=1)) / hy - wc_ * divm_v
        av[:, :-1] = av_core
        av[:, -1] = av_core[:, 0]
        return au, av

    # no-slip box ------------------------------------------------------------
    # u-momentum on interior x-faces i = 1..nx-1
    mx_cell = 0.5 * (mx[1:, :] + mx[:-1, :])                 # (nx, ny)
    u_cell = 0.5 * (u[1:, :] + u[:-1, :])
    fxx = mx_cell * u_cell
    my_k = 0.5 * (my[1:, :] + my[:-1, :])                    # (nx-1, ny+1)
    u_k = np.zeros((grid.nx - 1, grid.ny + 1))
    u_k[:, 1:-1] = 0.5 * (u[1:-1, 1:] + u[1:-1, :-1])        # wall corners: u=0
    fuy = my_k * u_k
    divm_u = (mx_cell[1:, :] - mx_cell[:-1, :]) / hx + (my_k[:, 1:] - my_k[:, :-1]) / hy
    au[1:-1, :] = (fxx[1:, :] - fxx[:-1, :]) / hx \
        + (fuy[:, 1:] - fuy[:, :-1]) / hy - u[1:-1, :] * divm_u

    # v-momentum on interior y-faces j = 1..ny-1
    my_cell = 0.5 * (my[:, 1:] + my[:, :-1])                 # (nx, ny)
    w_cell = 0.5 * (w[:, 1:] + w[:, :-1])
    fyy = my_cell * w_cell
    mx_k = 0.5 * (mx[:, 1:] + mx[:, :-1])                    # (nx+1, ny-1)
    w_k = np.zeros((grid.nx + 1, grid.ny - 1))
    w_k[1:-1, :] = 0.5 * (w[1:, 1:-1] + w[:-1, 1:-1])        # wall corners: v=0
    fvx = mx_k * w_k
    divm_v = (mx_k[1:, :] - mx_k[:-1, :]) / hx + (my_cell[:, 1:] - my_cell[:, :-1]) / hy
    av[:, 1:-1] = (fvx[1:, :] - fvx[:-1, :]) / hx \
        + (fyy[:, 1:] - fyy[:, :-1]) / hy - w[:, 1:-1] * divm_v
    return au, av


# ---------------------------------------------------------------------------
# viscous stress, assembled variationally
# ---------------------------------------------------------------------------

def _corner_nu(grid: Grid, nu_cells: np.ndarray) -> np.ndarray:
    if grid.periodic:
        n = nu_cells
        return 0.25 * (n + np.roll(n, 1, axis=0) + np.roll(n, 1, axis=1)
                       + np.roll(np.roll(n, 1, axis=0), 1, axis=1))
    padded = np.pad(nu_cells, 1, mode="edge")
    return 0.25 * (padded[:-1, :-1] + padded[1:, :-1]
                   + padded[:-1, 1:] + padded[1:, 1:])


def _strains(grid: Grid, u: np.ndarray, w: np.ndarray):
    """(du/dx at cells, dv/dy at cells, du/dy + dv/dx at corners)."""
    hx, hy = grid.hx, grid.hy
    exx = (u[1:, :] - u[:-1, :]) / hx
    eyy = (w[:, 1:] - w[:, :-1]) / hy
    if grid.periodic:
        uc_ = u[:-1, :]
        wc_ = w[:, :-1]
        dudy = (uc_ - np.roll(uc_, 1, axis=1)) / hy
        dvdx = (wc_ - np.roll(wc_, 1, axis=0)) / hx
        return exx, eyy, dudy + dvdx

    sxy = np.zeros((grid.nx + 1, grid.ny + 1))
    # du/dy with no-slip ghost reflection at the y-walls
    sxy[:, 1:-1] += (u[:, 1:] - u[:, :-1]) / hy
    sxy[:, 0] += 2.0 * u[:, 0] / hy
    sxy[:, -1] += -2.0 * u[:, -1] / hy
    # dv/dx with no-slip ghost reflection at the x-walls
    sxy[1:-1, :] += (w[1:, :] - w[:-1, :]) / hx
    sxy[0, :] += 2.0 * w[0, :] / hx
    sxy[-1, :] += -2.0 * w[-1, :] / hx
    return exx, eyy, sxy


def viscous_apply(grid: Grid, nu_cells: np.ndarray, nu_corners: np.ndarray,
                  u: np.ndarray, w: np.ndarray):
    """-div(2 nu D(.)) as the exact adjoint of the strain maps (SPD)."""
    hx, hy = grid.hx, grid.hy
    exx, eyy, sxy = _strains(grid, u, w)
    qxx = 2.0 * nu_cells * exx
    qyy = 2.0 * nu_cells * eyy
    qxy = nu_corners * sxy

    lu = grid.zeros_xfaces()
    lv = grid.zeros_yfaces()
    if grid.periodic:
        lu_core = (np.roll(qxx, 1, axis=0) - qxx) / hx \
            + (qxy - np.roll(qxy, -1, axis=1)) / hy
        lv_core = (np.roll(qyy, 1, axis=1) - qyy) / hy \
            + (qxy - np.roll(qxy, -1, axis=0)) / hx
        lu[:-1, :] = lu_core
        lu[-1, :] = lu_core[0, :]
        lv[:, :-1] = lv_core
        lv[:, -1] = lv_core[:, 0]
        return lu, lv

    lu[1:-1, :] = (qxx[:-1, :] - qxx[1:, :]) / hx
    lu += _adjoint_gy(grid, qxy)
    lv[:, 1:-1] = (qyy[:, :-1] - qyy[:, 1:]) / hy
    lv += _adjoint_gx(grid, qxy)
    lu[0, :] = 0.0
    lu[-1, :] = 0.0
    lv[:, 0] = 0.0
    lv[:, -1] = 0.0
    return lu, lv


def _adjoint_gy(grid: Grid, q: np.ndarray) -> np.ndarray:
    """Adjoint of the ghosted du/dy corner map, landing on x-faces."""
    hy = grid.hy
    out = np.zeros((grid.nx + 1, grid.ny))
    out[:, 0] = (2.0 * q[:, 0] - q[:, 1]) / hy
    out[:, 1:-1] = (q[:, 1:-2] - q[:, 2:-1]) / hy
    out[:, -1] = (q[:, -2] - 2.0 * q[:, -1]) / hy
    return out


def _adjoint_gx(grid: Grid, q: np.ndarray) -> np.ndarray:
    """Adjoint of the ghosted dv/dx corner map, landing on y-faces."""
    hx = grid.hx
    out = np.zeros((grid.nx, grid.ny + 1))
    out[0, :] = (2.0 * q[0, :] - q[1, :]) / hx
    out[1:-1, :] = (q[1:-2, :] - q[2:-1, :]) / hx
    out[-1, :] = (q[-2, :] - 2.0 * q[-1, :]) / hx
    return out


def viscous_dissipation(grid: Grid, nu_cells: np.ndarray, v: MacVelocity) -> float:
    """Quadrature of 2 nu(phi) |D v|^2, consistent with the stress operator."""
    nu_k = _corner_nu(grid, nu_cells)
    exx, eyy, sxy = _strains(grid, v.u, v.v)
    total = float((2.0 * nu_cells * (exx ** 2 + eyy ** 2)).sum())
    total += float((nu_k * sxy ** 2).sum())
    return total * grid.cell_volume


def _viscous_diag(grid: Grid, nu_cells: np.ndarray, nu_corners: np.ndarray):
    """Diagonal of the variational stress operator, for Jacobi preconditioning."""
    hx2, hy2 = grid.hx ** 2, grid.hy ** 2
    nk = nu_corners
    du = grid.zeros_xfaces()
    dv = grid.zeros_yfaces()
    if grid.periodic:
        du_core = 2.0 * (nu_cells + np.roll(nu_cells, 1, axis=0)) / hx2 \
            + (nk + np.roll(nk, -1, axis=1)) / hy2
        dv_core = 2.0 * (nu_cells + np.roll(nu_cells, 1, axis=1)) / hy2 \
            + (nk + np.roll(nk, -1, axis=0)) / hx2
        du[:-1, :] = du_core
        du[-1, :] = du_core[0, :]
        dv[:, :-1] = dv_core
        dv[:, -1] = dv_core[:, 0]
        return du, dv
    du[1:-1, :] = 2.0 * (nu_cells[:-1, :] + nu_cells[1:, :]) / hx2
    cy = (nk[:, :-1] + nk[:, 1:]) / hy2
    cy[:, 0] += 3.0 * nk[:, 0] / hy2
    cy[:, -1] += 3.0 * nk[:, -1] / hy2
    du += cy
    dv[:, 1:-1] = 2.0 * (nu_cells[:, :-1] + nu_cells[:, 1:]) / hy2
    cx = (nk[:-1, :] + nk[1:, :]) / hx2
    cx[0, :] += 3.0 * nk[0, :] / hx2
    cx[-1, :] += 3.0 * nk[-1, :] / hx2
    dv += cx
    du[0, :] = 1.0
    du[-1, :] = 1.0
    dv[:, 0] = 1.0
    dv[:, -1] = 1.0
    return du, dv


def _dot_pair(grid: Grid, au, av, bu, bv) -> float:
    if grid.periodic:
        return float(np.vdot(au[:-1, :], bu[:-1, :]).real
                     + np.vdot(av[:, :-1], bv[:, :-1]).real)
    return float(np.vdot(au, bu).real + np.vdot(av, bv).real)


def _cg_velocity(grid: Grid, apply_a, bu, bv, diag_u, diag_v,
                 tol: float, maxiter: int, x0=None):
    """PCG on the SPD velocity operator with Jacobi preconditioning."""
    norm_b = np.sqrt(_dot_pair(grid, bu, bv, bu, bv))
    if norm_b == 0.0 and x0 is None:
        return (np.zeros_like(bu), np.zeros_like(bv)), elliptic.SolveReport(0, 0.0, True)
    if x0 is None:
        xu = np.zeros_like(bu)
        xv = np.zeros_like(bv)
        ru, rv = bu.copy(), bv.copy()
    else:
        xu = np.array(x0[0], dtype=float, copy=True)
        xv = np.array(x0[1], dtype=float, copy=True)
        au0, av0 = apply_a(xu, xv)
        ru, rv = bu - au0, bv - av0
    if norm_b == 0.0:
        norm_b = 1.0
    if not (ru.any() or rv.any()):
        return (xu, xv), elliptic.SolveReport(0, 0.0, True)
    zu, zv = ru / diag_u, rv / diag_v
    pu, pv = zu.copy(), zv.copy()
    rz = _dot_pair(grid, ru, rv, zu, zv)
    res = np.sqrt(_dot_pair(grid, ru, rv, ru, rv)) / norm_b
    it = 0
    while res > tol and it < maxiter:
        apu, apv = apply_a(pu, pv)
        pap = _dot_pair(grid, pu, pv, apu, apv)
        if pap <= 0.0:
            break
        alpha = rz / pap
        xu += alpha * pu
        xv += alpha * pv
        ru -= alpha * apu
        rv -= alpha * apv
        res = np.sqrt(_dot_pair(grid, ru, rv, ru, rv)) / norm_b
        it += 1
        if res <= tol:
            break
        zu, zv = ru / diag_u, rv / diag_v
        rz_new = _dot_pair(grid, ru, rv, zu, zv)
        beta = rz_new / rz
        pu = zu + beta * pu
        pv = zv + beta * pv
        rz = rz_new
    return (xu, xv), elliptic.SolveReport(it, res, res <= tol)


def check_divergence_free(grid: Grid, v: MacVelocity,
                          rel: float = DIV_FREE_REL) -> float:
    """Max-norm of div(v); raises if it exceeds rel * ||v||_inf / min(h)."""
    div_inf = float(np.abs(v.divergence()).max())
    scale = v.max_abs() / min(grid.hx, grid.hy)
    if div_inf > rel * max(scale, 1e-300):
        raise ValueError(
            f"velocity is not discretely divergence-free: |div v|={div_inf:.3e}, "
            f"allowed {rel * scale:.3e}")
    return div_inf


def ns_step(grid: Grid, params: ModelParams, v: MacVelocity, phi: np.ndarray,
            mu: np.ndarray, sigma: np.ndarray, dt: float,
            tol: float = elliptic.DEFAULT_TOL,
            maxiter: int = elliptic.DEFAULT_MAXITER) -> NsStepResult:
    """Advance the velocity by one projection step; returns a solenoidal field."""
    check_divergence_free(grid, v)
    if dt == 0.0:
        vc = v.copy()
        return NsStepResult(vc, grid.zeros_cells(),
                            kinetic_energy(grid, params, vc, phi),
                            float(np.abs(vc.divergence()).max()), {})

    rho_c = params.rho_hat(phi)
    rho_u = grid.center_to_xface(rho_c)
    rho_v = grid.center_to_yface(rho_c)
    nu_c = params.nu(phi)
    nu_k = _corner_nu(grid, nu_c)
    inv_ru = 1.0 / rho_u
    inv_rv = 1.0 / rho_v

    jx, jy = relative_flux(grid, params, phi, mu)
    mass_x = rho_u * v.u + jx
    mass_y = rho_v * v.v + jy
    au, av = advection_term(grid, mass_x, mass_y, v)
    fx, fy = capillary_force(grid, params, phi, mu, sigma)
    rx = fx - au
    ry = fy - av

    reports = {}
    precond = elliptic.SpectralInverse(
        grid, lambda lam: lam / float(rho_c.mean()))

    def apply_pressure(p):
        gx, gy = grid.gradient(p)
        return -grid.divergence(inv_ru * gx, inv_rv * gy)

    # peel off the discrete-gradient part of the explicit force so balanced
    # forces produce no spurious flow
    rhs_q = -grid.divergence(inv_ru * rx, inv_rv * ry)
    q, rep_q = elliptic.cg(apply_pressure, rhs_q, precond, tol,
                           maxiter, project_mean=True)
    reports["balance"] = rep_q
    gqx, gqy = grid.gradient(q)
    rx = rx - gqx
    ry = ry - gqy

    # implicit viscous solve: (rho/dt + L) v** = rho/dt v^n + R
    diag_u, diag_v = _viscous_diag(grid, nu_c, nu_k)
    diag_u = diag_u + rho_u / dt
    diag_v = diag_v + rho_v / dt

    def apply_helmholtz(pu, pv):
        lu, lv = viscous_apply(grid, nu_c, nu_k, pu, pv)
        out_u = rho_u / dt * pu + lu
        out_v = rho_v / dt * pv + lv
        if not grid.periodic:
            out_u[0, :] = 0.0
            out_u[-1, :] = 0.0
            out_v[:, 0] = 0.0
            out_v[:, -1] = 0.0
        return out_u, out_v

    bu = rho_u / dt * v.u + rx
    bv = rho_v / dt * v.v + ry
    if not grid.periodic:
        bu[0, :] = 0.0
        bu[-1, :] = 0.0
        bv[:, 0] = 0.0
        bv[:, -1] = 0.0
    (us, vs), rep_visc = _cg_velocity(grid, apply_helmholtz, bu, bv,
                                      diag_u, diag_v, tol, maxiter,
                                      x0=(v.u, v.v))
    rep_visc.require("viscous solve")
    reports["viscous"] = rep_visc

    # projection back onto the discretely divergence-free space
    vstar = MacVelocity(grid, us, vs)
    vstar.enforce_boundary()
    rhs_p = -vstar.divergence() / dt
    dp, rep_p = elliptic.cg(apply_pressure, rhs_p, precond, PROJECTION_TOL,
                            maxiter, project_mean=True)
    rep_p.require("pressure projection")
    reports["projection"] = rep_p
    gpx, gpy = grid.gradient(dp)
    v_new = MacVelocity(grid, vstar.u - dt * inv_ru * gpx,
                        vstar.v - dt * inv_rv * gpy)
    v_new.enforce_boundary()

    pressure = q + dp
    pressure -= pressure.mean()
    div_inf = float(np.abs(v_new.divergence()).max())
    return NsStepResult(v_new, pressure,
                        kinetic_energy(grid, params, v_new, phi),
                        div_inf, reports)
