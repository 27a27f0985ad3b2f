"""Coupled time stepping and runtime verification of the model's structure.

One step of the full system is a Lie splitting: the chemical density moves
first (seeing the old velocity and phase field), then the phase field and
chemical potential (seeing the new density), then the velocity (seeing all
new fields).  Each substep sees the newest available coupling field while
every solve stays linear.

Alongside the state, a ledger records per-step diagnostics: the two conserved
masses, the four energy components (kinetic, mixing, entropy, interaction),
the three dissipation channels (viscous, chemical-potential, concentration),
positivity and boundedness monitors, and the running energy-inequality
residual

    r(t_n) = E(t_n) + sum_k dt * D(t_k) - E(0),

which the theory behind the model predicts to be <= 0 up to discretization
error.  These numbers are what the acceptance suite pins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .coeffs import ModelParams
from .errors import InvariantViolation
from .grid import Grid, MacVelocity, require_finite
from . import cahn_hilliard, momentum, sigma as sigma_mod

log = logging.getLogger(__name__)


@dataclass
class NumericsOptions:
    tol: float = 1e-10
    maxiter: int = 500
    c_cfl: float = 0.4
    check_cfl: bool = True


@dataclass
class SimState:
    grid: Grid
    params: ModelParams
    t: float
    step: int
    v: MacVelocity
    phi: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    pressure: np.ndarray | None = None
    clamp_events: int = 0
    cfl_violations: int = 0

    def __post_init__(self):
        require_finite("SimState", self.phi, self.mu, self.sigma)
        if np.any(self.sigma < 0):
            raise InvariantViolation(
                f"sigma must be nonnegative, min={self.sigma.min():.3e}")
        arrays = [self.phi, self.mu, self.sigma, self.v.u, self.v.v]
        if self.pressure is not None:
            arrays.append(self.pressure)
        for arr in arrays:
            arr.setflags(write=False)

    @classmethod
    def initial(cls, grid: Grid, params: ModelParams, v: MacVelocity,
                phi: np.ndarray, sigma: np.ndarray) -> "SimState":
        mu = cahn_hilliard.compute_mu(grid, params, phi, sigma)
        return cls(grid, params, 0.0, 0, v, phi, mu, sigma)


@dataclass
class DiagnosticsRecord:
    t: float
    step: int
    mass_phi: float
    mass_sigma: float
    e_kin: float
    e_mix: float
    e_ent: float
    e_int: float
    e_total: float
    d_visc: float
    d_mu: float
    d_sigma: float
    min_sigma: float
    max_abs_phi: float
    sep_margin: float
    sigma_linf: float
    energy_residual: float

    COLUMNS = ("t", "step", "mass_phi", "mass_sigma", "E_kin", "E_mix",
               "E_ent", "E_int", "E_total", "D_visc", "D_mu", "D_sigma",
               "min_sigma", "max_abs_phi", "sep_margin", "sigma_linf",
               "energy_residual")

    def as_row(self):
        return [getattr(self, f.name) for f in fields(self)]


# ---------------------------------------------------------------------------
# energy and dissipation functionals
# ---------------------------------------------------------------------------

def energy_budget(grid: Grid, params: ModelParams, v: MacVelocity,
                  phi: np.ndarray, sigma: np.ndarray) -> dict:
    e_kin = momentum.kinetic_energy(grid, params, v, phi)
    e_mix = cahn_hilliard.free_energy(grid, params, phi)
    e_ent = sigma_mod.entropy(grid, sigma)
    e_int = grid.integrate(params.beta(phi) * sigma)
    return {
        "E_kin": e_kin,
        "E_mix": e_mix,
        "E_ent": e_ent,
        "E_int": e_int,
        "E_total": e_kin + e_mix + e_ent + e_int,
    }


def dissipation_budget(grid: Grid, params: ModelParams, v: MacVelocity,
                       phi: np.ndarray, mu: np.ndarray,
                       sigma: np.ndarray) -> dict:
    d_visc = momentum.viscous_dissipation(grid, params.nu(phi), v)

    m_cells = params.mobility(phi)
    gx, gy = grid.gradient(mu)
    d_mu = grid.face_norm_sq(gx, gy,
                             grid.harmonic_to_xface(m_cells),
                             grid.harmonic_to_yface(m_cells))

    # |2 grad sqrt(sigma) + sqrt(sigma) grad beta(phi)|^2, the concentration
    # channel written in a form that is nonnegative by construction
    root = np.sqrt(sigma)
    rx, ry = grid.gradient(root)
    bx, by = grid.gradient(params.beta(phi))
    qx = 2.0 * rx + grid.center_to_xface(root) * bx
    qy = 2.0 * ry + grid.center_to_yface(root) * by
    d_sigma = grid.face_norm_sq(qx, qy)
    return {
        "D_visc": d_visc,
        "D_mu": d_mu,
        "D_sigma": d_sigma,
        "D_total": d_visc + d_mu + d_sigma,
    }


def total_energy(state: SimState) -> float:
    return energy_budget(state.grid, state.params, state.v, state.phi,
                         state.sigma)["E_total"]


def total_dissipation(state: SimState) -> float:
    return dissipation_budget(state.grid, state.params, state.v, state.phi,
                              state.mu, state.sigma)["D_total"]


class DiagnosticsLedger:
    """Accumulates per-step records and the energy-inequality residual."""

    def __init__(self):
        self.records: list[DiagnosticsRecord] = []
        self._e0 = None
        self._cum_diss = 0.0
        self._sigma_linf = 0.0

    def observe(self, state: SimState, dt: float = 0.0) -> DiagnosticsRecord:
        g, p = state.grid, state.params
        e = energy_budget(g, p, state.v, state.phi, state.sigma)
        d = dissipation_budget(g, p, state.v, state.phi, state.mu, state.sigma)
        if self._e0 is None:
            self._e0 = e["E_total"]
        else:
            self._cum_diss += dt * d["D_total"]
        self._sigma_linf = max(self._sigma_linf,
                               sigma_mod.sigma_sup_norm(state.sigma))
        rec = DiagnosticsRecord(
            t=state.t,
            step=state.step,
            mass_phi=g.integrate(state.phi),
            mass_sigma=g.integrate(state.sigma),
            e_kin=e["E_kin"],
            e_mix=e["E_mix"],
            e_ent=e["E_ent"],
            e_int=e["E_int"],
            e_total=e["E_total"],
            d_visc=d["D_visc"],
            d_mu=d["D_mu"],
            d_sigma=d["D_sigma"],
            min_sigma=float(state.sigma.min()),
            max_abs_phi=float(np.abs(state.phi).max()),
            sep_margin=cahn_hilliard.separation_margin(state.phi),
            sigma_linf=self._sigma_linf,
            energy_residual=e["E_total"] + self._cum_diss - self._e0,
        )
        self.records.append(rec)
        return rec


def energy_inequality_residual(records) -> np.ndarray:
    """Residual series r(t_n) from a list of diagnostics records."""
    return np.array([r.energy_residual for r in records])


# ---------------------------------------------------------------------------
# coupled stepping
# ---------------------------------------------------------------------------

def stable_dt(state: SimState, c_cfl: float = sigma_mod.CFL_DEFAULT) -> float:
    """Min of the transport step bounds of the concentration and momentum parts."""
    return min(
        sigma_mod.cfl_sigma(state.grid, state.params, state.v, state.phi, c_cfl),
        momentum.cfl_ns(state.grid, state.v, c_cfl),
    )


def advance(state: SimState, dt: float,
            opts: NumericsOptions | None = None) -> SimState:
    """One coupled step: concentration, then phase field, then velocity."""
    opts = opts or NumericsOptions()
    g, p = state.grid, state.params
    if dt <= 0:
        raise ValueError("dt must be positive")

    cfl_violations = state.cfl_violations
    if opts.check_cfl:
        bound = stable_dt(state, opts.c_cfl)
        if dt > bound:
            cfl_violations += 1
            log.warning("step %d: dt=%.3e exceeds transport bound %.3e",
                        state.step, dt, bound)

    try:
        sres = sigma_mod.sigma_step(g, p, state.sigma, state.v, state.phi, dt,
                                    opts.c_cfl)
        cres = cahn_hilliard.ch_step(g, p, state.phi, state.v, sres.sigma, dt,
                                     opts.tol, opts.maxiter)
        nres = momentum.ns_step(g, p, state.v, cres.phi, cres.mu, sres.sigma,
                                dt, opts.tol, opts.maxiter)
    except Exception as exc:
        raise type(exc)(f"step {state.step} (t={state.t:.6g}): {exc}") from exc

    return SimState(
        grid=g, params=p,
        t=state.t + dt, step=state.step + 1,
        v=nres.v, phi=cres.phi, mu=cres.mu, sigma=sres.sigma,
        pressure=nres.pressure,
        clamp_events=state.clamp_events + sres.clamp_events,
        cfl_violations=cfl_violations,
    )


def run_steps(state: SimState, dt: float, n_steps: int,
              opts: NumericsOptions | None = None,
              ledger: DiagnosticsLedger | None = None):
    """Advance n_steps, observing each new state; returns (state, ledger)."""
    ledger = ledger or DiagnosticsLedger()
    if not ledger.records:
        ledger.observe(state)
    for _ in range(n_steps):
        state = advance(state, dt, opts)
        ledger.observe(state, dt)
    return state, ledger


# ---------------------------------------------------------------------------
# continuous-dependence probe
# ---------------------------------------------------------------------------

@dataclass
class DependenceReport:
    times: np.ndarray
    ratios: np.ndarray
    initial_distance: float

    @property
    def sup_ratio(self) -> float:
        return float(self.ratios.max())


def solution_distance(a: SimState, b: SimState) -> float:
    """Stability metric: weighted velocity, phase-gradient, mean and sigma gaps."""
    g, p = a.grid, a.params
    rho_u = g.center_to_xface(p.rho_hat(a.phi))
    rho_v = g.center_to_yface(p.rho_hat(a.phi))
    dv = g.face_norm_sq(a.v.u - b.v.u, a.v.v - b.v.v, rho_u, rho_v)
    dphi = a.phi - b.phi
    gx, gy = g.gradient(dphi)
    dgrad = g.face_norm_sq(gx, gy)
    dmean = g.mean(dphi) ** 2
    c_star = float(np.abs(p.beta_prime(np.linspace(-2.5, 2.5, 4001))).max()) + 1.0
    m_lo, m_hi = p.mobility_bounds
    c_sigma = 4.0 * (1.0 + 8.0 * (m_hi * c_star) ** 2 / m_lo)
    dsig = g.integrate((a.sigma - b.sigma) ** 2)
    return float(np.sqrt(dv + dgrad + dmean + c_sigma * dsig))


def default_perturbation(grid: Grid) -> np.ndarray:
    """Mean-zero, boundary-compatible smooth bump used by the twin runs."""
    x, y = grid.cell_centers()
    return np.cos(2.0 * np.pi * x / grid.lx) * np.cos(2.0 * np.pi * y / grid.ly)


def continuous_dependence_probe(state: SimState, dt: float, n_steps: int,
                                delta0: float,
                                perturbation: np.ndarray | None = None,
                                opts: NumericsOptions | None = None) -> DependenceReport:
    """Run twin simulations from phi0 and phi0 + delta0 * perturbation.

    Reports the trace of solution_distance(t)/solution_distance(0); for
    delta0 = 0 the ratio is 1 by convention.
    """
    g, p = state.grid, state.params
    if perturbation is None:
        perturbation = default_perturbation(g)
    phi_b = state.phi + delta0 * perturbation
    twin = SimState.initial(g, p, state.v.copy(), phi_b, state.sigma.copy())

    a, b = state, twin
    d0 = solution_distance(a, b)
    times = [a.t]
    dists = [d0]
    for _ in range(n_steps):
        a = advance(a, dt, opts)
        b = advance(b, dt, opts)
        times.append(a.t)
        dists.append(solution_distance(a, b))
    dists = np.array(dists)
    if d0 == 0.0:
        ratios = np.ones_like(dists)
    else:
        ratios = dists / d0
    return DependenceReport(np.array(times), ratios, d0)
