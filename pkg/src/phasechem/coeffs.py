"""Constitutive functions of the two-phase / chemical-species model.

Everything the solvers need as a function of the phase field: the average
density and viscosity of the mixture, their bounded smooth extensions beyond
the physical range [-1, 1], the mobility, the interaction function beta and
its derivatives, the logarithmic (Flory-Huggins) free-energy density and its
quadratic regularization, plus validation of the structural assumptions the
model rests on.

All functions are pure, vectorized over numpy arrays and safe to call from
any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


# ---------------------------------------------------------------------------
# smooth blend helpers
# ---------------------------------------------------------------------------

def _blend_g(s):
    # C^2 ramp: g(0)=0, g'(0)=1, g''(0)=0, g(1)=1/2, g'(1)=g''(1)=0, monotone
    return s - s ** 3 + 0.5 * s ** 4


def _blend_g1(s):
    return 1.0 - 3.0 * s ** 2 + 2.0 * s ** 3


def _blend_g2(s):
    return -6.0 * s + 6.0 * s ** 2


class SoftClamp:
    """C^2 monotone squashing of the real line onto [-1-alpha, 1+alpha].

    Identity on [-1, 1]; quintic Hermite ramp on [1, 1+2*alpha] (mirrored on
    the left) to a constant plateau.  Composing a linear coefficient profile
    with this map yields the bounded C^2 extensions the flow solver needs,
    since a linear density evaluated far outside [-1, 1] may lose positivity.
    """

    def __init__(self, alpha: float):
        if not 0.0 < alpha <= 0.5:
            raise ValueError("alpha must lie in (0, 0.5]")
        self.alpha = float(alpha)

    def _split(self, r):
        r = np.asarray(r, dtype=float)
        a = self.alpha
        s = np.clip((np.abs(r) - 1.0) / (2.0 * a), 0.0, 1.0)
        inside = np.abs(r) <= 1.0
        return r, s, inside

    def __call__(self, r):
        r, s, inside = self._split(r)
        ramp = 1.0 + 2.0 * self.alpha * _blend_g(s)
        return np.where(inside, r, np.sign(r) * ramp)

    def deriv(self, r):
        r, s, inside = self._split(r)
        return np.where(inside, 1.0, _blend_g1(s))

    def second(self, r):
        r, s, inside = self._split(r)
        out = np.sign(r) * _blend_g2(s) / (2.0 * self.alpha)
        return np.where(inside, 0.0, out)


# C^3 pieces for the interaction-function blend on [1, 2] / [-2, -1].

def _ramp_q(s):
    # q(0)=0, q'(0)=1, q''(0)=q'''(0)=0; all of q..q''' vanish at s=1
    return s - 20.0 * s ** 4 + 45.0 * s ** 5 - 36.0 * s ** 6 + 10.0 * s ** 7


def _ramp_q1(s):
    return 1.0 - 80.0 * s ** 3 + 225.0 * s ** 4 - 216.0 * s ** 5 + 70.0 * s ** 6


def _ramp_q2(s):
    return -240.0 * s ** 2 + 900.0 * s ** 3 - 1080.0 * s ** 4 + 420.0 * s ** 5


def _step_w(s):
    # C^3 plateau: w(0)=1 with three vanishing derivatives, w(1)=0 likewise
    return 1.0 - (35.0 * s ** 4 - 84.0 * s ** 5 + 70.0 * s ** 6 - 20.0 * s ** 7)


def _step_w1(s):
    return -(140.0 * s ** 3 - 420.0 * s ** 4 + 420.0 * s ** 5 - 140.0 * s ** 6)


def _step_w2(s):
    return -(420.0 * s ** 2 - 1680.0 * s ** 3 + 2100.0 * s ** 4 - 840.0 * s ** 5)


# ---------------------------------------------------------------------------
# free-energy density
# ---------------------------------------------------------------------------

class PotentialEval(NamedTuple):
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray


class FloryHuggins:
    """Logarithmic mixing free energy on (-1, 1).

    psi(r) = (theta/2) [(1+r) ln(1+r) + (1-r) ln(1-r)] - (theta0/2) r^2,
    normalized so the convex part and its slope vanish at r = 0.  The convex
    part has second derivative theta / (1 - r^2) >= theta.
    """

    def __init__(self, theta: float, theta0: float):
        self.theta = float(theta)
        self.theta0 = float(theta0)

    def convex_value(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.theta * ((1.0 + r) * np.log1p(r) + (1.0 - r) * np.log1p(-r))

    def convex_prime(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.theta * (np.log1p(r) - np.log1p(-r))

    def convex_second(self, r):
        r = np.asarray(r, dtype=float)
        return self.theta / (1.0 - r * r)

    def eval(self, r) -> PotentialEval:
        r = np.asarray(r, dtype=float)
        if np.any(np.abs(r) >= 1.0):
            raise ValueError("logarithmic potential is only defined for |r| < 1")
        return PotentialEval(
            self.convex_value(r) - 0.5 * self.theta0 * r * r,
            self.convex_prime(r) - self.theta0 * r,
            self.convex_second(r) - self.theta0,
        )


class RegularizedPotential:
    """Quadratic (second-order Taylor) continuation of the logarithmic potential.

    Coincides with the singular potential on [-1+eps, 1-eps]; outside, the
    convex part continues as the matching parabola, so the whole function is
    C^2 on R and its convex part keeps second derivative >= theta.
    """

    def __init__(self, theta: float, theta0: float, eps: float):
        if not 0.0 < eps < 1.0:
            raise ValueError("regularization parameter must lie in (0, 1)")
        self.base = FloryHuggins(theta, theta0)
        self.eps = float(eps)
        r0 = 1.0 - self.eps
        self._r0 = r0
        self._v0 = float(self.base.convex_value(r0))
        self._d0 = float(self.base.convex_prime(r0))
        self._k0 = float(self.base.convex_second(r0))

    @property
    def theta(self):
        return self.base.theta

    @property
    def theta0(self):
        return self.base.theta0

    @property
    def convex_second_max(self) -> float:
        return self._k0

    def convex_eval(self, r) -> PotentialEval:
        r = np.asarray(r, dtype=float)
        r0 = self._r0
        inner = np.clip(r, -r0, r0)
        value = self.base.convex_value(inner)
        first = self.base.convex_prime(inner)
        second = self.base.convex_second(inner)
        d = r - np.clip(r, -r0, r0)          # signed distance past the window
        # Taylor step off the window edge; d == 0 inside, so these are no-ops there
        value = value + first * d + 0.5 * self._k0 * d * d
        first = first + self._k0 * d
        second = np.where(d == 0.0, second, self._k0)
        return PotentialEval(value, first, second)

    def eval(self, r) -> PotentialEval:
        r = np.asarray(r, dtype=float)
        v, p, s = self.convex_eval(r)
        return PotentialEval(
            v - 0.5 * self.theta0 * r * r,
            p - self.theta0 * r,
            s - self.theta0,
        )

    def value(self, r):
        return self.eval(r).value

    def prime(self, r):
        return self.eval(r).first


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------

@dataclass
class ModelParams:
    """Physical coefficients of the coupled model.

    rho1, nu1 belong to the phase at phi = -1; rho2, nu2 to phi = +1.  The
    mobility interpolates linearly between m_star (phi=-1) and m_star_upper
    (phi=+1) and, like density and viscosity, is smoothly clamped outside the
    physical range.  chi sets the strength of the default interaction profile
    beta(r) = chi * (1 - r) on [-1, 1].  eps_int scales the interface energy;
    eps_reg is the potential-regularization width, recorded in every output
    header because it is a fixed modelling choice, not a solver knob.
    """

    rho1: float = 1.0
    rho2: float = 3.0
    nu1: float = 0.1
    nu2: float = 0.3
    m_star: float = 0.5
    m_star_upper: float = 1.0
    theta: float = 4.0
    theta0: float = 8.0
    chi: float = 0.5
    eps_int: float = 1.0
    eps_reg: float = 5e-3

    # --- density ------------------------------------------------------------

    @property
    def rho_min(self) -> float:
        return min(self.rho1, self.rho2)

    @property
    def rho_max(self) -> float:
        return max(self.rho1, self.rho2)

    @property
    def rho_slope(self) -> float:
        return 0.5 * (self.rho2 - self.rho1)

    def rho(self, phi):
        phi = np.asarray(phi, dtype=float)
        return 0.5 * self.rho1 * (1.0 - phi) + 0.5 * self.rho2 * (1.0 + phi)

    def _clamp_for(self, lo: float, slope: float) -> SoftClamp:
        # plateau overshoot alpha*|slope| stays below 0.45*lo, keeping the
        # extension within [lo/2, 2*hi]
        if slope == 0.0:
            return SoftClamp(0.5)
        return SoftClamp(min(0.5, 0.45 * lo / abs(slope)))

    @property
    def _rho_clamp(self) -> SoftClamp:
        return self._clamp_for(self.rho_min, self.rho_slope)

    def rho_hat(self, phi):
        """Bounded C^2 extension of rho; equals rho exactly on [-1, 1]."""
        return self.rho(self._rho_clamp(phi))

    def rho_hat_prime(self, phi):
        return self.rho_slope * self._rho_clamp.deriv(phi)

    def rho_hat_second(self, phi):
        return self.rho_slope * self._rho_clamp.second(phi)

    # --- viscosity and mobility ----------------------------------------------

    def nu(self, phi):
        lin = lambda r: 0.5 * self.nu1 * (1.0 - r) + 0.5 * self.nu2 * (1.0 + r)
        clamp = self._clamp_for(min(self.nu1, self.nu2), 0.5 * (self.nu2 - self.nu1))
        return lin(clamp(phi))

    @property
    def nu_bounds(self) -> tuple[float, float]:
        clamp = self._clamp_for(min(self.nu1, self.nu2), 0.5 * (self.nu2 - self.nu1))
        ends = self.nu(np.array([-1.0 - 2 * clamp.alpha, 1.0 + 2 * clamp.alpha]))
        return float(ends.min()), float(ends.max())

    def mobility(self, phi):
        lin = lambda r: 0.5 * self.m_star * (1.0 - r) + 0.5 * self.m_star_upper * (1.0 + r)
        clamp = self._clamp_for(min(self.m_star, self.m_star_upper),
                                0.5 * (self.m_star_upper - self.m_star))
        return lin(clamp(phi))

    @property
    def mobility_bounds(self) -> tuple[float, float]:
        clamp = self._clamp_for(min(self.m_star, self.m_star_upper),
                                0.5 * (self.m_star_upper - self.m_star))
        ends = self.mobility(np.array([-1.0 - 2 * clamp.alpha, 1.0 + 2 * clamp.alpha]))
        return float(ends.min()), float(ends.max())

    # --- interaction function -------------------------------------------------

    def beta(self, r):
        """chi*(1-r) on [-1,1], C^3 ramps to zero on [1,2] and [-2,-1], 0 beyond."""
        r = np.asarray(r, dtype=float)
        chi = self.chi
        if r.size == 0 or np.abs(r).max() <= 1.0:   # common case: physical range
            return chi * (1.0 - r)
        out = chi * (1.0 - r)
        sr = np.clip(r - 1.0, 0.0, 1.0)
        sl = np.clip(-1.0 - r, 0.0, 1.0)
        right = -chi * _ramp_q(sr)
        left = 2.0 * chi * _step_w(sl) + chi * _ramp_q(sl)
        out = np.where(r > 1.0, right, out)
        out = np.where(r < -1.0, left, out)
        return np.where(np.abs(r) >= 2.0, 0.0, out)

    def beta_prime(self, r):
        r = np.asarray(r, dtype=float)
        chi = self.chi
        if r.size == 0 or np.abs(r).max() <= 1.0:
            return np.full_like(r, -chi)
        out = np.full_like(r, -chi)
        sr = np.clip(r - 1.0, 0.0, 1.0)
        sl = np.clip(-1.0 - r, 0.0, 1.0)
        right = -chi * _ramp_q1(sr)
        left = -(2.0 * chi * _step_w1(sl) + chi * _ramp_q1(sl))
        out = np.where(r > 1.0, right, out)
        out = np.where(r < -1.0, left, out)
        return np.where(np.abs(r) >= 2.0, 0.0, out)

    def beta_second(self, r):
        r = np.asarray(r, dtype=float)
        chi = self.chi
        if r.size == 0 or np.abs(r).max() <= 1.0:
            return np.zeros_like(r)
        out = np.zeros_like(r)
        sr = np.clip(r - 1.0, 0.0, 1.0)
        sl = np.clip(-1.0 - r, 0.0, 1.0)
        right = -chi * _ramp_q2(sr)
        left = 2.0 * chi * _step_w2(sl) + chi * _ramp_q2(sl)
        out = np.where(r > 1.0, right, out)
        out = np.where(r < -1.0, left, out)
        return np.where(np.abs(r) >= 2.0, 0.0, out)

    def beta_sup(self) -> float:
        r = np.linspace(-2.5, 2.5, 20001)
        return float(np.abs(self.beta(r)).max())

    # --- potential -------------------------------------------------------------

    def potential(self) -> RegularizedPotential:
        return RegularizedPotential(self.theta, self.theta0, self.eps_reg)

    def singular_potential(self) -> FloryHuggins:
        return FloryHuggins(self.theta, self.theta0)

    def stabilization(self) -> float:
        """Stabilization constant of the linearized phase-field step.

        Half the largest convex curvature of the regularized potential plus
        |theta0| dominates half of |psi_eps''| everywhere, which is what the
        unconditional energy decay of the scheme requires.
        """
        pot = self.potential()
        return (0.5 * pot.convex_second_max + abs(self.theta0)) / self.eps_int

    def admissible_eps_max(self) -> float:
        """Largest regularization width compatible with the construction.

        Requires slope >= 1 and curvature >= 4|theta0| + 1 of the convex part
        at the matching points.
        """
        q = self.theta / (4.0 * abs(self.theta0) + 1.0)
        eps_curv = 1.0 if q >= 1.0 else 1.0 - math.sqrt(1.0 - q)
        eps_slope = 2.0 / (1.0 + math.exp(2.0 / self.theta)) if self.theta > 0 else 0.0
        return min(eps_curv, eps_slope)


def rho(params: ModelParams, phi):
    return params.rho(phi)


# ---------------------------------------------------------------------------
# generalized Young inequality utility
# ---------------------------------------------------------------------------

def young_pair(a, b):
    """Conjugate pair (e^a - a - 1, (b+1) ln(b+1) - b) with a*b <= f(a) + g(b).

    Provided as a test utility; equality holds along a = ln(b + 1).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("young_pair requires nonnegative arguments")
    f = np.expm1(a) - a
    g = (b + 1.0) * np.log1p(b) - b
    return f, g


# ---------------------------------------------------------------------------
# hypothesis validation
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.message}"


@dataclass
class HypothesisReport:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set:
        return {v.code for v in self.violations}

    def summary(self) -> str:
        lines = [str(v) for v in self.violations] + [f"note: {n}" for n in self.notes]
        return "\n".join(lines) if lines else "all hypotheses satisfied"


def validate_hypotheses(params: ModelParams, phi_mean: float | None = None) -> HypothesisReport:
    """Check the structural assumptions behind the model against the parameters.

    Returns a structured report instead of raising, so configuration errors
    can be presented all at once.
    """
    rep = HypothesisReport()

    def bad(code, msg):
        rep.violations.append(Violation(code, msg))

    if not (params.theta > 0 and np.isfinite(params.theta)):
        bad("potential_convexity", f"theta must be > 0 (curvature lower bound), got {params.theta}")
    if not np.isfinite(params.theta0):
        bad("potential_convexity", f"theta0 must be finite, got {params.theta0}")

    for name in ("nu1", "nu2"):
        val = getattr(params, name)
        if not (val > 0 and np.isfinite(val)):
            bad("viscosity_bounds", f"{name} must be > 0, got {val}")

    if not (0 < params.m_star <= params.m_star_upper and np.isfinite(params.m_star_upper)):
        bad("mobility_bounds",
            f"mobility bounds need 0 < m_star <= m_star_upper, got "
            f"[{params.m_star}, {params.m_star_upper}]")

    for name in ("rho1", "rho2"):
        val = getattr(params, name)
        if not (val > 0 and np.isfinite(val)):
            bad("density_bounds", f"{name} must be > 0, got {val}")

    if not np.isfinite(params.chi):
        bad("interaction_support", f"chi must be finite, got {params.chi}")
    else:
        r = np.linspace(-3.0, 3.0, 13)
        if np.abs(params.beta(np.array([-2.0, -2.5, 2.0, 2.5, 3.0]))).max() != 0.0:
            bad("interaction_support", "beta does not vanish outside [-2, 2]")
        if not np.isfinite(params.beta(r)).all():
            bad("interaction_support", "beta is not finite")

    if not (params.eps_int > 0 and np.isfinite(params.eps_int)):
        bad("interface_scale", f"eps_int must be > 0, got {params.eps_int}")

    if not (0 < params.eps_reg < 1):
        bad("regularization", f"eps_reg must lie in (0, 1), got {params.eps_reg}")
    elif params.theta > 0:
        eps_max = params.admissible_eps_max()
        if params.eps_reg > eps_max:
            bad("regularization",
                f"eps_reg={params.eps_reg:g} exceeds admissible maximum {eps_max:g} "
                f"for theta={params.theta:g}, theta0={params.theta0:g}")
        if phi_mean is not None:
            if not abs(phi_mean) < 1:
                bad("regularization", f"|mean(phi0)| must be < 1, got {phi_mean}")
            elif params.eps_reg > 0.5 * (1.0 - abs(phi_mean)):
                bad("regularization",
                    f"eps_reg={params.eps_reg:g} exceeds (1-|mean(phi0)|)/2 = "
                    f"{0.5 * (1 - abs(phi_mean)):g}")

    rep.notes.append("potential growth condition: satisfied analytically by the "
                     "built-in logarithmic potential (exponent 1); unverifiable for "
                     "user-supplied potentials")
    return rep
