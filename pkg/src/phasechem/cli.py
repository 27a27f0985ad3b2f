"""Command-line entry points.

Subcommands
-----------
run           execute a configuration to t_end, writing the diagnostics CSV,
              optional VTK field snapshots and a reproducibility manifest
check         validate a configuration (if given) and run the fast built-in
              invariant fixtures; exits nonzero on any violation
convergence   run refinement ladders for the analytic oracles and print the
              observed orders of accuracy

Exit codes: 0 success, 2 configuration error, 3 invariant violation,
4 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__, elliptic, output
from .config import RunConfig, load_config, parse_config, serialize_config
from .coeffs import ModelParams, young_pair
from .errors import ConfigError, InvariantViolation, SolverFailure
from .grid import Grid, MacVelocity
from .initial import generate_ic
from .simulation import (DiagnosticsLedger, NumericsOptions, SimState,
                         advance, run_steps)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_SOLVER = 4

MASS_PHI_BUDGET = 1e-10      # * domain area
MASS_SIGMA_BUDGET = 1e-8     # * initial sigma mass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasechem",
        description="structure-preserving two-phase flow / chemotaxis solver")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configuration to t_end")
    p_run.add_argument("--config", required=True, help="path to a TOML config")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--seed", type=int, default=None, help="seed override")
    p_run.add_argument("--max-steps", type=int, default=None,
                       help="stop after this many steps")

    p_check = sub.add_parser("check", help="run the fast invariant suite")
    p_check.add_argument("--config", default=None,
                         help="also validate this configuration")

    p_conv = sub.add_parser("convergence",
                            help="refinement ladder for the analytic oracles")
    p_conv.add_argument("--levels", type=int, default=3,
                        help="number of grid doublings (default 3)")
    return parser


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _check_mass_budgets(rec0, rec, area: float):
    if abs(rec.mass_phi - rec0.mass_phi) > MASS_PHI_BUDGET * area:
        raise InvariantViolation(
            f"phase mass drifted by {abs(rec.mass_phi - rec0.mass_phi):.3e} "
            f"at step {rec.step} (budget {MASS_PHI_BUDGET * area:.3e})")
    budget = MASS_SIGMA_BUDGET * max(abs(rec0.mass_sigma), 1e-300)
    if abs(rec.mass_sigma - rec0.mass_sigma) > budget:
        raise InvariantViolation(
            f"concentration mass drifted by "
            f"{abs(rec.mass_sigma - rec0.mass_sigma):.3e} at step {rec.step} "
            f"(budget {budget:.3e})")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, ic=dataclasses.replace(cfg.ic, seed=args.seed))
    if args.out is not None:
        cfg = dataclasses.replace(
            cfg, output=dataclasses.replace(cfg.output, directory=args.out))

    outdir = Path(cfg.output.directory)
    outdir.mkdir(parents=True, exist_ok=True)

    state = generate_ic(cfg)
    ledger = DiagnosticsLedger()
    rec0 = ledger.observe(state)
    rows = [rec0]
    written = []

    n_steps = int(round(cfg.time.t_end / cfg.time.dt))
    if args.max_steps is not None:
        n_steps = min(n_steps, args.max_steps)
    elif cfg.time.max_steps:
        n_steps = min(n_steps, cfg.time.max_steps)

    snap_every = cfg.output.fields_every if cfg.output.write_fields else 0
    for k in range(1, n_steps + 1):
        state = advance(state, cfg.time.dt)
        rec = ledger.observe(state, cfg.time.dt)
        _check_mass_budgets(rec0, rec, state.grid.area)
        if k % cfg.time.output_every == 0 or k == n_steps:
            rows.append(rec)
        if cfg.output.write_fields and snap_every and k % snap_every == 0:
            written.append(output.write_fields(
                state, outdir / f"fields_{state.step:06d}.vtk"))

    csv_path = output.write_timeseries(rows, outdir / "timeseries.csv")
    written.append(csv_path)
    if cfg.output.write_fields:
        written.append(output.write_fields(
            state, outdir / f"fields_{state.step:06d}.vtk"))
    written.append(output.write_manifest(outdir, cfg, written, extras={
        "steps": state.step,
        "t_final": state.t,
        "clamp_events": state.clamp_events,
        "cfl_violations": state.cfl_violations,
    }))

    last = ledger.records[-1]
    print(f"completed {state.step} steps to t={state.t:.6g}")
    print(f"  E: {ledger.records[0].e_total:.6g} -> {last.e_total:.6g}  "
          f"residual {last.energy_residual:.3e}")
    print(f"  mass drift: phi {abs(last.mass_phi - rec0.mass_phi):.2e}, "
          f"sigma {abs(last.mass_sigma - rec0.mass_sigma):.2e}")
    print(f"  min sigma {last.min_sigma:.3e}, clamp events {state.clamp_events}, "
          f"separation margin {last.sep_margin:.4f}")
    print(f"  wrote {len(written)} files to {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _fast_fixtures() -> list[tuple[str, bool, str]]:
    """Small structural checks, each a (name, passed, detail) triple."""
    results = []
    rng = np.random.default_rng(np.random.Philox(7))

    g = Grid(16, 12, 1.0, 1.5)
    f = rng.standard_normal((16, 12))
    lap = g.laplacian(f)
    same = np.array_equal(lap, g.divergence(*g.gradient(f)))
    results.append(("laplacian == div(grad)", same, "bitwise"))

    total = abs(g.integrate(lap))
    scale = 1e-12 * float(np.abs(f).max()) * g.area / min(g.hx, g.hy) ** 2
    results.append(("zero-flux divergence sums to zero", total <= scale,
                    f"|sum|={total:.2e}"))

    a, b = rng.random(2000) * 10, rng.random(2000) * 10
    fa, gb = young_pair(a, b)
    worst = float((a * b - fa - gb).max())
    results.append(("product inequality f(a)+g(b) >= ab", worst <= 1e-12,
                    f"max violation {worst:.2e}"))

    p = ModelParams()
    r = np.linspace(-5, 5, 20001)
    pot = p.potential()
    results.append(("regularized curvature >= theta",
                    bool((pot.convex_eval(r).second >= p.theta - 1e-12).all()),
                    ""))
    rh = p.rho_hat(r)
    ok = bool((rh >= 0.5 * p.rho_min - 1e-12).all()
              and (rh <= 2.0 * p.rho_max + 1e-12).all())
    results.append(("density extension bounded", ok,
                    f"range [{rh.min():.3f}, {rh.max():.3f}]"))

    # ten coupled steps from a homogeneous state must stay put
    phi = np.full((16, 12), 0.1)
    sig = np.full((16, 12), 0.4)
    st = SimState.initial(g, p, MacVelocity.zeros(g), phi, sig)
    st2, led = run_steps(st, 1e-3, 10)
    drift = abs(led.records[-1].e_total - led.records[0].e_total)
    results.append(("homogeneous state is a fixed point",
                    drift <= 1e-12 and st2.v.max_abs() == 0.0,
                    f"|dE|={drift:.2e}"))
    return results


def cmd_check(args) -> int:
    if args.config is not None:
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            for err in exc.errors:
                print(f"config error: {err}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"config ok: {args.config}")
        print(serialize_config(cfg))

    failures = 0
    for name, passed, detail in _fast_fixtures():
        tag = "pass" if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"[{tag}] {name}{suffix}")
        failures += 0 if passed else 1
    if failures:
        print(f"{failures} invariant check(s) failed", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

def _observed_orders(sizes, errors):
    return [float(np.log2(errors[i] / errors[i + 1]))
            for i in range(len(errors) - 1)]


def cmd_convergence(args) -> int:
    levels = max(2, args.levels)
    sizes = [16 * 2 ** k for k in range(levels)]

    # Neumann eigenfunction solve
    errs = []
    for n in sizes:
        g = Grid(n, 8, 1.0, 1.0)
        x, _ = g.cell_centers()
        exact = np.cos(np.pi * x / g.lx) * np.ones((1, 8))
        f = (np.pi / g.lx) ** 2 * exact
        u, rep = elliptic.neumann_solve(g, f - f.mean())
        errs.append(float(np.abs(u - (exact - exact.mean())).max()))
    orders_e = _observed_orders(sizes, errs)
    print("neumann eigenfunction solve:")
    for n, e in zip(sizes, errs):
        print(f"  n={n:4d}  max error {e:.3e}")
    print(f"  observed orders: {['%.2f' % o for o in orders_e]}")

    # pure heat step (spatial accuracy of the discrete mode eigenvalue)
    errs_h = []
    dt = 1e-3
    for n in sizes:
        g = Grid(n, 8, 1.0, 1.0)
        x, _ = g.cell_centers()
        mode = np.cos(np.pi * x / g.lx) * np.ones((1, 8))
        out = elliptic.helmholtz_solve(g, dt, mode)
        exact_factor = 1.0 / (1.0 + dt * (np.pi / g.lx) ** 2)
        errs_h.append(float(np.abs(out / mode - exact_factor).max()))
    orders_h = _observed_orders(sizes, errs_h)
    print("backward-Euler heat factor vs continuous eigenvalue:")
    for n, e in zip(sizes, errs_h):
        print(f"  n={n:4d}  factor error {e:.3e}")
    print(f"  observed orders: {['%.2f' % o for o in orders_h]}")

    ok = min(orders_e) >= 1.9 and min(orders_h) >= 1.9
    print(f"spatial order >= 1.9: {'yes' if ok else 'NO'}")
    return EXIT_OK if ok else EXIT_INVARIANT


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "convergence":
            return cmd_convergence(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
