"""Command line front end.

    hamcone constants    --config PATH   gamma constants, c estimates, (H5) scan
    hamcone check        --config PATH   (H1)-(H7), lambda bound, beta, theorem hypotheses
    hamcone lambda-range --config PATH   sup of admissible lambda per equation
    hamcone solve        --config PATH   one solve, solution CSV
    hamcone sweep        --config PATH   solves over a (lambda1, lambda2) grid, summary CSV

Exit codes: 0 success, 1 a hypothesis failed, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from contextlib import contextmanager

from .config import ConfigError, ProblemConfig, load_config
from .constants import compute_constants
from .expr import DomainError
from .hypotheses import check_system, lambda_supremum, plan_thm23
from .kernels import BuiltinK2, k2_constants
from .quadrature import DiscreteOperator, GridPair
from .solver import SolverError, monotone_iterate, newton_solve, picard

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("hamcone")


def _g17(x: float) -> str:
    return format(float(x), ".17g")


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write_rows(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with _output(path) as fh:
        fh.write(buf.getvalue())


def solution_csv(u: GridPair) -> list[list[str]]:
    return [[_g17(t), _g17(a), _g17(b)] for t, a, b in zip(u.grid.nodes, u.u1, u.u2)]


# --- commands ----------------------------------------------------------------------------

def cmd_constants(cfg: ProblemConfig, args) -> int:
    system = cfg.build_system()
    grid = cfg.grid
    report = compute_constants(system, grid)
    rows = []
    ok = True
    for i, (eq, ec) in enumerate(zip(system.equations, report.equations), start=1):
        sub = system.cone.intervals[i - 1]
        ci = system.cone.cs[i - 1]
        print(f"equation {i}: kernel {eq.kernel}, weight {eq.g}")
        print(f"  gamma*_{i}  = {ec.gamma_star:.12g}  (t = {ec.argmax_t:.6g})")
        print(f"  gamma_{i},* = {ec.gamma_lower:.12g}  (t = {ec.argmin_t:.6g}) on [{sub[0]:.6g}, {sub[1]:.6g}]")
        print(f"  c_{i} = {ci:.12g}, grid estimate {ec.c_estimate:.12g}")
        h5_ok = ec.h5 is not None and ec.h5.passed
        ok &= h5_ok
        print(f"  (H5) scan: worst violation {ec.H5_worst_violation:.3e} -> {'pass' if h5_ok else 'FAIL'}")
        if isinstance(eq.kernel, BuiltinK2):
            kc = k2_constants(eq.kernel.xi, eq.kernel.eta)
            print(f"  closed form: b2 = {kc.b2:.12g}, c2 = {kc.c2:.12g}, gamma2* = {kc.gamma2_star:.12g}, "
                  f"gamma2,* = {kc.gamma2_lower:.12g}  [{kc.case}]")
        rows.append([str(i), _g17(ec.gamma_star), _g17(ec.argmax_t), _g17(ec.gamma_lower), _g17(ec.argmin_t),
                     _g17(ci), _g17(ec.c_estimate), _g17(ec.H5_worst_violation)])
    if args.out:
        _write_rows(args.out, ["equation", "gamma_star", "argmax_t", "gamma_lower", "argmin_t", "c",
                               "c_estimate", "h5_worst_violation"], rows)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_check(cfg: ProblemConfig, args) -> int:
    system = cfg.build_system()
    grid = cfg.grid
    gammas = compute_constants(system, grid)
    for i, ec in enumerate(gammas.equations, start=1):
        print(f"gamma*_{i} = {ec.gamma_star:.6g}, gamma_{i},* = {ec.gamma_lower:.6g}, "
              f"c_{i} = {system.cone.cs[i - 1]:.6g}")
    print(f"c = min(c1, c2) = {system.cone.c:.6g}")
    report, plan, _ = check_system(system, grid, cfg.hypotheses, gammas, cfg.probes)
    if plan is not None:
        print(f"beta = ({plan.beta[0]:.6g}, {plan.beta[1]:.6g}), R = {plan.R:.6g}, "
              f"rho = {plan.rho:.6g}, M = {plan.M:.6g}")
    print(report.format())
    verdict = "all hypotheses hold (sampled)" if report.passed else f"{len(report.failures)} check(s) failed"
    print(verdict)
    if args.out:
        _write_rows(args.out, ["check", "status", "margin"],
                    [[c.name, c.status.value, _g17(c.margin)] for c in report])
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_lambda_range(cfg: ProblemConfig, args) -> int:
    system = cfg.build_system()
    gammas = compute_constants(system, cfg.grid)
    h = cfg.hypotheses
    sups = lambda_supremum(system, system.cone, gammas, h.B1, h.B2, h.density)
    rows = []
    for i, s in enumerate(sups, start=1):
        if s.unbounded:
            print(f"lambda_{i}: unbounded (every lambda_{i} > 0 admissible); lattice maxima {list(s.history)}")
        else:
            trend = ", approached at the box boundary" if s.boundary_trend else ""
            print(f"lambda_{i} < {s.value:.10g} (at r = ({s.at[0]:.6g}, {s.at[1]:.6g}){trend})")
        rows.append([str(i), _g17(s.value), str(s.unbounded).lower(), str(s.boundary_trend).lower(),
                     _g17(s.at[0]), _g17(s.at[1])])
    if args.out:
        _write_rows(args.out, ["equation", "sup", "unbounded", "boundary_trend", "r1", "r2"], rows)
    return EXIT_OK


def _newton_with_fallback(system, grid, s, T, plan):
    """Newton from the configured guess, then from that guess divided by lambda.

    Solutions of the example scale roughly like ``1/lambda_i``, so the second
    start rescues cells where a fixed guess sits far outside the basin.
    """
    starts = [tuple(s.initial)]
    scaled = tuple(g / lam for g, lam in zip(s.initial, system.lams))
    if scaled != starts[0]:
        starts.append(scaled)
    report, error = None, None
    for guess in starts:
        try:
            report = newton_solve(system, grid, GridPair.constant(grid, *guess), s.newton_tol,
                                  s.newton_maxiter, operator=T, localization_params=plan)
        except SolverError as exc:
            error = exc
            log.info("newton from %s failed: %s", guess, exc)
            continue
        if report.converged:
            return report
        log.info("newton from %s did not converge (residual %.3e)", guess, report.residual_sup)
    if report is None:
        raise error
    return report


def _solve_one(cfg: ProblemConfig, system, method: str):
    """``(report, plan, lower_report)``.

    For the monotone method ``report`` is the iteration from the upper
    solution and ``lower_report`` the one from the lower solution.
    """
    grid = cfg.grid
    T = DiscreteOperator(system, grid)
    h = cfg.hypotheses
    gammas = compute_constants(system, grid)
    plan = plan_thm23(system, system.cone, gammas, h.B1, h.B2, h.density, M=h.M, rho=h.rho)
    s = cfg.solver
    if method == "newton":
        return _newton_with_fallback(system, grid, s, T, plan), plan, None
    if method == "picard":
        u0 = GridPair.constant(grid, *s.initial)
        return picard(system, grid, u0, s.tol, s.maxiter, operator=T, localization_params=plan), plan, None
    upper = s.upper
    if upper is None:
        if plan is None:
            raise SolverError("monotone method: no upper solution given and none found on the lattice")
        upper = plan.beta
    alpha0 = GridPair.constant(grid, *s.lower)
    beta0 = GridPair.constant(grid, *upper)
    up, down = monotone_iterate(system, grid, alpha0, beta0, s.tol, s.maxiter, operator=T,
                                localization_params=plan)
    return down, plan, up


def cmd_solve(cfg: ProblemConfig, args) -> int:
    system = cfg.build_system()
    method = cfg.solver.method
    report, plan, lower_report = _solve_one(cfg, system, method)
    if lower_report is not None:
        print("from lower solution: " + lower_report.summary())
        print("from upper solution: " + report.summary())
    else:
        print(report.summary())
    if plan is not None:
        print(f"localization sets: beta = ({plan.beta[0]:.6g}, {plan.beta[1]:.6g}), R = {plan.R:.6g}, rho = {plan.rho:.6g}")
    if args.out:
        _write_rows(args.out, ["t", "u1", "u2"], solution_csv(report.solution))
    return EXIT_OK if report.converged else EXIT_NUMERIC


def cmd_sweep(cfg: ProblemConfig, args) -> int:
    rows = []
    failures = 0
    for l1 in sorted(cfg.sweep.lambda1):
        for l2 in sorted(cfg.sweep.lambda2):
            system = cfg.build_system(lams=(l1, l2))
            try:
                report, _, _ = _solve_one(cfg, system, cfg.solver.method)
                region = report.localization.label() if report.localization is not None else "n/a"
                row = [_g17(l1), _g17(l2), str(report.converged).lower(), _g17(report.residual_sup),
                       _g17(report.solution.norm()), region]
                failures += not report.converged
            except (SolverError, DomainError) as exc:
                log.warning("sweep cell (%g, %g) failed: %s", l1, l2, exc)
                row = [_g17(l1), _g17(l2), "false", "nan", "nan", "failed"]
                failures += 1
            rows.append(row)
    _write_rows(args.out, ["lambda1", "lambda2", "converged", "residual", "norm", "region"], rows)
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


COMMANDS = {
    "constants": cmd_constants,
    "check": cmd_check,
    "lambda-range": cmd_lambda_range,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamcone", description="Positive solutions of Hammerstein systems on cones.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="problem file")
    ap.add_argument("--grid", type=int, default=None, help="grid node count (odd, >= 3)")
    ap.add_argument("--method", choices=("monotone", "picard", "newton"), default=None)
    ap.add_argument("--out", default=None, help="CSV output path ('-' for stdout)")
    ap.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(n=args.grid, method=args.method)
        if args.dump_config:
            sys.stdout.write(cfg.dump())
            return EXIT_OK
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())
