"""Fixed points of the discretized operator.

``monotone_iterate`` runs the two ordered iterations started from a lower
and an upper solution; ``picard`` iterates without any order structure;
``newton_solve`` is a damped Newton method on ``u - T u`` and is the one that
reaches nontrivial solutions when the only fixed point below a convenient
upper solution is zero.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import defaults
from .cone import ConeVerdict, Localization, in_cone, localize
from .hypotheses import check_H6
from .quadrature import DiscreteOperator, Grid, GridPair

__all__ = [
    "SolverError",
    "NotBracketed",
    "NonMonotoneStep",
    "Diverged",
    "SingularJacobian",
    "Stalled",
    "SolveReport",
    "residual",
    "monotone_iterate",
    "picard",
    "newton_solve",
]

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class NotBracketed(SolverError):
    pass


class NonMonotoneStep(SolverError):
    pass


class Diverged(SolverError):
    pass


class SingularJacobian(SolverError):
    pass


class Stalled(SolverError):
    pass


@dataclass
class SolveReport:
    solution: GridPair
    iterations: int
    residual_sup: float
    converged: bool
    method: str
    tol: float
    cone_verdict: ConeVerdict | None = None
    localization: Localization | None = None
    monotone_trace: list[float] | None = None
    max_order_violation: float = 0.0
    projected: bool = False
    residual_history: list[float] = field(default_factory=list)

    def summary(self) -> str:
        parts = [
            f"method={self.method}",
            f"converged={self.converged}",
            f"iterations={self.iterations}",
            f"residual={self.residual_sup:.3e}",
            f"norm={self.solution.norm():.10g}",
        ]
        if self.cone_verdict is not None:
            parts.append(f"in_cone={self.cone_verdict.ok} (margin {self.cone_verdict.margin:.3e})")
        if self.localization is not None:
            parts.append(f"region={self.localization.label()}")
        if self.projected:
            parts.append("projected=True")
        return ", ".join(parts)


def _operator(system, grid: Grid, operator: DiscreteOperator | None) -> DiscreteOperator:
    return operator if operator is not None else DiscreteOperator(system, grid)


def residual(system, grid: Grid, u: GridPair, operator: DiscreteOperator | None = None) -> float:
    """Sup-norm fixed point defect ``||u - T u||``."""
    T = _operator(system, grid, operator)
    return (u - T(u)).norm()


def _finish(report: SolveReport, system, localization_params) -> SolveReport:
    report.cone_verdict = in_cone(report.solution, system.cone)
    if localization_params is not None and report.cone_verdict.ok:
        p = localization_params
        report.localization = localize(report.solution, system.cone, p.R, p.rho, p.beta)
    return report


def _ordered_iteration(T: DiscreteOperator, start: GridPair, cone, tol: float, maxiter: int,
                       upward: bool, order_tol: float, name: str) -> SolveReport:
    cur = start
    trace = [cur.norm()]
    worst = 0.0
    for it in range(1, maxiter + 1):
        nxt = T(cur)
        step = nxt - cur if upward else cur - nxt
        verdict = in_cone(step, cone, order_tol)
        worst = max(worst, -verdict.margin)
        if not verdict.ok:
            raise NonMonotoneStep(
                f"{name}: iterate {it} breaks the order by {-verdict.margin:.3e} "
                f"(component {verdict.component}, t={verdict.t:.6g})"
            )
        change = step.norm()
        if change < tol:
            return SolveReport(cur, it, change, True, name, tol, monotone_trace=trace,
                               max_order_violation=worst)
        cur = nxt
        trace.append(cur.norm())
    res = (cur - T(cur)).norm()
    return SolveReport(cur, maxiter, res, False, name, tol, monotone_trace=trace, max_order_violation=worst)


def monotone_iterate(system, grid: Grid, alpha0: GridPair, beta0: GridPair,
                     tol: float = defaults.ITER_TOL, maxiter: int = defaults.ITER_MAXITER,
                     operator: DiscreteOperator | None = None, order_tol: float = defaults.CONE_TOL,
                     localization_params=None) -> tuple[SolveReport, SolveReport]:
    """Ordered iterations from a lower solution ``alpha0`` and an upper solution ``beta0``.

    Returns ``(from_alpha, from_beta)``: the increasing sequence tends to the
    smallest fixed point in ``[alpha0, beta0]``, the decreasing one to the
    greatest.  Each step is checked against the cone order.

    Raises
    ------
    NotBracketed
        if ``alpha0 <= beta0``, ``alpha0 <= T alpha0`` or ``T beta0 <= beta0``
        fails in the cone order.
    NonMonotoneStep
        if an iterate leaves the order by more than ``order_tol``.
    """
    cone = system.cone
    T = _operator(system, grid, operator)
    for label, lo, hi in (
        ("alpha0 <= beta0", alpha0, beta0),
        ("alpha0 <= T alpha0", alpha0, T(alpha0)),
        ("T beta0 <= beta0", T(beta0), beta0),
    ):
        v = in_cone(hi - lo, cone, order_tol)
        if not v.ok:
            raise NotBracketed(f"{label} fails: margin {v.margin:.3e} at component {v.component}, t={v.t:.6g}")

    box = (float(np.max(beta0.u1)), float(np.max(beta0.u2)))
    if min(box) > 0:
        f1, f2 = (eq.f for eq in system.equations)
        h6 = check_H6(f1, f2, box[0], box[1], defaults.LATTICE_DENSITY)
        if not h6.passed:
            warnings.warn(f"nonlinearities look non-monotone on [0, beta0]: {h6.failures[0].witness}",
                          RuntimeWarning, stacklevel=2)

    up = _ordered_iteration(T, alpha0, cone, tol, maxiter, True, order_tol, "monotone-from-alpha")
    down = _ordered_iteration(T, beta0, cone, tol, maxiter, False, order_tol, "monotone-from-beta")
    return _finish(up, system, localization_params), _finish(down, system, localization_params)


def picard(system, grid: Grid, u0: GridPair, tol: float = defaults.ITER_TOL,
           maxiter: int = defaults.ITER_MAXITER, ceiling: float = defaults.DIVERGENCE_CEILING,
           operator: DiscreteOperator | None = None, localization_params=None) -> SolveReport:
    T = _operator(system, grid, operator)
    cur = u0
    history = []
    for it in range(1, maxiter + 1):
        nxt = T(cur)
        change = (nxt - cur).norm()
        history.append(change)
        if change < tol:
            rep = SolveReport(cur, it, change, True, "picard", tol, residual_history=history)
            return _finish(rep, system, localization_params)
        if not nxt.norm() <= ceiling:
            raise Diverged(f"picard: norm {nxt.norm():.3e} exceeds {ceiling:.3e} at iteration {it}")
        cur = nxt
    rep = SolveReport(cur, maxiter, (cur - T(cur)).norm(), False, "picard", tol, residual_history=history)
    return _finish(rep, system, localization_params)


def _max_step(x: np.ndarray, delta: np.ndarray, fraction: float) -> float:
    shrinking = (delta < 0) & (x > 0)
    if not np.any(shrinking):
        return 1.0
    return float(min(1.0, fraction * np.min(x[shrinking] / -delta[shrinking])))


def newton_solve(system, grid: Grid, u0: GridPair, tol: float = defaults.NEWTON_TOL,
                 maxiter: int = defaults.NEWTON_MAXITER, max_halvings: int = defaults.NEWTON_MAX_HALVINGS,
                 operator: DiscreteOperator | None = None, localization_params=None,
                 boundary_fraction: float = 0.9) -> SolveReport:
    """Damped Newton on ``F(u) = u - T u`` over all ``2n`` nodal unknowns.

    The first trial step is shortened so that no node moves more than
    ``boundary_fraction`` of its way to zero; trial steps are then halved
    until the sup-norm residual decreases.  Iterates are clamped to the
    nonnegative orthant (the operator is only defined there) and
    ``projected`` records whether that ever happened.

    Without the shortening, a full step from a large initial guess overshoots
    below zero, the clamp lands on the trivial fixed point and the solve
    "converges" to zero.
    """
    if np.any(u0.values < 0):
        raise ValueError("newton_solve needs a nonnegative initial guess")
    T = _operator(system, grid, operator)
    n = grid.n
    u = u0
    F = (u - T(u)).values.ravel()
    r = float(np.max(np.abs(F)))
    history = [r]
    projected = False
    eye = np.eye(2 * n)
    for it in range(maxiter + 1):
        if r <= tol:
            rep = SolveReport(u, it, r, True, "newton", tol, projected=projected, residual_history=history)
            return _finish(rep, system, localization_params)
        if it == maxiter:
            break
        J = eye - T.jacobian(u)
        lu, piv = linalg.lu_factor(J, check_finite=True)
        pivots = np.abs(np.diag(lu))
        if pivots.min() < defaults.PIVOT_TOL:
            raise SingularJacobian(f"newton: pivot {pivots.min():.3e} below {defaults.PIVOT_TOL:g} at iteration {it}")
        delta = -linalg.lu_solve((lu, piv), F)
        theta = _max_step(u.values.ravel(), delta, boundary_fraction)
        for _ in range(max_halvings + 1):
            raw = u.values.ravel() + theta * delta
            clipped = np.maximum(raw, 0.0)
            cand = GridPair(grid, clipped.reshape(2, n))
            Fc = (cand - T(cand)).values.ravel()
            rc = float(np.max(np.abs(Fc)))
            if rc < r:
                projected |= bool(np.any(raw < 0))
                break
            theta *= 0.5
        else:
            raise Stalled(f"newton: no residual decrease after {max_halvings} halvings at iteration {it} (residual {r:.3e})")
        log.debug("newton it=%d theta=%g residual=%.3e", it, theta, rc)
        u, F, r = cand, Fc, rc
        history.append(r)
    rep = SolveReport(u, maxiter, r, False, "newton", tol, projected=projected, residual_history=history)
    return _finish(rep, system, localization_params)
