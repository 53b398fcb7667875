"""Quadrature-based kernel constants and envelope (H5) scans.

``gamma_star``  = max over t in [a, b]     of int_a^b   g(s) k(t, s) ds
``gamma_lower`` = min over t in [a_i, b_i] of int_{a_i}^{b_i} g(s) k(t, s) ds

Both are grid searches over t (ties go to the smallest t), refined by
doubling the grid until the value settles.  Sub-interval searches use a
grid laid on ``[a_i, b_i]`` itself so its endpoints are always candidates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import defaults
from .expr import Expression
from .kernels import KernelSpec
from .quadrature import Grid, integrate

__all__ = [
    "NegativeWeight",
    "Extremum",
    "H5Report",
    "EquationConstants",
    "ConstantsReport",
    "kernel_profile",
    "compute_gamma_star",
    "compute_gamma_lower",
    "verify_H5",
    "estimate_c",
    "compute_constants",
]


class NegativeWeight(ValueError):
    pass


@dataclass(frozen=True)
class Extremum:
    value: float
    t: float
    nodes: int

    def __iter__(self):
        yield self.value
        yield self.t


def _as_vectorized(fn, var: str) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(fn, Expression):
        return lambda x: np.broadcast_to(fn.evaluate_array(**{var: x}), np.shape(x))
    return lambda x: np.broadcast_to(np.asarray(fn(x), dtype=float), np.shape(x))


def _check_weight(g, lo: float, hi: float, n: int, tol: float = defaults.CONE_TOL) -> None:
    s = np.linspace(lo, hi, n)
    vals = _as_vectorized(g, "s")(s)
    j = int(np.argmin(vals))
    if vals[j] < -tol:
        raise NegativeWeight(f"weight g({s[j]:.6g}) = {vals[j]:.6g} < 0")


def kernel_profile(k: KernelSpec, g, ts: np.ndarray, lo: float, hi: float,
                   n_per_panel: int = defaults.SIMPSON_PER_PANEL) -> np.ndarray:
    """``int_lo^hi g(s) k(t, s) ds`` for each t in ``ts``, split at the kinks."""
    gv = _as_vectorized(g, "s")
    out = np.empty(len(ts))
    for j, t in enumerate(ts):
        out[j] = integrate(lambda s: k.evaluate(t, s) * gv(s), lo, hi,
                           k.breakpoints(t, lo, hi), n_per_panel)
    return out


def _refined_extremum(k, g, lo_t, hi_t, lo_s, hi_s, n, pick, tol, max_refinements) -> Extremum:
    result = None
    for _ in range(max_refinements + 1):
        ts = np.linspace(lo_t, hi_t, n)
        prof = kernel_profile(k, g, ts, lo_s, hi_s)
        j = int(pick(prof))
        new = Extremum(float(prof[j]), float(ts[j]), n)
        if result is not None and abs(new.value - result.value) < tol:
            return new
        result = new
        n = 2 * n - 1
    return result


def compute_gamma_star(k: KernelSpec, g, grid: Grid, tol: float = defaults.GAMMA_REFINE_TOL,
                       max_refinements: int = defaults.GAMMA_MAX_REFINEMENTS) -> Extremum:
    _check_weight(g, grid.a, grid.b, grid.n)
    return _refined_extremum(k, g, grid.a, grid.b, grid.a, grid.b, grid.n, np.argmax, tol, max_refinements)


def compute_gamma_lower(k: KernelSpec, g, sub: tuple[float, float], grid: Grid,
                        tol: float = defaults.GAMMA_REFINE_TOL,
                        max_refinements: int = defaults.GAMMA_MAX_REFINEMENTS) -> Extremum:
    lo, hi = sub
    if lo < grid.a - 1e-14 or hi > grid.b + 1e-14 or not lo < hi:
        raise ValueError(f"sub-interval [{lo}, {hi}] not inside [{grid.a}, {grid.b}]")
    _check_weight(g, lo, hi, grid.n)
    return _refined_extremum(k, g, lo, hi, lo, hi, grid.n, np.argmin, tol, max_refinements)


def _scan_points(k: KernelSpec, grid: Grid, sub: tuple[float, float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """t over [a, b], t over the sub-interval, and s over [a, b] plus kinks."""
    t_all = grid.nodes
    t_sub = np.linspace(sub[0], sub[1], grid.n)
    extra = [x for x in k.vertical_kinks if grid.a < x < grid.b] + list(sub)
    s = np.unique(np.concatenate([grid.nodes, np.array(extra, dtype=float), t_sub]))
    s = s[(s >= grid.a) & (s <= grid.b)]
    return t_all, t_sub, s


@dataclass(frozen=True)
class H5Report:
    upper_violation: float        # max of k - phi, must be <= tol
    upper_at: tuple[float, float]
    lower_violation: float        # max of c*phi - k over t in sub, must be <= tol
    lower_at: tuple[float, float]
    tol: float

    @property
    def upper_ok(self) -> bool:
        return self.upper_violation <= self.tol

    @property
    def lower_ok(self) -> bool:
        return self.lower_violation <= self.tol

    @property
    def passed(self) -> bool:
        return self.upper_ok and self.lower_ok

    @property
    def worst_violation(self) -> float:
        return max(self.upper_violation, self.lower_violation)


def verify_H5(k: KernelSpec, phi, c: float, sub: tuple[float, float], grid: Grid,
              tol: float = defaults.ENVELOPE_TOL) -> H5Report:
    """Scan ``k <= phi`` on the full square and ``c*phi <= k`` for t in ``sub``."""
    t_all, t_sub, s = _scan_points(k, grid, sub)
    ph = _as_vectorized(phi, "s")(s)
    upper = k.evaluate(t_all[:, None], s[None, :]) - ph[None, :]
    iu = np.unravel_index(int(np.argmax(upper)), upper.shape)
    lower = c * ph[None, :] - k.evaluate(t_sub[:, None], s[None, :])
    il = np.unravel_index(int(np.argmax(lower)), lower.shape)
    return H5Report(
        upper_violation=float(upper[iu]),
        upper_at=(float(t_all[iu[0]]), float(s[iu[1]])),
        lower_violation=float(lower[il]),
        lower_at=(float(t_sub[il[0]]), float(s[il[1]])),
        tol=tol,
    )


def estimate_c(k: KernelSpec, phi, sub: tuple[float, float], grid: Grid,
               tol: float = defaults.ENVELOPE_TOL, margin: float = defaults.C_SAFETY_MARGIN) -> float:
    """Largest grid-admissible ``c`` in ``c*phi(s) <= k(t, s)`` for t in ``sub``.

    Points where both ``phi`` and ``k`` vanish are skipped; a point with
    ``phi`` vanishing but ``k`` positive forces 0.
    """
    _, t_sub, s = _scan_points(k, grid, sub)
    ph = _as_vectorized(phi, "s")(s)
    kv = k.evaluate(t_sub[:, None], s[None, :])
    ph2 = np.broadcast_to(ph[None, :], kv.shape)
    small = ph2 <= tol
    if np.any(small & (kv > tol)):
        return 0.0
    ratio = np.where(small, np.inf, kv / np.where(small, 1.0, ph2))
    inf = float(np.min(ratio)) if np.isfinite(np.min(ratio)) else 1.0
    return float(np.clip(inf - margin, 0.0, 1.0))


@dataclass(frozen=True)
class EquationConstants:
    gamma_star: float
    argmax_t: float
    gamma_lower: float
    argmin_t: float
    c_estimate: float
    H5_worst_violation: float
    h5: H5Report | None = None


@dataclass(frozen=True)
class ConstantsReport:
    equations: tuple[EquationConstants, EquationConstants]

    @property
    def gamma_star(self) -> tuple[float, float]:
        return tuple(e.gamma_star for e in self.equations)

    @property
    def gamma_lower(self) -> tuple[float, float]:
        return tuple(e.gamma_lower for e in self.equations)

    @classmethod
    def from_values(cls, gamma_star, gamma_lower=(np.nan, np.nan)) -> "ConstantsReport":
        """A report carrying known (e.g. closed-form) gamma values only."""
        eqs = tuple(
            EquationConstants(float(gs), np.nan, float(gl), np.nan, np.nan, np.nan)
            for gs, gl in zip(gamma_star, gamma_lower)
        )
        return cls(eqs)


def compute_constants(system, grid: Grid) -> ConstantsReport:
    """gamma constants, a c estimate and an (H5) scan for both equations."""
    cone = system.cone
    out = []
    for i, eq in enumerate(system.equations):
        sub = cone.intervals[i]
        gs = compute_gamma_star(eq.kernel, eq.g, grid)
        gl = compute_gamma_lower(eq.kernel, eq.g, sub, grid)
        phi = cone.phis[i]
        if phi is None:
            c_est, h5, worst = np.nan, None, np.nan
        else:
            c_est = estimate_c(eq.kernel, phi, sub, grid)
            h5 = verify_H5(eq.kernel, phi, cone.cs[i], sub, grid)
            worst = h5.worst_violation
        out.append(EquationConstants(gs.value, gs.t, gl.value, gl.t, c_est, worst, h5))
    return ConstantsReport(tuple(out))
