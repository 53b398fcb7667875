"""The cone K of nonnegative pairs whose minimum on a sub-interval dominates
``c`` times their sup norm, its order, and the localization sets used by the
existence argument (P, V, K_R).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import defaults
from .quadrature import Grid, GridPair

__all__ = [
    "ConeParams",
    "ConeVerdict",
    "Localization",
    "norm_pair",
    "in_cone",
    "order_leq",
    "ball_in_cone_radius",
    "localize",
]


@dataclass(frozen=True)
class ConeParams:
    """Per-equation sub-intervals ``[a_i, b_i]``, constants ``c_i`` and envelopes.

    ``phis`` are optional vectorized callables of ``s`` (``Expression`` objects
    work through :func:`as_envelope`); they are only needed by the envelope
    checks, not by the order itself.
    """

    intervals: tuple[tuple[float, float], tuple[float, float]]
    cs: tuple[float, float]
    phis: tuple[Callable | None, Callable | None] = (None, None)

    def __post_init__(self):
        for (lo, hi), ci in zip(self.intervals, self.cs):
            if not lo < hi:
                raise ValueError(f"cone sub-interval needs a_i < b_i, got [{lo}, {hi}]")
            if not 0.0 < ci < 1.0:
                raise ValueError(f"cone constant must lie in (0, 1), got {ci}")

    @property
    def c(self) -> float:
        return min(self.cs)

    def check_inside(self, a: float, b: float) -> None:
        for lo, hi in self.intervals:
            if lo < a - 1e-14 or hi > b + 1e-14:
                raise ValueError(f"cone sub-interval [{lo}, {hi}] not inside [{a}, {b}]")


@dataclass(frozen=True)
class ConeVerdict:
    ok: bool
    margin: float
    component: int
    t: float
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def norm_pair(u: GridPair) -> float:
    return u.norm()


def _component_slack(values: np.ndarray, grid: Grid, sub: tuple[float, float], c: float):
    t = grid.nodes
    j_min = int(np.argmin(values))
    nonneg = (float(values[j_min]), float(t[j_min]), "negative value")
    mask = grid.mask(*sub)
    idx = np.flatnonzero(mask)
    j_sub = idx[int(np.argmin(values[idx]))]
    sup = float(np.max(np.abs(values)))
    cone = (float(values[j_sub]) - c * sup, float(t[j_sub]), "min over sub-interval below c*sup")
    return min(nonneg, cone, key=lambda x: x[0])


def in_cone(u: GridPair, cp: ConeParams, tol: float = defaults.CONE_TOL) -> ConeVerdict:
    """Discrete cone membership with the smallest slack and where it occurs."""
    worst = None
    for i in range(2):
        slack, t, reason = _component_slack(u.values[i], u.grid, cp.intervals[i], cp.c)
        if worst is None or slack < worst[0]:
            worst = (slack, i, t, reason)
    slack, i, t, reason = worst
    return ConeVerdict(ok=slack >= -tol, margin=slack, component=i + 1, t=t, reason=reason)


def order_leq(u: GridPair, v: GridPair, cp: ConeParams, tol: float = defaults.CONE_TOL) -> bool:
    """``u`` precedes ``v`` in the cone order, i.e. ``v - u`` lies in K."""
    return in_cone(v - u, cp, tol).ok


def ball_in_cone_radius(beta: Sequence[float], cp: ConeParams) -> float:
    """Largest R with the sup-norm ball around the constant pair ``beta`` inside K.

    A member w of that ball has ``w_i >= beta_i - R`` and ``|w_i| <= beta_i + R``,
    and the worst case makes ``beta_i - R >= c (beta_i + R)`` tight.
    """
    b1, b2 = (float(x) for x in beta)
    if b1 <= 0 or b2 <= 0:
        raise ValueError("beta must be a positive constant pair")
    c = cp.c
    return min(b1, b2) * (1.0 - c) / (1.0 + c)


@dataclass(frozen=True)
class Localization:
    in_P: bool
    in_V: bool
    on_boundary_V: bool
    in_K_R: bool
    in_closed_K_R: bool
    norm: float
    sub_minima: tuple[float, float]

    @property
    def in_V_minus_closed_K_R(self) -> bool:
        return self.in_V and not self.in_closed_K_R

    @property
    def in_K_R_minus_closed_V(self) -> bool:
        # closure of V: both sub-interval minima <= rho
        return self.in_K_R and not (self.in_V or self.on_boundary_V)

    @property
    def tags(self) -> list[str]:
        out = []
        if self.in_P:
            out.append("P")
        if self.in_V:
            out.append("V")
        if self.on_boundary_V:
            out.append("boundary-V")
        if self.in_K_R:
            out.append("K_R")
        if self.in_V_minus_closed_K_R:
            out.append("V\\K_R")
        if self.in_K_R_minus_closed_V:
            out.append("K_R\\V")
        return out

    def label(self) -> str:
        return "+".join(self.tags) or "none"


def localize(u: GridPair, cp: ConeParams, R: float, rho: float, beta: Sequence[float],
             d: float = 1.0, tol: float = defaults.CONE_TOL) -> Localization:
    """Which of the sets P, V, K_R (and their differences) contain ``u``.

    ``P = {x in K : x <= beta, R/d <= ||x||}``,
    ``V = {x in K : min_{[a_i, b_i]} x_i < rho for i = 1, 2}``,
    ``K_R = {x in K : ||x|| < R}``.  Points of V within ``tol`` of its
    boundary are flagged instead of being decided.
    """
    grid = u.grid
    norm = u.norm()
    beta_pair = GridPair.constant(grid, *beta)
    in_P = order_leq(u, beta_pair, cp, tol) and norm >= R / d - tol
    minima = tuple(float(np.min(u.values[i][grid.mask(*cp.intervals[i])])) for i in range(2))
    strictly = all(m < rho - tol for m in minima)
    closed = all(m <= rho + tol for m in minima)
    return Localization(
        in_P=in_P,
        in_V=strictly,
        on_boundary_V=closed and not strictly,
        in_K_R=norm < R - tol,
        in_closed_K_R=norm <= R + tol,
        norm=norm,
        sub_minima=minima,
    )
