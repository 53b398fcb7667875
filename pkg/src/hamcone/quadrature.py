"""Composite Simpson quadrature and the discretized Hammerstein operator.

The operator acts on pairs of grid functions.  Between grid nodes a grid
function is interpolated linearly; each grid cell (further split at the
kernel's vertical kinks) is integrated with Simpson's rule.  Since every node
``t_j`` is a cell boundary, the diagonal kink ``s = t_j`` of row ``j`` never
falls inside a cell.  With nonnegative kernel and weight the discrete
operator therefore maps nonnegative, non-decreasing data to nonnegative,
non-decreasing data, like its continuous counterpart.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from . import defaults

__all__ = [
    "InvalidPanel",
    "Grid",
    "GridFunction",
    "GridPair",
    "simpson_nodes_weights",
    "integrate",
    "DiscreteOperator",
    "apply_operator",
]


class InvalidPanel(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    n: int = defaults.GRID_NODES

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"grid node count must be odd and >= 3, got {self.n}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    def refine(self) -> "Grid":
        return Grid(self.a, self.b, 2 * self.n - 1)

    def mask(self, lo: float, hi: float, tol: float = 1e-12) -> np.ndarray:
        """Boolean mask of nodes inside ``[lo, hi]`` (endpoints within ``tol``)."""
        t = self.nodes
        return (t >= lo - tol) & (t <= hi + tol)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __call__(self, t):
        return np.interp(t, self.grid.nodes, self.values)


@dataclass(frozen=True, eq=False)
class GridPair:
    """A pair (u1, u2) of grid functions sharing one grid; ``values`` is 2 x n."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (2, self.grid.n):
            raise ValueError(f"expected shape (2, {self.grid.n}), got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: Grid, c1: float, c2: float) -> "GridPair":
        return cls(grid, np.array([np.full(grid.n, float(c1)), np.full(grid.n, float(c2))]))

    @classmethod
    def zeros(cls, grid: Grid) -> "GridPair":
        return cls.constant(grid, 0.0, 0.0)

    @classmethod
    def from_functions(cls, grid: Grid, f1: Callable, f2: Callable) -> "GridPair":
        t = grid.nodes
        return cls(grid, np.array([np.broadcast_to(f1(t), t.shape), np.broadcast_to(f2(t), t.shape)]))

    @property
    def u1(self) -> np.ndarray:
        return self.values[0]

    @property
    def u2(self) -> np.ndarray:
        return self.values[1]

    def component(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.values[i])

    def norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def interpolate(self, grid: Grid) -> "GridPair":
        return GridPair(grid, np.array([np.interp(grid.nodes, self.grid.nodes, v) for v in self.values]))

    def _same_grid(self, other: "GridPair") -> None:
        if other.grid != self.grid:
            raise ValueError("grid pairs live on different grids")

    def __add__(self, other: "GridPair") -> "GridPair":
        self._same_grid(other)
        return GridPair(self.grid, self.values + other.values)

    def __sub__(self, other: "GridPair") -> "GridPair":
        self._same_grid(other)
        return GridPair(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridPair":
        return GridPair(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"GridPair(n={self.grid.n}, norm={self.norm():.6g})"


# --- Simpson -------------------------------------------------------------------

def simpson_nodes_weights(edges: Sequence[float], n_per_panel: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson on consecutive ``edges`` panels.

    Each panel is split into ``n_per_panel`` (even) equal subintervals.  Shared
    endpoints are merged so the returned nodes are strictly increasing.
    """
    if n_per_panel < 2 or n_per_panel % 2:
        raise ValueError("n_per_panel must be an even count >= 2")
    edges = np.asarray(edges, dtype=float)
    npan = len(edges) - 1
    m = n_per_panel
    frac = np.linspace(0.0, 1.0, m + 1)
    pattern = np.ones(m + 1)
    pattern[1:-1:2] = 4.0
    pattern[2:-1:2] = 2.0
    widths = np.diff(edges)
    nodes = np.empty(npan * m + 1)
    weights = np.zeros(npan * m + 1)
    for p in range(npan):
        sl = slice(p * m, p * m + m + 1)
        nodes[sl] = edges[p] + widths[p] * frac
        weights[sl] += pattern * (widths[p] / (3.0 * m))
    # exact panel edges, not the linspace round-off
    nodes[::m] = edges
    return nodes, weights


def _panel_edges(a: float, b: float, breakpoints: Sequence[float]) -> np.ndarray:
    inner = []
    for p in sorted(set(float(x) for x in breakpoints)):
        if p < a or p > b:
            raise InvalidPanel(f"breakpoint {p} outside ({a}, {b})")
        if a < p < b:
            inner.append(p)
    return np.array([a, *inner, b])


def integrate(f: Callable, a: float, b: float, breakpoints: Sequence[float] = (),
              n_per_panel: int = defaults.SIMPSON_PER_PANEL) -> float:
    """Composite Simpson integral of a vectorized ``f`` over ``[a, b]``.

    Panels are split at ``breakpoints``; a breakpoint equal to ``a`` or ``b``
    is ignored, one outside ``[a, b]`` raises :class:`InvalidPanel`.
    """
    if not a < b:
        if a == b:
            return 0.0
        raise InvalidPanel(f"empty or reversed interval [{a}, {b}]")
    nodes, weights = simpson_nodes_weights(_panel_edges(a, b, breakpoints), n_per_panel)
    values = np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape)
    return float(weights @ values)


# --- discretized operator ----------------------------------------------------------

def _merge_close(points: np.ndarray, tol: float) -> np.ndarray:
    points = np.sort(points)
    keep = np.concatenate(([True], np.diff(points) > tol))
    return points[keep]


@dataclass
class _EquationData:
    lam: float
    s: np.ndarray            # quadrature points
    left: np.ndarray         # left grid index of each quadrature point
    theta: np.ndarray        # linear interpolation weight toward left + 1
    matrix: np.ndarray       # n x nq, lam * w_q * k(t_j, s_q) * g(s_q)
    f: object = field(repr=False)
    interp: sparse.csr_matrix = field(repr=False)


class DiscreteOperator:
    """The pair map (u1, u2) -> (T1 u, T2 u) on a fixed grid.

    Construction tabulates kernel, weight and quadrature weights once; each
    application then costs two matrix-vector products plus the nonlinearity
    evaluations.
    """

    def __init__(self, system, grid: Grid):
        if abs(grid.a - system.a) > 1e-14 or abs(grid.b - system.b) > 1e-14:
            raise ValueError("grid and system intervals differ")
        self.system = system
        self.grid = grid
        self._eqs = [self._tabulate(eq) for eq in system.equations]

    def _tabulate(self, eq) -> _EquationData:
        grid = self.grid
        t = grid.nodes
        kinks = np.array([x for x in eq.kernel.vertical_kinks if grid.a < x < grid.b])
        edges = _merge_close(np.concatenate([t, kinks]), 1e-9 * grid.h)
        s, w = simpson_nodes_weights(edges, 2)
        left = np.clip(np.searchsorted(t, s, side="right") - 1, 0, grid.n - 2)
        theta = (s - t[left]) / grid.h
        theta = np.clip(theta, 0.0, 1.0)
        g = np.broadcast_to(eq.g.evaluate_array(s=s), s.shape)
        k = eq.kernel.evaluate(t[:, None], s[None, :])
        matrix = eq.lam * k * (w * g)[None, :]
        rows = np.repeat(np.arange(len(s)), 2)
        cols = np.stack([left, left + 1], axis=1).ravel()
        vals = np.stack([1.0 - theta, theta], axis=1).ravel()
        interp = sparse.csr_matrix((vals, (rows, cols)), shape=(len(s), grid.n))
        return _EquationData(eq.lam, s, left, theta, matrix, eq.f, interp)

    def _sample(self, data: _EquationData, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo, th = data.left, data.theta
        u = values[:, lo] * (1.0 - th) + values[:, lo + 1] * th
        return u[0], u[1]

    def apply(self, u: GridPair) -> GridPair:
        out = np.empty((2, self.grid.n))
        for i, data in enumerate(self._eqs):
            u1, u2 = self._sample(data, u.values)
            fv = np.broadcast_to(data.f.evaluate_array(u1=u1, u2=u2), u1.shape)
            out[i] = data.matrix @ fv
        return GridPair(self.grid, out)

    __call__ = apply

    def integral_profile(self, i: int) -> np.ndarray:
        """``lam_i * int k_i(t_j, s) g_i(s) ds`` at every node."""
        return self._eqs[i].matrix.sum(axis=1)

    def jacobian(self, u: GridPair, rel_step: float = defaults.FD_REL_STEP) -> np.ndarray:
        """Dense 2n x 2n derivative of the operator at ``u``.

        Partial derivatives of the nonlinearities come from central differences
        with step ``rel_step * max(1, |u|)``; where the backward point would
        leave the nonnegative orthant a forward difference is used instead.
        """
        n = self.grid.n
        jac = np.zeros((2 * n, 2 * n))
        for i, data in enumerate(self._eqs):
            x = self._sample(data, u.values)
            for k in range(2):
                d = _partial(data.f, x, k, rel_step)
                block = (data.interp.T @ (data.matrix * d[None, :]).T).T
                jac[i * n:(i + 1) * n, k * n:(k + 1) * n] = block
        return jac


def _partial(f, x: tuple[np.ndarray, np.ndarray], k: int, rel_step: float) -> np.ndarray:
    base = x[k]
    h = rel_step * np.maximum(1.0, np.abs(base))
    backward = np.where(base - h >= 0.0, base - h, base)
    forward = base + h

    def at(v):
        args = list(x)
        args[k] = v
        return np.broadcast_to(f.evaluate_array(u1=args[0], u2=args[1]), base.shape)

    return (at(forward) - at(backward)) / (forward - backward)


def apply_operator(system, grid: Grid, u: GridPair) -> GridPair:
    """One-shot ``T u``; build a :class:`DiscreteOperator` to apply it repeatedly."""
    return DiscreteOperator(system, grid).apply(u)
