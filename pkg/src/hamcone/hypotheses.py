"""Sampled verification of the existence hypotheses.

Every statement about a continuum (monotonicity on a box, an infimum over a
box, growth at infinity) is checked on a lattice and can at best earn
``heuristic-pass``.  Statements about finitely many numbers (signs of the
lambdas, the discrete order ``T beta <= beta``, radius inequalities) are
decided outright and earn ``pass``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import defaults
from .cone import ConeParams, ball_in_cone_radius, in_cone
from .constants import ConstantsReport, verify_H5
from .expr import Expression
from .quadrature import DiscreteOperator, Grid, GridPair

__all__ = [
    "Status",
    "Check",
    "CheckReport",
    "HypothesisConfig",
    "LambdaSup",
    "BetaCandidate",
    "Thm23Plan",
    "check_H1_to_H5",
    "check_H6",
    "check_H7",
    "find_rho",
    "check_H7_star",
    "lambda_supremum",
    "find_beta",
    "default_M",
    "plan_thm23",
    "check_thm23",
    "check_thm25",
    "check_system",
]


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    HEURISTIC_PASS = "heuristic-pass"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Check:
    name: str
    status: Status
    margin: float = math.nan
    witness: dict | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status is Status.FAIL and self.witness is None:
            raise ValueError(f"failed check {self.name!r} needs a witness")

    @property
    def ok(self) -> bool:
        return self.status is not Status.FAIL


@dataclass
class CheckReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __len__(self) -> int:
        return len(self.checks)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            margin = "" if math.isnan(c.margin) else f"  margin={c.margin:.6g}"
            line = f"[{c.status.value:>14}] {c.name}{margin}"
            if c.detail:
                line += f"  {c.detail}"
            if c.status is Status.FAIL:
                line += f"  witness={c.witness}"
            lines.append(line)
        return "\n".join(lines)


@dataclass(frozen=True)
class HypothesisConfig:
    B1: float = math.pi / 2
    B2: float = math.pi / 2
    M: float | None = None
    rho: float | None = None
    density: int = defaults.LATTICE_DENSITY

    def __post_init__(self):
        for name in ("B1", "B2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("M", "rho"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.density < defaults.LATTICE_MIN_DENSITY:
            raise ValueError(f"lattice density must be >= {defaults.LATTICE_MIN_DENSITY}")


def _lattice(lo: float, hi: float, density: int, inset: bool = False) -> np.ndarray:
    if inset:
        return lo + (hi - lo) * (np.arange(density) + 0.5) / density
    return np.linspace(lo, hi, density)


def _f_grid(f: Expression, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """f on the tensor lattice, indexed [i, j] = f(x[i], y[j])."""
    X, Y = np.meshgrid(x, y, indexing="ij")
    return np.broadcast_to(f.evaluate_array(u1=X, u2=Y), X.shape)


def _check_density(density: int) -> None:
    if density < defaults.LATTICE_MIN_DENSITY:
        raise ValueError(f"lattice density must be >= {defaults.LATTICE_MIN_DENSITY}, got {density}")


# --- (H1)-(H5) ---------------------------------------------------------------------

def check_H1_to_H5(system, grid: Grid, f_box: float, density: int = defaults.LATTICE_DENSITY) -> CheckReport:
    """Signs of lambda, kernels, weights and nonlinearities; the envelope scan."""
    rep = CheckReport()
    for i, eq in enumerate(system.equations, start=1):
        if eq.lam > 0:
            rep.add(Check(f"H1[{i}] lambda > 0", Status.PASS, eq.lam))
        else:
            rep.add(Check(f"H1[{i}] lambda > 0", Status.FAIL, eq.lam, {"lambda": eq.lam}))

        t = grid.nodes
        kv = eq.kernel.evaluate(t[:, None], t[None, :])
        j = np.unravel_index(int(np.argmin(kv)), kv.shape)
        kmin = float(kv[j])
        if kmin >= -defaults.ENVELOPE_TOL:
            rep.add(Check(f"H2[{i}] kernel >= 0", Status.HEURISTIC_PASS, kmin))
        else:
            rep.add(Check(f"H2[{i}] kernel >= 0", Status.FAIL, kmin, {"t": float(t[j[0]]), "s": float(t[j[1]])}))

        gv = np.broadcast_to(eq.g.evaluate_array(s=t), t.shape)
        jg = int(np.argmin(gv))
        if gv[jg] > 0:
            rep.add(Check(f"H3[{i}] weight > 0", Status.HEURISTIC_PASS, float(gv[jg])))
        else:
            rep.add(Check(f"H3[{i}] weight > 0", Status.FAIL, float(gv[jg]), {"s": float(t[jg])}))

        x = _lattice(0.0, f_box, density)
        fv = _f_grid(eq.f, x, x)
        jf = np.unravel_index(int(np.argmin(fv)), fv.shape)
        if fv[jf] >= 0:
            rep.add(Check(f"H4[{i}] f >= 0", Status.HEURISTIC_PASS, float(fv[jf]),
                          detail=f"on [0, {f_box:.6g}]^2"))
        else:
            rep.add(Check(f"H4[{i}] f >= 0", Status.FAIL, float(fv[jf]),
                          {"u1": float(x[jf[0]]), "u2": float(x[jf[1]])}))

        cone = system.cone
        phi = cone.phis[i - 1]
        if phi is None:
            rep.add(Check(f"H5[{i}] envelope", Status.FAIL, math.nan, {"reason": "no envelope phi given"}))
        else:
            h5 = verify_H5(eq.kernel, phi, cone.cs[i - 1], cone.intervals[i - 1], grid)
            if h5.passed:
                rep.add(Check(f"H5[{i}] envelope", Status.HEURISTIC_PASS, 0.0 - h5.worst_violation,
                              detail=f"c{i}={cone.cs[i - 1]:.6g} on {cone.intervals[i - 1]}"))
            else:
                where = h5.upper_at if not h5.upper_ok else h5.lower_at
                rep.add(Check(f"H5[{i}] envelope", Status.FAIL, -h5.worst_violation,
                              {"t": where[0], "s": where[1], "upper": h5.upper_violation,
                               "lower": h5.lower_violation}))
    return rep


# --- (H6) ---------------------------------------------------------------------------

def _monotone_scan(name: str, f: Expression, box: tuple[float, float], density: int,
                   increasing: bool = True, tol: float = defaults.MONOTONE_TOL) -> Check:
    x = _lattice(0.0, box[0], density)
    y = _lattice(0.0, box[1], density)
    fv = _f_grid(f, x, y)
    sign = 1.0 if increasing else -1.0
    steps = [sign * np.diff(fv, axis=0), sign * np.diff(fv, axis=1)]
    scale = tol * np.maximum(1.0, np.abs(fv))
    for axis, d in enumerate(steps):
        allowed = d + (scale[1:, :] if axis == 0 else scale[:, 1:])
        j = np.unravel_index(int(np.argmin(allowed)), allowed.shape)
        if allowed[j] < 0:
            k = (j[0] + (axis == 0), j[1] + (axis == 1))
            witness = {"u": (float(x[j[0]]), float(y[j[1]])), "v": (float(x[k[0]]), float(y[k[1]])),
                       "f(u)": float(fv[j]), "f(v)": float(fv[k])}
            return Check(name, Status.FAIL, float(d[j]), witness)
    return Check(name, Status.HEURISTIC_PASS, min(float(d.min()) for d in steps))


def check_H6(f1: Expression, f2: Expression, B1: float, B2: float,
             density: int = defaults.LATTICE_DENSITY) -> CheckReport:
    """f_i non-decreasing on ``[0, B1] x [0, B2]``, along axis-neighbour chains."""
    _check_density(density)
    rep = CheckReport()
    for i, f in enumerate((f1, f2), start=1):
        rep.add(_monotone_scan(f"H6[{i}] non-decreasing on [0,{B1:.6g}]x[0,{B2:.6g}]", f, (B1, B2), density))
    return rep


# --- (H7) and (H7)* -------------------------------------------------------------------

def _h7_infima(f1: Expression, f2: Expression, c: float, rho: float, density: int):
    top = rho / c
    a = _lattice(rho, top, density)
    b = _lattice(0.0, top, density)
    v1 = _f_grid(f1, a, b) / rho
    v2 = _f_grid(f2, b, a) / rho
    j1 = np.unravel_index(int(np.argmin(v1)), v1.shape)
    j2 = np.unravel_index(int(np.argmin(v2)), v2.shape)
    return (
        (float(v1[j1]), (float(a[j1[0]]), float(b[j1[1]]))),
        (float(v2[j2]), (float(b[j2[0]]), float(a[j2[1]]))),
    )


def check_H7(f1: Expression, f2: Expression, c: float, rho: float, M: float,
             density: int = defaults.LATTICE_DENSITY) -> CheckReport:
    """inf f1/rho on [rho, rho/c] x [0, rho/c] and inf f2/rho on [0, rho/c] x [rho, rho/c] exceed M."""
    if not 0 < c < 1 or not rho > 0:
        raise ValueError("need 0 < c < 1 and rho > 0")
    _check_density(density)
    rep = CheckReport()
    for i, (val, at) in enumerate(_h7_infima(f1, f2, c, rho, density), start=1):
        name = f"H7[{i}] inf f{i}/rho > M (rho={rho:.6g}, M={M:.6g})"
        margin = val - M
        if margin >= defaults.STRICT_MARGIN:
            rep.add(Check(name, Status.HEURISTIC_PASS, margin))
        else:
            rep.add(Check(name, Status.FAIL, margin, {"u1": at[0], "u2": at[1], "inf": val}))
    return rep


def find_rho(f1: Expression, f2: Expression, c: float, M: float,
             density: int = defaults.LATTICE_DENSITY, exponents: range = range(-20, 41)) -> float | None:
    """Smallest ``rho = 2**k`` on which the sampled (H7) infima exceed ``M``."""
    for k in exponents:
        rho = 2.0 ** k
        try:
            if check_H7(f1, f2, c, rho, M, density).passed:
                return rho
        except ArithmeticError:
            # overflow far out on the ladder: nothing larger will evaluate either
            return None
    return None


def check_H7_star(f1: Expression, f2: Expression, probes: Sequence[float],
                  threshold: float = defaults.H7_STAR_THRESHOLD,
                  density: int = defaults.LATTICE_DENSITY) -> CheckReport:
    """Superlinear growth of f_i in u_i, uniformly in the other variable.

    At each probe magnitude m, records ``min_{v in [0, m]} f_i / m`` with
    ``u_i = m``.  Passes (heuristically) when that sequence strictly
    increases and its last value exceeds ``threshold``.
    """
    probes = [float(p) for p in probes]
    if len(probes) < 3 or any(q <= p for p, q in zip(probes, probes[1:])) or probes[0] <= 0:
        raise ValueError("probes must be >= 3 increasing positive magnitudes")
    rep = CheckReport()
    for i, f in enumerate((f1, f2), start=1):
        ratios = []
        for m in probes:
            other = _lattice(0.0, m, density)
            if i == 1:
                vals = np.broadcast_to(f.evaluate_array(u1=m, u2=other), other.shape)
            else:
                vals = np.broadcast_to(f.evaluate_array(u1=other, u2=m), other.shape)
            ratios.append(float(np.min(vals)) / m)
        increasing = all(q > p for p, q in zip(ratios, ratios[1:]))
        name = f"H7*[{i}] f{i}/u{i} -> infinity"
        margin = ratios[-1] - threshold
        if increasing and margin > 0:
            rep.add(Check(name, Status.HEURISTIC_PASS, margin, detail=f"ratios={[round(r, 6) for r in ratios]}"))
        else:
            rep.add(Check(name, Status.FAIL, margin, {"probes": probes, "ratios": ratios}))
    return rep


# --- admissible lambda and the upper solution beta ---------------------------------

@dataclass(frozen=True)
class LambdaSup:
    value: float
    at: tuple[float, float]
    unbounded: bool
    boundary_trend: bool
    history: tuple[float, ...]

    def admits(self, lam: float) -> bool:
        return 0 < lam and (self.unbounded or lam < self.value)


def lambda_supremum(system, cp: ConeParams, gammas: ConstantsReport, B1: float, B2: float,
                    density: int = defaults.LATTICE_DENSITY,
                    levels: int = defaults.LAMBDA_SUP_LEVELS) -> tuple[LambdaSup, LambdaSup]:
    """Lattice estimate of ``sup (1-c) r_i / (f_i(r1, r2) gamma_i*)`` over the open box.

    The lattice uses half-step insets and is doubled ``levels - 1`` times.
    The estimate is flagged unbounded when some lattice point has
    ``f_i = 0`` or when the running maximum keeps growing without its
    increments contracting (at least 3/4 of the previous increment at the
    finest level).  ``boundary_trend`` marks a maximizer on the lattice edge:
    the supremum is approached towards the boundary and not attained.
    """
    if not (B1 > 0 and B2 > 0):
        raise ValueError("B1 and B2 must be positive")
    _check_density(density)
    c = cp.c
    out = []
    for i, eq in enumerate(system.equations):
        gstar = gammas.gamma_star[i]
        if not gstar > 0:
            raise ValueError(f"gamma*_{i + 1} must be positive")
        history, best = [], None
        hit_zero = False
        d = density
        for _ in range(levels):
            r1 = _lattice(0.0, B1, d, inset=True)
            r2 = _lattice(0.0, B2, d, inset=True)
            fv = _f_grid(eq.f, r1, r2)
            R1, R2 = np.meshgrid(r1, r2, indexing="ij")
            ri = R1 if i == 0 else R2
            zero = fv == 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(zero, np.inf, (1.0 - c) * ri / (np.where(zero, 1.0, fv) * gstar))
            ratio = np.where(fv < 0, -np.inf, ratio)
            j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
            val = float(ratio[j])
            hit_zero |= bool(np.any(zero))
            edge = j[0] in (0, d - 1) or j[1] in (0, d - 1)
            best = (val, (float(r1[j[0]]), float(r2[j[1]])), edge)
            history.append(val)
            d *= 2
        unbounded = hit_zero or math.isinf(history[-1])
        if not unbounded and len(history) >= 3:
            d_last = history[-1] - history[-2]
            d_prev = history[-2] - history[-3]
            unbounded = d_last > 0 and d_prev > 0 and d_last >= 0.75 * d_prev
        out.append(LambdaSup(best[0], best[1], unbounded, best[2], tuple(history)))
    return tuple(out)


@dataclass(frozen=True)
class BetaCandidate:
    beta: tuple[float, float]
    slack: tuple[float, float]
    density: int

    @property
    def min_slack(self) -> float:
        return min(self.slack)


def beta_slack(system, c: float, gammas: ConstantsReport, beta: Sequence[float]) -> tuple[float, float]:
    """``beta_i - lam_i gamma_i* f_i(beta) - c beta_i`` for both equations."""
    b1, b2 = (float(x) for x in beta)
    out = []
    for i, eq in enumerate(system.equations):
        bi = (b1, b2)[i]
        out.append(bi - eq.lam * gammas.gamma_star[i] * eq.f(u1=b1, u2=b2) - c * bi)
    return tuple(out)


def _beta_axis(B: float, density: int) -> np.ndarray:
    """Inset lattice on (0, B) plus the points B/2, B/4, ... for large lambda."""
    return np.union1d(_lattice(0.0, B, density, inset=True), B * 2.0 ** -np.arange(1, 53))


def find_beta(system, cp: ConeParams, gammas: ConstantsReport, B1: float, B2: float,
              density: int = defaults.LATTICE_DENSITY, max_refinements: int = 3) -> BetaCandidate | None:
    """A constant upper solution: both slacks of ``beta_i - lam_i gamma_i* f_i(beta) > c beta_i``.

    Returns the lattice point with the largest minimal slack, doubling the
    lattice (up to ``max_refinements`` times) while no point qualifies.  The
    lattice is augmented by a geometric sequence towards 0 because large
    lambda forces small beta.
    """
    _check_density(density)
    c = cp.c
    d = density
    for _ in range(max_refinements + 1):
        b1 = _beta_axis(B1, d)
        b2 = _beta_axis(B2, d)
        X, Y = np.meshgrid(b1, b2, indexing="ij")
        slacks = []
        for i, eq in enumerate(system.equations):
            bi = X if i == 0 else Y
            fv = np.broadcast_to(eq.f.evaluate_array(u1=X, u2=Y), X.shape)
            slacks.append(bi - eq.lam * gammas.gamma_star[i] * fv - c * bi)
        worst = np.minimum(slacks[0], slacks[1])
        j = np.unravel_index(int(np.argmax(worst)), worst.shape)
        if worst[j] >= defaults.STRICT_MARGIN:
            beta = (float(b1[j[0]]), float(b2[j[1]]))
            return BetaCandidate(beta, (float(slacks[0][j]), float(slacks[1][j])), d)
        d *= 2
    return None


# --- theorem-level hypothesis sets ---------------------------------------------------------

@dataclass(frozen=True)
class Thm23Plan:
    beta: tuple[float, float]
    R: float
    rho: float
    M: float


def required_M(system, gammas: ConstantsReport) -> float:
    """``max_i 1 / (lam_i gamma_{i,*})``; M must exceed this."""
    return max(1.0 / (eq.lam * gl) for eq, gl in zip(system.equations, gammas.gamma_lower))


def default_M(system, gammas: ConstantsReport) -> float:
    """1.5 times the larger of :func:`required_M` and ``max_i 1/gamma_{i,*}``.

    The second term does not depend on lambda; it keeps M above
    ``max_i 1/gamma_{i,*}`` even when large lambda makes the first one small.
    """
    floor = max(1.0 / gl for gl in gammas.gamma_lower)
    return 1.5 * max(required_M(system, gammas), floor)


def plan_thm23(system, cp: ConeParams, gammas: ConstantsReport, B1: float, B2: float,
               density: int = defaults.LATTICE_DENSITY, M: float | None = None,
               rho: float | None = None) -> Thm23Plan | None:
    """Pick beta, M, rho and R following the order of the existence argument.

    beta from :func:`find_beta`; M defaults to :func:`default_M`;
    rho is the first power of two passing (H7) for that M; R is half the
    smaller of the ball radius around beta and rho.
    """
    cand = find_beta(system, cp, gammas, B1, B2, density)
    if cand is None:
        return None
    if M is None:
        M = default_M(system, gammas)
    if rho is None:
        rho = find_rho(system.equations[0].f, system.equations[1].f, cp.c, M, density)
        if rho is None:
            return None
    R = 0.5 * min(ball_in_cone_radius(cand.beta, cp), rho)
    return Thm23Plan(cand.beta, R, rho, M)


def check_thm23(system, cp: ConeParams, beta: Sequence[float], R: float, rho: float, grid: Grid,
                gammas: ConstantsReport, M: float | None = None,
                density: int = defaults.LATTICE_DENSITY, operator: DiscreteOperator | None = None) -> CheckReport:
    """Hypotheses (1)-(3) of the non-decreasing fixed point theorem for the system.

    (a) ``R <= ball radius(beta)`` and ``R < rho``;
    (b) discrete ``T beta <= beta`` in the cone order;
    (c) f non-decreasing on ``[0, beta_1] x [0, beta_2]`` (sampled);
    (d) ``lam_i M gamma_{i,*} > 1`` and (H7) at ``(rho, M)`` (sampled).
    """
    beta = tuple(float(x) for x in beta)
    rep = CheckReport()
    radius = ball_in_cone_radius(beta, cp)
    margin = min(radius - R, rho - R)
    name = "(a) B[beta,R] in K, R < rho"
    if R > 0 and radius - R >= 0 and rho - R >= defaults.STRICT_MARGIN:
        rep.add(Check(name, Status.PASS, margin, detail=f"R={R:.6g}, radius={radius:.6g}"))
    else:
        rep.add(Check(name, Status.FAIL, margin, {"R": R, "radius": radius, "rho": rho}))

    T = operator if operator is not None else DiscreteOperator(system, grid)
    bpair = GridPair.constant(grid, *beta)
    tb = T(bpair)
    verdict = in_cone(bpair - tb, cp)
    name = "(b) T beta <= beta"
    if verdict.ok:
        rep.add(Check(name, Status.PASS, verdict.margin, detail=f"beta=({beta[0]:.6g}, {beta[1]:.6g})"))
    else:
        rep.add(Check(name, Status.FAIL, verdict.margin,
                      {"component": verdict.component, "t": verdict.t, "reason": verdict.reason}))

    f1, f2 = (eq.f for eq in system.equations)
    for chk in check_H6(f1, f2, beta[0], beta[1], density):
        rep.add(Check("(c) " + chk.name, chk.status, chk.margin, chk.witness))

    need = required_M(system, gammas)
    if M is None:
        M = default_M(system, gammas)
    name = "(d) M > max 1/(lam_i gamma_i,*)"
    if M - need >= defaults.STRICT_MARGIN:
        rep.add(Check(name, Status.PASS, M - need, detail=f"M={M:.6g}, bound={need:.6g}"))
    else:
        rep.add(Check(name, Status.FAIL, M - need, {"M": M, "bound": need}))
    for chk in check_H7(f1, f2, cp.c, rho, M, density):
        rep.add(Check("(d) " + chk.name, chk.status, chk.margin, chk.witness))
    return rep


def check_thm25(system, cp: ConeParams, alpha: Sequence[float], R: float, grid: Grid,
                density: int = defaults.LATTICE_DENSITY, operator: DiscreteOperator | None = None) -> CheckReport:
    """Hypotheses (1')-(2') of the non-increasing variant for a constant ``alpha``.

    Non-increase of T on the shell ``R <= ||x|| <= ||alpha||`` is sampled as
    reversed monotonicity of f on ``[0, ||alpha||]^2``.
    """
    alpha = tuple(float(x) for x in alpha)
    rep = CheckReport()
    T = operator if operator is not None else DiscreteOperator(system, grid)
    apair = GridPair.constant(grid, *alpha)
    verdict = in_cone(apair - T(apair), cp)
    name = "(1') T alpha <= alpha"
    if verdict.ok:
        rep.add(Check(name, Status.PASS, verdict.margin))
    else:
        rep.add(Check(name, Status.FAIL, verdict.margin,
                      {"component": verdict.component, "t": verdict.t, "reason": verdict.reason}))

    norm = max(abs(a) for a in alpha)
    name = "(1') 0 < R < ||alpha||"
    if R > 0 and norm - R >= defaults.STRICT_MARGIN:
        rep.add(Check(name, Status.PASS, norm - R))
    else:
        rep.add(Check(name, Status.FAIL, norm - R, {"R": R, "norm": norm}))

    radius = ball_in_cone_radius(alpha, cp)
    name = "(1') B[alpha,R] in K"
    if radius - R >= 0:
        rep.add(Check(name, Status.PASS, radius - R))
    else:
        rep.add(Check(name, Status.FAIL, radius - R, {"R": R, "radius": radius}))

    for i, eq in enumerate(system.equations, start=1):
        rep.add(_monotone_scan(f"(2') f{i} non-increasing on [0,{norm:.6g}]^2", eq.f, (norm, norm),
                               density, increasing=False))
    return rep


def check_system(system, grid: Grid, hyp: HypothesisConfig, gammas: ConstantsReport,
                 probes: Sequence[float] = (10.0, 100.0, 1000.0)) -> tuple[CheckReport, Thm23Plan | None, tuple[LambdaSup, LambdaSup]]:
    """Full hypothesis sweep used by the ``check`` command."""
    cp = system.cone
    f1, f2 = (eq.f for eq in system.equations)
    rep = check_H1_to_H5(system, grid, f_box=max(hyp.B1, hyp.B2), density=hyp.density)
    for i, gl in enumerate(gammas.gamma_lower, start=1):
        name = f"H5[{i}] gamma_{i},* > 0"
        if gl >= defaults.STRICT_MARGIN:
            rep.add(Check(name, Status.PASS, gl))
        else:
            rep.add(Check(name, Status.FAIL, gl, {"gamma_lower": gl}))
    rep.extend(check_H6(f1, f2, hyp.B1, hyp.B2, hyp.density))
    rep.extend(check_H7_star(f1, f2, probes, density=hyp.density))

    sups = lambda_supremum(system, cp, gammas, hyp.B1, hyp.B2, hyp.density)
    for i, (eq, sup) in enumerate(zip(system.equations, sups), start=1):
        name = f"lambda{i} admissible"
        bound = "unbounded" if sup.unbounded else f"sup~{sup.value:.6g}"
        if sup.admits(eq.lam):
            rep.add(Check(name, Status.HEURISTIC_PASS, math.inf if sup.unbounded else sup.value - eq.lam,
                          detail=f"lambda={eq.lam:.6g}, {bound}"))
        else:
            rep.add(Check(name, Status.FAIL, sup.value - eq.lam, {"lambda": eq.lam, "sup": sup.value}))

    plan = plan_thm23(system, cp, gammas, hyp.B1, hyp.B2, hyp.density, M=hyp.M, rho=hyp.rho)
    if plan is None:
        rep.add(Check("beta/rho selection", Status.FAIL, math.nan, {"reason": "no beta or rho found on lattice"}))
        return rep, None, sups
    slack = beta_slack(system, cp.c, gammas, plan.beta)
    rep.add(Check("beta condition", Status.PASS, min(slack),
                  detail=f"beta=({plan.beta[0]:.6g}, {plan.beta[1]:.6g})"))
    rep.extend(check_thm23(system, cp, plan.beta, plan.R, plan.rho, grid, gammas, plan.M, hyp.density))
    return rep, plan, sups
