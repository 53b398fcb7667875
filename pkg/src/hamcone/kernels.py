"""Green's functions of the two model boundary value problems and user kernels.

``BuiltinK1`` is the Green's function of ``-u'' = h``, ``u'(0) = 0``,
``u(1) + u'(1) = 0``; ``BuiltinK2`` the one of ``-u'' = h``, ``u'(0) = 0``,
``u(1) = xi*u(eta)``.  Both live on the unit square.

Kinks (curves where a kernel is continuous but not smooth) are declared
rather than detected; the quadrature splits panels at them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import Expression

__all__ = [
    "OutOfDomain",
    "ParameterError",
    "Kink",
    "DIAGONAL",
    "vertical",
    "KernelSpec",
    "BuiltinK1",
    "BuiltinK2",
    "CustomKernel",
    "eval_kernel",
    "K1Constants",
    "K2Constants",
    "k1_constants",
    "k2_constants",
]

_DOMAIN_SLACK = 1e-14


class OutOfDomain(ValueError):
    pass


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Kink:
    """``kind`` is ``"diagonal"`` (s = t) or ``"vertical"`` (s = at)."""

    kind: str
    at: float | None = None

    def __post_init__(self):
        if self.kind not in ("diagonal", "vertical"):
            raise ValueError(f"unknown kink kind {self.kind!r}")
        if self.kind == "vertical" and self.at is None:
            raise ValueError("vertical kink needs a location")

    def __str__(self) -> str:
        return "diagonal" if self.kind == "diagonal" else f"vertical:{self.at!r}"

    @classmethod
    def from_text(cls, text: str) -> "Kink":
        text = text.strip()
        if text == "diagonal":
            return DIAGONAL
        kind, sep, at = text.partition(":")
        if kind.strip() != "vertical" or not sep:
            raise ValueError(f"bad kink descriptor {text!r}; use 'diagonal' or 'vertical:<s0>'")
        return vertical(float(at))


DIAGONAL = Kink("diagonal")


def vertical(s0: float) -> Kink:
    return Kink("vertical", float(s0))


class KernelSpec:
    """Base class: a continuous kernel k(t, s) on ``[a, b]^2``."""

    a: float = 0.0
    b: float = 1.0
    kinks: tuple[Kink, ...] = ()

    @property
    def domain(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def has_diagonal_kink(self) -> bool:
        return any(k.kind == "diagonal" for k in self.kinks)

    @property
    def vertical_kinks(self) -> list[float]:
        return sorted(k.at for k in self.kinks if k.kind == "vertical")

    def breakpoints(self, t: float, lo: float, hi: float) -> list[float]:
        """Interior points of ``(lo, hi)`` where k(t, .) may be non-smooth."""
        pts = set(self.vertical_kinks)
        if self.has_diagonal_kink:
            pts.add(float(t))
        return sorted(p for p in pts if lo < p < hi)

    def _check_domain(self, t, s) -> None:
        lo, hi = self.a - _DOMAIN_SLACK, self.b + _DOMAIN_SLACK
        t = np.asarray(t)
        s = np.asarray(s)
        if np.any((t < lo) | (t > hi) | (s < lo) | (s > hi)):
            raise OutOfDomain(f"(t, s) outside [{self.a}, {self.b}]^2")

    def __call__(self, t: float, s: float) -> float:
        self._check_domain(t, s)
        return float(self._eval(np.float64(t), np.float64(s)))

    def evaluate(self, t, s) -> np.ndarray:
        """Broadcast evaluation over arrays ``t`` and ``s``."""
        self._check_domain(t, s)
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return np.asarray(self._eval(t, s), dtype=float)

    def _eval(self, t, s):
        raise NotImplementedError


@dataclass(frozen=True)
class BuiltinK1(KernelSpec):
    @property
    def kinks(self) -> tuple[Kink, ...]:
        return (DIAGONAL,)

    def _eval(self, t, s):
        # ties s == t take the s <= t branch
        return np.where(s <= t, 2.0 - t, 2.0 - s)

    def __str__(self) -> str:
        return "K1"


@dataclass(frozen=True)
class BuiltinK2(KernelSpec):
    xi: float = 0.25
    eta: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "eta", float(self.eta))
        if not (0.0 < self.xi < 1.0 and 0.0 < self.eta < 1.0):
            raise ParameterError(f"K2 needs 0 < xi < 1 and 0 < eta < 1, got xi={self.xi}, eta={self.eta}")

    @property
    def kinks(self) -> tuple[Kink, ...]:
        return (DIAGONAL, vertical(self.eta))

    def _eval(self, t, s):
        xi, eta = self.xi, self.eta
        out = (1.0 - s) / (1.0 - xi)
        out = out - np.where(s <= eta, xi / (1.0 - xi) * (eta - s), 0.0)
        return out - np.where(s <= t, t - s, 0.0)

    def __str__(self) -> str:
        return f"K2(xi={self.xi!r}, eta={self.eta!r})"


@dataclass(frozen=True, eq=False)
class CustomKernel(KernelSpec):
    expr: Expression = None
    kinks: tuple = ()
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.expr is None or set(self.expr.variables) - {"t", "s"}:
            raise ParameterError("custom kernel must be an expression in (t, s)")
        if not self.a < self.b:
            raise ParameterError("custom kernel needs a < b")
        object.__setattr__(self, "kinks", tuple(self.kinks))
        for k in self.kinks:
            if k.kind == "vertical" and not self.a <= k.at <= self.b:
                raise ParameterError(f"vertical kink at {k.at} outside [{self.a}, {self.b}]")

    def _eval(self, t, s):
        return self.expr.evaluate_array(t=t, s=s)

    def __str__(self) -> str:
        return f"custom({self.expr.source})"


def eval_kernel(k: KernelSpec, t: float, s: float) -> float:
    return k(t, s)


# --- closed-form cone constants ---------------------------------------------------

@dataclass(frozen=True)
class K1Constants:
    phi1: Expression
    c1: float
    interval: tuple[float, float]
    gamma1_star: float
    gamma1_lower: float


@dataclass(frozen=True)
class K2Constants:
    b2: float
    c2: float
    gamma2_star: float
    gamma2_lower: float
    phi2: Expression
    case: str = field(default="")

    @property
    def interval(self) -> tuple[float, float]:
        return (0.0, self.b2)


def k1_constants() -> K1Constants:
    """Envelope and cone constants of K1 for weight g = 1 and [a1, b1] = [0, 1]."""
    return K1Constants(
        phi1=Expression.parse("2 - s", ["s"]),
        c1=0.5,
        interval=(0.0, 1.0),
        gamma1_star=1.5,
        gamma1_lower=1.0,
    )


def k2_constants(xi: float, eta: float) -> K2Constants:
    """Envelope and cone constants of K2(xi, eta) for weight g = 1 and [a2, b2] = [0, b2].

    ``case`` records which branch of the split on ``1 + xi*eta`` vs ``2*eta``
    was taken: ``"1+xi*eta<=2*eta"`` or ``"1+xi*eta>2*eta"``.
    """
    xi, eta = float(xi), float(eta)
    if not (0.0 < xi < 1.0 and 0.0 < eta < 1.0):
        raise ParameterError(f"need 0 < xi < 1 and 0 < eta < 1, got xi={xi}, eta={eta}")
    if 1.0 + xi * eta <= 2.0 * eta:
        case = "1+xi*eta<=2*eta"
        b2 = (1.0 - xi * eta) / (2.0 * (1.0 - xi))
        gamma_lower = b2 * b2
    else:
        case = "1+xi*eta>2*eta"
        b2 = 1.0 / (2.0 - xi)
        gamma_lower = (1.0 - 2.0 * xi * eta**2 + xi**2 * eta**2) / (2.0 * (1.0 - xi) * (2.0 - xi))
    c2 = (1.0 - xi * eta - (1.0 - xi) * b2) / (1.0 - xi * eta)
    gamma_star = (1.0 - xi * eta**2) / (2.0 * (1.0 - xi))
    # phi2(s) = k2(0, s); the s <= eta correction written with max()
    phi2 = Expression.parse(f"(1 - s)/(1 - {xi!r}) - {xi!r}/(1 - {xi!r})*max({eta!r} - s, 0)", ["s"])
    return K2Constants(b2=b2, c2=c2, gamma2_star=gamma_star, gamma2_lower=gamma_lower, phi2=phi2, case=case)


def builtin_constants(k: KernelSpec) -> tuple[Expression, float, tuple[float, float]] | None:
    """(phi, c, sub-interval) for a builtin kernel, ``None`` for custom ones."""
    if isinstance(k, BuiltinK1):
        kc = k1_constants()
        return kc.phi1, kc.c1, kc.interval
    if isinstance(k, BuiltinK2):
        kc = k2_constants(k.xi, k.eta)
        return kc.phi2, kc.c2, kc.interval
    return None


def parse_kinks(items: Sequence[str]) -> tuple[Kink, ...]:
    return tuple(Kink.from_text(x) for x in items if x.strip())
