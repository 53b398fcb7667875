"""Problem description: two coupled Hammerstein equations on ``[a, b]``.

    u_i(t) = lam_i * int_a^b k_i(t, s) g_i(s) f_i(u1(s), u2(s)) ds,   i = 1, 2
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .cone import ConeParams
from .expr import Expression
from .kernels import BuiltinK1, BuiltinK2, KernelSpec, builtin_constants

__all__ = ["Equation", "SystemSpec", "example_system", "EXAMPLE_F1", "EXAMPLE_F2"]

EXAMPLE_F1 = "(2 + sin(u2))*u1^2"
EXAMPLE_F2 = "(2 + sin(u1))*u2^2"


@dataclass(frozen=True)
class Equation:
    lam: float
    kernel: KernelSpec
    g: Expression
    f: Expression

    def __post_init__(self):
        if tuple(self.g.variables) != ("s",):
            raise ValueError("weight g must be an expression in s")
        if set(self.f.variables) - {"u1", "u2"}:
            raise ValueError("nonlinearity f must be an expression in u1, u2")


@dataclass(frozen=True)
class SystemSpec:
    a: float
    b: float
    equations: tuple[Equation, Equation]
    cone: ConeParams

    def __post_init__(self):
        if len(self.equations) != 2:
            raise ValueError("a system has exactly two equations")
        self.cone.check_inside(self.a, self.b)
        for eq in self.equations:
            ka, kb = eq.kernel.domain
            if self.a < ka - 1e-14 or self.b > kb + 1e-14:
                raise ValueError(f"kernel {eq.kernel} is not defined on [{self.a}, {self.b}]")

    @property
    def lams(self) -> tuple[float, float]:
        return (self.equations[0].lam, self.equations[1].lam)

    def with_lambdas(self, lam1: float, lam2: float) -> "SystemSpec":
        e1, e2 = self.equations
        return replace(self, equations=(replace(e1, lam=float(lam1)), replace(e2, lam=float(lam2))))

    def with_nonlinearities(self, f1: Expression, f2: Expression) -> "SystemSpec":
        e1, e2 = self.equations
        return replace(self, equations=(replace(e1, f=f1), replace(e2, f=f2)))


def _f(source: str) -> Expression:
    return Expression.parse(source, ["u1", "u2"])


def example_system(lam=(1.0, 1.0), f1: str = EXAMPLE_F1, f2: str = EXAMPLE_F2,
                   xi: float = 0.25, eta: float = 0.5) -> SystemSpec:
    """Kernels K1 and K2(xi, eta), weights g = 1 and the closed-form cone data."""
    k1, k2 = BuiltinK1(), BuiltinK2(xi, eta)
    (phi1, c1, sub1), (phi2, c2, sub2) = builtin_constants(k1), builtin_constants(k2)
    one = Expression.parse("1", ["s"])
    cone = ConeParams(intervals=(sub1, sub2), cs=(c1, c2), phis=(phi1, phi2))
    eqs = (
        Equation(float(lam[0]), k1, one, _f(f1)),
        Equation(float(lam[1]), k2, one, _f(f2)),
    )
    return SystemSpec(0.0, 1.0, eqs, cone)
