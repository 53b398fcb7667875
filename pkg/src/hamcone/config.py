"""Problem files: ``key = value`` lines in ``[section]`` blocks.

Sections are ``[problem]``, ``[equation.1]``, ``[equation.2]``, ``[cone]``,
``[hypotheses]``, ``[solver]`` and the optional ``[sweep]``.  Expressions are
quoted strings; numeric fields accept constant expressions such as
``pi/2``; pairs and lists are comma separated.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import defaults
from .cone import ConeParams
from .constants import estimate_c
from .expr import Expression, ExpressionError, evaluate, parse
from .hypotheses import HypothesisConfig
from .kernels import BuiltinK1, BuiltinK2, CustomKernel, KernelSpec, builtin_constants, parse_kinks
from .quadrature import Grid
from .system import Equation, SystemSpec

__all__ = [
    "ConfigError",
    "EquationConfig",
    "ConeConfig",
    "SolverConfig",
    "SweepConfig",
    "ProblemConfig",
    "TabulatedEnvelope",
    "load_config",
    "parse_config",
]

METHODS = ("newton", "picard", "monotone")


class ConfigError(ValueError):
    pass


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _number(text: str, key: str) -> float:
    try:
        return evaluate(parse(_unquote(text), []), {})
    except ExpressionError as exc:
        raise ConfigError(f"{key}: not a number ({exc})") from None


def _numbers(text: str, key: str, count: int | None = None) -> tuple[float, ...]:
    items = [x for x in _unquote(text).split(",") if x.strip()]
    vals = tuple(_number(x, key) for x in items)
    if count is not None and len(vals) != count:
        raise ConfigError(f"{key}: expected {count} comma-separated numbers, got {len(vals)}")
    return vals


def _int(text: str, key: str) -> int:
    v = _number(text, key)
    if not float(v).is_integer():
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def _fmt(x: float) -> str:
    return repr(float(x))


def _fmt_list(xs: Sequence[float]) -> str:
    return ", ".join(_fmt(x) for x in xs)


@dataclass(frozen=True)
class EquationConfig:
    lam: float
    kernel: str                       # "K1" | "K2" | "custom"
    nonlinearity: str
    weight: str = "1"
    xi: float | None = None
    eta: float | None = None
    kernel_expr: str | None = None
    kinks: tuple[str, ...] = ()

    def build_kernel(self, a: float, b: float) -> KernelSpec:
        kind = self.kernel.lower()
        if kind == "k1":
            return BuiltinK1()
        if kind == "k2":
            if self.xi is None or self.eta is None:
                raise ConfigError("kernel K2 needs xi and eta")
            return BuiltinK2(self.xi, self.eta)
        if kind == "custom":
            if not self.kernel_expr:
                raise ConfigError("custom kernel needs 'expr'")
            return CustomKernel(Expression.parse(self.kernel_expr, ["t", "s"]), parse_kinks(self.kinks), a, b)
        raise ConfigError(f"unknown kernel {self.kernel!r}; use K1, K2 or custom")


@dataclass(frozen=True)
class ConeConfig:
    intervals: tuple[tuple[float, float] | None, tuple[float, float] | None] = (None, None)
    cs: tuple[float | None, float | None] = (None, None)
    phis: tuple[str | None, str | None] = (None, None)


@dataclass(frozen=True)
class SolverConfig:
    n: int = defaults.GRID_NODES
    method: str = "newton"
    tol: float = defaults.ITER_TOL
    newton_tol: float = defaults.NEWTON_TOL
    maxiter: int = defaults.ITER_MAXITER
    newton_maxiter: int = defaults.NEWTON_MAXITER
    initial: tuple[float, float] = (3.0, 3.0)
    lower: tuple[float, float] = (0.0, 0.0)
    upper: tuple[float, float] | None = None


@dataclass(frozen=True)
class SweepConfig:
    lambda1: tuple[float, ...] = (0.1, 1.0, 10.0)
    lambda2: tuple[float, ...] = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class ProblemConfig:
    a: float
    b: float
    equations: tuple[EquationConfig, EquationConfig]
    cone: ConeConfig = field(default_factory=ConeConfig)
    hypotheses: HypothesisConfig = field(default_factory=HypothesisConfig)
    probes: tuple[float, ...] = (10.0, 100.0, 1000.0)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def validate(self) -> None:
        if not self.a < self.b:
            raise ConfigError(f"[problem] needs a < b, got a={self.a}, b={self.b}")
        for i, eq in enumerate(self.equations, start=1):
            if not eq.lam > 0:
                raise ConfigError(f"(H1) requires lambda_{i} > 0, got {eq.lam}")
            for src, names, key in ((eq.nonlinearity, ["u1", "u2"], "nonlinearity"), (eq.weight, ["s"], "weight")):
                try:
                    Expression.parse(src, names)
                except ExpressionError as exc:
                    raise ConfigError(f"[equation.{i}] {key}: {exc}") from None
        n = self.solver.n
        if n < 3 or n % 2 == 0:
            raise ConfigError(f"grid n must be odd and >= 3, got {n}")
        if self.solver.method not in METHODS:
            raise ConfigError(f"unknown method {self.solver.method!r}; choose from {METHODS}")
        if any(x < 0 for x in self.solver.initial + self.solver.lower):
            raise ConfigError("initial and lower guesses must be nonnegative")

    @property
    def grid(self) -> Grid:
        return Grid(self.a, self.b, self.solver.n)

    def with_overrides(self, n: int | None = None, method: str | None = None) -> "ProblemConfig":
        solver = self.solver
        if n is not None:
            solver = replace(solver, n=n)
        if method is not None:
            solver = replace(solver, method=method)
        cfg = replace(self, solver=solver)
        cfg.validate()
        return cfg

    def build_system(self, lams: tuple[float, float] | None = None) -> SystemSpec:
        """Assemble the system, filling in cone data the file leaves out.

        Builtin kernels default to their closed-form envelope, constant and
        sub-interval.  Custom kernels default to ``[a, b]``, the sampled
        envelope ``max_t k(t, s)`` and the grid estimate of ``c``.
        """
        grid = self.grid
        eqs, intervals, cs, phis = [], [], [], []
        for i, ec in enumerate(self.equations):
            try:
                kernel = ec.build_kernel(self.a, self.b)
                f = Expression.parse(ec.nonlinearity, ["u1", "u2"])
                g = Expression.parse(ec.weight, ["s"])
            except (ExpressionError, ValueError) as exc:
                raise ConfigError(f"[equation.{i + 1}] {exc}") from None
            lam = ec.lam if lams is None else lams[i]
            eqs.append(Equation(float(lam), kernel, g, f))

            builtin = builtin_constants(kernel)
            sub = self.cone.intervals[i]
            phi_src = self.cone.phis[i]
            if phi_src is not None:
                phi = Expression.parse(phi_src, ["s"])
            elif builtin is not None:
                phi = builtin[0]
            else:
                phi = TabulatedEnvelope.of(kernel, grid)
            if sub is None:
                sub = builtin[2] if builtin is not None else (self.a, self.b)
            ci = self.cone.cs[i]
            if ci is None:
                if builtin is not None and self.cone.intervals[i] is None and phi_src is None:
                    ci = builtin[1]
                else:
                    ci = estimate_c(kernel, phi, sub, grid)
            if not 0 < ci < 1:
                raise ConfigError(f"cone constant c{i + 1} = {ci} not in (0, 1); choose another interval{i + 1}")
            intervals.append(tuple(sub))
            cs.append(float(ci))
            phis.append(phi)
        try:
            cone = ConeParams(tuple(intervals), tuple(cs), tuple(phis))
            return SystemSpec(self.a, self.b, tuple(eqs), cone)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # -- text form --------------------------------------------------------------

    def dump(self) -> str:
        lines = ["[problem]", f"a = {_fmt(self.a)}", f"b = {_fmt(self.b)}", ""]
        for i, ec in enumerate(self.equations, start=1):
            lines.append(f"[equation.{i}]")
            lines.append(f'kernel = "{ec.kernel}"')
            if ec.xi is not None:
                lines.append(f"xi = {_fmt(ec.xi)}")
            if ec.eta is not None:
                lines.append(f"eta = {_fmt(ec.eta)}")
            if ec.kernel_expr is not None:
                lines.append(f'expr = "{ec.kernel_expr}"')
            if ec.kinks:
                lines.append(f'kinks = "{", ".join(ec.kinks)}"')
            lines.append(f"lambda = {_fmt(ec.lam)}")
            lines.append(f'weight = "{ec.weight}"')
            lines.append(f'nonlinearity = "{ec.nonlinearity}"')
            lines.append("")
        lines.append("[cone]")
        for i in range(2):
            if self.cone.intervals[i] is not None:
                lines.append(f"interval{i + 1} = {_fmt_list(self.cone.intervals[i])}")
            if self.cone.cs[i] is not None:
                lines.append(f"c{i + 1} = {_fmt(self.cone.cs[i])}")
            if self.cone.phis[i] is not None:
                lines.append(f'phi{i + 1} = "{self.cone.phis[i]}"')
        lines.append("")
        h = self.hypotheses
        lines += ["[hypotheses]", f"B1 = {_fmt(h.B1)}", f"B2 = {_fmt(h.B2)}", f"density = {h.density}"]
        if h.M is not None:
            lines.append(f"M = {_fmt(h.M)}")
        if h.rho is not None:
            lines.append(f"rho = {_fmt(h.rho)}")
        lines += [f"probes = {_fmt_list(self.probes)}", ""]
        s = self.solver
        lines += [
            "[solver]",
            f"n = {s.n}",
            f"method = {s.method}",
            f"tol = {_fmt(s.tol)}",
            f"newton_tol = {_fmt(s.newton_tol)}",
            f"maxiter = {s.maxiter}",
            f"newton_maxiter = {s.newton_maxiter}",
            f"initial = {_fmt_list(s.initial)}",
            f"lower = {_fmt_list(s.lower)}",
        ]
        if s.upper is not None:
            lines.append(f"upper = {_fmt_list(s.upper)}")
        lines += ["", "[sweep]", f"lambda1 = {_fmt_list(self.sweep.lambda1)}",
                  f"lambda2 = {_fmt_list(self.sweep.lambda2)}", ""]
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class TabulatedEnvelope:
    """Sampled ``phi(s) = max_t k(t, s)``, linearly interpolated."""

    s: np.ndarray
    values: np.ndarray

    @classmethod
    def of(cls, kernel: KernelSpec, grid: Grid) -> "TabulatedEnvelope":
        t = grid.nodes
        kv = kernel.evaluate(t[:, None], t[None, :])
        return cls(t, kv.max(axis=0))

    def __call__(self, s):
        return np.interp(s, self.s, self.values)


# --- reading -----------------------------------------------------------------------

_KNOWN = {
    "problem": {"a", "b"},
    "equation": {"kernel", "xi", "eta", "expr", "kinks", "lambda", "weight", "nonlinearity"},
    "cone": {"interval1", "interval2", "c1", "c2", "phi1", "phi2"},
    "hypotheses": {"B1", "B2", "density", "M", "rho", "probes"},
    "solver": {"n", "method", "tol", "newton_tol", "maxiter", "newton_maxiter", "initial", "lower", "upper"},
    "sweep": {"lambda1", "lambda2"},
}


def _section(cp: configparser.ConfigParser, name: str, required: bool = True) -> dict[str, str]:
    if not cp.has_section(name):
        if required:
            raise ConfigError(f"missing section [{name}]")
        return {}
    items = dict(cp.items(name))
    kind = name.split(".")[0]
    unknown = set(items) - _KNOWN[kind]
    if unknown:
        raise ConfigError(f"[{name}]: unknown keys {sorted(unknown)}")
    return items


def _equation(items: dict[str, str], name: str) -> EquationConfig:
    for key in ("kernel", "lambda", "nonlinearity"):
        if key not in items:
            raise ConfigError(f"[{name}] missing '{key}'")
    kinks = tuple(x.strip() for x in _unquote(items.get("kinks", "")).split(",") if x.strip())
    return EquationConfig(
        lam=_number(items["lambda"], f"[{name}] lambda"),
        kernel=_unquote(items["kernel"]),
        nonlinearity=_unquote(items["nonlinearity"]),
        weight=_unquote(items.get("weight", "1")),
        xi=_number(items["xi"], "xi") if "xi" in items else None,
        eta=_number(items["eta"], "eta") if "eta" in items else None,
        kernel_expr=_unquote(items["expr"]) if "expr" in items else None,
        kinks=kinks,
    )


def parse_config(text: str) -> ProblemConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    unknown_sections = [s for s in cp.sections()
                        if s not in ("problem", "equation.1", "equation.2", "cone", "hypotheses", "solver", "sweep")]
    if unknown_sections:
        raise ConfigError(f"unknown sections {unknown_sections}")

    prob = _section(cp, "problem")
    a = _number(prob.get("a", "0"), "a")
    b = _number(prob.get("b", "1"), "b")
    eqs = (_equation(_section(cp, "equation.1"), "equation.1"), _equation(_section(cp, "equation.2"), "equation.2"))

    cone = _section(cp, "cone", required=False)
    cone_cfg = ConeConfig(
        intervals=tuple(_numbers(cone[f"interval{i}"], f"interval{i}", 2) if f"interval{i}" in cone else None
                        for i in (1, 2)),
        cs=tuple(_number(cone[f"c{i}"], f"c{i}") if f"c{i}" in cone else None for i in (1, 2)),
        phis=tuple(_unquote(cone[f"phi{i}"]) if f"phi{i}" in cone else None for i in (1, 2)),
    )

    hyp = _section(cp, "hypotheses", required=False)
    try:
        hyp_cfg = HypothesisConfig(
            B1=_number(hyp.get("B1", "pi/2"), "B1"),
            B2=_number(hyp.get("B2", "pi/2"), "B2"),
            M=_number(hyp["M"], "M") if "M" in hyp else None,
            rho=_number(hyp["rho"], "rho") if "rho" in hyp else None,
            density=_int(hyp.get("density", str(defaults.LATTICE_DENSITY)), "density"),
        )
    except ValueError as exc:
        raise ConfigError(f"[hypotheses] {exc}") from None
    probes = _numbers(hyp["probes"], "probes") if "probes" in hyp else (10.0, 100.0, 1000.0)

    sol = _section(cp, "solver", required=False)
    base = SolverConfig()
    solver_cfg = SolverConfig(
        n=_int(sol["n"], "n") if "n" in sol else base.n,
        method=_unquote(sol.get("method", base.method)).lower(),
        tol=_number(sol["tol"], "tol") if "tol" in sol else base.tol,
        newton_tol=_number(sol["newton_tol"], "newton_tol") if "newton_tol" in sol else base.newton_tol,
        maxiter=_int(sol["maxiter"], "maxiter") if "maxiter" in sol else base.maxiter,
        newton_maxiter=_int(sol["newton_maxiter"], "newton_maxiter") if "newton_maxiter" in sol else base.newton_maxiter,
        initial=_numbers(sol["initial"], "initial", 2) if "initial" in sol else base.initial,
        lower=_numbers(sol["lower"], "lower", 2) if "lower" in sol else base.lower,
        upper=_numbers(sol["upper"], "upper", 2) if "upper" in sol else None,
    )

    sw = _section(cp, "sweep", required=False)
    sweep_cfg = SweepConfig(
        lambda1=_numbers(sw["lambda1"], "lambda1") if "lambda1" in sw else SweepConfig.lambda1,
        lambda2=_numbers(sw["lambda2"], "lambda2") if "lambda2" in sw else SweepConfig.lambda2,
    )
    cfg = ProblemConfig(a, b, eqs, cone_cfg, hyp_cfg, probes, solver_cfg, sweep_cfg)
    cfg.validate()
    return cfg


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text)
