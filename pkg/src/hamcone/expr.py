"""Small expression language for nonlinearities, weights, envelopes and kernels.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' factor)?
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2`` is
``-(x^2)`` and ``2^-1`` is ``2^(-1)``.  There is no implicit multiplication.

Expressions are immutable.  They evaluate either on scalars (``evaluate``)
or elementwise on numpy arrays (``evaluate_array``); both raise
:class:`DomainError` rather than return nan/inf.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

__all__ = [
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownVariable",
    "DomainError",
    "Number",
    "Variable",
    "Constant",
    "Neg",
    "BinOp",
    "Call",
    "Expression",
    "parse",
    "evaluate",
    "to_source",
    "FUNCTIONS",
]


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


class UnknownVariable(ExpressionError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r} at offset {position}")
        self.name = name
        self.position = position


class DomainError(ExpressionError, ArithmeticError):
    pass


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Node = Union[Number, Variable, Constant, Neg, BinOp, Call]

# name -> (min arity, max arity); None means unbounded
FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "sqrt": (1, 1),
    "abs": (1, 1),
    "min": (2, None),
    "max": (2, None),
}
CONSTANTS = {"pi": math.pi}


# --- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: frozenset[str]):
        self.tokens = _tokenize(source)
        self.i = 0
        self.variables = variables

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected {text!r}, found {found!r}", self.tok.pos)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self._accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self._accept("^"):
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Number(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in FUNCTIONS:
                return self._call(tok)
            if tok.text in CONSTANTS:
                return Constant(tok.text)
            if tok.text in self.variables:
                return Variable(tok.text)
            raise UnknownVariable(tok.text, tok.pos)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"expected an operand, found {found!r}", tok.pos)

    def _call(self, name_tok: _Token) -> Call:
        self._expect("(")
        args = [self.expr()]
        while self._accept(","):
            args.append(self.expr())
        self._expect(")")
        lo, hi = FUNCTIONS[name_tok.text]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ExpressionSyntaxError(
                f"{name_tok.text}() takes {lo if hi == lo else f'at least {lo}'} "
                f"argument(s), got {len(args)}",
                name_tok.pos,
            )
        return Call(name_tok.text, tuple(args))


# --- pretty printer --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 5


def _format_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_source(node: Node) -> str:
    """Render ``node`` with the fewest parentheses that re-parse to the same tree."""

    def wrap(child: Node, needs: bool) -> str:
        text = to_source(child)
        return f"({text})" if needs else text

    if isinstance(node, Number):
        return _format_number(node.value)
    if isinstance(node, (Variable, Constant)):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _prec(node.operand) < _PREC["neg"])
    p = _PREC[node.op]
    if node.op == "^":
        left = wrap(node.left, _prec(node.left) <= p)
        right = wrap(node.right, _prec(node.right) < _PREC["neg"])
        return f"{left}^{right}"
    left = wrap(node.left, _prec(node.left) < p)
    right = wrap(node.right, _prec(node.right) <= p)
    if node.op in "+-":
        return f"{left} {node.op} {right}"
    return f"{left}{node.op}{right}"


# --- evaluation ------------------------------------------------------------------

def _checked(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise DomainError(f"non-finite result in {what}")
    return value


def evaluate(node: Node, bindings: Mapping[str, float]) -> float:
    """Evaluate ``node`` on scalar bindings with strict real-domain checks."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        try:
            return float(bindings[node.name])
        except KeyError:
            raise ExpressionError(f"no binding for variable {node.name!r}") from None
    if isinstance(node, Constant):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.operand, bindings)
    if isinstance(node, Call):
        args = [evaluate(a, bindings) for a in node.args]
        return _call_scalar(node.name, args)
    x = evaluate(node.left, bindings)
    y = evaluate(node.right, bindings)
    if node.op == "+":
        return _checked(x + y, "+")
    if node.op == "-":
        return _checked(x - y, "-")
    if node.op == "*":
        return _checked(x * y, "*")
    if node.op == "/":
        if y == 0.0:
            raise DomainError("division by zero")
        return _checked(x / y, "/")
    if x < 0 and not float(y).is_integer():
        raise DomainError(f"negative base {x} with non-integer exponent {y}")
    try:
        return _checked(math.pow(x, y), "^")
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise DomainError(f"{x}^{y}: {exc}") from None


def _call_scalar(name: str, args: list[float]) -> float:
    x = args[0]
    if name == "sin":
        return math.sin(x)
    if name == "cos":
        return math.cos(x)
    if name == "exp":
        try:
            return _checked(math.exp(x), "exp")
        except OverflowError:
            raise DomainError(f"exp({x}) overflows") from None
    if name == "log":
        if x <= 0:
            raise DomainError(f"log of non-positive argument {x}")
        return math.log(x)
    if name == "sqrt":
        if x < 0:
            raise DomainError(f"sqrt of negative argument {x}")
        return math.sqrt(x)
    if name == "abs":
        return abs(x)
    if name == "min":
        return min(args)
    return max(args)


def _check_array(value: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise DomainError(f"non-finite result in {what}")
    return value


def evaluate_array(node: Node, bindings: Mapping[str, object]) -> np.ndarray:
    """Elementwise evaluation over broadcastable numpy bindings."""
    with np.errstate(all="ignore"):
        return np.asarray(_eval_array(node, bindings), dtype=float)


def _eval_array(node: Node, bindings):
    if isinstance(node, Number):
        return np.float64(node.value)
    if isinstance(node, Variable):
        try:
            return np.asarray(bindings[node.name], dtype=float)
        except KeyError:
            raise ExpressionError(f"no binding for variable {node.name!r}") from None
    if isinstance(node, Constant):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_eval_array(node.operand, bindings)
    if isinstance(node, Call):
        args = [_eval_array(a, bindings) for a in node.args]
        return _call_array(node.name, args)
    x = _eval_array(node.left, bindings)
    y = _eval_array(node.right, bindings)
    if node.op == "+":
        return _check_array(x + y, "+")
    if node.op == "-":
        return _check_array(x - y, "-")
    if node.op == "*":
        return _check_array(x * y, "*")
    if node.op == "/":
        if np.any(y == 0.0):
            raise DomainError("division by zero")
        return _check_array(x / y, "/")
    if np.any((x < 0) & (np.floor(y) != y)):
        raise DomainError("negative base with non-integer exponent")
    return _check_array(np.power(x, y), "^")


def _call_array(name: str, args: list):
    x = args[0]
    if name == "sin":
        return np.sin(x)
    if name == "cos":
        return np.cos(x)
    if name == "exp":
        return _check_array(np.exp(x), "exp")
    if name == "log":
        if np.any(x <= 0):
            raise DomainError("log of non-positive argument")
        return np.log(x)
    if name == "sqrt":
        if np.any(x < 0):
            raise DomainError("sqrt of negative argument")
        return np.sqrt(x)
    if name == "abs":
        return np.abs(x)
    out = args[0]
    reducer = np.minimum if name == "min" else np.maximum
    for a in args[1:]:
        out = reducer(out, a)
    return out


# --- public wrapper --------------------------------------------------------------

class Expression:
    """A parsed expression bound to its declared variable names.

    >>> f = Expression.parse("(2+sin(u2))*u1^2", ["u1", "u2"])
    >>> f(u1=2.0, u2=0.0)
    8.0
    """

    __slots__ = ("node", "variables", "source")

    def __init__(self, node: Node, variables: Sequence[str], source: str | None = None):
        object.__setattr__(self, "node", node)
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "source", source if source is not None else to_source(node))

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    @classmethod
    def parse(cls, source: str, variables: Sequence[str]) -> "Expression":
        return cls(parse(source, variables), variables, source)

    @classmethod
    def constant(cls, value: float, variables: Sequence[str]) -> "Expression":
        return cls(Number(float(value)), variables)

    def __call__(self, **bindings: float) -> float:
        return evaluate(self.node, bindings)

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        return evaluate(self.node, bindings)

    def evaluate_array(self, **bindings) -> np.ndarray:
        """Vectorized evaluation; the result is broadcast to the bindings' shape."""
        shape = np.broadcast_shapes(*(np.shape(v) for v in bindings.values())) if bindings else ()
        return np.broadcast_to(evaluate_array(self.node, bindings), shape).copy()

    def scaled(self, factor: float) -> "Expression":
        return Expression(BinOp("*", Number(float(factor)), self.node), self.variables)

    def pretty(self) -> str:
        return to_source(self.node)

    def __str__(self) -> str:
        return self.source

    def __repr__(self) -> str:
        return f"Expression({self.source!r}, variables={list(self.variables)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expression):
            return NotImplemented
        return self.node == other.node and self.variables == other.variables

    def __hash__(self) -> int:
        return hash((self.node, self.variables))


def parse(source: str, variables: Sequence[str]) -> Node:
    """Parse ``source`` into an AST over the declared ``variables``."""
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    reserved = set(variables) & (set(FUNCTIONS) | set(CONSTANTS))
    if reserved:
        raise ExpressionError(f"reserved names used as variables: {sorted(reserved)}")
    return _Parser(source, frozenset(variables)).parse()
