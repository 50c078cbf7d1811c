"""A small scalar expression language for objective functions.

Grammar (see docs/expression-grammar.ebnf for the shipped EBNF)::

    expr    = term { ("+"|"-") term }
    term    = factor { ("*"|"/") factor }
    factor  = "-" factor | power
    power   = atom [ "^" factor ]          # right-associative
    atom    = NUMBER
            | "x" DIGITS                   # variable x1 .. xn
            | "x" "(" expr ")"             # computed index, e.g. x(k+1)
            | FUNC "(" expr ")"            # sin cos exp ln abs
            | "sum" "(" NAME "," INT "," INT "," expr ")"
            | NAME                         # loop variable in scope
            | "(" expr ")"

Precedence: ^ binds tighter than unary minus, which binds tighter than
* and /, which bind tighter than + and -.  Power is right-associative.
Angles are radians; ln is the natural logarithm.

Computed indices may only use loop variables, integer literals, +, -, *
and unary minus; they are range-checked against the declared dimension
at parse time by enumerating the (literal, bounded) loop ranges.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EvalDomainError, ExprParseError

FUNCTIONS = ("sin", "cos", "exp", "ln", "abs")

_SCALAR_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "abs": abs,
}
_VECTOR_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
}


class _VecFault(Exception):
    """Internal: a vectorized operation faulted at the masked points."""

    def __init__(self, mask):
        self.mask = mask


# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base node.  Trees are immutable and safe to share across threads."""

    def _sval(self, xs, env) -> float:
        raise NotImplementedError

    def _vval(self, X, env):
        raise NotImplementedError

    def _render(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def _sval(self, xs, env):
        return self.value

    def _vval(self, X, env):
        return self.value

    def _render(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based

    def _sval(self, xs, env):
        return xs[self.index - 1]

    def _vval(self, X, env):
        return X[:, self.index - 1]

    def _render(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class IndexedVar(Expr):
    index: Expr
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def _sval(self, xs, env):
        return xs[_index_value(self.index, env) - 1]

    def _vval(self, X, env):
        return X[:, _index_value(self.index, env) - 1]

    def _render(self):
        return f"x({self.index._render()})"


@dataclass(frozen=True)
class Name(Expr):
    """Reference to an enclosing sum's loop variable."""

    name: str

    def _sval(self, xs, env):
        return float(env[self.name])

    def _vval(self, X, env):
        return float(env[self.name])

    def _render(self):
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def _sval(self, xs, env):
        return -self.arg._sval(xs, env)

    def _vval(self, X, env):
        return -self.arg._vval(X, env)

    def _render(self):
        return f"(-{self.arg._render()})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * / ^
    lhs: Expr
    rhs: Expr

    def _sval(self, xs, env):
        a = self.lhs._sval(xs, env)
        b = self.rhs._sval(xs, env)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                raise EvalDomainError("division by zero", xs)
            return a / b
        # power
        if a < 0.0 and not float(b).is_integer():
            raise EvalDomainError("fractional power of negative base", xs)
        if a == 0.0 and b < 0.0:
            raise EvalDomainError("zero raised to a negative power", xs)
        try:
            r = a**b
        except OverflowError:
            raise EvalDomainError("power overflow", xs) from None
        if math.isinf(r):
            raise EvalDomainError("power overflow", xs)
        return r

    def _vval(self, X, env):
        a = self.lhs._vval(X, env)
        b = self.rhs._vval(X, env)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            bad = np.equal(b, 0.0)
            if np.any(bad):
                shape = np.broadcast_shapes(np.shape(a), np.shape(b))
                raise _VecFault(np.broadcast_to(bad, shape))
            return a / b
        bb = np.asarray(b, dtype=float)
        aa = np.asarray(a, dtype=float)
        bad = (aa < 0.0) & (bb != np.floor(bb)) | ((aa == 0.0) & (bb < 0.0))
        if np.any(bad):
            raise _VecFault(np.broadcast_to(bad, np.broadcast_shapes(aa.shape, bb.shape)))
        r = aa**bb
        finite = np.isfinite(r)
        if not np.all(finite):
            raise _VecFault(~finite)
        return r

    def _render(self):
        return f"({self.lhs._render()} {self.op} {self.rhs._render()})"


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def _sval(self, xs, env):
        v = self.arg._sval(xs, env)
        if self.fn == "ln":
            if v <= 0.0:
                raise EvalDomainError("ln of non-positive value", xs)
            return math.log(v)
        try:
            return _SCALAR_FUNCS[self.fn](v)
        except OverflowError:
            raise EvalDomainError(f"{self.fn} overflow", xs) from None

    def _vval(self, X, env):
        v = self.arg._vval(X, env)
        if self.fn == "ln":
            vv = np.asarray(v, dtype=float)
            bad = vv <= 0.0
            if np.any(bad):
                raise _VecFault(bad)
            return np.log(vv)
        r = _VECTOR_FUNCS[self.fn](v)
        finite = np.isfinite(r)
        if not np.all(finite):
            raise _VecFault(~np.asarray(finite))
        return r

    def _render(self):
        return f"{self.fn}({self.arg._render()})"


@dataclass(frozen=True)
class Sum(Expr):
    var: str
    lo: int
    hi: int
    body: Expr

    def _sval(self, xs, env):
        total = 0.0
        env = dict(env)
        for k in range(self.lo, self.hi + 1):
            env[self.var] = k
            total += self.body._sval(xs, env)
        return total

    def _vval(self, X, env):
        total = 0.0
        env = dict(env)
        for k in range(self.lo, self.hi + 1):
            env[self.var] = k
            total = total + self.body._vval(X, env)
        return total

    def _render(self):
        return f"sum({self.var}, {self.lo}, {self.hi}, {self.body._render()})"


def _index_value(node: Expr, env) -> int:
    """Evaluate a computed-index expression to an int (integer arithmetic only)."""
    if isinstance(node, Num):
        return int(node.value)
    if isinstance(node, Name):
        return int(env[node.name])
    if isinstance(node, Neg):
        return -_index_value(node.arg, env)
    if isinstance(node, BinOp):
        a = _index_value(node.lhs, env)
        b = _index_value(node.rhs, env)
        return a + b if node.op == "+" else a - b if node.op == "-" else a * b
    raise AssertionError("index expression not integer arithmetic")


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[()+\-*/^,])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        c = src[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ExprParseError(f"unexpected character {c!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        tokens.append(_Token(kind, text, line, col))
        col += len(text)
        i = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


_VAR_RE = re.compile(r"^x(\d+)$")


class _Parser:
    def __init__(self, tokens: list[_Token], n: int):
        self.tokens = tokens
        self.pos = 0
        self.n = n
        self.scopes: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ExprParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}")
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        if self.peek().text == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expr:
        node = self.parse_atom()
        if self.peek().text == "^":
            self.advance()
            node = BinOp("^", node, self.parse_factor())
        return node

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.text == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "name":
            return self.parse_name()
        self.fail(f"unexpected {tok.text!r}" if tok.text else "unexpected end of input", tok)

    def parse_name(self) -> Expr:
        tok = self.advance()
        name = tok.text
        var = _VAR_RE.match(name)
        if var:
            index = int(var.group(1))
            if not 1 <= index <= self.n:
                self.fail(
                    f"variable x{index} is out of range for dimension {self.n}", tok
                )
            return Var(index)
        if name == "x":
            self.expect("(")
            index = self.parse_expr()
            close = self.expect(")")
            self.check_index_expr(index, tok)
            return IndexedVar(index, pos=(tok.line, tok.col))
        if name in FUNCTIONS:
            self.expect("(")
            arg = self.parse_expr()
            self.expect(")")
            return Call(name, arg)
        if name == "sum":
            return self.parse_sum(tok)
        if name in self.scopes:
            return Name(name)
        self.fail(f"unknown identifier {name!r}", tok)

    def parse_sum(self, tok: _Token) -> Expr:
        self.expect("(")
        var_tok = self.advance()
        if var_tok.kind != "name":
            self.fail("sum needs a loop variable name", var_tok)
        var = var_tok.text
        if var == "x" or var in FUNCTIONS or var == "sum" or _VAR_RE.match(var):
            self.fail(f"loop variable {var!r} shadows a reserved name", var_tok)
        if var in self.scopes:
            self.fail(f"loop variable {var!r} is already in scope", var_tok)
        self.expect(",")
        lo = self.parse_int_literal()
        self.expect(",")
        hi = self.parse_int_literal()
        if lo > hi:
            self.fail(f"sum bounds must satisfy lo <= hi, got {lo} > {hi}", tok)
        self.expect(",")
        self.scopes.append(var)
        body = self.parse_expr()
        self.scopes.pop()
        self.expect(")")
        return Sum(var, lo, hi, body)

    def parse_int_literal(self) -> int:
        negate = False
        if self.peek().text == "-":
            self.advance()
            negate = True
        tok = self.peek()
        if tok.kind != "num" or not float(tok.text).is_integer():
            self.fail("sum bounds must be integer literals", tok)
        self.advance()
        value = int(float(tok.text))
        return -value if negate else value

    def check_index_expr(self, node: Expr, tok: _Token):
        """Computed indices may only use integer arithmetic over loop vars."""
        if isinstance(node, Num):
            if not float(node.value).is_integer():
                self.fail("variable index must be an integer", tok)
            return
        if isinstance(node, Name):
            return
        if isinstance(node, Neg):
            self.check_index_expr(node.arg, tok)
            return
        if isinstance(node, BinOp) and node.op in ("+", "-", "*"):
            self.check_index_expr(node.lhs, tok)
            self.check_index_expr(node.rhs, tok)
            return
        self.fail("variable index must use integer arithmetic over loop variables", tok)


def _check_index_ranges(node: Expr, n: int, scopes: dict[str, range]):
    """Range-check every computed index by enumerating loop assignments."""
    if isinstance(node, IndexedVar):
        names = sorted(scopes)
        for combo in itertools.product(*(scopes[name] for name in names)):
            env = dict(zip(names, combo))
            idx = _index_value(node.index, env)
            if not 1 <= idx <= n:
                line, col = node.pos
                raise ExprParseError(
                    f"computed index evaluates to {idx}, outside 1..{n}", line, col
                )
        _check_index_ranges(node.index, n, scopes)
    elif isinstance(node, Neg):
        _check_index_ranges(node.arg, n, scopes)
    elif isinstance(node, BinOp):
        _check_index_ranges(node.lhs, n, scopes)
        _check_index_ranges(node.rhs, n, scopes)
    elif isinstance(node, Call):
        _check_index_ranges(node.arg, n, scopes)
    elif isinstance(node, Sum):
        inner = dict(scopes)
        inner[node.var] = range(node.lo, node.hi + 1)
        _check_index_ranges(node.body, n, inner)


def parse(src: str, n: int) -> Expr:
    """Parse ``src`` into an expression over x1..xn.

    Raises :class:`ExprParseError` (with line/column) on syntax errors,
    unknown identifiers and out-of-range variable indices.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    parser = _Parser(_tokenize(src), n)
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        parser.fail(f"unexpected trailing {tok.text!r}", tok)
    _check_index_ranges(node, n, {})
    return node


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(expr: Expr, x) -> float:
    """Evaluate at a single point (len(x) must cover every index used).

    Raises :class:`EvalDomainError` carrying the point on domain faults.
    """
    xs = [float(v) for v in x]
    return float(expr._sval(xs, {}))


def evaluate_many(expr: Expr, X) -> np.ndarray:
    """Evaluate at each row of ``X`` (N x n), vectorized.

    Domain faults are reported through the same :class:`EvalDomainError`
    as :func:`evaluate`, pinned to the first offending row.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-D (points by coordinates)")
    try:
        with np.errstate(all="ignore"):
            value = expr._vval(X, {})
    except _VecFault as fault:
        mask = np.asarray(fault.mask)
        bad = int(np.argmax(mask)) if mask.ndim else 0
        evaluate(expr, X[bad])  # raises the precise structured error
        raise AssertionError("vector fault not reproduced at scalar point")
    return np.broadcast_to(np.asarray(value, dtype=float), (X.shape[0],)).copy()


def render(expr: Expr) -> str:
    """Text form that re-parses to an equivalent expression."""
    return expr._render()
