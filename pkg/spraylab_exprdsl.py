#!/usr/bin/env python3
"""
Expression DSL for spray fields

Grammar (whitespace insignificant):
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' power)?          exponent must be a nonnegative integer literal
    atom   := NUMBER | VAR | FUNC '(' expr ')' | 'norm' '(' ')' | '(' expr ')'

Variables are y1..yq. The chart dialect (parse(..., chart_dim=d)) adds x1..xd and
sin/cos/tan/cot, whose arguments may not involve y.
"""

import math
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

from spraylab_errors import (
    EvaluationDomainError,
    ExprSyntaxError,
    InvalidInputError,
    UnknownIdentifierError,
    VariableRangeError,
)

UNARY_FUNCTIONS = ('sqrt', 'abs')
CHART_FUNCTIONS = ('sin', 'cos', 'tan', 'cot')


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str  # 'y' or 'x'
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: 'Expr'


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'


@dataclass(frozen=True)
class Pow:
    base: 'Expr'
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: 'Expr'


@dataclass(frozen=True)
class Norm:
    pass


Expr = Union[Num, Var, Neg, BinOp, Pow, Call, Norm]

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_VAR_RE = re.compile(r'([xy])(\d+)$')


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode('utf-8'))


def _tokenize(src: str) -> Iterator[_Token]:
    pos = 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if not match:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", _byte_offset(src, pos), src)
        if match.lastgroup != 'ws':
            yield _Token(match.lastgroup, match.group(), pos)
        pos = match.end()
    yield _Token('end', '', len(src))


class _Parser:
    """Recursive descent over the token list"""

    def __init__(self, src: str, q: int, chart_dim: Optional[int]):
        self.src = src
        self.q = q
        self.chart_dim = chart_dim
        self.tokens = list(_tokenize(src))
        self.i = 0

    @property
    def token(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, token: Optional[_Token] = None, cls=ExprSyntaxError):
        token = token or self.token
        return cls(message, _byte_offset(self.src, token.pos), self.src)

    def advance(self) -> _Token:
        tok = self.token
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        if self.token.text != text or self.token.kind == 'end':
            found = self.token.text or 'end of input'
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self) -> Expr:
        if self.token.kind == 'end':
            raise self.error("empty expression")
        expr = self.expr()
        if self.token.kind != 'end':
            raise self.error(f"unexpected {self.token.text!r}")
        return expr

    def expr(self) -> Expr:
        left = self.term()
        while self.token.text in ('+', '-'):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.token.text in ('*', '/'):
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.token.text == '-':
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.token.text != '^':
            return base
        self.advance()
        exp_token = self.token
        exponent = self.power()
        if not isinstance(exponent, Num) or exp_token.kind != 'num' or not _is_int_literal(exp_token.text):
            raise self.error("exponent must be a nonnegative integer literal", exp_token)
        return Pow(base, int(exponent.value))

    def atom(self) -> Expr:
        tok = self.token
        if tok.kind == 'num':
            value = float(tok.text)
            if not math.isfinite(value):
                raise self.error(f"numeric literal {tok.text!r} overflows to {value}", tok)
            self.advance()
            return Num(value)
        if tok.text == '(':
            self.advance()
            inner = self.expr()
            self.expect(')')
            return inner
        if tok.kind == 'ident':
            return self.identifier()
        found = tok.text or 'end of input'
        raise self.error(f"unexpected {found!r}")

    def identifier(self) -> Expr:
        tok = self.advance()
        name = tok.text
        var = _VAR_RE.match(name)
        if var:
            kind, index = var.group(1), int(var.group(2))
            if kind == 'x' and self.chart_dim is None:
                raise self.error(f"unknown identifier {name!r}", tok, UnknownIdentifierError)
            limit = self.q if kind == 'y' else self.chart_dim
            if not 1 <= index <= limit:
                raise self.error(f"variable {name} out of range 1..{limit}", tok, VariableRangeError)
            return Var(kind, index)
        if name == 'norm':
            self.expect('(')
            self.expect(')')
            return Norm()
        if name in UNARY_FUNCTIONS or (name in CHART_FUNCTIONS and self.chart_dim is not None):
            self.expect('(')
            arg_token = self.token
            arg = self.expr()
            self.expect(')')
            if name in CHART_FUNCTIONS and depends_on_y(arg):
                raise self.error(f"{name}() argument may not involve y", arg_token)
            return Call(name, arg)
        raise self.error(f"unknown identifier {name!r}", tok, UnknownIdentifierError)


def _is_int_literal(text: str) -> bool:
    return text.isdigit()


def parse(src: str, q: int, chart_dim: Optional[int] = None) -> Expr:
    """Parse src into an Expr over y1..yq (and x1..x_chart_dim in the chart dialect)"""
    if not isinstance(src, str):
        raise InvalidInputError(f"expression must be a string, got {type(src).__name__}")
    if q < 1:
        raise InvalidInputError(f"dimension must be positive, got {q}")
    return _Parser(src, q, chart_dim).parse()


def pretty(e: Expr) -> str:
    """Canonical fully parenthesized text; parse(pretty(e)) == e"""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return f"{e.kind}{e.index}"
    if isinstance(e, Norm):
        return "norm()"
    if isinstance(e, Neg):
        return f"(-{pretty(e.operand)})"
    if isinstance(e, BinOp):
        return f"({pretty(e.left)} {e.op} {pretty(e.right)})"
    if isinstance(e, Pow):
        return f"({pretty(e.base)} ^ {e.exponent})"
    if isinstance(e, Call):
        return f"{e.func}({pretty(e.arg)})"
    raise InvalidInputError(f"not an expression node: {e!r}")


def variables(e: Expr) -> Set[Tuple[str, int]]:
    if isinstance(e, Var):
        return {(e.kind, e.index)}
    if isinstance(e, Norm):
        return {('y', 0)}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Pow):
        return variables(e.base)
    if isinstance(e, Call):
        return variables(e.arg)
    return set()


def depends_on_y(e: Expr) -> bool:
    return any(kind == 'y' for kind, _ in variables(e))


def evaluate(e: Expr, y: Sequence[float], x: Optional[Sequence[float]] = None) -> float:
    """Double-precision evaluation; domain violations raise EvaluationDomainError"""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        values = y if e.kind == 'y' else x
        if values is None or e.index > len(values):
            raise InvalidInputError(f"no value for {e.kind}{e.index}")
        return float(values[e.index - 1])
    if isinstance(e, Norm):
        return math.sqrt(sum(float(v) * float(v) for v in y))
    if isinstance(e, Neg):
        return -evaluate(e.operand, y, x)
    if isinstance(e, BinOp):
        left = evaluate(e.left, y, x)
        right = evaluate(e.right, y, x)
        if e.op == '+':
            return left + right
        if e.op == '-':
            return left - right
        if e.op == '*':
            return left * right
        if right == 0.0:
            raise EvaluationDomainError("division by zero", pretty(e))
        return left / right
    if isinstance(e, Pow):
        base = evaluate(e.base, y, x)
        try:
            return base ** float(e.exponent)
        except OverflowError:
            sign = -1.0 if (base < 0 and e.exponent % 2 == 1) else 1.0
            return sign * math.inf
    if isinstance(e, Call):
        arg = evaluate(e.arg, y, x)
        if e.func == 'sqrt':
            if arg < 0.0:
                raise EvaluationDomainError("sqrt of negative value", pretty(e))
            return math.sqrt(arg)
        if e.func == 'abs':
            return abs(arg)
        if e.func == 'sin':
            return math.sin(arg)
        if e.func == 'cos':
            return math.cos(arg)
        if e.func == 'tan':
            return math.tan(arg)
        if e.func == 'cot':
            s = math.sin(arg)
            if s == 0.0:
                raise EvaluationDomainError("cot at a multiple of pi", pretty(e))
            return math.cos(arg) / s
    raise InvalidInputError(f"not an expression node: {e!r}")


def parse_all(sources: Sequence[str], q: int, chart_dim: Optional[int] = None) -> Tuple[List[Expr], List[str]]:
    """Parse several sources, collecting every error instead of stopping at the first"""
    parsed, errors = [], []
    for pos, src in enumerate(sources):
        try:
            parsed.append(parse(src, q, chart_dim))
        except InvalidInputError as e:
            errors.append(f"expression [{pos}] {src!r}: {e}")
    return parsed, errors


def main():
    """Evaluate an expression from the command line: spraylab_exprdsl.py EXPR y1,y2,..."""
    import sys
    if len(sys.argv) != 3:
        print("usage: spraylab_exprdsl.py EXPR y1,y2,...")
        return 2
    y = [float(v) for v in sys.argv[2].split(',')]
    try:
        expr = parse(sys.argv[1], len(y))
        print(f"{pretty(expr)} = {evaluate(expr, y)!r}")
    except (InvalidInputError, EvaluationDomainError) as e:
        print(f"[X] {e}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
