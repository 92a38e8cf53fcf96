"""Expression strings <-> :class:`RatFunc`.

Grammar (no implicit multiplication; exponents are unsigned integer literals)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' int)?
    base   := int | ident | '(' expr ')'

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  Fractions
are written with the division operator (``2/3*x``).  The flow parameter
``t`` and its shifted copy ``tp`` are accepted only in flow mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .arith import TIME_VARS, MPoly, RatFunc, VarContext

GRAMMAR = __doc__.split("::", 1)[1].split("``^``", 1)[0].strip("\n")
MAX_DEPTH = 128  # each level costs ~5 Python frames
MAX_EXPONENT = 4096

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))", re.S)


class ParseError(ValueError):
    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {position}: expected {expected}, found {found!r}")


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


_BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div}


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(m.start(3), "an operator, number or identifier", ch)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, allowed):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allowed = allowed
        self.depth = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, expected):
        kind, text, pos = self.tok
        raise ParseError(pos, expected, text if kind != "end" else "end of input")

    def take(self, kind):
        if self.tok[0] != kind:
            self.fail(repr(kind))
        self.i += 1

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail(f"nesting depth at most {MAX_DEPTH}")

    def expr(self):
        node = self.term()
        while self.tok[0] in ("+", "-"):
            op = self.tok[0]
            self.i += 1
            node = _BINARY[op](node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[0] in ("*", "/"):
            op = self.tok[0]
            self.i += 1
            node = _BINARY[op](node, self.unary())
        return node

    def unary(self):
        if self.tok[0] == "-":
            self.i += 1
            self.enter()
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.factor()

    def factor(self):
        node = self.base()
        if self.tok[0] == "^":
            self.i += 1
            if self.tok[0] != "int":
                self.fail("a non-negative integer exponent")
            node = Pow(node, int(self.tok[1]))
            self.i += 1
        return node

    def base(self):
        kind, text, pos = self.tok
        if kind == "int":
            self.i += 1
            return Num(int(text))
        if kind == "ident":
            if text not in self.allowed:
                if text in TIME_VARS:
                    raise ParseError(pos, "a declared variable (t/tp only in flow mode)", text)
                raise ParseError(pos, "a declared variable", text)
            self.i += 1
            return Var(text)
        if kind == "(":
            self.i += 1
            self.enter()
            node = self.expr()
            self.depth -= 1
            self.take(")")
            return node
        self.fail("a number, variable or '('")


def parse(text: str, ctx: VarContext, mode: str = "plain"):
    """Parse ``text`` into an expression tree over ``ctx`` (plus t, tp in flow mode)."""
    if mode not in ("plain", "flow"):
        raise ValueError(f"unknown parse mode {mode!r}")
    allowed = set(ctx.base.names)
    if mode == "flow":
        allowed.update(TIME_VARS)
    p = _Parser(text, allowed)
    if p.tok[0] == "end":
        p.fail("an expression")
    try:
        node = p.expr()
    except RecursionError:
        # Only reachable when the caller already sits deep in the stack.
        p.fail(f"nesting depth at most {MAX_DEPTH}")
    if p.tok[0] != "end":
        p.fail("an operator or end of input")
    return node


def _children(node):
    if isinstance(node, (Add, Sub, Mul, Div)):
        return (node.left, node.right)
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, Pow):
        return (node.base,)
    return ()


def evaluate(node, ctx: VarContext) -> RatFunc:
    """Evaluate an expression tree to an exact element over ``ctx``.

    Iterative post-order, so long operator chains do not hit the recursion limit.
    """
    stack = [(node, False)]
    values = []
    while stack:
        cur, done = stack.pop()
        kids = _children(cur)
        if not done and kids:
            stack.append((cur, True))
            for k in reversed(kids):
                stack.append((k, False))
            continue
        if isinstance(cur, Num):
            values.append(RatFunc.const(ctx, cur.value))
        elif isinstance(cur, Var):
            try:
                values.append(RatFunc.var(ctx, cur.name))
            except KeyError:
                raise EvalError(f"variable {cur.name!r} is not bound here") from None
        elif isinstance(cur, Neg):
            values.append(-values.pop())
        elif isinstance(cur, Pow):
            if cur.exponent > MAX_EXPONENT:
                raise EvalError(f"exponent {cur.exponent} exceeds {MAX_EXPONENT}")
            values.append(values.pop() ** cur.exponent)
        else:
            right, left = values.pop(), values.pop()
            if isinstance(cur, Add):
                values.append(left + right)
            elif isinstance(cur, Sub):
                values.append(left - right)
            elif isinstance(cur, Mul):
                values.append(left * right)
            else:
                if right.is_zero():
                    raise EvalError("division by an expression equal to zero")
                values.append(left / right)
    return values[0]


eval_ast = evaluate


def _uses_tp(node):
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var) and cur.name == "tp":
            return True
        stack.extend(_children(cur))
    return False


def parse_expr(text: str, ctx: VarContext, mode: str = "plain") -> RatFunc:
    """Parse and evaluate.  Flow-mode values live over ``ctx.with_time()``."""
    node = parse(text, ctx, mode)
    if mode == "flow":
        target = ctx.base.with_time(2 if _uses_tp(node) else 1)
    else:
        target = ctx.base
    return evaluate(node, target)


# --- rendering -------------------------------------------------------------------


def _monomial(names, e):
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def _coeff(c: Fraction):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly(p: MPoly):
    if p.is_zero():
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        mono = _monomial(p.ctx.names, e)
        mag = abs(c)
        if not mono:
            body = _coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coeff(mag)}*{mono}"
        if i == 0:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)


def _is_atom(p: MPoly):
    """True when the printed polynomial parses as a single factor."""
    if len(p.terms) != 1:
        return False
    (e, c), = p.terms.items()
    nonzero = [k for k in e if k]
    if not nonzero:
        return c > 0 and c.denominator == 1
    return c == 1 and len(nonzero) == 1


def render(f: RatFunc) -> str:
    """Canonical string of the fully reduced form; equal values render identically."""
    f = f.reduced(full=True)
    num = _poly(f.num)
    if f.den == 1:
        return num
    if len(f.num.terms) > 1:
        num = f"({num})"
    den = _poly(f.den)
    if not _is_atom(f.den):
        den = f"({den})"
    return f"{num}/{den}"
