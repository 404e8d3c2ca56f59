"""Parsing and the ASCII expression grammar.

One tokenizer and Pratt core serve two front ends:

* ``parse_operator`` evaluates text directly in an operator algebra,
  honoring noncommutativity -- ``Dr*r`` comes out as ``r*Dr + 1``.
* ``parse_expression`` builds a plain syntax tree (numbers, symbols,
  arithmetic, function calls) for the closed-form input language.

Numbers are integers; rationals are formed with ``/``.  Multiplication
is always explicit, ``^`` is exponentiation (right-associative), and
function arguments are comma-separated.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .ore import OrePolynomial
from .polys import Rat

# -- expression AST ---------------------------------------------------


class Expr:
    __slots__ = ()


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    def __hash__(self):
        return hash(("Num", self.value))

    def __repr__(self):
        return f"Num({self.value})"


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Sym) and self.name == other.name

    def __hash__(self):
        return hash(("Sym", self.name))

    def __repr__(self):
        return f"Sym({self.name})"


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        self.args = tuple(args)

    def __eq__(self, other):
        return isinstance(other, Add) and self.args == other.args

    def __hash__(self):
        return hash(("Add", self.args))

    def __repr__(self):
        return f"Add{self.args!r}"


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        self.args = tuple(args)

    def __eq__(self, other):
        return isinstance(other, Mul) and self.args == other.args

    def __hash__(self):
        return hash(("Mul", self.args))

    def __repr__(self):
        return f"Mul{self.args!r}"


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        self.base = base
        self.exponent = exponent

    def __eq__(self, other):
        return (isinstance(other, Pow) and self.base == other.base
                and self.exponent == other.exponent)

    def __hash__(self):
        return hash(("Pow", self.base, self.exponent))

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exponent!r})"


class Call(Expr):
    __slots__ = ("func", "args")

    def __init__(self, func, args):
        self.func = func
        self.args = tuple(args)

    def __eq__(self, other):
        return (isinstance(other, Call) and self.func == other.func
                and self.args == other.args)

    def __hash__(self):
        return hash(("Call", self.func, self.args))

    def __repr__(self):
        return f"Call({self.func}, {self.args!r})"


def expr_to_text(e):
    return _fmt(e, 0)


def _fmt(e, prec):
    if isinstance(e, Num):
        s = str(e.value)
        return f"({s})" if (e.value < 0 or e.value.denominator != 1) and prec >= 40 else s
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Add):
        s = " + ".join(_fmt(a, 30) for a in e.args).replace("+ -", "- ")
        return f"({s})" if prec > 30 else s
    if isinstance(e, Mul):
        s = "*".join(_fmt(a, 40) for a in e.args)
        return f"({s})" if prec > 40 else s
    if isinstance(e, Pow):
        return f"{_fmt(e.base, 50)}^{_fmt(e.exponent, 50)}"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(_fmt(a, 0) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- tokenizer --------------------------------------------------------

_PUNCT = {"+", "-", "*", "/", "^", "(", ")", ","}


def tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and (text[j].isalpha() or text[j] == "_"):
                raise ParseError("number runs into a name; use explicit '*'",
                                 position=j)
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", position=i)
    tokens.append(("end", None, n))
    return tokens


# -- Pratt core -------------------------------------------------------

_BIN_PREC = {"+": 30, "-": 30, "*": 40, "/": 40, "^": 50}
_UNARY_PREC = 35  # binds tighter than +/- but looser than * and ^


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}",
                             position=tok[2])
        return tok

    def parse(self, prec=0):
        node = self.nud()
        while True:
            kind, _, _ = self.peek()
            p = _BIN_PREC.get(kind)
            if p is None or p <= prec:
                break
            if kind == "^":
                # right-associative
                self.next()
                node = ("^", node, self.parse(p - 1))
            else:
                self.next()
                node = (kind, node, self.parse(p))
        return node

    def nud(self):
        kind, val, pos = self.next()
        if kind == "int":
            return ("int", val)
        if kind == "name":
            if self.peek()[0] == "(":
                self.next()
                args = []
                if self.peek()[0] != ")":
                    args.append(self.parse(0))
                    while self.peek()[0] == ",":
                        self.next()
                        args.append(self.parse(0))
                self.expect(")")
                return ("call", val, args)
            return ("sym", val)
        if kind == "(":
            node = self.parse(0)
            self.expect(")")
            return node
        if kind == "-":
            return ("neg", self.parse(_UNARY_PREC))
        if kind == "+":
            return self.parse(_UNARY_PREC)
        raise ParseError(f"unexpected token {val!r}", position=pos)


def _parse_tree(text):
    parser = _Parser(tokenize(text))
    node = parser.parse(0)
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input starting at {val!r}", position=pos)
    return node


# -- expression front end ---------------------------------------------


def parse_expression(text):
    return _to_expr(_parse_tree(text))


def _to_expr(node):
    tag = node[0]
    if tag == "int":
        return Num(node[1])
    if tag == "sym":
        return Sym(node[1])
    if tag == "call":
        return Call(node[1], [_to_expr(a) for a in node[2]])
    if tag == "neg":
        inner = _to_expr(node[1])
        if isinstance(inner, Num):
            return Num(-inner.value)
        return Mul((Num(-1), inner))
    if tag == "+":
        return Add((_to_expr(node[1]), _to_expr(node[2])))
    if tag == "-":
        return Add((_to_expr(node[1]), Mul((Num(-1), _to_expr(node[2])))))
    if tag == "*":
        return Mul((_to_expr(node[1]), _to_expr(node[2])))
    if tag == "/":
        return Mul((_to_expr(node[1]), Pow(_to_expr(node[2]), Num(-1))))
    if tag == "^":
        return Pow(_to_expr(node[1]), _to_expr(node[2]))
    raise ParseError(f"unsupported construct {tag!r}")


# -- operator front end -----------------------------------------------


def parse_operator(text, algebra):
    """Evaluate text in the algebra, honoring noncommutative products."""
    return _to_op(_parse_tree(text), algebra)


def _coeff_of(op):
    """The Rat behind a generator-free operator, or None."""
    if op.is_zero():
        return Rat.zero(op.algebra.table)
    if op.order() > 0:
        return None
    return next(iter(op.terms.values()))


def _to_op(node, algebra):
    tag = node[0]
    if tag == "int":
        return algebra.const(node[1])
    if tag == "sym":
        name = node[1]
        if name in algebra._gen_index:
            return algebra.gen(name)
        if name in algebra.table:
            return algebra.coeff_var(name)
        raise ParseError(f"unknown symbol {name!r} in this algebra")
    if tag == "call":
        raise ParseError(f"function {node[1]!r} is not allowed in operator text")
    if tag == "neg":
        return -_to_op(node[1], algebra)
    if tag == "+":
        return _to_op(node[1], algebra) + _to_op(node[2], algebra)
    if tag == "-":
        return _to_op(node[1], algebra) - _to_op(node[2], algebra)
    if tag == "*":
        return _to_op(node[1], algebra) * _to_op(node[2], algebra)
    if tag == "/":
        num = _to_op(node[1], algebra)
        den = _to_op(node[2], algebra)
        c = _coeff_of(den)
        if c is None:
            raise ParseError("division by an operator is not defined")
        if c.is_zero():
            raise ParseError("division by zero")
        return num.scale(c.inverse())
    if tag == "^":
        base = _to_op(node[1], algebra)
        exp = _to_op(node[2], algebra)
        c = _coeff_of(exp)
        if c is None or not c.is_constant():
            raise ParseError("exponent must be an integer")
        k = c.constant_value()
        if k.denominator != 1:
            raise ParseError("exponent must be an integer")
        k = int(k)
        if k < 0:
            bc = _coeff_of(base)
            if bc is None:
                raise ParseError("negative power of an operator is not defined")
            return algebra.const(bc ** k)
        out = algebra.one()
        for _ in range(k):
            out = out * base
        return out
    raise ParseError(f"unsupported construct {tag!r}")
