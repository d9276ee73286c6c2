"""Text grammar for polynomials, forms and Weyl elements.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | wedge | <juxtaposition>) unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | 'd' '(' expr ')' | '(' expr ')'

Names are ring variables (``x1``, ``y2``, ``x1'``, ``ξ1'`` / ``xi1'``),
``h``, or differentials ``dx1``.  Wedge is ``∧``, ``&`` or ``wedge``.
Unicode minus is accepted.  Parsing produces a small AST that is then
evaluated against a concrete algebra, so the same grammar serves both the
commutative rings and the noncommutative Weyl algebra.
"""

from __future__ import annotations

import re

from .errors import ParseError

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-zξ][A-Za-z0-9_]*'?)
  | (?P<op>[-+*/^()&∧−])
""", re.VERBOSE)


def normalize_name(name: str) -> str:
    if name.startswith("xi") and len(name) > 2 and name[2].isdigit():
        return "ξ" + name[2:]
    return name


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "op" and val == "−":
            val = "-"
        if kind == "op" and val in "&∧":
            kind, val = "op", "wedge"
        if kind == "name" and val == "wedge":
            kind = "op"
        if kind != "ws":
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        kind, v, pos = self.take()
        if v != val:
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def _starts_atom(self):
        kind, v, _ = self.peek()
        return kind in ("int", "name") or v == "("

    def term(self):
        node = self.unary()
        while True:
            kind, v, _ = self.peek()
            if v in ("*", "/", "wedge"):
                self.take()
                node = (v, node, self.unary())
            elif self._starts_atom():
                node = ("*", node, self.unary())
            else:
                return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, v, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer", pos)
            node = ("pow", node, sign * int(v))
        return node

    def atom(self):
        kind, v, pos = self.take()
        if kind == "int":
            return ("num", int(v))
        if kind == "name":
            if v == "d" and self.peek()[1] == "(":
                self.take()
                inner = self.expr()
                self.expect(")")
                return ("d", inner)
            return ("name", normalize_name(v), pos)
        if v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)


def parse(text: str):
    return _Parser(text).parse()


def evaluate(node, ev):
    """Fold an AST with an evaluator object (see :class:`FormEvaluator`)."""
    tag = node[0]
    if tag == "num":
        return ev.num(node[1])
    if tag == "name":
        return ev.name(node[1], node[2])
    if tag == "d":
        return ev.d(evaluate(node[1], ev))
    if tag == "neg":
        return ev.neg(evaluate(node[1], ev))
    if tag == "pow":
        return ev.pow(evaluate(node[1], ev), node[2])
    a, b = evaluate(node[1], ev), evaluate(node[2], ev)
    return {"+": ev.add, "-": ev.sub, "*": ev.mul, "/": ev.div, "wedge": ev.wedge}[tag](a, b)


class FormEvaluator:
    """Evaluate into :class:`DiffForm` over a commutative ring."""

    def __init__(self, ring):
        from .forms import DiffForm
        self.ring = ring
        self.DiffForm = DiffForm

    def num(self, n):
        return self.DiffForm.function(self.ring.const(n))

    def name(self, name, pos):
        ring = self.ring
        if name == "h":
            if ring.N < 2:
                raise ParseError("h is not available (truncation N = 1)", pos)
            return self.DiffForm.function(ring.h())
        if name in ring.names:
            return self.DiffForm.function(ring.gen(name))
        if name.startswith("d") and name[1:] in ring.names:
            return self.DiffForm.dx(ring, ring.index(name[1:]))
        raise ParseError(f"unknown name {name!r}", pos)

    def d(self, a):
        from .forms import d
        return d(a)

    def neg(self, a):
        return -a

    def pow(self, a, k):
        if a.degree != 0:
            raise ParseError("only functions can be raised to powers", 0)
        return self.DiffForm.function(a.as_function() ** k)

    def add(self, a, b):
        if a.degree == 0 and not a:
            return b
        if b.degree == 0 and not b:
            return a
        return a + b

    def sub(self, a, b):
        return self.add(a, -b)

    def mul(self, a, b):
        return a.wedge(b)

    wedge = mul

    def div(self, a, b):
        if b.degree != 0:
            raise ParseError("cannot divide by a form", 0)
        return a.scale(b.as_function().inverse())


class WeylEvaluator:
    """Evaluate into the Weyl algebra; products keep their written order."""

    def __init__(self, alg):
        self.alg = alg

    def num(self, n):
        return self.alg.const(n)

    def name(self, name, pos):
        alg = self.alg
        if name == "h":
            return alg.h()
        if name in alg.names:
            i = alg.names.index(name)
            return alg.x(i) if i < alg.n else alg.y(i - alg.n)
        raise ParseError(f"unknown name {name!r}", pos)

    def d(self, a):
        raise ParseError("d() is not defined on the Weyl algebra", 0)

    def neg(self, a):
        return -a

    def pow(self, a, k):
        if k < 0:
            raise ParseError("negative powers are not defined in the Weyl algebra", 0)
        return a ** k

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def wedge(self, a, b):
        raise ParseError("wedge is not defined on the Weyl algebra", 0)

    def div(self, a, b):
        if b.y_degree() > 0 or any(any(k[0]) or k[2] for k in b.terms):
            raise ParseError("can only divide by nonzero constants", 0)
        c = b.scalar_part()
        if not c:
            raise ParseError("division by zero", 0)
        return a * pow(c, -1, self.alg.p)


def parse_weyl(text: str, alg):
    return evaluate(parse(text), WeylEvaluator(alg))


def parse_form(text: str, ring):
    return evaluate(parse(text), FormEvaluator(ring))


def parse_one_form(text: str, ring):
    """Like :func:`parse_form` but insists on degree 1 (``"0"`` is the zero form)."""
    f = parse_form(text, ring)
    if f.degree == 1:
        return f
    if f.degree == 0 and not f:
        return type(f).zero(ring, 1)
    raise ParseError(f"expected a 1-form, got degree {f.degree}", 0)


def parse_poly(text: str, ring):
    f = parse_form(text, ring)
    if f.degree != 0:
        raise ParseError("expected a function, got a form", 0)
    return f.as_function()


# printing

def _signed(c, p):
    return c if c <= p // 2 else c - p


def _var_power(name, a):
    base = f"({name})" if name.endswith("'") and a != 1 else name
    return base if a == 1 else f"{base}^{a}"


def format_monomial(names, exps, hpow):
    parts = []
    if hpow:
        parts.append("h" if hpow == 1 else f"h^{hpow}")
    for name, a in zip(names, exps):
        if a:
            parts.append(_var_power(name, a))
    return "*".join(parts)


def format_terms(items, names, p):
    """``items``: iterable of (exps, hpow, residue) already sorted."""
    out = ""
    for exps, hpow, c in items:
        c = _signed(c, p)
        mono = format_monomial(names, exps, hpow)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


def format_poly(f) -> str:
    ring = f.ring
    items = [(e[:-1], e[-1], c) for e, c in f.sorted_terms()]
    return format_terms(items, ring.names, ring.p)


def format_form(form) -> str:
    ring = form.ring
    if form.degree == 0:
        return format_poly(form.comp())
    pieces = []
    for idx in sorted(form.comps):
        dx = "∧".join("d" + ring.names[i] for i in idx)
        coeff = form.comps[idx]
        text = format_poly(coeff)
        if text == "1":
            pieces.append(dx)
        elif len(coeff.terms) == 1 and not text.startswith("-"):
            pieces.append(f"{text}*{dx}")
        else:
            pieces.append(f"({text})*{dx}")
    return " + ".join(pieces) or "0"
