"""Recursive-descent parser for the concrete formula syntax.

Grammar, loosest binding first::

    formula := disj ['->' formula]
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | ('forall' | 'exists') IDENT '.' formula | primary
    primary := '(' formula ')' | 'true' | 'false' | atom
    atom    := term ('=' | '!=') term | REL '(' term, ... ')'
    term    := IDENT | IDENT '(' term, ... ')' | '@' IDENT

A quantifier body extends as far right as possible.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional

from .structure import Signature
from .syntax import And, App, Const, Eq, Exists, Forall, Not, Or, Rel, Truth, Var


class ParseError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class FormulaSyntaxError(ParseError):
    pass


class UnknownSymbolError(ParseError):
    pass


class ArityError(ParseError):
    pass


class UnboundVariableError(ParseError):
    pass


KEYWORDS = {"forall", "exists", "true", "false"}

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<neq>!=)|(?P<punct>[()&|!=.,@])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        out.append((m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("<end>", len(text)))
    return out


class _Parser:
    def __init__(self, text, sig: Signature, free: Iterable[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.scope: list[str] = list(free)

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def ident(self):
        tok, pos = self.toks[self.i]
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) or tok in KEYWORDS:
            raise FormulaSyntaxError(f"expected identifier, found {tok!r}", pos)
        self.i += 1
        return tok

    def formula(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            right = self.formula()
            return Or(Not(left), right)
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            pos = self.pos()
            var = self.ident()
            if var in self.scope:
                raise FormulaSyntaxError(f"variable {var!r} is already bound here", pos)
            if var in self.sig.function_arity or var in self.sig.relation_arity:
                raise FormulaSyntaxError(f"variable {var!r} clashes with a signature symbol", pos)
            self.take(".")
            self.scope.append(var)
            body = self.formula()
            self.scope.pop()
            return (Forall if tok == "forall" else Exists)(var, body)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok in ("true", "false"):
            self.take()
            return Truth(tok == "true")
        return self.atom()

    def args(self):
        self.take("(")
        out = [self.term()]
        while self.peek() == ",":
            self.take()
            out.append(self.term())
        self.take(")")
        return tuple(out)

    def atom(self):
        pos = self.pos()
        if self.peek() != "@" and self.peek(1) == "(" and self.peek(2) != ")":
            name = self.ident()
            args = self.args()
            if self.peek() in ("=", "!="):
                left = self._app(name, args, pos)
                return self._equation(left)
            if name not in self.sig.relation_arity:
                if name in self.sig.function_arity:
                    raise FormulaSyntaxError(f"function term {name}(...) used as an atom", pos)
                raise UnknownSymbolError(f"unknown relation symbol {name!r}", pos)
            arity = self.sig.relation_arity[name]
            if arity != len(args):
                raise ArityError(f"{name} expects {arity} arguments, got {len(args)}", pos)
            return Rel(name, args)
        left = self.term()
        return self._equation(left)

    def _equation(self, left):
        tok = self.peek()
        if tok not in ("=", "!="):
            raise FormulaSyntaxError(f"expected '=' or '!=', found {tok!r}", self.pos())
        self.take()
        right = self.term()
        return Eq(left, right) if tok == "=" else Not(Eq(left, right))

    def _app(self, name, args, pos):
        if name not in self.sig.function_arity:
            raise UnknownSymbolError(f"unknown function symbol {name!r}", pos)
        arity = self.sig.function_arity[name]
        if arity != len(args):
            raise ArityError(f"{name} expects {arity} arguments, got {len(args)}", pos)
        return App(name, args)

    def term(self):
        pos = self.pos()
        if self.peek() == "@":
            self.take()
            return Const(self.ident())
        name = self.ident()
        if self.peek() == "(":
            return self._app(name, self.args(), pos)
        if name in self.scope:
            return Var(name)
        if name in self.sig.function_arity:
            return self._app(name, (), pos)
        if name in self.sig.relation_arity:
            raise FormulaSyntaxError(f"relation symbol {name!r} used as a term", pos)
        raise UnboundVariableError(f"unbound variable {name!r}", pos)


def parse_formula(text: str, sig: Signature, free: Optional[Iterable[str]] = None):
    """Parse ``text`` over ``sig``.

    ``free`` lists variables allowed to occur free; any other unbound
    identifier raises :class:`UnboundVariableError`.
    """
    p = _Parser(text, sig, free or ())
    f = p.formula()
    if p.peek() != "<end>":
        raise FormulaSyntaxError(f"unexpected {p.peek()!r}", p.pos())
    return f
