"""First-order formula trees, printing, quantifier rank and prenex conversion.

Implication is not a node type: the parser rewrites ``a -> b`` to ``!a | b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """A named element constant of the augmented language, written ``@name``."""

    name: str

    def __str__(self):
        return "@" + self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, Const, App]


# -- formulas --------------------------------------------------------------

@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Truth, Eq, Rel, Not, And, Or, Forall, Exists]
Quantifier = (Forall, Exists)
ATOMS = (Truth, Eq, Rel)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Truth(True)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Truth(False)
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# -- printing --------------------------------------------------------------

def to_text(f: Formula) -> str:
    """Canonical concrete syntax; ``parse_formula(to_text(f), sig) == f``."""
    return _show(f, 0, True)


def _show(f, min_prec, tail):
    if isinstance(f, Quantifier):
        word = "forall" if isinstance(f, Forall) else "exists"
        s = f"{word} {f.var}. {_show(f.body, 0, True)}"
        return s if min_prec == 0 or tail else f"({s})"
    if isinstance(f, Or):
        if min_prec > 1:
            return f"({_show(f, 0, True)})"
        return f"{_show(f.left, 1, False)} | {_show(f.right, 2, tail)}"
    if isinstance(f, And):
        if min_prec > 2:
            return f"({_show(f, 0, True)})"
        return f"{_show(f.left, 2, False)} & {_show(f.right, 3, tail)}"
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"{f.body.left} != {f.body.right}"
        return "!" + _show(f.body, 3, tail)
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Rel):
        return f"{f.name}({', '.join(str(a) for a in f.args)})"
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    raise TypeError(f"not a formula: {f!r}")


# -- structural queries ----------------------------------------------------

def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def term_consts(t: Term) -> set[str]:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, App):
        out = set()
        for a in t.args:
            out |= term_consts(a)
        return out
    return set()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Eq):
        return frozenset(term_vars(f.left) | term_vars(f.right))
    if isinstance(f, Rel):
        out = set()
        for a in f.args:
            out |= term_vars(a)
        return frozenset(out)
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> set[str]:
    if isinstance(f, ATOMS):
        return set(free_vars(f))
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return all_vars(f.left) | all_vars(f.right)
    return all_vars(f.body) | {f.var}


def constants(f: Formula) -> set[str]:
    if isinstance(f, Eq):
        return term_consts(f.left) | term_consts(f.right)
    if isinstance(f, Rel):
        out = set()
        for a in f.args:
            out |= term_consts(a)
        return out
    if isinstance(f, Truth):
        return set()
    if isinstance(f, Not):
        return constants(f.body)
    if isinstance(f, (And, Or)):
        return constants(f.left) | constants(f.right)
    return constants(f.body)


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, (And, Or)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    return 1 + quantifier_rank(f.body)


def atom_count(f: Formula) -> int:
    """Number of atom occurrences (``true``/``false`` count as atoms)."""
    if isinstance(f, ATOMS):
        return 1
    if isinstance(f, Not):
        return atom_count(f.body)
    if isinstance(f, (And, Or)):
        return atom_count(f.left) + atom_count(f.right)
    return atom_count(f.body)


def is_prenex(f: Formula) -> bool:
    while isinstance(f, Quantifier):
        f = f.body
    return quantifier_rank(f) == 0


def prefix(f: Formula) -> tuple[list[tuple[type, str]], Formula]:
    out = []
    while isinstance(f, Quantifier):
        out.append((type(f), f.var))
        f = f.body
    return out, f


# -- transformations -------------------------------------------------------

def negate(f: Formula) -> Formula:
    """Negation pushed through connectives and quantifiers.

    Keeps quantifier rank and atom count, and maps prenex formulas to prenex
    formulas.
    """
    if isinstance(f, Truth):
        return Truth(not f.value)
    if isinstance(f, (Eq, Rel)):
        return Not(f)
    if isinstance(f, Not):
        return f.body
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, Forall):
        return Exists(f.var, negate(f.body))
    return Forall(f.var, negate(f.body))


def substitute_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(t.fn, tuple(substitute_term(a, mapping) for a in t.args))
    return t


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free occurrences of variables; targets must not be captured."""
    if not mapping:
        return f
    if isinstance(f, Eq):
        m = {k: Var(v) for k, v in mapping.items()}
        return Eq(substitute_term(f.left, m), substitute_term(f.right, m))
    if isinstance(f, Rel):
        m = {k: Var(v) for k, v in mapping.items()}
        return Rel(f.name, tuple(substitute_term(a, m) for a in f.args))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(rename_free(f.body, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(rename_free(f.left, mapping), rename_free(f.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    return type(f)(f.var, rename_free(f.body, inner))


def _fresh(base: str, used: set[str]) -> str:
    stem = base.rstrip("0123456789") or "v"
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in used:
            used.add(cand)
            return cand
    raise AssertionError


def to_prenex(f: Formula) -> Formula:
    """Logically equivalent formula with every quantifier in an outer prefix.

    Bound variables keep their names unless pulling them outward would capture
    a variable of the other operand; then they are renamed apart.
    """
    used = all_vars(f)
    pre, matrix = _prenex(f, used)
    for q, v in reversed(pre):
        matrix = q(v, matrix)
    return matrix


def _prenex(f, used):
    if isinstance(f, ATOMS):
        return [], f
    if isinstance(f, Not):
        pre, m = _prenex(f.body, used)
        flipped = [(Exists if q is Forall else Forall, v) for q, v in pre]
        return flipped, negate(m)
    if isinstance(f, Quantifier):
        pre, m = _prenex(f.body, used)
        return [(type(f), f.var)] + pre, m
    lp, lm = _prenex(f.left, used)
    rp, rm = _prenex(f.right, used)
    lfree = free_vars(f.left)
    rfree = free_vars(f.right)
    # rename right-side binders that would capture left free variables or clash
    taken = set(lfree) | {v for _, v in lp}
    ren = {}
    new_rp = []
    for q, v in rp:
        if v in taken:
            nv = _fresh(v, used)
            ren[v] = nv
            v = nv
        taken.add(v)
        new_rp.append((q, v))
    rm = rename_free(rm, ren)
    ren = {}
    new_lp = []
    for q, v in lp:
        if v in rfree:
            nv = _fresh(v, used)
            ren[v] = nv
            v = nv
        new_lp.append((q, v))
    lm = rename_free(lm, ren)
    return new_lp + new_rp, type(f)(lm, rm)
