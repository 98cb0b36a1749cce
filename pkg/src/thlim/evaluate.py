"""Tarskian satisfaction in finite structures, and truth tables along chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .structure import ChainFamily, FiniteStructure
from .syntax import (
    And, App, Const, Eq, Exists, Forall, Formula, Not, Or, Rel, Truth, Var,
    free_vars, to_text,
)


class EvaluationError(ValueError):
    pass


class UnresolvedConstantError(EvaluationError):
    """A ``@name`` constant has no interpretation in the structure."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"constant @{name} is not named in this structure")


class MissingAssignmentError(EvaluationError):
    pass


class Evaluator:
    """Evaluates formulas in one structure.

    With ``memo=True`` results are cached per (subformula node, values of its
    free variables); the cache lives as long as the evaluator, so reuse one
    evaluator across a pool of sentences sharing subformulas.
    """

    def __init__(self, structure: FiniteStructure, memo: bool = True):
        self.s = structure
        self.memo = memo
        self._cache: dict = {}
        self._free: dict = {}
        self._pin: list = []

    def _fv(self, f):
        key = id(f)
        got = self._free.get(key)
        if got is None:
            got = tuple(sorted(free_vars(f)))
            self._free[key] = got
            self._pin.append(f)
        return got

    def term(self, t, asg):
        if isinstance(t, Var):
            try:
                return asg[t.name]
            except KeyError:
                raise MissingAssignmentError(f"no value for free variable {t.name}") from None
        if isinstance(t, Const):
            try:
                return self.s.names[t.name]
            except KeyError:
                raise UnresolvedConstantError(t.name) from None
        if isinstance(t, App):
            return self.s.apply(t.fn, [self.term(a, asg) for a in t.args])
        raise TypeError(f"not a term: {t!r}")

    def holds(self, f: Formula, asg: Mapping[str, int]) -> bool:
        if isinstance(f, Eq):
            return self.term(f.left, asg) == self.term(f.right, asg)
        if isinstance(f, Rel):
            return self.s.holds(f.name, [self.term(a, asg) for a in f.args])
        if isinstance(f, Truth):
            return f.value
        if isinstance(f, Not):
            return not self.holds(f.body, asg)
        if self.memo:
            fv = self._fv(f)
            try:
                key = (id(f), tuple(asg[v] for v in fv))
            except KeyError as exc:
                raise MissingAssignmentError(f"no value for free variable {exc.args[0]}") from None
            got = self._cache.get(key)
            if got is None:
                got = self._compute(f, asg)
                self._cache[key] = got
            return got
        return self._compute(f, asg)

    def _compute(self, f, asg):
        if isinstance(f, And):
            return self.holds(f.left, asg) and self.holds(f.right, asg)
        if isinstance(f, Or):
            return self.holds(f.left, asg) or self.holds(f.right, asg)
        inner = dict(asg)
        if isinstance(f, Exists):
            for e in range(self.s.size):
                inner[f.var] = e
                if self.holds(f.body, inner):
                    return True
            return False
        if isinstance(f, Forall):
            for e in range(self.s.size):
                inner[f.var] = e
                if not self.holds(f.body, inner):
                    return False
            return True
        raise TypeError(f"not a formula: {f!r}")


def evaluate_with_assignment(s: FiniteStructure, f: Formula, asg: Mapping[str, int], memo: bool = True) -> bool:
    missing = free_vars(f) - set(asg)
    if missing:
        raise MissingAssignmentError(f"no value for free variables {sorted(missing)}")
    return Evaluator(s, memo).holds(f, dict(asg))


def evaluate(s: FiniteStructure, f: Formula, memo: bool = True) -> bool:
    if free_vars(f):
        raise MissingAssignmentError(f"not a sentence: free variables {sorted(free_vars(f))}")
    return Evaluator(s, memo).holds(f, {})


EVALUATED = "evaluated"
UNRESOLVED = "unresolved-constant"
ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class TruthMatrix:
    """Sentence-by-chain-position truth values.

    ``columns`` carries the original chain labels of the positions.
    ``partner[r]`` is the row index of the negation partner of row ``r``, or
    ``None``.  ``eventual`` holds oracle eventual-behaviour records for
    oracle-backed rows.
    """

    sentences: tuple
    columns: tuple[int, ...]
    cells: tuple[tuple[bool, ...], ...]
    provenance: tuple[tuple[str, ...], ...]
    partner: tuple = ()
    family: str = ""
    eventual: tuple = ()
    pool: object = None

    def __post_init__(self):
        if not self.partner:
            object.__setattr__(self, "partner", (None,) * len(self.sentences))
        if not self.eventual:
            object.__setattr__(self, "eventual", (None,) * len(self.sentences))
        assert len(self.cells) == len(self.sentences)
        assert all(len(r) == len(self.columns) for r in self.cells)

    @property
    def horizon(self) -> int:
        return len(self.columns)

    def row(self, r: int) -> tuple[bool, ...]:
        return self.cells[r]

    def index_of(self, f: Formula) -> int:
        return self.sentences.index(f)

    @property
    def closed_under_negation(self) -> bool:
        return all(p is not None for p in self.partner)

    def is_oracle_row(self, r: int) -> bool:
        return all(p == ORACLE for p in self.provenance[r])

    def cell_text(self, r: int, c: int) -> str:
        if self.provenance[r][c] == UNRESOLVED:
            return "U"
        return "T" if self.cells[r][c] else "F"

    def restrict(self, positions: Sequence[int]) -> "TruthMatrix":
        """Keep the columns at the given 1-based positions."""
        idx = [p - 1 for p in positions]
        return TruthMatrix(
            self.sentences,
            tuple(self.columns[i] for i in idx),
            tuple(tuple(row[i] for i in idx) for row in self.cells),
            tuple(tuple(row[i] for i in idx) for row in self.provenance),
            self.partner, self.family, self.eventual, self.pool,
        )

    def to_tsv(self) -> str:
        lines = ["sentence\t" + "\t".join(str(c) for c in self.columns)]
        for r, f in enumerate(self.sentences):
            cells = "\t".join(self.cell_text(r, c) for c in range(self.horizon))
            lines.append(f"{_label(f)}\t{cells}")
        return "\n".join(lines) + "\n"


def _label(f):
    return f if isinstance(f, str) else to_text(f)


def tabulate(chain: ChainFamily, pool, unresolved_false: bool = False, memo: bool = True) -> TruthMatrix:
    """Evaluate every pool sentence at every chain position.

    A sentence naming a constant that a member does not interpret raises
    :class:`UnresolvedConstantError`, unless ``unresolved_false`` is set; then
    the cell is false and tagged ``unresolved-constant``.
    """
    sentences = tuple(pool.sentences)
    if pool.signature != chain.signature:
        raise EvaluationError("pool signature differs from chain signature")
    cells = [[False] * chain.length for _ in sentences]
    prov = [[EVALUATED] * chain.length for _ in sentences]
    for c, member in enumerate(chain.members):
        ev = Evaluator(member, memo)
        for r, f in enumerate(sentences):
            try:
                cells[r][c] = ev.holds(f, {})
            except UnresolvedConstantError:
                if not unresolved_false:
                    raise
                prov[r][c] = UNRESOLVED
    return TruthMatrix(
        sentences,
        chain.labels,
        tuple(tuple(r) for r in cells),
        tuple(tuple(r) for r in prov),
        tuple(pool.partner),
        chain.name,
        pool=pool,
    )
