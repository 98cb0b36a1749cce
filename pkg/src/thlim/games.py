"""Ehrenfeucht-Fraisse games and rank-bounded elementary substructure checks."""

from __future__ import annotations

import itertools
from typing import Optional

from .evaluate import evaluate_with_assignment
from .pools import SentencePool, formula_pool
from .structure import FiniteStructure, StructureError, is_substructure
from .syntax import free_vars, quantifier_rank


def _close(a: FiniteStructure, b: FiniteStructure, pairs) -> Optional[frozenset]:
    """Extend ``pairs`` to the substructures they generate, or ``None`` when
    the correspondence is not a partial isomorphism."""
    fwd, back = {}, {}

    def add(x, y):
        if fwd.get(x, y) != y or back.get(y, x) != x:
            return False
        fwd[x] = y
        back[y] = x
        return True

    for x, y in pairs:
        if not add(x, y):
            return None
    funcs = a.signature.functions
    changed = True
    while changed:
        changed = False
        dom = sorted(fwd)
        for f, ar in funcs:
            for args in itertools.product(dom, repeat=ar):
                x = a.apply(f, args)
                y = b.apply(f, [fwd[t] for t in args])
                if x not in fwd:
                    if y in back:
                        return None
                    add(x, y)
                    changed = True
                elif fwd[x] != y:
                    return None
    dom = sorted(fwd)
    for r, ar in a.signature.relations:
        for args in itertools.product(dom, repeat=ar):
            if a.holds(r, args) != b.holds(r, [fwd[t] for t in args]):
                return None
    return frozenset(fwd.items())


class EFGame:
    """Memoized solver for the k-round game on a fixed pair of structures."""

    def __init__(self, a: FiniteStructure, b: FiniteStructure):
        if a.signature != b.signature:
            raise StructureError("structures have different signatures")
        if set(a.names) != set(b.names):
            raise StructureError("structures name different constants")
        self.a, self.b = a, b
        self.memo: dict = {}
        self.start = _close(a, b, [(a.names[c], b.names[c]) for c in sorted(a.names)])

    def duplicator_wins(self, rounds: int) -> bool:
        if self.start is None:
            return False
        return self._wins(self.start, rounds)

    def _wins(self, state: frozenset, rounds: int) -> bool:
        if rounds == 0:
            return True
        key = (state, rounds)
        got = self.memo.get(key)
        if got is not None:
            return got
        res = self._side(state, rounds, False) and self._side(state, rounds, True)
        self.memo[key] = res
        return res

    def _side(self, state, rounds, right):
        src, dst = (self.b, self.a) if right else (self.a, self.b)
        pairs = dict((y, x) for x, y in state) if right else dict(state)
        for x in range(src.size):
            if x in pairs:
                continue
            ok = False
            for y in range(dst.size):
                new = set(state)
                new.add((y, x) if right else (x, y))
                closed = _close(self.a, self.b, sorted(new))
                if closed is not None and self._wins(closed, rounds - 1):
                    ok = True
                    break
            if not ok:
                return False
        return True


def ef_equivalent(a: FiniteStructure, b: FiniteStructure, rounds: int) -> bool:
    """Duplicator wins the ``rounds``-round game on ``a`` and ``b``."""
    if rounds < 0:
        raise ValueError("rounds must be nonnegative")
    return EFGame(a, b).duplicator_wins(rounds)


def elementary_up_to_rank(small: FiniteStructure, big: FiniteStructure, emb, rank: int,
                          pool: Optional[SentencePool] = None) -> bool:
    """Every pool formula of quantifier rank ``<= rank`` with at most two free
    variables has the same truth in ``small`` and, via ``emb``, in ``big``,
    for every choice of parameters from ``small``.

    Without a pool, type-defining formulas relative to ``small`` and ``big``
    are used.
    """
    emb = tuple(emb)
    if not is_substructure(small, big, emb):
        raise StructureError("map is not a substructure embedding")
    if pool is None:
        pool = formula_pool(small.signature, rank, (small, big))
    forms = [f for f in pool.sentences if len(free_vars(f)) <= 2 and quantifier_rank(f) <= rank]
    if not any(free_vars(f) for f in forms):
        raise ValueError("the pool has no formulas with free variables")
    for f in forms:
        names = sorted(free_vars(f))
        for tup in itertools.product(range(small.size), repeat=len(names)):
            asg = dict(zip(names, tup))
            up = {v: emb[e] for v, e in asg.items()}
            if evaluate_with_assignment(small, f, asg) != evaluate_with_assignment(big, f, up):
                return False
    return True

