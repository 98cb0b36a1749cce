"""Finite structures over finite signatures, and ascending chains of them.

Universes are always ``range(size)``.  Elements of different chain members are
related only through the explicit embedding maps stored on a
:class:`ChainFamily`, never through shared labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class StructureError(ValueError):
    """Raised for malformed inputs that cannot even be represented."""


@dataclass(frozen=True)
class Signature:
    functions: tuple[tuple[str, int], ...] = ()
    relations: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple((str(n), int(a)) for n, a in self.functions))
        object.__setattr__(self, "relations", tuple((str(n), int(a)) for n, a in self.relations))
        names = [n for n, _ in self.functions] + [n for n, _ in self.relations]
        if len(names) != len(set(names)):
            raise StructureError(f"duplicate symbol names in signature: {names}")
        for n, a in self.functions:
            if a < 0:
                raise StructureError(f"function {n} has negative arity")
        for n, a in self.relations:
            if a < 1:
                raise StructureError(f"relation {n} must have positive arity")

    @cached_property
    def function_arity(self) -> dict[str, int]:
        return dict(self.functions)

    @cached_property
    def relation_arity(self) -> dict[str, int]:
        return dict(self.relations)

    def arity(self, name: str) -> int:
        if name in self.function_arity:
            return self.function_arity[name]
        return self.relation_arity[name]

    def __str__(self):
        parts = [f"{n}/{a}" for n, a in self.functions] + [f"{n}/{a}" for n, a in self.relations]
        return "{" + ", ".join(parts) + "}"


EMPTY_SIGNATURE = Signature()


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """A structure with universe ``0..size-1``.

    ``functions`` maps each function symbol to a dict from input tuples to
    outputs; ``relations`` maps each relation symbol to a set of tuples.
    Construction does not validate, so that :func:`validate_structure` can
    report violations as data.
    """

    signature: Signature
    size: int
    functions: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    names: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_tables(cls, signature, size, functions=None, relations=None, names=None):
        """Build from flat function tables listed in lexicographic input order."""
        funcs = {}
        for fname, arity in signature.functions:
            flat = list((functions or {}).get(fname, ()))
            inputs = list(itertools.product(range(size), repeat=arity))
            funcs[fname] = {t: v for t, v in zip(inputs, flat)}
        rels = {
            rname: frozenset(tuple(t) for t in (relations or {}).get(rname, ()))
            for rname, _ in signature.relations
        }
        return cls(signature, size, funcs, rels, dict(names or {}))

    @property
    def universe(self) -> range:
        return range(self.size)

    @cached_property
    def _tables(self) -> dict[str, tuple[int, ...]]:
        out = {}
        for fname, arity in self.signature.functions:
            fn = self.functions.get(fname, {})
            out[fname] = tuple(fn[t] for t in itertools.product(range(self.size), repeat=arity))
        return out

    def table(self, fname: str) -> tuple[int, ...]:
        """Flat function table; index of ``(x1..xa)`` is ``sum(xi * size**(a-1-i))``."""
        return self._tables[fname]

    def apply(self, fname: str, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self._tables[fname][idx]

    def holds(self, rname: str, args: Sequence[int]) -> bool:
        return tuple(args) in self.relations[rname]

    def with_names(self, names: Mapping[str, int]) -> "FiniteStructure":
        return FiniteStructure(self.signature, self.size, self.functions, self.relations, dict(names))

    def permuted(self, perm: Sequence[int]) -> "FiniteStructure":
        """Isomorphic copy in which element ``e`` is renamed ``perm[e]``."""
        funcs = {}
        for fname, fn in self.functions.items():
            funcs[fname] = {tuple(perm[x] for x in t): perm[v] for t, v in fn.items()}
        rels = {
            rname: frozenset(tuple(perm[x] for x in t) for t in ts)
            for rname, ts in self.relations.items()
        }
        names = {c: perm[e] for c, e in self.names.items()}
        return FiniteStructure(self.signature, self.size, funcs, rels, names)

    def __repr__(self):
        return f"FiniteStructure(size={self.size}, signature={self.signature})"


@dataclass(frozen=True)
class Violation:
    kind: str
    symbol: str
    detail: object

    def __str__(self):
        return f"{self.kind}: {self.symbol} {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_structure(s: FiniteStructure) -> ValidationReport:
    out: list[Violation] = []
    if not isinstance(s.size, int) or s.size < 1:
        return ValidationReport((Violation("empty universe", "", s.size),))
    sig = s.signature
    for fname in s.functions:
        if fname not in sig.function_arity:
            out.append(Violation("unknown symbol", fname, None))
    for rname in s.relations:
        if rname not in sig.relation_arity:
            out.append(Violation("unknown symbol", rname, None))
    for fname, arity in sig.functions:
        fn = s.functions.get(fname)
        if fn is None:
            out.append(Violation("missing function", fname, None))
            continue
        for t in itertools.product(range(s.size), repeat=arity):
            if t not in fn:
                out.append(Violation("partial function table", fname, t))
            elif not (isinstance(fn[t], int) and 0 <= fn[t] < s.size):
                out.append(Violation("function value outside universe", fname, (t, fn[t])))
        for t in fn:
            if len(t) != arity or any(not (0 <= x < s.size) for x in t):
                out.append(Violation("function input outside universe", fname, t))
    for rname, arity in sig.relations:
        ts = s.relations.get(rname)
        if ts is None:
            out.append(Violation("missing relation", rname, None))
            continue
        for t in sorted(ts):
            if len(t) != arity or any(not (isinstance(x, int) and 0 <= x < s.size) for x in t):
                out.append(Violation("relation tuple outside universe", rname, t))
    for c, e in sorted(s.names.items()):
        if not (isinstance(e, int) and 0 <= e < s.size):
            out.append(Violation("named constant outside universe", c, e))
    return ValidationReport(tuple(out))


def is_substructure(small: FiniteStructure, big: FiniteStructure, emb: Sequence[int]) -> bool:
    """True iff ``emb`` embeds ``small`` into ``big`` as an induced substructure."""
    if small.signature != big.signature:
        raise StructureError("structures have different signatures")
    emb = tuple(emb)
    if len(emb) != small.size:
        raise StructureError(f"map covers {len(emb)} elements, structure has {small.size}")
    if any(not (0 <= y < big.size) for y in emb):
        raise StructureError("map sends an element outside the target universe")
    if len(set(emb)) != len(emb):
        return False
    for fname, arity in small.signature.functions:
        for t in itertools.product(range(small.size), repeat=arity):
            if big.apply(fname, [emb[x] for x in t]) != emb[small.apply(fname, t)]:
                return False
    for rname, arity in small.signature.relations:
        big_rel = big.relations[rname]
        small_rel = small.relations[rname]
        for t in itertools.product(range(small.size), repeat=arity):
            if (t in small_rel) != (tuple(emb[x] for x in t) in big_rel):
                return False
    for c, e in small.names.items():
        if c in big.names and big.names[c] != emb[e]:
            return False
    return True


def compose(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Map ``x -> second[first[x]]``."""
    return tuple(second[y] for y in first)


@dataclass(frozen=True, eq=False)
class ChainFamily:
    """A finite ascending chain ``S_1 <= ... <= S_N`` with explicit embeddings.

    Chain positions are 1-based.  ``labels`` records the original position of
    each member when the chain was cut out of a longer one.
    """

    signature: Signature
    members: tuple[FiniteStructure, ...]
    embeddings: tuple[tuple[int, ...], ...]
    name: str = "chain"
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.members:
            raise StructureError("a chain needs at least one member")
        if len(self.embeddings) != len(self.members) - 1:
            raise StructureError("need exactly one embedding per consecutive pair")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, len(self.members) + 1)))
        object.__setattr__(self, "embeddings", tuple(tuple(e) for e in self.embeddings))

    @property
    def length(self) -> int:
        return len(self.members)

    def member(self, n: int) -> FiniteStructure:
        if not 1 <= n <= self.length:
            raise IndexError(f"chain position {n} outside 1..{self.length}")
        return self.members[n - 1]

    def composite(self, i: int, j: int) -> tuple[int, ...]:
        """Embedding of member ``i`` into member ``j`` (positions, ``i <= j``)."""
        if i > j:
            raise ValueError("composite embeddings only go up the chain")
        cur = tuple(range(self.member(i).size))
        for step in range(i, j):
            cur = compose(cur, self.embeddings[step - 1])
        return cur

    def image(self, i: int, j: int) -> frozenset[int]:
        return frozenset(self.composite(i, j))

    def subchain(self, positions: Iterable[int]) -> "ChainFamily":
        positions = list(positions)
        if not positions or positions != sorted(set(positions)):
            raise ValueError("subchain positions must be strictly increasing and nonempty")
        members = tuple(self.member(p) for p in positions)
        embs = tuple(self.composite(a, b) for a, b in zip(positions, positions[1:]))
        labels = tuple(self.labels[p - 1] for p in positions)
        return ChainFamily(self.signature, members, embs, self.name, labels)

    def augment(self, constants: Mapping[str, tuple[int, int]]) -> "ChainFamily":
        """Name elements: ``{c: (position, element)}``.

        The constant is carried to every later member through the embeddings
        and left undefined on earlier members.
        """
        members = []
        for n in range(1, self.length + 1):
            names = dict(self.member(n).names)
            for c, (pos, e) in constants.items():
                if pos <= n:
                    names[c] = self.composite(pos, n)[e]
            members.append(self.member(n).with_names(names))
        return ChainFamily(self.signature, tuple(members), self.embeddings, self.name, self.labels)


def validate_chain(chain: ChainFamily) -> list[str]:
    problems = []
    for n, s in enumerate(chain.members, start=1):
        if s.signature != chain.signature:
            problems.append(f"member {n}: signature differs from chain signature")
        rep = validate_structure(s)
        problems.extend(f"member {n}: {v}" for v in rep.violations)
    if problems:
        return problems
    for n, emb in enumerate(chain.embeddings, start=1):
        try:
            ok = is_substructure(chain.member(n), chain.member(n + 1), emb)
        except StructureError as exc:
            problems.append(f"embedding {n}->{n + 1}: {exc}")
            continue
        if not ok:
            problems.append(f"embedding {n}->{n + 1} is not a substructure embedding")
    return problems
