"""Finite sentence pools over a signature.

Two generators are provided.  :func:`generate_pool` enumerates prenex
sentences with a bounded prefix and a bounded number of atoms in the matrix.
:func:`type_pool` builds, relative to a set of probe structures, one defining
formula per rank-``k`` type; agreement on that pool is agreement on every
rank-``k`` sentence over the atoms considered (for the probes).

Both deduplicate semantically: a candidate is kept only if its truth profile
over the probe structures is new, and every kept sentence is paired with its
negation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .evaluate import Evaluator, evaluate
from .families import family_catalog
from .structure import FiniteStructure, Signature
from .syntax import (
    And, App, Const, Eq, Exists, Forall, Formula, Not, Or, Rel, Truth, Var,
    atom_count, conj, constants, free_vars, negate, quantifier_rank, to_text,
)

DEFAULT_SEED = 1729
DEFAULT_LIMIT = 20000


class PoolError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SentencePool:
    signature: Signature
    sentences: tuple
    partner: tuple
    max_rank: int
    atom_budget: Optional[int] = None
    kind: str = "explicit"
    constants: tuple = ()
    truncated: bool = False
    note: str = ""
    probes: tuple = field(default=(), repr=False)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def closed_under_negation(self) -> bool:
        return all(p is not None for p in self.partner)

    def describe(self) -> str:
        parts = [f"kind={self.kind}", f"rank<={self.max_rank}"]
        if self.atom_budget is not None:
            parts.append(f"atoms<={self.atom_budget}")
        parts.append(f"size={len(self)}")
        parts.append(f"probes={len(self.probes)}")
        if self.truncated:
            parts.append("TRUNCATED")
        return " ".join(parts)

    @classmethod
    def explicit(cls, signature, sentences, close=True):
        """Pool from given sentences; with ``close`` each gets a negation partner."""
        out, partner, seen = [], [], {}
        for f in sentences:
            if f in seen:
                continue
            seen[f] = len(out)
            out.append(f)
            partner.append(None)
            if close:
                g = negate(f)
                if g in seen:
                    partner[-1] = seen[g]
                    partner[seen[g]] = len(out) - 1
                    continue
                seen[g] = len(out)
                out.append(g)
                partner.append(len(out) - 2)
                partner[-2] = len(out) - 1
        rank = max((quantifier_rank(f) for f in out), default=0)
        return cls(signature, tuple(out), tuple(partner), rank)


# -- probes ------------------------------------------------------------------

def _structure_key(s: FiniteStructure):
    return (
        s.size,
        tuple(s.table(f) for f, _ in s.signature.functions),
        tuple(tuple(sorted(s.relations[r])) for r, _ in s.signature.relations),
    )


def catalog_members(sig: Signature, max_size: int) -> list[FiniteStructure]:
    """Distinct catalog family members over ``sig`` with at most ``max_size`` elements."""
    out, keys = [], set()
    for fam in family_catalog():
        if not fam.concrete or fam.signature != sig:
            continue
        n = 1
        while True:
            s = fam.member(n, **fam.defaults)
            if s.size > max_size:
                break
            key = _structure_key(s)
            if key not in keys:
                keys.add(key)
                out.append(s)
            n += 1
    return out


def random_structure(sig: Signature, size: int, rng: random.Random, names: Sequence[str] = ()) -> FiniteStructure:
    funcs = {f: [rng.randrange(size) for _ in range(size**a)] for f, a in sig.functions}
    rels = {
        r: [t for t in itertools.product(range(size), repeat=a) if rng.random() < 0.5]
        for r, a in sig.relations
    }
    nm = {c: rng.randrange(size) for c in names}
    return FiniteStructure.from_tables(sig, size, funcs, rels, nm)


def probe_set(sig: Signature, seed: int = DEFAULT_SEED, extra: Iterable[FiniteStructure] = (),
              constants: Sequence[str] = (), max_size: int = 5) -> tuple[FiniteStructure, ...]:
    """Catalog members of size ``<= max_size``, three seeded random structures, then ``extra``.

    With ``constants``, the catalog and random probes get seeded random
    interpretations of the names; ``extra`` structures are used as given.
    """
    rng = random.Random(seed)
    out = []
    for s in catalog_members(sig, max_size):
        if constants:
            s = s.with_names({c: rng.randrange(s.size) for c in constants})
        out.append(s)
    for size in (2, 3, 4):
        out.append(random_structure(sig, size, rng, constants))
    out.extend(extra)
    return tuple(out)


# -- atoms and bit profiles --------------------------------------------------

def _var(i):
    return Var(f"x{i}")


def _base_terms(sig, j, consts):
    return (
        [_var(i) for i in range(1, j + 1)]
        + [App(f, ()) for f, a in sig.functions if a == 0]
        + [Const(c) for c in consts]
    )


def _terms(sig, j, consts):
    base = _base_terms(sig, j, consts)
    deep = [
        App(f, args)
        for f, a in sig.functions if a > 0
        for args in itertools.product(base, repeat=a)
    ]
    return base + deep


def candidate_atoms(sig: Signature, j: int, consts: Sequence[str] = ()) -> list[Formula]:
    """Atoms over variables ``x1..xj``: equalities between terms of depth at
    most one, and relation atoms over variables and constants."""
    terms = _terms(sig, j, consts)
    base = _base_terms(sig, j, consts)
    atoms = [Eq(s, t) for s, t in itertools.combinations(terms, 2)]
    for r, a in sig.relations:
        atoms.extend(Rel(r, args) for args in itertools.product(base, repeat=a))
    return atoms


class _Level:
    """All assignments of ``x1..xj`` over all probes, flattened."""

    def __init__(self, probes, j):
        self.probes = probes
        self.j = j
        self.offsets = []
        total = 0
        for s in probes:
            self.offsets.append(total)
            total += s.size**j
        self.total = total
        self.full = (1 << total) - 1

    def assignments(self):
        for p, s in enumerate(self.probes):
            for tup in itertools.product(range(s.size), repeat=self.j):
                yield p, tup

    def bits(self, f: Formula) -> int:
        evs = [Evaluator(s, memo=False) for s in self.probes]
        names = [f"x{i}" for i in range(1, self.j + 1)]
        out = 0
        for pos, (p, tup) in enumerate(self.assignments()):
            if evs[p].holds(f, dict(zip(names, tup))):
                out |= 1 << pos
        return out

    def unpack(self, bits: int) -> np.ndarray:
        nbytes = max(1, (self.total + 7) // 8)
        raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.total].astype(bool)


def _order_key(f):
    return (quantifier_rank(f), atom_count(f), to_text(f))


def _uses_all(f, j):
    return all(f"x{i}" in free_vars(f) for i in range(1, j + 1))


# -- prenex pool -------------------------------------------------------------

def _matrices(level, atoms, budget, cap):
    """Semantically distinct quantifier-free combinations of at most ``budget`` atoms.

    Returns ``({bits: formula}, truncated)``; the representative of each
    truth set is the first by (atom count, text).
    """
    full = level.full
    by_count: dict[int, list] = {}
    seen: dict[int, Formula] = {}
    lits = {}
    for a in atoms:
        b = level.bits(a)
        if b in (0, full) or b in lits:
            continue
        lits[b] = a
    first = []
    for b, a in lits.items():
        for bb, f in ((b, a), (full ^ b, Not(a))):
            if bb not in seen:
                seen[bb] = f
                first.append((bb, f))
    by_count[1] = first
    truncated = False
    for c in range(2, budget + 1):
        fresh: dict[int, Formula] = {}
        for c1 in range(1, c // 2 + 1):
            left, right = by_count.get(c1, []), by_count.get(c - c1, [])
            for x, (b1, f1) in enumerate(left):
                for y, (b2, f2) in enumerate(right):
                    if c1 == c - c1 and y < x:
                        continue
                    for bb, f in ((b1 & b2, And(f1, f2)), (b1 | b2, Or(f1, f2))):
                        if bb in seen:
                            continue
                        old = fresh.get(bb)
                        if old is None or to_text(f) < to_text(old):
                            fresh[bb] = f
            if len(fresh) > cap:
                truncated = True
                break
        items = sorted(fresh.items(), key=lambda kv: to_text(kv[1]))
        for bb, f in items:
            seen[bb] = f
        by_count[c] = items
        if truncated:
            break
    return seen, truncated


def _profile_of(level, bits, prefix):
    """Truth of the sentence ``prefix matrix`` on each probe."""
    arr = level.unpack(bits)
    out = []
    j = level.j
    for p, s in enumerate(level.probes):
        n = s.size
        chunk = arr[level.offsets[p]: level.offsets[p] + n**j]
        block = chunk.reshape((n,) * j) if j else chunk.reshape(())
        for q in reversed(prefix):
            block = block.any(axis=-1) if q is Exists else block.all(axis=-1)
        out.append(bool(block))
    return tuple(out)


def _wrap(prefix, matrix):
    f = matrix
    for i in range(len(prefix), 0, -1):
        f = prefix[i - 1](f"x{i}", f)
    return f


def _assemble(sig, candidates, pinned, probes, limit):
    """Profile-deduplicate ``(profile, formula)`` candidates in order, pinned first."""
    sentences, partner, seen = [], [], set()
    truncated = False

    def add(f, prof):
        nonlocal truncated
        if prof in seen:
            return
        if len(sentences) + 2 > limit:
            truncated = True
            return
        g = negate(f)
        neg = tuple(not v for v in prof)
        seen.add(prof)
        seen.add(neg)
        k = len(sentences)
        sentences.extend([f, g])
        partner.extend([k + 1, k])

    for f in pinned:
        add(f, tuple(evaluate(s, f) for s in probes))
    for prof, f in candidates:
        add(f, prof)
    return tuple(sentences), tuple(partner), truncated


def generate_pool(sig: Signature, max_rank: int, atom_budget: int, probes=None, constants: Sequence[str] = (),
                  pinned: Sequence[Formula] = (), limit: int = DEFAULT_LIMIT, seed: int = DEFAULT_SEED) -> SentencePool:
    """Prenex sentences with at most ``max_rank`` quantifiers and ``atom_budget`` atoms.

    Candidates are ordered by (rank, atoms, text); sentences whose prefix
    binds a variable the matrix never mentions are skipped.  Hitting
    ``limit`` yields a pool flagged ``truncated`` with a note.
    """
    if max_rank < 0 or atom_budget < 1:
        raise PoolError("need max_rank >= 0 and atom_budget >= 1")
    probes = tuple(probes) if probes is not None else probe_set(sig, seed, constants=constants)
    if not probes:
        raise PoolError("empty probe set")
    cands = []
    trunc_any = False
    for j in range(max_rank + 1):
        level = _Level(probes, j)
        atoms = candidate_atoms(sig, j, constants)
        mats, trunc = _matrices(level, atoms, atom_budget, limit)
        trunc_any |= trunc
        for bits, m in mats.items():
            if not _uses_all(m, j):
                continue
            for prefix in itertools.product((Forall, Exists), repeat=j):
                cands.append((_wrap(prefix, m), bits, prefix, level))
    cands.sort(key=lambda c: _order_key(c[0]))
    prof = ((_profile_of(level, bits, prefix), f) for f, bits, prefix, level in cands)
    sentences, partner, trunc = _assemble(sig, prof, pinned, probes, limit)
    truncated = trunc or trunc_any
    note = f"truncated: resource cap of {limit} reached" if truncated else ""
    return SentencePool(sig, sentences, partner, max_rank, atom_budget, "prenex", tuple(constants),
                        truncated, note, probes)


# -- type pool ---------------------------------------------------------------

class _TypeTable:
    """Rank-``r`` types of ``j``-tuples over the probes, with defining formulas."""

    def __init__(self, sig, probes, constants=()):
        self.sig = sig
        self.probes = tuple(probes)
        self.constants = tuple(constants)
        self.cls: dict = {}
        self.formulas: dict = {}

    def classes(self, r, j):
        key = (r, j)
        if key in self.cls:
            return self.cls[key]
        level = _Level(self.probes, j)
        if r == 0:
            atoms = []
            seen = set()
            for a in candidate_atoms(self.sig, j, self.constants):
                b = level.bits(a)
                if b in (0, level.full) or b in seen or (level.full ^ b) in seen:
                    continue
                seen.add(b)
                atoms.append((a, level.unpack(b)))
            gens = [a for a, _ in atoms]
            sig_rows = [tuple(bool(v[pos]) for _, v in atoms) for pos in range(level.total)]
            labels = sig_rows
        else:
            sub = self.classes(r - 1, j + 1)
            atom_ids = self.classes(0, j)
            labels = []
            for p, s in enumerate(self.probes):
                n = s.size
                base_sub = _Level(self.probes, j + 1).offsets[p]
                base0 = level.offsets[p]
                for t in range(n**j):
                    succ = frozenset(sub["ids"][base_sub + t * n + c] for c in range(n))
                    labels.append((atom_ids["ids"][base0 + t], succ))
            gens = None
        index: dict = {}
        ids = []
        for lab in labels:
            ids.append(index.setdefault(lab, len(index)))
        table = {"ids": ids, "labels": list(index), "gens": gens}
        self.cls[key] = table
        return table

    def literals(self, r, j):
        """Candidate literals with their truth value per class at ``(r, j)``."""
        table = self.classes(r, j)
        lits = []
        if r == 0:
            for k, a in enumerate(table["gens"]):
                vals = [lab[k] for lab in table["labels"]]
                lits.append((a, vals))
                lits.append((Not(a), [not v for v in vals]))
        else:
            for a, vals0 in self.literals(0, j):
                vals = [vals0[lab[0]] for lab in table["labels"]]
                lits.append((a, vals))
            for c in range(len(self.classes(r - 1, j + 1)["labels"])):
                f = Exists(f"x{j + 1}", self.formula(r - 1, j + 1, c))
                vals = [c in lab[1] for lab in table["labels"]]
                lits.append((f, vals))
                lits.append((Not(f), [not v for v in vals]))
        lits.sort(key=lambda lv: (atom_count(lv[0]), to_text(lv[0])))
        return lits

    def formula(self, r, j, c):
        key = (r, j, c)
        got = self.formulas.get(key)
        if got is not None:
            return got
        lits = [lv for lv in self.literals(r, j) if lv[1][c]]
        others = set(range(len(self.classes(r, j)["labels"]))) - {c}
        picked = []
        while others:
            best, gain = None, 0
            for f, vals in lits:
                g = sum(1 for o in others if not vals[o])
                if g > gain:
                    best, gain = (f, vals), g
            if best is None:
                raise PoolError("classes cannot be separated by the available literals")
            picked.append(best[0])
            others = {o for o in others if best[1][o]}
        f = conj(picked)
        self.formulas[key] = f
        return f

    def level_formulas(self, r, j):
        return [self.formula(r, j, c) for c in range(len(self.classes(r, j)["labels"]))]


def _type_assemble(sig, probes, forms, j, pinned, limit):
    """Profile-dedup formulas with ``j`` free variables ``x1..xj``."""
    level = _Level(probes, j)
    cands = sorted(forms, key=_order_key)
    gen = ((tuple(bool(x) for x in level.unpack(level.bits(f))), f) for f in cands)
    if j == 0:
        return _assemble(sig, gen, pinned, probes, limit)
    return _assemble_open(gen, limit)


def _assemble_open(cands, limit):
    sentences, partner, seen = [], [], set()
    truncated = False
    for prof, f in cands:
        if prof in seen:
            continue
        if len(sentences) + 2 > limit:
            truncated = True
            break
        seen.add(prof)
        seen.add(tuple(not v for v in prof))
        k = len(sentences)
        sentences.extend([f, negate(f)])
        partner.extend([k + 1, k])
    return tuple(sentences), tuple(partner), truncated


def type_pool(sig: Signature, max_rank: int, probes=None, constants: Sequence[str] = (),
              pinned: Sequence[Formula] = (), limit: int = DEFAULT_LIMIT, seed: int = DEFAULT_SEED) -> SentencePool:
    """One defining sentence per rank-``max_rank`` type realised in the probes,
    plus negations and any ``pinned`` sentences (placed first)."""
    if max_rank < 0:
        raise PoolError("max_rank must be nonnegative")
    probes = tuple(probes) if probes is not None else probe_set(sig, seed, constants=constants)
    if not probes:
        raise PoolError("empty probe set")
    table = _TypeTable(sig, probes, constants)
    forms = table.level_formulas(max_rank, 0)
    sentences, partner, truncated = _type_assemble(sig, probes, forms, 0, pinned, limit)
    note = f"truncated: resource cap of {limit} reached" if truncated else ""
    return SentencePool(sig, sentences, partner, max_rank, None, "types", tuple(constants), truncated, note, probes)


def formula_pool(sig: Signature, max_rank: int, probes, max_free: int = 2, limit: int = DEFAULT_LIMIT) -> SentencePool:
    """Type-defining formulas of rank ``max_rank`` in ``j <= max_free`` free
    variables ``x1..xj`` (with negations)."""
    probes = tuple(probes)
    table = _TypeTable(sig, probes)
    sentences, partner = [], []
    truncated = False
    for j in range(max_free + 1):
        forms = table.level_formulas(max_rank, j)
        ss, pp, tr = _type_assemble(sig, probes, forms, j, (), limit)
        base = len(sentences)
        sentences.extend(ss)
        partner.extend(p + base for p in pp)
        truncated |= tr
    note = f"truncated: resource cap of {limit} reached" if truncated else ""
    return SentencePool(sig, tuple(sentences), tuple(partner), max_rank, None, "formulas", (), truncated, note, probes)


def restrict_constants(pool: SentencePool, max_constants: int) -> SentencePool:
    """Drop sentences (and their partners) naming more than ``max_constants`` constants."""
    keep = [i for i, f in enumerate(pool.sentences) if len(constants(f)) <= max_constants]
    keep_set = set(keep)
    keep = [i for i in keep if pool.partner[i] is None or pool.partner[i] in keep_set]
    pos = {i: k for k, i in enumerate(keep)}
    return SentencePool(
        pool.signature, tuple(pool.sentences[i] for i in keep),
        tuple(pos.get(pool.partner[i]) for i in keep),
        pool.max_rank, pool.atom_budget, pool.kind, pool.constants, pool.truncated, pool.note, pool.probes,
    )
