"""Automorphism enumeration, constrained automorphism search, and the
automorphism conditions that make augmented theories converge along a chain.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import kernels
from .structure import ChainFamily, FiniteStructure, StructureError, is_substructure

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    env = os.environ.get("THLIM_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _allowed(n, pins=None, carry=(), target=None):
    allowed = [1] * (n * n)
    for v, w in (pins or {}).items():
        row = v * n
        for x in range(n):
            allowed[row + x] = 1 if x == w else 0
    if target is not None:
        target = set(target)
        for v in carry:
            row = v * n
            for x in range(n):
                if x not in target:
                    allowed[row + x] = 0
    return allowed


def compose_perm(g: Sequence[int], h: Sequence[int]) -> tuple[int, ...]:
    """``g o h``: apply ``h`` first."""
    return tuple(g[x] for x in h)


def invert_perm(g: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(g)
    for x, y in enumerate(g):
        out[y] = x
    return tuple(out)


def is_automorphism(s: FiniteStructure, perm: Sequence[int]) -> bool:
    perm = tuple(perm)
    return sorted(perm) == list(range(s.size)) and is_substructure(s, s, perm)


@dataclass(frozen=True)
class AutomorphismSet:
    structure: FiniteStructure
    elements: tuple[tuple[int, ...], ...]
    complete: bool
    nodes: int = 0

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return tuple(g) in self._members

    @property
    def _members(self):
        return frozenset(self.elements)

    def is_group(self) -> bool:
        """Exact closure check.

        Greedily picks generators from the set and closes them under right
        multiplication; the set is a group iff every product stays inside and
        the closure reaches every element.  Inverses are checked directly.
        """
        members = self._members
        ident = tuple(range(self.structure.size))
        if ident not in members:
            return False
        if any(invert_perm(g) not in members for g in self.elements):
            return False
        gens: list[tuple[int, ...]] = []
        reached = {ident}
        for g in self.elements:
            if g in reached:
                continue
            gens.append(g)
            frontier = list(reached)
            while frontier:
                nxt = []
                for x in frontier:
                    for s in gens:
                        y = compose_perm(x, s)
                        if y not in members:
                            return False
                        if y not in reached:
                            reached.add(y)
                            nxt.append(y)
                frontier = nxt
        return len(reached) == len(members)


def enumerate_automorphisms(s: FiniteStructure, fix: Iterable[int] = (), budget=None, backend=None) -> AutomorphismSet:
    """All automorphisms (fixing ``fix`` pointwise), in the kernel's deterministic order."""
    budget = default_budget() if budget is None else budget
    allowed = _allowed(s.size, {a: a for a in fix})
    sols, complete, nodes = kernels.run_search(s, allowed, 0, budget, backend)
    return AutomorphismSet(s, tuple(sols), complete, nodes)


@dataclass(frozen=True)
class SearchResult:
    automorphism: Optional[tuple[int, ...]]
    complete: bool
    nodes: int

    @property
    def found(self) -> bool:
        return self.automorphism is not None

    @property
    def indeterminate(self) -> bool:
        return self.automorphism is None and not self.complete


def find_constrained_automorphism(s, fix=(), carry=(), target=None, pins=None, budget=None, backend=None) -> SearchResult:
    """First automorphism fixing ``fix`` with ``f(carry)`` inside ``target``.

    ``pins`` adds prescribed values ``v -> w``.  A result that is neither found
    nor complete ran out of budget.
    """
    budget = default_budget() if budget is None else budget
    n = s.size
    for x in itertools.chain(fix, carry, target or ()):
        if not 0 <= x < n:
            raise StructureError(f"element {x} outside universe of size {n}")
    p = {a: a for a in fix}
    for v, w in (pins or {}).items():
        if p.get(v, w) != w:
            return SearchResult(None, True, 0)
        p[v] = w
    allowed = _allowed(n, p, tuple(carry), target)
    sols, complete, nodes = kernels.run_search(s, allowed, 1, budget, backend)
    return SearchResult(sols[0] if sols else None, complete, nodes)


class BudgetExceeded(RuntimeError):
    pass


def tuple_orbits(s: FiniteStructure, fixed: Sequence[int], m: int, budget=None, backend=None):
    """Orbits of ``m``-tuples under automorphisms fixing ``fixed`` pointwise.

    Returns ``(reps, witness)`` where ``witness[t] = (rep, g)`` with ``g`` an
    automorphism fixing ``fixed`` and sending ``rep`` to ``t`` coordinatewise.
    """
    reps: list[tuple[int, ...]] = []
    witness = {}
    ident = tuple(range(s.size))
    for t in itertools.product(range(s.size), repeat=m):
        for rep in reps:
            pins = {}
            clash = False
            for r, x in zip(rep, t):
                if pins.get(r, x) != x:
                    clash = True
                    break
                pins[r] = x
            if clash:
                continue
            res = find_constrained_automorphism(s, fix=fixed, pins=pins, budget=budget, backend=backend)
            if res.indeterminate:
                raise BudgetExceeded(f"orbit computation ran out of budget at tuple {t}")
            if res.found:
                witness[t] = (rep, res.automorphism)
                break
        else:
            reps.append(t)
            witness[t] = (t, ident)
    return reps, witness


@dataclass
class OrbitCertificate:
    """Outcome of checking one constant set against an automorphism condition.

    ``evidence[j]`` maps each orbit representative ``b`` to an automorphism of
    the structure at position ``j`` (or of the ambient structure, keyed
    ``"ambient"``) that fixes the constants and carries ``a`` and ``b`` into
    the image of the chosen member.
    """

    condition: int
    constants: tuple[int, ...]
    designated: int
    chosen: Optional[int] = None
    evidence: dict = field(default_factory=dict)
    orbit_witness: dict = field(default_factory=dict)
    constant_images: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)
    note: str = ""

    @property
    def status(self) -> str:
        if self.chosen is not None:
            return "certified"
        if self.indeterminate:
            return "indeterminate"
        return "failed"


def designated_position(chain: ChainFamily, m: int) -> int:
    for n in range(1, chain.length + 1):
        if chain.member(n).size >= m:
            return n
    raise ValueError(f"no chain member has at least {m} elements")


def _verify_position(s, a_img, target, m, orbit_cache, key, budget, backend):
    """Check every orbit representative; returns (evidence, failure, indeterminate)."""
    if key not in orbit_cache:
        orbit_cache[key] = tuple_orbits(s, a_img, m, budget, backend)
    reps, _ = orbit_cache[key]
    evidence = {}
    for b in reps:
        carry = tuple(dict.fromkeys(tuple(a_img) + b))
        res = find_constrained_automorphism(s, fix=a_img, carry=carry, target=target, budget=budget, backend=backend)
        if res.found:
            evidence[b] = res.automorphism
        elif res.indeterminate:
            return evidence, None, True
        else:
            return evidence, b, False
    return evidence, None, False


def check_chain_condition(chain: ChainFamily, m: int, budget=None, designated=None, backend=None):
    """For each ``m``-element constant set of an early member, find the least
    position ``i < N`` such that for every later ``j`` and every ``b`` in
    ``S_j^m`` some automorphism of ``S_j`` fixes the constants and maps them
    and ``b`` into the image of ``S_i``.  ``b`` ranges over orbit
    representatives of the constant-fixing automorphisms.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    N = chain.length
    d = designated or designated_position(chain, m)
    orbit_cache: dict = {}
    certs = []
    for a in itertools.combinations(range(chain.member(d).size), m):
        cert = OrbitCertificate(1, a, chain.labels[d - 1])
        for i in range(d, N):
            evidence = {}
            ok = True
            for j in range(i + 1, N + 1):
                s = chain.member(j)
                a_img = tuple(chain.composite(d, j)[x] for x in a)
                target = chain.image(i, j)
                try:
                    ev, bad, indet = _verify_position(s, a_img, target, m, orbit_cache, (a, j), budget, backend)
                except BudgetExceeded:
                    ev, bad, indet = {}, None, True
                if indet:
                    cert.indeterminate.append((chain.labels[i - 1], chain.labels[j - 1]))
                    ok = False
                    break
                if bad is not None:
                    cert.failures.append((chain.labels[i - 1], chain.labels[j - 1], bad))
                    ok = False
                    break
                evidence[chain.labels[j - 1]] = ev
                cert.constant_images[chain.labels[j - 1]] = a_img
                cert.targets[chain.labels[j - 1]] = target
            if ok:
                cert.chosen = chain.labels[i - 1]
                cert.evidence = evidence
                cert.orbit_witness = {
                    chain.labels[j - 1]: orbit_cache[(a, j)][1] for j in range(i + 1, N + 1)
                }
                cert.indeterminate = []
                break
        if cert.chosen is None and not cert.failures and not cert.indeterminate:
            cert.note = "horizon too short: no position strictly below the horizon"
        certs.append(cert)
    return certs


def check_ambient_condition(chain: ChainFamily, ambient: FiniteStructure, m: int, embedding=None,
                            budget=None, designated=None, backend=None):
    """As the chain condition, but automorphisms act on ``ambient``, a finite stand-in
    for the limit structure that contains the last chain member via
    ``embedding`` (default: the inclusion ``e -> e``).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    N = chain.length
    last = chain.member(N)
    emb = tuple(embedding) if embedding is not None else tuple(range(last.size))
    if not is_substructure(last, ambient, emb):
        raise StructureError("the last chain member does not embed into the ambient structure")
    d = designated or designated_position(chain, m)
    orbit_cache: dict = {}
    certs = []
    for a in itertools.combinations(range(chain.member(d).size), m):
        cert = OrbitCertificate(2, a, chain.labels[d - 1],
                                note="ambient is a finite stand-in for the limit structure")
        a_img = tuple(emb[chain.composite(d, N)[x]] for x in a)
        for i in range(d, N + 1):
            target = frozenset(emb[y] for y in chain.composite(i, N))
            try:
                ev, bad, indet = _verify_position(ambient, a_img, target, m, orbit_cache, (a, "ambient"), budget, backend)
            except BudgetExceeded:
                ev, bad, indet = {}, None, True
            if indet:
                cert.indeterminate.append((chain.labels[i - 1], "ambient"))
                continue
            if bad is not None:
                cert.failures.append((chain.labels[i - 1], "ambient", bad))
                continue
            cert.chosen = chain.labels[i - 1]
            cert.evidence = {"ambient": ev}
            cert.orbit_witness = {"ambient": orbit_cache[(a, "ambient")][1]}
            cert.constant_images = {"ambient": a_img}
            cert.targets = {"ambient": target}
            cert.indeterminate = []
            break
        certs.append(cert)
    return certs


def recheck_certificate(cert: OrbitCertificate, structures: dict, samples: int = 10, seed: int = 0) -> bool:
    """Re-verify a certificate on sampled non-representative tuples.

    ``structures`` maps each evidence key to the structure it lives in.  For a
    sampled ``b`` with orbit witness ``(rep, g)`` the automorphism
    ``f_rep o g^-1`` is rebuilt and checked directly.
    """
    rng = random.Random(seed)
    for key, ev in cert.evidence.items():
        s = structures[key]
        a_img = cert.constant_images[key]
        target = cert.targets[key]
        witness = cert.orbit_witness[key]
        for rep, f in ev.items():
            if not (is_automorphism(s, f) and all(f[x] == x for x in a_img)):
                return False
            if not all(f[x] in target for x in tuple(a_img) + rep):
                return False
        others = sorted(t for t, (rep, _) in witness.items() if t != rep)
        picked = others if len(others) <= samples else rng.sample(others, samples)
        for t in picked:
            rep, g = witness[t]
            h = compose_perm(ev[rep], invert_perm(g))
            if not is_automorphism(s, h):
                return False
            if any(h[x] != x for x in a_img):
                return False
            if not all(h[x] in target for x in tuple(a_img) + t):
                return False
    return True
