"""Built-in chain generators, closed-form truth oracles and witness sentences.

Concrete families produce :class:`ChainFamily` objects whose embeddings are
all the inclusion ``e -> e``: every generator numbers the elements of member
``n`` so that member ``n - 1`` occupies the first positions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .structure import ChainFamily, FiniteStructure, Signature, StructureError, validate_chain
from .syntax import And, App, Eq, Exists, Forall, Formula, Not, Rel, Truth, Var, conj, disj


class UnknownFamilyError(KeyError):
    pass


class OracleOnlyFamilyError(ValueError):
    pass


# -- signatures --------------------------------------------------------------

PURE_SET = Signature()
ORDER = Signature(relations=(("le", 2),))
PARITY_ORDER = Signature(relations=(("le", 2), ("E", 1)))
GF2_SPACE = Signature(functions=(("add", 2), ("zero", 0)))
GFP_SPACE = Signature(functions=(("add", 2), ("neg", 1), ("zero", 0)))
ABELIAN_GROUP = GFP_SPACE
SYM_GROUP = Signature(functions=(("mul", 2), ("inv", 1), ("one", 0)))


# -- primes ------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def nth_prime(k: int) -> int:
    """``nth_prime(1) == 2``."""
    if k < 1:
        raise ValueError("primes are indexed from 1")
    count = 0
    n = 1
    while count < k:
        n += 1
        if is_prime(n):
            count += 1
    return n


def prime_index(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sum(1 for q in range(2, p + 1) if is_prime(q))


def prime_factors(m: int) -> list[int]:
    """Distinct prime factors by trial division, ascending."""
    if m < 1:
        raise ValueError("m must be positive")
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


# -- concrete members --------------------------------------------------------

def pure_set(n: int) -> FiniteStructure:
    return FiniteStructure.from_tables(PURE_SET, n)


def linear_order(n: int) -> FiniteStructure:
    le = [(x, y) for x in range(n) for y in range(n) if x <= y]
    return FiniteStructure.from_tables(ORDER, n, relations={"le": le})


def parity_order(n: int) -> FiniteStructure:
    """``{1..n}`` with its order and the even predicate; element ``e`` is ``e + 1``."""
    le = [(x, y) for x in range(n) for y in range(n) if x <= y]
    even = [(x,) for x in range(n) if (x + 1) % 2 == 0]
    return FiniteStructure.from_tables(PARITY_ORDER, n, relations={"le": le, "E": even})


def _digits(x, p, dim):
    return [(x // p**t) % p for t in range(dim)]


def _undigits(ds, p):
    return sum(d * p**t for t, d in enumerate(ds))


def vector_space(p: int, dim: int) -> FiniteStructure:
    """``(Z/p)^dim``; element ``x`` has coordinates given by its base-``p`` digits."""
    size = p**dim
    add = []
    for x in range(size):
        dx = _digits(x, p, dim)
        for y in range(size):
            dy = _digits(y, p, dim)
            add.append(_undigits([(a + b) % p for a, b in zip(dx, dy)], p))
    if p == 2:
        return FiniteStructure.from_tables(GF2_SPACE, size, functions={"add": add, "zero": [0]})
    neg = [_undigits([(-a) % p for a in _digits(x, p, dim)], p) for x in range(size)]
    return FiniteStructure.from_tables(GFP_SPACE, size, functions={"add": add, "neg": neg, "zero": [0]})


def _sym_elements(n):
    if n <= 1:
        return [tuple(range(n))] if n == 1 else [()]
    prev = _sym_elements(n - 1)
    head = [p + (n - 1,) for p in prev]
    seen = set(head)
    rest = [p for p in itertools.permutations(range(n)) if p not in seen]
    return head + rest


def symmetric_group(n: int) -> FiniteStructure:
    """``Sym({0..n-1})`` under composition ``(g*h)(x) = g(h(x))``.

    Permutations fixing ``n - 1`` come first, so ``Sym(n-1)`` is an initial
    segment.
    """
    elems = _sym_elements(n)
    index = {p: k for k, p in enumerate(elems)}
    size = len(elems)
    mul = [index[tuple(g[h[x]] for x in range(n))] for g in elems for h in elems]
    inv = []
    for g in elems:
        gi = [0] * n
        for x, y in enumerate(g):
            gi[y] = x
        inv.append(index[tuple(gi)])
    one = index[tuple(range(n))]
    return FiniteStructure.from_tables(SYM_GROUP, size, functions={"mul": mul, "inv": inv, "one": [one]})


def sym_permutation(n: int, k: int) -> tuple[int, ...]:
    """The permutation of ``{0..n-1}`` that element ``k`` of ``symmetric_group(n)`` denotes."""
    return _sym_elements(n)[k]


# -- oracles -----------------------------------------------------------------

def rational_subgroup_oracle(m: int, n: int) -> bool:
    """Truth of ``forall x. exists y. m*y = x`` in ``Z[1/(p_1...p_n)^n]``.

    Division by ``m`` is possible iff every prime factor of ``m`` is among the
    first ``n`` primes.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return all(prime_index(p) <= n for p in prime_factors(m))


def free_abelian_subset_sum_oracle(m: int, r: int) -> bool:
    """Truth of the subset-sum sentence with ``m`` variables in ``Z^r``.

    Some nonempty subset sum of ``x_1..x_m`` lies in ``2 Z^r`` iff the images
    in ``(Z/2)^r`` are linearly dependent, which is forced iff ``m > r``.
    """
    if m < 1 or r < 0:
        raise ValueError("need m >= 1 and r >= 0")
    return m > r


def weaker_rank_bound(m: int, r: int) -> bool:
    """A weaker sufficient bound for the same sentence: true iff ``r < m - 1``."""
    return r < m - 1


# -- witness sentences -------------------------------------------------------

def distinct_elements_witness(m: int) -> Formula:
    """``exists x1 ... exists xm`` with all ``xk`` pairwise distinct."""
    if m < 1:
        raise ValueError("m must be positive")
    xs = [f"x{k}" for k in range(1, m + 1)]
    body = conj(Not(Eq(Var(a), Var(b))) for a, b in itertools.combinations(xs, 2))
    for v in reversed(xs):
        body = Exists(v, body)
    return body


def _multiple(k: int, t) -> object:
    out = t
    for _ in range(k - 1):
        out = App("add", (out, t))
    return out


def divisibility_witness(m: int) -> Formula:
    """``forall x. exists y. y + ... + y (m times) = x``."""
    if m < 1:
        raise ValueError("m must be positive")
    return Forall("x", Exists("y", Eq(_multiple(m, Var("y")), Var("x"))))


def subset_sum_witness(m: int) -> Formula:
    """For all ``x1..xm`` some nonempty subset sum is twice an element."""
    if m < 1:
        raise ValueError("m must be positive")
    xs = [Var(f"x{k}") for k in range(1, m + 1)]
    cases = []
    for size in range(1, m + 1):
        for subset in itertools.combinations(xs, size):
            total = subset[0]
            for x in subset[1:]:
                total = App("add", (total, x))
            cases.append(Exists("z", Eq(App("add", (Var("z"), Var("z"))), total)))
    body = disj(cases)
    for x in reversed(xs):
        body = Forall(x.name, body)
    return body


def max_element_even() -> Formula:
    """``exists x. E(x) & forall y. le(y, x)``: the top element is even."""
    x, y = Var("x"), Var("y")
    return Exists("x", And(Rel("E", (x,)), Forall("y", Rel("le", (y, x)))))


# -- catalog -----------------------------------------------------------------

@dataclass(frozen=True)
class Eventually:
    """Declared eventual behaviour of a schema instance along chain indices."""

    kind: str  # "true-from" | "false-from" | "oscillating"
    start: int = 1
    description: str = ""

    def __str__(self):
        if self.kind == "oscillating":
            return f"oscillating({self.description})"
        return f"eventually-{self.kind}({self.start})"

    def value_at(self, n: int) -> Optional[bool]:
        if self.kind == "true-from" and n >= self.start:
            return True
        if self.kind == "false-from" and n >= self.start:
            return False
        return None


@dataclass(frozen=True)
class Schema:
    name: str
    parameter: str
    sentence: Callable[[int], Formula]
    decide: Callable[[int, int], bool]
    eventual: Callable[[int], Eventually]
    note: str = ""


@dataclass(frozen=True)
class Family:
    name: str
    description: str
    signature: Signature
    member: Optional[Callable[..., FiniteStructure]] = None
    schemas: dict = field(default_factory=dict)
    landmarks: tuple = ()
    defaults: dict = field(default_factory=dict)

    @property
    def concrete(self) -> bool:
        return self.member is not None

    @property
    def kind(self) -> str:
        if self.concrete and self.schemas:
            return "chain+oracle"
        return "chain" if self.concrete else "oracle"


def _distinct_schema(size_at: Callable[[int], int], first_index_at_least: Callable[[int], int]):
    return Schema(
        "distinct", "m", distinct_elements_witness,
        lambda m, n: size_at(n) >= m,
        lambda m: Eventually("true-from", first_index_at_least(m)),
        "true iff the member has at least m elements",
    )


def _first_power_at_least(p, m):
    n = 1
    while p**n < m:
        n += 1
    return n


def _div_eventual(m):
    ps = prime_factors(m)
    return Eventually("true-from", prime_index(ps[-1]) if ps else 1)


FAMILIES: dict[str, Family] = {}


def _register(f: Family):
    FAMILIES[f.name] = f


_register(Family(
    "finite-sets", "pure sets {0..n-1}", PURE_SET, lambda n: pure_set(n),
    schemas={"distinct": _distinct_schema(lambda n: n, lambda m: m)},
    landmarks=(distinct_elements_witness(2),),
))
_register(Family(
    "parity-order", "{1..n} with <= and the even predicate E", PARITY_ORDER, lambda n: parity_order(n),
    landmarks=(max_element_even(),),
))
_register(Family("linear-order", "{0..n-1} with <=", ORDER, lambda n: linear_order(n)))
_register(Family(
    "gf2-vector-space", "(Z/2)^n under addition", GF2_SPACE, lambda n: vector_space(2, n),
    schemas={"distinct": _distinct_schema(lambda n: 2**n, lambda m: _first_power_at_least(2, m))},
))
_register(Family(
    "gfp-vector-space", "(Z/p)^n under addition and negation", GFP_SPACE,
    lambda n, p=3: vector_space(p, n), defaults={"p": 3},
))
_register(Family(
    "sym-support", "Sym({1..n}) under composition, inverse, identity", SYM_GROUP,
    lambda n: symmetric_group(n),
))
_register(Family(
    "rat-subgroup", "Z[1/(p_1...p_n)^n] inside Q (oracle only)", ABELIAN_GROUP,
    schemas={"div": Schema(
        "div", "m", divisibility_witness, lambda m, n: rational_subgroup_oracle(m, n), _div_eventual,
        "true iff every prime factor of m is among the first n primes",
    )},
))
_register(Family(
    "free-abelian", "Z^n, free abelian of rank n (oracle only)", ABELIAN_GROUP,
    schemas={"subset-sum": Schema(
        "subset-sum", "m", subset_sum_witness, lambda m, n: free_abelian_subset_sum_oracle(m, n),
        lambda m: Eventually("false-from", m),
        "true iff rank < m; subsets range over nonempty T",
    )},
))


def family_catalog() -> list[Family]:
    return [FAMILIES[k] for k in sorted(FAMILIES)]


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


def build_chain(name: str, horizon: int, **params) -> ChainFamily:
    fam = get_family(name)
    if not fam.concrete:
        raise OracleOnlyFamilyError(f"{name} has infinite members and is available only through oracles")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    kw = {**fam.defaults, **params}
    members = tuple(fam.member(n, **kw) for n in range(1, horizon + 1))
    embs = tuple(tuple(range(members[k].size)) for k in range(horizon - 1))
    chain = ChainFamily(fam.signature, members, embs, name)
    problems = validate_chain(chain)
    if problems:
        raise StructureError(f"family {name} produced an invalid chain: {problems[0]}")
    return chain


def oracle_decide(family: str, schema: str, m: int, n: int) -> bool:
    return get_family(family).schemas[schema].decide(m, n)
