import itertools

import pytest

from thlim.evaluate import evaluate
from thlim.families import ORDER, PARITY_ORDER, GF2_SPACE, linear_order, pure_set, parity_order
from thlim.games import EFGame, ef_equivalent, elementary_up_to_rank
from thlim.parser import parse_formula as parse
from thlim.pools import SentencePool, probe_set, type_pool
from thlim.structure import FiniteStructure, Signature, StructureError


def test_sets_three_and_five_agree_at_two_rounds():
    assert ef_equivalent(pure_set(3), pure_set(5), 2)
    assert not ef_equivalent(pure_set(2), pure_set(5), 3)


def test_orders_two_and_three_differ_at_two_rounds():
    assert not ef_equivalent(linear_order(2), linear_order(3), 2)
    assert ef_equivalent(linear_order(2), linear_order(3), 1)
    middle = parse("exists x. (exists y. y != x & le(y, x)) & (exists y. y != x & le(x, y))", ORDER)
    assert evaluate(linear_order(3), middle) and not evaluate(linear_order(2), middle)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_identical_structures(k):
    for s in (pure_set(3), parity_order(4), linear_order(3)):
        assert ef_equivalent(s, s, k)


def test_zero_rounds_checks_constants():
    sig = Signature(relations=(("P", 1),))
    a = FiniteStructure.from_tables(sig, 2, relations={"P": [(0,)]}, names={"c": 0})
    b = FiniteStructure.from_tables(sig, 2, relations={"P": [(0,)]}, names={"c": 1})
    assert not ef_equivalent(a, b, 0)
    assert ef_equivalent(a, a, 0)


def test_signature_mismatch():
    with pytest.raises(StructureError):
        EFGame(pure_set(2), linear_order(2))
    with pytest.raises(ValueError):
        ef_equivalent(pure_set(2), pure_set(2), -1)


def test_functions_are_closed():
    # GF(2)^1 and GF(2)^2 differ already at one round: x + x = 0 always, but
    # the generated substructures have different sizes only after two picks.
    from thlim.families import vector_space
    assert ef_equivalent(vector_space(2, 1), vector_space(2, 2), 1)
    assert not ef_equivalent(vector_space(2, 1), vector_space(2, 2), 2)


def _agree_on_pool(a, b, pool):
    return all(evaluate(a, f) == evaluate(b, f) for f in pool.sentences)


@pytest.mark.parametrize("sig", [Signature(), ORDER, PARITY_ORDER, GF2_SPACE])
def test_games_agree_with_type_pools(sig):
    members = [s for s in probe_set(sig, max_size=4) if s.size <= 4]
    for k in (1, 2):
        pool = type_pool(sig, k, probes=members)
        for a, b in itertools.combinations_with_replacement(members, 2):
            assert ef_equivalent(a, b, k) == _agree_on_pool(a, b, pool), (a.size, b.size, k)


def test_elementary_up_to_rank_examples():
    assert elementary_up_to_rank(pure_set(3), pure_set(5), range(3), 1)
    assert not elementary_up_to_rank(linear_order(2), linear_order(3), range(2), 1)
    s = parity_order(4)
    assert elementary_up_to_rank(s, s, range(4), 2)


def test_elementary_up_to_rank_with_explicit_pool():
    pool = SentencePool.explicit(ORDER, [parse("exists y. le(x, y) & x != y", ORDER, free=["x"])])
    assert not elementary_up_to_rank(linear_order(2), linear_order(3), (0, 1), 1, pool)
    # onto the top two elements, "has a strict successor" is preserved for both parameters
    assert elementary_up_to_rank(linear_order(2), linear_order(3), (1, 2), 1, pool)
    assert elementary_up_to_rank(linear_order(1), linear_order(3), (2,), 1, pool)


def test_elementary_up_to_rank_errors():
    with pytest.raises(StructureError):
        elementary_up_to_rank(linear_order(2), linear_order(3), (1, 0), 1)
    sentences_only = SentencePool.explicit(ORDER, [parse("exists x. le(x, x)", ORDER)])
    with pytest.raises(ValueError):
        elementary_up_to_rank(linear_order(2), linear_order(3), (0, 1), 1, sentences_only)
