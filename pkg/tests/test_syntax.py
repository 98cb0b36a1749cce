import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thlim.evaluate import evaluate
from thlim.families import PARITY_ORDER, PURE_SET, GF2_SPACE, max_element_even, parity_order
from thlim.parser import (
    ArityError, FormulaSyntaxError, ParseError, UnboundVariableError, UnknownSymbolError, parse_formula,
)
from thlim.syntax import (
    And, App, Const, Eq, Exists, Forall, Not, Or, Rel, Var, free_vars, is_prenex, is_sentence,
    negate, prefix, quantifier_rank, to_prenex, to_text,
)


def test_parse_top_element_even():
    f = parse_formula("exists x. (E(x) & forall y. le(y,x))", PARITY_ORDER)
    x, y = Var("x"), Var("y")
    assert f == Exists("x", And(Rel("E", (x,)), Forall("y", Rel("le", (y, x)))))
    assert f == max_element_even()


def test_parse_reflexivity():
    assert parse_formula("forall x. x = x", PURE_SET) == Forall("x", Eq(Var("x"), Var("x")))


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError):
        parse_formula("exists x. P(x, x)", PARITY_ORDER)


def test_arity_mismatch():
    with pytest.raises(ArityError):
        parse_formula("forall x. le(x)", PARITY_ORDER)


def test_unbound_variable_is_distinct_error():
    with pytest.raises(UnboundVariableError):
        parse_formula("exists x. y = x", PURE_SET)


def test_syntax_error_has_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("exists x. (x = x", PURE_SET)
    assert info.value.pos == 16
    assert isinstance(info.value, ParseError)


def test_implication_desugars():
    f = parse_formula("forall x. E(x) -> le(x, x)", PARITY_ORDER)
    x = Var("x")
    assert f == Forall("x", Or(Not(Rel("E", (x,))), Rel("le", (x, x))))


def test_implication_is_right_associative():
    f = parse_formula("E(x) -> E(y) -> E(z)", PARITY_ORDER, free=["x", "y", "z"])
    ex, ey, ez = (Rel("E", (Var(v),)) for v in "xyz")
    assert f == Or(Not(ex), Or(Not(ey), ez))


def test_constants_and_functions():
    f = parse_formula("exists x. add(x, @c) = zero", GF2_SPACE)
    assert f == Exists("x", Eq(App("add", (Var("x"), Const("c"))), App("zero", ())))
    assert to_text(f) == "exists x. add(x, @c) = zero"


@pytest.mark.parametrize("text", [
    "exists x. E(x) & forall y. le(y, x)",
    "(exists x. E(x)) & exists y. E(y)",
    "forall x. !E(x) | exists y. le(x, y) & x != y",
    "!(exists x. E(x)) | forall x. E(x) & E(x)",
    "(forall x. E(x)) & E(@a)",
    "(E(@a) | E(@b)) & E(@c)",
    "E(@a) | E(@b) & E(@c)",
    "!!E(@a)",
    "true & !false",
])
def test_print_parse_fixed_points(text):
    f = parse_formula(text, PARITY_ORDER)
    assert to_text(f) == text
    assert parse_formula(to_text(f), PARITY_ORDER) == f


def test_rank_examples():
    assert quantifier_rank(max_element_even()) == 2
    assert quantifier_rank(parse_formula("E(@a)", PARITY_ORDER)) == 0
    three = parse_formula("exists x1. exists x2. exists x3. x1 != x2 & x1 != x3 & x2 != x3", PURE_SET)
    assert quantifier_rank(three) == 3


def test_rank_is_nesting_not_count():
    f = parse_formula("(exists x. E(x)) & exists y. E(y)", PARITY_ORDER)
    assert quantifier_rank(f) == 1


def test_prenex_of_negated_existential():
    f = parse_formula("!exists x. E(x)", PARITY_ORDER)
    assert to_text(to_prenex(f)) == "forall x. !E(x)"


def test_prenex_of_disjoint_conjunction():
    f = parse_formula("(exists x. E(x)) & (exists y. E(y))", PARITY_ORDER)
    assert to_text(to_prenex(f)) == "exists x. exists y. E(x) & E(y)"


def test_prenex_top_element_agrees_on_small_orders():
    f = max_element_even()
    g = to_prenex(f)
    assert is_prenex(g)
    for n in range(1, 6):
        assert evaluate(parity_order(n), f) == evaluate(parity_order(n), g)


def test_prenex_renames_clashing_binders():
    f = parse_formula("(exists x. E(x)) & forall x. le(x, x)", PARITY_ORDER)
    g = to_prenex(f)
    assert is_prenex(g)
    names = [v for _, v in prefix(g)[0]]
    assert len(names) == len(set(names)) == 2


def test_negate_is_dual():
    f = max_element_even()
    assert to_text(negate(f)) == "forall x. !E(x) | exists y. !le(y, x)"
    for n in range(1, 6):
        assert evaluate(parity_order(n), negate(f)) != evaluate(parity_order(n), f)


# -- random formulas ------------------------------------------------------------

VARS = ["x", "y", "z"]


def _terms(bound):
    return st.sampled_from([Var(v) for v in bound] + [Const("a")])


@st.composite
def formulas(draw, bound=(), depth=3):
    choices = ["atom"] if depth == 0 else ["atom", "not", "and", "or", "quant"]
    kind = draw(st.sampled_from(choices))
    if kind == "atom":
        if draw(st.booleans()):
            return Rel("E", (draw(_terms(bound)),))
        return Rel("le", (draw(_terms(bound)), draw(_terms(bound))))
    if kind == "not":
        return Not(draw(formulas(bound, depth - 1)))
    if kind in ("and", "or"):
        cls = And if kind == "and" else Or
        return cls(draw(formulas(bound, depth - 1)), draw(formulas(bound, depth - 1)))
    free = [v for v in VARS if v not in bound]
    if not free:
        return draw(formulas(bound, depth - 1))
    v = draw(st.sampled_from(free))
    q = draw(st.sampled_from([Exists, Forall]))
    return q(v, draw(formulas(tuple(bound) + (v,), depth - 1)))


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_round_trip(f):
    assert is_sentence(f)
    assert parse_formula(to_text(f), PARITY_ORDER) == f


@settings(max_examples=150, deadline=None)
@given(formulas(), st.integers(1, 4), st.integers(0, 3))
def test_prenex_preserves_truth(f, n, c):
    s = parity_order(n).with_names({"a": min(c, n - 1)})
    g = to_prenex(f)
    assert is_prenex(g)
    assert not free_vars(g)
    assert quantifier_rank(g) >= quantifier_rank(f)
    assert evaluate(s, f) == evaluate(s, g)


@settings(max_examples=150, deadline=None)
@given(formulas(), st.integers(1, 4))
def test_negate_flips_truth(f, n):
    s = parity_order(n).with_names({"a": 0})
    assert evaluate(s, negate(f)) == (not evaluate(s, f))
