import pytest
from hypothesis import given

from deepnorm.formula import (
    F,
    T,
    And,
    Atom,
    Or,
    ParseError,
    canonical,
    dual,
    equivalent,
    evaluate,
    parse,
    render,
    simplify,
    size,
    substitute,
    substitute_at,
)
from strategies import assignments, formulas


@given(formulas())
def test_render_parse_round_trip(f):
    assert parse(render(f)) == f


@given(formulas())
def test_canonical_is_idempotent(f):
    c = canonical(f)
    assert canonical(c) == c


@given(formulas(), assignments)
def test_canonical_and_simplify_keep_truth(f, env):
    v = evaluate(f, env)
    assert evaluate(canonical(f), env) == v
    assert evaluate(simplify(f), env) == v


@given(formulas(), assignments)
def test_dual_negates(f, env):
    assert evaluate(dual(f), env) != evaluate(f, env)
    assert dual(dual(f)) == f


@given(formulas(), formulas())
def test_commuted_operands_are_equivalent(f, g):
    assert equivalent(Or(f, g), Or(g, f))
    assert equivalent(And(f, And(g, f)), And(And(f, g), f))


@pytest.mark.parametrize("text,n", [("a", 1), ("t", 1), ("[a.b]", 2), ("(a.-b)", 2), ("[(a.b).t]", 3)])
def test_size_counts_leaves(text, n):
    assert size(parse(text)) == n


def test_only_neutral_units_vanish():
    assert canonical(parse("[(a.t).f]")) == Atom("a")
    # absorption is not an equation, so (a.f) keeps its atom
    assert canonical(parse("(a.f)")) != F
    assert not equivalent(parse("[a.t]"), T)


def test_substitute_polarities():
    f = parse("[a.(-a.b)]")
    assert substitute(f, {"a": parse("(c.b)")}) == parse("[(c.b).(-a.b)]")
    assert substitute(f, {Atom("a", True): Atom("c")}) == parse("[a.(-c.b)]")


def test_substitute_at_writes_duals_on_negated_leaves():
    f = parse("[a.-a]")
    assert substitute_at(f, {(1,): parse("(b.c)")}) == parse("[a.[-b.-c]]")
    with pytest.raises(ValueError):
        substitute_at(f, {(0,): T}, name="b")


@pytest.mark.parametrize("bad", ["", "[a.b", "(a.b))", "[a..b]", "-"])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse(bad)
