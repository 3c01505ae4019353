import random

import pytest
from hypothesis import given, settings

from deepnorm.corpus import random_proof
from deepnorm.derivation import (
    GENERAL,
    SKS,
    Builder,
    Derivation,
    Rule,
    SchemaError,
    Step,
    check_derivation,
    check_step,
    compose_conj,
    compose_disj,
    contract_down,
    contract_up,
    cut,
    expand_general,
    expand_nonatomic,
    from_json,
    from_text,
    identity,
    in_context,
    restep,
    single_step,
    to_json,
    to_text,
    weaken_down,
    weaken_up,
)
from deepnorm.formula import F, T, And, Atom, Context, Or, dual, equivalent, parse, size
from strategies import formulas

ATOMIC = SKS


def _atomic_and_valid(d: Derivation) -> bool:
    return check_derivation(d, ATOMIC).valid


@settings(max_examples=60, deadline=None)
@given(formulas(10))
def test_identity_and_cut_are_atomic(beta):
    i, c = identity(beta), cut(beta)
    assert _atomic_and_valid(i) and _atomic_and_valid(c)
    assert i.premiss == T and i.conclusion == Or(beta, dual(beta))
    assert c.premiss == And(beta, dual(beta)) and c.conclusion == F


@settings(max_examples=60, deadline=None)
@given(formulas(8))
def test_structural_expansions_are_atomic(alpha):
    for d, top, bottom in [
        (weaken_down(alpha), F, alpha),
        (weaken_up(alpha), alpha, T),
        (contract_down(alpha), Or(alpha, alpha), alpha),
        (contract_up(alpha), alpha, And(alpha, alpha)),
    ]:
        assert _atomic_and_valid(d)
        assert equivalent(d.premiss, top) and equivalent(d.conclusion, bottom)


def test_rule_schemas():
    assert single_step(Rule.S, parse("(a.[b.c])")).conclusion == parse("[(a.b).c]")
    assert single_step(Rule.M, parse("[(a.b).(c.d)]")).conclusion == parse("([a.c].[b.d])")
    assert single_step(Rule.AIU, parse("(-a.a)")).conclusion == F
    assert single_step(Rule.AID, T, (), Atom("b")).conclusion == parse("[b.-b]")
    with pytest.raises(SchemaError):
        single_step(Rule.ACD, parse("[a.b]"))
    assert check_step(Step(Rule.S, (), parse("(a.[b.c])"), parse("[(a.c).b]")))


def test_context_must_be_preserved():
    bad = Derivation.from_steps(parse("[x.(a.[b.c])]"), [Step(Rule.S, (1,), parse("[x.(a.[b.c])]"), parse("[y.[(a.b).c]]"))])
    rep = check_derivation(bad)
    assert not rep.valid and rep.failures[0][0] == 0


def test_allowed_rules_are_enforced():
    d = single_step(Rule.AIU, parse("(a.-a)"))
    assert check_derivation(d).valid
    assert not check_derivation(d, SKS - {Rule.AIU}).valid


def test_compositions():
    d1 = single_step(Rule.S, parse("(a.[b.c])"))
    d2 = single_step(Rule.ACD, parse("[a.a]"))
    for comp, kind in [(compose_conj, And), (compose_disj, Or)]:
        d = comp(d1, d2)
        assert check_derivation(d).valid
        assert d.premiss == kind(d1.premiss, d2.premiss)
        assert d.conclusion == kind(d1.conclusion, d2.conclusion)
    put = in_context(Context(parse("[x.f]"), (1,)), d1)
    assert put.premiss == parse("[x.(a.[b.c])]") and check_derivation(put).valid


def test_general_rules_expand():
    d = (
        Builder(parse("[(a.b).(a.b)]"))
        .apply(Rule.GCD)
        .apply(Rule.GCU)
        .apply(Rule.GWU, (0,))
        .build()
    )
    assert check_derivation(d).valid
    e = expand_general(d)
    assert check_derivation(e, ATOMIC).valid
    assert e.premiss == d.premiss and e.conclusion == d.conclusion
    assert not set(e.rule_counts()) & GENERAL
    with pytest.raises(SchemaError):
        expand_nonatomic(Step(Rule.S, (), parse("(a.[b.c])"), parse("[(a.b).c]")))


def test_builder_eq_rejects_inequivalent_targets():
    with pytest.raises(ValueError):
        Builder(parse("[a.b]")).eq(parse("(a.b)"))
    assert len(Builder(parse("[a.b]")).eq(parse("[b.a]")).build()) == 1
    assert len(Builder(parse("[a.b]")).eq(parse("[a.b]")).build()) == 0


def test_size_is_the_sum_of_line_sizes():
    d = single_step(Rule.S, parse("(a.[b.c])"))
    assert d.size == 2 * size(d.premiss)


@pytest.mark.parametrize("seed", range(5))
def test_serialisation_round_trips(seed):
    d = random_proof(random.Random(seed), ["a", "b"], max_leaves=30, moves=10)
    assert from_json(to_json(d)) == d
    assert from_text(to_text(d)) == d


def test_pinned_eq_survives_serialisation():
    f = parse("[a.a]")
    swap = Step(Rule.EQ, (), f, f, pin=(((0,), (1,)), ((1,), (0,))))
    assert swap.occ_map == {(0,): (1,), (1,): (0,)}
    d = Derivation.from_steps(f, [swap])
    assert from_text(to_text(d)).steps[0].pin == swap.pin
    assert from_json(to_json(d)).steps[0].pin == swap.pin


def test_restep_follows_substitution():
    f = parse("[a.a]")
    swap = Step(Rule.EQ, (), f, f, pin=(((0,), (1,)), ((1,), (0,))))
    # the left copy of a became (b.c), so it now moves as a block to the right
    p, c = parse("[(b.c).a]"), parse("[a.(b.c)]")
    moved = restep(swap, p, c)
    assert moved.occ_map == {(0, 0): (1, 0), (0, 1): (1, 1), (1,): (0,)}
    # a unit in place of a leaf leaves no occurrence behind
    assert restep(swap, parse("[t.a]"), parse("[a.t]")).occ_map == {(1,): (0,)}
    plain = restep(single_step(Rule.S, parse("(a.[b.c])")).steps[0], parse("(d.[b.c])"), parse("[(d.b).c]"))
    assert plain.rule is Rule.S and plain.pin is None


def test_worked_proof_through_medial_and_cut():
    a, na = Atom("a"), Atom("a", True)
    d = (
        Builder(T)
        .apply(Rule.AID, (), a)
        .eq(parse("[(a.t).(t.-a)]"))
        .apply(Rule.M)
        .eq(parse("([a.t].[-a.t])"))
        .apply(Rule.S)
        .eq(parse("[(-a.[a.t]).t]"))
        .apply(Rule.S, (0,))
        .eq(Or(And(a, na), T))
        .apply(Rule.AIU, (0,))
        .eq(T)
        .build()
    )
    rep = check_derivation(d)
    assert rep.valid and d.is_proof()
    assert rep.rule_multiset == {Rule.AID: 1, Rule.AIU: 1, Rule.M: 1, Rule.S: 2, Rule.EQ: 5}
