import random

import pytest

from deepnorm.corpus import generate_corpus
from deepnorm.derivation import Builder, Rule, check_derivation
from deepnorm.flow import (
    Edge,
    Flow,
    Kind,
    PolarityError,
    Vertex,
    check_confluence,
    check_labels,
    components,
    count_polarities_exhaustive,
    extract_flow,
    isomorphic,
    normal_form,
    polarity_assignments,
    random_flow,
    reduce_derivation,
    substitute_via_flow,
    validate,
)
from deepnorm.formula import T, And, Atom, Or, canonical, parse

a, na = Atom("a"), Atom("a", True)


def _cut_proof():
    """Two identities on a, joined by a cut; the conclusion is [a.-a]."""
    b = Builder(T).eq(And(T, T)).apply(Rule.AID, (0,), a).apply(Rule.AID, (1,), a)
    b.apply(Rule.S).eq(Or(And(a, Or(na, a)), na)).apply(Rule.S, (0,))
    return b.apply(Rule.AIU, (0, 0)).eq(Or(a, na)).build()


def test_extraction_counts_vertices():
    d = _cut_proof()
    assert check_derivation(d).valid
    fl, omap = extract_flow(d)
    assert validate(fl) is None and check_labels(fl) is None
    assert [fl.count(k) for k in (Kind.IDENTITY, Kind.CUT)] == [2, 1]
    assert len(fl.edges) == 4
    assert len(components(fl)) == 1
    assert set(omap.lines[-1]) == {(0,), (1,)}
    assert all(fl.edge(e).down is None for e in omap.lines[-1].values())


def test_cycle_is_rejected():
    fl = Flow(
        (Vertex(0, Kind.CONTRACTION), Vertex(1, Kind.COCONTRACTION)),
        (Edge(0, a, up=0, down=1), Edge(1, a, up=1, down=0), Edge(2, a, up=1, bottom=0), Edge(3, a, down=0, top=0)),
    )
    assert validate(fl) == "cycle found"


def test_identity_into_contraction_has_no_polarity():
    fl = Flow(
        (Vertex(0, Kind.IDENTITY), Vertex(1, Kind.CONTRACTION)),
        (Edge(0, a, up=0, down=1), Edge(1, na, up=0, down=1), Edge(2, a, up=1, bottom=0)),
    )
    assert validate(fl) == "no polarity assignment exists"
    assert check_labels(fl) is not None
    with pytest.raises(PolarityError):
        polarity_assignments(fl)
    assert count_polarities_exhaustive(fl) == 0


def test_wrong_arity_is_rejected():
    fl = Flow((Vertex(0, Kind.CUT),), (Edge(0, a, down=0, top=0),))
    assert "arity" in validate(fl)


@pytest.mark.parametrize("seed", range(20))
def test_polarity_count_matches_brute_force(seed):
    fl = random_flow(random.Random(seed), max_vertices=8, max_edges=14)
    assert validate(fl) is None
    pol = polarity_assignments(fl)
    assert pol.count == 2 ** len(components(fl)) == count_polarities_exhaustive(fl)
    assert set(pol.assignment) == {e.id for e in fl.edges}


@pytest.mark.parametrize("seed", range(20))
def test_reductions_are_confluent(seed):
    fl = random_flow(random.Random(100 + seed), max_vertices=10)
    res = check_confluence(fl)
    assert res.confluent and res.exhaustive
    nf = normal_form(fl)
    assert validate(nf) is None


@pytest.mark.parametrize("i", range(6))
def test_derivation_reduction_tracks_the_graph(i):
    d = generate_corpus(seed=3, count=6, atom_budget=2, max_leaves=30)[i]
    out, fired = reduce_derivation(d)
    assert check_derivation(out).valid
    assert canonical(out.premiss) == T and out.conclusion == d.conclusion
    assert isomorphic(extract_flow(out)[0], normal_form(extract_flow(d)[0]))


def test_substitution_along_a_component():
    d = _cut_proof()
    fl, omap = extract_flow(d)
    beta = parse("[b.c]")
    out = substitute_via_flow(d, components(fl)[0], beta, a)
    assert check_derivation(out).valid
    assert canonical(out.premiss) == T
    assert out.conclusion == Or(beta, parse("(-b.-c)"))
    assert set(out.rule_counts()) <= {Rule.AID, Rule.AIU, Rule.ACU, Rule.S, Rule.M, Rule.EQ}


def test_substitution_defaults_to_the_positive_literal():
    d = _cut_proof()
    comp = components(extract_flow(d)[0])[0]
    assert substitute_via_flow(d, comp, parse("b")).conclusion == parse("[b.-b]")
