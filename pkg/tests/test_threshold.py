import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepnorm.derivation import check_derivation
from deepnorm.formula import F, T, canonical, conj, disj, evaluate, parse, size
from deepnorm.threshold import (
    GAMMA_RULES,
    default_atoms,
    delta,
    gamma,
    is_trivial,
    pseudo_high,
    pseudo_low,
    theta,
    theta_size,
    upsilon,
)


def test_one_atom():
    assert [theta(k, ["a"]) for k in range(3)] == [T, parse("a"), F]


@pytest.mark.parametrize("n", range(1, 9))
def test_extreme_levels(n):
    atoms = default_atoms(n)
    assert theta(0, atoms) == T
    assert theta(n + 1, atoms) == F
    assert canonical(theta(1, atoms)) == canonical(disj(*map(parse, atoms)))
    assert canonical(theta(n, atoms)) == canonical(conj(*map(parse, atoms)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n + 1), st.lists(st.booleans(), min_size=n, max_size=n))))
def test_counts_true_atoms(case):
    n, k, bits = case
    atoms = default_atoms(n)
    assert evaluate(theta(k, atoms), dict(zip(atoms, bits))) == (sum(bits) >= k)


def test_atoms_must_be_distinct_and_present():
    with pytest.raises(ValueError):
        theta(1, ["a", "a"])
    with pytest.raises(ValueError):
        theta(1, [])


@pytest.mark.parametrize("n", range(1, 20))
def test_size_recursion_matches(n):
    atoms = default_atoms(n)
    for k in range(n + 2):
        assert size(theta(k, atoms)) == theta_size(k, n)


@pytest.mark.parametrize("n", range(1, 7))
def test_gamma_connects_pseudocomplements(n):
    atoms = default_atoms(n)
    for k, l in itertools.product(range(n + 1), range(1, n + 1)):
        d = gamma(k, l, atoms)
        rep = check_derivation(d, GAMMA_RULES)
        assert rep.valid, (k, l, rep.failures[:1])
        assert d.premiss == pseudo_low(k, l, atoms)
        assert d.conclusion == pseudo_high(k + 1, l, atoms)


def test_gamma_rejects_bad_indices():
    with pytest.raises(IndexError):
        gamma(1, 0, default_atoms(3))
    with pytest.raises(IndexError):
        gamma(1, 4, default_atoms(3))
    with pytest.raises(ValueError):
        gamma(-1, 1, default_atoms(3))


def test_side_blocks():
    atoms = default_atoms(3)
    d = delta(1, 1, atoms)
    assert d.premiss == F and d.conclusion == parse("[a2.a3]")
    assert check_derivation(d).valid
    assert is_trivial(upsilon(0, 1, atoms))
    for k, l in itertools.product(range(5), range(1, 4)):
        for block in (delta(k, l, atoms), upsilon(k, l, atoms)):
            assert check_derivation(block).valid
