from hypothesis import strategies as st

from deepnorm.formula import F, T, And, Atom, Or

NAMES = ("a", "b", "c")

literals = st.builds(Atom, st.sampled_from(NAMES), st.booleans())
units = st.sampled_from((T, F))


def formulas(max_leaves: int = 12, with_units: bool = True):
    leaf = st.one_of(literals, units) if with_units else literals
    return st.recursive(
        leaf,
        lambda sub: st.one_of(st.builds(And, sub, sub), st.builds(Or, sub, sub)),
        max_leaves=max_leaves,
    )


assignments = st.fixed_dictionaries({n: st.booleans() for n in NAMES})
