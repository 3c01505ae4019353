"""Threshold formulae and the coweakening/weakening derivations between them."""

from __future__ import annotations

import math
import os
from functools import lru_cache
from typing import Sequence

from .derivation import (
    Builder,
    Derivation,
    Rule,
    compose_conj,
    compose_disj,
    weaken_down,
    weaken_up,
)
from .formula import F, T, And, Atom, Formula, Or, _nest, canonical, operands, substitute

MEMO_ENV = "DEEPNORM_MEMO_SIZE"
_MEMO = int(os.environ.get(MEMO_ENV, "65536")) or None

# constant from the divide-and-conquer size bound
H = 2 / (math.log2(3) - math.log2(2))


def atom_vector(names: Sequence[str | Atom]) -> tuple[str, ...]:
    out = []
    for x in names:
        if isinstance(x, Atom):
            if x.negated:
                raise ValueError("threshold atoms must be positive")
            x = x.name
        out.append(x)
    if len(set(out)) != len(out):
        raise ValueError(f"threshold atoms must be distinct: {out}")
    return tuple(out)


def default_atoms(n: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(1, n + 1))


def _flat(kind, parts: Sequence[Formula]) -> Formula:
    ops: list[Formula] = []
    for g in parts:
        ops.extend(operands(g) if type(g) is kind else [g])
    return _nest(kind, ops)


def theta(k: int, atoms: Sequence[str | Atom]) -> Formula:
    """θ_k over the atom vector, unit-simplified, disjuncts by decreasing left level."""
    return _theta(k, atom_vector(atoms))


@lru_cache(maxsize=_MEMO)
def _theta(k: int, atoms: tuple[str, ...]) -> Formula:
    n = len(atoms)
    if n == 0:
        raise ValueError("threshold formulae need at least one atom")
    if k == 0:
        return T
    if k > n:
        return F
    if n == 1:
        return Atom(atoms[0])
    p = n // 2
    q = n - p
    terms = []
    for i in range(min(k, p), -1, -1):
        j = k - i
        if j > q:
            break
        left, right = _theta(i, atoms[:p]), _theta(j, atoms[p:])
        if left == T:
            terms.append(right)
        elif right == T:
            terms.append(left)
        else:
            terms.append(_flat(And, [left, right]))
    return _flat(Or, terms)


def split(atoms: Sequence[str]) -> tuple[int, int]:
    p = len(atoms) // 2
    return p, len(atoms) - p


@lru_cache(maxsize=None)
def theta_size(k: int, n: int) -> int:
    """Leaf count of the simplified θ_k^n, by the defining recursion alone."""
    if k == 0 or k > n or n == 1:
        return 1
    p, q = n // 2, n - n // 2
    total = 0
    for i in range(0, p + 1):
        j = k - i
        if 0 <= j <= q:
            total += (theta_size(i, p) if i else 0) + (theta_size(j, q) if j else 0)
    return total


def size_bound(n: int) -> float:
    return n ** (H * math.log2(n)) if n > 1 else 1.0


def theta_size_profile(n_max: int) -> list[dict]:
    """Rows (n, k, size) with the monotonicity and quasipolynomial checks attached."""
    rows = []
    for n in range(1, n_max + 1):
        peak = theta_size(n // 2 + 1, n)
        bound = size_bound(n)
        for k in range(0, n + 2):
            s = theta_size(k, n)
            rows.append(
                {
                    "n": n,
                    "k": k,
                    "size": s,
                    "monotone": s <= peak,
                    "peak": peak,
                    "bound": bound,
                    "within_bound": peak <= bound,
                }
            )
    return rows


# --------------------------------------------------------- Γ, Υ and Δ


def pseudo_low(k: int, l: int, atoms: Sequence[str]) -> Formula:
    """canonical(θ_k{a_l/f}); ``l`` counts from 1."""
    atoms = atom_vector(atoms)
    return canonical(substitute(_theta(k, atoms), {atoms[l - 1]: F}))


def pseudo_high(k: int, l: int, atoms: Sequence[str]) -> Formula:
    """canonical(θ_k{a_l/t})."""
    atoms = atom_vector(atoms)
    return canonical(substitute(_theta(k, atoms), {atoms[l - 1]: T}))


def _coweaken_to_f(premiss: Formula, rest: Formula) -> Derivation:
    """premiss = (rest.f) ⇒ f, coweakening ``rest`` away."""
    if rest == T:
        return Builder(premiss).eq(F).build()
    b = Builder(premiss).eq(And(rest, F)).at((0,), weaken_up(rest)).eq(F)
    return b.build()


def upsilon(k: int, l: int, atoms: Sequence[str]) -> Derivation:
    atoms = atom_vector(atoms)
    n = len(atoms)
    p, q = split(atoms)
    lo, hi = atoms[:p], atoms[p:]
    if n > 1 and p <= k <= n and l <= p:
        full = And(substitute(_theta(p, lo), {atoms[l - 1]: F}), _theta(k - p, hi))
        rest = canonical(And(substitute(_theta(p, lo), {atoms[l - 1]: T}), _theta(k - p, hi)))
        return _coweaken_to_f(full, rest)
    if n > 1 and q <= k <= n and p < l:
        full = And(_theta(k - q, lo), substitute(_theta(q, hi), {atoms[l - 1]: F}))
        rest = canonical(And(_theta(k - q, lo), substitute(_theta(q, hi), {atoms[l - 1]: T})))
        return _coweaken_to_f(full, rest)
    return Derivation.unit(F)


def delta(k: int, l: int, atoms: Sequence[str]) -> Derivation:
    atoms = atom_vector(atoms)
    n = len(atoms)
    p, q = split(atoms)
    if n > 1 and 0 < k <= q and l <= p:
        return weaken_down(_theta(k, atoms[p:]))
    if n > 1 and 0 < k <= p and p < l:
        return weaken_down(_theta(k, atoms[:p]))
    return Derivation.unit(F)


def is_trivial(d: Derivation) -> bool:
    """A block whose premiss and conclusion are both f (elided when rendering)."""
    return canonical(d.premiss) == F and canonical(d.conclusion) == F


def gamma(k: int, l: int, atoms: Sequence[str]) -> Derivation:
    """Γ_{k,l}: from canonical(θ_k{a_l/f}) to canonical(θ_{k+1}{a_l/t}) in {aw↓, aw↑, eq}."""
    atoms = atom_vector(atoms)
    if not 1 <= l <= len(atoms):
        raise IndexError(f"atom index {l} outside 1..{len(atoms)}")
    if k < 0:
        raise ValueError("threshold level must be nonnegative")
    return _gamma(k, l, atoms)


@lru_cache(maxsize=_MEMO)
def _gamma(k: int, l: int, atoms: tuple[str, ...]) -> Derivation:
    start, end = pseudo_low(k, l, atoms), pseudo_high(k + 1, l, atoms)
    return Builder(start).then(gamma_blocks(k, l, atoms)).eq(end).build()


def gamma_blocks(k: int, l: int, atoms: tuple[str, ...]) -> Derivation:
    """The raw disjunction of blocks, before the canonical end-point eq steps."""
    n = len(atoms)
    if n == 1:
        return Derivation.unit(T if k == 0 else F)
    if k > n:
        return Derivation.unit(F)
    p, q = split(atoms)
    lo, hi = atoms[:p], atoms[p:]
    blocks: list[Derivation] = []
    if l <= p:
        for i in range(min(k, p - 1), -1, -1):
            j = k - i
            if j > q:
                break
            blocks.append(compose_conj(_gamma(i, l, lo), Derivation.unit(_theta(j, hi))))
    else:
        for i in range(min(k, p), -1, -1):
            j = k - i
            if j >= q:
                break
            blocks.append(compose_conj(Derivation.unit(_theta(i, lo)), _gamma(j, l - p, hi)))
    blocks.append(upsilon(k, l, atoms))
    blocks.append(delta(k + 1, l, atoms))
    out = blocks[-1]
    for b in reversed(blocks[:-1]):
        out = compose_disj(b, out)
    return out


GAMMA_RULES = frozenset({Rule.AWD, Rule.AWU, Rule.EQ})


def clear_caches() -> None:
    _theta.cache_clear()
    _gamma.cache_clear()
    theta_size.cache_clear()
