"""Deterministic pseudo-random SKS proofs, grown top-down from t by rule application."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .derivation import Builder, Derivation, Rule
from .formula import F, T, And, Atom, Context, Formula, Or, Path, _Binary, _nest, operands, replace, size, subformula

MOVES = {
    "identity": 3.0,
    "switch": 4.0,
    "cut": 3.0,
    "detour": 2.0,
    "contraction": 1.0,
    "medial": 1.0,
    "cocontraction": 1.0,
    "weakening": 1.0,
    "coweakening": 0.7,
}


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 0
    count: int = 100
    atoms: int = 3
    max_leaves: int = 60
    min_moves: int = 6
    max_moves: int = 30
    require_cut: bool = True


def _positions(f: Formula, prefix: Path = ()):
    yield prefix, f
    if isinstance(f, _Binary):
        yield from _positions(f.left, prefix + (0,))
        yield from _positions(f.right, prefix + (1,))


def _literals(names: list[str]) -> list[Atom]:
    return [Atom(n, neg) for n in names for neg in (False, True)]


class _Grower:
    def __init__(self, rng: random.Random, names: list[str], max_leaves: int) -> None:
        self.rng = rng
        self.names = names
        self.max_leaves = max_leaves
        self.b = Builder(T)

    @property
    def cur(self) -> Formula:
        return self.b.current

    def _fits(self, extra: int) -> bool:
        return size(self.cur) + extra <= self.max_leaves

    def _lit(self) -> Atom:
        return self.rng.choice(_literals(self.names))

    def _pick(self, items):
        return self.rng.choice(items) if items else None

    def identity(self) -> bool:
        if not self._fits(2):
            return False
        ts = [p for p, g in _positions(self.cur) if g == T]
        if ts and self.rng.random() < 0.5:
            p = self._pick(ts)
        else:
            p, x = self._pick(list(_positions(self.cur)))
            wrapped = And(x, T) if self.rng.random() < 0.5 else And(T, x)
            self.b.eq(replace(self.cur, p, wrapped))
            p = p + ((1,) if wrapped.right == T else (0,))
        self.b.apply(Rule.AID, p, self._lit())
        return True

    def switch(self) -> bool:
        cands = [
            p
            for p, g in _positions(self.cur)
            if isinstance(g, And) and (isinstance(g.left, Or) or isinstance(g.right, Or))
        ]
        p = self._pick(cands)
        if p is None:
            return False
        g = subformula(self.cur, p)
        i = self._pick([i for i in (0, 1) if isinstance(g.child(i), Or)])
        disj, other = g.child(i), g.child(1 - i)
        beta, gamma = (disj.left, disj.right) if self.rng.random() < 0.5 else (disj.right, disj.left)
        self.b.eq(replace(self.cur, p, And(other, Or(beta, gamma))))
        self.b.apply(Rule.S, p)
        return True

    def _block_pair(self, kind, match):
        """A node of ``kind`` whose flattened operands include a matching literal pair."""
        found = []
        for p, g in _positions(self.cur):
            if type(g) is not kind:
                continue
            ops = operands(g)
            lits = [(i, o) for i, o in enumerate(ops) if isinstance(o, Atom)]
            for i, x in lits:
                for j, y in lits:
                    if i < j and match(x, y):
                        found.append((p, ops, i, j))
        return self._pick(found)

    def _gather(self, kind, p, ops, i, j) -> Path:
        pair = kind(ops[i], ops[j])
        rest = [o for k, o in enumerate(ops) if k not in (i, j)]
        if rest:
            self.b.eq(replace(self.cur, p, kind(pair, _nest(kind, rest))))
            return p + (0,)
        self.b.eq(replace(self.cur, p, pair))
        return p

    def cut(self) -> bool:
        hit = self._block_pair(And, lambda x, y: x == y.dual())
        if hit is None:
            return False
        self.b.apply(Rule.AIU, self._gather(And, *hit))
        return True

    def detour(self) -> bool:
        """y ⇒ (y.[ȳ.y]) ⇒ [(y.ȳ).y] ⇒ [f.y]: a cut whose one side is the old occurrence."""
        p = self._atom_position()
        if p is None or not self._fits(3):
            return False
        y = subformula(self.cur, p)
        self.b.eq(replace(self.cur, p, And(y, T)))
        self.b.apply(Rule.AID, p + (1,), y.dual())
        self.b.apply(Rule.S, p)
        self.b.apply(Rule.AIU, p + (0,))
        return True

    def contraction(self) -> bool:
        hit = self._block_pair(Or, lambda x, y: x == y)
        if hit is None:
            return False
        self.b.apply(Rule.ACD, self._gather(Or, *hit))
        return True

    def medial(self) -> bool:
        cands = [
            p
            for p, g in _positions(self.cur)
            if isinstance(g, Or) and isinstance(g.left, And) and isinstance(g.right, And)
        ]
        p = self._pick(cands)
        if p is None:
            return False
        self.b.apply(Rule.M, p)
        return True

    def _atom_position(self):
        return self._pick([p for p, g in _positions(self.cur) if isinstance(g, Atom)])

    def cocontraction(self) -> bool:
        p = self._atom_position()
        if p is None or not self._fits(1):
            return False
        self.b.apply(Rule.ACU, p)
        return True

    def coweakening(self) -> bool:
        p = self._atom_position()
        if p is None:
            return False
        self.b.apply(Rule.AWU, p)
        return True

    def weakening(self) -> bool:
        if not self._fits(2):
            return False
        p, x = self._pick(list(_positions(self.cur)))
        self.b.eq(replace(self.cur, p, Or(x, F)))
        self.b.apply(Rule.AWD, p + (1,), self._lit())
        return True


def random_proof(rng: random.Random, names: list[str], max_leaves: int = 60, moves: int = 12) -> Derivation:
    g = _Grower(rng, names, max_leaves)
    kinds, weights = list(MOVES), list(MOVES.values())
    done = 0
    attempts = 0
    while done < moves and attempts < 20 * moves:
        attempts += 1
        kind = rng.choices(kinds, weights=weights)[0]
        if getattr(g, kind)():
            done += 1
    return g.b.build()


def generate_corpus(
    seed: int = 0, count: int = 100, atom_budget: int = 3, max_leaves: int = 60, require_cut: bool = True
) -> list[Derivation]:
    """``count`` proofs reproducible from ``seed``; with ``require_cut`` every proof has an ai↑."""
    if atom_budget < 1:
        raise ValueError("atom budget must be at least 1")
    cfg = CorpusConfig(seed=seed, count=count, atoms=atom_budget, max_leaves=max_leaves, require_cut=require_cut)
    rng = random.Random(cfg.seed)
    names = [chr(ord("a") + i) for i in range(cfg.atoms)] if cfg.atoms <= 26 else [f"p{i}" for i in range(cfg.atoms)]
    out: list[Derivation] = []
    while len(out) < cfg.count:
        d = random_proof(rng, names, cfg.max_leaves, rng.randint(cfg.min_moves, cfg.max_moves))
        if cfg.require_cut and Rule.AIU not in d.rule_counts():
            continue
        out.append(d)
    return out


def random_formula(rng: random.Random, leaves: int, names: list[str], unit_rate: float = 0.0) -> Formula:
    """A uniformly shaped random formula with ``leaves`` leaves over the given names."""
    if leaves <= 1:
        if unit_rate and rng.random() < unit_rate:
            return rng.choice((T, F))
        return rng.choice(_literals(names))
    k = rng.randint(1, leaves - 1)
    kind = And if rng.random() < 0.5 else Or
    return kind(random_formula(rng, k, names, unit_rate), random_formula(rng, leaves - k, names, unit_rate))


def random_context(rng: random.Random, max_size: int, names: list[str]) -> tuple[Context, Formula]:
    """A pair (ξ, α) with size(ξ{α}) at most ``max_size``; the hole sits at a random node."""
    total = rng.randint(1, max_size)
    whole = random_formula(rng, total, names)
    path, sub = rng.choice(list(_positions(whole)))
    return Context(whole, path), sub
