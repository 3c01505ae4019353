"""Formulae over units, signed atoms, binary disjunction and conjunction.

Values are immutable. Equality is structural with an identity fast path and
cached hashes, so shared subtrees compare in constant time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

Path = tuple[int, ...]

RESERVED = frozenset({"f", "t"})


class Formula:
    __slots__ = ("_hash", "_size", "_canon", "_key")

    def __init__(self, h: int, size: int) -> None:
        object.__setattr__(self, "_hash", h)
        object.__setattr__(self, "_size", size)
        object.__setattr__(self, "_canon", None)
        object.__setattr__(self, "_key", None)

    def __hash__(self) -> int:
        return self._hash

    def __setattr__(self, name, value):
        raise AttributeError("formulae are immutable")

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"<{render(self)}>"

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)


class Unit(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool) -> None:
        object.__setattr__(self, "value", bool(value))
        super().__init__(hash(("unit", bool(value))), 1)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, Unit) and other.value == self.value)

    __hash__ = Formula.__hash__


class Atom(Formula):
    __slots__ = ("name", "negated")

    def __init__(self, name: str, negated: bool = False) -> None:
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "negated", bool(negated))
        super().__init__(hash(("atom", name, bool(negated))), 1)

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, Atom) and other.name == self.name and other.negated == self.negated
        )

    __hash__ = Formula.__hash__

    def dual(self) -> "Atom":
        return Atom(self.name, not self.negated)

    @property
    def positive(self) -> "Atom":
        return Atom(self.name, False) if self.negated else self


class _Binary(Formula):
    __slots__ = ("left", "right")
    tag = ""

    def __init__(self, left: Formula, right: Formula) -> None:
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        super().__init__(hash((self.tag, left._hash, right._hash)), left._size + right._size)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return self.left == other.left and self.right == other.right

    __hash__ = Formula.__hash__

    def child(self, i: int) -> Formula:
        return self.right if i else self.left


class Or(_Binary):
    __slots__ = ()
    tag = "or"


class And(_Binary):
    __slots__ = ()
    tag = "and"


F = Unit(False)
T = Unit(True)


def atom(name: str, negated: bool = False) -> Atom:
    return Atom(name, negated)


def is_unit(f: Formula) -> bool:
    return isinstance(f, Unit)


def disj(*ops: Formula) -> Formula:
    """Right-nested disjunction of one or more formulae."""
    return _nest(Or, ops)


def conj(*ops: Formula) -> Formula:
    return _nest(And, ops)


def _nest(kind, ops: Sequence[Formula]) -> Formula:
    if not ops:
        raise ValueError("need at least one operand")
    out = ops[-1]
    for op in reversed(ops[:-1]):
        out = kind(op, out)
    return out


def dual(f: Formula) -> Formula:
    """De Morgan dual: swap units and connectives, negate atoms."""
    if isinstance(f, Unit):
        return F if f.value else T
    if isinstance(f, Atom):
        return f.dual()
    if isinstance(f, Or):
        return And(dual(f.left), dual(f.right))
    return Or(dual(f.left), dual(f.right))


def size(f: Formula) -> int:
    return f._size


def atom_names(f: Formula) -> set[str]:
    return {a.name for _, a in atom_occurrences(f)}


def leaves(f: Formula, prefix: Path = ()) -> Iterator[tuple[Path, Formula]]:
    stack = [(prefix, f)]
    while stack:
        p, g = stack.pop()
        if isinstance(g, _Binary):
            stack.append((p + (1,), g.right))
            stack.append((p + (0,), g.left))
        else:
            yield p, g


def atom_occurrences(f: Formula, prefix: Path = ()) -> list[tuple[Path, Atom]]:
    return [(p, g) for p, g in leaves(f, prefix) if isinstance(g, Atom)]


def subformula(f: Formula, path: Path) -> Formula:
    for i in path:
        if not isinstance(f, _Binary):
            raise IndexError(f"path {path} leaves the formula tree")
        f = f.right if i else f.left
    return f


def replace(f: Formula, path: Path, g: Formula) -> Formula:
    if not path:
        return g
    if not isinstance(f, _Binary):
        raise IndexError(f"path {path} leaves the formula tree")
    i, rest = path[0], path[1:]
    if i:
        return type(f)(f.left, replace(f.right, rest, g))
    return type(f)(replace(f.left, rest, g), f.right)


@dataclass(frozen=True)
class Context:
    """A formula with one hole, stored as a host tree plus the hole's path."""

    host: Formula
    path: Path = ()

    def plug(self, g: Formula) -> Formula:
        return replace(self.host, self.path, g)

    def inside(self, inner: "Context") -> "Context":
        """The context whose hole is the hole of ``inner`` placed in ours."""
        return Context(self.plug(inner.host), self.path + inner.path)

    @staticmethod
    def hole() -> "Context":
        return Context(F, ())

    @staticmethod
    def at(f: Formula, path: Path) -> "Context":
        subformula(f, path)
        return Context(f, tuple(path))


# ---------------------------------------------------------------- text syntax


class ParseError(ValueError):
    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:([a-z][a-z0-9_]*)|(.))")


def parse(text: str) -> Formula:
    tokens: list[tuple[str, int]] = []
    for m in _TOKEN.finditer(text):
        if m.group(1):
            tokens.append((m.group(1), m.start(1)))
        elif m.group(2):
            if m.group(2).isspace():
                continue
            tokens.append((m.group(2), m.start(2)))
    pos = 0

    def peek() -> tuple[str, int]:
        return tokens[pos] if pos < len(tokens) else ("", len(text))

    def take(expected: str | None = None) -> tuple[str, int]:
        nonlocal pos
        tok = peek()
        if expected is not None and tok[0] != expected:
            raise ParseError(f"expected {expected!r}, found {tok[0] or 'end of input'!r}", tok[1])
        if not tok[0]:
            raise ParseError("unexpected end of input", tok[1])
        pos += 1
        return tok

    def formula() -> Formula:
        tok, at = take()
        if tok == "f":
            return F
        if tok == "t":
            return T
        if tok == "-":
            name, at2 = take()
            if not re.fullmatch(r"[a-z][a-z0-9_]*", name) or name in RESERVED:
                raise ParseError(f"expected an atom after '-', found {name!r}", at2)
            return Atom(name, True)
        if tok in ("[", "("):
            close = "]" if tok == "[" else ")"
            ops = [formula()]
            while peek()[0] == ".":
                take(".")
                ops.append(formula())
            if len(ops) < 2:
                raise ParseError("a bracket needs at least two operands", at)
            take(close)
            return disj(*ops) if tok == "[" else conj(*ops)
        if re.fullmatch(r"[a-z][a-z0-9_]*", tok):
            return Atom(tok)
        raise ParseError(f"unexpected {tok!r}", at)

    result = formula()
    if pos != len(tokens):
        raise ParseError(f"trailing input {peek()[0]!r}", peek()[1])
    return result


def render(f: Formula) -> str:
    parts: list[str] = []
    _render(f, parts)
    return "".join(parts)


def _render(f: Formula, out: list[str]) -> None:
    if isinstance(f, Unit):
        out.append("t" if f.value else "f")
    elif isinstance(f, Atom):
        out.append(("-" if f.negated else "") + f.name)
    else:
        kind = type(f)
        out.append("[" if kind is Or else "(")
        g = f
        while True:
            _render(g.left, out)
            out.append(".")
            if type(g.right) is kind:
                g = g.right
            else:
                _render(g.right, out)
                break
        out.append("]" if kind is Or else ")")


# --------------------------------------------------------- equational theory


def sort_key(f: Formula) -> tuple:
    k = f._key
    if k is None:
        if isinstance(f, Unit):
            k = (0, int(f.value))
        elif isinstance(f, Atom):
            k = (1, f.name, int(f.negated))
        else:
            k = (2 if isinstance(f, Or) else 3, tuple(sort_key(g) for g in operands(f)))
        object.__setattr__(f, "_key", k)
    return k


def operands(f: Formula) -> list[Formula]:
    """Operands of the maximal same-connective block rooted at ``f``."""
    if not isinstance(f, _Binary):
        return [f]
    kind = type(f)
    out: list[Formula] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is kind:
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def canonical(f: Formula) -> Formula:
    """Normal form modulo associativity, commutativity and the four unit laws."""
    c = f._canon
    if c is None:
        c = _canonical(f)
        object.__setattr__(f, "_canon", c)
        object.__setattr__(c, "_canon", c)
    return c


def _canonical(f: Formula) -> Formula:
    if not isinstance(f, _Binary):
        return f
    kind = type(f)
    ops: list[Formula] = []
    for g in operands(f):
        c = canonical(g)
        if type(c) is kind:
            ops.extend(operands(c))
        else:
            ops.append(c)
    return _assemble(kind, ops)


def _assemble(kind, ops: list[Formula]) -> Formula:
    neutral, idem = (F, T) if kind is Or else (T, F)
    kept = [g for g in ops if g != neutral]
    if sum(1 for g in kept if g == idem) > 1:
        first = next(i for i, g in enumerate(kept) if g == idem)
        kept = [g for i, g in enumerate(kept) if g != idem or i == first]
    if not kept:
        return neutral
    if len(kept) == 1:
        return kept[0]
    kept.sort(key=sort_key)
    return _nest(kind, kept)


def canonical_traced(f: Formula, prefix: Path = ()) -> tuple[Formula, list[Path]]:
    """Canonical form plus, for each atom leaf of it in order, its source path in ``f``."""
    if isinstance(f, Atom):
        return f, [prefix]
    if isinstance(f, Unit):
        return f, []
    kind = type(f)
    neutral, idem = (F, T) if kind is Or else (T, F)
    items: list[tuple[Formula, list[Path]]] = []
    for p, g in _operand_paths(f, prefix):
        c, tr = canonical_traced(g, p)
        if type(c) is kind:
            # split the traces of a flattened child back over its operands
            for sub in operands(c):
                n = len(atom_occurrences(sub))
                items.append((sub, tr[:n]))
                tr = tr[n:]
        else:
            items.append((c, tr))
    items = [it for it in items if it[0] != neutral]
    seen_idem = False
    kept = []
    for it in items:
        if it[0] == idem:
            if seen_idem:
                continue
            seen_idem = True
        kept.append(it)
    if not kept:
        return neutral, []
    if len(kept) == 1:
        return kept[0]
    kept.sort(key=lambda it: sort_key(it[0]))
    traces: list[Path] = []
    for _, tr in kept:
        traces.extend(tr)
    return _nest(kind, [g for g, _ in kept]), traces


def _operand_paths(f: Formula, prefix: Path) -> list[tuple[Path, Formula]]:
    kind = type(f)
    out = []
    stack = [(prefix, f)]
    while stack:
        p, g = stack.pop()
        if type(g) is kind:
            stack.append((p + (1,), g.right))
            stack.append((p + (0,), g.left))
        else:
            out.append((p, g))
    return out


def equivalent(f: Formula, g: Formula) -> bool:
    return f is g or canonical(f) == canonical(g)


def simplify(f: Formula) -> Formula:
    """Flatten and drop neutral units like :func:`canonical`, keeping operand order."""
    if not isinstance(f, _Binary):
        return f
    kind = type(f)
    neutral, idem = (F, T) if kind is Or else (T, F)
    ops: list[Formula] = []
    for g in operands(f):
        c = simplify(g)
        ops.extend(operands(c) if type(c) is kind else [c])
    kept = [g for g in ops if g != neutral]
    if sum(1 for g in kept if g == idem) > 1:
        first = next(i for i, g in enumerate(kept) if g == idem)
        kept = [g for i, g in enumerate(kept) if g != idem or i == first]
    if not kept:
        return neutral
    return _nest(kind, kept)


# ------------------------------------------------------------ substitution


def substitute(f: Formula, subst: Mapping[object, Formula]) -> Formula:
    """Replace atom occurrences.

    A plain name key replaces the positive occurrences of that name. An
    :class:`Atom` key replaces occurrences of exactly that literal; for a
    negated literal the dual of the value is written, so ``{-a: b}`` turns
    ``-a`` into ``-b``. Occurrences of the other polarity are left alone.
    """
    table: dict[Atom, Formula] = {}
    for k, v in subst.items():
        if isinstance(k, str):
            table[Atom(k)] = v
        elif isinstance(k, Atom):
            table[k] = dual(v) if k.negated else v
        else:
            raise TypeError(f"bad substitution key {k!r}")
    return _subst(f, table)


def _subst(f: Formula, table: Mapping[Atom, Formula]) -> Formula:
    if isinstance(f, Atom):
        return table.get(f, f)
    if isinstance(f, Unit):
        return f
    left, right = _subst(f.left, table), _subst(f.right, table)
    if left is f.left and right is f.right:
        return f
    return type(f)(left, right)


def substitute_at(f: Formula, targets: Mapping[Path, Formula], name: str | None = None) -> Formula:
    """Replace the atom leaves at the given paths.

    A positive leaf receives the value, a negated leaf its dual. With
    ``name`` set, every path must resolve to that atom (either polarity).
    """
    out = f
    for p, beta in targets.items():
        leaf = subformula(f, p)
        if not isinstance(leaf, Atom):
            raise ValueError(f"path {p} does not resolve to an atom occurrence")
        if name is not None and leaf.name != name:
            raise ValueError(f"path {p} resolves to {render(leaf)}, not {name}")
        out = replace(out, p, dual(beta) if leaf.negated else beta)
    return out


# -------------------------------------------------------------- semantics


def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(f, Unit):
        return f.value
    if isinstance(f, Atom):
        try:
            v = bool(assignment[f.name])
        except KeyError:
            raise KeyError(f"assignment misses atom {f.name!r}") from None
        return not v if f.negated else v
    if isinstance(f, Or):
        return evaluate(f.left, assignment) or evaluate(f.right, assignment)
    return evaluate(f.left, assignment) and evaluate(f.right, assignment)


def truth_table(f: Formula, names: Iterable[str] | None = None) -> int:
    """Bitmask of satisfying assignments over ``names`` (sorted by default)."""
    names = sorted(atom_names(f)) if names is None else list(names)
    mask = 0
    for bits in range(1 << len(names)):
        env = {n: bool(bits >> i & 1) for i, n in enumerate(names)}
        if evaluate(f, env):
            mask |= 1 << bits
    return mask
