"""SKS derivations: rule schemas, step checking, occurrence tracing, composition."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

from .formula import (
    F,
    T,
    And,
    Atom,
    Context,
    Formula,
    Or,
    Path,
    Unit,
    _Binary,
    atom_occurrences,
    canonical,
    canonical_traced,
    dual,
    equivalent,
    parse,
    render,
    replace,
    size,
    subformula,
)


class Rule(str, Enum):
    AID = "ai↓"
    AIU = "ai↑"
    AWD = "aw↓"
    AWU = "aw↑"
    ACD = "ac↓"
    ACU = "ac↑"
    S = "s"
    M = "m"
    EQ = "eq"
    GWD = "gw↓"
    GWU = "gw↑"
    GCD = "gc↓"
    GCU = "gc↑"

    def __str__(self) -> str:
        return self.value

    @property
    def ascii(self) -> str:
        return self.value.replace("↓", "d").replace("↑", "u")

    @classmethod
    def parse(cls, text: str) -> "Rule":
        t = text.strip()
        for r in cls:
            if t in (r.value, r.ascii, r.name, r.name.lower()):
                return r
        if t == "=":
            return cls.EQ
        raise ValueError(f"unknown rule {text!r}")


STRUCTURAL = frozenset({Rule.AID, Rule.AIU, Rule.AWD, Rule.AWU, Rule.ACD, Rule.ACU})
GENERAL = frozenset({Rule.GWD, Rule.GWU, Rule.GCD, Rule.GCU})
SKS = frozenset(Rule) - GENERAL
ASKS = SKS - {Rule.AIU, Rule.AWU}


class SchemaError(ValueError):
    """A rule was applied to a redex that does not fit its schema."""


def _literal(f: Formula) -> bool:
    return isinstance(f, Atom)


def rewrite(rule: Rule, redex: Formula, arg: Formula | None = None) -> Formula:
    """Result of applying ``rule`` to ``redex`` (``arg`` picks the atom or formula where needed)."""
    if rule is Rule.AID:
        if redex != T or not isinstance(arg, Atom):
            raise SchemaError("ai↓ needs redex t and an atom")
        return Or(arg, arg.dual())
    if rule is Rule.AIU:
        if isinstance(redex, And) and _literal(redex.left) and redex.right == redex.left.dual():
            return F
        raise SchemaError("ai↑ needs (a.-a)")
    if rule is Rule.AWD:
        if redex != F or not isinstance(arg, Atom):
            raise SchemaError("aw↓ needs redex f and an atom")
        return arg
    if rule is Rule.AWU:
        if not _literal(redex):
            raise SchemaError("aw↑ needs an atom")
        return T
    if rule is Rule.ACD:
        if isinstance(redex, Or) and _literal(redex.left) and redex.left == redex.right:
            return redex.left
        raise SchemaError("ac↓ needs [a.a]")
    if rule is Rule.ACU:
        if not _literal(redex):
            raise SchemaError("ac↑ needs an atom")
        return And(redex, redex)
    if rule is Rule.S:
        if isinstance(redex, And) and isinstance(redex.right, Or):
            a, b, c = redex.left, redex.right.left, redex.right.right
            return Or(And(a, b), c)
        raise SchemaError("s needs (A.[B.C])")
    if rule is Rule.M:
        if isinstance(redex, Or) and isinstance(redex.left, And) and isinstance(redex.right, And):
            a, b = redex.left.left, redex.left.right
            c, d = redex.right.left, redex.right.right
            return And(Or(a, c), Or(b, d))
        raise SchemaError("m needs [(A.B).(C.D)]")
    if rule is Rule.GWD:
        if redex != F or arg is None:
            raise SchemaError("gw↓ needs redex f and a formula")
        return arg
    if rule is Rule.GWU:
        return T
    if rule is Rule.GCD:
        if isinstance(redex, Or) and redex.left == redex.right:
            return redex.left
        raise SchemaError("gc↓ needs [A.A]")
    if rule is Rule.GCU:
        return And(redex, redex)
    if rule is Rule.EQ:
        if arg is None or not equivalent(redex, arg):
            raise SchemaError("eq needs an equivalent target")
        return arg
    raise SchemaError(f"unknown rule {rule}")


def _redex_ok(rule: Rule, p: Formula, c: Formula) -> str | None:
    if rule is Rule.EQ:
        return None if equivalent(p, c) else "premiss and conclusion are not equal modulo the equations"
    if rule is Rule.AID:
        if p == T and isinstance(c, Or) and _literal(c.left) and c.right == c.left.dual():
            return None
        return "ai↓ must rewrite t to [a.-a] for one atom"
    if rule is Rule.AWD:
        return None if p == F and _literal(c) else "aw↓ must rewrite f to an atom"
    if rule is Rule.GWD:
        return None if p == F else "gw↓ must rewrite f"
    try:
        expected = rewrite(rule, p)
    except SchemaError as exc:
        return str(exc)
    return None if expected == c else f"{rule} conclusion does not match its schema"


@dataclass(frozen=True)
class Step:
    rule: Rule
    path: Path
    premiss: Formula
    conclusion: Formula
    # eq only: the occurrence map inside the redex, fixed instead of recomputed
    pin: tuple[tuple[Path, Path], ...] | None = None

    @property
    def redex(self) -> Formula:
        return subformula(self.premiss, self.path)

    @property
    def contractum(self) -> Formula:
        return subformula(self.conclusion, self.path)

    @property
    def occ_map(self) -> dict[Path, Path]:
        return dict(_trace(self))


def _context_violation(step: Step) -> str | None:
    p, c = step.premiss, step.conclusion
    for i, d in enumerate(step.path):
        if not isinstance(p, _Binary) or type(p) is not type(c):
            return f"context mismatch at depth {i}"
        if p.child(1 - d) != c.child(1 - d):
            return f"context mismatch outside the redex at depth {i}"
        p, c = p.child(d), c.child(d)
    return None


def check_step(step: Step) -> str | None:
    """None when the step is a correct instance of its rule, else the reason."""
    try:
        p = subformula(step.premiss, step.path)
        c = subformula(step.conclusion, step.path)
    except IndexError:
        return "redex path does not resolve"
    bad = _context_violation(step)
    if bad:
        return bad
    bad = _redex_ok(step.rule, p, c)
    if bad:
        return bad
    try:
        _check_trace(step)
    except ValueError as exc:
        return str(exc)
    return None


def active_occurrences(step: Step) -> tuple[list[Path], list[Path]]:
    """Premiss and conclusion atom paths consumed or produced by a structural step."""
    r, q = step.rule, step.path
    if r is Rule.AID:
        return [], [q + (0,), q + (1,)]
    if r is Rule.AIU:
        return [q + (0,), q + (1,)], []
    if r is Rule.AWD:
        return [], [q]
    if r is Rule.AWU:
        return [q], []
    if r is Rule.ACD:
        return [q + (0,), q + (1,)], [q]
    if r is Rule.ACU:
        return [q], [q + (0,), q + (1,)]
    return [], []


_S_MAP = {(0,): (0, 0), (1, 0): (0, 1), (1, 1): (1,)}
_M_MAP = {(0, 0): (0, 0), (0, 1): (1, 0), (1, 0): (0, 1), (1, 1): (1, 1)}


@lru_cache(maxsize=1 << 14)
def _trace(step: Step) -> tuple[tuple[Path, Path], ...]:
    q, n = step.path, len(step.path)
    out: list[tuple[Path, Path]] = []
    for p, _ in atom_occurrences(step.premiss):
        if p[:n] != q:
            out.append((p, p))
    r = step.rule
    redex = subformula(step.premiss, q)
    if r is Rule.EQ and step.pin is not None:
        out.extend((q + a, q + b) for a, b in step.pin)
    elif r is Rule.EQ:
        _, src = canonical_traced(redex, q)
        _, dst = canonical_traced(subformula(step.conclusion, q), q)
        if len(src) != len(dst):
            raise ValueError("eq step changes the number of atom occurrences")
        out.extend(zip(src, dst))
    elif r in (Rule.S, Rule.M):
        table = _S_MAP if r is Rule.S else _M_MAP
        for p, _ in atom_occurrences(redex, q):
            rel = p[n:]
            for k, v in table.items():
                if rel[: len(k)] == k:
                    out.append((p, q + v + rel[len(k):]))
                    break
    elif r in GENERAL:
        pass
    return tuple(out)


def local_trace(step: Step) -> tuple[tuple[Path, Path], ...]:
    """The occurrence map of a step restricted to its redex, in redex-relative paths."""
    n = len(step.path)
    return tuple((a[n:], b[n:]) for a, b in _trace(step) if a[:n] == step.path)


def restep(s: Step, premiss: Formula, conclusion: Formula) -> Step:
    """``s`` between new lines obtained by replacing atom occurrences consistently.

    An eq step keeps its old occurrence map: a replaced occurrence contributes the
    occurrences of its replacement and a unit contributes nothing."""
    if s.rule is not Rule.EQ:
        return Step(s.rule, s.path, premiss, conclusion)
    q = s.path
    pin = []
    for a, b in local_trace(s):
        g = subformula(premiss, q + a)
        if isinstance(g, Atom):
            pin.append((a, b))
        else:
            pin.extend((a + r, b + r) for r, _ in atom_occurrences(g))
    return Step(Rule.EQ, q, premiss, conclusion, tuple(pin))


def _check_trace(step: Step) -> None:
    if step.rule in GENERAL:
        return
    tr = _trace(step)
    dst = [b for _, b in tr]
    if len(set(dst)) != len(dst):
        raise ValueError("occurrence map is not injective")
    act_p, act_c = active_occurrences(step)
    prem = dict(atom_occurrences(step.premiss))
    conc = dict(atom_occurrences(step.conclusion))
    if len(tr) + len(act_p) != len(prem) or len(tr) + len(act_c) != len(conc):
        raise ValueError("occurrence map is not a bijection on non-active occurrences")
    for a, b in tr:
        if prem.get(a) != conc.get(b):
            raise ValueError("occurrence map changes an atom")


# ------------------------------------------------------------- derivations


@dataclass(frozen=True)
class Derivation:
    lines: tuple[Formula, ...]
    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        if len(self.lines) != len(self.steps) + 1:
            raise ValueError("a derivation has one more line than steps")

    @staticmethod
    def unit(f: Formula) -> "Derivation":
        return Derivation((f,), ())

    @staticmethod
    def from_steps(first: Formula, steps: Sequence[Step]) -> "Derivation":
        return Derivation((first,) + tuple(s.conclusion for s in steps), tuple(steps))

    @property
    def premiss(self) -> Formula:
        return self.lines[0]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1]

    @property
    def size(self) -> int:
        return sum(size(x) for x in self.lines)

    def rule_counts(self) -> Counter:
        return Counter(s.rule for s in self.steps)

    def is_proof(self) -> bool:
        return canonical(self.premiss) == T

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class CheckReport:
    valid: bool
    rule_multiset: dict = field(default_factory=dict)
    size: int = 0
    failures: list = field(default_factory=list)

    def summary(self) -> str:
        rules = ", ".join(f"{r}:{n}" for r, n in sorted(self.rule_multiset.items(), key=lambda x: str(x[0])))
        head = "valid" if self.valid else "INVALID"
        return f"{head}; size {self.size}; rules {{{rules}}}"


def check_derivation(d: Derivation, allowed: Iterable[Rule] | None = None) -> CheckReport:
    failures: list[tuple[int, str]] = []
    allow = None if allowed is None else frozenset(allowed)
    for i, s in enumerate(d.steps):
        if s.premiss is not d.lines[i] and s.premiss != d.lines[i]:
            failures.append((i, "premiss differs from the preceding line"))
        if s.conclusion is not d.lines[i + 1] and s.conclusion != d.lines[i + 1]:
            failures.append((i, "conclusion differs from the following line"))
        if allow is not None and s.rule not in allow:
            failures.append((i, f"rule {s.rule} is not allowed here"))
        bad = check_step(s)
        if bad:
            failures.append((i, bad))
    counts = {r: n for r, n in d.rule_counts().items()}
    return CheckReport(not failures, counts, d.size, failures)


def is_valid(d: Derivation, allowed: Iterable[Rule] | None = None) -> bool:
    return check_derivation(d, allowed).valid


# ------------------------------------------------------------- composition


def in_context(ctx: Context, d: Derivation) -> Derivation:
    if not ctx.path:
        return d
    lines = tuple(ctx.plug(x) for x in d.lines)
    steps = tuple(
        Step(s.rule, ctx.path + s.path, lines[i], lines[i + 1], s.pin) for i, s in enumerate(d.steps)
    )
    return Derivation(lines, steps)


def compose_seq(d1: Derivation, d2: Derivation) -> Derivation:
    a, b = d1.conclusion, d2.premiss
    if a == b:
        return Derivation(d1.lines + d2.lines[1:], d1.steps + d2.steps)
    if not equivalent(a, b):
        raise ValueError(f"junction mismatch: {render(a)} vs {render(b)}")
    return Derivation(d1.lines + d2.lines, d1.steps + (eq_step(a, b),) + d2.steps)


def compose_disj(d1: Derivation, d2: Derivation) -> Derivation:
    return _compose(Or, d1, d2)


def compose_conj(d1: Derivation, d2: Derivation) -> Derivation:
    return _compose(And, d1, d2)


def _compose(kind, d1: Derivation, d2: Derivation) -> Derivation:
    first = in_context(Context(kind(F, d2.premiss), (0,)), d1)
    second = in_context(Context(kind(d1.conclusion, F), (1,)), d2)
    return Derivation(first.lines + second.lines[1:], first.steps + second.steps)


def diff_path(a: Formula, b: Formula) -> Path:
    """Deepest position outside which ``a`` and ``b`` coincide."""
    path: list[int] = []
    while isinstance(a, _Binary) and type(a) is type(b):
        if a.left == b.left:
            path.append(1)
            a, b = a.right, b.right
        elif a.right == b.right:
            path.append(0)
            a, b = a.left, b.left
        else:
            break
    return tuple(path)


def eq_step(a: Formula, b: Formula) -> Step:
    p = diff_path(a, b)
    while p and not equivalent(subformula(a, p), subformula(b, p)):
        p = p[:-1]
    return Step(Rule.EQ, p, a, b)


class Builder:
    """Accumulates steps from a start formula; every method returns ``self``."""

    def __init__(self, start: Formula | Derivation) -> None:
        if isinstance(start, Derivation):
            self.lines = list(start.lines)
            self.steps = list(start.steps)
        else:
            self.lines = [start]
            self.steps = []

    @property
    def current(self) -> Formula:
        return self.lines[-1]

    def _push(self, s: Step) -> None:
        self.steps.append(s)
        self.lines.append(s.conclusion)

    def apply(self, rule: Rule, path: Path = (), arg: Formula | None = None) -> "Builder":
        cur = self.current
        new = replace(cur, path, rewrite(rule, subformula(cur, path), arg))
        self._push(Step(rule, tuple(path), cur, new))
        return self

    def eq(self, target: Formula) -> "Builder":
        cur = self.current
        if cur != target:
            if not equivalent(cur, target):
                raise ValueError(f"not equal modulo equations: {render(cur)} vs {render(target)}")
            self._push(eq_step(cur, target))
        return self

    def then(self, d: Derivation) -> "Builder":
        self.eq(d.premiss)
        for s in d.steps:
            self._push(s)
        return self

    def at(self, path: Path, d: Derivation) -> "Builder":
        """Run ``d`` on the subformula at ``path``."""
        cur = self.current
        sub = subformula(cur, path)
        if sub != d.premiss:
            self.eq(replace(cur, path, d.premiss))
        return self.then(in_context(Context(self.current, tuple(path)), d))

    def build(self) -> Derivation:
        return Derivation(tuple(self.lines), tuple(self.steps))


def single_step(rule: Rule, premiss: Formula, path: Path = (), arg: Formula | None = None) -> Derivation:
    return Builder(premiss).apply(rule, path, arg).build()


# ---------------------------------------------- atomising the general rules


def weaken_down(alpha: Formula) -> Derivation:
    """f ⇒ alpha with aw↓ (and one switch per t leaf)."""
    if alpha == F:
        return Derivation.unit(F)
    if alpha == T:
        return _f_to_t()
    if isinstance(alpha, Atom):
        return single_step(Rule.AWD, F, (), alpha)
    kind = type(alpha)
    inner = _compose(kind, weaken_down(alpha.left), weaken_down(alpha.right))
    return Builder(F).then(inner).build()


def weaken_up(alpha: Formula) -> Derivation:
    """alpha ⇒ t with aw↑ (and one switch per f leaf)."""
    if alpha == T:
        return Derivation.unit(T)
    if alpha == F:
        return _f_to_t()
    if isinstance(alpha, Atom):
        return single_step(Rule.AWU, alpha)
    kind = type(alpha)
    inner = _compose(kind, weaken_up(alpha.left), weaken_up(alpha.right))
    return Builder(inner).eq(T).build()


def _f_to_t() -> Derivation:
    # (f.[t.t]) = f and [(f.t).t] = t, so one switch bridges the units
    return Builder(F).eq(And(F, Or(T, T))).apply(Rule.S).eq(T).build()


def contract_down(alpha: Formula) -> Derivation:
    """[alpha.alpha] ⇒ alpha with m and ac↓."""
    start = Or(alpha, alpha)
    if isinstance(alpha, Unit):
        return Builder(start).eq(alpha).build()
    if isinstance(alpha, Atom):
        return single_step(Rule.ACD, start)
    b, c = alpha.left, alpha.right
    if isinstance(alpha, Or):
        inner = compose_disj(contract_down(b), contract_down(c))
        return Builder(start).then(inner).build()
    inner = compose_conj(contract_down(b), contract_down(c))
    return Builder(start).apply(Rule.M).then(inner).build()


def contract_up(alpha: Formula) -> Derivation:
    """alpha ⇒ (alpha.alpha) with m and ac↑."""
    target = And(alpha, alpha)
    if isinstance(alpha, Unit):
        return Builder(alpha).eq(target).build()
    if isinstance(alpha, Atom):
        return single_step(Rule.ACU, alpha)
    b, c = alpha.left, alpha.right
    if isinstance(alpha, Or):
        inner = compose_disj(contract_up(b), contract_up(c))
        return Builder(inner).apply(Rule.M).eq(target).build()
    inner = compose_conj(contract_up(b), contract_up(c))
    return Builder(inner).eq(target).build()


def identity(beta: Formula) -> Derivation:
    """t ⇒ [beta.-beta] from atomic identities and two switches per connective."""
    target = Or(beta, dual(beta))
    if isinstance(beta, Unit):
        return Builder(T).eq(target).build()
    if isinstance(beta, Atom):
        return single_step(Rule.AID, T, (), beta)
    if isinstance(beta, And):
        flipped = identity(dual(beta))
        return Builder(flipped).eq(target).build()
    g, d = beta.left, beta.right
    gn, dn = dual(g), dual(d)
    b = Builder(T).then(compose_conj(identity(g), identity(d)))
    b.eq(And(Or(d, dn), Or(gn, g))).apply(Rule.S)
    b.eq(Or(And(gn, Or(dn, d)), g)).apply(Rule.S, (0,))
    return b.eq(target).build()


def cut(beta: Formula) -> Derivation:
    """(beta.-beta) ⇒ f from atomic cuts and two switches per connective."""
    start = And(beta, dual(beta))
    if isinstance(beta, Unit):
        return Builder(start).eq(F).build()
    if isinstance(beta, Atom):
        return single_step(Rule.AIU, start)
    if isinstance(beta, Or):
        flipped = cut(dual(beta))
        return Builder(start).then(flipped).build()
    g, d = beta.left, beta.right
    gn, dn = dual(g), dual(d)
    b = Builder(start).eq(And(g, And(d, Or(dn, gn)))).apply(Rule.S, (1,))
    b.eq(And(g, Or(gn, And(d, dn)))).apply(Rule.S)
    b.eq(Or(And(g, gn), And(d, dn)))
    return b.then(compose_disj(cut(g), cut(d))).eq(F).build()


_GENERAL_BUILDERS = {
    Rule.GWD: lambda s: weaken_down(s.contractum),
    Rule.GWU: lambda s: weaken_up(s.redex),
    Rule.GCD: lambda s: contract_down(s.contractum),
    Rule.GCU: lambda s: contract_up(s.redex),
}


def expand_nonatomic(step: Step) -> Derivation:
    if step.rule not in GENERAL:
        raise SchemaError(f"{step.rule} is not a general structural rule")
    bad = check_step(step)
    if bad:
        raise SchemaError(bad)
    local = _GENERAL_BUILDERS[step.rule](step)
    return in_context(Context(step.premiss, step.path), local)


def expand_general(d: Derivation) -> Derivation:
    """Replace every general-rule step of ``d`` by its atomic expansion."""
    if not any(s.rule in GENERAL for s in d.steps):
        return d
    lines = [d.premiss]
    steps: list[Step] = []
    for s in d.steps:
        if s.rule in GENERAL:
            e = expand_nonatomic(s)
            lines.extend(e.lines[1:])
            steps.extend(e.steps)
        else:
            lines.append(s.conclusion)
            steps.append(s)
    return Derivation(tuple(lines), tuple(steps))


# ------------------------------------------------------------ serialisation


def _path_text(p: Path) -> str:
    return "".join(str(i) for i in p)


def _path_parse(text: str) -> Path:
    text = text.strip().replace(".", "")
    if not text or text == "-":
        return ()
    return tuple(int(c) for c in text)


def _pin_text(pin) -> str:
    return " ".join(f"{_path_text(a) or '-'}>{_path_text(b) or '-'}" for a, b in pin)


def _pin_parse(text: str):
    pairs = []
    for item in text.split():
        a, b = item.split(">")
        pairs.append((_path_parse(a), _path_parse(b)))
    return tuple(pairs)


def trace_hash(step: Step) -> str:
    body = ";".join(f"{_path_text(a)}>{_path_text(b)}" for a, b in sorted(_trace(step)))
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def to_json(d: Derivation) -> str:
    items = [{"rule": None, "redex_path": None, "line_text": render(d.premiss)}]
    for s in d.steps:
        items.append(
            {
                "rule": s.rule.value,
                "redex_path": _path_text(s.path),
                "line_text": render(s.conclusion),
                "occ_hash": trace_hash(s),
            }
        )
        if s.pin is not None:
            items[-1]["occ_map"] = _pin_text(s.pin)
    return json.dumps(items, ensure_ascii=False, indent=1)


def from_json(text: str) -> Derivation:
    items = json.loads(text)
    if not isinstance(items, list) or not items:
        raise ValueError("a serialised derivation is a nonempty list")
    lines = [parse(items[0]["line_text"])]
    steps: list[Step] = []
    for k, it in enumerate(items[1:], 1):
        line = parse(it["line_text"])
        pin = _pin_parse(it["occ_map"]) if it.get("occ_map") is not None else None
        s = Step(Rule.parse(it["rule"]), _path_parse(it.get("redex_path") or ""), lines[-1], line, pin)
        h = it.get("occ_hash")
        if h is not None and check_step(s) is None and trace_hash(s) != h:
            raise ValueError(f"occurrence map hash mismatch at step {k}")
        steps.append(s)
        lines.append(line)
    return Derivation(tuple(lines), tuple(steps))


def infer_step(rule: Rule, premiss: Formula, conclusion: Formula) -> Step:
    """Locate the redex of a step given only its rule and its two lines."""
    p = diff_path(premiss, conclusion)
    candidates = [p[:i] for i in range(len(p), -1, -1)]
    for q in candidates:
        s = Step(rule, q, premiss, conclusion)
        if check_step(s) is None:
            return s
    return Step(rule, p, premiss, conclusion)


def to_text(d: Derivation, elide=None) -> str:
    """Stacked rendering: formula lines separated by ``-- rule @path`` lines."""
    out = [render(d.premiss)]
    for s in d.steps:
        if elide is not None and elide(s):
            continue
        pin = f" {{{_pin_text(s.pin)}}}" if s.pin is not None else ""
        out.append(f"  -- {s.rule.value} @{_path_text(s.path) or '-'}{pin}")
        out.append(render(s.conclusion))
    return "\n".join(out) + "\n"


def from_text(text: str) -> Derivation:
    lines: list[Formula] = []
    steps: list[Step] = []
    pending = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("--"):
            body, _, pin_text = line[2:].partition("{")
            parts = body.strip().split("@")
            rule = Rule.parse(parts[0].strip())
            path = _path_parse(parts[1]) if len(parts) > 1 else None
            pending = (rule, path, _pin_parse(pin_text.rstrip("}")) if pin_text else None)
            continue
        f = parse(line)
        if lines:
            if pending is None:
                raise ValueError("two formula lines without a rule between them")
            rule, path, pin = pending
            s = infer_step(rule, lines[-1], f) if path is None else Step(rule, path, lines[-1], f, pin)
            steps.append(s)
        lines.append(f)
        pending = None
    if not lines:
        raise ValueError("empty derivation")
    return Derivation(tuple(lines), tuple(steps))


def load(text: str) -> Derivation:
    stripped = text.lstrip()
    return from_json(text) if stripped.startswith("[") and '"line_text"' in text else from_text(text)
