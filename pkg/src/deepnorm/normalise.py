"""Normalisation pipeline: simple form, cut-free form, analytic form."""

from __future__ import annotations

import csv
import io
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .derivation import (
    ASKS,
    Builder,
    Derivation,
    Rule,
    Step,
    check_derivation,
    compose_disj,
    contract_down,
    contract_up,
    in_context,
    restep,
)
from .flow import (
    Flow,
    Kind,
    OccurrenceMap,
    components,
    extract_flow,
    put,
    reduce_derivation,
    substitute_components,
)
from .formula import (
    F,
    T,
    And,
    Atom,
    Context,
    Formula,
    Or,
    Path,
    _nest,
    atom_occurrences,
    canonical,
    equivalent,
    replace,
    simplify,
    substitute,
    subformula,
)
from .threshold import gamma, theta


class NormalisationError(ValueError):
    pass


def _eq(b: Builder, target: Formula) -> Builder:
    """Like ``Builder.eq`` but folds into a preceding eq step."""
    if b.current == target:
        return b
    if b.steps and b.steps[-1].rule is Rule.EQ and b.steps[-1].pin is None:
        b.steps.pop()
        b.lines.pop()
    return b.eq(target)


# ------------------------------------------------------ switch movement


def _first_node(f: Formula, path: Path, kind) -> int | None:
    node = f
    for i, c in enumerate(path):
        if type(node) is kind:
            return i
        node = node.child(c)
    return None


def _block_end(f: Formula, path: Path, start: int, kind) -> tuple[int, list[Formula]]:
    """Follow ``path`` from depth ``start`` through ``kind`` nodes; return the depth of
    the first other node and the siblings passed on the way."""
    node = subformula(f, path[:start])
    j, sibs = start, []
    while j < len(path) and type(node) is kind:
        sibs.append(node.child(1 - path[j]))
        node = node.child(path[j])
        j += 1
    return j, sibs


def _drop_unit(f: Formula) -> Formula:
    """The hole's unit simplified away, so an already switch-shaped block needs no eq."""
    g = simplify(f)
    return f if g in (T, F) else g


def _push_out(b: Builder, base: Path, host: Formula, path: Path, alpha: Formula) -> None:
    d = _first_node(host, path, And)
    if d is None:
        return
    j, sibs = _block_end(host, path, d, And)
    beta = _nest(And, sibs)
    x_host = subformula(host, path[:j])
    block = base + path[:d]
    cur = b.current
    _eq(b, replace(cur, block, And(replace(x_host, path[j:], alpha), beta)))
    _push_out(b, block + (0,), x_host, path[j:], alpha)
    z = _drop_unit(replace(x_host, path[j:], F))
    _eq(b, replace(b.current, block, And(beta, Or(z, alpha))))
    b.apply(Rule.S, block)


def push_out(ctx: Context, alpha: Formula) -> Derivation:
    """ξ{α} ⇒ [α.ξ{f}] using one switch per conjunction block on the hole's branch."""
    b = Builder(ctx.plug(alpha))
    _push_out(b, (), ctx.host, ctx.path, alpha)
    return _eq(b, Or(alpha, ctx.plug(F))).build()


def _pull_in(b: Builder, base: Path, host: Formula, path: Path, alpha: Formula) -> None:
    d = _first_node(host, path, Or)
    if d is None:
        return
    j, sibs = _block_end(host, path, d, Or)
    beta = _nest(Or, sibs)
    x_host = subformula(host, path[:j])
    xt = _drop_unit(replace(x_host, path[j:], T))
    outer = replace(host, path, T)
    _eq(b, replace(b.current, base, replace(outer, path[:d], And(alpha, Or(xt, beta)))))
    b.apply(Rule.S, base + path[:d])
    _pull_in(b, base + path[:d] + (0,), x_host, path[j:], alpha)


def pull_in(ctx: Context, alpha: Formula) -> Derivation:
    """(α.ξ{t}) ⇒ ξ{α} using one switch per disjunction block on the hole's branch."""
    b = Builder(And(alpha, ctx.plug(T)))
    _pull_in(b, (), ctx.host, ctx.path, alpha)
    return _eq(b, ctx.plug(alpha)).build()


def switch_count(ctx: Context, kind=And) -> int:
    """Number of ``kind`` blocks met on the way to the hole."""
    n, node, prev = 0, ctx.host, None
    for c in ctx.path:
        if type(node) is kind and prev is not kind:
            n += 1
        prev = type(node)
        node = node.child(c)
    return n


# ---------------------------------------------------- split out / join in


def _positive(a: Atom | str) -> Atom:
    return Atom(a) if isinstance(a, str) else a.positive


def split_out(alpha: Formula, a: Atom | str) -> Derivation:
    """α ⇒ [a.α{a/f}] in {aw↓, ac↓, s, eq}."""
    a = _positive(a)
    paths = [p for p, x in atom_occurrences(alpha) if x == a]
    if not paths:
        return Builder(alpha).eq(Or(F, alpha)).apply(Rule.AWD, (0,), a).build()
    b = Builder(alpha)
    inner, base = alpha, ()
    for p in paths:
        b.at(base, push_out(Context(inner, p), a))
        inner = replace(inner, p, F)
        base += (1,)
    for k in range(len(paths) - 2, -1, -1):
        at = (1,) * k
        rest = subformula(b.current, at + (1, 1))
        _eq(b, replace(b.current, at, Or(Or(a, a), rest)))
        b.apply(Rule.ACD, at + (0,))
    return _eq(b, Or(a, substitute(alpha, {a.name: F}))).build()


def join_in(alpha: Formula, a: Atom | str) -> Derivation:
    """(a.α{a/t}) ⇒ α in {aw↑, ac↑, s, eq}."""
    a = _positive(a)
    paths = [p for p, x in atom_occurrences(alpha) if x == a]
    top = substitute(alpha, {a.name: T})
    if not paths:
        return Builder(And(a, top)).apply(Rule.AWU, (0,)).eq(alpha).build()
    b = Builder(And(a, top))
    h = len(paths)
    for k in range(h - 1):
        at = (1,) * k
        b.apply(Rule.ACU, at + (0,))
        rest = subformula(b.current, at + (1,))
        _eq(b, replace(b.current, at, And(a, And(a, rest))))
    host = top
    for m, p in enumerate(paths):
        # the innermost conjunct is filled first
        b.at((1,) * (h - 1 - m), pull_in(Context(host, p), a))
        host = replace(host, p, a)
    return _eq(b, alpha).build()


# ----------------------------------------- negative (co)contractions


def _contraction_gadget(x: Atom) -> Derivation:
    """[x.x] ⇒ x for a negated x, using one identity, one cocontraction on the dual and two cuts."""
    a = x.dual()
    b = Builder(Or(x, x))
    b.eq(And(T, Or(x, x))).apply(Rule.AID, (0,), a)
    b.eq(And(Or(x, x), Or(a, x))).apply(Rule.S)
    b.eq(Or(And(a, Or(x, x)), x)).apply(Rule.ACU, (0, 0))
    b.eq(Or(And(a, And(a, Or(x, x))), x)).apply(Rule.S, (0, 1))
    b.eq(Or(And(a, Or(x, And(a, x))), x)).apply(Rule.S, (0,))
    b.apply(Rule.AIU, (0, 0)).apply(Rule.AIU, (0, 1))
    return b.eq(x).build()


def _cocontraction_gadget(x: Atom) -> Derivation:
    """x ⇒ (x.x) for a negated x, using two identities, one contraction on the dual and one cut."""
    a = x.dual()
    b = Builder(x)
    b.eq(And(x, And(T, T))).apply(Rule.AID, (1, 0), a).apply(Rule.AID, (1, 1), a)
    b.eq(And(x, And(Or(x, a), Or(x, a)))).apply(Rule.S, (1,))
    b.eq(And(x, Or(And(x, Or(x, a)), a))).apply(Rule.S, (1, 0))
    b.eq(And(x, Or(And(x, x), Or(a, a)))).apply(Rule.ACD, (1, 1))
    b.eq(And(x, Or(a, And(x, x)))).apply(Rule.S)
    b.eq(Or(And(a, x), And(x, x))).apply(Rule.AIU, (0,))
    return b.eq(And(x, x)).build()


def _negative(s: Step) -> Atom | None:
    if s.rule is Rule.ACD:
        x = subformula(s.conclusion, s.path)
    elif s.rule is Rule.ACU:
        x = s.redex
    else:
        return None
    return x if x.negated else None


def remove_negative_cocontraction(d: Derivation) -> Derivation:
    """Replace every (co)contraction on a negated atom by a gadget whose only
    (co)contraction acts on the positive atom.

    Polarity is fixed per flow component by making non-negated literals positive,
    so no atom and its dual are both negative."""
    if not any(_negative(s) for s in d.steps):
        return d
    b = Builder(d.premiss)
    for s in d.steps:
        x = _negative(s)
        if x is None:
            b._push(s)
        else:
            gadget = _contraction_gadget(x) if s.rule is Rule.ACD else _cocontraction_gadget(x)
            b.then(in_context(Context(s.premiss, s.path), gadget))
    return b.build()


# ------------------------------------------------------------ simple form


@dataclass
class SimpleForm:
    proof: Derivation
    core: Derivation
    atoms: tuple[str, ...]
    conclusion: Formula
    components: list[frozenset[int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.atoms)

    def core_premiss(self) -> Formula:
        return _nest(And, [Or(Atom(b), Atom(b, True)) for b in self.atoms]) if self.atoms else T

    def core_conclusion(self) -> Formula:
        if not self.atoms:
            return self.conclusion
        return Or(self.conclusion, _nest(Or, [And(Atom(b), Atom(b, True)) for b in self.atoms]))

    def violations(self) -> list[str]:
        out = []
        rep = check_derivation(self.proof)
        if not rep.valid:
            out.append(f"proof invalid: {rep.failures[0]}")
        if canonical(self.proof.premiss) != T:
            out.append("proof premiss is not t")
        if not equivalent(self.proof.conclusion, self.conclusion):
            out.append("proof conclusion changed")
        if not check_derivation(self.core).valid:
            out.append("core invalid")
        if self.core.premiss != self.core_premiss():
            out.append("core premiss is not the conjunction of identities")
        if self.core.conclusion != self.core_conclusion():
            out.append("core conclusion is not the conclusion beside the cut pairs")
        if Rule.AIU in self.core.rule_counts():
            out.append("core contains a cut")
        if not _contains_core(self.proof, self.core):
            out.append("core is not a segment of the proof")
        flow, _ = extract_flow(self.core)
        if len(self.components) != self.n:
            out.append("one component per cut atom expected")
        for b, comp in zip(self.atoms, self.components):
            edges = [flow.edge(e) for e in comp]
            if any(e.atom != Atom(b, True) for e in edges):
                out.append(f"component of -{b} carries other atoms")
            if sum(e.down is None for e in edges) != 1 or sum(e.up is None for e in edges) != 1:
                out.append(f"component of -{b} must have one dangling edge at each end")
            kinds = {flow.vertex(v).kind for e in edges for v in (e.up, e.down) if v is not None}
            if not kinds <= {Kind.CONTRACTION, Kind.COCONTRACTION}:
                out.append(f"component of -{b} holds {sorted(k.value for k in kinds)}")
        whole, _ = extract_flow(self.proof)
        if whole.count(Kind.CUT) != self.n:
            out.append("proof must have exactly one cut per atom of the vector")
        return out


def _contains_core(proof: Derivation, core: Derivation) -> bool:
    n = len(core.lines)
    for i in range(len(proof.lines) - n + 1):
        if proof.lines[i] == core.lines[0] and proof.lines[i : i + n] == core.lines:
            return True
    return False


def _lift_identity(d: Derivation, i: int) -> tuple[Derivation, Callable[[int], int], int]:
    s = d.steps[i]
    pair = s.contractum
    upper = Derivation(d.lines[: i + 1], d.steps[:i])
    # pushed by hand: while tagged, the pair is not a literal and its dual
    b = Builder(T).eq(And(T, T))
    b._push(Step(Rule.AID, (0,), And(T, T), And(pair, T)))
    b.then(in_context(Context(And(pair, T), (1,)), upper))
    before = len(b.steps)
    b.then(pull_in(Context(d.lines[i], s.path), pair)).eq(d.lines[i + 1])
    p = len(b.steps) - before
    for t in d.steps[i + 1 :]:
        b._push(t)
    return b.build(), (lambda j: j + 2 if j < i else j + 1 + p), 1


def _lower_cut(d: Derivation, j: int) -> tuple[Derivation, Callable[[int], int], int]:
    s = d.steps[j]
    pair = s.redex
    b = Builder(Derivation(d.lines[: j + 1], d.steps[:j]))
    b.then(push_out(Context(d.lines[j], s.path), pair)).eq(Or(pair, d.lines[j + 1]))
    mid = len(b.steps)
    lower = Derivation(d.lines[j + 1 :], d.steps[j + 1 :])
    b.then(in_context(Context(Or(pair, F), (1,)), lower))
    b._push(Step(Rule.AIU, (0,), b.current, replace(b.current, (0,), F)))
    at = len(b.steps) - 1
    b.eq(d.conclusion)
    return b.build(), (lambda k: k if k < j else k - j - 1 + mid), at


def _eps_pairs(flow: Flow) -> list[tuple[int, int, str, int]]:
    """(identity step, cut step, atom name, edge) for every negated edge from an identity straight into a cut."""
    out = []
    for e in flow.edges:
        if e.atom.negated and e.up is not None and e.down is not None:
            up, down = flow.vertex(e.up), flow.vertex(e.down)
            if up.kind is Kind.IDENTITY and down.kind is Kind.CUT:
                out.append((up.step, down.step, e.atom.name, e.id))
    return out


def _rename_edges(d: Derivation, omap: OccurrenceMap, names: dict[int, str]) -> Derivation:
    """Give the occurrences of some edges new atom names on every line.

    Eq steps keep their occurrence maps, so identical operands cannot trade places
    while the edges are tagged."""
    lines = []
    for i, line in enumerate(d.lines):
        targets = {
            p: Atom(names[e], subformula(line, p).negated) for p, e in omap.lines[i].items() if e in names
        }
        lines.append(put(line, targets) if targets else line)
    steps = tuple(restep(s, lines[i], lines[i + 1]) for i, s in enumerate(d.steps))
    return Derivation(tuple(lines), steps)


def _untag(d: Derivation, names: dict[str, str]) -> Derivation:
    table = {}
    for tag, orig in names.items():
        table[Atom(tag)] = table[Atom(tag, True)] = Atom(orig)
    lines = tuple(substitute(x, table) for x in d.lines)
    steps = tuple(restep(s, lines[i], lines[i + 1]) for i, s in enumerate(d.steps))
    return Derivation(lines, steps)


def _copies(x: Formula, n: int) -> Derivation:
    """x ⇒ (x.(x.…x)) with n copies, by repeated general cocontraction."""
    b = Builder(x)
    for k in range(n - 1):
        b.at((1,) * k, contract_up(x))
    return b.build()


def _merge(x: Formula, n: int) -> Derivation:
    """[x.[x.…x]] with n copies ⇒ x, by repeated general contraction."""
    b = Builder(_nest(Or, [x] * n))
    for k in range(n - 2, -1, -1):
        b.at((1,) * k, contract_down(x))
    return b.build()


def _conj_paths(n: int) -> list[Path]:
    """Paths of the operands of a right-nested n-ary connective."""
    if n == 1:
        return [()]
    return [(1,) * k + (0,) for k in range(n - 1)] + [(1,) * (n - 1)]


def to_simple_form(p: Derivation) -> SimpleForm:
    if canonical(p.premiss) != T:
        raise NormalisationError("input must be a proof (premiss t)")
    alpha = p.conclusion
    # stage 1: no negative (co)contractions, then weakening-fed cuts on negated edges disappear
    if p.premiss != T:
        p = Builder(T).then(p).build()
    d = remove_negative_cocontraction(p)
    d, _ = reduce_derivation(
        d, ["aw↓-ai↑"], accept=lambda fl, eid: fl.edge(eid).atom.negated
    )
    # stage 2: identities to the top, cuts to the bottom
    flow, omap = extract_flow(d)
    pairs = sorted(_eps_pairs(flow))
    if len({c for _, c, _, _ in pairs}) != flow.count(Kind.CUT):
        raise NormalisationError("a cut is not fed by an identity on its negated side")
    ids = [i for i, _, _, _ in pairs]
    cuts = [c for _, c, _, _ in pairs]
    names = [nm for _, _, nm, _ in pairs]
    tags = {e: f"{nm}'{k}" for k, (_, _, nm, e) in enumerate(pairs)}
    origin = {tags[e]: nm for _, _, nm, e in pairs}
    d = _rename_edges(d, omap, tags)
    id_pos: list[int] = []
    for k in range(len(ids)):
        d, remap, new = _lift_identity(d, ids[k])
        ids = [remap(x) for x in ids]
        cuts = [remap(x) for x in cuts]
        id_pos = [remap(x) for x in id_pos] + [new]
    cut_pos: list[int] = []
    for c in sorted(range(len(cuts)), key=lambda k: -cuts[k]):
        d, remap, new = _lower_cut(d, cuts[c])
        cuts = [remap(x) if k != c else x for k, x in enumerate(cuts)]
        cut_pos = [remap(x) for x in cut_pos] + [new]
    if not ids:
        return SimpleForm(d, d, (), alpha, [])
    s0, e0 = max(id_pos) + 1, min(cut_pos)
    # stage 3: one identity and one cut per atom, linked by general (co)contractions
    atoms = tuple(sorted(set(names)))
    count = Counter(names)
    n = len(atoms)
    by_atom = {x: [t for t, nm in origin.items() if nm == x] for x in atoms}
    tagged_groups = [_nest(Or, [And(Atom(x), Atom(t, True)) for t in by_atom[x]]) for x in atoms]
    closing = Builder(Derivation(d.lines[s0 : e0 + 1], d.steps[s0:e0])).eq(Or(alpha, _nest(Or, tagged_groups)))
    mid = _untag(closing.build(), origin)
    premiss = _nest(And, [Or(Atom(x), Atom(x, True)) for x in atoms])
    core_b = Builder(premiss)
    for path, x in zip(_conj_paths(n), atoms):
        core_b.at(path, _copies(Or(Atom(x), Atom(x, True)), count[x]))
    core_b.then(mid)
    for path, x in zip(_conj_paths(n), atoms):
        core_b.at((1,) + path, _merge(And(Atom(x), Atom(x, True)), count[x]))
    core = core_b.build()
    proof_b = Builder(T)
    if n > 1:
        proof_b.eq(_nest(And, [T] * n))
    for path, x in zip(_conj_paths(n), atoms):
        proof_b.apply(Rule.AID, path, Atom(x))
    proof_b.then(core)
    for path in _conj_paths(n):
        proof_b.apply(Rule.AIU, (1,) + path)
    proof = proof_b.eq(alpha).build()
    return SimpleForm(proof, core, atoms, alpha, _core_components(core, atoms))


def _core_components(core: Derivation, atoms: Sequence[str]) -> list[frozenset[int]]:
    flow, omap = extract_flow(core)
    comps = components(flow)
    out = []
    for path, x in zip(_conj_paths(len(atoms)), atoms):
        eid = omap.lines[0][path + (1,)]
        out.append(next(c for c in comps if eid in c))
    return out


# -------------------------------------------------------- cut-free form


def _phi(sf: SimpleForm, k: int, flow, omap) -> Derivation:
    """θ_k ⇒ [α.θ_{k+1}] over the atom vector of the simple form."""
    atoms, n = sf.atoms, sf.n
    th = theta(k, atoms)
    nxt = theta(k + 1, atoms)
    b = Builder(th).then(_copies(th, n))
    for path, x in zip(_conj_paths(n), atoms):
        b.at(path, split_out(th, x))
    jobs = [
        (comp, Atom(x, True), substitute(th, {x: F}))
        for comp, x in zip(sf.components, atoms)
    ]
    b.then(substitute_components(sf.core, jobs, flow, omap))
    blocks = []
    for j, x in enumerate(atoms):
        low = substitute(th, {x: F})
        blk = Builder(And(Atom(x), low)).at((1,), gamma(k, j + 1, atoms)).then(join_in(nxt, x))
        blocks.append(blk.build())
    joined = blocks[-1]
    for blk in reversed(blocks[:-1]):
        joined = compose_disj(blk, joined)
    b.at((1,), joined)
    b.at((1,), _merge(nxt, n))
    return b.build()


def to_cut_free(sf: SimpleForm) -> Derivation:
    if sf.n == 0:
        return sf.proof
    bad = sf.violations()
    if bad:
        raise NormalisationError("malformed simple form: " + "; ".join(bad))
    alpha, n = sf.conclusion, sf.n
    flow, omap = extract_flow(sf.core)
    b = Builder(T)
    for k in range(n + 1):
        b.at((1,) * k, _phi(sf, k, flow, omap))
    _eq(b, _nest(Or, [alpha] * (n + 1)))
    for k in range(n - 1, -1, -1):
        b.at((1,) * k, contract_down(alpha))
    return b.build()


# --------------------------------------------------------- analytic form

AW_UP_REDUCTIONS = ("ai↓-aw↑", "aw↓-aw↑", "ac↓-aw↑", "ac↑-aw↑")


def to_analytic(p: Derivation) -> Derivation:
    """Remove every coweakening by pushing it up the flow until it meets its source."""
    if Rule.AIU in p.rule_counts():
        raise NormalisationError("residual ai↑ found; remove cuts first")
    out, _ = reduce_derivation(p, AW_UP_REDUCTIONS)
    if Rule.AWU in out.rule_counts():
        raise NormalisationError("a coweakening has no reducible source")
    return out


# ------------------------------------------------------------- pipeline


@dataclass
class StageReport:
    stage: str
    valid: bool
    size: int
    rules: dict[str, int]
    seconds: float
    same_conclusion: bool = True
    atoms: int = 0


@dataclass
class PipelineReport:
    stages: list[StageReport] = field(default_factory=list)
    simple_form: SimpleForm | None = None

    @property
    def valid(self) -> bool:
        return all(s.valid and s.same_conclusion for s in self.stages)

    def stage(self, name: str) -> StageReport:
        return next(s for s in self.stages if s.stage == name)

    def rows(self) -> list[dict]:
        out = []
        for s in self.stages:
            row = {
                "stage": s.stage,
                "valid": s.valid,
                "same_conclusion": s.same_conclusion,
                "size": s.size,
                "atoms": s.atoms,
                "seconds": round(s.seconds, 4),
            }
            for r in Rule:
                if r.ascii not in ("gwd", "gwu", "gcd", "gcu"):
                    row[r.ascii] = s.rules.get(str(r), 0)
            out.append(row)
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()


def _record(report: PipelineReport, name: str, d: Derivation, alpha: Formula, t0: float, allowed=None, atoms=0):
    rep = check_derivation(d, allowed)
    report.stages.append(
        StageReport(
            name,
            rep.valid and canonical(d.premiss) == T,
            rep.size,
            {str(r): c for r, c in rep.rule_multiset.items()},
            time.perf_counter() - t0,
            equivalent(d.conclusion, alpha),
            atoms,
        )
    )


def normalise(p: Derivation) -> tuple[Derivation, PipelineReport]:
    report = PipelineReport()
    alpha = p.conclusion
    t0 = time.perf_counter()
    _record(report, "input", p, alpha, t0)
    t0 = time.perf_counter()
    sf = to_simple_form(p)
    report.simple_form = sf
    _record(report, "simple", sf.proof, alpha, t0, atoms=sf.n)
    t0 = time.perf_counter()
    cf = to_cut_free(sf)
    _record(report, "cutfree", cf, alpha, t0, atoms=sf.n)
    t0 = time.perf_counter()
    an = to_analytic(cf)
    _record(report, "analytic", an, alpha, t0, allowed=ASKS, atoms=sf.n)
    return an, report


# ---------------------------------------------------------- growth fits


@dataclass
class QuasiFit:
    """log(out) ≈ c·(log in)² + d by least squares, with a trend test on the largest inputs."""

    c: float
    d: float
    envelope: float
    points: int
    top_slope: float
    top_pvalue: float

    @property
    def trending_up(self) -> bool:
        return self.top_slope > 0 and self.top_pvalue < 0.05

    def __str__(self) -> str:
        return (
            f"log(out) = {self.c:.4f}*(log in)^2 + {self.d:.4f} (envelope +{self.envelope:.4f}, "
            f"{self.points} proofs); top-decile residual slope {self.top_slope:+.4g} (p={self.top_pvalue:.3g})"
        )


def fit_quasipolynomial(size_in: Sequence[int], size_out: Sequence[int]) -> QuasiFit:
    x = np.log(np.asarray(size_in, dtype=float)) ** 2
    y = np.log(np.asarray(size_out, dtype=float))
    c, d = np.polyfit(x, y, 1)
    resid = y - (c * x + d)
    order = np.argsort(x)
    top = order[-max(3, len(x) // 10) :]
    trend = stats.linregress(x[top], resid[top])
    return QuasiFit(float(c), float(d), float(resid.max()), len(x), float(trend.slope), float(trend.pvalue))


def cubic_constant(size_in: Sequence[int], size_out: Sequence[int]) -> float:
    """Smallest C with size_out ≤ C·size_in³ over the sample."""
    return max(o / i**3 for i, o in zip(size_in, size_out))
