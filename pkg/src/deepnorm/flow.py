"""Atomic flows: extraction from derivations, validity, polarity, substitution and
the weakening/coweakening reductions."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace as dc_replace
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .derivation import (
    GENERAL,
    STRUCTURAL,
    Builder,
    Derivation,
    Rule,
    Step,
    _f_to_t,
    _trace,
    restep,
    active_occurrences,
    contract_down,
    contract_up,
    cut,
    identity,
    weaken_down,
    weaken_up,
)
from .formula import F, T, And, Atom, Formula, Or, Path, _Binary, atom_occurrences, dual, subformula


class Kind(str, Enum):
    IDENTITY = "identity"
    CUT = "cut"
    WEAKENING = "weakening"
    COWEAKENING = "coweakening"
    CONTRACTION = "contraction"
    COCONTRACTION = "cocontraction"


ARITY = {
    Kind.IDENTITY: (0, 2),
    Kind.CUT: (2, 0),
    Kind.WEAKENING: (0, 1),
    Kind.COWEAKENING: (1, 0),
    Kind.CONTRACTION: (2, 1),
    Kind.COCONTRACTION: (1, 2),
}

RULE_KIND = {
    Rule.AID: Kind.IDENTITY,
    Rule.AIU: Kind.CUT,
    Rule.AWD: Kind.WEAKENING,
    Rule.AWU: Kind.COWEAKENING,
    Rule.ACD: Kind.CONTRACTION,
    Rule.ACU: Kind.COCONTRACTION,
}

# pairs of (kind above, kind below) joined by one edge, with the unit put on that edge
REDUCTIONS = {
    (Kind.WEAKENING, Kind.CONTRACTION): ("aw↓-ac↓", F),
    (Kind.WEAKENING, Kind.CUT): ("aw↓-ai↑", F),
    (Kind.WEAKENING, Kind.COWEAKENING): ("aw↓-aw↑", T),
    (Kind.WEAKENING, Kind.COCONTRACTION): ("aw↓-ac↑", F),
    (Kind.COCONTRACTION, Kind.COWEAKENING): ("ac↑-aw↑", T),
    (Kind.IDENTITY, Kind.COWEAKENING): ("ai↓-aw↑", T),
    (Kind.CONTRACTION, Kind.COWEAKENING): ("ac↓-aw↑", T),
}


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: Kind
    step: int | None = None


@dataclass(frozen=True)
class Edge:
    """``up``/``down`` are vertex ids; ``None`` means the edge dangles, and then
    ``top``/``bottom`` give its position among the premiss/conclusion atoms."""

    id: int
    atom: Atom
    up: int | None = None
    down: int | None = None
    top: int | None = None
    bottom: int | None = None


@dataclass(frozen=True)
class Flow:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        vs = {v.id: v for v in self.vertices}
        es = {e.id: e for e in self.edges}
        ups: dict[int, list[int]] = {v: [] for v in vs}
        downs: dict[int, list[int]] = {v: [] for v in vs}
        for e in self.edges:
            if e.up is not None:
                downs[e.up].append(e.id)
            if e.down is not None:
                ups[e.down].append(e.id)
        object.__setattr__(self, "_index", (vs, es, ups, downs))

    def vertex(self, vid: int) -> Vertex:
        return self._index[0][vid]

    def edge(self, eid: int) -> Edge:
        return self._index[1][eid]

    def upper(self, vid: int) -> list[int]:
        """Edges entering the vertex from above."""
        return self._index[2][vid]

    def lower(self, vid: int) -> list[int]:
        return self._index[3][vid]

    def count(self, kind: Kind) -> int:
        return sum(v.kind is kind for v in self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class OccurrenceMap:
    """For every line of a derivation, the edge of each atom occurrence."""

    lines: tuple[dict[Path, int], ...]

    def edge_at(self, line: int, path: Path) -> int:
        return self.lines[line][path]

    def occurrences(self, eid: int) -> list[tuple[int, Path]]:
        return [(i, p) for i, m in enumerate(self.lines) for p, e in m.items() if e == eid]


# ------------------------------------------------------------- extraction


def extract_flow(d: Derivation) -> tuple[Flow, OccurrenceMap]:
    edges: dict[int, dict] = {}
    vertices: list[Vertex] = []

    def new_edge(a: Atom, **kw) -> int:
        eid = len(edges)
        edges[eid] = dict(atom=a, up=None, down=None, top=None, bottom=None, **kw)
        return eid

    first = {}
    for i, (p, a) in enumerate(atom_occurrences(d.premiss)):
        first[p] = new_edge(a)
        edges[first[p]]["top"] = i
    maps = [first]
    for i, s in enumerate(d.steps):
        if s.rule in GENERAL:
            raise FlowError(f"step {i} uses the general rule {s.rule}; expand it first")
        cur = maps[-1]
        nxt = {b: cur[a] for a, b in _trace(s)}
        if s.rule in STRUCTURAL:
            vid = len(vertices)
            vertices.append(Vertex(vid, RULE_KIND[s.rule], i))
            act_p, act_c = active_occurrences(s)
            for p in act_p:
                edges[cur[p]]["down"] = vid
            for p in act_c:
                e = new_edge(subformula(s.conclusion, p))
                edges[e]["up"] = vid
                nxt[p] = e
        maps.append(nxt)
    for i, (p, _) in enumerate(atom_occurrences(d.conclusion)):
        edges[maps[-1][p]]["bottom"] = i
    flow = Flow(tuple(vertices), tuple(Edge(k, **v) for k, v in edges.items()))
    return flow, OccurrenceMap(tuple(maps))


# --------------------------------------------------------------- validity


def _graph(flow: Flow) -> nx.MultiDiGraph:
    """Vertices plus one boundary node per dangling end, edges directed downwards."""
    g = nx.MultiDiGraph()
    for v in flow.vertices:
        g.add_node(("v", v.id), label=v.kind.value)
    for e in flow.edges:
        up = ("v", e.up) if e.up is not None else ("top", e.top if e.top is not None else f"e{e.id}")
        down = ("v", e.down) if e.down is not None else ("bot", e.bottom if e.bottom is not None else f"e{e.id}")
        for node in (up, down):
            if node not in g:
                g.add_node(node, label=f"{node[0]}:{node[1]}")
        g.add_edge(up, down, atom=str(e.atom), id=e.id)
    return g


def _constraints(flow: Flow) -> list[tuple[int, int, bool]]:
    """(edge, edge, equal?) pairs a polarity assignment must respect."""
    out = []
    for v in flow.vertices:
        ports = flow.upper(v.id) + flow.lower(v.id)
        if v.kind in (Kind.IDENTITY, Kind.CUT):
            out.append((ports[0], ports[1], False))
        elif v.kind in (Kind.CONTRACTION, Kind.COCONTRACTION):
            out.append((ports[0], ports[1], True))
            out.append((ports[0], ports[2], True))
    return out


def _two_colour(flow: Flow, comp: Iterable[int]) -> dict[int, int] | None:
    """Colour one component with the given root edge at +1; None if impossible."""
    comp = list(comp)
    adj: dict[int, list[tuple[int, bool]]] = {e: [] for e in comp}
    for a, b, same in _constraints(flow):
        if a in adj:
            adj[a].append((b, same))
            adj[b].append((a, same))
    colour = {comp[0]: 1}
    todo = [comp[0]]
    while todo:
        e = todo.pop()
        for f, same in adj[e]:
            want = colour[e] if same else -colour[e]
            if f not in colour:
                colour[f] = want
                todo.append(f)
            elif colour[f] != want:
                return None
    return colour


def validate(flow: Flow) -> str | None:
    """None for a valid flow, else the reason."""
    for v in flow.vertices:
        up, down = ARITY[v.kind]
        if len(flow.upper(v.id)) != up or len(flow.lower(v.id)) != down:
            return f"vertex {v.id} ({v.kind.value}) has wrong arity"
    g = nx.DiGraph((e.up, e.down) for e in flow.edges if e.up is not None and e.down is not None)
    g.add_nodes_from(v.id for v in flow.vertices)
    if not nx.is_directed_acyclic_graph(g):
        return "cycle found"
    for comp in components(flow):
        if _two_colour(flow, comp) is None:
            return "no polarity assignment exists"
    return None


def check_labels(flow: Flow) -> str | None:
    """Atom labels agree with the vertex kinds (dual across identity/cut, equal across contractions)."""
    for v in flow.vertices:
        labels = [flow.edge(e).atom for e in flow.upper(v.id) + flow.lower(v.id)]
        if v.kind in (Kind.IDENTITY, Kind.CUT) and labels[0] != labels[1].dual():
            return f"vertex {v.id} joins non-dual atoms"
        if v.kind in (Kind.CONTRACTION, Kind.COCONTRACTION) and len(set(labels)) != 1:
            return f"vertex {v.id} joins different atoms"
    return None


def components(flow: Flow) -> list[frozenset[int]]:
    """Connected components as sets of edge ids, ordered by smallest edge id."""
    g = nx.Graph()
    g.add_nodes_from(("e", e.id) for e in flow.edges)
    for v in flow.vertices:
        ports = flow.upper(v.id) + flow.lower(v.id)
        for e in ports:
            g.add_edge(("v", v.id), ("e", e))
    comps = []
    for c in nx.connected_components(g):
        es = frozenset(x[1] for x in c if x[0] == "e")
        if es:
            comps.append(es)
    return sorted(comps, key=min)


def component_of(flow: Flow, eid: int) -> frozenset[int]:
    for c in components(flow):
        if eid in c:
            return c
    raise KeyError(eid)


class PolarityError(ValueError):
    pass


@dataclass(frozen=True)
class Polarity:
    count: int
    assignment: dict[int, int]


def polarity_assignments(
    flow: Flow,
    predicate: Callable[[Flow, frozenset[int], dict[int, int]], bool] | None = None,
) -> Polarity:
    """Count assignments and pick one: each component starts with its positive literals
    at +1 and is flipped only if ``predicate`` rejects that orientation."""
    comps = components(flow)
    chosen: dict[int, int] = {}
    for comp in comps:
        colour = _two_colour(flow, sorted(comp))
        if colour is None:
            raise PolarityError("no polarity assignment exists")
        root = min(comp)
        if flow.edge(root).atom.negated:
            colour = {e: -c for e, c in colour.items()}
        options = [colour, {e: -c for e, c in colour.items()}]
        for opt in options:
            if predicate is None or predicate(flow, comp, opt):
                chosen.update(opt)
                break
        else:
            raise PolarityError(f"predicate unsatisfiable on the component of edge {root}")
    return Polarity(2 ** len(comps), chosen)


def negative_literals_dual_free(flow: Flow, assignment: Mapping[int, int]) -> bool:
    """No atom and its dual both sit on negative edges."""
    neg = {flow.edge(e).atom for e, c in assignment.items() if c < 0}
    return not any(a.dual() in neg for a in neg)


def count_polarities_exhaustive(flow: Flow, limit: int = 22) -> int:
    """Brute force over all 2^|edges| sign vectors; the oracle for ``polarity_assignments``."""
    ids = sorted(e.id for e in flow.edges)
    if len(ids) > limit:
        raise ValueError(f"{len(ids)} edges is too many for exhaustive enumeration")
    pos = {e: i for i, e in enumerate(ids)}
    masks = np.arange(1 << len(ids), dtype=np.uint32)
    ok = np.ones(masks.shape, dtype=bool)
    for a, b, same in _constraints(flow):
        bit = ((masks >> pos[a]) ^ (masks >> pos[b])) & 1
        ok &= (bit == 0) if same else (bit == 1)
    return int(ok.sum())


# ------------------------------------------------------------- rendering


_SHAPE = {
    Kind.IDENTITY: "invtriangle",
    Kind.CUT: "triangle",
    Kind.WEAKENING: "circle",
    Kind.COWEAKENING: "doublecircle",
    Kind.CONTRACTION: "invhouse",
    Kind.COCONTRACTION: "house",
}


def to_dot(flow: Flow, polarity: Mapping[int, int] | None = None) -> str:
    if polarity is None:
        try:
            polarity = polarity_assignments(flow).assignment
        except PolarityError:
            polarity = {}
    out = ["digraph flow {", "  rankdir=TB;", '  node [label="", width=0.25];']
    for v in flow.vertices:
        out.append(f'  v{v.id} [shape={_SHAPE[v.kind]}, tooltip="{v.kind.value}"];')
    for e in flow.edges:
        up = f"v{e.up}" if e.up is not None else f"top{e.id}"
        down = f"v{e.down}" if e.down is not None else f"bot{e.id}"
        for name, free in ((up, e.up is None), (down, e.down is None)):
            if free:
                out.append(f"  {name} [shape=point];")
        colour = {1: "red", -1: "blue"}.get(polarity.get(e.id), "black")
        out.append(f'  {up} -> {down} [label="{e.atom}", color={colour}];')
    out.append("}")
    return "\n".join(out) + "\n"


def to_dict(flow: Flow) -> dict:
    return {
        "vertices": [{"id": v.id, "kind": v.kind.value} for v in flow.vertices],
        "edges": [
            {"id": e.id, "up": e.up, "down": e.down, "atom": str(e.atom)} for e in flow.edges
        ],
    }


def to_json(flow: Flow) -> str:
    return json.dumps(to_dict(flow), indent=2)


# ----------------------------------------------------- flow isomorphism


def isomorphic(f1: Flow, f2: Flow) -> bool:
    """Equal up to renaming vertices and edges; dangling ends keep their positions."""
    if len(f1.vertices) != len(f2.vertices) or len(f1.edges) != len(f2.edges):
        return False
    g1, g2 = _graph(f1), _graph(f2)

    def edge_match(a, b):
        return sorted(x["atom"] for x in a.values()) == sorted(x["atom"] for x in b.values())

    return nx.is_isomorphic(g1, g2, node_match=lambda a, b: a["label"] == b["label"], edge_match=edge_match)


def _state_key(flow: Flow) -> tuple:
    return (
        frozenset((v.id, v.kind) for v in flow.vertices),
        frozenset((e.id, e.atom, e.up, e.down, e.top, e.bottom) for e in flow.edges),
    )


# ------------------------------------------------- random flow generator


def random_flow(
    rng: random.Random,
    max_vertices: int = 12,
    max_edges: int | None = None,
    atoms: Sequence[str] = ("a", "b"),
    weights: Mapping[Kind, float] | None = None,
) -> Flow:
    """A valid flow grown top-down: every vertex consumes open edges and opens new ones."""
    weights = dict(weights or {k: 1.0 for k in Kind})
    edges: dict[int, dict] = {}
    vertices: list[Vertex] = []
    open_: list[int] = []

    def new_edge(a: Atom, up=None) -> int:
        eid = len(edges)
        edges[eid] = dict(atom=a, up=up, down=None, top=None, bottom=None)
        open_.append(eid)
        return eid

    def lit() -> Atom:
        return Atom(rng.choice(list(atoms)), rng.random() < 0.5)

    for i in range(rng.randint(0, 2)):
        edges[new_edge(lit())]["top"] = i
    target = rng.randint(1, max_vertices)
    cap = max_edges if max_edges is not None else 10**9
    tries = 0
    while len(vertices) < target and tries < 50 * max_vertices:
        tries += 1
        kind = rng.choices(list(weights), weights=list(weights.values()))[0]
        up, down = ARITY[kind]
        if len(edges) + down > cap:
            continue
        chosen: list[int] = []
        if up == 1:
            if not open_:
                continue
            chosen = [rng.choice(open_)]
        elif up == 2:
            pairs = [
                (x, y)
                for x in open_
                for y in open_
                if x < y
                and (
                    edges[x]["atom"] == edges[y]["atom"].dual()
                    if kind is Kind.CUT
                    else edges[x]["atom"] == edges[y]["atom"]
                )
            ]
            if not pairs:
                continue
            chosen = list(rng.choice(pairs))
        vid = len(vertices)
        vertices.append(Vertex(vid, kind))
        for e in chosen:
            edges[e]["down"] = vid
            open_.remove(e)
        if kind is Kind.IDENTITY:
            a = lit()
            new_edge(a, vid)
            new_edge(a.dual(), vid)
        elif kind is Kind.WEAKENING:
            new_edge(lit(), vid)
        elif kind in (Kind.CONTRACTION, Kind.COCONTRACTION):
            a = edges[chosen[0]]["atom"]
            for _ in range(down):
                new_edge(a, vid)
    for i, e in enumerate(open_):
        edges[e]["bottom"] = i
    return Flow(tuple(vertices), tuple(Edge(k, **v) for k, v in edges.items()))


# ---------------------------------------------------- graph reductions


def find_redexes(flow: Flow, kinds: Iterable[str] | None = None) -> list[tuple[str, int]]:
    """(reduction name, edge id) for every edge joining a reducible vertex pair."""
    allowed = set(kinds) if kinds is not None else None
    out = []
    for e in flow.edges:
        if e.up is None or e.down is None:
            continue
        key = (flow.vertex(e.up).kind, flow.vertex(e.down).kind)
        if key in REDUCTIONS:
            name = REDUCTIONS[key][0]
            if allowed is None or name in allowed:
                out.append((name, e.id))
    return out


def reduce_edge(flow: Flow, eid: int) -> Flow:
    """Apply the reduction at edge ``eid`` on the graph alone."""
    e = flow.edge(eid)
    top, bot = flow.vertex(e.up), flow.vertex(e.down)
    name = REDUCTIONS[(top.kind, bot.kind)][0]
    vs = {v.id: v for v in flow.vertices}
    es = {x.id: x for x in flow.edges}
    del es[eid]

    def merge(upper: int, lower: int) -> None:
        # the upper edge keeps its id and top end and takes over the lower one's bottom end
        a, b = es[upper], es.pop(lower)
        es[upper] = dc_replace(a, down=b.down, bottom=b.bottom)

    if name == "aw↓-ac↓":
        other = next(x for x in flow.upper(bot.id) if x != eid)
        del vs[top.id], vs[bot.id]
        merge(other, flow.lower(bot.id)[0])
    elif name == "aw↓-ai↑":
        del vs[top.id]
        vs[bot.id] = Vertex(bot.id, Kind.COWEAKENING)
    elif name == "aw↓-aw↑":
        del vs[top.id], vs[bot.id]
    elif name == "aw↓-ac↑":
        lows = flow.lower(bot.id)
        vs[top.id] = Vertex(top.id, Kind.WEAKENING)
        vs[bot.id] = Vertex(bot.id, Kind.WEAKENING)
        es[lows[0]] = dc_replace(es[lows[0]], up=top.id)
        es[lows[1]] = dc_replace(es[lows[1]], up=bot.id)
    elif name == "ac↑-aw↑":
        other = next(x for x in flow.lower(top.id) if x != eid)
        del vs[top.id], vs[bot.id]
        merge(flow.upper(top.id)[0], other)
    elif name == "ai↓-aw↑":
        del vs[bot.id]
        vs[top.id] = Vertex(top.id, Kind.WEAKENING)
    elif name == "ac↓-aw↑":
        ups = flow.upper(top.id)
        vs[top.id] = Vertex(top.id, Kind.COWEAKENING)
        vs[bot.id] = Vertex(bot.id, Kind.COWEAKENING)
        es[ups[0]] = dc_replace(es[ups[0]], down=top.id)
        es[ups[1]] = dc_replace(es[ups[1]], down=bot.id)
    return Flow(tuple(sorted(vs.values(), key=lambda v: v.id)), tuple(sorted(es.values(), key=lambda x: x.id)))


def normal_form(flow: Flow) -> Flow:
    """Reduce the first redex until none is left."""
    while True:
        rs = find_redexes(flow)
        if not rs:
            return flow
        flow = reduce_edge(flow, rs[0][1])


@dataclass
class ConfluenceResult:
    confluent: bool
    normal_forms: int
    states: int
    exhaustive: bool


def check_confluence(flow: Flow, max_states: int = 1000) -> ConfluenceResult:
    """Explore every reduction order (memoised on states) and compare the normal forms."""
    seen: set = set()
    normals: list[Flow] = []
    stack = [flow]
    exhaustive = True
    while stack:
        cur = stack.pop()
        key = _state_key(cur)
        if key in seen:
            continue
        if len(seen) >= max_states:
            exhaustive = False
            break
        seen.add(key)
        rs = find_redexes(cur)
        if not rs:
            if not any(isomorphic(cur, n) for n in normals):
                normals.append(cur)
            continue
        for _, eid in rs:
            stack.append(reduce_edge(cur, eid))
    return ConfluenceResult(len(normals) == 1, len(normals), len(seen), exhaustive)


# ------------------------------------------------- derivation rewriting


def _put(f: Formula, targets: Mapping[Path, Formula], depth: int = 0) -> Formula:
    """Replace the subformulae at several paths at once."""
    if not targets:
        return f
    for p, g in targets.items():
        if len(p) == depth:
            return g
    if not isinstance(f, _Binary):
        raise IndexError("path leaves the formula")
    left = {p: g for p, g in targets.items() if p[depth] == 0}
    right = {p: g for p, g in targets.items() if p[depth] == 1}
    return type(f)(_put(f.left, left, depth + 1), _put(f.right, right, depth + 1))


def put(f: Formula, targets: Mapping[Path, Formula]) -> Formula:
    return _put(f, dict(targets))


def _splice(d: Derivation, blocks: Mapping[int, Derivation], lines: Sequence[Formula]) -> Derivation:
    """Rebuild ``d`` over new ``lines``: step i becomes ``blocks[i]`` when given, else
    the same rule at the same path between the new lines."""
    b = Builder(lines[0])
    for i, s in enumerate(d.steps):
        if i in blocks:
            b.then(blocks[i]).eq(lines[i + 1])
        elif lines[i] == lines[i + 1]:
            continue
        else:
            b._push(restep(s, lines[i], lines[i + 1]))
    return b.build()


def _top_block(s: Step, premiss: Formula, conclusion: Formula, port: Path, unit: Formula) -> Derivation:
    """Step ``s`` produced the edge at ``port``; rebuild it so that this edge is ``unit``."""
    q, r = s.path, s.rule
    b = Builder(premiss)
    if r is Rule.AWD:
        if unit == T:
            b.at(q, _f_to_t())
    elif r is Rule.AID and unit == T:
        i = port[len(q)]
        other = subformula(s.conclusion, q + (1 - i,))
        b.eq(put(premiss, {q: Or(T, F) if i == 0 else Or(F, T)}))
        b.apply(Rule.AWD, q + (1 - i,), other)
    elif r is Rule.ACD and unit == T:
        b.apply(Rule.AWU, q + (0,)).apply(Rule.AWU, q + (1,))
    elif r is Rule.ACU and unit == T:
        pass
    else:
        raise FlowError(f"no rewrite for {r} above a {unit} edge")
    return b.eq(conclusion).build()


def _bottom_block(s: Step, premiss: Formula, conclusion: Formula, port: Path, unit: Formula) -> Derivation:
    """Step ``s`` consumed the edge at ``port``, which is now ``unit``."""
    q, r = s.path, s.rule
    b = Builder(premiss)
    if r is Rule.AWU and unit == T:
        pass
    elif r is Rule.ACD and unit == F:
        pass
    elif r is Rule.AIU and unit == F:
        i = port[len(q)]
        b.apply(Rule.AWU, q + (1 - i,))
    elif r is Rule.ACU and unit == F:
        a = subformula(s.conclusion, q + (0,))
        b.eq(put(premiss, {q: And(F, F)}))
        b.apply(Rule.AWD, q + (0,), a).apply(Rule.AWD, q + (1,), a)
    else:
        raise FlowError(f"no rewrite for {r} below a {unit} edge")
    return b.eq(conclusion).build()


def rewrite_edges(d: Derivation, flow: Flow, omap: OccurrenceMap, eids: Iterable[int]) -> Derivation:
    """Derivation side of the reductions at the given edges, which must not share vertices.

    The edge becomes a unit on every line it crosses; the step above it and the step
    below it are rebuilt locally."""
    todo = list(eids)
    touched: set[int] = set()
    units: dict[int, Formula] = {}
    for eid in todo:
        e = flow.edge(eid)
        top, bot = flow.vertex(e.up), flow.vertex(e.down)
        if top.id in touched or bot.id in touched:
            raise FlowError("reductions in one batch must not share vertices")
        touched |= {top.id, bot.id}
        units[eid] = REDUCTIONS[(top.kind, bot.kind)][1]
    lines = []
    for i, line in enumerate(d.lines):
        targets = {p: units[e] for p, e in omap.lines[i].items() if e in units}
        lines.append(put(line, targets) if targets else line)
    blocks: dict[int, Derivation] = {}
    for eid, u in units.items():
        e = flow.edge(eid)
        ti, bi = flow.vertex(e.up).step, flow.vertex(e.down).step
        port_c = next(p for p, x in omap.lines[ti + 1].items() if x == eid)
        port_p = next(p for p, x in omap.lines[bi].items() if x == eid)
        blocks[ti] = _top_block(d.steps[ti], lines[ti], lines[ti + 1], port_c, u)
        blocks[bi] = _bottom_block(d.steps[bi], lines[bi], lines[bi + 1], port_p, u)
    return _splice(d, blocks, lines)


def _disjoint(flow: Flow, redexes: Sequence[tuple[str, int]]) -> list[int]:
    used: set[int] = set()
    picked = []
    for _, eid in redexes:
        e = flow.edge(eid)
        if e.up in used or e.down in used:
            continue
        used |= {e.up, e.down}
        picked.append(eid)
    return picked


def reduce_derivation(
    d: Derivation,
    kinds: Iterable[str] | None = None,
    batch: bool = True,
    accept: Callable[[Flow, int], bool] | None = None,
) -> tuple[Derivation, int]:
    """Apply the chosen reductions on ``d`` until none applies; also return how many fired.

    Redexes are taken topmost first (by the step of their upper vertex)."""
    kinds = None if kinds is None else tuple(kinds)
    fired = 0
    while True:
        flow, omap = extract_flow(d)
        rs = find_redexes(flow, kinds)
        if accept is not None:
            rs = [r for r in rs if accept(flow, r[1])]
        if not rs:
            return d, fired
        rs.sort(key=lambda r: (flow.vertex(flow.edge(r[1]).up).step, r[1]))
        picked = _disjoint(flow, rs) if batch else [rs[0][1]]
        d = rewrite_edges(d, flow, omap, picked)
        fired += len(picked)


def flow_reduce(flow: Flow | None, d: Derivation) -> tuple[Flow, Derivation]:
    """All seven reductions to a fixpoint, on the derivation and its flow together."""
    out, _ = reduce_derivation(d)
    return extract_flow(out)[0], out


# ------------------------------------------------ substitution via flows


def _local_for(s: Step, value: Formula) -> Derivation:
    r = s.rule
    if r is Rule.AID:
        return identity(value)
    if r is Rule.AIU:
        return cut(value)
    if r is Rule.AWD:
        return weaken_down(value)
    if r is Rule.AWU:
        return weaken_up(value)
    if r is Rule.ACD:
        return contract_down(value)
    return contract_up(value)


def substitute_components(
    d: Derivation,
    jobs: Sequence[tuple[frozenset[int], Atom, Formula]],
    flow: Flow | None = None,
    omap: OccurrenceMap | None = None,
) -> Derivation:
    """Replace, for each (component, literal, β), occurrences of ``literal`` in the
    component by β and those of its dual by the dual of β."""
    if flow is None or omap is None:
        flow, omap = extract_flow(d)
    value: dict[int, Formula] = {}
    for comp, lit, beta in jobs:
        names = {flow.edge(e).atom.name for e in comp}
        if names != {lit.name}:
            raise FlowError(f"component carries atoms {sorted(names)}, not {lit.name}")
        for e in comp:
            value[e] = beta if flow.edge(e).atom == lit else dual(beta)
    lines = []
    for i, line in enumerate(d.lines):
        targets = {p: value[e] for p, e in omap.lines[i].items() if e in value}
        lines.append(put(line, targets) if targets else line)
    blocks = {}
    for v in flow.vertices:
        ports = flow.upper(v.id) + flow.lower(v.id)
        if ports[0] not in value:
            continue
        s = d.steps[v.step]
        # the redex's own atom: first active occurrence of the premiss, else of the conclusion
        act_p, act_c = active_occurrences(s)
        if act_p:
            val = value[omap.lines[v.step][act_p[0]]]
        else:
            val = value[omap.lines[v.step + 1][act_c[0]]]
        local = _local_for(s, val)
        blocks[v.step] = Builder(lines[v.step]).at(s.path, local).build()
    return _splice(d, blocks, lines)


def substitute_via_flow(
    d: Derivation, comp: Iterable[int], beta: Formula, literal: Atom | None = None
) -> Derivation:
    flow, omap = extract_flow(d)
    comp = frozenset(comp)
    if literal is None:
        literal = flow.edge(min(comp)).atom.positive
    return substitute_components(d, [(comp, literal, beta)], flow, omap)
