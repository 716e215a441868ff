"""Flatten-and-recombine (FAR) compaction of SNF specifications.

The cases of a specification become vertices of a similarity graph whose
edge weights count related precondition atoms. In every connected component
the heaviest pair is factored into a common-precondition node over the two
reduced cases; unmerged cases go round again until no component has more
than one vertex. The residual tree is then read back as a specification.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

import networkx as nx

from spinfer.spec import Case, Distrib, Leaf, cases, disjoin
from spinfer.spengine import InferenceTimeout

ROOT = "root"


@dataclass(frozen=True)
class EquivalenceRelation:
    """A relation on atoms. When `key` is given, x ~ y iff key(x) == key(y),
    which lets weights be computed by counting instead of pairwise tests."""

    name: str
    related: Callable
    key: Optional[Callable] = None
    symmetric: bool = True

    def __call__(self, x, y) -> bool:
        return self.related(x, y)


LEXICAL = EquivalenceRelation("lexical", lambda x, y: x.text == y.text, key=lambda a: a.text)


@dataclass(frozen=True)
class CommonNode:
    atoms: tuple


@dataclass
class SpecGraph:
    """Rooted graph over case leaves and common-precondition nodes.

    `vertices` maps an id to a Case or CommonNode; `rank` orders siblings
    (smallest input-case position underneath)."""

    vertices: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    rank: dict = field(default_factory=dict)
    root: str = ROOT

    def successors(self, v) -> list:
        return [d for s, d in self.edges if s == v]

    def add(self, vid, value, rank=0):
        self.vertices[vid] = value
        self.rank[vid] = rank


def weight(l: Case, r: Case, rel: EquivalenceRelation) -> int:
    """|{(x, y) in pre(l) x pre(r) | x ~ y}|"""
    if rel.key is not None:
        kl = Counter(rel.key(a) for a in l.pre)
        kr = Counter(rel.key(a) for a in r.pre)
        return sum(n * kr[k] for k, n in kl.items() if k in kr)
    return sum(1 for x in l.pre for y in r.pre if rel(x, y))


def to_graph(V: dict, rel: EquivalenceRelation = LEXICAL):
    """Similarity graph over the cases in V (id -> Case) and its weight table."""
    g = SpecGraph()
    W: dict = {}
    ids = list(V)
    for vid in ids:
        g.add(vid, V[vid], rank=residual_rank(vid))
    keyed = {vid: Counter(rel.key(a) for a in V[vid].pre) for vid in ids} if rel.key else None
    for l in ids:
        for r in ids:
            if l == r:
                continue
            if rel.symmetric and (r, l) in W:
                w = W[(r, l)]
            elif keyed is not None:
                kl, kr = keyed[l], keyed[r]
                w = sum(n * kr[k] for k, n in kl.items() if k in kr)
            else:
                w = weight(V[l], V[r], rel)
            W[(l, r)] = w
            if w > 0:
                g.edges.append((l, r))
    return g, W


def connected_components(g: SpecGraph, symmetric: bool = True) -> list:
    """Vertex sets of the components, ordered by smallest member id.

    With a symmetric relation the graph's edges come in pairs and strongly
    connected components coincide with undirected components."""
    G = nx.DiGraph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    comps = nx.weakly_connected_components(G) if symmetric else nx.strongly_connected_components(G)
    return sorted((frozenset(c) for c in comps), key=min)


def _select_pair(comp, V, W, g):
    pairs = [(l, r) for l, r in g.edges if l in comp and r in comp]
    max_w = max(W[p] for p in pairs)
    best = [p for p in pairs if W[p] == max_w]
    return min(best, key=lambda p: (V[p[0]].text(), V[p[1]].text(), p))


def merge_scc(V: dict, W: dict, comps, residual: SpecGraph, rel: EquivalenceRelation = LEXICAL,
              g: SpecGraph | None = None):
    """Merge the heaviest pair of every multi-vertex component into the
    residual graph. Returns (residual, remaining V)."""
    if g is None:
        g = SpecGraph(vertices=dict(V), edges=[(l, r) for (l, r), w in W.items() if w > 0])
    V = dict(V)
    for comp in comps:
        if len(comp) <= 1:
            continue
        L, R = _select_pair(comp, V, W, g)
        _merge_pair(V, L, R, residual, rel)
    return residual, V


def _merge_pair(V: dict, L, R, residual: SpecGraph, rel: EquivalenceRelation):
    """Factor the related preconditions of V[L] and V[R] into a common node
    under the root, with the two reduced cases as its children."""
    cl, cr = V[L], V[R]
    common = tuple(x for x in cl.pre if any(rel(x, y) for y in cr.pre))
    rcmn = {y.text for y in cr.pre if any(rel(x, y) for x in cl.pre)}
    left = Case(tuple(a for a in cl.pre if a not in common), cl.rest)
    right = Case(tuple(a for a in cr.pre if a.text not in rcmn), cr.rest)
    n = len(residual.vertices)
    cid, lid, rid = f"c{n}", f"v{n + 1}", f"v{n + 2}"
    rank_l, rank_r = residual_rank(L), residual_rank(R)
    residual.add(cid, CommonNode(common), rank=min(rank_l, rank_r))
    residual.add(lid, left, rank=rank_l)
    residual.add(rid, right, rank=rank_r)
    first, second = (lid, rid) if rank_l <= rank_r else (rid, lid)
    residual.edges += [(cid, first), (cid, second), (residual.root, cid)]
    del V[L], V[R]


def residual_rank(vid) -> int:
    return vid if isinstance(vid, int) else 0


def to_spec(residual: SpecGraph, v=ROOT, _seen=None):
    """Read a rooted residual tree back as a specification: leaves as they
    are, common nodes as their atoms distributed over their subtree."""
    seen = set() if _seen is None else _seen
    if v in seen:
        raise ValueError("residual graph is not a tree (cycle detected)")
    seen.add(v)
    B = []
    for u in residual.successors(v):
        node = residual.vertices[u]
        if isinstance(node, Case):
            B.append(Leaf(node))
        else:
            B.append(Distrib(node.atoms, to_spec(residual, u, seen)))
    if not B:
        raise ValueError("empty residual graph")
    return disjoin(B)


def far(spec, rel: EquivalenceRelation = LEXICAL, *, deadline: float | None = None, trace: list | None = None):
    """Compact an SNF specification. The result is satisfied by exactly the
    programs that satisfy the input, for any sound relation `rel`.

    `trace`, when given, receives the number of unmerged cases at the start
    of every round."""
    V = {i: c for i, c in enumerate(cases(spec))}
    residual = SpecGraph()
    if rel.key is not None and rel.symmetric:
        V = _rounds_keyed(V, residual, rel, deadline, trace)
    else:
        V = _rounds(V, residual, rel, deadline, trace)
    for vid, c in V.items():
        residual.add(f"u{vid}", c, rank=vid)
        residual.edges.append((residual.root, f"u{vid}"))
    root_edges = sorted((e for e in residual.edges if e[0] == residual.root), key=lambda e: residual.rank[e[1]])
    residual.edges = [e for e in residual.edges if e[0] != residual.root] + root_edges
    return to_spec(residual, residual.root)


def _tick(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise InferenceTimeout("wall-clock budget exceeded during FAR")


def _rounds(V, residual, rel, deadline, trace):
    """The loop as stated: rebuild the graph every round."""
    while True:
        _tick(deadline)
        if trace is not None:
            trace.append(len(V))
        g, W = to_graph(V, rel)
        comps = connected_components(g, symmetric=rel.symmetric)
        if not any(len(c) > 1 for c in comps):
            return V
        residual, V = merge_scc(V, W, comps, residual, rel, g)


def _rounds_keyed(V, residual, rel, deadline, trace):
    """Same rounds for a keyed symmetric relation, without rebuilding.

    Weights between surviving cases never change, so edges are ranked once
    by the selection order (-weight, text L, text R, ids); each round takes,
    per component, the first ranked edge that is still alive. Components
    come from the case/key incidence, which links exactly the cases an edge
    would link."""
    keys = {vid: Counter(rel.key(a) for a in c.pre) for vid, c in V.items()}
    text = {vid: c.text() for vid, c in V.items()}
    by_key: dict = {}
    for vid, kc in keys.items():
        for k in kc:
            by_key.setdefault(k, []).append(vid)
    W: dict = {}
    for members in by_key.values():
        for i, l in enumerate(members):
            for r in members[i + 1:]:
                if (l, r) not in W:
                    kl, kr = keys[l], keys[r]
                    W[(l, r)] = W[(r, l)] = sum(n * kr[k] for k, n in kl.items() if k in kr)
    order = sorted(W, key=lambda p: (-W[p], text[p[0]], text[p[1]], p))
    while True:
        _tick(deadline)
        if trace is not None:
            trace.append(len(V))
        G = nx.Graph()
        G.add_nodes_from(V)
        G.add_nodes_from(("key", k) for k in by_key)
        G.add_edges_from((vid, ("key", k)) for vid in V for k in keys[vid])
        comp_of = {}
        for i, comp in enumerate(nx.connected_components(G)):
            members = [v for v in comp if v in V]
            if len(members) > 1:
                for v in members:
                    comp_of[v] = (min(members), i)
        if not comp_of:
            return V
        chosen: dict = {}
        kept = []
        n_comps = len(set(comp_of.values()))
        for pos, (l, r) in enumerate(order):
            if l not in V or r not in V:
                continue
            kept.append((l, r))
            c = comp_of[l]
            if c not in chosen:
                chosen[c] = (l, r)
                if len(chosen) == n_comps:
                    kept += order[pos + 1:]
                    break
        order = kept
        for c in sorted(chosen):
            _merge_pair(V, *chosen[c], residual, rel)
