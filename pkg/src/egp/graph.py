"""Immutable causal graphs with latent nodes and confounding arcs.

A graph holds directed edges between declared nodes plus optional
bidirected arcs ``X <-> Y`` standing for an unobserved common cause.
Internally every bidirected arc is expanded into a synthetic latent
root ``<u:X,Y>`` with edges into both endpoints (the canonical form);
synthetic names never leak out of public query results.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    CycleError,
    DuplicateNode,
    InvalidQuery,
    LatentAdjusted,
    SelfLoop,
    UnknownEndpoint,
    UnknownNode,
)

DIRECTED = "directed"
BIDIRECTED = "bidirected"

# U+2039/U+203A quote the synthetic names so no parseable identifier,
# quoted or bare, can ever collide with one.
_SYN_OPEN = "‹"
_SYN_CLOSE = "›"

ROLE_NAMES = ("latent", "exposure", "outcome", "adjusted")


def synthetic_confounder(x: str, y: str) -> str:
    """Internal node name standing for the latent cause behind ``x <-> y``."""
    a, b = sorted((x, y))
    return f"{_SYN_OPEN}u:{a},{b}{_SYN_CLOSE}"


def is_synthetic(name: str) -> bool:
    return name.startswith(_SYN_OPEN)


@dataclass(frozen=True)
class NodeRole:
    """Role flags attached to a declared node."""

    latent: bool = False
    exposure: bool = False
    outcome: bool = False
    adjusted: bool = False

    def attrs(self) -> tuple[str, ...]:
        """Active flags in the fixed serialization order."""
        return tuple(n for n in ROLE_NAMES if getattr(self, n))


@dataclass(frozen=True)
class Edge:
    """One declared edge; bidirected endpoints are stored sorted."""

    src: str
    dst: str
    kind: str = DIRECTED

    def __post_init__(self):
        if self.kind not in (DIRECTED, BIDIRECTED):
            raise ValueError(f"unknown edge kind {self.kind!r}")
        if self.kind == BIDIRECTED and self.dst < self.src:
            lo, hi = self.dst, self.src
            object.__setattr__(self, "src", lo)
            object.__setattr__(self, "dst", hi)


# Link tags used by the separation machinery.  Walking an edge leaves
# one endpoint through a head or a tail mark and arrives at the other
# the same way; colliders are exactly the head/head meetings.
TAIL = 0
HEAD = 1


class CausalGraph:
    """A validated acyclic causal graph.

    Instances are immutable; surgeries return new graphs.  Node
    iteration order is declaration order, query results are
    order-independent.  Equality is structural (roles and edges) and
    ignores the graph name, so a graph survives a serialize/parse
    round trip as an equal value.
    """

    def __init__(
        self,
        name: str,
        roles: Mapping[str, NodeRole],
        order: Sequence[str],
        directed: Iterable[tuple[str, str]],
        bidirected: Iterable[tuple[str, str]],
    ):
        self._name = name
        self._roles = dict(roles)
        self._order = tuple(order)
        self._directed = frozenset(directed)
        self._bidirected = frozenset(tuple(sorted(p)) for p in bidirected)

    # -- identity ----------------------------------------------------

    @property
    def name(self) -> str:
        return self._name

    @property
    def node_names(self) -> tuple[str, ...]:
        """Declared node names in declaration order."""
        return self._order

    @property
    def directed_pairs(self) -> frozenset[tuple[str, str]]:
        return self._directed

    @property
    def bidirected_pairs(self) -> frozenset[tuple[str, str]]:
        return self._bidirected

    @property
    def edges(self) -> tuple[Edge, ...]:
        """All declared edges sorted by (src, dst, kind)."""
        out = [Edge(s, t) for s, t in self._directed]
        out += [Edge(a, b, BIDIRECTED) for a, b in self._bidirected]
        out.sort(key=lambda e: (e.src, e.dst, e.kind))
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return (
            self._roles == other._roles
            and self._directed == other._directed
            and self._bidirected == other._bidirected
        )

    def __hash__(self):
        return hash(
            (
                frozenset(self._roles.items()),
                self._directed,
                self._bidirected,
            )
        )

    def __repr__(self):
        return (
            f"CausalGraph({self._name!r}, nodes={len(self._order)}, "
            f"directed={len(self._directed)}, bidirected={len(self._bidirected)})"
        )

    # -- node lookup ---------------------------------------------------

    def has_node(self, v: str) -> bool:
        return v in self._roles

    def role(self, v: str) -> NodeRole:
        self._require(v)
        return self._roles[v]

    def is_latent(self, v: str) -> bool:
        return self.role(v).latent

    @property
    def observed_names(self) -> tuple[str, ...]:
        return tuple(v for v in self._order if not self._roles[v].latent)

    @property
    def latent_names(self) -> tuple[str, ...]:
        return tuple(v for v in self._order if self._roles[v].latent)

    @property
    def adjusted_names(self) -> tuple[str, ...]:
        return tuple(v for v in self._order if self._roles[v].adjusted)

    @property
    def exposure(self) -> str | None:
        """The unique node flagged as exposure, or None."""
        hits = [v for v in self._order if self._roles[v].exposure]
        return hits[0] if len(hits) == 1 else None

    @property
    def outcome(self) -> str | None:
        hits = [v for v in self._order if self._roles[v].outcome]
        return hits[0] if len(hits) == 1 else None

    def designated_pair(
        self, exposure: str | None = None, outcome: str | None = None
    ) -> tuple[str, str]:
        """Resolve the (exposure, outcome) pair, with explicit overrides.

        Raises
        ------
        InvalidQuery
            If either end stays unresolved or the two coincide.
        """
        d = exposure if exposure is not None else self.exposure
        y = outcome if outcome is not None else self.outcome
        if d is None:
            raise InvalidQuery("no exposure: none designated and none supplied")
        if y is None:
            raise InvalidQuery("no outcome: none designated and none supplied")
        self._require(d)
        self._require(y)
        if d == y:
            raise InvalidQuery(f"exposure and outcome are both {d!r}")
        return d, y

    def _require(self, v: str) -> None:
        if v not in self._roles:
            raise UnknownNode(f"node {v!r} is not declared in graph {self._name!r}")

    # -- canonical expansion -------------------------------------------

    @cached_property
    def canonical_nodes(self) -> tuple[str, ...]:
        """Declared nodes in declaration order, then synthetic latents."""
        extra = sorted(synthetic_confounder(a, b) for a, b in self._bidirected)
        return self._order + tuple(extra)

    @cached_property
    def canonical_parents(self) -> dict[str, frozenset[str]]:
        pa: dict[str, set[str]] = {v: set() for v in self.canonical_nodes}
        for s, t in self._directed:
            pa[t].add(s)
        for a, b in self._bidirected:
            u = synthetic_confounder(a, b)
            pa[a].add(u)
            pa[b].add(u)
        return {v: frozenset(s) for v, s in pa.items()}

    @cached_property
    def canonical_children(self) -> dict[str, frozenset[str]]:
        ch: dict[str, set[str]] = {v: set() for v in self.canonical_nodes}
        for v, ps in self.canonical_parents.items():
            for p in ps:
                ch[p].add(v)
        return {v: frozenset(s) for v, s in ch.items()}

    @cached_property
    def canonical_directed_pairs(self) -> tuple[tuple[str, str], ...]:
        """Directed edges of the canonical graph, sorted, synthetics included."""
        pairs = list(self._directed)
        for a, b in self._bidirected:
            u = synthetic_confounder(a, b)
            pairs.append((u, a))
            pairs.append((u, b))
        return tuple(sorted(pairs))

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """Canonical nodes in topological order, lexicographic tie-break."""
        indeg = {v: len(self.canonical_parents[v]) for v in self.canonical_nodes}
        ready = [v for v, k in indeg.items() if k == 0]
        heapq.heapify(ready)
        out: list[str] = []
        while ready:
            v = heapq.heappop(ready)
            out.append(v)
            for c in sorted(self.canonical_children[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        return tuple(out)

    # -- relations -----------------------------------------------------

    def parents(self, v: str) -> frozenset[str]:
        """Declared parents only; the synthetic side of arcs is hidden."""
        self._require(v)
        return frozenset(p for p in self.canonical_parents[v] if not is_synthetic(p))

    def children(self, v: str) -> frozenset[str]:
        self._require(v)
        return frozenset(c for c in self.canonical_children[v] if not is_synthetic(c))

    def ancestors(self, v: str) -> frozenset[str]:
        """Strict ancestors of ``v`` among declared nodes."""
        self._require(v)
        seen: set[str] = set()
        stack = list(self.canonical_parents[v])
        while stack:
            p = stack.pop()
            if p in seen:
                continue
            seen.add(p)
            stack.extend(self.canonical_parents[p])
        return frozenset(x for x in seen if not is_synthetic(x)) - {v}

    def descendants(self, v: str) -> frozenset[str]:
        """Strict descendants of ``v`` among declared nodes."""
        self._require(v)
        seen: set[str] = set()
        stack = list(self.canonical_children[v])
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            stack.extend(self.canonical_children[c])
        return frozenset(x for x in seen if not is_synthetic(x)) - {v}

    def ancestors_or_self(self, nodes: Iterable[str]) -> frozenset[str]:
        """Union of each node with its ancestors, declared nodes only."""
        out: set[str] = set()
        stack = list(nodes)
        for v in stack:
            self._require(v)
        while stack:
            v = stack.pop()
            if v in out:
                continue
            out.add(v)
            stack.extend(p for p in self.canonical_parents[v] if not is_synthetic(p))
        return frozenset(out)

    # -- walk structure for separation queries --------------------------

    @cached_property
    def links(self) -> dict[str, tuple[tuple[str, int, int], ...]]:
        """Per-node walk steps ``(neighbor, mark_here, mark_there)``.

        A directed edge v->n leaves v through a TAIL and arrives at n
        through a HEAD; a bidirected arc carries a HEAD at both ends.
        Steps are sorted by (neighbor, marks) so walks enumerate
        deterministically.
        """
        adj: dict[str, list[tuple[str, int, int]]] = {v: [] for v in self._order}
        for s, t in self._directed:
            adj[s].append((t, TAIL, HEAD))
            adj[t].append((s, HEAD, TAIL))
        for a, b in self._bidirected:
            adj[a].append((b, HEAD, HEAD))
            adj[b].append((a, HEAD, HEAD))
        return {v: tuple(sorted(steps)) for v, steps in adj.items()}


def build_graph(
    name: str,
    nodes: Iterable[str | tuple[str, NodeRole]],
    edges: Iterable[Edge | tuple[str, str] | tuple[str, str, str]] = (),
) -> CausalGraph:
    """Validate and freeze a graph.

    Parameters
    ----------
    name : str
        Graph name; empty string is allowed.
    nodes : iterable
        Node names, or ``(name, NodeRole)`` pairs, in declaration order.
    edges : iterable
        ``Edge`` values or ``(src, dst)`` / ``(src, dst, kind)`` tuples.
        Duplicate declarations collapse silently; the parser layer is
        responsible for warning about them.

    Raises
    ------
    DuplicateNode, UnknownEndpoint, SelfLoop, LatentAdjusted, CycleError
    """
    roles: dict[str, NodeRole] = {}
    order: list[str] = []
    for item in nodes:
        if isinstance(item, str):
            v, role = item, NodeRole()
        else:
            v, role = item
        if not isinstance(v, str) or not v:
            raise UnknownEndpoint(f"node name must be a non-empty string, got {v!r}")
        if is_synthetic(v):
            raise UnknownEndpoint(f"node name {v!r} uses the reserved internal prefix")
        if "\n" in v or "\r" in v:
            raise UnknownEndpoint(f"node name {v!r} contains a line break")
        if v in roles:
            raise DuplicateNode(f"node {v!r} declared twice")
        if role.latent and role.adjusted:
            raise LatentAdjusted(f"node {v!r} cannot be both latent and adjusted")
        roles[v] = role
        order.append(v)

    directed: set[tuple[str, str]] = set()
    bidirected: set[tuple[str, str]] = set()
    for item in edges:
        if isinstance(item, Edge):
            e = item
        elif len(item) == 2:
            e = Edge(item[0], item[1])
        else:
            e = Edge(item[0], item[1], item[2])
        for end in (e.src, e.dst):
            if end not in roles:
                raise UnknownEndpoint(f"edge endpoint {end!r} is not a declared node")
        if e.src == e.dst:
            raise SelfLoop(f"self loop on {e.src!r}")
        if e.kind == DIRECTED:
            directed.add((e.src, e.dst))
        else:
            bidirected.add((e.src, e.dst))

    _check_acyclic(order, directed)
    return CausalGraph(name, roles, order, directed, bidirected)


def _check_acyclic(order: Sequence[str], directed: set[tuple[str, str]]) -> None:
    children: dict[str, list[str]] = {v: [] for v in order}
    for s, t in sorted(directed):
        children[s].append(t)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in order}
    for root in order:
        if color[root] != WHITE:
            continue
        # Iterative DFS keeping the gray stack so a back edge yields
        # the actual cycle for the error payload.
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(children[root]))]
        color[root] = GRAY
        trail = [root]
        while stack:
            v, it = stack[-1]
            advanced = False
            for c in it:
                if color[c] == GRAY:
                    i = trail.index(c)
                    raise CycleError(trail[i:] + [c])
                if color[c] == WHITE:
                    color[c] = GRAY
                    trail.append(c)
                    stack.append((c, iter(children[c])))
                    advanced = True
                    break
            if not advanced:
                color[v] = BLACK
                trail.pop()
                stack.pop()


def mutilate_incoming(g: CausalGraph, d: str) -> CausalGraph:
    """Intervention surgery: drop every edge into ``d``.

    Directed edges pointing at ``d`` and bidirected arcs touching
    ``d`` are removed; the node set and all roles stay.  The result is
    named ``<name>|do(<d>)``.
    """
    g._require(d)
    return CausalGraph(
        f"{g.name}|do({d})",
        g._roles,
        g._order,
        {(s, t) for s, t in g._directed if t != d},
        {p for p in g._bidirected if d not in p},
    )


def mutilate_outgoing(g: CausalGraph, d: str) -> CausalGraph:
    """Testing surgery: drop directed edges out of ``d``, keep arcs."""
    g._require(d)
    return CausalGraph(
        f"{g.name}|test({d})",
        g._roles,
        g._order,
        {(s, t) for s, t in g._directed if s != d},
        g._bidirected,
    )


def remove_edge(g: CausalGraph, e: Edge) -> CausalGraph:
    """Copy of ``g`` without one declared edge (used by invariance checks)."""
    if e.kind == DIRECTED:
        pair = (e.src, e.dst)
        if pair not in g._directed:
            raise UnknownEndpoint(f"no directed edge {e.src!r} -> {e.dst!r}")
        return CausalGraph(
            g.name, g._roles, g._order, g._directed - {pair}, g._bidirected
        )
    pair = tuple(sorted((e.src, e.dst)))
    if pair not in g._bidirected:
        raise UnknownEndpoint(f"no bidirected edge {e.src!r} <-> {e.dst!r}")
    return CausalGraph(g.name, g._roles, g._order, g._directed, g._bidirected - {pair})
