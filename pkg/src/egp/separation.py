"""d-separation and walk diagnostics.

The decision procedure is a linear-time reachability sweep over
(node, arrival-mark) states rather than path enumeration: a walk may
continue through a node it entered tail-first only while the node is
unconditioned, and through a head-first entry either out a tail (the
node unconditioned) or out another head (the node a collider whose
descendants meet the conditioning set).  Path enumeration exists
separately so verdicts can be explained, and the two must agree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ConditionOnLatent, InvalidQuery, UnknownNode
from .graph import HEAD, TAIL, CausalGraph

FORWARD = "forward"
BACKWARD = "backward"
BIDIR = "bidirected"

_ARROW_TEXT = {FORWARD: " -> ", BACKWARD: " <- ", BIDIR: " <-> "}
# enumeration rank when two links join the same node pair
_LINK_RANK = {FORWARD: 0, BACKWARD: 1, BIDIR: 2}


@dataclass(frozen=True)
class CIStatement:
    """A conditional independence claim ``a independent of b given Z``."""

    a: frozenset[str]
    b: frozenset[str]
    given: frozenset[str]
    provenance: str = "query"

    def display(self) -> str:
        left = ",".join(sorted(self.a))
        right = ",".join(sorted(self.b))
        text = f"{left} _||_ {right}"
        if self.given:
            text += " | " + ",".join(sorted(self.given))
        return text

    def to_dict(self) -> dict:
        return {
            "a": sorted(self.a),
            "b": sorted(self.b),
            "given": sorted(self.given),
            "provenance": self.provenance,
            "display": self.display(),
        }


@dataclass(frozen=True)
class PathReport:
    """One walk between the query endpoints, with its blocking story.

    ``arrows[i]`` connects ``nodes[i]`` to ``nodes[i+1]``; bidirected
    segments render a confounding arc without exposing its internal
    expansion.  ``blockers`` are conditioned non-colliders on the walk;
    ``openers`` are colliders kept open because they or a descendant
    are conditioned on.  A conditioned-away collider appears in
    neither set even though it blocks.
    """

    nodes: tuple[str, ...]
    arrows: tuple[str, ...]
    status: str
    blockers: frozenset[str]
    openers: frozenset[str]

    def display(self) -> str:
        parts = [self.nodes[0]]
        for arrow, node in zip(self.arrows, self.nodes[1:]):
            parts.append(_ARROW_TEXT[arrow])
            parts.append(node)
        return "".join(parts)

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "arrows": list(self.arrows),
            "display": self.display(),
            "status": self.status,
            "blockers": sorted(self.blockers),
            "openers": sorted(self.openers),
        }


@dataclass(frozen=True)
class PathSet:
    paths: tuple[PathReport, ...]
    truncated: bool


def _validate_sets(
    g: CausalGraph, a: Iterable[str], b: Iterable[str], given: Iterable[str]
) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    a, b, given = frozenset(a), frozenset(b), frozenset(given)
    for v in a | b | given:
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
    if not a or not b:
        raise InvalidQuery("both endpoint sets must be non-empty")
    if a & b or a & given or b & given:
        overlap = sorted((a & b) | (a & given) | (b & given))
        raise InvalidQuery(f"query sets must be disjoint; shared: {overlap}")
    lat = sorted(v for v in given if g.is_latent(v))
    if lat:
        raise ConditionOnLatent(f"cannot condition on latent node(s): {lat}")
    return a, b, given


def d_separated(
    g: CausalGraph,
    a: Iterable[str],
    b: Iterable[str],
    given: Iterable[str] = (),
) -> bool:
    """True when ``given`` blocks every walk between ``a`` and ``b``.

    Latent nodes may appear in ``a``/``b`` but not in ``given``.
    """
    a, b, given = _validate_sets(g, a, b, given)
    anc = g.ancestors_or_self(given) if given else frozenset()
    links = g.links
    # state: (node, mark the walk carried into it)
    seen: set[tuple[str, int]] = set()
    queue: deque[tuple[str, int]] = deque()
    for s in a:
        for n, _, arrive in links[s]:
            st = (n, arrive)
            if st not in seen:
                seen.add(st)
                queue.append(st)
    while queue:
        v, arrived = queue.popleft()
        if v in b:
            return False
        for n, leave, arrive in links[v]:
            if arrived == TAIL or leave == TAIL:
                # passing straight through: v must be unconditioned
                if v in given:
                    continue
            else:
                # head in, head out: v is a collider on this walk
                if v not in anc:
                    continue
            st = (n, arrive)
            if st not in seen:
                seen.add(st)
                queue.append(st)
    return True


def _step_arrow(leave: int, arrive: int) -> str:
    if leave == TAIL:
        return FORWARD
    return BACKWARD if arrive == TAIL else BIDIR


def _classify(
    g: CausalGraph,
    nodes: Sequence[str],
    arrows: Sequence[str],
    given: frozenset[str],
    anc: frozenset[str],
) -> PathReport:
    blockers: set[str] = set()
    openers: set[str] = set()
    open_path = True
    for i in range(1, len(nodes) - 1):
        v = nodes[i]
        head_left = arrows[i - 1] in (FORWARD, BIDIR)
        head_right = arrows[i] in (BACKWARD, BIDIR)
        if head_left and head_right:
            if v in anc:
                openers.add(v)
            else:
                open_path = False
        else:
            if v in given:
                blockers.add(v)
                open_path = False
    return PathReport(
        tuple(nodes),
        tuple(arrows),
        "open" if open_path else "blocked",
        frozenset(blockers),
        frozenset(openers),
    )


def _paths_of_length(
    g: CausalGraph, x: str, y: str, length: int
) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Simple walks x..y with exactly ``length`` links, lexicographic."""
    links = g.links

    def rank(step):
        n, leave, arrive = step
        return (n, _LINK_RANK[_step_arrow(leave, arrive)])

    nodes = [x]
    arrows: list[str] = []
    on_path = {x}

    def rec() -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
        v = nodes[-1]
        remaining = length - len(arrows)
        if remaining == 0:
            if v == y:
                yield tuple(nodes), tuple(arrows)
            return
        for n, leave, arrive in sorted(links[v], key=rank):
            if n in on_path:
                continue
            if n == y and remaining != 1:
                continue
            if n != y and remaining == 1:
                continue
            nodes.append(n)
            arrows.append(_step_arrow(leave, arrive))
            on_path.add(n)
            yield from rec()
            on_path.discard(n)
            arrows.pop()
            nodes.pop()

    yield from rec()


def enumerate_paths(
    g: CausalGraph,
    x: str,
    y: str,
    given: Iterable[str] = (),
    limit: int = 10_000,
) -> PathSet:
    """All simple paths between two nodes, shortest first.

    Paths are ordered by (length, node sequence, link kind); when more
    than ``limit`` exist the first ``limit`` in that order are returned
    with the truncation flag set.
    """
    a, b, given = _validate_sets(g, {x}, {y}, given)
    if limit < 1:
        raise InvalidQuery("limit must be positive")
    anc = g.ancestors_or_self(given) if given else frozenset()
    found: list[PathReport] = []
    truncated = False
    for length in range(1, len(g.node_names)):
        for nodes, arrows in _paths_of_length(g, x, y, length):
            if len(found) == limit:
                truncated = True
                break
            found.append(_classify(g, nodes, arrows, given, anc))
        if truncated:
            break
    return PathSet(tuple(found), truncated)
