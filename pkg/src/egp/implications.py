"""Testable implications and interventional factorization.

The global basis enumerates pairwise separations over observed nodes
with small conditioning sets, keeping only statements whose
conditioning set has no reported subset for the same pair.  Subsets
suffice as a basis here because any separation with a larger
conditioning set is re-checked directly during enumeration; supersets
of a separating set need not separate (conditioning can open a
collider), which is why the basis stores explicit sets rather than a
closure rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .errors import UnknownNode
from .graph import CausalGraph, is_synthetic
from .separation import CIStatement, d_separated

LOCAL_MARKOV = "local-markov"
GLOBAL_BASIS = "global-basis"


@dataclass(frozen=True)
class Factor:
    """One conditional factor P(child | parents) of the joint density."""

    child: str
    parents: frozenset[str]

    def to_dict(self) -> dict:
        return {"child": self.child, "parents": sorted(self.parents)}


@dataclass(frozen=True)
class Factorization:
    """Product form of the (possibly intervened) joint distribution.

    Factors follow topological order with lexicographic tie-break and
    cover every canonical node, so confounding arcs contribute their
    internal latent roots as explicit factors.
    """

    factors: tuple[Factor, ...]
    intervened: frozenset[str]

    def render(self) -> str:
        remaining = sorted(f.child for f in self.factors)
        do = sorted(self.intervened)
        if do:
            assigns = ",".join(f"{v}={v.lower()}" for v in do)
            lhs = (
                f"P({','.join(remaining)} | do({assigns}))"
                if remaining
                else f"P(do({assigns}))"
            )
        else:
            lhs = f"P({','.join(remaining)})"
        parts = []
        for f in self.factors:
            names = [
                p.lower() if p in self.intervened else p for p in sorted(f.parents)
            ]
            parts.append(f"P({f.child}|{','.join(names)})" if names else f"P({f.child})")
        rhs = " ".join(parts) if parts else "1"
        return f"{lhs} = {rhs}"

    def to_dict(self) -> dict:
        return {
            "factors": [f.to_dict() for f in self.factors],
            "intervened": sorted(self.intervened),
            "rendered": self.render(),
        }


def local_markov(g: CausalGraph) -> tuple[CIStatement, ...]:
    """Each node's independence from its non-descendants given parents.

    Statements are computed on the canonical graph and then projected
    to observed nodes: a statement is dropped when its subject or any
    parent is latent, latent members are removed from the
    non-descendant side, and vacuous or duplicate statements are
    suppressed.
    """
    out: list[CIStatement] = []
    seen: set[tuple] = set()
    all_nodes = set(g.canonical_nodes)
    for v in sorted(g.node_names):
        if g.is_latent(v):
            continue
        pa = g.canonical_parents[v]
        if any(is_synthetic(p) or g.is_latent(p) for p in pa):
            continue
        nd = all_nodes - {v} - _canonical_descendants(g, v)
        b = frozenset(
            w for w in nd - pa if not is_synthetic(w) and not g.is_latent(w)
        )
        if not b:
            continue
        a = frozenset({v})
        sa, sb = tuple(sorted(a)), tuple(sorted(b))
        key = (min(sa, sb), max(sa, sb), tuple(sorted(pa)))
        if key in seen:
            continue
        seen.add(key)
        out.append(CIStatement(a, b, frozenset(pa), LOCAL_MARKOV))
    return tuple(out)


def _canonical_descendants(g: CausalGraph, v: str) -> set[str]:
    seen: set[str] = set()
    stack = list(g.canonical_children[v])
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        stack.extend(g.canonical_children[c])
    return seen


def implied_independencies(
    g: CausalGraph, max_cond: int = 3
) -> tuple[CIStatement, ...]:
    """Minimal pairwise separation basis over observed nodes.

    For each observed pair the conditioning sets are scanned by size
    then lexicographically; a separation is reported only when no
    reported statement for the same pair conditions on a subset.
    """
    obs = sorted(g.observed_names)
    out: list[CIStatement] = []
    for a, b in combinations(obs, 2):
        rest = [v for v in obs if v not in (a, b)]
        kept: list[frozenset[str]] = []
        for size in range(0, min(max_cond, len(rest)) + 1):
            for combo in combinations(rest, size):
                z = frozenset(combo)
                if any(k <= z for k in kept):
                    continue
                if d_separated(g, {a}, {b}, z):
                    kept.append(z)
                    out.append(
                        CIStatement(frozenset({a}), frozenset({b}), z, GLOBAL_BASIS)
                    )
    return tuple(out)


def truncated_factorization(
    g: CausalGraph, do: Iterable[str] = ()
) -> Factorization:
    """Interventional factorization with intervened factors removed.

    Parents that are intervened on render as fixed lowercase values in
    the surviving factors.
    """
    do = frozenset(do)
    for v in do:
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
    factors = tuple(
        Factor(v, g.canonical_parents[v])
        for v in g.topological_order
        if v not in do
    )
    return Factorization(factors, do)
