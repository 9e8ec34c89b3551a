"""Adjustment-set and instrument admissibility checks.

The backdoor test is the two-condition criterion: an adjustment set
must avoid descendants of the exposure and must block every path into
the exposure's back door once outgoing edges are severed.  Instrument
checks split into relevance (association with the exposure) and
exclusion-plus-exogeneity (separation from the outcome once the
exposure's incoming edges are cut), each answered by the separation
engine so a failed check can always produce a witnessing path.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import InvalidQuery, LatentInSet, UnknownNode
from .graph import CausalGraph, mutilate_incoming, mutilate_outgoing
from .separation import PathReport, PathSet, d_separated, enumerate_paths

ADMISSIBLE = "admissible"
BLOCKS_CAUSAL_PATH = "blocks-causal-path"
OPEN_BACKDOOR = "open-backdoor"
CONTAINS_DESCENDANT = "contains-descendant"
CONTAINS_LATENT = "contains-latent"


@dataclass(frozen=True)
class AdjustmentVerdict:
    """Outcome of a backdoor admissibility check for one candidate set."""

    exposure: str
    outcome: str
    z: frozenset[str]
    admissible: bool
    violated: str | None = None
    witness: PathReport | None = None

    def to_dict(self) -> dict:
        return {
            "exposure": self.exposure,
            "outcome": self.outcome,
            "z": sorted(self.z),
            "admissible": self.admissible,
            "violated": self.violated,
            "witness": self.witness.to_dict() if self.witness else None,
        }


@dataclass(frozen=True)
class AdjustmentSearch:
    """Inclusion-minimal admissible sets found under the search caps."""

    exposure: str
    outcome: str
    sets: tuple[frozenset[str], ...]
    marker: str  # "exhausted" | "truncated"
    max_size: int
    max_count: int

    def to_dict(self) -> dict:
        return {
            "exposure": self.exposure,
            "outcome": self.outcome,
            "sets": [sorted(s) for s in self.sets],
            "marker": self.marker,
            "max_size": self.max_size,
            "max_count": self.max_count,
        }


@dataclass(frozen=True)
class IvVerdict:
    """Conditional instrument check, split into its two requirements."""

    instrument: str
    exposure: str
    outcome: str
    given: frozenset[str]
    relevant: bool
    excluded_exogenous: bool
    witness: PathReport | None = None

    @property
    def valid(self) -> bool:
        return self.relevant and self.excluded_exogenous

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument,
            "exposure": self.exposure,
            "outcome": self.outcome,
            "given": sorted(self.given),
            "valid": self.valid,
            "relevant": self.relevant,
            "excluded_exogenous": self.excluded_exogenous,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def causal_paths(g: CausalGraph, d: str, y: str) -> tuple[PathReport, ...]:
    """Directed paths from ``d`` to ``y``, shortest first then lexicographic."""
    for v in (d, y):
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
    if d == y:
        raise InvalidQuery("exposure and outcome must differ")
    children = g.canonical_children
    out: list[tuple[str, ...]] = []
    path = [d]
    on_path = {d}

    def rec() -> None:
        v = path[-1]
        if v == y:
            out.append(tuple(path))
            return
        for c in sorted(children[v]):
            if c in on_path:
                continue
            path.append(c)
            on_path.add(c)
            rec()
            on_path.discard(c)
            path.pop()

    rec()
    out.sort(key=lambda p: (len(p), p))
    return tuple(
        PathReport(p, ("forward",) * (len(p) - 1), "open", frozenset(), frozenset())
        for p in out
    )


def _first_open_path(paths: PathSet) -> PathReport | None:
    for p in paths.paths:
        if p.status == "open":
            return p
    return None


def backdoor_admissible(
    g: CausalGraph, d: str, y: str, z: Iterable[str] = ()
) -> AdjustmentVerdict:
    """Test one candidate adjustment set against the backdoor criterion.

    Inadmissible sets carry the first violated condition and, where a
    path can show it, a witness: the opened backdoor path, or the
    blocked causal path containing the offending descendant.
    """
    z = frozenset(z)
    for v in {d, y} | z:
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
    if d == y:
        raise InvalidQuery("exposure and outcome must differ")
    if d in z or y in z:
        raise InvalidQuery("the adjustment set must exclude exposure and outcome")

    latents = sorted(v for v in z if g.is_latent(v))
    if latents:
        return AdjustmentVerdict(d, y, z, False, CONTAINS_LATENT)

    offenders = z & g.descendants(d)
    if offenders:
        for p in causal_paths(g, d, y):
            if offenders & set(p.nodes):
                return AdjustmentVerdict(d, y, z, False, BLOCKS_CAUSAL_PATH, p)
        return AdjustmentVerdict(d, y, z, False, CONTAINS_DESCENDANT)

    g_test = mutilate_outgoing(g, d)
    if d_separated(g_test, {d}, {y}, z):
        return AdjustmentVerdict(d, y, z, True)
    witness = _first_open_path(enumerate_paths(g_test, d, y, z))
    return AdjustmentVerdict(d, y, z, False, OPEN_BACKDOOR, witness)


def minimal_adjustment_sets(
    g: CausalGraph,
    d: str | None = None,
    y: str | None = None,
    max_size: int = 6,
    max_count: int = 64,
) -> AdjustmentSearch:
    """Enumerate inclusion-minimal admissible sets, smallest first.

    Candidates are observed non-descendants of the exposure.  Subsets
    are scanned by size then lexicographically; supersets of a found
    set are skipped, which preserves exactly the inclusion-minimal
    solutions.  The marker reports whether the caps bounded the
    search: ``exhausted`` means every candidate subset was covered.
    """
    d, y = g.designated_pair(d, y)
    if max_size < 0 or max_count < 1:
        raise InvalidQuery("max_size must be >= 0 and max_count >= 1")
    pool = sorted(
        v
        for v in g.observed_names
        if v not in (d, y) and v not in g.descendants(d)
    )
    found: list[frozenset[str]] = []
    hit_count_cap = False
    for size in range(0, min(max_size, len(pool)) + 1):
        for combo in combinations(pool, size):
            cand = frozenset(combo)
            if any(s <= cand for s in found):
                continue
            if backdoor_admissible(g, d, y, cand).admissible:
                found.append(cand)
                if len(found) >= max_count:
                    hit_count_cap = True
                    break
        if hit_count_cap:
            break
    exhausted = not hit_count_cap and max_size >= len(pool)
    return AdjustmentSearch(
        d,
        y,
        tuple(found),
        "exhausted" if exhausted else "truncated",
        max_size,
        max_count,
    )


def iv_check(
    g: CausalGraph,
    z: str,
    d: str | None = None,
    y: str | None = None,
    given: Iterable[str] = (),
) -> IvVerdict:
    """Validate a candidate (conditional) instrument.

    ``z`` must move the exposure given the covariates, and must be
    separated from the outcome once the exposure's incoming edges are
    severed; the second failure carries the leaking path as witness.
    """
    d, y = g.designated_pair(d, y)
    given = frozenset(given)
    if not g.has_node(z):
        raise UnknownNode(f"node {z!r} is not declared in graph {g.name!r}")
    if z in (d, y):
        raise InvalidQuery("the instrument must differ from exposure and outcome")
    if given & {z, d, y}:
        raise InvalidQuery("covariates must exclude instrument, exposure, outcome")
    for v in given:
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
    latents = sorted(v for v in given if g.is_latent(v))
    if latents:
        raise LatentInSet(f"covariate set contains latent node(s): {latents}")

    relevant = not d_separated(g, {z}, {d}, given)
    g_do = mutilate_incoming(g, d)
    excluded = d_separated(g_do, {z}, {y}, given)
    witness = None
    if not excluded:
        witness = _first_open_path(enumerate_paths(g_do, z, y, given))
    return IvVerdict(z, d, y, given, relevant, excluded, witness)
