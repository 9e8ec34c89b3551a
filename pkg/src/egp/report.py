"""Query runners producing versioned JSON report envelopes.

Every analysis exposed over the command line or the HTTP service goes
through one of the ``*_report`` functions here, so the two frontends
emit byte-identical documents for the same query.  An envelope is a
plain dict::

    {
      "schema": "egp.report/v1",
      "kind": "<operation>",
      "graph": {"name": ...} | null,
      "query": {...},          # normalized echo of the inputs
      "result": {...}
    }

``encode_report`` is the single serialization point: two-space indent,
sorted keys, trailing newline.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .corpus import list_ids, load_corpus, load_entry, replay_all
from .dsl import parse_source, serialize
from .graph import CausalGraph
from .identify import (
    backdoor_admissible,
    causal_paths,
    iv_check,
    minimal_adjustment_sets,
)
from .implications import implied_independencies, truncated_factorization
from .sem import (
    Dataset,
    Do,
    estimate,
    instantiate_sem,
    model_fit_report,
    sample,
    sensitivity_sweep,
)
from .separation import d_separated, enumerate_paths

SCHEMA = "egp.report/v1"


def encode_report(report: Mapping) -> str:
    """Canonical serialization shared by all output channels."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _envelope(kind: str, graph: CausalGraph | None, query: dict, result: dict) -> dict:
    return {
        "schema": SCHEMA,
        "kind": kind,
        "graph": {"name": graph.name} if graph is not None else None,
        "query": query,
        "result": result,
    }


def _node_dict(g: CausalGraph, v: str) -> dict:
    role = g.role(v)
    return {
        "name": v,
        "latent": role.latent,
        "exposure": role.exposure,
        "outcome": role.outcome,
        "adjusted": role.adjusted,
    }


def parse_report(source: str) -> dict:
    """Parse a graph and report its normalized structure.

    Raises ParseError on bad input; callers map that to their own
    error channel.
    """
    parsed = parse_source(source)
    g = parsed.graph
    result = {
        "nodes": [_node_dict(g, v) for v in sorted(g.node_names)],
        "edges": [{"src": e.src, "dst": e.dst, "kind": e.kind} for e in g.edges],
        "warnings": [w.display() for w in parsed.warnings],
        "canonical": serialize(g),
    }
    return _envelope("parse", g, {}, result)


def dsep_report(
    g: CausalGraph,
    x: Iterable[str],
    y: Iterable[str],
    given: Iterable[str] = (),
    max_paths: int = 64,
) -> dict:
    """Separation verdict, with path-level evidence for singleton sets."""
    xs, ys, gs = sorted(set(x)), sorted(set(y)), sorted(set(given))
    separated = d_separated(g, xs, ys, gs)
    paths = None
    truncated = False
    if len(xs) == 1 and len(ys) == 1:
        ps = enumerate_paths(g, xs[0], ys[0], gs, limit=max_paths)
        paths = [p.to_dict() for p in ps.paths]
        truncated = ps.truncated
    query = {"x": xs, "y": ys, "given": gs, "max_paths": max_paths}
    result = {"separated": separated, "paths": paths, "truncated": truncated}
    return _envelope("dsep", g, query, result)


def paths_report(
    g: CausalGraph,
    x: str,
    y: str,
    given: Iterable[str] = (),
    max_paths: int = 64,
) -> dict:
    gs = sorted(set(given))
    ps = enumerate_paths(g, x, y, gs, limit=max_paths)
    query = {"x": x, "y": y, "given": gs, "max_paths": max_paths}
    result = {
        "paths": [p.to_dict() for p in ps.paths],
        "open_count": sum(1 for p in ps.paths if p.status == "open"),
        "truncated": ps.truncated,
    }
    return _envelope("paths", g, query, result)


def adjustment_report(
    g: CausalGraph,
    d: str | None = None,
    y: str | None = None,
    max_size: int = 6,
    max_count: int = 64,
) -> dict:
    search = minimal_adjustment_sets(g, d, y, max_size=max_size, max_count=max_count)
    # the causal paths being preserved are part of the story the sets tell
    paths = causal_paths(g, search.exposure, search.outcome)
    query = {
        "exposure": search.exposure,
        "outcome": search.outcome,
        "max_size": max_size,
        "max_count": max_count,
    }
    result = search.to_dict()
    result["causal_paths"] = [p.to_dict() for p in paths]
    return _envelope("adjustment-sets", g, query, result)


def backdoor_report(
    g: CausalGraph,
    z: Iterable[str],
    d: str | None = None,
    y: str | None = None,
) -> dict:
    d, y = g.designated_pair(d, y)
    verdict = backdoor_admissible(g, d, y, z)
    query = {
        "z": sorted(set(z)),
        "exposure": verdict.exposure,
        "outcome": verdict.outcome,
    }
    return _envelope("backdoor", g, query, verdict.to_dict())


def iv_report(
    g: CausalGraph,
    instrument: str,
    given: Iterable[str] = (),
    d: str | None = None,
    y: str | None = None,
) -> dict:
    verdict = iv_check(g, instrument, d, y, given=given)
    query = {
        "instrument": instrument,
        "given": sorted(set(given)),
        "exposure": verdict.exposure,
        "outcome": verdict.outcome,
    }
    return _envelope("iv-check", g, query, verdict.to_dict())


def implications_report(g: CausalGraph, max_cond: int = 3) -> dict:
    stmts = implied_independencies(g, max_cond=max_cond)
    result = {"statements": [s.to_dict() for s in stmts]}
    return _envelope("implications", g, {"max_cond": max_cond}, result)


def factorize_report(g: CausalGraph, do: Iterable[str] = ()) -> dict:
    fact = truncated_factorization(g, do)
    return _envelope("factorize", g, {"do": sorted(set(do))}, fact.to_dict())


def simulate_report(
    g: CausalGraph,
    n: int,
    seed: int = 0,
    do: tuple[str, float] | None = None,
    coefficients: Mapping[tuple[str, str], float] | None = None,
) -> dict:
    model = instantiate_sem(g, coefficients, seed=seed)
    regime = Do(do[0], float(do[1])) if do is not None else None
    data = sample(model, n, regime=regime, seed=seed)
    query = {
        "n": n,
        "seed": seed,
        "do": {"node": do[0], "value": float(do[1])} if do is not None else None,
        "coefficients": (
            {f"{s}->{t}": float(v) for (s, t), v in sorted(coefficients.items())}
            if coefficients
            else None
        ),
    }
    result = {
        "columns": list(data.columns),
        "n": data.n,
        "seed": seed,
        "regime": data.meta.regime,
        "csv": data.to_csv(),
    }
    return _envelope("simulate", g, query, result)


def estimate_report(
    g: CausalGraph,
    data: Dataset,
    method: str,
    d: str | None = None,
    y: str | None = None,
    adjust_set: Iterable[str] = (),
    instrument: str | None = None,
    given: Iterable[str] = (),
) -> dict:
    d, y = g.designated_pair(d, y)
    res = estimate(
        data,
        d,
        y,
        method,
        adjust_set=adjust_set,
        instrument=instrument,
        given=given,
    )
    query = {
        "method": method,
        "exposure": d,
        "outcome": y,
        "adjust": sorted(set(adjust_set)),
        "instrument": instrument,
        "given": sorted(set(given)),
        "n": data.n,
    }
    return _envelope("estimate", g, query, res.to_dict())


def testfit_report(
    g: CausalGraph,
    data: Dataset,
    max_cond: int = 3,
    alpha: float = 0.01,
    correction: str = "holm",
) -> dict:
    rep = model_fit_report(g, data, max_cond=max_cond, alpha=alpha, correction=correction)
    query = {"max_cond": max_cond, "alpha": alpha, "correction": correction, "n": data.n}
    return _envelope("testfit", g, query, rep.to_dict())


def sensitivity_report(
    g: CausalGraph,
    z: Iterable[str] = (),
    strengths: Iterable[float] = (),
    d: str | None = None,
    y: str | None = None,
    n: int = 20_000,
    seed: int = 0,
    coefficients: Mapping[tuple[str, str], float] | None = None,
) -> dict:
    rep = sensitivity_sweep(
        g, z, strengths, d=d, y=y, n=n, seed=seed, coefficients=coefficients
    )
    query = {
        "z": sorted(set(z)),
        "strengths": [float(s) for s in strengths],
        "exposure": rep.exposure,
        "outcome": rep.outcome,
        "n": n,
        "seed": seed,
    }
    return _envelope("sensitivity", g, query, rep.to_dict())


def corpus_report() -> dict:
    entries = load_corpus()
    result = {
        "ids": list_ids(),
        "entries": [e.to_dict(include_expectations=False) for e in entries],
    }
    return _envelope("corpus", None, {}, result)


def corpus_entry_report(entry_id: str) -> dict:
    entry = load_entry(entry_id)
    return _envelope("corpus-entry", entry.graph, {"id": entry_id}, entry.to_dict())


def corpus_replay_report() -> dict:
    results = replay_all()
    failures = sum(1 for r in results if not r.passed)
    result = {
        "results": [r.to_dict() for r in results],
        "total": len(results),
        "failures": failures,
        "passed": failures == 0,
    }
    return _envelope("corpus-replay", None, {}, result)
