"""Bundled example graphs with replayable expected analyses.

Each entry is a ``<id>.dag`` file in the text format plus a
``<id>.expect.json`` file holding queries and their expected results
as plain data.  Expectations are replayed against the live engine, so
the corpus is an executable regression suite as well as a set of
worked examples.  Set ``EGP_CORPUS_DIR`` to point the loader at an
alternative directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..dsl import ParseError, parse
from ..errors import CorruptCorpus, EgpError
from ..graph import CausalGraph
from ..identify import backdoor_admissible, causal_paths, iv_check, minimal_adjustment_sets
from ..implications import implied_independencies, truncated_factorization
from ..separation import d_separated

ENV_VAR = "EGP_CORPUS_DIR"


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    provenance: str
    notes: str
    dag_source: str
    graph: CausalGraph
    expectations: tuple[dict, ...]

    def to_dict(self, include_expectations: bool = True) -> dict:
        out = {
            "id": self.id,
            "provenance": self.provenance,
            "notes": self.notes,
            "dag_source": self.dag_source,
        }
        if include_expectations:
            out["expectations"] = [dict(e) for e in self.expectations]
        return out


@dataclass(frozen=True)
class ReplayCheck:
    op: str
    args: dict
    expected: dict
    actual: dict
    passed: bool

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "args": self.args,
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ReplayResult:
    id: str
    checks: tuple[ReplayCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def corpus_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent


def list_ids() -> list[str]:
    base = corpus_dir()
    if not base.is_dir():
        raise CorruptCorpus(f"corpus directory {base} does not exist")
    return sorted(p.stem for p in base.glob("*.dag"))


def load_entry(entry_id: str) -> CorpusEntry:
    base = corpus_dir()
    dag_path = base / f"{entry_id}.dag"
    expect_path = base / f"{entry_id}.expect.json"
    try:
        source = dag_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptCorpus(f"cannot read {dag_path}: {exc}") from exc
    try:
        graph = parse(source)
    except ParseError as exc:
        raise CorruptCorpus(f"{dag_path} does not parse: {exc}") from exc
    try:
        meta = json.loads(expect_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorruptCorpus(f"cannot read {expect_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptCorpus(f"{expect_path} is not valid JSON: {exc}") from exc
    for key in ("id", "provenance", "notes", "expectations"):
        if key not in meta:
            raise CorruptCorpus(f"{expect_path} is missing key {key!r}")
    if meta["id"] != entry_id:
        raise CorruptCorpus(
            f"{expect_path} declares id {meta['id']!r}, expected {entry_id!r}"
        )
    expectations = []
    for i, ex in enumerate(meta["expectations"]):
        if not isinstance(ex, dict) or "op" not in ex or "expect" not in ex:
            raise CorruptCorpus(
                f"{expect_path} expectation #{i} needs 'op' and 'expect'"
            )
        expectations.append(
            {"op": ex["op"], "args": ex.get("args", {}), "expect": ex["expect"]}
        )
    return CorpusEntry(
        entry_id,
        meta["provenance"],
        meta["notes"],
        source,
        graph,
        tuple(expectations),
    )


def load_corpus() -> tuple[CorpusEntry, ...]:
    return tuple(load_entry(i) for i in list_ids())


def _run_query(g: CausalGraph, op: str, args: dict) -> dict:
    if op == "dsep":
        sep = d_separated(g, args["x"], args["y"], args.get("given", ()))
        return {"separated": sep}
    if op == "adjustment_sets":
        search = minimal_adjustment_sets(
            g,
            args.get("exposure"),
            args.get("outcome"),
            max_size=args.get("max_size", 6),
            max_count=args.get("max_count", 64),
        )
        return {"sets": [sorted(s) for s in search.sets], "marker": search.marker}
    if op == "iv":
        v = iv_check(
            g,
            args["instrument"],
            args.get("exposure"),
            args.get("outcome"),
            args.get("given", ()),
        )
        return {
            "valid": v.valid,
            "relevant": v.relevant,
            "excluded_exogenous": v.excluded_exogenous,
            "witness_nodes": list(v.witness.nodes) if v.witness else None,
        }
    if op == "backdoor":
        v = backdoor_admissible(
            g,
            *g.designated_pair(args.get("exposure"), args.get("outcome")),
            args.get("z", ()),
        )
        return {
            "admissible": v.admissible,
            "violated": v.violated,
            "witness_nodes": list(v.witness.nodes) if v.witness else None,
        }
    if op == "causal_paths":
        paths = causal_paths(g, *g.designated_pair(args.get("exposure"), args.get("outcome")))
        return {"paths": [list(p.nodes) for p in paths]}
    if op == "factorize":
        f = truncated_factorization(g, args.get("do", ()))
        return {"rendered": f.render()}
    if op == "implications":
        stmts = implied_independencies(g, args.get("max_cond", 3))
        return {"statements": [s.display() for s in stmts]}
    raise CorruptCorpus(f"unknown expectation op {op!r}")


def replay(entry: CorpusEntry) -> ReplayResult:
    """Run every stored expectation against the live engine.

    An expectation passes when each of its keys matches the engine's
    answer exactly; keys the expectation leaves out are not compared.
    """
    checks = []
    for ex in entry.expectations:
        try:
            actual = _run_query(entry.graph, ex["op"], ex["args"])
        except EgpError as exc:
            actual = {"error": f"{type(exc).__name__}: {exc}"}
        expected = ex["expect"]
        passed = all(k in actual and actual[k] == v for k, v in expected.items())
        checks.append(ReplayCheck(ex["op"], ex["args"], expected, actual, passed))
    return ReplayResult(entry.id, tuple(checks))


def replay_all() -> tuple[ReplayResult, ...]:
    return tuple(replay(e) for e in load_corpus())
