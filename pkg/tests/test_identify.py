from __future__ import annotations

import numpy as np
import pytest

from egp import (
    InvalidQuery,
    LatentInSet,
    UnknownNode,
    backdoor_admissible,
    causal_paths,
    iv_check,
    minimal_adjustment_sets,
    parse,
)
from oracles import (
    brute_backdoor_admissible,
    brute_minimal_adjustment_sets,
    random_dag,
)


def test_causal_paths_direct_and_mediated(corpus_graph):
    g = corpus_graph("rauscher_overT")
    paths = causal_paths(g, "E", "D")
    assert [list(p.nodes) for p in paths] == [["E", "D"], ["E", "T", "D"]]
    assert all(set(p.arrows) == {"forward"} for p in paths)


def test_causal_paths_none():
    g = parse("dag g { Y -> D; }")
    assert causal_paths(g, "D", "Y") == ()


def test_backdoor_admissible_happy(corpus_graph):
    g = corpus_graph("tab3A")
    v = backdoor_admissible(g, "D", "Y", ["X"])
    assert v.admissible and v.violated is None and v.witness is None


def test_backdoor_open_without_adjustment(corpus_graph):
    g = corpus_graph("tab3A")
    v = backdoor_admissible(g, "D", "Y", [])
    assert not v.admissible
    assert v.violated == "open-backdoor"
    assert v.witness is not None and list(v.witness.nodes) == ["D", "X", "Y"]


def test_backdoor_latent_member_is_verdict_not_error(corpus_graph):
    g = corpus_graph("tab3B")
    v = backdoor_admissible(g, "D", "Y", ["L"])
    assert not v.admissible
    assert v.violated == "contains-latent"


def test_backdoor_blocks_causal_path(corpus_graph):
    g = corpus_graph("knox_policing")
    v = backdoor_admissible(g, "Race", "Force", ["Stop"])
    assert v.violated == "blocks-causal-path"
    assert list(v.witness.nodes) == ["Race", "Stop", "Force"]


def test_backdoor_contains_descendant_off_causal_path():
    # W descends from D but sits on no directed D..Y path
    g = parse("dag g { D -> W; D -> Y; X -> D; X -> Y; }")
    v = backdoor_admissible(g, "D", "Y", ["W", "X"])
    assert v.violated == "contains-descendant"
    assert v.witness is None


def test_backdoor_verdict_order_prefers_latent():
    g = parse("dag g { node L [latent]; L -> D; L -> Y; D -> M; M -> Y; }")
    v = backdoor_admissible(g, "D", "Y", ["L", "M"])
    assert v.violated == "contains-latent"


def test_backdoor_query_validation():
    g = parse("dag g { D -> Y; }")
    with pytest.raises(UnknownNode):
        backdoor_admissible(g, "D", "Y", ["Q"])
    with pytest.raises(InvalidQuery):
        backdoor_admissible(g, "D", "D", [])
    with pytest.raises(InvalidQuery):
        backdoor_admissible(g, "D", "Y", ["D"])


def test_minimal_sets_tab3(corpus_graph):
    a = minimal_adjustment_sets(corpus_graph("tab3A"))
    assert [sorted(s) for s in a.sets] == [["X"]]
    assert a.marker == "exhausted"
    b = minimal_adjustment_sets(corpus_graph("tab3B"))
    assert b.sets == () and b.marker == "exhausted"


def test_minimal_sets_prefer_small_then_lex():
    # both {B} and {C} block; {B, C} is not minimal
    g = parse("dag g { B -> D; B -> C; C -> Y; D -> Y; }")
    found = minimal_adjustment_sets(g, "D", "Y")
    assert [sorted(s) for s in found.sets] == [["B"], ["C"]]
    assert found.marker == "exhausted"


def test_minimal_sets_truncation_markers():
    g = parse("dag g { A -> D; B -> D; A -> Y; B -> Y; D -> Y; }")
    full = minimal_adjustment_sets(g, "D", "Y")
    assert [sorted(s) for s in full.sets] == [["A", "B"]]
    # size cap below the only solution: nothing found, search truncated
    capped = minimal_adjustment_sets(g, "D", "Y", max_size=1)
    assert capped.sets == () and capped.marker == "truncated"
    # count cap reached: truncated even though sizes were all visited
    g2 = parse("dag g2 { B -> D; B -> C; C -> Y; D -> Y; }")
    counted = minimal_adjustment_sets(g2, "D", "Y", max_count=1)
    assert len(counted.sets) == 1 and counted.marker == "truncated"


def test_minimal_sets_use_designations(corpus_graph):
    g = corpus_graph("tab3A")
    assert minimal_adjustment_sets(g).exposure == "D"
    with pytest.raises(InvalidQuery):
        minimal_adjustment_sets(parse("dag g { A -> B; }"))


def test_minimal_sets_oracle_equivalence_seeded():
    rng = np.random.default_rng(515)
    for trial in range(40):
        g = random_dag(
            rng,
            max_nodes=7,
            edge_prob=0.4,
            bidirected_prob=0.1 if trial % 2 else 0.0,
            latent_frac=0.15 if trial % 3 == 0 else 0.0,
            name=f"r{trial}",
        )
        obs = list(g.observed_names)
        if len(obs) < 2:
            continue
        d, y = obs[0], obs[1]
        pool = len(obs) - 2
        got = minimal_adjustment_sets(g, d, y, max_size=max(pool, 0), max_count=4096)
        assert got.marker == "exhausted"
        want = brute_minimal_adjustment_sets(g, d, y)
        assert [sorted(s) for s in got.sets] == [sorted(s) for s in want], (
            g.name,
            sorted(g.directed_pairs),
            sorted(g.bidirected_pairs),
            d,
            y,
        )


def test_backdoor_verdict_oracle_equivalence_seeded():
    from itertools import combinations

    rng = np.random.default_rng(616)
    for trial in range(30):
        g = random_dag(rng, max_nodes=6, edge_prob=0.4, bidirected_prob=0.1)
        obs = list(g.observed_names)
        if len(obs) < 3:
            continue
        d, y = obs[0], obs[1]
        rest = [v for v in obs if v not in (d, y)]
        for size in range(min(2, len(rest)) + 1):
            for zc in combinations(rest, size):
                got = backdoor_admissible(g, d, y, zc)
                assert got.admissible == brute_backdoor_admissible(g, d, y, zc)


def test_iv_valid_and_conditional(corpus_graph):
    g = corpus_graph("sharkey_base")
    cond = iv_check(g, "ONP", given=["X"])
    assert cond.valid and cond.relevant and cond.excluded_exogenous
    assert cond.witness is None
    bare = iv_check(g, "ONP")
    assert not bare.valid and bare.relevant and not bare.excluded_exogenous
    assert list(bare.witness.nodes) == ["ONP", "X", "Crime"]


def test_iv_relevance_failure():
    g = parse(
        "dag g { node D [exposure]; node Y [outcome];"
        " Z -> W; W -> D; D -> Y; U -> D; U -> Y; }"
    )
    v = iv_check(g, "Z", given=["W"])
    assert not v.relevant and not v.valid
    # irrelevance carries no path witness; there is nothing open to show
    assert v.witness is None


def test_iv_query_validation(corpus_graph):
    g = corpus_graph("sharkey_base")
    with pytest.raises(UnknownNode):
        iv_check(g, "Nope")
    with pytest.raises(InvalidQuery):
        iv_check(g, "CNP")
    with pytest.raises(InvalidQuery):
        iv_check(g, "ONP", given=["ONP"])
    with pytest.raises(LatentInSet):
        iv_check(g, "ONP", given=["Funds"])


def test_iv_instrument_may_be_latent_endpoint(corpus_graph):
    # a latent instrument is useless in practice but a legal graph query
    g = corpus_graph("sharkey_base")
    v = iv_check(g, "Funds", given=["X"])
    assert v.relevant
