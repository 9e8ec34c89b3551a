"""
d-separation with path-level receipts
=====================================

`d_separated` answers yes/no; `enumerate_paths` shows the walks behind
the answer, with each path labeled open or blocked and annotated with
the nodes responsible. The three-node motifs make the collider rules
concrete.
"""

from egp import d_separated, enumerate_paths, parse
from egp.corpus import load_entry

chain = load_entry("chain3").graph     # A -> B -> C
fork = load_entry("fork3").graph       # A <- B -> C
collider = load_entry("collider3").graph  # A -> B <- C

print("chain     A _||_ C?        ", d_separated(chain, ["A"], ["C"]))
print("chain     A _||_ C | B?    ", d_separated(chain, ["A"], ["C"], ["B"]))
print("fork      A _||_ C?        ", d_separated(fork, ["A"], ["C"]))
print("fork      A _||_ C | B?    ", d_separated(fork, ["A"], ["C"], ["B"]))
print("collider  A _||_ C?        ", d_separated(collider, ["A"], ["C"]))
print("collider  A _||_ C | B?    ", d_separated(collider, ["A"], ["C"], ["B"]))
print()

# Conditioning on a collider's descendant also opens it. This is the
# classic selection trap: filtering a dataset on S is conditioning.
sel = parse("dag sel { Talent -> Admit; Luck -> Admit; Admit -> Enrolled; }")
print("talent _||_ luck?            ",
      d_separated(sel, ["Talent"], ["Luck"]))
print("talent _||_ luck | enrolled? ",
      d_separated(sel, ["Talent"], ["Luck"], ["Enrolled"]))
print()

# Path receipts on a confounded pair: one causal path, one backdoor.
g = load_entry("tab3A").graph
report = enumerate_paths(g, "D", "Y", given=["X"])
print(f"paths D .. Y given {{X}} in {g.name}:")
for p in report.paths:
    print(f"  {p.display()}   [{p.status}]")
    if p.blockers:
        print("    blocked at:", ", ".join(sorted(p.blockers)))
    if p.openers:
        print("    opened by conditioning:", ", ".join(sorted(p.openers)))
print("total open paths:",
      sum(1 for p in report.paths if p.status == "open"))
