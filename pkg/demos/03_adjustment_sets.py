"""
Finding and vetting backdoor adjustment sets
============================================

The central identification question: which covariates must be held
fixed so that the remaining association between exposure and outcome is
causal? `minimal_adjustment_sets` searches; `backdoor_admissible` vets
a candidate and names the rule it breaks.
"""

from egp import backdoor_admissible, causal_paths, minimal_adjustment_sets, parse
from egp.corpus import load_entry

# The textbook pair: identical structure, but in the second graph the
# confounder is unobserved, so no adjustment set exists.
for eid in ("tab3A", "tab3B"):
    g = load_entry(eid).graph
    found = minimal_adjustment_sets(g)
    sets = [sorted(s) for s in found.sets] or "none"
    print(f"{eid}: minimal adjustment sets = {sets}  (search {found.marker})")
print()

# Vetting candidates on tab3A: each inadmissible set gets a verdict and,
# where one exists, a witness path.
g = load_entry("tab3A").graph
print("causal paths D .. Y:", [" -> ".join(p.nodes) for p in causal_paths(g, "D", "Y")])
for z in ([], ["X"]):
    v = backdoor_admissible(g, "D", "Y", z)
    label = "admissible" if v.admissible else f"inadmissible ({v.violated})"
    print(f"  z = {sorted(z)!r:12} {label}")
    if v.witness is not None:
        print("     witness:", v.witness.display())
print()

# Over-control: conditioning on a mediator blocks the effect you are
# trying to measure. The policing graph makes the witness explicit.
knox = load_entry("knox_policing").graph
v = backdoor_admissible(knox, "Race", "Force", ["Stop"])
print("knox_policing, z = {Stop}:", v.violated)
print("  blocked causal path:", v.witness.display())
print()

# Over-control in a published design: in rauscher_overT the covariate T
# sits on a causal path out of the exposure, so adding it to z is a
# mistake the checker names precisely.
g2 = load_entry("rauscher_overT").graph
d2, y2 = g2.designated_pair()
v = backdoor_admissible(g2, d2, y2, ["T"])
print("rauscher_overT, z = {T}:", v.violated)
print("  blocked causal path:", v.witness.display())
print()

# Descendant contamination: a post-exposure variable that sits on no
# causal path is still inadmissible, with its own verdict.
g3 = parse(
    "dag post { node D [exposure]; node Y [outcome];"
    " D -> W; D -> Y; X -> D; X -> Y; }"
)
v3 = backdoor_admissible(g3, "D", "Y", ["W", "X"])
print("synthetic post-exposure W, z = {W, X}:", v3.violated)
