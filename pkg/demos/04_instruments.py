"""
Vetting a conditional instrument, and watching it break
=======================================================

When no adjustment set exists, an instrument can still identify the
effect: a variable that moves the exposure, touches the outcome only
through it, and shares no hidden cause with it. `iv_check` tests all
three legs graphically. The corpus carries a published design and four
ways to ruin it (Sharkey et al. 2017's community-nonprofits study).
"""

from egp.corpus import load_entry
from egp import iv_check

base = load_entry("sharkey_base").graph
print("graph:", base.name)
print("exposure/outcome:", base.designated_pair())
print()

# The candidate instrument only works conditionally: city covariates X
# confound instrument and outcome, so they must be held fixed.
bare = iv_check(base, "ONP")
cond = iv_check(base, "ONP", given=["X"])
print("ONP bare:         valid =", bare.valid)
if bare.witness is not None:
    print("  open violation path:", bare.witness.display())
print("ONP given {X}:    valid =", cond.valid,
      "| relevant =", cond.relevant,
      "| excluded+exogenous =", cond.excluded_exogenous)
print()

# Each corpus variant breaks exactly one assumption. The checker finds
# the violation and produces the offending path as a witness.
variants = [
    ("sharkey_exogA", ["X"], "hidden cause of instrument and outcome"),
    ("sharkey_exogB", ["X"], "instrument caused by outcome's driver"),
    ("sharkey_exclA", ["X"], "direct instrument -> outcome edge"),
    ("sharkey_exclB", ["X"], "instrument reaches outcome around exposure"),
]
for eid, given, why in variants:
    g = load_entry(eid).graph
    v = iv_check(g, "ONP", given=given)
    print(f"{eid}: valid = {v.valid}   ({why})")
    if v.witness is not None:
        print("   witness:", v.witness.display())
print()

# A second published family: the compulsory-schooling design. The
# baseline variant passes with no conditioning at all; measuring the
# mediator badly or conditioning on a collider breaks it.
for eid in ("rauscher_limit", "rauscher_colliderT", "rauscher_measure"):
    g = load_entry(eid).graph
    given = ["T"] if eid == "rauscher_colliderT" else []
    v = iv_check(g, "C", given=given)
    print(f"{eid}: instrument C given {given or '{}'} -> valid = {v.valid}")
