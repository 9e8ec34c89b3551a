"""
What a graph promises about data, and how interventions rewrite it
==================================================================

Every DAG makes falsifiable promises: conditional independencies that
must hold in any distribution it generates. It also fixes how the joint
distribution factors, and how that product changes when a variable is
set by intervention instead of observed.
"""

from egp import implied_independencies, local_markov, truncated_factorization
from egp.corpus import load_entry

# The local Markov basis: each variable independent of its
# non-descendants given its parents.
for eid in ("chain3", "fork3", "collider3"):
    g = load_entry(eid).graph
    stmts = [s.display() for s in local_markov(g)]
    print(f"{eid:10} local basis: {stmts}")
print()

# The testable list: pairwise independencies with minimal conditioning
# sets, the statements a model-fit test will actually run.
for eid in ("chain3", "collider3", "tab3A", "breen_gp"):
    g = load_entry(eid).graph
    stmts = [s.display() for s in implied_independencies(g, max_cond=3)]
    print(f"{eid:10} implies: {stmts if stmts else 'nothing testable'}")
print()

# Latent variables appear in canonical form inside factorizations; they
# are part of the model even though no dataset will ever contain them.
g = load_entry("tab3B").graph
print("tab3B observational:")
print("  ", truncated_factorization(g).render())
print()

# Intervening deletes the intervened factor and replaces the variable
# with a pinned value everywhere it appears as a parent.
g = load_entry("tab3A").graph
print("tab3A observational:")
print("  ", truncated_factorization(g).render())
print("tab3A under do(D):")
print("  ", truncated_factorization(g, do=["D"]).render())
print()

# The degenerate extreme: intervene on everything and nothing random
# remains.
chain = load_entry("chain3").graph
print("chain3 under do(A, B, C):")
print("  ", truncated_factorization(chain, do=["A", "B", "C"]).render())
