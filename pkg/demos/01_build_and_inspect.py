"""
Writing a graph in the DSL and reading it back
==============================================

A study design is a small text file: nodes, arrows, and role markers.
This script parses one, inspects what the parser understood, and prints
the canonical form that every other tool in the package consumes.
"""

from egp import parse, serialize

# A confounded exposure/outcome pair. The bracketed attributes mark the
# designated exposure and outcome; `latent` marks a variable the study
# never measures.
source = """
dag clinic {
  node D [exposure];      // treatment actually received
  node Y [outcome];       // recovery score
  node S [latent];        // underlying severity, never recorded
  S -> D;
  S -> Y;
  D -> Y;
  Age -> D;
  Age -> Y;
}
"""

g = parse(source)
print("graph name:   ", g.name)
print("observed:     ", ", ".join(g.observed_names))
print("latent:       ", ", ".join(v for v in g.node_names if g.role(v).latent))
print("exposure/outcome:", g.designated_pair())
print()

# Edges come back in a deterministic order, so two people editing the
# same file can diff their canonical forms.
print("edges:")
for e in g.edges:
    arrow = "<->" if e.kind == "bidirected" else "->"
    print(f"  {e.src} {arrow} {e.dst}")
print()

# The serializer is the inverse of the parser: parse(serialize(g))
# round-trips exactly, which is what makes the corpus files stable.
print("canonical form:")
print(serialize(g))

# Structural queries the rest of the package builds on.
print("parents of Y: ", sorted(g.parents("Y")))
print("ancestors of Y:", sorted(g.ancestors("Y")))
print("topological order:", " < ".join(g.topological_order))

# Bidirected arcs are sugar for a shared hidden cause. The graph keeps
# them as arcs; analyses expand them to a synthetic latent root.
h = parse("dag trade { Price <-> Demand; Price -> Sales; }")
print()
print("bidirected example, canonical:")
print(serialize(h), end="")
