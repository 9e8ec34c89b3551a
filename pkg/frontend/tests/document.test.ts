import { describe, expect, it } from "vitest";

import { CanvasDocument, UNDO_DEPTH } from "../src/document.js";
import { parse, serialize } from "../src/dsl.js";

const TAB3A = [
  "dag tab3A {",
  "  node D [exposure];",
  "  node X;",
  "  node Y [outcome];",
  "  D -> Y;",
  "  X -> D;",
  "  X -> Y;",
  "}",
  "",
].join("\n");

function fresh(): CanvasDocument {
  return new CanvasDocument(TAB3A);
}

describe("construction and loading", () => {
  it("normalizes the source through the canonical serializer", () => {
    const doc = new CanvasDocument("dag t { B -> C; A -> B; }");
    expect(doc.dagSource).toBe("dag t {\n  node A;\n  node B;\n  node C;\n  A -> B;\n  B -> C;\n}\n");
    expect(doc.invalid).toBeNull();
    expect(doc.dirty).toBe(false);
  });

  it("flags unparseable text and keeps it for editing", () => {
    const doc = fresh();
    const outcome = doc.loadSource("dag broken { A -> ; }");
    expect(outcome.ok).toBe(false);
    expect(doc.invalid).not.toBeNull();
    expect(doc.invalid!.kind).toBe("syntax");
    expect(doc.invalid!.span).toEqual({ line: 1, column: 19, length: 1 });
    expect(doc.graph).toBeNull();
    expect(doc.dagSource).toBe("dag broken { A -> ; }");
    // undo returns to the last good state
    expect(doc.undo()).toBe(true);
    expect(doc.invalid).toBeNull();
    expect(doc.dagSource).toBe(TAB3A);
  });

  it("accepts a service-side parse error mark", () => {
    const doc = fresh();
    doc.markInvalid("expected a node name after '->', found ';'", "syntax", {
      line: 1,
      column: 18,
      length: 1,
    });
    expect(doc.graph).toBeNull();
    expect(doc.invalid!.span!.column).toBe(18);
  });

  it("drops layout and selection entries for nodes that disappear on load", () => {
    const doc = fresh();
    doc.layout.set("X", { x: 10, y: 20 });
    doc.selection.nodes.add("X");
    doc.loadSource("dag small { D -> Y; }");
    expect(doc.layout.has("X")).toBe(false);
    expect(doc.selection.nodes.has("X")).toBe(false);
  });
});

describe("node and edge edits", () => {
  it("adds nodes and regenerates canonical source", () => {
    const doc = fresh();
    expect(doc.addNode("M").ok).toBe(true);
    expect(doc.dagSource).toContain("  node M;\n");
    expect(doc.dirty).toBe(true);
    // the regenerated source is itself canonical
    expect(serialize(parse(doc.dagSource))).toBe(doc.dagSource);
  });

  it("rejects duplicate and empty node names", () => {
    const doc = fresh();
    expect(doc.addNode("X")).toEqual({ ok: false, reason: "node 'X' already exists" });
    expect(doc.addNode("").ok).toBe(false);
  });

  it("adds directed and bidirected edges", () => {
    const doc = fresh();
    doc.addNode("M");
    expect(doc.addEdge("D", "M").ok).toBe(true);
    expect(doc.addEdge("Y", "M", "bidirected").ok).toBe(true);
    // bidirected endpoints stored in name order
    expect(doc.dagSource).toContain("  M <-> Y;\n");
  });

  it("rejects an edge that would close a directed cycle and reports it", () => {
    const doc = new CanvasDocument("dag t { A -> B; B -> C; }");
    const before = doc.dagSource;
    const outcome = doc.addEdge("C", "A");
    expect(outcome.ok).toBe(false);
    if (!outcome.ok) {
      expect(outcome.reason).toBe("adding C -> A would create a directed cycle");
      expect(outcome.cycle).toEqual(["A", "B", "C", "A"]);
    }
    expect(doc.dagSource).toBe(before); // document unchanged
    expect(doc.undoDepth()).toBe(0); // rejected edits do not burn undo slots
  });

  it("allows a bidirected edge even where a directed one would cycle", () => {
    const doc = new CanvasDocument("dag t { A -> B; B -> C; }");
    expect(doc.addEdge("C", "A", "bidirected").ok).toBe(true);
  });

  it("rejects duplicate edges and self loops", () => {
    const doc = fresh();
    expect(doc.addEdge("D", "Y").ok).toBe(false);
    expect(doc.addEdge("D", "D").ok).toBe(false);
    expect(doc.addEdge("D", "Nope").ok).toBe(false);
  });

  it("deletes a node together with its incident edges", () => {
    const doc = fresh();
    expect(doc.deleteNode("X").ok).toBe(true);
    expect(doc.dagSource).toBe("dag tab3A {\n  node D [exposure];\n  node Y [outcome];\n  D -> Y;\n}\n");
  });

  it("clears the instrument when its node is deleted", () => {
    const doc = fresh();
    doc.setInstrument("X");
    doc.deleteNode("X");
    expect(doc.instrument).toBeNull();
  });

  it("deletes single edges", () => {
    const doc = fresh();
    expect(doc.deleteEdge("X", "Y").ok).toBe(true);
    expect(doc.dagSource).not.toContain("X -> Y");
    expect(doc.deleteEdge("X", "Y").ok).toBe(false);
  });
});

describe("role toggles", () => {
  it("moves the exposure designation instead of duplicating it", () => {
    const doc = fresh();
    expect(doc.toggleRole("X", "exposure").ok).toBe(true);
    expect(doc.role("X")!.exposure).toBe(true);
    expect(doc.role("D")!.exposure).toBe(false);
    expect(doc.exposure()).toBe("X");
  });

  it("keeps exposure and outcome on different nodes", () => {
    const doc = fresh();
    doc.toggleRole("Y", "exposure");
    expect(doc.role("Y")!.exposure).toBe(true);
    expect(doc.role("Y")!.outcome).toBe(false);
    expect(doc.outcome()).toBeNull();
  });

  it("toggles a role off on the second application", () => {
    const doc = fresh();
    doc.toggleRole("D", "exposure");
    expect(doc.exposure()).toBeNull();
  });

  it("rejects marking a latent node adjusted, with an explanation", () => {
    const doc = fresh();
    doc.toggleRole("X", "latent");
    const outcome = doc.toggleAdjusted("X");
    expect(outcome).toEqual({
      ok: false,
      reason: "node 'X' is latent; only observed nodes can be adjusted for",
    });
    expect(doc.role("X")!.adjusted).toBe(false);
  });

  it("rejects marking an adjusted node latent", () => {
    const doc = fresh();
    doc.toggleAdjusted("X");
    expect(doc.toggleRole("X", "latent").ok).toBe(false);
  });

  it("collects adjusted nodes in sorted order", () => {
    const doc = fresh();
    doc.toggleAdjusted("X");
    doc.addNode("A");
    doc.toggleAdjusted("A");
    expect(doc.adjustedNodes()).toEqual(["A", "X"]);
  });
});

describe("instrument designation", () => {
  it("accepts observed and latent non-designated nodes", () => {
    const doc = fresh();
    expect(doc.setInstrument("X").ok).toBe(true);
    expect(doc.instrument).toBe("X");
    expect(doc.setInstrument(null).ok).toBe(true);
    expect(doc.instrument).toBeNull();
  });

  it("refuses the exposure and outcome nodes", () => {
    const doc = fresh();
    expect(doc.setInstrument("D").ok).toBe(false);
    expect(doc.setInstrument("Y").ok).toBe(false);
  });
});

describe("undo", () => {
  it("restores the previous state across edit kinds", () => {
    const doc = fresh();
    doc.addNode("M");
    doc.addEdge("D", "M");
    doc.toggleAdjusted("X");
    doc.setInstrument("M");
    expect(doc.undo()).toBe(true); // instrument
    expect(doc.instrument).toBeNull();
    expect(doc.undo()).toBe(true); // adjusted
    expect(doc.role("X")!.adjusted).toBe(false);
    expect(doc.undo()).toBe(true); // edge
    expect(doc.dagSource).not.toContain("D -> M");
    expect(doc.undo()).toBe(true); // node
    expect(doc.dagSource).toBe(TAB3A);
    expect(doc.undo()).toBe(false); // stack exhausted
  });

  it("supports at least 50 consecutive undos", () => {
    const doc = fresh();
    for (let i = 0; i < 50; i++) {
      expect(doc.addNode(`N${i}`).ok).toBe(true);
    }
    for (let i = 0; i < 50; i++) {
      expect(doc.undo()).toBe(true);
    }
    expect(doc.dagSource).toBe(TAB3A);
    expect(UNDO_DEPTH).toBeGreaterThanOrEqual(50);
  });

  it("restores layout and selection with the structure", () => {
    const doc = fresh();
    doc.layout.set("D", { x: 1, y: 2 });
    doc.selection.nodes.add("D");
    doc.addNode("M");
    doc.layout.set("M", { x: 9, y: 9 });
    doc.undo();
    expect(doc.layout.get("D")).toEqual({ x: 1, y: 2 });
    expect(doc.layout.has("M")).toBe(false);
    expect(doc.selection.nodes.has("D")).toBe(true);
  });
});

describe("cloning", () => {
  it("clones deeply enough that edits never leak back", () => {
    const doc = fresh();
    doc.layout.set("D", { x: 5, y: 5 });
    const copy = doc.clone();
    copy.addNode("M");
    copy.toggleAdjusted("X");
    copy.layout.set("D", { x: 99, y: 99 });
    expect(doc.dagSource).toBe(TAB3A);
    expect(doc.role("X")!.adjusted).toBe(false);
    expect(doc.layout.get("D")).toEqual({ x: 5, y: 5 });
  });
});
