import { describe, expect, it } from "vitest";

import { parse, edgeKey } from "../src/dsl.js";
import { autoLayout, completeLayout, layoutFromJson, layoutToJson, sidecarPathFor } from "../src/layout.js";
import { pathHighlight, renderSvg } from "../src/render.js";

const SOURCE = [
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

describe("autoLayout", () => {
  it("places every node inside the viewport", () => {
    const graph = parse(SOURCE);
    const layout = autoLayout(graph, 960, 540);
    expect(layout.size).toBe(3);
    for (const p of layout.values()) {
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(960);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(540);
    }
  });

  it("ranks along directed edges so sources sit left of sinks", () => {
    const graph = parse("dag chain { A -> B; B -> C; }");
    const layout = autoLayout(graph);
    expect(layout.get("A")!.x).toBeLessThan(layout.get("B")!.x);
    expect(layout.get("B")!.x).toBeLessThan(layout.get("C")!.x);
  });

  it("is deterministic", () => {
    const graph = parse(SOURCE);
    expect(autoLayout(graph)).toEqual(autoLayout(graph));
  });

  it("completeLayout keeps existing positions and places new nodes", () => {
    const graph = parse(SOURCE);
    const partial = new Map([["D", { x: 11, y: 22 }]]);
    const full = completeLayout(graph, partial);
    expect(full.get("D")).toEqual({ x: 11, y: 22 });
    expect(full.size).toBe(3);
  });
});

describe("layout sidecar", () => {
  it("derives the sidecar path from the dag path", () => {
    expect(sidecarPathFor("models/tab3A.dag")).toBe("models/tab3A.layout.json");
    expect(sidecarPathFor("plain")).toBe("plain.layout.json");
  });

  it("round-trips through JSON", () => {
    const layout = new Map([
      ["A", { x: 10, y: 20 }],
      ["B", { x: 30.5, y: 40.25 }],
    ]);
    const text = layoutToJson(layout);
    expect(text.endsWith("\n")).toBe(true);
    expect(layoutFromJson(text)).toEqual(layout);
  });

  it("rejects malformed sidecars with a reason", () => {
    expect(() => layoutFromJson("not json")).toThrow(/not valid JSON/);
    expect(() => layoutFromJson("{}")).toThrow(/nodes/);
    expect(() => layoutFromJson('{"nodes": {"A": {"x": 1}}}')).toThrow(/'A'/);
    expect(() => layoutFromJson('{"nodes": {"A": {"x": 1, "y": "two"}}}')).toThrow(/'A'/);
  });
});

describe("renderSvg", () => {
  const graph = parse(SOURCE);
  const layout = autoLayout(graph);

  it("draws every node label and edge", () => {
    const svg = renderSvg(graph, layout);
    for (const name of ["D", "X", "Y"]) {
      expect(svg).toContain(`data-node="${name}"`);
      expect(svg).toContain(`>${name}</text>`);
    }
    expect(svg).toContain('marker-end="url(#arrow)"');
    expect((svg.match(/class="edge directed"/g) ?? []).length).toBe(3);
  });

  it("marks roles, selection, and the instrument with classes", () => {
    const svg = renderSvg(graph, layout, {
      selection: { nodes: new Set(["D"]), edges: new Set() },
      instrument: "X",
    });
    expect(svg).toMatch(/class="node exposure selected"[^>]*data-node="D"/);
    expect(svg).toMatch(/class="node instrument"[^>]*data-node="X"/);
    expect(svg).toContain(">instrument</text>");
  });

  it("renders bidirected edges as dashed arcs with two arrowheads", () => {
    const g = parse("dag t { A <-> B; }");
    const svg = renderSvg(g, autoLayout(g));
    expect(svg).toContain('class="edge bidirected"');
    expect(svg).toContain('marker-start="url(#arrow-rev)"');
  });

  it("highlights a witness path's nodes and edges", () => {
    // witness D <- X -> Y as the service reports it
    const keys = pathHighlight(["D", "X", "Y"], ["backward", "forward"]);
    expect(keys.has("D")).toBe(true);
    expect(keys.has(edgeKey({ src: "X", dst: "D", kind: "directed" }))).toBe(true);
    expect(keys.has(edgeKey({ src: "X", dst: "Y", kind: "directed" }))).toBe(true);
    const svg = renderSvg(graph, layout, { highlight: keys });
    expect((svg.match(/class="edge directed hl"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="node[^"]*\bhl\b[^"]*"/g) ?? []).length).toBe(3);
  });

  it("maps bidirected steps in a witness onto the stored edge key", () => {
    const keys = pathHighlight(["B", "A"], ["bidirected"]);
    expect(keys.has(edgeKey({ src: "A", dst: "B", kind: "bidirected" }))).toBe(true);
  });

  it("flashes a would-be cycle", () => {
    const g = parse("dag t { A -> B; B -> C; }");
    const svg = renderSvg(g, autoLayout(g), { cycleFlash: ["A", "B", "C", "A"] });
    expect((svg.match(/class="edge directed cycle"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="node cycle"/g) ?? []).length).toBe(3);
  });

  it("escapes markup in node names", () => {
    const g = parse('dag t { "a<b" -> C; }');
    const layoutG = autoLayout(g);
    const svg = renderSvg(g, layoutG);
    expect(svg).toContain("a&lt;b");
    expect(svg).not.toContain("<b\"");
  });
});
