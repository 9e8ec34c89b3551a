/**
 * Node placement: automatic layered layout plus the sidecar file format.
 *
 * Layout is presentation only.  It is persisted in a `.layout.json` file
 * next to the `.dag` file so the DSL files themselves stay tool-agnostic.
 */

import { DIRECTED, cmpName } from "./dsl.js";
import type { Graph } from "./dsl.js";
import type { Layout, LayoutPoint } from "./document.js";

export interface LayoutSidecar {
  nodes: Record<string, LayoutPoint>;
}

/** "model.dag" -> "model.layout.json"; other names just gain the suffix. */
export function sidecarPathFor(dagPath: string): string {
  return dagPath.replace(/\.dag$/, "") + ".layout.json";
}

export function layoutToJson(layout: Layout): string {
  const nodes: Record<string, LayoutPoint> = {};
  for (const name of Array.from(layout.keys()).sort(cmpName)) {
    const p = layout.get(name)!;
    nodes[name] = { x: Math.round(p.x * 100) / 100, y: Math.round(p.y * 100) / 100 };
  }
  return JSON.stringify({ nodes }, null, 2) + "\n";
}

export function layoutFromJson(text: string): Layout {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new Error(`layout sidecar is not valid JSON: ${err instanceof Error ? err.message : err}`);
  }
  if (typeof data !== "object" || data === null || !("nodes" in data)) {
    throw new Error("layout sidecar must be an object with a 'nodes' mapping");
  }
  const nodes = (data as { nodes: unknown }).nodes;
  if (typeof nodes !== "object" || nodes === null || Array.isArray(nodes)) {
    throw new Error("layout sidecar 'nodes' must map node names to {x, y}");
  }
  const layout: Layout = new Map();
  for (const [name, point] of Object.entries(nodes as Record<string, unknown>)) {
    if (
      typeof point !== "object" ||
      point === null ||
      typeof (point as { x: unknown }).x !== "number" ||
      typeof (point as { y: unknown }).y !== "number" ||
      !Number.isFinite((point as { x: number }).x) ||
      !Number.isFinite((point as { y: number }).y)
    ) {
      throw new Error(`layout sidecar entry for '${name}' must be {x: number, y: number}`);
    }
    layout.set(name, { x: (point as LayoutPoint).x, y: (point as LayoutPoint).y });
  }
  return layout;
}

/**
 * Deterministic layered placement.
 *
 * Nodes are ranked by longest directed path from a root, laid out in
 * columns left to right, and spread vertically within each column in name
 * order.  Bidirected edges do not affect ranking.
 */
export function autoLayout(graph: Graph, width = 960, height = 540): Layout {
  const names = Array.from(graph.nodes.keys()).sort(cmpName);
  const layout: Layout = new Map();
  if (names.length === 0) return layout;

  const rank = new Map<string, number>(names.map((n) => [n, 0]));
  const succ = new Map<string, string[]>(names.map((n) => [n, []]));
  const indeg = new Map<string, number>(names.map((n) => [n, 0]));
  for (const e of graph.edges) {
    if (e.kind !== DIRECTED) continue;
    succ.get(e.src)!.push(e.dst);
    indeg.set(e.dst, indeg.get(e.dst)! + 1);
  }
  // longest-path ranks via a topological sweep; the graph is acyclic
  const queue = names.filter((n) => indeg.get(n) === 0);
  while (queue.length > 0) {
    const v = queue.shift()!;
    for (const w of succ.get(v)!) {
      rank.set(w, Math.max(rank.get(w)!, rank.get(v)! + 1));
      indeg.set(w, indeg.get(w)! - 1);
      if (indeg.get(w) === 0) queue.push(w);
    }
  }

  const columns = new Map<number, string[]>();
  for (const n of names) {
    const r = rank.get(n)!;
    if (!columns.has(r)) columns.set(r, []);
    columns.get(r)!.push(n);
  }
  const ranks = Array.from(columns.keys()).sort((a, b) => a - b);
  const margin = 70;
  const innerW = Math.max(width - 2 * margin, 1);
  const innerH = Math.max(height - 2 * margin, 1);
  ranks.forEach((r, ci) => {
    const col = columns.get(r)!;
    const x = ranks.length === 1 ? width / 2 : margin + (innerW * ci) / (ranks.length - 1);
    col.forEach((n, ri) => {
      const y = col.length === 1 ? height / 2 : margin + (innerH * ri) / (col.length - 1);
      layout.set(n, { x: Math.round(x), y: Math.round(y) });
    });
  });
  return layout;
}

/** Keep existing positions, placing only nodes the layout does not know yet. */
export function completeLayout(graph: Graph, layout: Layout, width = 960, height = 540): Layout {
  const fresh = autoLayout(graph, width, height);
  const merged: Layout = new Map();
  for (const name of graph.nodes.keys()) {
    const have = layout.get(name);
    merged.set(name, have ? { ...have } : fresh.get(name)!);
  }
  return merged;
}
