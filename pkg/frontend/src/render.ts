/**
 * Canvas rendering: a causal graph plus layout to an SVG element string.
 *
 * Pure string construction, so tests can assert on the markup without a
 * DOM.  The app mounts the string and attaches event handlers through the
 * data-node/data-edge attributes on the element groups.
 */

import { DIRECTED, cmpName, edgeKey, roleAttrs } from "./dsl.js";
import type { Edge, Graph } from "./dsl.js";
import type { Layout, Selection } from "./document.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  selection?: Selection;
  /** Node names and edge keys to emphasize, e.g. a hovered witness path. */
  highlight?: Set<string>;
  /** Closed node list of a rejected edit's would-be cycle, flashed in red. */
  cycleFlash?: string[];
  instrument?: string | null;
}

export const NODE_RADIUS = 26;

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Keys for highlighting every node and edge along a witness path. */
export function pathHighlight(nodes: string[], arrows: string[]): Set<string> {
  const keys = new Set<string>(nodes);
  for (let i = 0; i < arrows.length; i++) {
    const a = nodes[i];
    const b = nodes[i + 1];
    if (arrows[i] === "forward") {
      keys.add(edgeKey({ src: a, dst: b, kind: "directed" }));
    } else if (arrows[i] === "backward") {
      keys.add(edgeKey({ src: b, dst: a, kind: "directed" }));
    } else {
      const [lo, hi] = cmpName(a, b) < 0 ? [a, b] : [b, a];
      keys.add(edgeKey({ src: lo, dst: hi, kind: "bidirected" }));
    }
  }
  return keys;
}

function edgeLine(e: Edge, layout: Layout): string | null {
  const p = layout.get(e.src);
  const q = layout.get(e.dst);
  if (!p || !q) return null;
  const dx = q.x - p.x;
  const dy = q.y - p.y;
  const len = Math.hypot(dx, dy) || 1;
  // stop at the node border so arrowheads stay visible
  const pad = NODE_RADIUS + 3;
  const x1 = p.x + (dx / len) * pad;
  const y1 = p.y + (dy / len) * pad;
  const x2 = q.x - (dx / len) * pad;
  const y2 = q.y - (dy / len) * pad;
  if (e.kind === DIRECTED) {
    return `<line x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" marker-end="url(#arrow)"/>`;
  }
  // bidirected: a shallow arc with arrowheads on both ends
  const mx = (x1 + x2) / 2 - (dy / len) * 24;
  const my = (y1 + y2) / 2 + (dx / len) * 24;
  return `<path d="M ${x1.toFixed(1)} ${y1.toFixed(1)} Q ${mx.toFixed(1)} ${my.toFixed(1)} ${x2.toFixed(1)} ${y2.toFixed(1)}" marker-start="url(#arrow-rev)" marker-end="url(#arrow)"/>`;
}

export function renderSvg(graph: Graph, layout: Layout, opts: RenderOptions = {}): string {
  const width = opts.width ?? 960;
  const height = opts.height ?? 540;
  const highlight = opts.highlight ?? new Set<string>();
  const cycle = new Set(opts.cycleFlash ?? []);
  const selection = opts.selection ?? { nodes: new Set<string>(), edges: new Set<string>() };

  const parts: string[] = [];
  parts.push(
    `<svg class="canvas" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );
  parts.push(
    `<defs>` +
      `<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z"/></marker>` +
      `<marker id="arrow-rev" viewBox="0 0 10 10" refX="1" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M 10 0 L 0 5 L 10 10 z"/></marker>` +
      `</defs>`,
  );

  for (const e of graph.edges) {
    const key = edgeKey(e);
    const classes = ["edge", e.kind];
    if (selection.edges.has(key)) classes.push("selected");
    if (highlight.has(key)) classes.push("hl");
    if (cycle.size > 0 && e.kind === DIRECTED && cycle.has(e.src) && cycle.has(e.dst)) {
      classes.push("cycle");
    }
    const line = edgeLine(e, layout);
    if (line === null) continue;
    parts.push(
      `<g class="${classes.join(" ")}" data-edge="${escapeXml(key)}">${line}</g>`,
    );
  }

  for (const [name, role] of graph.nodes) {
    const p = layout.get(name);
    if (!p) continue;
    const classes = ["node", ...roleAttrs(role)];
    if (selection.nodes.has(name)) classes.push("selected");
    if (highlight.has(name)) classes.push("hl");
    if (cycle.has(name)) classes.push("cycle");
    if (opts.instrument === name) classes.push("instrument");
    const chips: string[] = [];
    if (role.exposure) chips.push("exposure");
    if (role.outcome) chips.push("outcome");
    if (role.latent) chips.push("latent");
    if (role.adjusted) chips.push("adjusted");
    if (opts.instrument === name) chips.push("instrument");
    const chipText = chips.length > 0 ? chips.join(", ") : "";
    parts.push(
      `<g class="${classes.join(" ")}" data-node="${escapeXml(name)}">` +
        `<circle cx="${p.x}" cy="${p.y}" r="${NODE_RADIUS}"/>` +
        `<text class="label" x="${p.x}" y="${p.y + 5}" text-anchor="middle">${escapeXml(name)}</text>` +
        (chipText
          ? `<text class="chips" x="${p.x}" y="${p.y + NODE_RADIUS + 14}" text-anchor="middle">${escapeXml(chipText)}</text>`
          : "") +
        `</g>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n");
}
