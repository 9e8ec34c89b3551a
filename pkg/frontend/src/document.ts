/**
 * Editable canvas document: one DAG plus presentation state.
 *
 * The DAG source is the single source of truth and is regenerated through
 * the canonical serializer after every successful edit, so the document
 * text always parses and always matches what the service would emit for
 * the same structure.  Layout, selection, and the instrument designation
 * are presentation state and never affect analysis requests beyond the
 * parameters they obviously feed (adjusted marks become conditioning sets,
 * the instrument feeds the IV panel).
 */

import {
  BIDIRECTED,
  DIRECTED,
  cmpName,
  edgeKey,
  emptyRole,
  findDirectedCycle,
  parseSource,
  serialize,
} from "./dsl.js";
import type { Edge, EdgeKind, Graph, NodeRole, RoleName, SourceSpan } from "./dsl.js";

export interface LayoutPoint {
  x: number;
  y: number;
}

export type Layout = Map<string, LayoutPoint>;

export interface Selection {
  nodes: Set<string>;
  edges: Set<string>;
}

export interface InvalidMark {
  message: string;
  kind: string;
  span: SourceSpan | null;
}

/** Result of an edit attempt; rejected edits leave the document unchanged. */
export type EditOutcome =
  | { ok: true }
  | { ok: false; reason: string; cycle?: string[] };

interface Snapshot {
  dagSource: string;
  layout: [string, LayoutPoint][];
  selectionNodes: string[];
  selectionEdges: string[];
  instrument: string | null;
  dirty: boolean;
}

export const UNDO_DEPTH = 100;

const ok: EditOutcome = { ok: true };

function reject(reason: string, cycle?: string[]): EditOutcome {
  return cycle ? { ok: false, reason, cycle } : { ok: false, reason };
}

export class CanvasDocument {
  dagSource: string;
  /** Parsed structure; null while the document is flagged invalid. */
  graph: Graph | null;
  /** Set when dagSource does not parse; cleared by the next good load or edit. */
  invalid: InvalidMark | null = null;
  layout: Layout = new Map();
  selection: Selection = { nodes: new Set(), edges: new Set() };
  dirty = false;
  /** UI designation for the IV panel; not part of the DSL. */
  instrument: string | null = null;

  private undoStack: Snapshot[] = [];

  constructor(dagSource = "dag {\n}\n") {
    const parsed = parseSource(dagSource);
    this.graph = parsed.graph;
    this.dagSource = serialize(parsed.graph);
  }

  // -- queries ----------------------------------------------------------------

  nodeNames(): string[] {
    return this.graph ? Array.from(this.graph.nodes.keys()).sort(cmpName) : [];
  }

  role(name: string): NodeRole | null {
    return this.graph?.nodes.get(name) ?? null;
  }

  exposure(): string | null {
    return this.findRole("exposure");
  }

  outcome(): string | null {
    return this.findRole("outcome");
  }

  /** Observed nodes currently marked adjusted, sorted; feeds conditioning sets. */
  adjustedNodes(): string[] {
    if (!this.graph) return [];
    return Array.from(this.graph.nodes.entries())
      .filter(([, r]) => r.adjusted)
      .map(([n]) => n)
      .sort(cmpName);
  }

  undoDepth(): number {
    return this.undoStack.length;
  }

  private findRole(flag: "exposure" | "outcome"): string | null {
    if (!this.graph) return null;
    for (const [n, r] of this.graph.nodes) {
      if (r[flag]) return n;
    }
    return null;
  }

  // -- loading ------------------------------------------------------------------

  /**
   * Replace the document from raw text, e.g. a file or the source editor.
   *
   * On success the source is re-serialized to canonical form and layout
   * entries for surviving nodes are kept.  On failure the raw text is kept
   * so the user can fix it, the document is flagged invalid, and the
   * previous structure is preserved only through undo.
   */
  loadSource(text: string): EditOutcome {
    let parsed;
    try {
      parsed = parseSource(text);
    } catch (err) {
      if (err instanceof Error && "span" in err && "kind" in err) {
        this.pushSnapshot();
        this.dagSource = text;
        this.graph = null;
        this.invalid = {
          message: err.message,
          kind: String((err as { kind: unknown }).kind),
          span: (err as { span: SourceSpan | null }).span,
        };
        this.dirty = true;
        return reject(err.message);
      }
      throw err;
    }
    this.pushSnapshot();
    this.graph = parsed.graph;
    this.dagSource = serialize(parsed.graph);
    this.invalid = null;
    this.pruneLayout();
    this.pruneSelection();
    if (this.instrument !== null && !parsed.graph.nodes.has(this.instrument)) {
      this.instrument = null;
    }
    this.dirty = true;
    return ok;
  }

  /** Flag the document invalid from a service-side parse error. */
  markInvalid(message: string, kind: string, span: SourceSpan | null): void {
    this.invalid = { message, kind, span };
    this.graph = null;
  }

  // -- edit actions ---------------------------------------------------------------

  addNode(name: string, roles: RoleName[] = []): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    if (name === "") return reject("node name cannot be empty");
    if (this.graph.nodes.has(name)) return reject(`node '${name}' already exists`);
    const role = emptyRole();
    for (const r of roles) role[r] = true;
    if (role.latent && role.adjusted) {
      return reject(`node '${name}' cannot be both latent and adjusted`);
    }
    this.pushSnapshot();
    this.graph.nodes.set(name, role);
    if (role.exposure) this.clearFlagExcept("exposure", name);
    if (role.outcome) this.clearFlagExcept("outcome", name);
    this.commitStructure();
    return ok;
  }

  /**
   * Add an edge, refusing one that would close a directed cycle.
   *
   * The rejection carries the would-be cycle as a closed node list so the
   * canvas can flash it.
   */
  addEdge(src: string, dst: string, kind: EdgeKind = DIRECTED): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    if (!this.graph.nodes.has(src)) return reject(`node '${src}' does not exist`);
    if (!this.graph.nodes.has(dst)) return reject(`node '${dst}' does not exist`);
    if (src === dst) return reject(`self loop on '${src}'`);
    let a = src;
    let b = dst;
    if (kind === BIDIRECTED && cmpName(b, a) < 0) {
      [a, b] = [b, a];
    }
    const key = edgeKey({ src: a, dst: b, kind });
    if (this.graph.edges.some((e) => edgeKey(e) === key)) {
      return reject(`edge ${a} ${kind === DIRECTED ? "->" : "<->"} ${b} already exists`);
    }
    if (kind === DIRECTED) {
      const preview = [...this.graph.edges, { src: a, dst: b, kind }];
      const cycle = findDirectedCycle(this.graph.nodes.keys(), preview);
      if (cycle !== null) {
        return reject(`adding ${a} -> ${b} would create a directed cycle`, cycle);
      }
    }
    this.pushSnapshot();
    this.graph.edges.push({ src: a, dst: b, kind });
    this.commitStructure();
    return ok;
  }

  /**
   * Toggle latent, exposure, or outcome on a node.
   *
   * Exposure and outcome are single-pair designations: setting one clears
   * it from every other node, and a node never holds both at once.
   */
  toggleRole(name: string, role: "latent" | "exposure" | "outcome"): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    const r = this.graph.nodes.get(name);
    if (!r) return reject(`node '${name}' does not exist`);
    if (role === "latent" && !r.latent && r.adjusted) {
      return reject(`node '${name}' is adjusted; latent nodes cannot be adjusted`);
    }
    this.pushSnapshot();
    if (r[role]) {
      r[role] = false;
    } else {
      r[role] = true;
      if (role === "exposure") {
        this.clearFlagExcept("exposure", name);
        r.outcome = false;
      } else if (role === "outcome") {
        this.clearFlagExcept("outcome", name);
        r.exposure = false;
      }
    }
    this.commitStructure();
    return ok;
  }

  /** Toggle the adjusted mark; latent nodes are unobserved and cannot carry it. */
  toggleAdjusted(name: string): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    const r = this.graph.nodes.get(name);
    if (!r) return reject(`node '${name}' does not exist`);
    if (!r.adjusted && r.latent) {
      return reject(
        `node '${name}' is latent; only observed nodes can be adjusted for`,
      );
    }
    this.pushSnapshot();
    r.adjusted = !r.adjusted;
    this.commitStructure();
    return ok;
  }

  deleteNode(name: string): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    if (!this.graph.nodes.has(name)) return reject(`node '${name}' does not exist`);
    this.pushSnapshot();
    this.graph.nodes.delete(name);
    this.graph.edges = this.graph.edges.filter((e) => e.src !== name && e.dst !== name);
    if (this.instrument === name) this.instrument = null;
    this.commitStructure();
    return ok;
  }

  deleteEdge(src: string, dst: string, kind: EdgeKind = DIRECTED): EditOutcome {
    if (!this.graph) return reject("document has a parse error; fix the source first");
    let a = src;
    let b = dst;
    if (kind === BIDIRECTED && cmpName(b, a) < 0) {
      [a, b] = [b, a];
    }
    const key = edgeKey({ src: a, dst: b, kind });
    const at = this.graph.edges.findIndex((e) => edgeKey(e) === key);
    if (at < 0) {
      return reject(`edge ${a} ${kind === DIRECTED ? "->" : "<->"} ${b} does not exist`);
    }
    this.pushSnapshot();
    this.graph.edges.splice(at, 1);
    this.commitStructure();
    return ok;
  }

  /** Mark or clear the node whose exogeneity the IV panel should check. */
  setInstrument(name: string | null): EditOutcome {
    if (name !== null) {
      if (!this.graph) return reject("document has a parse error; fix the source first");
      if (!this.graph.nodes.has(name)) return reject(`node '${name}' does not exist`);
      const r = this.graph.nodes.get(name)!;
      if (r.exposure || r.outcome) {
        return reject(`node '${name}' is the ${r.exposure ? "exposure" : "outcome"}; pick another instrument`);
      }
    }
    if (name === this.instrument) return ok;
    this.pushSnapshot();
    this.instrument = name;
    this.dirty = true;
    return ok;
  }

  undo(): boolean {
    const snap = this.undoStack.pop();
    if (!snap) return false;
    this.restore(snap);
    return true;
  }

  // -- cloning (what-if previews edit a copy) -------------------------------------

  clone(): CanvasDocument {
    const copy = new CanvasDocument("dag {\n}\n");
    copy.dagSource = this.dagSource;
    copy.graph = this.graph ? cloneGraph(this.graph) : null;
    copy.invalid = this.invalid ? { ...this.invalid, span: this.invalid.span } : null;
    copy.layout = new Map(Array.from(this.layout, ([k, p]) => [k, { ...p }]));
    copy.selection = {
      nodes: new Set(this.selection.nodes),
      edges: new Set(this.selection.edges),
    };
    copy.dirty = this.dirty;
    copy.instrument = this.instrument;
    return copy;
  }

  // -- internals --------------------------------------------------------------------

  private clearFlagExcept(flag: "exposure" | "outcome", keep: string): void {
    for (const [n, r] of this.graph!.nodes) {
      if (n !== keep) r[flag] = false;
    }
  }

  private commitStructure(): void {
    this.dagSource = serialize(this.graph!);
    this.invalid = null;
    this.pruneLayout();
    this.pruneSelection();
    this.dirty = true;
  }

  private pruneLayout(): void {
    if (!this.graph) return;
    for (const name of Array.from(this.layout.keys())) {
      if (!this.graph.nodes.has(name)) this.layout.delete(name);
    }
  }

  private pruneSelection(): void {
    if (!this.graph) return;
    for (const name of Array.from(this.selection.nodes)) {
      if (!this.graph.nodes.has(name)) this.selection.nodes.delete(name);
    }
    const live = new Set(this.graph.edges.map(edgeKey));
    for (const key of Array.from(this.selection.edges)) {
      if (!live.has(key)) this.selection.edges.delete(key);
    }
  }

  private pushSnapshot(): void {
    this.undoStack.push({
      dagSource: this.dagSource,
      layout: Array.from(this.layout, ([k, p]) => [k, { ...p }] as [string, LayoutPoint]),
      selectionNodes: Array.from(this.selection.nodes),
      selectionEdges: Array.from(this.selection.edges),
      instrument: this.instrument,
      dirty: this.dirty,
    });
    if (this.undoStack.length > UNDO_DEPTH) {
      this.undoStack.shift();
    }
  }

  private restore(snap: Snapshot): void {
    this.dagSource = snap.dagSource;
    try {
      this.graph = parseSource(snap.dagSource).graph;
      this.invalid = null;
    } catch (err) {
      // the snapshot was itself an invalid raw-text state
      this.graph = null;
      this.invalid = {
        message: err instanceof Error ? err.message : String(err),
        kind: err instanceof Error && "kind" in err ? String((err as { kind: unknown }).kind) : "syntax",
        span: err instanceof Error && "span" in err ? (err as { span: SourceSpan | null }).span : null,
      };
    }
    this.layout = new Map(snap.layout.map(([k, p]) => [k, { ...p }]));
    this.selection = {
      nodes: new Set(snap.selectionNodes),
      edges: new Set(snap.selectionEdges),
    };
    this.instrument = snap.instrument;
    this.dirty = snap.dirty;
  }
}

function cloneGraph(g: Graph): Graph {
  const nodes = new Map<string, NodeRole>();
  for (const [n, r] of g.nodes) nodes.set(n, { ...r });
  return { name: g.name, nodes, edges: g.edges.map((e): Edge => ({ ...e })) };
}
