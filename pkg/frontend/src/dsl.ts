/**
 * Text format for causal graphs.
 *
 * This is a line-for-line port of the service's reader and writer so that
 * documents edited in the browser serialize to exactly the bytes the
 * service would produce itself.  The grammar:
 *
 *     graph    = "dag" [ident] "{" {stmt} "}"
 *     stmt     = nodedecl | edgedecl
 *     nodedecl = "node" ident [attrs] ";"
 *     edgedecl = ident ("->" | "<->") ident [attrs] ";"
 *     attrs    = "[" attr {"," attr} "]"
 *     attr     = "latent" | "exposure" | "outcome" | "adjusted"
 *     ident    = bare identifier | quoted string
 *
 * Bare identifiers are ASCII [A-Za-z_][A-Za-z0-9_]*; quoted strings accept
 * any character with \" and \\ escapes.  "//" and "#" start comments
 * running to end of line.  "dag" and "node" are keywords at statement
 * heads, so nodes with those names must be quoted.  Edge mentions declare
 * nodes implicitly; a later node statement may add roles to an implicitly
 * created node, but two explicit declarations of the same name are an
 * error.
 *
 * Parsing is total: every input either yields a graph or throws ParseError
 * with a source span.  The parser here exists for instant feedback and for
 * loading files; every verdict shown in the UI still comes from the
 * service, never from local analysis.
 */

export const DIRECTED = "directed";
export const BIDIRECTED = "bidirected";
export type EdgeKind = typeof DIRECTED | typeof BIDIRECTED;

export const ROLE_NAMES = ["latent", "exposure", "outcome", "adjusted"] as const;
export type RoleName = (typeof ROLE_NAMES)[number];

export interface NodeRole {
  latent: boolean;
  exposure: boolean;
  outcome: boolean;
  adjusted: boolean;
}

export interface Edge {
  src: string;
  dst: string;
  kind: EdgeKind;
}

/** Parsed graph: node insertion order is first mention in the source. */
export interface Graph {
  name: string;
  nodes: Map<string, NodeRole>;
  edges: Edge[];
}

export interface SourceSpan {
  line: number;
  column: number;
  length: number;
}

export type ParseErrorKind = "lex" | "syntax" | "semantic";

export class ParseError extends Error {
  readonly code = "parse";
  readonly kind: ParseErrorKind;
  readonly span: SourceSpan;

  constructor(kind: ParseErrorKind, message: string, span: SourceSpan) {
    super(message);
    this.name = "ParseError";
    this.kind = kind;
    this.span = span;
  }
}

export interface ParseWarning {
  message: string;
  span: SourceSpan;
}

export interface ParseResult {
  graph: Graph;
  warnings: ParseWarning[];
}

export function emptyRole(): NodeRole {
  return { latent: false, exposure: false, outcome: false, adjusted: false };
}

export function roleAttrs(role: NodeRole): RoleName[] {
  // active flags in the fixed serialization order
  return ROLE_NAMES.filter((n) => role[n]);
}

/** Code-point string comparison, matching the service's sort order. */
export function cmpName(a: string, b: string): number {
  const pa = Array.from(a);
  const pb = Array.from(b);
  const n = Math.min(pa.length, pb.length);
  for (let i = 0; i < n; i++) {
    const ca = pa[i].codePointAt(0)!;
    const cb = pb[i].codePointAt(0)!;
    if (ca !== cb) return ca < cb ? -1 : 1;
  }
  return pa.length - pb.length;
}

export function edgeKey(e: Edge): string {
  return JSON.stringify([e.src, e.dst, e.kind]);
}

const KEYWORDS = ["dag", "node"];
const BARE = /[A-Za-z_][A-Za-z0-9_]*/y;

// -- lexer ----------------------------------------------------------------

type TokenType = "ident" | "string" | "punct" | "eof";

interface Token {
  type: TokenType;
  value: string;
  span: SourceSpan;
}

function lex(text: string): Token[] {
  const toks: Token[] = [];
  let i = 0;
  let line = 1;
  let col = 1;
  const n = text.length;

  const span = (length: number, l = line, c = col): SourceSpan => ({
    line: l,
    column: c,
    length,
  });

  while (i < n) {
    const ch = text[i];
    if (ch === "\n") {
      i += 1;
      line += 1;
      col = 1;
      continue;
    }
    if (ch === " " || ch === "\t" || ch === "\r") {
      i += 1;
      col += 1;
      continue;
    }
    if (ch === "#" || text.startsWith("//", i)) {
      while (i < n && text[i] !== "\n") {
        i += 1;
        col += 1;
      }
      continue;
    }
    if ("{}[];,".includes(ch)) {
      toks.push({ type: "punct", value: ch, span: span(1) });
      i += 1;
      col += 1;
      continue;
    }
    if (text.startsWith("->", i)) {
      toks.push({ type: "punct", value: "->", span: span(2) });
      i += 2;
      col += 2;
      continue;
    }
    if (text.startsWith("<->", i)) {
      toks.push({ type: "punct", value: "<->", span: span(3) });
      i += 3;
      col += 3;
      continue;
    }
    if (ch === '"') {
      const l0 = line;
      const c0 = col;
      let j = i + 1;
      const out: string[] = [];
      for (;;) {
        if (j >= n || text[j] === "\n") {
          throw new ParseError("lex", "unterminated string", span(j - i, l0, c0));
        }
        const c = text[j];
        if (c === '"') {
          j += 1;
          break;
        }
        if (c === "\\") {
          if (j + 1 >= n || (text[j + 1] !== '"' && text[j + 1] !== "\\")) {
            throw new ParseError("lex", "unknown escape in string", {
              line: l0,
              column: c0 + (j - i),
              length: 2,
            });
          }
          out.push(text[j + 1]);
          j += 2;
          continue;
        }
        out.push(c);
        j += 1;
      }
      toks.push({ type: "string", value: out.join(""), span: span(j - i, l0, c0) });
      col += j - i;
      i = j;
      continue;
    }
    BARE.lastIndex = i;
    const m = BARE.exec(text);
    if (m) {
      const word = m[0];
      toks.push({ type: "ident", value: word, span: span(word.length) });
      i += word.length;
      col += word.length;
      continue;
    }
    throw new ParseError("lex", `unexpected character '${ch}'`, span(1));
  }

  toks.push({ type: "eof", value: "", span: { line, column: col, length: 0 } });
  return toks;
}

// -- parser ---------------------------------------------------------------

class Parser {
  private toks: Token[];
  private pos = 0;
  private graphName = "";
  private warnings: ParseWarning[] = [];
  // declaration order, first mention wins
  private order: string[] = [];
  private roles = new Map<string, NodeRole>();
  private explicit = new Map<string, SourceSpan>();
  private edges = new Map<string, { edge: Edge; span: SourceSpan }>();

  constructor(text: string) {
    this.toks = lex(text);
  }

  private peek(ahead = 0): Token {
    return this.toks[Math.min(this.pos + ahead, this.toks.length - 1)];
  }

  private take(): Token {
    const t = this.toks[this.pos];
    if (t.type !== "eof") this.pos += 1;
    return t;
  }

  private fail(tok: Token, expected: string): never {
    const got = tok.type === "eof" ? "end of input" : `'${tok.value}'`;
    throw new ParseError("syntax", `expected ${expected}, found ${got}`, tok.span);
  }

  private expectPunct(value: string, what?: string): Token {
    const t = this.take();
    if (t.type !== "punct" || t.value !== value) {
      this.fail(t, what ?? `'${value}'`);
    }
    return t;
  }

  private nameToken(what: string): Token {
    const t = this.take();
    if (t.type !== "ident" && t.type !== "string") {
      this.fail(t, what);
    }
    if (t.type === "string" && t.value === "") {
      throw new ParseError("semantic", "empty node name", t.span);
    }
    return t;
  }

  graph(): ParseResult {
    let t = this.take();
    if (!(t.type === "ident" && t.value === "dag")) {
      this.fail(t, "keyword 'dag'");
    }
    const next = this.peek();
    if (next.type === "string" || (next.type === "ident" && !KEYWORDS.includes(next.value))) {
      this.graphName = this.take().value;
    } else if (next.type === "ident" && KEYWORDS.includes(next.value)) {
      throw new ParseError("syntax", `graph name '${next.value}' must be quoted`, next.span);
    }
    this.expectPunct("{", "'{' after graph name");
    for (;;) {
      const s = this.peek();
      if (s.type === "punct" && s.value === "}") {
        this.take();
        break;
      }
      if (s.type === "eof") {
        this.fail(s, "a statement or '}'");
      }
      this.stmt();
    }
    t = this.take();
    if (t.type !== "eof") {
      this.fail(t, "end of input after '}'");
    }
    return this.finish();
  }

  private stmt(): void {
    const t = this.peek();
    if (t.type === "ident" && t.value === "node") {
      this.take();
      this.nodedecl();
      return;
    }
    if (t.type === "ident" && t.value === "dag") {
      throw new ParseError(
        "syntax",
        "keyword 'dag' cannot start a statement; quote the name",
        t.span,
      );
    }
    this.edgedecl();
  }

  private nodedecl(): void {
    const t = this.nameToken("a node name after 'node'");
    const name = t.value;
    const [attrs, attrSpan] = this.maybeAttrs();
    this.expectPunct(";", "';' after node declaration");
    if (this.explicit.has(name)) {
      throw new ParseError("semantic", `node '${name}' declared twice`, t.span);
    }
    this.declare(name);
    this.explicit.set(name, t.span);
    if (attrs.length > 0) {
      const role = emptyRole();
      for (const a of attrs) role[a] = true;
      if (role.latent && role.adjusted) {
        throw new ParseError(
          "semantic",
          `node '${name}' cannot be both latent and adjusted`,
          attrSpan!,
        );
      }
      this.roles.set(name, role);
    }
  }

  private edgedecl(): void {
    const t0 = this.nameToken("a statement");
    const t = this.take();
    if (t.type !== "punct" || (t.value !== "->" && t.value !== "<->")) {
      this.fail(t, "'->' or '<->'");
    }
    const kind: EdgeKind = t.value === "->" ? DIRECTED : BIDIRECTED;
    const t1 = this.nameToken(`a node name after '${t.value}'`);
    const [attrs, attrSpan] = this.maybeAttrs();
    if (attrs.length > 0) {
      throw new ParseError("semantic", "attributes are not allowed on edges", attrSpan!);
    }
    this.expectPunct(";", "';' after edge declaration");
    let src = t0.value;
    let dst = t1.value;
    if (src === dst) {
      throw new ParseError("semantic", `self loop on '${src}'`, t0.span);
    }
    this.declare(src);
    this.declare(dst);
    if (kind === BIDIRECTED && cmpName(dst, src) < 0) {
      [src, dst] = [dst, src];
    }
    const key = edgeKey({ src, dst, kind });
    if (this.edges.has(key)) {
      const arrow = kind === DIRECTED ? "->" : "<->";
      this.warnings.push({
        message: `duplicate edge ${src} ${arrow} ${dst} ignored`,
        span: t0.span,
      });
      return;
    }
    this.edges.set(key, { edge: { src, dst, kind }, span: t0.span });
  }

  private maybeAttrs(): [RoleName[], SourceSpan | null] {
    const t = this.peek();
    if (!(t.type === "punct" && t.value === "[")) {
      return [[], null];
    }
    const openSpan = this.take().span;
    const attrs: RoleName[] = [];
    for (;;) {
      const a = this.take();
      if (a.type !== "ident") {
        this.fail(a, "an attribute name");
      }
      if (!(ROLE_NAMES as readonly string[]).includes(a.value)) {
        throw new ParseError("semantic", `unknown attribute '${a.value}'`, a.span);
      }
      attrs.push(a.value as RoleName);
      const sep = this.take();
      if (sep.type === "punct" && sep.value === "]") break;
      if (!(sep.type === "punct" && sep.value === ",")) {
        this.fail(sep, "',' or ']'");
      }
    }
    return [attrs, openSpan];
  }

  private declare(name: string): void {
    if (!this.roles.has(name)) {
      this.roles.set(name, emptyRole());
      this.order.push(name);
    }
  }

  private finish(): ParseResult {
    const edges = Array.from(this.edges.values(), (v) => v.edge);
    const cycle = findDirectedCycle(this.order, edges);
    if (cycle !== null) {
      const first = edgeKey({ src: cycle[0], dst: cycle[1], kind: DIRECTED });
      const span = this.edges.get(first)?.span ?? { line: 1, column: 1, length: 1 };
      throw new ParseError("semantic", `directed cycle: ${cycle.join(" -> ")}`, span);
    }
    const nodes = new Map<string, NodeRole>();
    for (const v of this.order) {
      nodes.set(v, this.roles.get(v)!);
    }
    return {
      graph: { name: this.graphName, nodes, edges },
      warnings: this.warnings,
    };
  }
}

/**
 * Find a directed cycle, or null when the directed part is acyclic.
 *
 * Returns the cycle as a closed node list, e.g. ["A", "B", "A"], starting
 * from the smallest node name on the cycle so the result is deterministic.
 */
export function findDirectedCycle(nodes: Iterable<string>, edges: Edge[]): string[] | null {
  const succ = new Map<string, string[]>();
  const indeg = new Map<string, number>();
  for (const v of nodes) {
    succ.set(v, []);
    indeg.set(v, 0);
  }
  for (const e of edges) {
    if (e.kind !== DIRECTED) continue;
    succ.get(e.src)!.push(e.dst);
    indeg.set(e.dst, (indeg.get(e.dst) ?? 0) + 1);
  }
  const queue = Array.from(indeg.entries())
    .filter(([, d]) => d === 0)
    .map(([v]) => v);
  let seen = 0;
  while (queue.length > 0) {
    const v = queue.pop()!;
    seen += 1;
    for (const w of succ.get(v) ?? []) {
      const d = indeg.get(w)! - 1;
      indeg.set(w, d);
      if (d === 0) queue.push(w);
    }
  }
  if (seen === indeg.size) return null;

  // every remaining node sits on or upstream of a cycle; walk successors
  // with positive in-degree until a node repeats
  const onCycle = new Set(
    Array.from(indeg.entries())
      .filter(([, d]) => d > 0)
      .map(([v]) => v),
  );
  const start = Array.from(onCycle).sort(cmpName)[0];
  const path: string[] = [];
  const where = new Map<string, number>();
  let v = start;
  for (;;) {
    const at = where.get(v);
    if (at !== undefined) {
      const loop = path.slice(at);
      // rotate so the smallest name on the cycle leads
      let k = 0;
      for (let i = 1; i < loop.length; i++) {
        if (cmpName(loop[i], loop[k]) < 0) k = i;
      }
      const rotated = loop.slice(k).concat(loop.slice(0, k));
      rotated.push(rotated[0]);
      return rotated;
    }
    where.set(v, path.length);
    path.push(v);
    v = (succ.get(v) ?? []).filter((w) => onCycle.has(w)).sort(cmpName)[0];
  }
}

/** Parse, returning the graph plus any warnings. */
export function parseSource(text: string): ParseResult {
  if (typeof text !== "string") {
    throw new ParseError("lex", "input must be text", { line: 1, column: 1, length: 0 });
  }
  return new Parser(text).graph();
}

/** Parse, discarding warnings. */
export function parse(text: string): Graph {
  return parseSource(text).graph;
}

// -- serializer -------------------------------------------------------------

const BARE_FULL = /^[A-Za-z_][A-Za-z0-9_]*$/;

function renderName(name: string): string {
  if (BARE_FULL.test(name) && !KEYWORDS.includes(name)) {
    return name;
  }
  return '"' + name.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}

/**
 * Canonical text form: nodes sorted, then edges sorted, LF endings.
 *
 * Byte-identical to the service's own serializer, so a document exported
 * here and re-imported there analyses the same, and corpus files are fixed
 * points.
 */
export function serialize(g: Graph): string {
  const lines: string[] = [];
  let head = "dag";
  if (g.name) {
    head += " " + renderName(g.name);
  }
  lines.push(head + " {");
  for (const v of Array.from(g.nodes.keys()).sort(cmpName)) {
    const attrs = roleAttrs(g.nodes.get(v)!);
    const suffix = attrs.length > 0 ? ` [${attrs.join(", ")}]` : "";
    lines.push(`  node ${renderName(v)}${suffix};`);
  }
  const edges = [...g.edges].sort(
    (a, b) => cmpName(a.src, b.src) || cmpName(a.dst, b.dst) || cmpName(a.kind, b.kind),
  );
  for (const e of edges) {
    const arrow = e.kind === DIRECTED ? "->" : "<->";
    lines.push(`  ${renderName(e.src)} ${arrow} ${renderName(e.dst)};`);
  }
  lines.push("}");
  return lines.join("\n") + "\n";
}
