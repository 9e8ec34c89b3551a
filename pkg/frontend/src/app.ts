/**
 * Browser entry point: wires the document model, the analysis controller,
 * and the what-if comparison to the page.
 *
 * All identification content on screen comes from service responses held
 * in panel state; this file only routes events and mounts rendered
 * strings.
 */

import { AnalysisController } from "./analysis.js";
import type { AnalysisSnapshot } from "./analysis.js";
import { ServiceClient, ServiceUnreachable } from "./api.js";
import type { CorpusListingEntry, ReportEnvelope, CorpusListingReport, ServiceErrorBody, ParseReport } from "./api.js";
import { CanvasDocument } from "./document.js";
import { BIDIRECTED, DIRECTED } from "./dsl.js";
import type { EdgeKind } from "./dsl.js";
import { autoLayout, completeLayout, layoutFromJson, layoutToJson, sidecarPathFor } from "./layout.js";
import {
  adjustmentPanelHtml,
  implicationsPanelHtml,
  ivPanelHtml,
  parsePanelHtml,
  pathsPanelHtml,
  whatIfPanelHtml,
} from "./panels.js";
import { pathHighlight, renderSvg } from "./render.js";
import { applyHypothetical, computeDelta, deltaSide, isEmptyDelta } from "./whatif.js";
import type { WhatIfEdit } from "./whatif.js";

const SAMPLE = [
  "dag sample {",
  "  node D [exposure];",
  "  node X;",
  "  node Y [outcome];",
  "  D -> Y;",
  "  X -> D;",
  "  X -> Y;",
  "}",
  "",
].join("\n");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function serviceBase(): string {
  const fromWindow = (window as { EGP_BASE_URL?: string }).EGP_BASE_URL;
  if (fromWindow) return fromWindow;
  const meta = document.querySelector('meta[name="egp-service"]');
  return meta?.getAttribute("content") ?? "http://127.0.0.1:8321";
}

type Mode = "select" | "add-edge" | "add-bidirected";

const client = new ServiceClient(serviceBase());
const controller = new AnalysisController(client);

let doc = new CanvasDocument(SAMPLE);
doc.layout = autoLayout(doc.graph!);
let mode: Mode = "select";
let pendingEdgeSrc: string | null = null;
let hoverHighlight: Set<string> | null = null;
let cycleFlash: string[] | null = null;
let cycleTimer: ReturnType<typeof setTimeout> | null = null;

interface WhatIfState {
  edits: WhatIfEdit[];
  doc: CanvasDocument;
  base: AnalysisSnapshot | null;
  edited: AnalysisSnapshot | null;
}
let whatIf: WhatIfState | null = null;

const canvasHost = el<HTMLDivElement>("canvas-host");
const panelsHost = el<HTMLElement>("panels");
const banner = el<HTMLDivElement>("banner");
const statusLine = el<HTMLDivElement>("status");
const source = el<HTMLTextAreaElement>("source");
const sourceError = el<HTMLSpanElement>("source-error");
const corpusSelect = el<HTMLSelectElement>("corpus-select");
const corpusNotes = el<HTMLParagraphElement>("corpus-notes");
const whatIfBar = el<HTMLDivElement>("whatif-bar");
const whatIfEditsSpan = el<HTMLSpanElement>("whatif-edits");
const whatIfPanels = el<HTMLElement>("whatif-panels");
const whatIfDelta = el<HTMLDivElement>("whatif-delta");
const whatIfBase = el<HTMLDivElement>("whatif-base");
const whatIfEdited = el<HTMLDivElement>("whatif-edited");

let corpusEntries: CorpusListingEntry[] = [];

// -- rendering ----------------------------------------------------------------

function activeDoc(): CanvasDocument {
  return whatIf ? whatIf.doc : doc;
}

function redraw(): void {
  const d = activeDoc();
  if (d.graph) {
    d.layout = completeLayout(d.graph, d.layout);
    canvasHost.innerHTML = renderSvg(d.graph, d.layout, {
      selection: d.selection,
      highlight: hoverHighlight ?? undefined,
      cycleFlash: cycleFlash ?? undefined,
      instrument: d.instrument,
    });
  } else {
    canvasHost.innerHTML = `<p class="error" style="padding:12px">document has a parse error; fix the source below</p>`;
  }
  if (document.activeElement !== source) {
    source.value = d.dagSource;
  }
  sourceError.textContent = d.invalid
    ? d.invalid.span
      ? `${d.invalid.span.line}:${d.invalid.span.column}: ${d.invalid.message}`
      : d.invalid.message
    : "";
}

function renderPanels(state: AnalysisSnapshot): void {
  banner.hidden = state.banner === null;
  banner.textContent = state.banner ?? "";
  panelsHost.innerHTML = [
    parsePanelHtml(state.panels.parse),
    adjustmentPanelHtml(state.panels.adjustment),
    pathsPanelHtml(state.panels.paths),
    implicationsPanelHtml(state.panels.implications),
    ivPanelHtml(state.panels.iv),
  ].join("");
}

function setStatus(message: string): void {
  statusLine.textContent = message;
  if (message) {
    setTimeout(() => {
      if (statusLine.textContent === message) statusLine.textContent = "";
    }, 4000);
  }
}

function refresh(): void {
  controller.request(doc);
}

// -- edit plumbing ---------------------------------------------------------------

function flashCycle(cycle: string[]): void {
  cycleFlash = cycle;
  if (cycleTimer !== null) clearTimeout(cycleTimer);
  cycleTimer = setTimeout(() => {
    cycleFlash = null;
    redraw();
  }, 1500);
  redraw();
}

function afterEdit(outcome: { ok: boolean; reason?: string; cycle?: string[] }): void {
  if (!outcome.ok) {
    setStatus(outcome.reason ?? "edit rejected");
    if (outcome.cycle) flashCycle(outcome.cycle);
    return;
  }
  redraw();
  if (whatIf) {
    whatIfEditsSpan.textContent = `${whatIf.edits.length} hypothetical edit(s)`;
  } else {
    refresh();
  }
}

function runEdit(edit: WhatIfEdit): void {
  const target = activeDoc();
  let outcome;
  switch (edit.action) {
    case "add-node":
      outcome = target.addNode(edit.name, edit.roles ?? []);
      break;
    case "add-edge":
      outcome = target.addEdge(edit.src, edit.dst, edit.kind ?? DIRECTED);
      break;
    case "toggle-role":
      outcome = target.toggleRole(edit.name, edit.role);
      break;
    case "toggle-adjusted":
      outcome = target.toggleAdjusted(edit.name);
      break;
    case "delete-node":
      outcome = target.deleteNode(edit.name);
      break;
    case "delete-edge":
      outcome = target.deleteEdge(edit.src, edit.dst, edit.kind ?? DIRECTED);
      break;
  }
  if (outcome.ok && whatIf) {
    whatIf.edits.push(edit);
    whatIf.base = null;
    whatIf.edited = null;
    el<HTMLButtonElement>("btn-whatif-commit").disabled = true;
  }
  afterEdit(outcome);
}

function selectedNode(): string | null {
  const d = activeDoc();
  const names = Array.from(d.selection.nodes);
  return names.length === 1 ? names[0] : null;
}

function requireSelectedNode(): string | null {
  const name = selectedNode();
  if (name === null) setStatus("select exactly one node first");
  return name;
}

// -- canvas interaction ------------------------------------------------------------

function svgPoint(event: MouseEvent): { x: number; y: number } | null {
  const svg = canvasHost.querySelector("svg");
  if (!svg) return null;
  const rect = svg.getBoundingClientRect();
  const vb = svg.viewBox.baseVal;
  return {
    x: ((event.clientX - rect.left) / rect.width) * vb.width,
    y: ((event.clientY - rect.top) / rect.height) * vb.height,
  };
}

let dragging: { name: string; moved: boolean } | null = null;

canvasHost.addEventListener("mousedown", (event) => {
  const group = (event.target as Element).closest("[data-node]");
  if (group && mode === "select") {
    dragging = { name: group.getAttribute("data-node")!, moved: false };
  }
});

canvasHost.addEventListener("mousemove", (event) => {
  if (!dragging) return;
  const p = svgPoint(event);
  if (!p) return;
  dragging.moved = true;
  activeDoc().layout.set(dragging.name, { x: Math.round(p.x), y: Math.round(p.y) });
  redraw();
});

window.addEventListener("mouseup", () => {
  if (dragging?.moved) activeDoc().dirty = true;
  dragging = null;
});

canvasHost.addEventListener("click", (event) => {
  const target = event.target as Element;
  const nodeGroup = target.closest("[data-node]");
  const edgeGroup = target.closest("[data-edge]");
  const d = activeDoc();
  if (dragging?.moved) return;

  if (nodeGroup) {
    const name = nodeGroup.getAttribute("data-node")!;
    if (mode === "add-edge" || mode === "add-bidirected") {
      if (pendingEdgeSrc === null) {
        pendingEdgeSrc = name;
        setStatus(`edge source: ${name}; click the target node`);
        return;
      }
      const kind: EdgeKind = mode === "add-edge" ? DIRECTED : BIDIRECTED;
      const src = pendingEdgeSrc;
      pendingEdgeSrc = null;
      setMode("select");
      runEdit({ action: "add-edge", src, dst: name, kind });
      return;
    }
    const already = d.selection.nodes.has(name);
    d.selection.nodes.clear();
    d.selection.edges.clear();
    if (!already) d.selection.nodes.add(name);
    redraw();
    return;
  }
  if (edgeGroup) {
    const key = edgeGroup.getAttribute("data-edge")!;
    const already = d.selection.edges.has(key);
    d.selection.nodes.clear();
    d.selection.edges.clear();
    if (!already) d.selection.edges.add(key);
    redraw();
    return;
  }
  d.selection.nodes.clear();
  d.selection.edges.clear();
  redraw();
});

// witness hover: highlight the path's nodes and edges on the canvas
function bindWitnessHover(host: HTMLElement): void {
  host.addEventListener("mouseover", (event) => {
    const row = (event.target as Element).closest("li.path[data-path]");
    if (!row) return;
    const spec = JSON.parse(row.getAttribute("data-path")!) as {
      nodes: string[];
      arrows: string[];
    };
    hoverHighlight = pathHighlight(spec.nodes, spec.arrows);
    redraw();
  });
  host.addEventListener("mouseout", (event) => {
    if ((event.target as Element).closest("li.path[data-path]")) {
      hoverHighlight = null;
      redraw();
    }
  });
}
bindWitnessHover(panelsHost);
bindWitnessHover(whatIfPanels);

// -- toolbar ---------------------------------------------------------------------

function setMode(next: Mode): void {
  mode = next;
  pendingEdgeSrc = null;
  el<HTMLButtonElement>("btn-add-edge").classList.toggle("active", next === "add-edge");
  el<HTMLButtonElement>("btn-add-bidirected").classList.toggle(
    "active",
    next === "add-bidirected",
  );
}

el<HTMLButtonElement>("btn-add-node").addEventListener("click", () => {
  const name = window.prompt("Node name");
  if (!name) return;
  runEdit({ action: "add-node", name: name.trim() });
});

el<HTMLButtonElement>("btn-add-edge").addEventListener("click", () => {
  setMode(mode === "add-edge" ? "select" : "add-edge");
});

el<HTMLButtonElement>("btn-add-bidirected").addEventListener("click", () => {
  setMode(mode === "add-bidirected" ? "select" : "add-bidirected");
});

el<HTMLButtonElement>("btn-delete").addEventListener("click", () => {
  const d = activeDoc();
  const node = Array.from(d.selection.nodes)[0];
  if (node !== undefined) {
    runEdit({ action: "delete-node", name: node });
    return;
  }
  const key = Array.from(d.selection.edges)[0];
  if (key !== undefined) {
    const [src, dst, kind] = JSON.parse(key) as [string, string, EdgeKind];
    runEdit({ action: "delete-edge", src, dst, kind });
    return;
  }
  setStatus("select a node or edge to delete");
});

el<HTMLButtonElement>("btn-undo").addEventListener("click", () => {
  if (!activeDoc().undo()) {
    setStatus("nothing to undo");
    return;
  }
  redraw();
  if (!whatIf) refresh();
});

for (const [id, role] of [
  ["btn-exposure", "exposure"],
  ["btn-outcome", "outcome"],
  ["btn-latent", "latent"],
] as const) {
  el<HTMLButtonElement>(id).addEventListener("click", () => {
    const name = requireSelectedNode();
    if (name) runEdit({ action: "toggle-role", name, role });
  });
}

el<HTMLButtonElement>("btn-adjusted").addEventListener("click", () => {
  const name = requireSelectedNode();
  if (name) runEdit({ action: "toggle-adjusted", name });
});

el<HTMLButtonElement>("btn-instrument").addEventListener("click", () => {
  const name = requireSelectedNode();
  if (!name) return;
  const d = activeDoc();
  const outcome = d.setInstrument(d.instrument === name ? null : name);
  if (!outcome.ok) {
    setStatus(outcome.reason);
    return;
  }
  redraw();
  if (!whatIf) refresh();
});

// -- source editor -----------------------------------------------------------------

async function applySource(text: string): Promise<void> {
  const outcome = doc.loadSource(text);
  redraw();
  if (outcome.ok) {
    refresh();
    return;
  }
  // confirm the span with the service, which owns the grammar
  try {
    const ex = await client.parse(text);
    if (!ex.ok && ex.json !== null && typeof ex.json === "object" && "error" in ex.json) {
      const err = (ex.json as ServiceErrorBody).error;
      doc.markInvalid(err.message, err.kind ?? "syntax", err.span ?? null);
      redraw();
    } else if (ex.ok) {
      const canonical = (ex.json as ReportEnvelope<ParseReport>).result.canonical;
      doc.loadSource(canonical);
      redraw();
      refresh();
    }
  } catch (err) {
    if (!(err instanceof ServiceUnreachable)) throw err;
  }
}

el<HTMLButtonElement>("btn-apply-source").addEventListener("click", () => {
  void applySource(source.value);
});

let sourceTimer: ReturnType<typeof setTimeout> | null = null;
source.addEventListener("input", () => {
  if (sourceTimer !== null) clearTimeout(sourceTimer);
  sourceTimer = setTimeout(() => {
    sourceTimer = null;
    void applySource(source.value);
  }, 700);
});

// -- what-if ------------------------------------------------------------------------

function enterWhatIf(): void {
  whatIf = { edits: [], doc: doc.clone(), base: null, edited: null };
  whatIfBar.hidden = false;
  whatIfPanels.hidden = false;
  whatIfEditsSpan.textContent = "0 hypothetical edit(s)";
  whatIfDelta.innerHTML = "<p class='note'>make hypothetical edits, then run the comparison</p>";
  whatIfBase.innerHTML = "";
  whatIfEdited.innerHTML = "";
  el<HTMLButtonElement>("btn-whatif").classList.add("active");
  el<HTMLButtonElement>("btn-whatif-commit").disabled = true;
  redraw();
}

function exitWhatIf(): void {
  whatIf = null;
  whatIfBar.hidden = true;
  whatIfPanels.hidden = true;
  el<HTMLButtonElement>("btn-whatif").classList.remove("active");
  redraw();
}

el<HTMLButtonElement>("btn-whatif").addEventListener("click", () => {
  if (whatIf) exitWhatIf();
  else enterWhatIf();
});

el<HTMLButtonElement>("btn-whatif-discard").addEventListener("click", exitWhatIf);

el<HTMLButtonElement>("btn-whatif-run").addEventListener("click", () => {
  void runWhatIfComparison();
});

async function runWhatIfComparison(): Promise<void> {
  if (!whatIf) return;
  const baseController = new AnalysisController(client);
  const editedController = new AnalysisController(client);
  try {
    const [base, edited] = await Promise.all([
      baseController.refreshNow(doc),
      editedController.refreshNow(whatIf.doc),
    ]);
    whatIf.base = base;
    whatIf.edited = edited;
  } catch (err) {
    if (err instanceof ServiceUnreachable) {
      whatIfDelta.innerHTML = "<p class='note error'>analysis service unreachable</p>";
      return;
    }
    throw err;
  }
  const delta = computeDelta(deltaSide(whatIf.base), deltaSide(whatIf.edited));
  whatIfDelta.innerHTML = whatIfPanelHtml(delta, isEmptyDelta(delta));
  const sides: [AnalysisSnapshot, HTMLDivElement][] = [
    [whatIf.base, whatIfBase],
    [whatIf.edited, whatIfEdited],
  ];
  for (const [snapshot, host] of sides) {
    host.innerHTML = [
      adjustmentPanelHtml(snapshot.panels.adjustment),
      pathsPanelHtml(snapshot.panels.paths),
      implicationsPanelHtml(snapshot.panels.implications),
      ivPanelHtml(snapshot.panels.iv),
    ].join("");
  }
  el<HTMLButtonElement>("btn-whatif-commit").disabled = false;
}

el<HTMLButtonElement>("btn-whatif-commit").addEventListener("click", () => {
  if (!whatIf) return;
  const edited = whatIf.doc;
  doc.loadSource(edited.dagSource);
  doc.layout = new Map(edited.layout);
  doc.instrument = edited.instrument;
  exitWhatIf();
  refresh();
});

// -- files -------------------------------------------------------------------------

const fileDag = el<HTMLInputElement>("file-dag");
const fileLayout = el<HTMLInputElement>("file-layout");

el<HTMLButtonElement>("btn-open").addEventListener("click", () => fileDag.click());
el<HTMLButtonElement>("btn-open-layout").addEventListener("click", () => fileLayout.click());

fileDag.addEventListener("change", async () => {
  const file = fileDag.files?.[0];
  if (!file) return;
  const text = await file.text();
  await applySource(text);
  if (doc.graph) doc.layout = autoLayout(doc.graph);
  redraw();
  fileDag.value = "";
});

fileLayout.addEventListener("change", async () => {
  const file = fileLayout.files?.[0];
  if (!file) return;
  try {
    const layout = layoutFromJson(await file.text());
    const d = activeDoc();
    d.layout = layout;
    redraw();
  } catch (err) {
    setStatus(err instanceof Error ? err.message : String(err));
  }
  fileLayout.value = "";
});

el<HTMLButtonElement>("btn-save").addEventListener("click", () => {
  const name = (doc.graph?.name || "graph") + ".dag";
  download(name, doc.dagSource, "text/plain");
  download(sidecarPathFor(name), layoutToJson(doc.layout), "application/json");
  doc.dirty = false;
});

function download(filename: string, text: string, type: string): void {
  const url = URL.createObjectURL(new Blob([text], { type }));
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

// -- corpus -------------------------------------------------------------------------

async function loadCorpusList(): Promise<void> {
  try {
    const ex = await client.corpus();
    if (!ex.ok || ex.json === null) return;
    corpusEntries = (ex.json as ReportEnvelope<CorpusListingReport>).result.entries;
    for (const entry of corpusEntries) {
      const option = document.createElement("option");
      option.value = entry.id;
      option.textContent = entry.id;
      corpusSelect.appendChild(option);
    }
  } catch (err) {
    if (!(err instanceof ServiceUnreachable)) throw err;
  }
}

corpusSelect.addEventListener("change", () => {
  const entry = corpusEntries.find((e) => e.id === corpusSelect.value);
  if (!entry) return;
  if (whatIf) exitWhatIf();
  doc.loadSource(entry.dag_source);
  if (doc.graph) doc.layout = autoLayout(doc.graph);
  doc.instrument = null;
  corpusNotes.textContent = `${entry.id} (${entry.provenance}): ${entry.notes}`;
  redraw();
  refresh();
});

// -- keyboard ------------------------------------------------------------------------

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLTextAreaElement || event.target instanceof HTMLInputElement) {
    return;
  }
  if (event.key === "Delete" || event.key === "Backspace") {
    el<HTMLButtonElement>("btn-delete").click();
    event.preventDefault();
  } else if ((event.ctrlKey || event.metaKey) && event.key === "z") {
    el<HTMLButtonElement>("btn-undo").click();
    event.preventDefault();
  } else if (event.key === "Escape") {
    setMode("select");
  }
});

// -- boot ----------------------------------------------------------------------------

controller.onChange(renderPanels);
redraw();
refresh();
void loadCorpusList();
