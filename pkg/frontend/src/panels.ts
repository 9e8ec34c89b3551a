/**
 * Panel bodies as HTML strings, built purely from panel state.
 *
 * Everything shown comes from the stored service response; these helpers
 * format, they never compute.  Path rows carry their node list in a
 * data-path attribute so the app can highlight the witness on the canvas
 * when a row is hovered or clicked.
 */

import type {
  AdjustmentSearchReport,
  CiStatementReport,
  IvReport,
  ParseReport,
  PathReport,
  PathsReport,
  ReportEnvelope,
} from "./api.js";
import type { PanelState } from "./analysis.js";
import { escapeXml } from "./render.js";
import type { WhatIfDelta } from "./whatif.js";

export function setLabel(set: string[]): string {
  return set.length === 0 ? "∅" : `{${set.join(", ")}}`;
}

function statusNote(state: PanelState): string {
  if (state.status === "skipped" || state.status === "error") {
    return `<p class="note ${state.status}">${escapeXml(state.detail ?? state.status)}</p>`;
  }
  if (state.status === "stale") {
    return `<p class="note stale">stale: ${escapeXml(state.detail ?? "awaiting refresh")}</p>`;
  }
  return "";
}

function wrap(state: PanelState, title: string, body: string): string {
  return (
    `<section class="panel status-${state.status}">` +
    `<h3>${escapeXml(title)}</h3>` +
    statusNote(state) +
    body +
    `</section>`
  );
}

function hasResult(state: PanelState): boolean {
  return (
    (state.status === "fresh" || state.status === "stale") &&
    state.rawText !== null &&
    state.data !== null
  );
}

export function parsePanelHtml(state: PanelState): string {
  if (!hasResult(state)) return wrap(state, "Document", "");
  const report = (state.data as ReportEnvelope<ParseReport>).result;
  const warnings =
    report.warnings.length > 0
      ? `<ul class="warnings">${report.warnings
          .map((w) => `<li>${escapeXml(w)}</li>`)
          .join("")}</ul>`
      : "";
  const body =
    `<p>${report.nodes.length} nodes, ${report.edges.length} edges` +
    (report.warnings.length > 0 ? `, ${report.warnings.length} warning(s)` : "") +
    `</p>` +
    warnings;
  return wrap(state, "Document", body);
}

export function adjustmentPanelHtml(state: PanelState): string {
  if (!hasResult(state)) return wrap(state, "Adjustment sets", "");
  const report = (state.data as ReportEnvelope<AdjustmentSearchReport>).result;
  let body: string;
  if (report.sets.length === 0) {
    body = `<p class="verdict bad">no admissible adjustment set (up to size ${report.max_size})</p>`;
  } else {
    body =
      `<p class="verdict good">minimal admissible sets for ${escapeXml(report.exposure)} → ${escapeXml(report.outcome)}:</p>` +
      `<ul class="sets">${report.sets
        .map((s) => `<li><code>${escapeXml(setLabel(s))}</code></li>`)
        .join("")}</ul>`;
  }
  if (report.marker === "truncated") {
    body += `<p class="note">search truncated at max_size=${report.max_size}, max_count=${report.max_count}</p>`;
  }
  return wrap(state, "Adjustment sets", body);
}

function pathRow(path: PathReport): string {
  const data = escapeXml(JSON.stringify({ nodes: path.nodes, arrows: path.arrows }));
  const mods =
    path.status === "open"
      ? path.openers.length > 0
        ? ` (opened by ${path.openers.join(", ")})`
        : ""
      : ` (blocked by ${path.blockers.join(", ") || "a collider"})`;
  return (
    `<li class="path ${path.status}" data-path="${data}">` +
    `<code>${escapeXml(path.display)}</code>` +
    `<span class="status">${path.status}${escapeXml(mods)}</span>` +
    `</li>`
  );
}

/** Backdoor paths: x-y paths whose first step enters the exposure. */
export function backdoorPaths(report: PathsReport): PathReport[] {
  return report.paths.filter((p) => p.arrows[0] !== "forward");
}

export function pathsPanelHtml(state: PanelState): string {
  if (!hasResult(state)) return wrap(state, "Backdoor paths", "");
  const report = (state.data as ReportEnvelope<PathsReport>).result;
  const backdoor = backdoorPaths(report);
  const open = backdoor.filter((p) => p.status === "open");
  let body: string;
  if (backdoor.length === 0) {
    body = `<p class="verdict good">no backdoor paths</p>`;
  } else {
    body =
      `<p class="verdict ${open.length > 0 ? "bad" : "good"}">${open.length} of ${backdoor.length} backdoor path(s) open under the current adjustment</p>` +
      `<ul class="paths">${backdoor.map(pathRow).join("")}</ul>`;
  }
  if (report.truncated) {
    body += `<p class="note">path list truncated</p>`;
  }
  return wrap(state, "Backdoor paths", body);
}

export function implicationsPanelHtml(state: PanelState): string {
  if (!hasResult(state)) return wrap(state, "Testable implications", "");
  const report = (state.data as ReportEnvelope<{ statements: CiStatementReport[] }>).result;
  const body =
    report.statements.length === 0
      ? `<p>none: the model imposes no conditional independence over observed nodes</p>`
      : `<ul class="implications">${report.statements
          .map((s) => `<li><code>${escapeXml(s.display)}</code></li>`)
          .join("")}</ul>`;
  return wrap(state, "Testable implications", body);
}

export function ivPanelHtml(state: PanelState): string {
  if (!hasResult(state)) return wrap(state, "Instrument check", "");
  const report = (state.data as ReportEnvelope<IvReport>).result;
  const givenText = report.given.length > 0 ? ` given ${setLabel(report.given)}` : "";
  let body =
    `<p class="verdict ${report.valid ? "good" : "bad"}">` +
    `${escapeXml(report.instrument)} is ${report.valid ? "a valid" : "not a valid"} instrument` +
    ` for ${escapeXml(report.exposure)} → ${escapeXml(report.outcome)}${escapeXml(givenText)}</p>` +
    `<ul class="checks">` +
    `<li>relevance: ${report.relevant ? "holds" : "fails"}</li>` +
    `<li>exclusion and exogeneity: ${report.excluded_exogenous ? "hold" : "fail"}</li>` +
    `</ul>`;
  if (report.witness !== null) {
    body += `<p class="note">violating path:</p><ul class="paths">${pathRow(report.witness)}</ul>`;
  }
  return wrap(state, "Instrument check", body);
}

export function whatIfPanelHtml(delta: WhatIfDelta, empty: boolean): string {
  if (empty) {
    return `<p class="verdict neutral">no change: both analyses agree</p>`;
  }
  const block = (title: string, items: string[]): string =>
    items.length === 0
      ? ""
      : `<h4>${escapeXml(title)}</h4><ul>${items
          .map((i) => `<li><code>${escapeXml(i)}</code></li>`)
          .join("")}</ul>`;
  return (
    block("Adjustment sets gained", delta.adjustmentSetsGained.map(setLabel)) +
    block("Adjustment sets lost", delta.adjustmentSetsLost.map(setLabel)) +
    block("Implications gained", delta.implicationsGained) +
    block("Implications lost", delta.implicationsLost) +
    block(
      "IV verdict flips",
      delta.ivVerdictFlips.map(
        (f) =>
          `${f.instrument}: ${f.from ? "valid" : "invalid"} → ${f.to ? "valid" : "invalid"}`,
      ),
    )
  );
}
