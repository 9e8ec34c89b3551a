/**
 * What-if comparison: base analysis vs the analysis of a hypothetical
 * edit, computed purely from the two report bundles.
 *
 * The delta covers the identification-relevant families: admissible
 * adjustment sets, testable implications, and the IV verdict.  Implications
 * are compared over the nodes present in both documents; a statement that
 * mentions a node existing on only one side (say a freshly added isolated
 * node, which is trivially independent of everything) is not a change to
 * any shared claim, so it does not count.  With that reading, adding an
 * isolated node yields an empty delta and equal reports always do.
 */

import type {
  AdjustmentSearchReport,
  CiStatementReport,
  IvReport,
  ReportEnvelope,
} from "./api.js";
import type { AnalysisSnapshot } from "./analysis.js";
import type { CanvasDocument, EditOutcome } from "./document.js";
import type { EdgeKind, RoleName } from "./dsl.js";

export interface DeltaSide {
  /** Node names of the document this analysis describes. */
  nodeNames: string[];
  /** Admissible sets, or null when the panel was not produced. */
  adjustmentSets: string[][] | null;
  implications: CiStatementReport[] | null;
  iv: { instrument: string; valid: boolean } | null;
}

export interface WhatIfDelta {
  adjustmentSetsGained: string[][];
  adjustmentSetsLost: string[][];
  implicationsGained: string[];
  implicationsLost: string[];
  ivVerdictFlips: { instrument: string; from: boolean; to: boolean }[];
}

/** Pull the fields the delta needs out of a controller snapshot. */
export function deltaSide(snapshot: AnalysisSnapshot): DeltaSide {
  const adj = snapshot.panels.adjustment;
  const imp = snapshot.panels.implications;
  const iv = snapshot.panels.iv;
  return {
    nodeNames: snapshot.nodeNames,
    adjustmentSets:
      adj.status === "fresh"
        ? (adj.data as ReportEnvelope<AdjustmentSearchReport>).result.sets
        : null,
    implications:
      imp.status === "fresh"
        ? (imp.data as ReportEnvelope<{ statements: CiStatementReport[] }>).result.statements
        : null,
    iv:
      iv.status === "fresh"
        ? {
            instrument: (iv.data as ReportEnvelope<IvReport>).result.instrument,
            valid: (iv.data as ReportEnvelope<IvReport>).result.valid,
          }
        : null,
  };
}

function setKey(set: string[]): string {
  return JSON.stringify(set);
}

function mentioned(statement: CiStatementReport): string[] {
  return [...statement.a, ...statement.b, ...statement.given];
}

export function computeDelta(base: DeltaSide, edited: DeltaSide): WhatIfDelta {
  const delta: WhatIfDelta = {
    adjustmentSetsGained: [],
    adjustmentSetsLost: [],
    implicationsGained: [],
    implicationsLost: [],
    ivVerdictFlips: [],
  };

  if (base.adjustmentSets !== null && edited.adjustmentSets !== null) {
    const baseKeys = new Set(base.adjustmentSets.map(setKey));
    const editedKeys = new Set(edited.adjustmentSets.map(setKey));
    delta.adjustmentSetsGained = edited.adjustmentSets.filter((s) => !baseKeys.has(setKey(s)));
    delta.adjustmentSetsLost = base.adjustmentSets.filter((s) => !editedKeys.has(setKey(s)));
  }

  if (base.implications !== null && edited.implications !== null) {
    const shared = new Set(base.nodeNames.filter((n) => edited.nodeNames.includes(n)));
    const relevant = (statements: CiStatementReport[]) =>
      statements.filter((s) => mentioned(s).every((n) => shared.has(n)));
    const baseShown = relevant(base.implications).map((s) => s.display);
    const editedShown = relevant(edited.implications).map((s) => s.display);
    const baseSet = new Set(baseShown);
    const editedSet = new Set(editedShown);
    delta.implicationsGained = editedShown.filter((d) => !baseSet.has(d));
    delta.implicationsLost = baseShown.filter((d) => !editedSet.has(d));
  }

  if (base.iv !== null && edited.iv !== null && base.iv.instrument === edited.iv.instrument) {
    if (base.iv.valid !== edited.iv.valid) {
      delta.ivVerdictFlips = [
        { instrument: base.iv.instrument, from: base.iv.valid, to: edited.iv.valid },
      ];
    }
  }

  return delta;
}

export function isEmptyDelta(delta: WhatIfDelta): boolean {
  return (
    delta.adjustmentSetsGained.length === 0 &&
    delta.adjustmentSetsLost.length === 0 &&
    delta.implicationsGained.length === 0 &&
    delta.implicationsLost.length === 0 &&
    delta.ivVerdictFlips.length === 0
  );
}

// -- hypothetical edits --------------------------------------------------------

export type WhatIfEdit =
  | { action: "add-node"; name: string; roles?: RoleName[] }
  | { action: "add-edge"; src: string; dst: string; kind?: EdgeKind }
  | { action: "toggle-role"; name: string; role: "latent" | "exposure" | "outcome" }
  | { action: "toggle-adjusted"; name: string }
  | { action: "delete-node"; name: string }
  | { action: "delete-edge"; src: string; dst: string; kind?: EdgeKind };

/**
 * Apply hypothetical edits to a copy of the document, leaving the original
 * untouched.  Returns the edited copy and any edit that was rejected.
 */
export function applyHypothetical(
  doc: CanvasDocument,
  edits: WhatIfEdit[],
): { doc: CanvasDocument; failures: { edit: WhatIfEdit; outcome: EditOutcome }[] } {
  const copy = doc.clone();
  const failures: { edit: WhatIfEdit; outcome: EditOutcome }[] = [];
  for (const edit of edits) {
    const outcome = applyEdit(copy, edit);
    if (!outcome.ok) {
      failures.push({ edit, outcome });
    }
  }
  return { doc: copy, failures };
}

export function applyEdit(doc: CanvasDocument, edit: WhatIfEdit): EditOutcome {
  switch (edit.action) {
    case "add-node":
      return doc.addNode(edit.name, edit.roles ?? []);
    case "add-edge":
      return doc.addEdge(edit.src, edit.dst, edit.kind ?? "directed");
    case "toggle-role":
      return doc.toggleRole(edit.name, edit.role);
    case "toggle-adjusted":
      return doc.toggleAdjusted(edit.name);
    case "delete-node":
      return doc.deleteNode(edit.name);
    case "delete-edge":
      return doc.deleteEdge(edit.src, edit.dst, edit.kind ?? "directed");
  }
}
