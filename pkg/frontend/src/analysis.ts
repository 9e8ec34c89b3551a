/**
 * Live analysis refresh: debounced service calls with stale-response
 * discard.
 *
 * Every refresh carries a monotone revision number.  Responses are applied
 * only when their revision is still the latest, so a slow reply from an
 * older document state can never overwrite a newer one.  When the service
 * cannot be reached the previous panel contents are kept but flagged
 * stale, never shown as current.
 */

import { ServiceUnreachable } from "./api.js";
import type { Exchange, ServiceClient, ServiceErrorBody } from "./api.js";
import type { CanvasDocument } from "./document.js";

export type PanelKey = "parse" | "adjustment" | "paths" | "implications" | "iv";

export const PANEL_KEYS: PanelKey[] = ["parse", "adjustment", "paths", "implications", "iv"];

export type PanelStatus = "idle" | "loading" | "fresh" | "stale" | "error" | "skipped";

export interface PanelState {
  status: PanelStatus;
  /** Exact response body text from the service; render from this, always. */
  rawText: string | null;
  /** JSON.parse of rawText. */
  data: unknown;
  /** Skip reason or error message. */
  detail: string | null;
}

export interface PlannedRequest {
  panel: PanelKey;
  path: string;
  body: Record<string, unknown>;
}

export interface RequestPlan {
  requests: PlannedRequest[];
  skipped: { panel: PanelKey; reason: string }[];
}

export interface AnalysisSnapshot {
  revision: number;
  /** Node names of the document the panels describe; used by what-if deltas. */
  nodeNames: string[];
  panels: Record<PanelKey, PanelState>;
  banner: string | null;
}

function idlePanel(): PanelState {
  return { status: "idle", rawText: null, data: null, detail: null };
}

function freshPanels(): Record<PanelKey, PanelState> {
  return {
    parse: idlePanel(),
    adjustment: idlePanel(),
    paths: idlePanel(),
    implications: idlePanel(),
    iv: idlePanel(),
  };
}

/**
 * Decide which /v1 requests a document needs.
 *
 * Pure so tests can replay the exact same request bodies against the
 * service and compare bytes with what the panels stored.
 */
export function buildPlan(doc: CanvasDocument): RequestPlan {
  if (doc.invalid !== null || doc.graph === null) {
    const reason = "document has a parse error; panels show the last good analysis";
    return {
      requests: [],
      skipped: PANEL_KEYS.map((panel) => ({ panel, reason })),
    };
  }
  const requests: PlannedRequest[] = [];
  const skipped: RequestPlan["skipped"] = [];
  const src = doc.dagSource;
  const given = doc.adjustedNodes();

  requests.push({ panel: "parse", path: "/v1/parse", body: { dag_source: src } });

  const exposure = doc.exposure();
  const outcome = doc.outcome();
  if (exposure !== null && outcome !== null) {
    requests.push({
      panel: "adjustment",
      path: "/v1/adjustment-sets",
      body: { dag_source: src },
    });
    requests.push({
      panel: "paths",
      path: "/v1/paths",
      body: { dag_source: src, x: exposure, y: outcome, given },
    });
  } else {
    const reason = "mark one exposure and one outcome to see identification results";
    skipped.push({ panel: "adjustment", reason });
    skipped.push({ panel: "paths", reason });
  }

  requests.push({
    panel: "implications",
    path: "/v1/implications",
    body: { dag_source: src, max_cond: 3 },
  });

  if (doc.instrument !== null) {
    requests.push({
      panel: "iv",
      path: "/v1/iv-check",
      body: { dag_source: src, instrument: doc.instrument, given },
    });
  } else {
    skipped.push({ panel: "iv", reason: "mark an instrument to check its exogeneity" });
  }
  return { requests, skipped };
}

export class AnalysisController {
  private client: ServiceClient;
  private debounceMs: number;
  private revision = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private listeners: ((state: AnalysisSnapshot) => void)[] = [];

  state: AnalysisSnapshot = {
    revision: 0,
    nodeNames: [],
    panels: freshPanels(),
    banner: null,
  };

  constructor(client: ServiceClient, opts: { debounceMs?: number } = {}) {
    this.client = client;
    this.debounceMs = opts.debounceMs ?? 250;
  }

  onChange(listener: (state: AnalysisSnapshot) => void): void {
    this.listeners.push(listener);
  }

  /** Schedule a refresh, collapsing bursts of edits into one request wave. */
  request(doc: CanvasDocument): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refreshNow(doc);
    }, this.debounceMs);
  }

  /**
   * Run a refresh immediately and resolve with the resulting snapshot.
   *
   * A refresh that has been superseded by a newer one resolves with the
   * current state and changes nothing.
   */
  async refreshNow(doc: CanvasDocument): Promise<AnalysisSnapshot> {
    this.revision += 1;
    const rev = this.revision;
    const plan = buildPlan(doc);

    const panels: Record<PanelKey, PanelState> = { ...this.state.panels };
    for (const req of plan.requests) {
      const prior = panels[req.panel];
      panels[req.panel] = { ...prior, status: "loading", detail: null };
    }
    for (const skip of plan.skipped) {
      const prior = panels[skip.panel];
      const keepContent = doc.invalid !== null;
      panels[skip.panel] = {
        status: keepContent && prior.rawText !== null ? "stale" : "skipped",
        rawText: keepContent ? prior.rawText : null,
        data: keepContent ? prior.data : null,
        detail: skip.reason,
      };
    }
    this.publish({ ...this.state, revision: rev, panels });

    const settled = await Promise.allSettled(
      plan.requests.map((req) => this.client.post(req.path, req.body)),
    );
    if (rev !== this.revision) {
      return this.state;
    }

    let unreachable = false;
    const next: Record<PanelKey, PanelState> = { ...this.state.panels };
    settled.forEach((outcome, i) => {
      const req = plan.requests[i];
      if (outcome.status === "rejected") {
        if (!(outcome.reason instanceof ServiceUnreachable)) {
          throw outcome.reason;
        }
        unreachable = true;
        const prior = next[req.panel];
        next[req.panel] = {
          status: prior.rawText !== null ? "stale" : "idle",
          rawText: prior.rawText,
          data: prior.data,
          detail: "service unreachable",
        };
        return;
      }
      const ex = outcome.value as Exchange;
      if (ex.ok) {
        next[req.panel] = { status: "fresh", rawText: ex.text, data: ex.json, detail: null };
      } else {
        const message =
          ex.json !== null && typeof ex.json === "object" && "error" in ex.json
            ? (ex.json as ServiceErrorBody).error.message
            : `service returned HTTP ${ex.status}`;
        next[req.panel] = { status: "error", rawText: ex.text, data: ex.json, detail: message };
      }
    });

    this.publish({
      revision: rev,
      nodeNames: doc.nodeNames(),
      panels: next,
      banner: unreachable ? "analysis service unreachable; panels show stale results" : null,
    });
    return this.state;
  }

  private publish(state: AnalysisSnapshot): void {
    this.state = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }
}
