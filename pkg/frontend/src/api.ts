/**
 * Typed client for the identification service's /v1 HTTP API.
 *
 * Every call returns the response body both as the exact text the service
 * sent and as parsed JSON.  Panels render from the parsed copy but keep
 * the raw text, so what the UI shows is always traceable to service bytes
 * and never to a client-side reimplementation.
 */

import type { SourceSpan } from "./dsl.js";

// -- response shapes --------------------------------------------------------

export interface ReportEnvelope<R> {
  schema: string;
  kind: string;
  graph: { name: string } | null;
  query: Record<string, unknown>;
  result: R;
}

export interface NodeInfo {
  name: string;
  latent: boolean;
  exposure: boolean;
  outcome: boolean;
  adjusted: boolean;
}

export interface EdgeInfo {
  src: string;
  dst: string;
  kind: "directed" | "bidirected";
}

export interface ParseReport {
  canonical: string;
  nodes: NodeInfo[];
  edges: EdgeInfo[];
  warnings: string[];
}

export type PathArrow = "forward" | "backward" | "bidirected";

export interface PathReport {
  nodes: string[];
  arrows: PathArrow[];
  display: string;
  status: "open" | "blocked";
  blockers: string[];
  openers: string[];
}

export interface DsepReport {
  separated: boolean;
  paths: PathReport[];
  truncated: boolean;
}

export interface PathsReport {
  paths: PathReport[];
  open_count: number;
  truncated: boolean;
}

export interface AdjustmentSearchReport {
  exposure: string;
  outcome: string;
  sets: string[][];
  marker: "exhausted" | "truncated";
  max_size: number;
  max_count: number;
  causal_paths: PathReport[];
}

export interface BackdoorReport {
  exposure: string;
  outcome: string;
  z: string[];
  admissible: boolean;
  violated: string | null;
  witness: PathReport | null;
}

export interface IvReport {
  instrument: string;
  exposure: string;
  outcome: string;
  given: string[];
  valid: boolean;
  relevant: boolean;
  excluded_exogenous: boolean;
  witness: PathReport | null;
}

export interface CiStatementReport {
  a: string[];
  b: string[];
  given: string[];
  provenance: string;
  display: string;
}

export interface ImplicationsReport {
  statements: CiStatementReport[];
}

export interface CorpusListingEntry {
  id: string;
  provenance: string;
  notes: string;
  dag_source: string;
}

export interface CorpusListingReport {
  entries: CorpusListingEntry[];
}

export interface ServiceErrorBody {
  error: {
    code: string;
    message: string;
    kind?: string;
    span?: SourceSpan;
  };
}

/** One completed exchange: HTTP status plus the body as sent and as parsed. */
export interface Exchange<R = unknown> {
  status: number;
  /** Exact response body text. */
  text: string;
  /** JSON.parse of the body; null when the body was not JSON. */
  json: R | ServiceErrorBody | null;
  ok: boolean;
}

/** Thrown when the service cannot be reached at all (no HTTP response). */
export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super("analysis service unreachable");
    this.name = "ServiceUnreachable";
    this.cause = cause;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

// -- client -------------------------------------------------------------------

export class ServiceClient {
  readonly baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  private async exchange<R>(path: string, body?: unknown): Promise<Exchange<R>> {
    const init: RequestInit =
      body === undefined
        ? { method: "GET" }
        : {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
          };
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ServiceUnreachable(err);
    }
    const text = await resp.text();
    let json: Exchange<R>["json"] = null;
    try {
      json = JSON.parse(text);
    } catch {
      json = null;
    }
    return { status: resp.status, text, json, ok: resp.ok };
  }

  health(): Promise<Exchange<{ status: string }>> {
    return this.exchange("/v1/health");
  }

  parse(dagSource: string): Promise<Exchange<ReportEnvelope<ParseReport>>> {
    return this.exchange("/v1/parse", { dag_source: dagSource });
  }

  dsep(
    dagSource: string,
    x: string[],
    y: string[],
    given: string[] = [],
  ): Promise<Exchange<ReportEnvelope<DsepReport>>> {
    return this.exchange("/v1/dsep", { dag_source: dagSource, x, y, given });
  }

  paths(
    dagSource: string,
    x: string,
    y: string,
    given: string[] = [],
  ): Promise<Exchange<ReportEnvelope<PathsReport>>> {
    return this.exchange("/v1/paths", { dag_source: dagSource, x, y, given });
  }

  adjustmentSets(dagSource: string): Promise<Exchange<ReportEnvelope<AdjustmentSearchReport>>> {
    return this.exchange("/v1/adjustment-sets", { dag_source: dagSource });
  }

  backdoorCheck(
    dagSource: string,
    z: string[],
  ): Promise<Exchange<ReportEnvelope<BackdoorReport>>> {
    return this.exchange("/v1/adjustment-sets", { dag_source: dagSource, z });
  }

  ivCheck(
    dagSource: string,
    instrument: string,
    given: string[] = [],
  ): Promise<Exchange<ReportEnvelope<IvReport>>> {
    return this.exchange("/v1/iv-check", { dag_source: dagSource, instrument, given });
  }

  implications(
    dagSource: string,
    maxCond = 3,
  ): Promise<Exchange<ReportEnvelope<ImplicationsReport>>> {
    return this.exchange("/v1/implications", { dag_source: dagSource, max_cond: maxCond });
  }

  corpus(): Promise<Exchange<ReportEnvelope<CorpusListingReport>>> {
    return this.exchange("/v1/corpus");
  }

  /** POST an arbitrary /v1 request; used to replay panel queries verbatim. */
  post(path: string, body: unknown): Promise<Exchange<unknown>> {
    return this.exchange(path, body);
  }
}
