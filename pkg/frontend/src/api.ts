// Thin typed client for the workbench API. Every console interaction goes
// through here; nothing below this layer touches the network.

import type {
  AnalysisJob,
  ApiError,
  BatchIdResult,
  BinPage,
  DeltaTriple,
  ProjectSummary,
  RecordConsole,
  SpecimenDoc,
  SpecimenPage,
} from "./types.js";

export class RequestFailed extends Error {
  readonly status: number;
  readonly payload: ApiError;

  constructor(status: number, payload: ApiError) {
    super(payload.detail || payload.error || `request failed (${status})`);
    this.status = status;
    this.payload = payload;
  }
}

export interface ClientOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: typeof fetch;
}

export class WorkbenchClient {
  private readonly baseUrl: string;
  private readonly token: string;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token ?? "";
    this.fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);
  }

  private async request<T>(method: string, path: string, body?: unknown,
                           rawBody?: string): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: string | undefined;
    if (rawBody !== undefined) {
      payload = rawBody;
      headers["Content-Type"] = "text/plain";
    } else if (body !== undefined) {
      payload = JSON.stringify(body);
      headers["Content-Type"] = "application/json";
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: payload,
    });
    const text = await response.text();
    let parsed: unknown = {};
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = { detail: text };
      }
    }
    if (!response.ok) {
      throw new RequestFailed(response.status, {
        status: response.status,
        ...(parsed as object),
      });
    }
    return parsed as T;
  }

  me(): Promise<{ username: string }> {
    return this.request("GET", "/api/v4/wb/me");
  }

  projectSummary(code: string): Promise<ProjectSummary> {
    return this.request("GET", `/api/v4/wb/projects/${encodeURIComponent(code)}/summary`);
  }

  recordConsole(code: string): Promise<RecordConsole> {
    return this.request("GET", `/api/v4/wb/projects/${encodeURIComponent(code)}/records`);
  }

  specimenPage(recordId: string): Promise<SpecimenPage> {
    return this.request("GET", `/api/v4/wb/records/${encodeURIComponent(recordId)}`);
  }

  updateRecord(recordId: string, updates: Record<string, unknown>,
               expectedVersion: number): Promise<SpecimenDoc> {
    return this.request("PATCH", `/api/v4/wb/records/${encodeURIComponent(recordId)}`, {
      updates,
      expected_version: expectedVersion,
    });
  }

  annotate(recordId: string, type: "tag" | "comment", body: string): Promise<unknown> {
    return this.request("POST",
      `/api/v4/wb/records/${encodeURIComponent(recordId)}/annotations`,
      type === "tag" ? { type, label: body } : { type, text: body });
  }

  history(recordId: string, window?: string): Promise<{ events: Record<string, unknown>[] }> {
    const suffix = window ? `?window=${encodeURIComponent(window)}` : "";
    return this.request("GET",
      `/api/v4/wb/records/${encodeURIComponent(recordId)}/history${suffix}`);
  }

  deltaView(recordId: string, fromWeek: string, toWeek: string): Promise<{ fields: DeltaTriple[] }> {
    return this.request("GET",
      `/api/v4/wb/records/${encodeURIComponent(recordId)}/delta` +
      `?from_week=${encodeURIComponent(fromWeek)}&to_week=${encodeURIComponent(toWeek)}`);
  }

  identify(fasta: string, kind = "All", marker = "COI-5P"): Promise<BatchIdResult> {
    return this.request("POST", "/api/v4/wb/identify", { kind, marker, fasta });
  }

  launchAnalysis(tool: string, selection: Record<string, unknown>,
                 params: Record<string, unknown> = {}): Promise<AnalysisJob> {
    return this.request("POST", "/api/v4/wb/analyses", { tool, selection, params });
  }

  analysis(jobId: string): Promise<AnalysisJob> {
    return this.request("GET", `/api/v4/wb/analyses/${encodeURIComponent(jobId)}`);
  }

  addToDataset(code: string, recordRefs: string[]): Promise<unknown> {
    return this.request("POST", `/api/v4/wb/datasets/${encodeURIComponent(code)}/records`,
      { record_refs: recordRefs });
  }

  sequencePage(seqKey: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/api/v4/wb/sequences/${encodeURIComponent(seqKey)}`);
  }

  binPage(binUri: string): Promise<BinPage> {
    return this.request("GET", `/api/v4/public/bins/${encodeURIComponent(binUri)}`);
  }

  publicSequenceFasta(processIds: string[]): Promise<string> {
    const ids = encodeURIComponent(processIds.join("|"));
    return this.requestText(`/api/v4/public/sequence?ids=${ids}&format=fasta`);
  }

  private async requestText(path: string): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { headers });
    const text = await response.text();
    if (!response.ok) {
      throw new RequestFailed(response.status, { status: response.status, detail: text });
    }
    return text;
  }
}
