// View and client logic without a browser: mocked fetch, string rendering.

import { describe, expect, it, vi } from "vitest";

import { RequestFailed, WorkbenchClient } from "../src/api.js";
import { EditSession } from "../src/editSession.js";
import { renderBatchIdTable, BATCH_ID_LABELS } from "../src/views/batchId.js";
import { renderProjectConsole } from "../src/views/projectConsole.js";
import { filterRows, renderRecordTable, RECORD_TABLE_COLUMNS } from "../src/views/recordTable.js";
import { renderActivity, renderConflictPrompt, renderDelta } from "../src/views/specimenPage.js";
import type { BatchIdResult, ProjectSummary, RecordRow } from "../src/types.js";

function fetchStub(routes: Record<string, { status?: number; body: unknown }>) {
  return vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
    const key = `${init?.method ?? "GET"} ${String(url)}`;
    const match = Object.entries(routes).find(([k]) => key.startsWith(k));
    if (!match) throw new Error(`unexpected request: ${key}`);
    const { status = 200, body } = match[1];
    return new Response(JSON.stringify(body), { status });
  }) as unknown as typeof fetch;
}

describe("WorkbenchClient", () => {
  it("sends the bearer token and parses payloads", async () => {
    const impl = fetchStub({ "GET /api/v4/wb/me": { body: { username: "alice" } } });
    const client = new WorkbenchClient({ token: "tok", fetchImpl: impl });
    const me = await client.me();
    expect(me.username).toBe("alice");
    const call = (impl as unknown as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(call[1].headers.Authorization).toBe("Bearer tok");
  });

  it("raises RequestFailed with the server detail", async () => {
    const impl = fetchStub({
      "PATCH /api/v4/wb/records/S1": {
        status: 403,
        body: { error: "PermissionDenied", detail: "permission denied: EditSpecimens",
                permission: "EditSpecimens" },
      },
    });
    const client = new WorkbenchClient({ token: "tok", fetchImpl: impl });
    await expect(client.updateRecord("S1", { "taxonomy.species": "X" }, 1))
      .rejects.toMatchObject({ status: 403 });
  });
});

describe("EditSession", () => {
  const conflictClient = (currentVersion: number) => {
    const impl = fetchStub({
      "PATCH /api/v4/wb/records/S1": {
        status: 409,
        body: { error: "VersionConflict", detail: "stale version token" },
      },
      "GET /api/v4/wb/records/S1": {
        body: {
          record: {
            sample_id: "S1", project: "P", storing_institution: "x",
            taxonomy: { species: "Astraptes janeira" }, collection: {},
            process_ids: [], tags: [], comments: [], visibility: "private",
            version: currentVersion,
          },
          sequences: [], bins: [], activity: [], version: currentVersion,
        },
      },
    });
    return new WorkbenchClient({ token: "t", fetchImpl: impl });
  };

  it("is a noop without staged edits", async () => {
    const session = new EditSession("S1", 1);
    const result = await session.commit(conflictClient(2));
    expect(result.kind).toBe("noop");
  });

  it("turns a 409 into a conflict prompt carrying both values", async () => {
    const session = new EditSession("S1", 1);
    session.stage("taxonomy.species", "Astraptes tucuti");
    const result = await session.commit(conflictClient(3));
    expect(result.kind).toBe("conflict");
    if (result.kind !== "conflict") return;
    expect(result.prompt.staleVersion).toBe(1);
    expect(result.prompt.currentVersion).toBe(3);
    expect(result.prompt.fields).toEqual([{
      field: "taxonomy.species",
      yours: "Astraptes tucuti",
      theirs: "Astraptes janeira",
    }]);
  });

  it("rebases staged edits when the user keeps their values", async () => {
    const session = new EditSession("S1", 1);
    session.stage("taxonomy.species", "Astraptes tucuti");
    const result = await session.commit(conflictClient(3));
    if (result.kind !== "conflict") throw new Error("expected conflict");
    const rebased = session.resolve(result.prompt, "mine");
    expect(rebased.baseVersion).toBe(3);
    expect(rebased.stagedEdits).toEqual({ "taxonomy.species": "Astraptes tucuti" });
    const dropped = session.resolve(result.prompt, "theirs");
    expect(dropped.dirty).toBe(false);
  });

  it("commits cleanly when the version token is fresh", async () => {
    const impl = fetchStub({
      "PATCH /api/v4/wb/records/S1": {
        body: { sample_id: "S1", version: 2, taxonomy: { species: "X" } },
      },
    });
    const client = new WorkbenchClient({ token: "t", fetchImpl: impl });
    const session = new EditSession("S1", 1);
    session.stage("taxonomy.species", "X");
    const result = await session.commit(client);
    expect(result.kind).toBe("committed");
    expect(session.dirty).toBe(false);
  });
});

describe("record table", () => {
  const row = (overrides: Partial<RecordRow> = {}): RecordRow => ({
    sample_id: "S-1", process_ids: ["P1-26"], species: "Astraptes tucuti",
    has_gps: true, has_images: false, has_traces: false, barcode_compliant: true,
    stop_codon: false, contamination: false, flagged: false, tags: [],
    bins: ["BOLD:AAA0001"], version: 1, ...overrides,
  });

  it("renders every badge from server values only", () => {
    const html = renderRecordTable([row({ stop_codon: true, flagged: true })]);
    for (const column of RECORD_TABLE_COLUMNS.slice(1)) {
      expect(html).toContain(`<th>${column}</th>`);
    }
    expect(html).toContain('data-sample-id="S-1"');
    expect(html).toContain("BOLD:AAA0001");
  });

  it("escapes html in record values", () => {
    const html = renderRecordTable([row({ species: "<script>alert(1)</script>" })]);
    expect(html).not.toContain("<script>alert(1)</script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("filters by text and flag state", () => {
    const rows = [row(), row({ sample_id: "S-2", flagged: true, species: "Bombus" })];
    expect(filterRows(rows, { text: "bombus" }).map((r) => r.sample_id)).toEqual(["S-2"]);
    expect(filterRows(rows, { flaggedOnly: true }).map((r) => r.sample_id)).toEqual(["S-2"]);
    expect(filterRows(rows, {})).toHaveLength(2);
  });
});

describe("batch id table", () => {
  it("renders the standard column set in order", () => {
    const result: BatchIdResult = {
      columns: Object.keys(BATCH_ID_LABELS),
      rows: [{
        query_process_id: "Q1", query_sample_id: "S1", current_order: "Hemiptera",
        current_identification: "Adelphocoris lineolatus", match_percent: 100,
        overlap_bp: 612, match_order: "Hemiptera", match_family: "Miridae",
        match_species: "Adelphocoris lineolatus", match_subspecies: null,
        match_process_id: "RFMI255-12", match_bin: "BOLD:AAA7631",
      }],
      queries: [{ query_id: "Q1", matches: 1 }],
    };
    const html = renderBatchIdTable(result, 10);
    expect(html).toContain("(10 records selected)");
    for (const label of ["Processid", "Sampleid", "% Match", "Overlap (bp)",
                         "Match Species", "Match Processid", "Match BIN"]) {
      expect(html).toContain(`<th>${label}</th>`);
    }
    expect(html).toContain("<td>612</td>");
  });
});

describe("project console", () => {
  it("links issues to the offending records", () => {
    const summary: ProjectSummary = {
      project: "MHAHG", specimens: 4, sequences: 3, bins: 2,
      sequence_recovery_rate: 0.75, bin_discordance_rate: 0.0,
      sequence_length_histogram: { edges: [0, 100], counts: [3] },
      issues: [{ sample_id: "S-9", process_id: "P9", issue: "stop-codon" }],
    };
    const html = renderProjectConsole(summary);
    expect(html).toContain('href="#/records/S-9"');
    expect(html).toContain("stop-codon");
    expect(html).toContain('<span id="metric-specimens">4</span>');
  });
});

describe("specimen page fragments", () => {
  it("renders the conflict prompt with both values", () => {
    const html = renderConflictPrompt({
      recordId: "S1", staleVersion: 1, currentVersion: 3,
      fields: [{ field: "taxonomy.species", yours: "A", theirs: "B" }],
    });
    expect(html).toContain('id="conflict-prompt"');
    expect(html).toContain("v1");
    expect(html).toContain("v3");
    expect(html).toContain("&quot;A&quot;");
    expect(html).toContain("&quot;B&quot;");
  });

  it("renders activity rows in order", () => {
    const html = renderActivity([
      { timestamp: "2026-02-01T10:00:00Z", actor: "alice", action: "Modify-Specimen" },
      { timestamp: "2026-01-01T10:00:00Z", actor: "alice", action: "New-Specimen" },
    ]);
    const first = html.indexOf("Modify-Specimen");
    const second = html.indexOf("New-Specimen");
    expect(first).toBeGreaterThan(-1);
    expect(first).toBeLessThan(second);
  });

  it("renders an empty delta distinctly", () => {
    expect(renderDelta([])).toContain("no changes in window");
    const html = renderDelta([{ field: "specimen.taxonomy.species", old: "A", new: "B" }]);
    expect(html).toContain("specimen.taxonomy.species");
  });
});
