// Console contract against a live server: seed a project, edit a species
// name and observe the new audit row, plant a two-session conflict and
// observe the conflict prompt, run batch ID on 10 selected records and
// check the rendered column set. Drives the same client/controller code
// the browser runs; rendering is asserted on the produced HTML.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WorkbenchClient } from "../src/api.js";
import { EditSession } from "../src/editSession.js";
import { renderBatchIdTable } from "../src/views/batchId.js";
import { renderActivity, renderConflictPrompt } from "../src/views/specimenPage.js";
import { renderRecordTable } from "../src/views/recordTable.js";

const PORT = 8399;
const BASE = `http://127.0.0.1:${PORT}`;
const TOKEN = "e2e-fixture-token";

let server: ChildProcess;

async function waitForHealth(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/v4/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("fixture server did not come up");
}

beforeAll(async () => {
  server = spawn("python3", ["tests/fixture_server.py", String(PORT), TOKEN], {
    cwd: new URL("..", import.meta.url).pathname,
    stdio: "inherit",
  });
  await waitForHealth();
}, 40_000);

afterAll(() => {
  server?.kill();
});

const alice = () => new WorkbenchClient({ baseUrl: BASE, token: TOKEN });
const bob = () => new WorkbenchClient({ baseUrl: BASE, token: `${TOKEN}-bob` });

describe("console contract", () => {
  it("shows the seeded project with 10 records", async () => {
    const summary = await alice().projectSummary("MHAHG");
    expect(summary.specimens).toBe(10);
    const console_ = await alice().recordConsole("MHAHG");
    expect(console_.rows).toHaveLength(10);
    const html = renderRecordTable(console_.rows);
    expect(html).toContain("MHAHG-S000");
  });

  it("edit commits and the activity panel shows the new audit row", async () => {
    const api = alice();
    const before = await api.specimenPage("MHAHG-S000");
    const beforeModifies = before.activity
      .filter((e) => e.action === "Modify-Specimen").length;

    const session = new EditSession("MHAHG-S000", before.record.version);
    session.stage("taxonomy.species", "Astraptes janeira");
    const result = await session.commit(api);
    expect(result.kind).toBe("committed");

    const after = await api.specimenPage("MHAHG-S000");
    const afterModifies = after.activity
      .filter((e) => e.action === "Modify-Specimen").length;
    expect(afterModifies).toBe(beforeModifies + 1);
    expect(after.record.taxonomy.species).toBe("Astraptes janeira");

    const html = renderActivity(after.activity);
    expect(html).toContain("Modify-Specimen");
    expect(html.indexOf("Modify-Specimen")).toBeLessThan(html.indexOf("New-Specimen"));
  });

  it("two sessions racing produce a conflict prompt, never a silent overwrite", async () => {
    const pageA = await alice().specimenPage("MHAHG-S001");
    const pageB = await bob().specimenPage("MHAHG-S001");

    const sessionA = new EditSession("MHAHG-S001", pageA.record.version);
    sessionA.stage("taxonomy.species", "Astraptes tucuti");
    const committed = await sessionA.commit(alice());
    expect(committed.kind).toBe("committed");

    const sessionB = new EditSession("MHAHG-S001", pageB.record.version);
    sessionB.stage("taxonomy.species", "Astraptes enotrus");
    const raced = await sessionB.commit(bob());
    expect(raced.kind).toBe("conflict");
    if (raced.kind !== "conflict") return;
    expect(raced.prompt.fields[0]).toEqual({
      field: "taxonomy.species",
      yours: "Astraptes enotrus",
      theirs: "Astraptes tucuti",
    });

    const html = renderConflictPrompt(raced.prompt);
    expect(html).toContain('id="conflict-prompt"');
    expect(html).toContain("Astraptes enotrus");
    expect(html).toContain("Astraptes tucuti");

    // alice's committed value survived the race
    const current = await alice().specimenPage("MHAHG-S001");
    expect(current.record.taxonomy.species).toBe("Astraptes tucuti");

    // resolving with "keep mine" rebases and commits cleanly
    const rebased = sessionB.resolve(raced.prompt, "mine");
    const second = await rebased.commit(bob());
    expect(second.kind).toBe("committed");
  });

  it("batch ID on 10 selected records renders the standard column set", async () => {
    const api = alice();
    const console_ = await api.recordConsole("MHAHG");
    const selected = console_.rows.slice(0, 10).map((r) => r.sample_id);
    const processIds = console_.rows
      .filter((r) => selected.includes(r.sample_id))
      .flatMap((r) => r.process_ids);
    expect(processIds).toHaveLength(10);

    const fasta = await api.publicSequenceFasta(processIds);
    expect(fasta.split(">").length - 1).toBe(10);

    const result = await api.identify(fasta);
    expect(result.rows.length).toBeGreaterThan(0);
    const html = renderBatchIdTable(result, selected.length);
    for (const label of ["Processid", "Sampleid", "Current Order", "Current ID",
                         "% Match", "Overlap (bp)", "Match Order", "Match Family",
                         "Match Species", "Match Subspecies", "Match Processid",
                         "Match BIN"]) {
      expect(html).toContain(`<th>${label}</th>`);
    }
    expect(html).toContain("(10 records selected)");
    // self-matches at 100%
    expect(html).toContain("<td>100</td>");
  });

  it("badges are taken from the server payload verbatim", async () => {
    const console_ = await alice().recordConsole("MHAHG");
    const row = console_.rows[0];
    const html = renderRecordTable([row]);
    const compliantMark = row.barcode_compliant ? "✓" : "—";
    expect(html).toContain(`title="barcode compliant">${compliantMark}`);
  });
});
