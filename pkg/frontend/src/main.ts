// Console bootstrap: hash routing plus event wiring around the view
// renderers. All state round-trips through the workbench API; the only
// client-side state is the auth token and the current edit session.

import { RequestFailed, WorkbenchClient } from "./api.js";
import { esc, mount } from "./dom.js";
import { EditSession, type ConflictPrompt } from "./editSession.js";
import { renderBatchIdTable } from "./views/batchId.js";
import { renderBinPage } from "./views/binPage.js";
import { renderProjectConsole } from "./views/projectConsole.js";
import { filterRows, renderRecordTable, selectedSampleIds } from "./views/recordTable.js";
import {
  renderActivity,
  renderConflictPrompt,
  renderDelta,
  renderSpecimenPage,
} from "./views/specimenPage.js";
import type { RecordRow } from "./types.js";

const root = () => document.getElementById("app")!;

function client(): WorkbenchClient {
  return new WorkbenchClient({ token: localStorage.getItem("token") ?? "" });
}

function renderLogin(): void {
  mount(root(), `
<section class="login">
  <h1>Curation console</h1>
  <form id="login-form">
    <label>Project code <input id="login-project" placeholder="MHAHG"></label>
    <label>API token <input id="login-token" type="password"></label>
    <button type="submit">Open</button>
  </form>
</section>`);
  document.getElementById("login-form")!.addEventListener("submit", (event) => {
    event.preventDefault();
    const token = (document.getElementById("login-token") as HTMLInputElement).value;
    const project = (document.getElementById("login-project") as HTMLInputElement).value;
    localStorage.setItem("token", token);
    location.hash = `#/projects/${project}`;
  });
}

function showError(error: unknown): void {
  const message = error instanceof RequestFailed
    ? `${error.status}: ${error.message}` : String(error);
  const slot = document.getElementById("error-slot");
  if (slot) slot.innerHTML = `<p class="error">${esc(message)}</p>`;
  else mount(root(), `<p class="error">${esc(message)}</p>`);
}

async function routeProject(code: string): Promise<void> {
  const summary = await client().projectSummary(code);
  mount(root(), `<div id="error-slot"></div>` + renderProjectConsole(summary));
}

async function routeRecordConsole(code: string): Promise<void> {
  const console_ = await client().recordConsole(code);
  let filterText = "";
  let flaggedOnly = false;

  const draw = () => {
    const rows: RecordRow[] = filterRows(console_.rows, {
      text: filterText, flaggedOnly,
    });
    mount(root(), `<div id="error-slot"></div>` + renderRecordTable(rows));
    bind();
  };

  const bind = () => {
    const filterInput = document.getElementById("table-filter") as HTMLInputElement;
    filterInput.value = filterText;
    filterInput.addEventListener("change", () => {
      filterText = filterInput.value;
      draw();
    });
    const flaggedBox = document.getElementById("flagged-only") as HTMLInputElement;
    flaggedBox.checked = flaggedOnly;
    flaggedBox.addEventListener("change", () => {
      flaggedOnly = flaggedBox.checked;
      draw();
    });
    const refresh = () => {
      const count = selectedSampleIds(document).length;
      document.getElementById("selection-count")!.textContent = `${count} selected`;
      for (const id of ["action-download", "action-batch-id", "action-add-to-dataset"]) {
        (document.getElementById(id) as HTMLButtonElement).disabled = count === 0;
      }
    };
    document.querySelectorAll(".row-select").forEach((el) =>
      el.addEventListener("change", refresh));
    document.getElementById("action-batch-id")!.addEventListener("click", async () => {
      await runBatchId(selectedSampleIds(document), console_.rows);
    });
    document.getElementById("action-download")!.addEventListener("click", async () => {
      const ids = selectedSampleIds(document);
      const processIds = console_.rows
        .filter((r) => ids.includes(r.sample_id))
        .flatMap((r) => r.process_ids);
      const fasta = await client().publicSequenceFasta(processIds);
      const blob = new Blob([fasta], { type: "text/x-fasta" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "selection.fasta";
      a.click();
    });
    document.getElementById("action-add-to-dataset")!.addEventListener("click", async () => {
      const code_ = prompt("Dataset code (DS-...)");
      if (!code_) return;
      try {
        await client().addToDataset(code_, selectedSampleIds(document));
        alert("added");
      } catch (error) {
        showError(error);
      }
    });
  };

  draw();
}

async function runBatchId(sampleIds: string[], rows: RecordRow[]): Promise<void> {
  const processIds = rows
    .filter((r) => sampleIds.includes(r.sample_id))
    .flatMap((r) => r.process_ids);
  const fasta = await client().publicSequenceFasta(processIds);
  const result = await client().identify(fasta);
  mount(root(), `<div id="error-slot"></div>` +
    renderBatchIdTable(result, sampleIds.length));
}

async function routeSpecimen(recordId: string): Promise<void> {
  const api = client();
  const page = await api.specimenPage(recordId);
  mount(root(), `<div id="error-slot"></div>` + renderSpecimenPage(page));

  let session = new EditSession(page.record.sample_id, page.record.version);

  const bindConflict = (prompt: ConflictPrompt) => {
    document.getElementById("conflict-slot")!.innerHTML = renderConflictPrompt(prompt);
    document.getElementById("conflict-keep-mine")!.addEventListener("click", async () => {
      session = session.resolve(prompt, "mine");
      const result = await session.commit(api);
      if (result.kind === "committed") await routeSpecimen(recordId);
      else if (result.kind === "conflict") bindConflict(result.prompt);
    });
    document.getElementById("conflict-take-theirs")!.addEventListener("click", async () => {
      session = session.resolve(prompt, "theirs");
      await routeSpecimen(recordId);
    });
  };

  document.getElementById("edit-form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    document.querySelectorAll<HTMLInputElement>(".edit-field").forEach((input) => {
      if (input.value) session.stage(input.dataset.path!, input.value);
    });
    try {
      const result = await session.commit(api);
      if (result.kind === "committed") {
        await routeSpecimen(recordId); // activity panel refreshes with the new event
      } else if (result.kind === "conflict") {
        bindConflict(result.prompt);
      }
    } catch (error) {
      showError(error);
    }
  });
  document.getElementById("edit-cancel")!.addEventListener("click", () => {
    session.cancel();
    document.querySelectorAll<HTMLInputElement>(".edit-field").forEach((i) => (i.value = ""));
  });
  document.getElementById("delta-form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    const fromWeek = (document.getElementById("delta-from") as HTMLInputElement).value;
    const toWeek = (document.getElementById("delta-to") as HTMLInputElement).value;
    try {
      const delta = await api.deltaView(recordId, fromWeek, toWeek);
      document.getElementById("delta-slot")!.innerHTML = renderDelta(delta.fields);
    } catch (error) {
      showError(error);
    }
  });
}

async function routeSequence(seqKey: string): Promise<void> {
  const page = await client().sequencePage(seqKey);
  mount(root(), `<pre>${esc(JSON.stringify(page, null, 2))}</pre>`);
}

async function routeBin(binUri: string): Promise<void> {
  const page = await client().binPage(binUri);
  mount(root(), `<div id="error-slot"></div>` + renderBinPage(page));
}

export async function route(): Promise<void> {
  const hash = location.hash.replace(/^#\//, "");
  try {
    if (!hash) return renderLogin();
    const [head, code, sub] = hash.split("/");
    if (head === "projects" && code && sub === "records") return await routeRecordConsole(code);
    if (head === "projects" && code) return await routeProject(code);
    if (head === "records" && code) return await routeSpecimen(decodeURIComponent(code));
    if (head === "sequences" && code) return await routeSequence(decodeURIComponent(code));
    if (head === "bins" && code) return await routeBin(decodeURIComponent(code));
    renderLogin();
  } catch (error) {
    showError(error);
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" &&
    document.getElementById("app")) {
  window.addEventListener("hashchange", () => void route());
  void route();
}
