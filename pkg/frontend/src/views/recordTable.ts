// Record console: one row per record with server-computed feature badges,
// checkbox selection, and the download / batch-ID / add-to-dataset actions.

import { badge, esc, table } from "../dom.js";
import type { RecordRow } from "../types.js";

export const RECORD_TABLE_COLUMNS = [
  "", "Sample ID", "Process IDs", "Species", "GPS", "Images", "Traces",
  "Compliant", "Stop codon", "Contamination", "Flagged", "Tags", "BINs",
];

export interface TableFilter {
  text?: string;
  flaggedOnly?: boolean;
}

export function filterRows(rows: RecordRow[], filter: TableFilter): RecordRow[] {
  let out = rows;
  if (filter.flaggedOnly) out = out.filter((r) => r.flagged);
  if (filter.text) {
    const needle = filter.text.toLowerCase();
    out = out.filter((r) =>
      [r.sample_id, r.species ?? "", ...r.process_ids, ...r.tags]
        .some((v) => v.toLowerCase().includes(needle)),
    );
  }
  return out;
}

export function renderRecordTable(rows: RecordRow[]): string {
  const body = rows.map((row) => [
    `<input type="checkbox" class="row-select" data-sample-id="${esc(row.sample_id)}">`,
    `<a href="#/records/${esc(row.sample_id)}">${esc(row.sample_id)}</a>`,
    row.process_ids.map(esc).join("<br>"),
    esc(row.species ?? ""),
    badge(row.has_gps, "GPS coordinates"),
    badge(row.has_images, "images"),
    badge(row.has_traces, "trace files"),
    badge(row.barcode_compliant, "barcode compliant"),
    badge(row.stop_codon, "stop codon"),
    badge(row.contamination, "contamination"),
    badge(row.flagged, "flagged"),
    row.tags.map((t) => `<span class="tag">${esc(t)}</span>`).join(" "),
    row.bins
      .map((b) => `<a href="#/bins/${esc(b)}">${esc(b)}</a>`)
      .join("<br>"),
  ]);
  return `
<section class="record-console">
  <div class="actions">
    <input id="table-filter" placeholder="filter rows">
    <label><input type="checkbox" id="flagged-only"> flagged only</label>
    <button id="action-download" disabled>Download</button>
    <button id="action-batch-id" disabled>Batch ID</button>
    <button id="action-add-to-dataset" disabled>Add to dataset</button>
    <span id="selection-count">0 selected</span>
  </div>
  ${table(RECORD_TABLE_COLUMNS, body, 'id="record-table"')}
</section>`;
}

export function selectedSampleIds(root: ParentNode): string[] {
  const boxes = root.querySelectorAll<HTMLInputElement>(".row-select:checked");
  return Array.from(boxes).map((el) => el.dataset.sampleId ?? "").filter(Boolean);
}
