// Batch identification results: the standard column layout, rows grouped
// by query, straight off the server payload.

import { esc, table } from "../dom.js";
import type { BatchIdResult } from "../types.js";

export const BATCH_ID_LABELS: Record<string, string> = {
  query_process_id: "Processid",
  query_sample_id: "Sampleid",
  current_order: "Current Order",
  current_identification: "Current ID",
  match_percent: "% Match",
  overlap_bp: "Overlap (bp)",
  match_order: "Match Order",
  match_family: "Match Family",
  match_species: "Match Species",
  match_subspecies: "Match Subspecies",
  match_process_id: "Match Processid",
  match_bin: "Match BIN",
};

export function renderBatchIdTable(result: BatchIdResult, selectedCount: number): string {
  const labels = result.columns.map((c) => BATCH_ID_LABELS[c] ?? c);
  const rows = result.rows.map((row) =>
    result.columns.map((c) => esc(row[c] as string | number | null)),
  );
  const failures = result.queries
    .filter((q) => q.error)
    .map((q) => `<li>${esc(q.query_id)}: ${esc(q.error)}</li>`)
    .join("");
  return `
<section class="batch-id">
  <h1>Identification Engine (${selectedCount} records selected)</h1>
  ${failures ? `<ul class="failures">${failures}</ul>` : ""}
  ${table(labels, rows, 'id="batch-id-table"')}
</section>`;
}
