// Specimen page: identifiers, taxonomy, collection data, annotations, the
// activity report, and the edit form (with the conflict prompt when a
// commit races another session).

import { esc, table } from "../dom.js";
import type { ConflictPrompt } from "../editSession.js";
import type { DeltaTriple, SpecimenPage } from "../types.js";

const EDITABLE_FIELDS: [string, string][] = [
  ["taxonomy.species", "Species"],
  ["taxonomy.genus", "Genus"],
  ["taxonomy.family", "Family"],
  ["collection.site", "Exact site"],
  ["collection.province", "Province/State"],
  ["attributes.sex", "Sex"],
  ["attributes.life_stage", "Life stage"],
];

export function renderSpecimenPage(page: SpecimenPage): string {
  const record = page.record;
  const taxonomy = Object.entries(record.taxonomy)
    .filter(([, v]) => v)
    .map(([rank, name]) => `<dt>${esc(rank)}</dt><dd>${esc(name)}</dd>`)
    .join("");
  const tags = record.tags
    .map((t) => `<span class="tag">${esc(t.label)}</span>`)
    .join(" ");
  const sequences = page.sequences
    .map(
      (s) =>
        `<li><a href="#/sequences/${esc(s.process_id)}:${esc(s.marker_code)}">` +
        `${esc(s.process_id)} ${esc(s.marker_code)}</a> (${s.length} bp` +
        `${s.flags.length ? ", flags: " + s.flags.map(esc).join(", ") : ""})</li>`,
    )
    .join("");
  const bins = page.bins
    .map((b) => `<li><a href="#/bins/${esc(b.bin_uri)}">${esc(b.bin_uri)}</a> ` +
      `[${b.member_count}]</li>`)
    .join("");
  return `
<section class="specimen-page" data-sample-id="${esc(record.sample_id)}"
         data-version="${record.version}">
  <h1>${esc(record.sample_id)}</h1>
  <p>Project ${esc(record.project)} · ${esc(record.storing_institution)} ·
     ${esc(record.visibility)} · v${record.version}</p>
  <h2>Taxonomy</h2><dl class="taxonomy">${taxonomy}</dl>
  <h2>Tags</h2><div id="tag-strip">${tags || "none"}</div>
  <h2>Sequences</h2><ul>${sequences || "<li>none</li>"}</ul>
  <h2>Barcode Index Numbers</h2><ul>${bins || "<li>none</li>"}</ul>
  <h2>Edit specimen</h2>
  ${renderEditForm(record.version)}
  <div id="conflict-slot"></div>
  <h2>Recent activity</h2>
  ${renderActivity(page.activity)}
  <h2>Delta view</h2>
  <form id="delta-form">
    <input id="delta-from" placeholder="2026-W01"> →
    <input id="delta-to" placeholder="2026-W09">
    <button id="delta-show" type="submit">Show delta view</button>
  </form>
  <div id="delta-slot"></div>
</section>`;
}

export function renderEditForm(version: number): string {
  const fields = EDITABLE_FIELDS.map(
    ([path, label]) =>
      `<label>${esc(label)} <input class="edit-field" data-path="${esc(path)}"></label>`,
  ).join("\n");
  return `
<form id="edit-form" data-base-version="${version}">
  ${fields}
  <button type="submit" id="edit-save">Save</button>
  <button type="button" id="edit-cancel">Cancel</button>
</form>`;
}

export function renderActivity(rows: { timestamp: string; actor: string; action: string }[]): string {
  if (!rows.length) return `<p class="empty">no events</p>`;
  return table(
    ["Timestamp", "Who", "Action"],
    rows.map((e) => [esc(e.timestamp), esc(e.actor), esc(e.action)]),
    'id="activity-table"',
  );
}

export function renderConflictPrompt(prompt: ConflictPrompt): string {
  const rows = prompt.fields.map((f) => [
    esc(f.field),
    esc(JSON.stringify(f.yours)),
    esc(JSON.stringify(f.theirs)),
  ]);
  return `
<div class="conflict-prompt" id="conflict-prompt" role="alertdialog">
  <p>This record changed while you were editing
     (your edit is based on v${prompt.staleVersion}, the record is at
     v${prompt.currentVersion}). Choose which values to keep:</p>
  ${table(["Field", "Your value", "Current value"], rows, 'id="conflict-table"')}
  <button id="conflict-keep-mine">Keep my values</button>
  <button id="conflict-take-theirs">Take current values</button>
</div>`;
}

export function renderDelta(triples: DeltaTriple[]): string {
  if (!triples.length) return `<p class="empty" id="delta-empty">no changes in window</p>`;
  return table(
    ["Field", "Old", "New"],
    triples.map((t) => [esc(t.field), esc(JSON.stringify(t.old)), esc(JSON.stringify(t.new))]),
    'id="delta-table"',
  );
}
