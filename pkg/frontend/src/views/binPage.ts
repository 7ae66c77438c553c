// BIN page: details block, nearest-neighbor block, taxonomy tallies,
// collection sites, and the distance-distribution histogram.

import { esc } from "../dom.js";
import type { BinPage } from "../types.js";

export function renderBinPage(page: BinPage): string {
  const d = page.details;
  const pdist = (x: number | null | undefined) =>
    x === null || x === undefined ? "—" : `${(100 * x).toFixed(2)}% (p-dist)`;
  const nn = page.nearest_neighbor;
  const tallies = Object.entries(page.taxonomy_tallies)
    .map(([rank, names]) => {
      const entries = Object.entries(names)
        .map(([name, count]) => `${esc(name)} [${count}]`)
        .join(", ");
      return `<dt>${esc(rank)}</dt><dd>${entries}</dd>`;
    })
    .join("");
  const bars = page.distance_histogram.counts
    .map((c) => `<div class="bar" data-count="${c}"></div>`)
    .join("");
  return `
<section class="bin-page" data-bin="${esc(d.bin_uri)}">
  <h1>Barcode Index Number ${esc(d.bin_uri)}</h1>
  ${d.all_members_compliant ? '<p class="badge-compliant">BIN compliant with metadata requirements</p>' : ""}
  <dl class="bin-details">
    <dt>DOI</dt><dd>${esc(d.doi ?? "")}</dd>
    <dt>Member count</dt><dd>${d.member_count} [${d.public_member_count} public]</dd>
    <dt>Barcode compliant members</dt><dd>${d.compliant_member_count}</dd>
    <dt>Average distance</dt><dd>${pdist(d.avg_distance)}</dd>
    <dt>Maximum distance</dt><dd>${pdist(d.max_distance)}</dd>
    <dt>Founding record</dt><dd>${esc(d.founding ?? "")}</dd>
  </dl>
  ${nn ? `
  <h2>Nearest neighbor</h2>
  <dl class="nn-details">
    <dt>Nearest BIN</dt><dd><a href="#/bins/${esc(nn.bin_uri)}">${esc(nn.bin_uri)}</a></dd>
    <dt>Distance</dt><dd>${pdist(nn.distance)}</dd>
    <dt>Member count</dt><dd>${nn.member_count}</dd>
    <dt>Nearest member</dt><dd>${esc(nn.nearest_member)}</dd>
    <dt>Nearest member taxonomy</dt><dd>${nn.nearest_member_taxonomy.map(esc).join(", ")}</dd>
  </dl>` : ""}
  <h2>Taxonomy</h2><dl class="tallies">${tallies}</dl>
  <h2>Collection sites</h2>
  <ul class="sites">${page.collection_sites
    .map((s) => `<li>${s.latitude}, ${s.longitude} ${esc(s.country ?? "")}</li>`)
    .join("")}</ul>
  <h2>Distance distribution</h2>
  <div class="histogram">${bars}</div>
</section>`;
}
