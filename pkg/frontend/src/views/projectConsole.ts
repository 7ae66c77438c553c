// Project console: counts, recovery/discordance rates, length histogram,
// and clickable issue links. Everything comes from one summary payload.

import { esc } from "../dom.js";
import type { ProjectSummary } from "../types.js";

export function renderProjectConsole(summary: ProjectSummary): string {
  const pct = (x: number) => `${(100 * x).toFixed(1)}%`;
  const histogram = renderHistogram(summary.sequence_length_histogram);
  const issues = summary.issues.length
    ? summary.issues
        .map(
          (issue) =>
            `<li><a class="issue-link" href="#/records/${esc(issue.sample_id)}">` +
            `${esc(issue.sample_id)}</a> — ${esc(issue.issue)}</li>`,
        )
        .join("\n")
    : "<li>No issues detected</li>";
  return `
<section class="project-console" data-project="${esc(summary.project)}">
  <h1>Project ${esc(summary.project)}</h1>
  <div class="metrics">
    <div class="metric"><span id="metric-specimens">${summary.specimens}</span> specimens</div>
    <div class="metric"><span id="metric-sequences">${summary.sequences}</span> sequences</div>
    <div class="metric"><span id="metric-bins">${summary.bins}</span> BINs</div>
    <div class="metric">sequence recovery ${pct(summary.sequence_recovery_rate)}</div>
    <div class="metric">BIN discordance ${pct(summary.bin_discordance_rate)}</div>
  </div>
  <h2>Sequence lengths</h2>
  ${histogram}
  <h2>Issues</h2>
  <ul class="issues">${issues}</ul>
  <nav><a href="#/projects/${esc(summary.project)}/records">Open record console</a></nav>
</section>`;
}

function renderHistogram(h: { edges: number[]; counts: number[] }): string {
  if (!h.counts.length) return `<p class="empty">no sequences yet</p>`;
  const max = Math.max(...h.counts, 1);
  const bars = h.counts
    .map((count, i) => {
      const height = Math.round((100 * count) / max);
      const label = `${h.edges[i]}–${h.edges[i + 1]} bp: ${count}`;
      return `<div class="bar" style="height:${height}%" title="${esc(label)}"></div>`;
    })
    .join("");
  return `<div class="histogram">${bars}</div>`;
}
