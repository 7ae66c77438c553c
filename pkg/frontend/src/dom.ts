// Small HTML helpers: views render escaped template strings, controllers
// bind events after mounting.

export function esc(value: unknown): string {
  if (value === null || value === undefined) return "";
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function table(columns: string[], rows: string[][], attrs = ""): string {
  const head = columns.map((c) => `<th>${esc(c)}</th>`).join("");
  const body = rows
    .map((cells) => `<tr>${cells.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("\n");
  return `<table ${attrs}><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

export function badge(on: boolean | null, label: string): string {
  if (on === null) return `<span class="badge badge-unknown" title="${esc(label)}">·</span>`;
  const cls = on ? "badge badge-on" : "badge badge-off";
  return `<span class="${cls}" title="${esc(label)}">${on ? "✓" : "—"}</span>`;
}

export function mount(el: Element, html: string): void {
  el.innerHTML = html;
}
