"""Deterministic response rendering: TSV, JSON, XML, FASTA.

All formats carry identical field values for the same result set; the
format choice only changes the envelope.  Rendering must be byte-stable
for a fixed (query, snapshot) pair, so all iteration happens over
explicitly ordered columns and pre-sorted rows.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from barcodelab.canonical import dumps

CONTENT_TYPES = {
    "tsv": "text/tab-separated-values; charset=utf-8",
    "json": "application/json",
    "xml": "application/xml",
    "fasta": "text/x-fasta; charset=utf-8",
    "zip": "application/zip",
}


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render_tsv(columns: list, rows: list) -> str:
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(format_value(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(columns: list, rows: list, meta: dict | None = None) -> str:
    body = dict(meta or {})
    body["columns"] = columns
    body["records"] = [{c: row.get(c) for c in columns} for row in rows]
    return dumps(body)


def render_xml(columns: list, rows: list, root: str = "results",
               row_element: str = "record", meta: dict | None = None) -> str:
    attrs = "".join(
        f' {key}="{escape(format_value(value), {chr(34): "&quot;"})}"'
        for key, value in sorted((meta or {}).items())
    )
    parts = [f"<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<{root}{attrs}>"]
    for row in rows:
        parts.append(f"  <{row_element}>")
        for column in columns:
            value = row.get(column)
            if value is None:
                parts.append(f"    <{column}/>")
            else:
                parts.append(f"    <{column}>{escape(format_value(value))}</{column}>")
        parts.append(f"  </{row_element}>")
    parts.append(f"</{root}>")
    return "\n".join(parts) + "\n"


def render_fasta_rows(rows: list, width: int = 60) -> str:
    """FASTA from sequence rows (process_id, marker_code, species, nucleotides)."""
    out = []
    for row in rows:
        extra_bits = [row.get("marker_code") or "", row.get("species") or ""]
        extra = "|".join(extra_bits).rstrip("|")
        defline = f">{row['process_id']}"
        if extra:
            defline += f"|{extra}"
        out.append(defline)
        seq = row.get("nucleotides") or ""
        for i in range(0, len(seq), width):
            out.append(seq[i : i + width])
    return "\n".join(out) + "\n"


def render(fmt: str, columns: list, rows: list, meta: dict | None = None,
           xml_root: str = "results", xml_row: str = "record") -> tuple:
    """(body_text, content_type) for the requested format."""
    if fmt == "tsv":
        return render_tsv(columns, rows), CONTENT_TYPES["tsv"]
    if fmt == "json":
        return render_json(columns, rows, meta), CONTENT_TYPES["json"]
    if fmt == "xml":
        return render_xml(columns, rows, xml_root, xml_row, meta), CONTENT_TYPES["xml"]
    if fmt == "fasta":
        return render_fasta_rows(rows), CONTENT_TYPES["fasta"]
    raise ValueError(f"unsupported format: {fmt}")
