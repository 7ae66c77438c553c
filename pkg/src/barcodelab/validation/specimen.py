"""Three-tier submission checks for specimen spreadsheets.

Rows come in with the submission template's display headers; validation
normalizes them into record fields, emitting issues per row.  A batch with
any Paused or Rejected issue persists nothing (all-or-nothing).
"""

from __future__ import annotations

import csv
import io
import re
from datetime import datetime

from barcodelab import errors
from barcodelab.model.records import RANKS, TaxonomyAssignment
from barcodelab.validation.issues import ValidationIssue, blocks_batch

# display header -> (section, field)
HEADER_MAP = {
    "sample id": ("top", "sample_id"),
    "field id": ("top", "field_id"),
    "museum id": ("top", "museum_id"),
    "institution storing": ("top", "storing_institution"),
    "storing institution": ("top", "storing_institution"),
    "kingdom": ("taxonomy", "kingdom"),
    "phylum": ("taxonomy", "phylum"),
    "class": ("taxonomy", "class"),
    "order": ("taxonomy", "order"),
    "family": ("taxonomy", "family"),
    "subfamily": ("taxonomy", "subfamily"),
    "tribe": ("taxonomy", "tribe"),
    "genus": ("taxonomy", "genus"),
    "species": ("taxonomy", "species"),
    "subspecies": ("taxonomy", "subspecies"),
    "identifier": ("taxonomy", "identifier_name"),
    "identified by": ("taxonomy", "identifier_name"),
    "identification method": ("taxonomy", "identification_method"),
    "identifier email": ("taxonomy", "identifier_email"),
    "taxonomy notes": ("taxonomy", "notes"),
    "country": ("collection", "country"),
    "province/state": ("collection", "province"),
    "province": ("collection", "province"),
    "region": ("collection", "region"),
    "sector": ("collection", "sector"),
    "exact site": ("collection", "site"),
    "site": ("collection", "site"),
    "lat": ("collection", "latitude"),
    "lon": ("collection", "longitude"),
    "elevation": ("collection", "elevation"),
    "depth": ("collection", "depth"),
    "collectors": ("collection", "collectors"),
    "collected by": ("collection", "collectors"),
    "collection date": ("collection", "collection_date"),
    "date collected": ("collection", "collection_date"),
    "collection time": ("collection", "collection_time"),
    "site code": ("collection", "site_code"),
    "collection event id": ("collection", "collection_event_id"),
    "collection notes": ("collection", "notes"),
    "gps obfuscated": ("top", "gps_obfuscated"),
    "sex": ("attributes", "sex"),
    "life stage": ("attributes", "life_stage"),
    "tissue descriptor": ("attributes", "tissue_type"),
    "tissue type": ("attributes", "tissue_type"),
    "reproduction": ("attributes", "reproduction"),
    "extra info": ("attributes", "extra_info"),
    "voucher status": ("attributes", "voucher_type"),
    "voucher type": ("attributes", "voucher_type"),
    "sampling protocol": ("attributes", "sampling_protocol"),
    "associated taxa": ("attributes", "associated_taxa"),
    "associated specimens": ("attributes", "associated_specimens"),
    "notes": ("attributes", "notes"),
}

_DATE_FORMATS = ["%Y-%m-%d", "%d-%b-%Y", "%b-%d-%Y", "%Y/%m/%d", "%d-%m-%Y"]

_DECIMAL_COMMA_RE = re.compile(r"^(-?\d+),(\d+)$")


def parse_submission_table(text: str) -> list:
    """Parse a TSV/CSV submission file into raw row dicts."""
    sample = text[:4096]
    delimiter = "\t" if "\t" in sample else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    return [dict(row) for row in reader]


def _norm_coordinate(raw: str) -> tuple:
    """(value, corrected) where corrected is the fixed string form, if any."""
    raw = raw.strip()
    m = _DECIMAL_COMMA_RE.match(raw)
    corrected = None
    if m:
        raw = f"{m.group(1)}.{m.group(2)}"
        corrected = raw
    return float(raw), corrected


def _decimal_places(raw: str) -> int:
    raw = raw.strip().replace(",", ".")
    if "." not in raw:
        return 0
    return len(raw.split(".", 1)[1].rstrip())


def _norm_date(raw: str) -> tuple:
    raw = raw.strip()
    for i, fmt in enumerate(_DATE_FORMATS):
        try:
            parsed = datetime.strptime(raw, fmt)
        except ValueError:
            continue
        iso = parsed.strftime("%Y-%m-%d")
        return iso, (iso if i > 0 or iso != raw else None)
    raise ValueError(f"unparseable date: {raw!r}")


def validate_specimen_batch(platform, raw_rows: list) -> dict:
    """Validate raw submission rows.

    Returns {"issues": per-row issue lists, "rows": normalized rows,
    "blocked": bool}.  Normalized rows are only safe to persist when the
    batch is not blocked.
    """
    if not raw_rows:
        raise errors.EmptyBatch("no rows in submission")
    all_issues: list = []
    normalized: list = []
    seen_sample_ids: set = set()
    for idx, raw in enumerate(raw_rows):
        issues: list = []
        row = _normalize_row(platform, raw, idx, issues, seen_sample_ids)
        all_issues.append(issues)
        normalized.append(row)
    return {
        "issues": all_issues,
        "rows": normalized,
        "blocked": blocks_batch([i for row in all_issues for i in row]),
    }


def _normalize_row(platform, raw: dict, idx: int, issues: list, seen: set) -> dict:
    top: dict = {}
    taxonomy: dict = {}
    collection: dict = {}
    attributes: dict = {}
    sections = {"top": top, "taxonomy": taxonomy, "collection": collection, "attributes": attributes}
    raw_strings: dict = {}
    for header, value in raw.items():
        if header is None or value is None:
            continue
        target = HEADER_MAP.get(header.strip().lower())
        if target is None:
            continue
        value = value.strip()
        if not value:
            continue
        section, field = target
        sections[section][field] = value
        raw_strings[field] = value

    def issue(category, field, message, resolution, **kw):
        issues.append(
            ValidationIssue(category, field, message, resolution, row=idx,
                            record=top.get("sample_id"), **kw)
        )

    # --- compliance: identity fields -------------------------------------
    sample_id = top.get("sample_id")
    if not sample_id:
        issue("Compliance", "sample_id", "row has no Sample ID", "Rejected")
    else:
        if sample_id in seen or platform.store.has_specimen(sample_id):
            issue("Compliance", "sample_id", f"Sample ID already in use: {sample_id}", "Paused")
        seen.add(sample_id)
        if len(sample_id) < 3:
            issue("Completeness", "sample_id",
                  f"identifier too short to stay unique: {sample_id!r}", "Paused")
    if not top.get("field_id") and not top.get("museum_id"):
        issue("Compliance", "field_id", "neither Field ID nor Museum ID provided", "Paused")

    institution = top.get("storing_institution")
    if not institution:
        issue("Compliance", "storing_institution", "specimen depository not specified", "Paused")
    elif not platform.store.has_vocab("institution", institution):
        issue("Consistency", "storing_institution",
              f"depository not registered: {institution}", "Paused")

    # --- consistency/compliance: geography --------------------------------
    country = collection.get("country")
    if not country:
        issue("Compliance", "country", "country not specified", "Paused")
    else:
        canonical = platform.countries.normalize(country)
        if canonical is None:
            suggestion = platform.countries.suggest(country)
            issue("Consistency", "country", f"unknown country name: {country}", "Paused",
                  suggestion=suggestion)
        else:
            if canonical != country:
                issue("Consistency", "country", f"normalized {country!r} to {canonical!r}",
                      "AutoCorrected", corrected_value=canonical)
            collection["country"] = canonical
            collection["country_code"] = platform.countries.code_of(canonical)

    gps_obfuscated = str(top.pop("gps_obfuscated", "")).strip().lower() in ("yes", "true", "1")
    lat_raw, lon_raw = raw_strings.get("latitude"), raw_strings.get("longitude")
    if lat_raw is None and lon_raw is None:
        issue("Completeness", "gps", "GPS coordinates not provided", "Annotated")
        collection.pop("latitude", None)
        collection.pop("longitude", None)
    else:
        ok = True
        for field, raw_value in (("latitude", lat_raw), ("longitude", lon_raw)):
            if raw_value is None:
                issue("Consistency", field, "coordinate pair incomplete", "Paused")
                ok = False
                continue
            try:
                value, corrected = _norm_coordinate(raw_value)
            except ValueError:
                issue("Consistency", field, f"coordinate not parseable: {raw_value!r}", "Paused")
                collection.pop(field, None)
                ok = False
                continue
            limit = 90.0 if field == "latitude" else 180.0
            if not -limit <= value <= limit:
                issue("Consistency", field, f"coordinate out of range: {value}", "Paused")
                ok = False
                continue
            if corrected is not None:
                issue("Consistency", field, f"decimal comma corrected: {raw_value!r}",
                      "AutoCorrected", corrected_value=corrected)
            collection[field] = value
        if ok:
            precision = min(_decimal_places(lat_raw), _decimal_places(lon_raw))
            collection["coord_precision"] = precision
            if precision < 2 and not gps_obfuscated:
                issue("Compliance", "gps",
                      f"coordinates below two-decimal precision ({precision})", "Paused")
    if gps_obfuscated:
        top["gps_obfuscated"] = True

    # --- consistency/completeness: dates ----------------------------------
    date_raw = collection.get("collection_date")
    if not date_raw:
        issue("Completeness", "collection_date", "collection date not provided", "Annotated")
    else:
        try:
            iso, corrected = _norm_date(date_raw)
            if corrected is not None and corrected != date_raw:
                issue("Consistency", "collection_date",
                      f"date format normalized: {date_raw!r}", "AutoCorrected",
                      corrected_value=corrected)
            collection["collection_date"] = iso
        except ValueError:
            issue("Consistency", "collection_date",
                  f"date not parseable: {date_raw!r}", "Paused")

    if "collectors" in collection and isinstance(collection["collectors"], str):
        collection["collectors"] = [
            c.strip() for c in collection["collectors"].split(";") if c.strip()
        ]

    # --- taxonomy ------------------------------------------------------------
    if not taxonomy.get("phylum"):
        issue("Compliance", "phylum", "phylum not specified", "Paused")
    assignment = TaxonomyAssignment.from_doc(taxonomy)
    unknown = [
        {"rank": rank, "name": assignment.get_rank(rank)}
        for rank in RANKS
        if assignment.get_rank(rank) and not platform.taxonomy.has(rank, assignment.get_rank(rank))
    ]
    if unknown:
        for u in unknown:
            issue("Consistency", u["rank"],
                  f"name not in backbone taxonomy: {u['name']}", "Paused")
    else:
        fill = platform.taxonomy.fill_gaps(assignment)
        if fill.conflicts:
            for c in fill.conflicts:
                issue("Completeness", c["rank"],
                      f"hierarchy conflict: {c['submitted']} vs backbone {c['backbone']}",
                      "Paused")
        else:
            for rank, name in sorted(fill.filled.items()):
                issue("Completeness", rank, f"gap filled from backbone: {name}",
                      "AutoCorrected", corrected_value=name)
            taxonomy.update({r: assignment.get_rank(r) for r in RANKS if assignment.get_rank(r)})

    identifier = taxonomy.get("identifier_name")
    if identifier and not platform.store.has_vocab("identifier", identifier):
        issue("Consistency", "identifier_name",
              f"identifier not registered with an affiliation: {identifier}", "Paused")

    row = dict(top)
    row["taxonomy"] = taxonomy
    row["collection"] = collection
    row["attributes"] = attributes
    return row


def persist_specimen_batch(platform, project: str, raw_rows: list, actor: str,
                           ts: str | None = None) -> dict:
    """Validate then persist; any Paused/Rejected issue persists nothing."""
    from barcodelab.model.lifecycle import annotate, create_specimen

    result = validate_specimen_batch(platform, raw_rows)
    if result["blocked"]:
        return {**result, "created": []}
    created = []
    for idx, row in enumerate(result["rows"]):
        doc = create_specimen(platform, project, row, actor, ts)
        created.append(doc["sample_id"])
        for iss in result["issues"][idx]:
            if iss.resolution == "Annotated":
                annotate(
                    platform,
                    {"kind": "record", "id": doc["sample_id"]},
                    {"type": "tag", "label": f"Incomplete: {iss.field}"},
                    actor,
                    ts,
                )
    return {**result, "created": created}
