"""Record lifecycle operations: create, update, annotate, history, deltas.

Every mutation flows through here so that the audit trail stays complete:
each operation appends exactly one event carrying enough payload for replay
and refreshes the record's weekly snapshot.  Functions take the platform
facade (store + registries) as their first argument.
"""

from __future__ import annotations

from barcodelab import errors
from barcodelab.model.audit import AuditEvent, diff_docs, iso_week_key, now_iso
from barcodelab.model.records import (
    CollectionEvent,
    ProcessID,
    SpecimenRecord,
    TaxonomyAssignment,
    validate_latlon,
)
from barcodelab.registry.containers import require_access
from barcodelab.seq.frames import detect_frame, internal_stop_positions, translate

# Doc paths that only dedicated operations may touch.
_PROTECTED_PATHS = (
    "sample_id",
    "project",
    "process_ids",
    "version",
    "created_at",
    "updated_at",
    "tags",
    "comments",
    "images",
)

_WINDOW_DAYS = {"week": 7, "month": 31, "6months": 183}


def _combined_doc(platform, sample_id: str) -> dict:
    specimen = platform.store.get_specimen(sample_id)
    sequences = {
        f"{d['process_id']}:{d['marker_code']}": d
        for d in platform.store.iter_sequences(sample_id=sample_id)
    }
    return {"specimen": specimen, "sequences": sequences}


def _snapshot(platform, sample_id: str, ts: str) -> None:
    platform.store.put_snapshot(sample_id, iso_week_key(ts), _combined_doc(platform, sample_id))


def mint_process_id(platform, project_code: str, ts: str) -> str:
    serial = platform.store.next_counter(f"processid:{project_code}")
    year = int(ts[2:4])
    return ProcessID(project_code, serial, year).render()


def create_specimen(platform, project_code: str, row: dict, actor: str, ts: str | None = None) -> dict:
    """Create a record from a normalized submission row; mints a ProcessID."""
    ts = ts or now_iso()
    project = platform.store.get_container(project_code)
    if project is None or project["kind"] != "Project":
        raise errors.UnknownProject(project_code)
    require_access(platform.store, actor, project_code, "EditSpecimens")

    sample_id = (row.get("sample_id") or "").strip()
    if not sample_id:
        raise errors.MissingRequiredField("sample_id")
    if platform.store.has_specimen(sample_id):
        raise errors.DuplicateSampleId(sample_id)
    field_id = (row.get("field_id") or "").strip() or None
    museum_id = (row.get("museum_id") or "").strip() or None
    if not field_id and not museum_id:
        raise errors.MissingRequiredField("field_id or museum_id")
    institution = (row.get("storing_institution") or "").strip()
    if not institution:
        raise errors.MissingRequiredField("storing_institution")

    taxonomy = TaxonomyAssignment.from_doc(row.get("taxonomy", {}))
    if not taxonomy.phylum:
        raise errors.MissingRequiredField("phylum")
    fill = platform.taxonomy.fill_gaps(taxonomy)
    if fill.unknown:
        names = ", ".join(f"{u['rank']}={u['name']}" for u in fill.unknown)
        raise errors.ValidationReject(f"names not in backbone taxonomy: {names}")
    if fill.conflicts:
        c = fill.conflicts[0]
        raise errors.ValidationReject(
            f"taxonomy conflict at {c['rank']}: {c['submitted']} vs backbone {c['backbone']}"
        )
    collection = CollectionEvent.from_doc(row.get("collection", {}))
    if not collection.country:
        raise errors.MissingRequiredField("country")
    validate_latlon(collection.latitude, collection.longitude)

    process_id = mint_process_id(platform, project_code, ts)
    record = SpecimenRecord(
        sample_id=sample_id,
        project=project_code,
        storing_institution=institution,
        taxonomy=taxonomy,
        collection=collection,
        field_id=field_id,
        museum_id=museum_id,
        process_ids=[process_id],
        attributes=dict(row.get("attributes", {})),
        visibility=row.get("visibility", "private"),
        created_at=ts,
        updated_at=ts,
    )
    doc = record.to_doc()
    platform.store.put_specimen(doc)
    platform.store.append_event(ts, actor, "New-Specimen", sample_id, {"record": doc})
    _snapshot(platform, sample_id, ts)
    return doc


def update_specimen(
    platform,
    sample_id: str,
    field_updates: dict,
    actor: str,
    ts: str | None = None,
    expected_version: int | None = None,
) -> dict:
    """Replace fields (dot paths into the record doc); history persists."""
    ts = ts or now_iso()
    doc = platform.store.get_specimen(sample_id)
    if doc is None:
        raise errors.UnknownRecord(sample_id)
    require_access(platform.store, actor, doc["project"], "EditSpecimens")
    if expected_version is not None and expected_version != doc.get("version", 1):
        raise errors.VersionConflict(doc.get("version", 1), expected_version)

    before = platform.store.get_specimen(sample_id)
    new_doc = platform.store.get_specimen(sample_id)
    for path, value in field_updates.items():
        top = path.split(".", 1)[0]
        if top in _PROTECTED_PATHS:
            raise errors.ValidationReject(f"field not editable here: {path}")
        _apply_update(platform, new_doc, path, value)

    _validate_taxonomy(platform, new_doc)
    triples = diff_docs(before, new_doc)
    if not triples:
        return doc
    new_doc["version"] = doc.get("version", 1) + 1
    new_doc["updated_at"] = ts
    platform.store.put_specimen(new_doc)
    platform.store.append_event(ts, actor, "Modify-Specimen", sample_id, {"fields": triples})
    _snapshot(platform, sample_id, ts)
    return new_doc


def _apply_update(platform, doc: dict, path: str, value) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise errors.ValidationReject(f"unknown field path: {path}")
        node = node[part]
    leaf = parts[-1]
    if parts[0] == "collection":
        if leaf == "country" and value is not None:
            value = platform.countries.normalize(value)
            if value is None:
                raise errors.ValidationReject(f"unknown country: {path}")
            node["country_code"] = platform.countries.code_of(value)
        if leaf in ("latitude", "longitude") and value is not None:
            value = float(value)
            validate_latlon(
                value if leaf == "latitude" else None,
                value if leaf == "longitude" else None,
            )
    if leaf == "storing_institution" and value is not None:
        if not platform.store.has_vocab("institution", value):
            raise errors.ValidationReject(f"institution not registered: {value}")
    node[leaf] = value


def _validate_taxonomy(platform, doc: dict) -> None:
    assignment = TaxonomyAssignment.from_doc(doc["taxonomy"])
    if not assignment.phylum:
        raise errors.ValidationReject("phylum cannot be removed")
    result = platform.taxonomy.fill_gaps(assignment)
    if result.unknown:
        names = ", ".join(f"{u['rank']}={u['name']}" for u in result.unknown)
        raise errors.ValidationReject(f"names not in backbone taxonomy: {names}")
    if result.conflicts:
        c = result.conflicts[0]
        raise errors.ValidationReject(
            f"taxonomy conflict at {c['rank']}: {c['submitted']} vs backbone {c['backbone']}"
        )
    doc["taxonomy"] = assignment.to_doc()


def annotate(platform, target: dict, annotation: dict, actor: str, ts: str | None = None) -> list:
    """Append a tag or comment; the annotated data fields never change.

    target: {"kind": "record"|"sequence"|"image"|"trace", "id": ...}
    annotation: {"type": "tag"|"comment", "label"/"text": ..., ...}
    """
    ts = ts or now_iso()
    kind = target.get("kind", "record")
    ann_type = annotation.get("type", "tag")
    body_key = "label" if ann_type == "tag" else "text"
    body = (annotation.get(body_key) or "").strip()
    if not body:
        raise errors.ValidationReject(f"empty {ann_type}")

    seq_key = None
    if kind in ("sequence", "trace"):
        seq_doc = platform.store.get_sequence(target["id"])
        if seq_doc is None:
            raise errors.UnknownTarget(target["id"])
        sample_id = seq_doc["sample_id"]
        seq_key = target["id"]
    else:
        sample_id = platform.store.resolve_record_id(target["id"])
        if sample_id is None:
            raise errors.UnknownTarget(target["id"])
    spec_doc = platform.store.get_specimen(sample_id)
    require_access(platform.store, actor, spec_doc["project"], "ViewDownload")

    entry = {
        body_key: body,
        "author": actor,
        "timestamp": ts,
        "target_kind": kind,
        "target_id": target.get("detail") or target["id"],
    }
    payload_key = "tag" if ann_type == "tag" else "comment"
    action = "Add-Tag" if ann_type == "tag" else "Add-Comment"
    list_key = "tags" if ann_type == "tag" else "comments"

    if seq_key:
        seq_doc.setdefault(list_key, []).append(entry)
        platform.store.put_sequence(seq_doc)
        platform.store.append_event(
            ts, actor, action, sample_id, {payload_key: entry, "seq_key": seq_key}
        )
        annotations = seq_doc[list_key]
    else:
        spec_doc.setdefault(list_key, []).append(entry)
        platform.store.put_specimen(spec_doc)
        platform.store.append_event(ts, actor, action, sample_id, {payload_key: entry})
        annotations = spec_doc[list_key]
    _snapshot(platform, sample_id, ts)
    return annotations


def record_history(
    platform, record_id: str, window: str | None = None, now_ts: str | None = None
) -> list:
    """Audit events for a record, reverse-chronological, optionally windowed."""
    sample_id = platform.store.resolve_record_id(record_id)
    if sample_id is None:
        raise errors.UnknownRecord(record_id)
    events = platform.store.events_for(sample_id)
    if window:
        days = _WINDOW_DAYS.get(window)
        if days is None:
            raise ValueError(f"window must be one of {sorted(_WINDOW_DAYS)}")
        from datetime import datetime, timedelta, timezone

        now = (
            datetime.fromisoformat(now_ts.replace("Z", "+00:00"))
            if now_ts
            else datetime.now(timezone.utc)
        )
        cutoff = (now - timedelta(days=days)).strftime("%Y-%m-%dT%H:%M:%SZ")
        events = [e for e in events if e.timestamp >= cutoff]
    return sorted(events, key=lambda e: e.event_id, reverse=True)


def delta_view(platform, record_id: str, from_week: str, to_week: str) -> list:
    """Field-level {field, old, new} triples between two weekly snapshots."""
    sample_id = platform.store.resolve_record_id(record_id)
    if sample_id is None:
        raise errors.UnknownRecord(record_id)
    if from_week > to_week:
        raise ValueError(f"from_week {from_week} is after to_week {to_week}")
    snap_to = platform.store.snapshot_at(sample_id, to_week)
    if snap_to is None:
        raise errors.EmptyHistoryWindow(f"no snapshots at or before {to_week}")
    snap_from = platform.store.snapshot_at(sample_id, from_week)
    from_doc = snap_from[1] if snap_from else {}
    return diff_docs(from_doc, snap_to[1])


def snapshot_as_of(platform, record_id: str, week: str) -> dict:
    sample_id = platform.store.resolve_record_id(record_id)
    if sample_id is None:
        raise errors.UnknownRecord(record_id)
    snap = platform.store.snapshot_at(sample_id, week)
    return snap[1] if snap else {}


# --- sequence-side operations ----------------------------------------------


def add_sequence(
    platform,
    identifier: str,
    marker: str,
    nucleotides: str,
    run_site: str,
    actor: str,
    ts: str | None = None,
    forward_primer: str | None = None,
    reverse_primer: str | None = None,
) -> dict:
    """Attach (or replace) a marker sequence on an existing record."""
    ts = ts or now_iso()
    sample_id = platform.store.resolve_record_id(identifier)
    if sample_id is None:
        raise errors.UnknownRecord(identifier)
    spec_doc = platform.store.get_specimen(sample_id)
    require_access(platform.store, actor, spec_doc["project"], "EditSequences")
    marker_info = platform.markers.get(marker)
    if marker_info is None:
        raise errors.UnknownMarker(marker)
    if not platform.store.has_vocab("runsite", run_site):
        raise errors.UnregisteredRunSite(run_site)
    for primer in (forward_primer, reverse_primer):
        if primer and not platform.store.has_vocab("primer", primer):
            raise errors.UnregisteredPrimer(primer)

    from barcodelab.seq.fasta import normalize_nucleotides

    nucleotides = normalize_nucleotides(identifier, nucleotides)
    process_id = spec_doc["process_ids"][0]

    amino_acids = None
    frame = None
    strand = None
    matrix = None
    flags: set = set()
    if marker_info.get("protein_coding"):
        matrix = marker_info["genetic_code"]
        frame, strand, amino_acids = _translation_for(platform, marker, nucleotides, matrix)
        if amino_acids and internal_stop_positions(amino_acids):
            flags.add("stop-codon")
    hit = platform.contaminants.screen(marker, nucleotides)
    if hit:
        flags.add("contaminant")

    seq_key = f"{process_id}:{marker}"
    existing = platform.store.get_sequence(seq_key)
    doc = {
        "process_id": process_id,
        "sample_id": sample_id,
        "marker_code": marker,
        "nucleotides": nucleotides,
        "run_site": run_site,
        "amino_acids": amino_acids,
        "reading_frame": frame,
        "strand": strand,
        "translation_matrix": matrix,
        "forward_primer": forward_primer,
        "reverse_primer": reverse_primer,
        "traces": existing.get("traces", []) if existing else [],
        "genbank_accession": existing.get("genbank_accession") if existing else None,
        "upload_date": existing.get("upload_date", ts) if existing else ts,
        "updated_at": ts,
        "flags": sorted(flags),
        "tags": existing.get("tags", []) if existing else [],
        "comments": existing.get("comments", []) if existing else [],
        "version": 1,
    }
    if existing:
        # version/updated_at stay out of the diff; replay owns both
        doc["version"] = existing.get("version", 1)
        doc["updated_at"] = existing.get("updated_at", ts)
        triples = diff_docs(existing, doc)
        doc["version"] = existing.get("version", 1) + 1
        doc["updated_at"] = ts
        platform.store.put_sequence(doc)
        platform.store.append_event(
            ts, actor, "Modify-Sequence", sample_id, {"seq_key": seq_key, "fields": triples}
        )
    else:
        doc["version"] = 1
        platform.store.put_sequence(doc)
        platform.store.append_event(
            ts, actor, "New-Sequence", sample_id, {"seq_key": seq_key, "sequence": doc}
        )
    _snapshot(platform, sample_id, ts)
    return doc


def _translation_for(platform, marker: str, nucleotides: str, matrix: str):
    """(frame, strand, protein) for a protein-coding marker.

    COI goes through profile-based frame detection; other coding markers
    pick the forward frame with the fewest internal stops.
    """
    if marker.startswith("COI") and len(nucleotides) >= 60:
        try:
            res = detect_frame(nucleotides, matrix, platform.coi_profile)
            return res.frame, res.strand, res.protein
        except errors.NoViableFrame:
            return None, None, None
    best = None
    for frame in (0, 1, 2):
        protein = translate(nucleotides, matrix, frame)
        stops = len(internal_stop_positions(protein))
        if best is None or stops < best[0]:
            best = (stops, frame, protein)
    return best[1], "forward", best[2]


def modify_sequence(
    platform, seq_key: str, field_updates: dict, actor: str, ts: str | None = None
) -> dict:
    """Field-level sequence edits (flags, accession, primers...)."""
    ts = ts or now_iso()
    doc = platform.store.get_sequence(seq_key)
    if doc is None:
        raise errors.UnknownRecord(seq_key)
    spec_doc = platform.store.get_specimen(doc["sample_id"])
    require_access(platform.store, actor, spec_doc["project"], "EditSequences")
    before = platform.store.get_sequence(seq_key)
    for path, value in field_updates.items():
        if path.split(".", 1)[0] in ("process_id", "sample_id", "marker_code", "version", "traces"):
            raise errors.ValidationReject(f"field not editable here: {path}")
        if path == "flags":
            value = sorted(set(value))
        doc[path] = value
    triples = diff_docs(before, doc)
    if not triples:
        return doc
    doc["version"] = before.get("version", 1) + 1
    doc["updated_at"] = ts
    platform.store.put_sequence(doc)
    platform.store.append_event(
        ts, actor, "Modify-Sequence", doc["sample_id"], {"seq_key": seq_key, "fields": triples}
    )
    _snapshot(platform, doc["sample_id"], ts)
    return doc


def add_images(platform, sample_id: str, images: list, actor: str, ts: str | None = None) -> dict:
    ts = ts or now_iso()
    doc = platform.store.get_specimen(sample_id)
    if doc is None:
        raise errors.UnknownRecord(sample_id)
    require_access(platform.store, actor, doc["project"], "EditSpecimens")
    if len(doc.get("images", [])) + len(images) > 10:
        raise errors.LimitExceeded("images per specimen <= 10")
    doc["images"] = doc.get("images", []) + list(images)
    doc["updated_at"] = ts
    platform.store.put_specimen(doc)
    platform.store.append_event(ts, actor, "New-Image(s)", sample_id, {"images": list(images)})
    _snapshot(platform, sample_id, ts)
    return doc


def add_traces(platform, seq_key: str, traces: list, actor: str, ts: str | None = None) -> dict:
    ts = ts or now_iso()
    doc = platform.store.get_sequence(seq_key)
    if doc is None:
        raise errors.UnknownRecord(seq_key)
    spec_doc = platform.store.get_specimen(doc["sample_id"])
    require_access(platform.store, actor, spec_doc["project"], "EditSequences")
    if len(doc.get("traces", [])) + len(traces) > 10:
        raise errors.LimitExceeded("trace files per record <= 10")
    doc["traces"] = doc.get("traces", []) + list(traces)
    doc["updated_at"] = ts
    platform.store.put_sequence(doc)
    platform.store.append_event(
        ts, actor, "New-Trace(s)", doc["sample_id"], {"seq_key": seq_key, "traces": list(traces)}
    )
    _snapshot(platform, doc["sample_id"], ts)
    return doc
