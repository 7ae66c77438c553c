"""Offline export package for external sequence-repository submission.

Produces a zip with the FASTA, a source-modifier table, and a manifest
recording intended embargo metadata.  No network involved; accession
numbers are imported back later from a provided list.
"""

from __future__ import annotations

import io
import zipfile

from barcodelab import errors
from barcodelab.canonical import dumps
from barcodelab.service.formats import render_fasta_rows, render_tsv

_ZIP_DATE = (2020, 1, 1, 0, 0, 0)

SOURCE_COLUMNS = [
    "sequence_id",
    "organism",
    "country",
    "lat_lon",
    "collection_date",
    "specimen_voucher",
    "collected_by",
    "identified_by",
]


def _lat_lon(collection: dict) -> str | None:
    lat, lon = collection.get("latitude"), collection.get("longitude")
    if lat is None or lon is None:
        return None
    ns = "N" if lat >= 0 else "S"
    ew = "E" if lon >= 0 else "W"
    return f"{abs(lat):.4f} {ns} {abs(lon):.4f} {ew}"


def _organism(taxonomy: dict) -> str | None:
    for rank in ("species", "genus", "family", "order", "class", "phylum"):
        if taxonomy.get(rank):
            return taxonomy[rank]
    return None


def export_genbank_package(platform, dataset_code: str, embargo_days: int = 365) -> dict:
    dataset = platform.store.get_container(dataset_code)
    if dataset is None or dataset["kind"] != "Dataset":
        raise errors.UnknownDataset(dataset_code)
    members = sorted(dataset.get("members", []))
    rows = []
    fasta_rows = []
    for sample_id in members:
        spec = platform.store.get_specimen(sample_id)
        if spec is None:
            continue
        for seq in platform.store.iter_sequences(sample_id=sample_id):
            taxonomy = spec.get("taxonomy") or {}
            collection = spec.get("collection") or {}
            organism = _organism(taxonomy)
            if not organism:
                raise errors.MissingMandatorySourceField(sample_id, "organism")
            if not collection.get("country"):
                raise errors.MissingMandatorySourceField(sample_id, "country")
            rows.append({
                "sequence_id": seq["process_id"],
                "organism": organism,
                "country": collection["country"],
                "lat_lon": _lat_lon(collection),
                "collection_date": collection.get("collection_date"),
                "specimen_voucher": spec.get("museum_id") or spec.get("field_id") or sample_id,
                "collected_by": "; ".join(collection.get("collectors", [])),
                "identified_by": taxonomy.get("identifier_name"),
            })
            fasta_rows.append({
                "process_id": seq["process_id"],
                "marker_code": seq["marker_code"],
                "species": taxonomy.get("species"),
                "nucleotides": seq["nucleotides"],
            })
    if not rows:
        raise errors.EmptyDataset(dataset_code)

    manifest = {
        "dataset": dataset_code,
        "records": len(rows),
        "embargo": {"requested": True, "days": embargo_days},
        "doi": dataset.get("doi"),
    }
    bodies = {
        "sequences.fasta": render_fasta_rows(fasta_rows).encode("utf-8"),
        "source_modifiers.tsv": render_tsv(SOURCE_COLUMNS, rows).encode("utf-8"),
        "manifest.json": dumps(manifest).encode("utf-8"),
    }
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        for path in sorted(bodies):
            info = zipfile.ZipInfo(path, date_time=_ZIP_DATE)
            info.external_attr = 0o644 << 16
            archive.writestr(info, bodies[path])
    return {"archive": buffer.getvalue(), "manifest": manifest, "rows": len(rows)}


def import_accessions(platform, accession_rows: list, actor: str, ts: str | None = None) -> dict:
    """Backfill accessions: rows of {process_id, marker?, accession}."""
    from barcodelab.model.lifecycle import modify_sequence

    updated = []
    missing = []
    for row in accession_rows:
        process_id = row["process_id"]
        marker = row.get("marker")
        candidates = [
            s for s in platform.store.iter_sequences()
            if s["process_id"] == process_id and (marker is None or s["marker_code"] == marker)
        ]
        if not candidates:
            missing.append(process_id)
            continue
        for seq in candidates:
            modify_sequence(
                platform, f"{seq['process_id']}:{seq['marker_code']}",
                {"genbank_accession": row["accession"]}, actor, ts,
            )
            updated.append(seq["process_id"])
    return {"updated": sorted(set(updated)), "missing": missing}
