"""Data package builder: zipped snapshot resources plus a JSON descriptor.

The descriptor follows the Frictionless data-package layout (name, id,
created, resources with paths/hashes/schemas) and adds the platform's
summary counts and data dictionary.  Builds are byte-deterministic for a
fixed snapshot: timestamps derive from record data, zip entries carry a
fixed date, and all rows are sorted.
"""

from __future__ import annotations

import io
import zipfile

import jsonschema

from barcodelab import errors
from barcodelab.canonical import dumps, sha256_hex
from barcodelab.registry.dictionary import (
    BIN_FIELDS,
    SEQUENCE_FIELDS,
    SPECIMEN_FIELDS,
    TAXONOMY_FIELDS,
    specimen_row,
    sequence_row,
)
from barcodelab.service.formats import render_fasta_rows, render_tsv

_ZIP_DATE = (2020, 1, 1, 0, 0, 0)

DESCRIPTOR_SCHEMA = {
    "type": "object",
    "required": ["profile", "name", "id", "created", "counts", "resources"],
    "properties": {
        "profile": {"const": "tabular-data-package"},
        "name": {"type": "string", "pattern": r"^[a-z0-9._-]+$"},
        "id": {"type": "string"},
        "created": {"type": "string"},
        "counts": {
            "type": "object",
            "required": ["records", "sequences", "markers", "bins"],
            "properties": {
                "records": {"type": "integer", "minimum": 0},
                "sequences": {"type": "integer", "minimum": 0},
                "markers": {"type": "integer", "minimum": 0},
                "bins": {"type": "integer", "minimum": 0},
            },
        },
        "resources": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "path", "format", "mediatype", "bytes", "hash"],
                "properties": {
                    "name": {"type": "string"},
                    "path": {"type": "string"},
                    "format": {"type": "string"},
                    "mediatype": {"type": "string"},
                    "bytes": {"type": "integer", "minimum": 0},
                    "hash": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
                    "schema": {
                        "type": "object",
                        "required": ["fields"],
                        "properties": {
                            "fields": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["name", "type"],
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


def validate_descriptor(descriptor: dict) -> None:
    jsonschema.validate(descriptor, DESCRIPTOR_SCHEMA)


def _schema_for(fields: list) -> dict:
    return {
        "fields": [
            {"name": name, "type": ftype, "description": description}
            for name, ftype, description in fields
        ]
    }


def build_data_package(platform, sample_ids: list, cadence_tag: str,
                       include_private: bool = False) -> dict:
    """Build the archive; returns {"archive": bytes, "descriptor": dict, ...}."""
    docs = []
    for sample_id in sorted(set(sample_ids)):
        doc = platform.store.get_specimen(sample_id)
        if doc is None:
            continue
        if not include_private and doc.get("visibility") != "public":
            continue
        docs.append(doc)
    if not docs:
        raise errors.EmptySelection("no records selected for the package")

    sequences = []
    bin_uris = set()
    markers = set()
    latest = ""
    for doc in docs:
        latest = max(latest, doc.get("updated_at", ""))
        for seq in platform.store.iter_sequences(sample_id=doc["sample_id"]):
            sequences.append((doc, seq))
            markers.add(seq["marker_code"])
            latest = max(latest, seq.get("updated_at", ""))
            uri = platform.store.bin_of(f"{seq['process_id']}:{seq['marker_code']}")
            if uri:
                bin_uris.add(uri)

    specimen_rows = [specimen_row(doc) for doc in docs]
    fasta_rows = []
    sequence_tsv_rows = []
    for doc, seq in sorted(sequences, key=lambda p: (p[1]["process_id"], p[1]["marker_code"])):
        uri = platform.store.bin_of(f"{seq['process_id']}:{seq['marker_code']}")
        row = sequence_row(seq, uri)
        row["species"] = (doc.get("taxonomy") or {}).get("species")
        fasta_rows.append(row)
        sequence_tsv_rows.append(row)

    bin_rows = []
    for uri in sorted(bin_uris):
        bin_doc = platform.store.get_bin(uri) or {}
        stats = bin_doc.get("stats", {})
        bin_rows.append({
            "bin_uri": uri,
            "doi": bin_doc.get("doi"),
            "member_count": len(bin_doc.get("members", [])),
            "members": "; ".join(bin_doc.get("members", [])),
            "founding": bin_doc.get("founding"),
            "avg_distance": stats.get("avg_distance"),
            "max_distance": stats.get("max_distance"),
            "created_at": bin_doc.get("created_at"),
        })

    taxa = set()
    for doc in docs:
        for rank, name in (doc.get("taxonomy") or {}).items():
            if name and platform.taxonomy.has(rank, name):
                for node in platform.taxonomy.ancestor_chain(rank, name):
                    taxa.add(node.taxid)
    taxonomy_rows = [
        {
            "taxid": node.taxid,
            "rank": node.rank,
            "name": node.name,
            "parent_rank": node.parent_rank,
            "parent_name": node.parent_name,
        }
        for node in platform.taxonomy.nodes()
        if node.taxid in taxa
    ]

    resources_payload = [
        ("specimens", "specimens.tsv", "tsv", "text/tab-separated-values",
         render_tsv([f[0] for f in SPECIMEN_FIELDS], specimen_rows), SPECIMEN_FIELDS),
        ("sequences", "sequences.fasta", "fasta", "text/x-fasta",
         render_fasta_rows(fasta_rows), None),
        ("bins", "bins.tsv", "tsv", "text/tab-separated-values",
         render_tsv([f[0] for f in BIN_FIELDS], bin_rows), BIN_FIELDS),
        ("taxonomy", "taxonomy.tsv", "tsv", "text/tab-separated-values",
         render_tsv([f[0] for f in TAXONOMY_FIELDS], taxonomy_rows), TAXONOMY_FIELDS),
    ]

    counts = {
        "records": len(docs),
        "sequences": len(sequence_tsv_rows),
        "markers": len(markers),
        "bins": len(bin_rows),
    }
    name = f"barcodelab-{cadence_tag}".lower()
    descriptor = {
        "profile": "tabular-data-package",
        "name": name,
        "id": f"dx.doi.org/10.5883/DP-{cadence_tag.upper()}",
        "created": latest or "1980-01-01T00:00:00Z",
        "counts": counts,
        "resources": [],
        "data_dictionary": [
            {"resource": res_name, "fields": _schema_for(fields)["fields"]}
            for res_name, _p, _f, _m, _b, fields in resources_payload
            if fields is not None
        ],
    }
    bodies: dict[str, bytes] = {}
    for res_name, path, fmt, mediatype, body, fields in resources_payload:
        data = body.encode("utf-8")
        bodies[path] = data
        resource = {
            "profile": "tabular-data-resource" if fields else "data-resource",
            "name": res_name,
            "path": path,
            "format": fmt,
            "mediatype": mediatype,
            "encoding": "utf-8",
            "bytes": len(data),
            "hash": f"sha256:{sha256_hex(data)}",
        }
        if fields:
            resource["schema"] = _schema_for(fields)
            resource["dialect"] = {"delimiter": "\t"}
        descriptor["resources"].append(resource)

    validate_descriptor(descriptor)
    bodies["datapackage.json"] = dumps(descriptor).encode("utf-8")

    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        for path in sorted(bodies):
            info = zipfile.ZipInfo(path, date_time=_ZIP_DATE)
            info.external_attr = 0o644 << 16
            archive.writestr(info, bodies[path])
    return {
        "archive": buffer.getvalue(),
        "descriptor": descriptor,
        "name": name,
        "counts": counts,
    }
