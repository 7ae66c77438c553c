"""Record selection resolution for analyses, packages, and exports.

A selection names records by explicit ids, project, dataset, or a search
query; resolution joins each specimen with its sequence for the requested
marker and flattens what the analysis tools need.
"""

from __future__ import annotations

from barcodelab import errors
from barcodelab.registry.search import search


def resolve_sample_ids(platform, selection: dict) -> list:
    if "sample_ids" in selection:
        out = []
        for ref in selection["sample_ids"]:
            sample_id = platform.store.resolve_record_id(ref)
            if sample_id is None:
                raise errors.UnknownRecord(ref)
            out.append(sample_id)
        return sorted(set(out))
    if "project" in selection:
        docs = platform.store.iter_specimens(project=selection["project"])
        return [d["sample_id"] for d in docs]
    if "dataset" in selection:
        container = platform.store.get_container(selection["dataset"])
        if container is None or container["kind"] != "Dataset":
            raise errors.UnknownDataset(selection.get("dataset"))
        return sorted(container.get("members", []))
    if "query" in selection:
        result = search(platform, selection["query"], scope=selection.get("scope", "public"))
        return result["records"]
    raise ValueError("selection needs sample_ids, project, dataset, or query")


def analysis_records(platform, selection: dict, marker: str = "COI-5P") -> list:
    """Flattened records for the analytics tools (one per sequence found)."""
    records = []
    for sample_id in resolve_sample_ids(platform, selection):
        spec = platform.store.get_specimen(sample_id)
        if spec is None:
            continue
        collection = spec.get("collection") or {}
        lat, lon = collection.get("latitude"), collection.get("longitude")
        for seq in platform.store.iter_sequences(sample_id=sample_id, marker=marker):
            seq_key = f"{seq['process_id']}:{seq['marker_code']}"
            records.append({
                "process_id": seq["process_id"],
                "sample_id": sample_id,
                "seq_key": seq_key,
                "nucleotides": seq["nucleotides"],
                "marker": seq["marker_code"],
                "taxonomy": {k: v for k, v in (spec.get("taxonomy") or {}).items() if v},
                "coordinates": (lat, lon) if lat is not None and lon is not None else None,
                "country": collection.get("country"),
                "images": spec.get("images", []),
                "bin_uri": platform.store.bin_of(seq_key),
                "flags": seq.get("flags", []),
                "visibility": spec.get("visibility", "private"),
            })
    records.sort(key=lambda r: r["process_id"])
    return records
