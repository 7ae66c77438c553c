"""Read-model payloads for pages and consoles.

Everything here is server-computed; clients render these payloads verbatim
(feature badges included) and never derive QC verdicts themselves.
"""

from __future__ import annotations

import numpy as np

from barcodelab import errors
from barcodelab.binning.discordance import bin_discordance
from barcodelab.model.records import RANKS
from barcodelab.seq.composition import composition
from barcodelab.seq.matrix import distance_matrix
from barcodelab.validation.compliance import check_barcode_compliance


def _round_coords(collection: dict) -> dict | None:
    lat, lon = collection.get("latitude"), collection.get("longitude")
    if lat is None or lon is None:
        return None
    return {"latitude": round(lat, 2), "longitude": round(lon, 2)}


def redact_specimen(doc: dict) -> dict:
    """Public-view copy of a private record: precise coordinates, collector
    names, exact site, and images are masked."""
    out = {
        "sample_id": doc["sample_id"],
        "project": doc["project"],
        "taxonomy": dict(doc.get("taxonomy") or {}),
        "visibility": doc.get("visibility"),
        "collection": {},
    }
    collection = doc.get("collection") or {}
    out["collection"] = {
        "country": collection.get("country"),
        "country_code": collection.get("country_code"),
        "province": collection.get("province"),
        "region": collection.get("region"),
    }
    coords = _round_coords(collection)
    if coords:
        out["collection"].update(coords)
    return out


def specimen_page(platform, record_id: str, history_limit: int = 25) -> dict:
    sample_id = platform.store.resolve_record_id(record_id)
    if sample_id is None:
        raise errors.UnknownRecord(record_id)
    doc = platform.store.get_specimen(sample_id)
    sequences = platform.store.iter_sequences(sample_id=sample_id)
    events = platform.store.events_for(sample_id)
    bins = []
    for seq in sequences:
        uri = platform.store.bin_of(f"{seq['process_id']}:{seq['marker_code']}")
        if uri:
            bin_doc = platform.store.get_bin(uri) or {}
            bins.append({
                "bin_uri": uri,
                "marker": seq["marker_code"],
                "member_count": len(bin_doc.get("members", [])),
                "stats": bin_doc.get("stats", {}),
            })
    return {
        "record": doc,
        "sequences": [
            {"process_id": s["process_id"], "marker_code": s["marker_code"],
             "flags": s.get("flags", []), "length": len(s["nucleotides"])}
            for s in sequences
        ],
        "bins": bins,
        "activity": [
            {"timestamp": e.timestamp, "actor": e.actor, "action": e.action}
            for e in sorted(events, key=lambda e: e.event_id, reverse=True)[:history_limit]
        ],
        "version": doc.get("version", 1),
    }


def sequence_page(platform, seq_key: str) -> dict:
    seq = platform.store.get_sequence(seq_key)
    if seq is None:
        raise errors.UnknownRecord(seq_key)
    spec = platform.store.get_specimen(seq["sample_id"])
    stats = composition(seq["nucleotides"])
    report = check_barcode_compliance(platform, seq, spec)
    return {
        "specimen": {
            "sample_id": spec["sample_id"],
            "process_id": seq["process_id"],
            "project": spec["project"],
            "taxonomy": spec.get("taxonomy"),
            "bin_uri": platform.store.bin_of(seq_key),
        },
        "marker_summary": {
            "marker_code": seq["marker_code"],
            "length": stats["length"],
            "gc_percent": round(stats["gc_percent"], 1),
            "ambiguous_percent": round(stats["ambiguous_percent"], 1),
            "trace_count": len(seq.get("traces", [])),
        },
        "sequence": seq,
        "compliance": report.to_doc(),
    }


def bin_page(platform, bin_uri: str) -> dict:
    from barcodelab.binning.registry import bin_stats

    bin_doc = platform.store.get_bin(bin_uri)
    if bin_doc is None:
        raise errors.UnknownBin(bin_uri)
    registry = {d["bin_uri"]: d for d in platform.store.iter_bins() if d.get("members")}
    sequences = {}
    specimens = {}
    for uri, doc in registry.items():
        for seq_key in doc["members"]:
            seq = platform.store.get_sequence(seq_key)
            if seq:
                sequences[seq_key] = seq["nucleotides"]
                specimens[seq_key] = platform.store.get_specimen(seq["sample_id"])

    stats = bin_stats(bin_uri, registry, sequences, profile=platform.coi_profile)

    members = bin_doc.get("members", [])
    public_members = [
        m for m in members
        if specimens.get(m) and specimens[m].get("visibility") == "public"
    ]
    compliant = 0
    tallies: dict[str, dict] = {rank: {} for rank in RANKS}
    images = []
    sites = []
    for seq_key in members:
        spec = specimens.get(seq_key)
        seq = platform.store.get_sequence(seq_key)
        if spec is None or seq is None:
            continue
        if check_barcode_compliance(platform, seq, spec).barcode_compliant:
            compliant += 1
        for rank in RANKS:
            name = (spec.get("taxonomy") or {}).get(rank)
            if name:
                tallies[rank][name] = tallies[rank].get(name, 0) + 1
        is_public = spec.get("visibility") == "public"
        if is_public:
            for image in spec.get("images", []):
                images.append({"seq_key": seq_key, **image})
        coords = _round_coords(spec.get("collection") or {})
        if coords:
            sites.append({
                "seq_key": seq_key if is_public else None,
                **coords,
                "country": (spec.get("collection") or {}).get("country"),
            })

    nn_block = None
    if stats["nn_bin"]:
        nn_doc = registry[stats["nn_bin"]]
        nn_spec = specimens.get(stats["nn_member"])
        nn_block = {
            "bin_uri": stats["nn_bin"],
            "distance": stats["nn_distance"],
            "member_count": len(nn_doc.get("members", [])),
            "nearest_member": stats["nn_member"],
            "nearest_member_taxonomy": [
                (nn_spec.get("taxonomy") or {}).get(rank)
                for rank in RANKS
                if nn_spec and (nn_spec.get("taxonomy") or {}).get(rank)
            ] if nn_spec else [],
            "stats": nn_doc.get("stats", {}),
        }

    histogram = _distance_histogram(platform, members, sequences)
    return {
        "details": {
            "bin_uri": bin_uri,
            "doi": bin_doc.get("doi"),
            "member_count": len(members),
            "public_member_count": len(public_members),
            "compliant_member_count": compliant,
            "all_members_compliant": compliant == len(members) and bool(members),
            "founding": bin_doc.get("founding"),
            "avg_distance": stats["avg_distance"],
            "max_distance": stats["max_distance"],
        },
        "nearest_neighbor": nn_block,
        "taxonomy_tallies": {r: dict(sorted(t.items())) for r, t in tallies.items() if t},
        "images": images,
        "collection_sites": sites,
        "distance_histogram": histogram,
    }


def _distance_histogram(platform, members: list, sequences: dict) -> dict:
    subset = {m: sequences[m] for m in members if m in sequences}
    if len(subset) < 2:
        return {"edges": [], "counts": []}
    _ids, dist = distance_matrix(subset, marker="COI-5P", profile=platform.coi_profile)
    values = dist[np.triu_indices(dist.shape[0], k=1)]
    values = values[~np.isnan(values)]
    edges = np.linspace(0.0, max(0.05, float(values.max()) if values.size else 0.05), 11)
    counts, _ = np.histogram(values, bins=edges)
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


def project_summary(platform, project: str) -> dict:
    specimens = platform.store.iter_specimens(project=project)
    sample_ids = {d["sample_id"] for d in specimens}
    sequences = [
        s for s in platform.store.iter_sequences() if s["sample_id"] in sample_ids
    ]
    with_sequences = {s["sample_id"] for s in sequences}
    bins = set()
    discordance_payload = []
    lengths = []
    issues = []
    for seq in sequences:
        seq_key = f"{seq['process_id']}:{seq['marker_code']}"
        uri = platform.store.bin_of(seq_key)
        if uri:
            bins.add(uri)
        spec = next(d for d in specimens if d["sample_id"] == seq["sample_id"])
        discordance_payload.append({
            "record_id": seq["process_id"], "bin_uri": uri,
            "taxonomy": {k: v for k, v in (spec.get("taxonomy") or {}).items() if v},
        })
        lengths.append(len(seq["nucleotides"].replace("-", "")))
        for flag in seq.get("flags", []):
            issues.append({"sample_id": seq["sample_id"], "process_id": seq["process_id"],
                           "issue": flag})
    for spec in specimens:
        for tag in spec.get("tags", []):
            issues.append({"sample_id": spec["sample_id"], "process_id": None,
                           "issue": f"tag: {tag.get('label')}"})

    report = bin_discordance(discordance_payload) if discordance_payload else None
    multi = (report["classes"]["discordant"]["bins"] + report["classes"]["concordant"]["bins"]) if report else 0
    discordance_rate = (
        report["classes"]["discordant"]["bins"] / multi if report and multi else 0.0
    )
    if lengths:
        edges = list(range(0, max(lengths) + 100, 100))
        counts, _ = np.histogram(lengths, bins=edges)
        histogram = {"edges": edges, "counts": [int(c) for c in counts]}
    else:
        histogram = {"edges": [], "counts": []}
    return {
        "project": project,
        "specimens": len(specimens),
        "sequences": len(sequences),
        "bins": len(bins),
        "sequence_recovery_rate": (len(with_sequences) / len(specimens)) if specimens else 0.0,
        "bin_discordance_rate": discordance_rate,
        "sequence_length_histogram": histogram,
        "issues": sorted(issues, key=lambda i: (i["sample_id"], str(i["issue"]))),
    }


def record_console(platform, project: str) -> dict:
    """Record table rows with server-computed feature badges."""
    rows = []
    for spec in platform.store.iter_specimens(project=project):
        sequences = platform.store.iter_sequences(sample_id=spec["sample_id"])
        flags = sorted({f for s in sequences for f in s.get("flags", [])})
        compliant = None
        if sequences:
            compliant = all(
                check_barcode_compliance(platform, s, spec).barcode_compliant
                for s in sequences
            )
        collection = spec.get("collection") or {}
        rows.append({
            "sample_id": spec["sample_id"],
            "process_ids": spec.get("process_ids", []),
            "species": (spec.get("taxonomy") or {}).get("species"),
            "has_gps": collection.get("latitude") is not None,
            "has_images": bool(spec.get("images")),
            "has_traces": any(s.get("traces") for s in sequences),
            "barcode_compliant": compliant,
            "stop_codon": "stop-codon" in flags,
            "contamination": "contaminant" in flags,
            "flagged": bool(flags),
            "tags": [t.get("label") for t in spec.get("tags", [])],
            "bins": sorted({
                platform.store.bin_of(f"{s['process_id']}:{s['marker_code']}")
                for s in sequences
            } - {None}),
            "version": spec.get("version", 1),
        })
    return {"project": project, "rows": rows}


def taxon_payload(platform, node, data_types: list) -> dict:
    specimens = [
        d for d in platform.store.iter_specimens()
        if (d.get("taxonomy") or {}).get(node.rank) == node.name
    ]
    payload: dict = {}
    if "basic" in data_types:
        payload["basic"] = {
            "taxid": node.taxid,
            "rank": node.rank,
            "name": node.name,
            "parent_rank": node.parent_rank,
            "parent_name": node.parent_name,
            "children": [
                {"taxid": c.taxid, "rank": c.rank, "name": c.name}
                for c in platform.taxonomy.children(node.rank, node.name)
            ],
        }
    if "stats" in data_types:
        with_sequences = 0
        with_barcodes = 0
        public_records = 0
        public_bins = set()
        subspecies = {
            (d.get("taxonomy") or {}).get("subspecies")
            for d in specimens if (d.get("taxonomy") or {}).get("subspecies")
        }
        for doc in specimens:
            sequences = platform.store.iter_sequences(sample_id=doc["sample_id"])
            if sequences:
                with_sequences += 1
            if any(
                check_barcode_compliance(platform, s, doc).barcode_compliant
                for s in sequences
            ):
                with_barcodes += 1
            if doc.get("visibility") == "public":
                public_records += 1
                for s in sequences:
                    uri = platform.store.bin_of(f"{s['process_id']}:{s['marker_code']}")
                    if uri:
                        public_bins.add(uri)
        payload["stats"] = {
            "specimen_records": len(specimens),
            "specimens_with_sequences": with_sequences,
            "specimens_with_barcodes": with_barcodes,
            "subspecies": len(subspecies),
            "public_records": public_records,
            "public_bins": len(public_bins),
        }
    if "images" in data_types:
        payload["images"] = [
            {"sample_id": d["sample_id"], **image}
            for d in specimens if d.get("visibility") == "public"
            for image in d.get("images", [])
        ]
    if "depositories" in data_types:
        tallies: dict[str, int] = {}
        for doc in specimens:
            inst = doc.get("storing_institution")
            if inst:
                tallies[inst] = tallies.get(inst, 0) + 1
        payload["depositories"] = dict(sorted(tallies.items()))
    if "sequencinglabs" in data_types:
        tallies = {}
        for doc in specimens:
            for seq in platform.store.iter_sequences(sample_id=doc["sample_id"]):
                site = seq.get("run_site")
                if site:
                    tallies[site] = tallies.get(site, 0) + 1
        payload["sequencinglabs"] = dict(sorted(tallies.items()))
    if "sites" in data_types:
        sites = []
        countries = set()
        for doc in specimens:
            collection = doc.get("collection") or {}
            if collection.get("country"):
                countries.add(collection["country"])
            coords = _round_coords(collection)
            if coords:
                sites.append({**coords, "country": collection.get("country")})
        payload["sites"] = {"points": sites, "countries": sorted(countries)}
    return payload
