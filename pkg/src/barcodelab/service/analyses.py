"""Analysis tool dispatch for the workbench and CLI.

Each tool takes the resolved record list and returns a JSON-able result.
Stochastic tools thread an explicit seed (default 0) for reproducibility.
"""

from __future__ import annotations

import numpy as np

from barcodelab import errors
from barcodelab.analytics.diversity import accumulation_curve, diversity
from barcodelab.analytics.geo import geo_distance_correlation
from barcodelab.analytics.njtree import nj_tree
from barcodelab.analytics.summaries import barcode_gap, diagnostic_characters, distance_summary
from barcodelab.binning.discordance import bin_discordance
from barcodelab.binning.resl import ReslParams, resl_cluster
from barcodelab.seq.composition import composition
from barcodelab.seq.matrix import distance_matrix, encode_set
from barcodelab.service.selection import analysis_records

ANALYSIS_TOOLS = (
    "tree",
    "distance_summary",
    "barcode_gap",
    "diagnostics",
    "geo_correlation",
    "accumulation",
    "diversity",
    "composition",
    "cluster",
    "discordance",
)


def _dist(platform, records):
    sequences = {r["process_id"]: r["nucleotides"] for r in records}
    marker = records[0]["marker"] if records else None
    return distance_matrix(sequences, marker=marker, profile=platform.coi_profile)


def _taxonomies(records) -> dict:
    return {r["process_id"]: r["taxonomy"] for r in records}


def run_analysis(platform, tool: str, selection: dict, params: dict | None = None) -> dict:
    params = params or {}
    marker = params.get("marker", "COI-5P")
    records = analysis_records(platform, selection, marker=marker)
    if tool == "tree":
        return nj_tree(platform, records, options={
            "matching_images": bool(params.get("matching_images")),
        })
    if tool == "distance_summary":
        labels, dist = _dist(platform, records)
        return distance_summary(labels, dist, _taxonomies(records))
    if tool == "barcode_gap":
        labels, dist = _dist(platform, records)
        return {"rows": barcode_gap(labels, dist, _taxonomies(records))}
    if tool == "diagnostics":
        return {"columns": _diagnostics(platform, records, params)}
    if tool == "geo_correlation":
        labels, dist = _dist(platform, records)
        coords = {r["process_id"]: r["coordinates"] for r in records}
        return geo_distance_correlation(
            labels, dist, coords, _taxonomies(records),
            permutations=int(params.get("permutations", 999)),
            seed=int(params.get("seed", 0)),
        )
    if tool == "accumulation":
        grouping = params.get("grouping", "species")
        labels = _group_labels(records, grouping)
        return accumulation_curve(labels, permutations=int(params.get("permutations", 100)),
                                  seed=int(params.get("seed", 0)))
    if tool == "diversity":
        site_field = params.get("site", "country")
        sites: dict = {}
        for r in records:
            site = r.get(site_field) or "unknown"
            label = r["taxonomy"].get("species") or r.get("bin_uri") or r["process_id"]
            sites.setdefault(site, []).append(label)
        return diversity(sites)
    if tool == "composition":
        rows = []
        for r in records:
            stats = composition(r["nucleotides"])
            rows.append({
                "process_id": r["process_id"],
                "length": stats["length"],
                "gc_percent": stats["gc_percent"],
                "ambiguous_percent": stats["ambiguous_percent"],
            })
        return {"rows": rows}
    if tool == "cluster":
        sequences = {r["seq_key"]: r["nucleotides"] for r in records}
        if not sequences:
            raise errors.EmptyInput("no sequences in selection")
        clusters = resl_cluster(
            sequences,
            ReslParams(
                seed_threshold=float(params.get("seed_threshold", 0.022)),
                prune_distance=float(params.get("prune_distance", 0.044)),
                inflation=float(params.get("inflation", 2.0)),
            ),
            markers={k: marker for k in sequences},
            profile=platform.coi_profile,
        )
        return {"clusters": [c.to_doc() for c in clusters]}
    if tool == "discordance":
        payload = [
            {"record_id": r["process_id"], "bin_uri": r["bin_uri"], "taxonomy": r["taxonomy"]}
            for r in records
        ]
        return bin_discordance(payload)
    raise ValueError(f"unknown analysis tool: {tool}")


def _group_labels(records, grouping: str) -> list:
    labels = []
    for r in records:
        if grouping == "bin":
            label = r.get("bin_uri")
        else:
            label = r["taxonomy"].get("species")
        labels.append(label or r["process_id"])
    return labels


_DECODE = {0: "A", 1: "C", 2: "G", 3: "T", -1: "N", -2: "-"}


def _diagnostics(platform, records, params) -> list:
    group_rank = params.get("group_rank", "species")
    sequences = {r["process_id"]: r["nucleotides"] for r in records}
    marker = records[0]["marker"] if records else None
    ids, encoded = encode_set(sequences, marker=marker, profile=platform.coi_profile)
    if encoded is None:
        raise errors.UnalignedInput("sequences could not be brought into shared coordinates")
    aligned = {
        seq_id: "".join(_DECODE[int(v)] for v in encoded[i])
        for i, seq_id in enumerate(ids)
    }
    taxonomies = _taxonomies(records)
    partition: dict[str, list] = {}
    for seq_id in ids:
        group = taxonomies.get(seq_id, {}).get(group_rank)
        if group:
            partition.setdefault(group, []).append(aligned[seq_id])
    if len(partition) < 2:
        raise errors.SingleSpecies(f"need records from at least 2 {group_rank} groups")
    return diagnostic_characters(partition)
