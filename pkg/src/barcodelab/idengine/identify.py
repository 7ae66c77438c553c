"""Identification: two-stage COI pipeline and the generic seeded matcher.

COI queries are frame-checked against the protein profile first (non-COI
input is rejected), then compared to every library entry over the anchored
overlap.  Other markers go through k-mer seeding plus overlap-alignment
extension.  Both return at most 100 matches, ordered by identity, overlap,
then process id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from barcodelab import errors
from barcodelab.seq.distance import align_overlap
from barcodelab.seq.matrix import PAD, encode_anchored

MAX_MATCHES = 100
MAX_BATCH = 5000
MIN_COI_QUERY = 100


@dataclass(frozen=True)
class IdThresholds:
    species: float = 0.99
    genus: float = 0.97
    family: float = 0.95


def assign_rank(matches: list, thresholds: IdThresholds | None = None) -> dict:
    """Rank assignment from the top match's identity."""
    thresholds = thresholds or IdThresholds()
    if not matches:
        return {"rank": "none", "taxon": None, "threshold": None}
    top = matches[0]
    identity = top["identity"]
    taxonomy = top.get("taxonomy", {})
    for rank, floor in (("species", thresholds.species), ("genus", thresholds.genus),
                        ("family", thresholds.family)):
        if identity >= floor and taxonomy.get(rank):
            return {"rank": rank, "taxon": taxonomy[rank], "threshold": floor}
    return {"rank": "none", "taxon": None, "threshold": None}


def _match_payload(entry, identity: float, overlap: int) -> dict:
    """One match row; private records keep taxonomy but hide specimen linkage."""
    public = entry.visibility == "public"
    return {
        "process_id": entry.process_id,
        "sample_id": entry.sample_id if public else None,
        "identity": identity,
        "overlap_bp": overlap,
        "taxonomy": dict(entry.taxonomy),
        "bin_uri": entry.bin_uri,
        "visibility": entry.visibility,
    }


def _rank_and_trim(matches: list) -> list:
    matches.sort(key=lambda m: (-m["identity"], -m["overlap_bp"], m["process_id"]))
    return matches[:MAX_MATCHES]


def identify_coi(platform, query: str, library, thresholds: IdThresholds | None = None) -> dict:
    """Two-stage identification against a COI library."""
    if not library.entries:
        raise errors.EmptyLibrary(library.name)
    query = query.strip().upper()
    if len(query) < MIN_COI_QUERY:
        raise errors.NotCoiLike(f"query below {MIN_COI_QUERY} bases")
    try:
        encoded = encode_anchored(query, platform.coi_profile)
    except errors.NoViableFrame as exc:
        raise errors.NotCoiLike(str(exc)) from exc

    matches = []
    if library.anchored is not None and len(library.anchored_rows):
        lib_matrix = library.anchored
        valid_lib = lib_matrix >= 0
        present_lib = lib_matrix > PAD
        valid_q = encoded >= 0
        present_q = encoded > PAD
        compared = (valid_lib & valid_q).sum(axis=1)
        matching = ((lib_matrix == encoded) & valid_lib & valid_q).sum(axis=1)
        overlap = (present_lib & present_q).sum(axis=1)
        for row, entry_index in enumerate(library.anchored_rows):
            if compared[row] == 0:
                continue
            entry = library.entries[entry_index]
            identity = float(matching[row] / compared[row])
            matches.append(_match_payload(entry, identity, int(overlap[row])))
    result_matches = _rank_and_trim(matches)
    return {
        "matches": result_matches,
        "assignment": assign_rank(result_matches, thresholds),
    }


def identify_generic(platform, query: str, library,
                     thresholds: IdThresholds | None = None) -> dict:
    """Seed-and-extend identification for non-COI markers."""
    if not library.entries:
        raise errors.EmptyLibrary(library.name)
    query = query.strip().upper()
    seeds = library.kmer.seed_hits(query) if library.kmer else {}
    if not seeds:
        return {"matches": [], "assignment": assign_rank([], thresholds)}
    by_key = {e.seq_key: e for e in library.entries}
    matches = []
    for seq_key in sorted(seeds, key=lambda k: (-seeds[k], k)):
        entry = by_key[seq_key]
        try:
            result = align_overlap(query, entry.nucleotides)
        except errors.NoOverlap:
            continue
        matches.append(
            _match_payload(entry, result["identity_fraction"], result["overlap_bp"])
        )
    result_matches = _rank_and_trim(matches)
    return {
        "matches": result_matches,
        "assignment": assign_rank(result_matches, thresholds),
    }


def identify(platform, query: str, library, thresholds: IdThresholds | None = None) -> dict:
    if library.marker.upper().startswith("COI"):
        return identify_coi(platform, query, library, thresholds)
    return identify_generic(platform, query, library, thresholds)


BATCH_COLUMNS = [
    "query_process_id",
    "query_sample_id",
    "current_order",
    "current_identification",
    "match_percent",
    "overlap_bp",
    "match_order",
    "match_family",
    "match_species",
    "match_subspecies",
    "match_process_id",
    "match_bin",
]


def batch_identify(platform, queries: list, library,
                   thresholds: IdThresholds | None = None,
                   current_taxonomy: dict | None = None) -> dict:
    """One result row per (query, match), grouped by query.

    queries: [(query_id, sequence)].  current_taxonomy optionally maps
    query_id -> taxonomy dict for the "current" columns.
    """
    if len(queries) > MAX_BATCH:
        raise errors.BatchTooLarge(f"{len(queries)} > {MAX_BATCH}")
    current_taxonomy = current_taxonomy or {}
    rows = []
    per_query = []
    for query_id, sequence in queries:
        try:
            result = identify(platform, sequence, library, thresholds)
        except errors.NotCoiLike as exc:
            per_query.append({"query_id": query_id, "error": str(exc), "matches": 0})
            continue
        taxonomy = current_taxonomy.get(query_id, {})
        sample_id = taxonomy.get("_sample_id")
        for match in result["matches"]:
            rows.append({
                "query_process_id": query_id,
                "query_sample_id": sample_id,
                "current_order": taxonomy.get("order"),
                "current_identification": taxonomy.get("species")
                or taxonomy.get("genus") or taxonomy.get("family"),
                "match_percent": round(match["identity"] * 100, 2),
                "overlap_bp": match["overlap_bp"],
                "match_order": match["taxonomy"].get("order"),
                "match_family": match["taxonomy"].get("family"),
                "match_species": match["taxonomy"].get("species"),
                "match_subspecies": match["taxonomy"].get("subspecies"),
                "match_process_id": match["process_id"],
                "match_bin": match["bin_uri"],
            })
        per_query.append({
            "query_id": query_id,
            "matches": len(result["matches"]),
            "assignment": result["assignment"],
        })
    return {"columns": BATCH_COLUMNS, "rows": rows, "queries": per_query}
