"""BIN discordance: taxonomic conflicts among the records sharing a BIN.

A BIN with two or more selected records is concordant when every populated
rank agrees across members (missing values never conflict), discordant at
the shallowest disagreeing rank otherwise.  Single-record BINs are
singletons.  The three classes partition the BIN set.
"""

from __future__ import annotations

from barcodelab.model.records import RANKS


def bin_discordance(records: list) -> dict:
    """records: {"record_id", "bin_uri" (optional), "taxonomy": {rank: name}}."""
    total_records = len(records)
    with_bins = [r for r in records if r.get("bin_uri")]
    by_bin: dict[str, list] = {}
    for record in with_bins:
        by_bin.setdefault(record["bin_uri"], []).append(record)

    discordant_rows = []
    concordant = []
    singletons = []
    for uri in sorted(by_bin):
        members = by_bin[uri]
        if len(members) == 1:
            singletons.append(uri)
            continue
        conflict_rank = None
        tallies: dict[str, dict] = {}
        for rank in RANKS:
            counts: dict[str, int] = {}
            for member in members:
                name = (member.get("taxonomy") or {}).get(rank)
                if name:
                    counts[name] = counts.get(name, 0) + 1
            tallies[rank] = counts
            if len(counts) > 1 and conflict_rank is None:
                conflict_rank = rank
        if conflict_rank is None:
            concordant.append(uri)
        else:
            discordant_rows.append({
                "bin_uri": uri,
                "conflict_rank": conflict_rank,
                "record_ids": sorted(m["record_id"] for m in members),
                "tallies": {
                    rank: dict(sorted(counts.items()))
                    for rank, counts in tallies.items() if counts
                },
            })

    discordant_records = sum(len(r["record_ids"]) for r in discordant_rows)
    concordant_records = sum(len(by_bin[uri]) for uri in concordant)
    return {
        "totals": {
            "records": total_records,
            "records_with_bins": len(with_bins),
            "bins": len(by_bin),
        },
        "classes": {
            "discordant": {"bins": len(discordant_rows), "records": discordant_records},
            "concordant": {"bins": len(concordant), "records": concordant_records},
            "singleton": {"bins": len(singletons), "records": len(singletons)},
        },
        "discordant_bins": discordant_rows,
        "concordant_bins": concordant,
        "singleton_bins": singletons,
    }
