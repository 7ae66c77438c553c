"""Distance summaries, barcode-gap analysis, and diagnostic characters."""

from __future__ import annotations

import numpy as np

from barcodelab import errors

_LEVELS = ("conspecific", "congeneric", "confamilial")


def classify_pair(tax_a: dict, tax_b: dict) -> str | None:
    """Deepest shared taxon level, or None when even families differ/missing."""
    if tax_a.get("species") and tax_a.get("species") == tax_b.get("species"):
        return "conspecific"
    if tax_a.get("genus") and tax_a.get("genus") == tax_b.get("genus"):
        return "congeneric"
    if tax_a.get("family") and tax_a.get("family") == tax_b.get("family"):
        return "confamilial"
    return None


def distance_summary(labels: list, dist: np.ndarray, taxonomies: dict) -> dict:
    """Min/mean/max divergence at the conspecific/congeneric/confamilial levels.

    Each pair counts once, at its deepest shared rank.
    """
    buckets: dict[str, list] = {level: [] for level in _LEVELS}
    n = len(labels)
    for i in range(n):
        for j in range(i + 1, n):
            d = dist[i, j]
            if np.isnan(d):
                continue
            level = classify_pair(taxonomies.get(labels[i], {}), taxonomies.get(labels[j], {}))
            if level:
                buckets[level].append(float(d))
    if not any(buckets.values()):
        raise errors.NoComparablePairs("no pairs share species, genus, or family")
    out = {}
    for level in _LEVELS:
        values = buckets[level]
        out[level] = {
            "pairs": len(values),
            "min": min(values) if values else None,
            "mean": (sum(values) / len(values)) if values else None,
            "max": max(values) if values else None,
        }
    return out


def barcode_gap(labels: list, dist: np.ndarray, taxonomies: dict) -> list:
    """Per-species max-intra vs nearest-neighbor-species distance rows."""
    species_of = {
        label: taxonomies.get(label, {}).get("species")
        for label in labels
    }
    groups: dict[str, list] = {}
    for idx, label in enumerate(labels):
        sp = species_of[label]
        if sp:
            groups.setdefault(sp, []).append(idx)
    if len(groups) < 2:
        raise errors.SingleSpecies(f"need at least 2 species, got {len(groups)}")

    rows = []
    for species in sorted(groups):
        indexes = groups[species]
        intra = [
            float(dist[a, b])
            for i, a in enumerate(indexes)
            for b in indexes[i + 1 :]
            if not np.isnan(dist[a, b])
        ]
        max_intra = max(intra) if intra else 0.0
        nn_species = None
        nn_distance = None
        for other in sorted(groups):
            if other == species:
                continue
            for a in indexes:
                for b in groups[other]:
                    d = dist[a, b]
                    if np.isnan(d):
                        continue
                    if nn_distance is None or d < nn_distance:
                        nn_distance = float(d)
                        nn_species = other
        rows.append({
            "species": species,
            "n": len(indexes),
            "max_intraspecific": max_intra,
            "singleton": len(indexes) == 1,
            "nn_species": nn_species,
            "nn_distance": nn_distance,
            "gap": (nn_distance is not None and nn_distance > max_intra),
        })
    return rows


def diagnostic_characters(partition: dict) -> list:
    """Column table over aligned groups: consensus per group + diagnostic marks.

    partition: {group_name: [aligned sequences]}.  A column is diagnostic
    for a group when one unambiguous state is fixed within the group and
    absent from every other group.
    """
    if len(partition) < 2:
        raise ValueError("need at least 2 groups")
    lengths = {len(s) for seqs in partition.values() for s in seqs}
    if len(lengths) != 1:
        raise errors.UnalignedInput(f"sequence lengths differ: {sorted(lengths)}")
    width = lengths.pop()
    groups = sorted(partition)

    table = []
    for col in range(width):
        states: dict[str, dict] = {}
        for group in groups:
            counts: dict[str, int] = {}
            for seq in partition[group]:
                ch = seq[col].upper()
                counts[ch] = counts.get(ch, 0) + 1
            states[group] = counts
        consensus = {
            group: max(sorted(states[group]), key=lambda ch: states[group][ch])
            for group in groups
        }
        diagnostic_groups = []
        for group in groups:
            observed = set(states[group])
            if len(observed) != 1:
                continue
            state = next(iter(observed))
            if state not in "ACGT":
                continue
            elsewhere = set()
            for other in groups:
                if other != group:
                    elsewhere |= set(states[other])
            # ambiguity codes elsewhere could conceal this state; only
            # unambiguous columns can establish absence
            conceals = any(ch not in "ACGT-" for ch in elsewhere)
            if state not in elsewhere and not conceals:
                diagnostic_groups.append(group)
        table.append({
            "position": col,
            "consensus": consensus,
            "diagnostic": bool(diagnostic_groups),
            "diagnostic_groups": diagnostic_groups,
        })
    return table
