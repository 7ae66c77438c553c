"""Accumulation curves and alpha/beta diversity measures."""

from __future__ import annotations

import math

import numpy as np

from barcodelab import errors


def accumulation_curve(group_labels: list, permutations: int = 100, seed: int = 0) -> dict:
    """Mean distinct-group count at each sample size over random orderings.

    group_labels: the species/BIN label per specimen, in any order.
    """
    if not group_labels:
        raise errors.EmptyInput("no records")
    if permutations < 50:
        raise ValueError("need at least 50 permutations")
    n = len(group_labels)
    rng = np.random.default_rng(seed)
    sums = np.zeros(n)
    lows = np.full(n, np.inf)
    highs = np.zeros(n)
    labels = np.asarray(group_labels, dtype=object)
    for _ in range(permutations):
        order = rng.permutation(n)
        seen: set = set()
        for k, idx in enumerate(order):
            seen.add(labels[idx])
            count = len(seen)
            sums[k] += count
            lows[k] = min(lows[k], count)
            highs[k] = max(highs[k], count)
    mean = (sums / permutations).tolist()
    return {
        "sample_sizes": list(range(1, n + 1)),
        "mean": mean,
        "low": lows.tolist(),
        "high": highs.tolist(),
        "total_groups": len(set(group_labels)),
    }


def shannon(proportions: list) -> float:
    return -sum(p * math.log(p) for p in proportions if p > 0)


def simpson(proportions: list) -> float:
    return 1.0 - sum(p * p for p in proportions)


def bray_curtis(x: dict, y: dict) -> float:
    keys = set(x) | set(y)
    shared = sum(min(x.get(k, 0), y.get(k, 0)) for k in keys)
    total = sum(x.values()) + sum(y.values())
    if total == 0:
        return 0.0
    return 1.0 - 2.0 * shared / total


def jaccard(x: dict, y: dict) -> float:
    a = {k for k, v in x.items() if v > 0}
    b = {k for k, v in y.items() if v > 0}
    union = a | b
    if not union:
        return 0.0
    return 1.0 - len(a & b) / len(union)


def diversity(site_groups: dict) -> dict:
    """Alpha diversity per site plus Bray-Curtis/Jaccard beta matrices.

    site_groups: {site: [group label per specimen]}.
    """
    if not site_groups:
        raise errors.EmptySite("no sites")
    sites = sorted(site_groups)
    abundance: dict[str, dict] = {}
    alpha = {}
    for site in sites:
        labels = site_groups[site]
        if not labels:
            raise errors.EmptySite(site)
        counts: dict[str, int] = {}
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
        abundance[site] = counts
        total = sum(counts.values())
        proportions = [c / total for c in counts.values()]
        alpha[site] = {
            "richness": len(counts),
            "shannon": shannon(proportions),
            "simpson": simpson(proportions),
            "n": total,
        }
    k = len(sites)
    bc = np.zeros((k, k))
    jc = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            bc[i, j] = bc[j, i] = bray_curtis(abundance[sites[i]], abundance[sites[j]])
            jc[i, j] = jc[j, i] = jaccard(abundance[sites[i]], abundance[sites[j]])
    return {
        "sites": sites,
        "alpha": alpha,
        "beta": {
            "bray_curtis": bc.tolist(),
            "jaccard": jc.tolist(),
        },
    }
