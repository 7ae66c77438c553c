"""Geographic analytics: great-circle distances, Mantel test, site MST."""

from __future__ import annotations

import math

import numpy as np

from barcodelab import errors

EARTH_RADIUS_KM = 6371.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def _upper(matrix: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(matrix.shape[0], k=1)
    return matrix[iu]


def mantel_test(m1: np.ndarray, m2: np.ndarray, permutations: int = 999, seed: int = 0) -> dict:
    """Matrix correlation with a label-permutation p-value."""
    if m1.shape != m2.shape or m1.shape[0] != m1.shape[1]:
        raise ValueError("matrices must be square and same shape")
    if permutations < 99:
        raise ValueError("need at least 99 permutations")
    x = _upper(m1)
    y = _upper(m2)
    if np.std(x) == 0 or np.std(y) == 0:
        raise errors.DegenerateMatrix("matrix entries are all equal")
    r_obs = float(np.corrcoef(x, y)[0, 1])

    rng = np.random.default_rng(seed)
    n = m1.shape[0]
    hits = 0
    for _ in range(permutations):
        perm = rng.permutation(n)
        permuted = m2[np.ix_(perm, perm)]
        r_perm = float(np.corrcoef(x, _upper(permuted))[0, 1])
        if abs(r_perm) >= abs(r_obs) - 1e-12:
            hits += 1
    return {
        "mantel_r": r_obs,
        "p_value": (hits + 1) / (permutations + 1),
        "permutations": permutations,
    }


def minimum_spanning_tree(points: list) -> dict:
    """Prim's MST over sites [(label, lat, lon)]; deterministic edge choice."""
    n = len(points)
    if n < 2:
        return {"edges": [], "total_km": 0.0}
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = haversine_km(points[i][1], points[i][2], points[j][1], points[j][2])
            dist[i, j] = dist[j, i] = d
    in_tree = {0}
    edges = []
    total = 0.0
    while len(in_tree) < n:
        best = None
        for i in sorted(in_tree):
            for j in range(n):
                if j in in_tree:
                    continue
                cand = (dist[i, j], points[i][0], points[j][0], i, j)
                if best is None or cand < best:
                    best = cand
        d, label_i, label_j, _i, j = best
        edges.append({"from": label_i, "to": label_j, "km": float(d)})
        total += float(d)
        in_tree.add(j)
    return {"edges": edges, "total_km": total}


def geo_distance_correlation(
    labels: list,
    genetic: np.ndarray,
    coordinates: dict,
    taxonomies: dict | None = None,
    permutations: int = 999,
    seed: int = 0,
) -> dict:
    """Mantel test of geographic vs genetic distance, plus the site MST and
    the maximum intraspecific divergence for the spread comparison."""
    with_coords = [l for l in labels if coordinates.get(l) is not None]
    if len(with_coords) < 4:
        raise errors.MissingCoordinates(
            f"need at least 4 records with coordinates, got {len(with_coords)}"
        )
    index = {label: i for i, label in enumerate(labels)}
    keep = [index[l] for l in with_coords]
    gen = genetic[np.ix_(keep, keep)]
    n = len(with_coords)
    geo = np.zeros((n, n))
    for i in range(n):
        lat1, lon1 = coordinates[with_coords[i]]
        for j in range(i + 1, n):
            lat2, lon2 = coordinates[with_coords[j]]
            geo[i, j] = geo[j, i] = haversine_km(lat1, lon1, lat2, lon2)

    mantel = mantel_test(geo, gen, permutations=permutations, seed=seed)

    points = [(label, *coordinates[label]) for label in with_coords]
    mst = minimum_spanning_tree(points)

    max_intra = None
    if taxonomies:
        for i in range(n):
            for j in range(i + 1, n):
                sp_i = taxonomies.get(with_coords[i], {}).get("species")
                sp_j = taxonomies.get(with_coords[j], {}).get("species")
                if sp_i and sp_i == sp_j and not np.isnan(gen[i, j]):
                    if max_intra is None or gen[i, j] > max_intra:
                        max_intra = float(gen[i, j])
    return {
        **mantel,
        "n": n,
        "mst_edges": mst["edges"],
        "mst_total_km": mst["total_km"],
        "max_intraspecific_divergence": max_intra,
    }
