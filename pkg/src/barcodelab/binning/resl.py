"""Refined single linkage: coarse components then Markov-clustering splits.

Stage 1 links sequences whose p-distance is at or under the seed threshold
and takes connected components.  Stage 2 reruns each multi-member component
through Markov clustering on a similarity graph (1 - distance, edges pruned
beyond a ceiling), which splits loosely chained groups.  Everything is
deterministic and independent of input order: ids are sorted up front.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from barcodelab import errors
from barcodelab.seq.matrix import distance_matrix


@dataclass(frozen=True)
class ReslParams:
    seed_threshold: float = 0.022  # single-linkage join distance
    prune_distance: float = 0.044  # graph edges beyond this are dropped
    inflation: float = 2.0
    max_iterations: int = 100
    convergence_eps: float = 1e-8


@dataclass
class OtuCluster:
    members: list  # sorted sequence ids
    representative: str
    stats: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {"members": self.members, "representative": self.representative, "stats": self.stats}


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def single_linkage_components(dist: np.ndarray, threshold: float) -> list:
    """Index sets of the connected components at the given join distance."""
    n = dist.shape[0]
    uf = _UnionFind(n)
    for i in range(n):
        row = dist[i]
        for j in range(i + 1, n):
            d = row[j]
            if not np.isnan(d) and d <= threshold:
                uf.union(i, j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def markov_cluster(similarity: np.ndarray, inflation: float = 2.0,
                   max_iterations: int = 100, eps: float = 1e-8) -> list:
    """Markov clustering on a symmetric similarity matrix with self-loops.

    Returns index groups (sorted, disjoint, covering all nodes).
    """
    n = similarity.shape[0]
    if n == 1:
        return [[0]]
    M = similarity.astype(np.float64).copy()
    np.fill_diagonal(M, np.maximum(M.diagonal(), 1.0))
    M /= M.sum(axis=0, keepdims=True)
    for _ in range(max_iterations):
        expanded = M @ M
        inflated = np.power(expanded, inflation)
        colsum = inflated.sum(axis=0, keepdims=True)
        colsum[colsum == 0] = 1.0
        inflated /= colsum
        if np.abs(inflated - M).max() < eps:
            M = inflated
            break
        M = inflated
    # clusters: connected components over surviving transitions
    adjacency = (M > 1e-6) | (M.T > 1e-6)
    np.fill_diagonal(adjacency, True)
    uf = _UnionFind(n)
    rows, cols = np.nonzero(adjacency)
    for i, j in zip(rows.tolist(), cols.tolist()):
        uf.union(i, j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def resl_cluster(
    sequences: dict,
    params: ReslParams | None = None,
    markers: dict | None = None,
    profile=None,
) -> list:
    """Cluster {id: nucleotides} into OTUs.

    markers, when given, maps id -> marker code; mixing markers is an error.
    """
    if not sequences:
        raise errors.EmptyInput("no sequences to cluster")
    params = params or ReslParams()
    marker = None
    if markers:
        distinct = {markers[i] for i in markers}
        if len(distinct) > 1:
            raise errors.MixedMarkers(sorted(distinct))
        marker = distinct.pop()

    ids, dist = distance_matrix(sequences, marker=marker or "COI-5P", profile=profile)
    components = single_linkage_components(dist, params.seed_threshold)

    clusters: list[OtuCluster] = []
    for component in components:
        if len(component) == 1:
            clusters.append(_make_cluster(ids, component, dist))
            continue
        sub = dist[np.ix_(component, component)]
        similarity = np.where(np.isnan(sub) | (sub > params.prune_distance), 0.0, 1.0 - sub)
        groups = markov_cluster(similarity, params.inflation, params.max_iterations,
                                params.convergence_eps)
        for group in groups:
            clusters.append(_make_cluster(ids, [component[g] for g in group], dist))
    clusters.sort(key=lambda c: c.members[0])
    return clusters


def _make_cluster(ids: list, indexes: list, dist: np.ndarray) -> OtuCluster:
    members = sorted(ids[i] for i in indexes)
    if len(indexes) > 1:
        sub = dist[np.ix_(indexes, indexes)]
        triu = sub[np.triu_indices(len(indexes), k=1)]
        finite = triu[~np.isnan(triu)]
        avg = float(finite.mean()) if finite.size else 0.0
        mx = float(finite.max()) if finite.size else 0.0
    else:
        avg = mx = 0.0
    return OtuCluster(members=members, representative=members[0],
                      stats={"avg_distance": avg, "max_distance": mx, "n": len(members)})
