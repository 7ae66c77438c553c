"""Persistent BIN registry: stable URIs, majority-overlap continuity, stats.

URIs are never reissued: a monotone counter backs the minting scheme.  On
each update, clusters inherit the existing BIN they share the most members
with; ties go to the BIN whose founding record sits in the cluster, then to
the lexicographically smallest URI.  Unmatched clusters mint fresh URIs.
"""

from __future__ import annotations

import numpy as np

from barcodelab import errors
from barcodelab.binning.resl import OtuCluster, ReslParams, resl_cluster
from barcodelab.model.audit import now_iso
from barcodelab.seq.matrix import distance_matrix

_B36 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def format_bin_uri(index: int) -> str:
    """index (1-based) -> 'BOLD:' + 3 letters + 4 alphanumerics."""
    n = index - 1
    lo = n % (36 ** 4)
    hi = n // (36 ** 4)
    letters = ""
    for _ in range(3):
        letters = chr(ord("A") + hi % 26) + letters
        hi //= 26
    tail = ""
    for _ in range(4):
        tail = _B36[lo % 36] + tail
        lo //= 36
    return f"BOLD:{letters}{tail}"


def mint_bin_uri(store) -> str:
    return format_bin_uri(store.next_counter("bin_serial"))


def update_bin_registry(clusters: list, existing: dict, mint, ts: str | None = None) -> tuple:
    """Map clusters onto the existing registry; returns (new_state, change_log).

    clusters: list of OtuCluster.  existing: {uri: bin_doc}.  mint: callable
    returning a fresh URI (never reused).
    """
    ts = ts or now_iso()
    old_members = {uri: set(doc["members"]) for uri, doc in existing.items()}
    cluster_sets = [set(c.members) for c in clusters]

    candidates = []
    for ci, cset in enumerate(cluster_sets):
        for uri, mset in old_members.items():
            overlap = len(cset & mset)
            if overlap:
                founding_in = existing[uri].get("founding") in cset
                candidates.append((-overlap, 0 if founding_in else 1, uri, clusters[ci].members[0], ci))
    candidates.sort()

    uri_for_cluster: dict[int, str] = {}
    taken_uris: set = set()
    for _neg, _f, uri, _minid, ci in candidates:
        if uri in taken_uris or ci in uri_for_cluster:
            continue
        taken_uris.add(uri)
        uri_for_cluster[ci] = uri

    change_log: list = []
    new_state: dict = {}
    for ci, cluster in enumerate(clusters):
        uri = uri_for_cluster.get(ci)
        if uri is None:
            uri = mint()
            if uri in existing or uri in new_state:
                raise ValueError(f"mint reissued an existing BIN uri: {uri}")
            doc = {
                "bin_uri": uri,
                "members": cluster.members,
                "founding": cluster.representative,
                "created_at": ts,
                "stats": cluster.stats,
                "doi": f"dx.doi.org/10.5883/{uri}",
            }
            change_log.append({"type": "new", "bin_uri": uri, "members": cluster.members})
        else:
            prev = existing[uri]
            founding = prev.get("founding")
            if founding not in cluster.members:
                founding = cluster.members[0]
            doc = {
                "bin_uri": uri,
                "members": cluster.members,
                "founding": founding,
                "created_at": prev.get("created_at", ts),
                "stats": cluster.stats,
                "doi": prev.get("doi", f"dx.doi.org/10.5883/{uri}"),
            }
            added = sorted(set(cluster.members) - old_members[uri])
            removed = sorted(old_members[uri] - set(cluster.members))
            if added or removed:
                change_log.append({
                    "type": "updated", "bin_uri": uri, "added": added, "removed": removed,
                })
        new_state[uri] = doc

    for uri in sorted(set(existing) - set(new_state)):
        change_log.append({"type": "dissolved", "bin_uri": uri,
                           "members": sorted(old_members[uri])})

    # annotate splits: an old bin whose members now span several clusters
    for uri, mset in sorted(old_members.items()):
        spread = sorted({u for u, doc in new_state.items() if mset & set(doc["members"])})
        if len(spread) > 1:
            change_log.append({"type": "split", "bin_uri": uri, "into": spread})
    return new_state, change_log


def bin_stats(
    bin_uri: str,
    registry: dict,
    sequences: dict,
    profile=None,
    marker: str = "COI-5P",
) -> dict:
    """Intra-BIN distance stats plus the nearest-neighbor BIN block."""
    if bin_uri not in registry:
        raise errors.UnknownBin(bin_uri)
    all_members = []
    owner = {}
    for uri in sorted(registry):
        for member in registry[uri]["members"]:
            if member in sequences:
                all_members.append(member)
                owner[member] = uri
    subset = {m: sequences[m] for m in all_members}
    ids, dist = distance_matrix(subset, marker=marker, profile=profile)
    index = {seq_id: i for i, seq_id in enumerate(ids)}

    mine = [m for m in registry[bin_uri]["members"] if m in index]
    intra = [
        dist[index[a], index[b]]
        for i, a in enumerate(mine)
        for b in mine[i + 1 :]
        if not np.isnan(dist[index[a], index[b]])
    ]
    avg = float(np.mean(intra)) if intra else 0.0
    mx = float(np.max(intra)) if intra else 0.0

    nn_uri = None
    nn_distance = None
    nn_member = None
    for other_uri in sorted(registry):
        if other_uri == bin_uri:
            continue
        for member in registry[other_uri]["members"]:
            if member not in index:
                continue
            for m in mine:
                d = dist[index[m], index[member]]
                if np.isnan(d):
                    continue
                if nn_distance is None or d < nn_distance or (
                    d == nn_distance and (other_uri, member) < (nn_uri, nn_member)
                ):
                    nn_distance = float(d)
                    nn_uri = other_uri
                    nn_member = member
    return {
        "bin_uri": bin_uri,
        "members": len(registry[bin_uri]["members"]),
        "avg_distance": avg,
        "max_distance": mx,
        "nn_bin": nn_uri,
        "nn_distance": nn_distance,
        "nn_member": nn_member,
        "founding": registry[bin_uri].get("founding"),
    }


def run_bin_update(platform, params: ReslParams | None = None, marker: str = "COI-5P",
                   ts: str | None = None) -> dict:
    """Recluster the store's sequences for a marker and commit the registry."""
    sequences = {}
    for doc in platform.store.iter_sequences(marker=marker):
        if len(doc["nucleotides"]) >= 200:
            sequences[f"{doc['process_id']}:{doc['marker_code']}"] = doc["nucleotides"]
    if not sequences:
        return {"bins": 0, "changes": []}
    clusters = resl_cluster(sequences, params, markers={k: marker for k in sequences},
                            profile=platform.coi_profile)
    existing = {doc["bin_uri"]: doc for doc in platform.store.iter_bins()}
    new_state, change_log = update_bin_registry(
        clusters, existing, mint=lambda: mint_bin_uri(platform.store), ts=ts
    )
    with platform.store.write_lock:
        for uri in sorted(set(existing) - set(new_state)):
            dissolved = existing[uri]
            dissolved["members"] = []
            dissolved["dissolved"] = True
            platform.store.put_bin(dissolved)
        for uri in sorted(new_state):
            platform.store.put_bin(new_state[uri])
    log = platform.store.kv_get("bin_change_log") or []
    log.extend({**entry, "ts": ts or now_iso()} for entry in change_log)
    platform.store.kv_set("bin_change_log", log)
    return {"bins": len(new_state), "changes": change_log}
