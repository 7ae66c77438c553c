"""Neighbor-joining tree construction with deterministic tie-breaks.

Standard Saitou-Nei agglomeration over a p-distance matrix.  Ties in the
Q criterion break toward the pair whose subtrees contain the smallest leaf
labels, so permuting the input order never changes the result.  Negative
branch-length estimates are clamped to zero and flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from barcodelab import errors

MAX_RECORDS = 25_000


@dataclass
class TreeNode:
    label: str | None = None  # leaves only
    children: list = field(default_factory=list)  # [(TreeNode, branch_length)]
    min_leaf: str = ""

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list:
        if self.is_leaf:
            return [self.label]
        out = []
        for child, _ in self.children:
            out.extend(child.leaves())
        return out

    def newick(self) -> str:
        return self._newick_inner() + ";"

    def _newick_inner(self) -> str:
        if self.is_leaf:
            return _escape_label(self.label)
        parts = [f"{child._newick_inner()}:{length:.10g}" for child, length in self.children]
        return "(" + ",".join(parts) + ")"


def _escape_label(label: str) -> str:
    if any(c in label for c in " (),:;'"):
        return "'" + label.replace("'", "''") + "'"
    return label


@dataclass
class NjTree:
    root: TreeNode
    labels: list
    clamped_branches: int = 0

    def newick(self) -> str:
        return self.root.newick()

    def leaf_order(self) -> list:
        return self.root.leaves()

    def splits(self) -> set:
        """Leaf bipartitions (as frozensets of the smaller side), for topology tests."""
        all_leaves = frozenset(self.labels)
        found: set = set()

        def walk(node: TreeNode) -> frozenset:
            if node.is_leaf:
                return frozenset([node.label])
            below = frozenset()
            for child, _ in node.children:
                child_set = walk(child)
                if 1 < len(child_set) < len(all_leaves) - 1:
                    other = all_leaves - child_set
                    found.add(min(child_set, other, key=lambda s: (len(s), sorted(s))))
                below |= child_set
            return below

        walk(self.root)
        return found

    def edge_lengths(self) -> dict:
        """{frozenset(leaf side): branch length} for every edge."""
        all_leaves = frozenset(self.labels)
        lengths: dict = {}

        def walk(node: TreeNode) -> frozenset:
            if node.is_leaf:
                return frozenset([node.label])
            below = frozenset()
            for child, length in node.children:
                child_set = walk(child)
                key = min(child_set, all_leaves - child_set, key=lambda s: (len(s), sorted(s)))
                lengths[key] = lengths.get(key, 0.0) + length
                below |= child_set
            return below

        walk(self.root)
        return lengths


def neighbor_joining(labels: list, dist: np.ndarray) -> NjTree:
    n = len(labels)
    if n < 3:
        raise errors.TooFew(f"need at least 3 records, got {n}")
    if n > MAX_RECORDS:
        raise errors.TooManyRecords(f"{n} records exceeds the {MAX_RECORDS} cap")
    if np.isnan(dist).any():
        raise errors.NoOverlap("distance matrix has incomparable pairs")

    d = dist.astype(np.float64).copy()
    nodes = [TreeNode(label=l, min_leaf=l) for l in labels]
    active = list(range(n))
    clamped = 0

    def clamp(x: float) -> float:
        nonlocal clamped
        if x < 0:
            clamped += 1
            return 0.0
        return x

    while len(active) > 3:
        m = len(active)
        sub = d[np.ix_(active, active)]
        r = sub.sum(axis=1)
        q = (m - 2) * sub - r[:, None] - r[None, :]
        np.fill_diagonal(q, np.inf)
        qmin = q.min()
        best = None
        for ai, aj in np.argwhere(q <= qmin + 1e-12):
            if ai >= aj:
                continue
            key = tuple(sorted((nodes[active[ai]].min_leaf, nodes[active[aj]].min_leaf)))
            if best is None or key < best[0]:
                best = (key, int(ai), int(aj))
        _, ai, aj = best
        i, j = active[ai], active[aj]
        dij = d[i, j]
        li = dij / 2 + (r[ai] - r[aj]) / (2 * (m - 2))
        lj = dij - li
        first, second = sorted(((nodes[i], clamp(li)), (nodes[j], clamp(lj))),
                               key=lambda p: p[0].min_leaf)
        parent = TreeNode(children=[first, second],
                          min_leaf=min(nodes[i].min_leaf, nodes[j].min_leaf))
        # distances from the new node to the remaining ones
        new_row = np.zeros(d.shape[0] + 1)
        for ak in range(m):
            k = active[ak]
            if k in (i, j):
                continue
            new_row[k] = (d[i, k] + d[j, k] - dij) / 2
        d = np.pad(d, ((0, 1), (0, 1)))
        d[-1, : len(new_row) - 1] = new_row[:-1]
        d[: len(new_row) - 1, -1] = new_row[:-1]
        nodes.append(parent)
        active = [k for k in active if k not in (i, j)] + [len(nodes) - 1]

    if len(active) == 3:
        x, y, z = active
        lx = clamp((d[x, y] + d[x, z] - d[y, z]) / 2)
        ly = clamp((d[x, y] + d[y, z] - d[x, z]) / 2)
        lz = clamp((d[x, z] + d[y, z] - d[x, y]) / 2)
        kids = sorted(
            ((nodes[x], lx), (nodes[y], ly), (nodes[z], lz)), key=lambda p: p[0].min_leaf
        )
        root = TreeNode(children=kids, min_leaf=kids[0][0].min_leaf)
    else:  # exactly 2 active nodes
        a, b = active
        kids = sorted(((nodes[a], d[a, b]), (nodes[b], 0.0)), key=lambda p: p[0].min_leaf)
        root = TreeNode(children=kids, min_leaf=kids[0][0].min_leaf)

    return NjTree(root=root, labels=sorted(labels), clamped_branches=clamped)


def nj_tree(platform, records: list, options: dict | None = None) -> dict:
    """Tree over records [{process_id, nucleotides, marker, taxonomy, images}].

    Returns the tree plus Newick text and, when requested, the matching
    image manifest in leaf order.
    """
    from barcodelab.seq.matrix import distance_matrix

    options = options or {}
    n = len(records)
    if n > MAX_RECORDS:
        raise errors.TooManyRecords(f"{n} records exceeds the {MAX_RECORDS} cap")
    if n < 3:
        raise errors.TooFew(f"need at least 3 records, got {n}")
    markers = {r.get("marker") for r in records if r.get("marker")}
    if len(markers) > 1:
        raise errors.MixedMarkers(sorted(markers))
    marker = markers.pop() if markers else None

    sequences = {r["process_id"]: r["nucleotides"] for r in records}
    labels, dist = distance_matrix(sequences, marker=marker, profile=platform.coi_profile)
    tree = neighbor_joining(labels, dist)

    by_id = {r["process_id"]: r for r in records}
    leaf_order = tree.leaf_order()
    display = {
        pid: _leaf_display(by_id[pid]) for pid in leaf_order
    }
    result = {
        "newick": tree.newick(),
        "leaf_order": leaf_order,
        "labels": display,
        "clamped_branches": tree.clamped_branches,
        "n": n,
    }
    if options.get("matching_images"):
        manifest = []
        for pid in leaf_order:
            for image in by_id[pid].get("images", []):
                manifest.append({"process_id": pid, "image": image.get("name"),
                                 "blob": image.get("blob")})
        result["image_manifest"] = manifest
    return result


def _leaf_display(record: dict) -> str:
    taxonomy = record.get("taxonomy") or {}
    name = taxonomy.get("species") or taxonomy.get("genus") or taxonomy.get("family") or ""
    return f"{record['process_id']} {name}".strip()
