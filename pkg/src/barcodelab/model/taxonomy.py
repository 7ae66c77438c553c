"""Backbone taxonomy registry.

Seeded from a bundled TSV (rank, name, parent) and extendable at runtime
behind a moderation flag.  Gap filling walks the backbone upward from the
deepest assigned rank; conflicts between submitted names and the backbone
chain are reported, not silently overwritten.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from barcodelab.model.records import RANKS, TaxonomyAssignment

# Ranks that must be gap-free along an assigned path; subfamily, tribe and
# subspecies are optional interpolations.
MANDATORY_RANKS = ["kingdom", "phylum", "class", "order", "family", "genus", "species"]


@dataclass
class TaxonNode:
    taxid: int
    rank: str
    name: str
    parent_rank: str | None
    parent_name: str | None
    moderated: bool = False


@dataclass
class GapFillResult:
    filled: dict = field(default_factory=dict)  # rank -> name added from backbone
    conflicts: list = field(default_factory=list)  # {"rank", "submitted", "backbone"}
    unknown: list = field(default_factory=list)  # {"rank", "name"} not in registry


class TaxonomyRegistry:
    def __init__(self) -> None:
        self._by_key: dict[tuple, TaxonNode] = {}
        self._by_taxid: dict[int, TaxonNode] = {}
        self._next_taxid = 1000

    @classmethod
    def load_bundled(cls) -> "TaxonomyRegistry":
        reg = cls()
        text = resources.files("barcodelab.model").joinpath("data/backbone_taxonomy.tsv").read_text()
        for line in text.splitlines()[1:]:
            if not line.strip():
                continue
            rank, name, parent_rank, parent_name = (line.split("\t") + ["", ""])[:4]
            reg.add(rank, name, parent_rank or None, parent_name or None, moderated=False)
        return reg

    def add(
        self,
        rank: str,
        name: str,
        parent_rank: str | None,
        parent_name: str | None,
        moderated: bool = True,
    ) -> TaxonNode:
        if rank not in RANKS:
            raise ValueError(f"unknown rank: {rank}")
        key = (rank, name)
        if key in self._by_key:
            return self._by_key[key]
        if parent_name and (parent_rank, parent_name) not in self._by_key:
            raise ValueError(f"parent taxon not registered: {parent_rank} {parent_name}")
        node = TaxonNode(self._next_taxid, rank, name, parent_rank, parent_name, moderated)
        self._next_taxid += 1
        self._by_key[key] = node
        self._by_taxid[node.taxid] = node
        return node

    def has(self, rank: str, name: str) -> bool:
        return (rank, name) in self._by_key

    def get(self, rank: str, name: str) -> TaxonNode | None:
        return self._by_key.get((rank, name))

    def get_by_taxid(self, taxid: int) -> TaxonNode | None:
        return self._by_taxid.get(taxid)

    def search_name(self, name: str) -> list:
        lowered = name.lower()
        return sorted(
            (n for n in self._by_key.values() if n.name.lower() == lowered),
            key=lambda n: n.taxid,
        )

    def nodes(self) -> list:
        return sorted(self._by_key.values(), key=lambda n: n.taxid)

    def children(self, rank: str, name: str) -> list:
        return sorted(
            (n for n in self._by_key.values() if n.parent_rank == rank and n.parent_name == name),
            key=lambda n: (RANKS.index(n.rank), n.name),
        )

    def ancestor_chain(self, rank: str, name: str) -> list:
        """Nodes from this taxon up to its root, inclusive."""
        chain = []
        node = self.get(rank, name)
        while node is not None:
            chain.append(node)
            if node.parent_name is None:
                break
            node = self.get(node.parent_rank, node.parent_name)
        return chain

    def fill_gaps(self, assignment: TaxonomyAssignment) -> GapFillResult:
        """Fill missing mandatory ranks from the backbone.

        Walks up from the deepest populated rank; backbone values fill gaps,
        and populated values that contradict the backbone chain are reported
        as conflicts.  Names absent from the registry are reported unknown.
        """
        result = GapFillResult()
        for rank in RANKS:
            value = assignment.get_rank(rank)
            if value and not self.has(rank, value):
                result.unknown.append({"rank": rank, "name": value})
        if result.unknown:
            return result

        deepest = assignment.deepest_rank()
        if deepest is None:
            return result
        chain = {n.rank: n.name for n in self.ancestor_chain(deepest, assignment.get_rank(deepest))}
        for rank in RANKS:
            backbone_value = chain.get(rank)
            if backbone_value is None:
                continue
            submitted = assignment.get_rank(rank)
            if submitted is None:
                if rank in MANDATORY_RANKS or rank in chain:
                    assignment.set_rank(rank, backbone_value)
                    result.filled[rank] = backbone_value
            elif submitted != backbone_value:
                result.conflicts.append(
                    {"rank": rank, "submitted": submitted, "backbone": backbone_value}
                )
        return result

    def record_counts(self, specimens: list) -> dict:
        """records-per-node tally used by the taxonomy browser."""
        counts: dict[int, int] = {}
        for doc in specimens:
            taxonomy = doc.get("taxonomy", {})
            for rank in RANKS:
                name = taxonomy.get(rank)
                if name:
                    node = self.get(rank, name)
                    if node:
                        counts[node.taxid] = counts.get(node.taxid, 0) + 1
        return counts
