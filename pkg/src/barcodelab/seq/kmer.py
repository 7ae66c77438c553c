"""Inverted k-mer index used by the seed-and-extend matcher."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_K = 12


@dataclass
class KmerIndex:
    k: int
    postings: dict = field(default_factory=dict)  # kmer -> list[(seq_id, offset)]
    sequence_ids: tuple = ()

    def seed_hits(self, query: str) -> dict:
        """Count shared k-mer seeds per library sequence for a query."""
        query = query.upper()
        hits: dict[str, int] = {}
        for i in range(len(query) - self.k + 1):
            kmer = query[i : i + self.k]
            if any(c not in "ACGT" for c in kmer):
                continue
            for seq_id, _offset in self.postings.get(kmer, ()):
                hits[seq_id] = hits.get(seq_id, 0) + 1
        return hits


def kmer_index(library_sequences: dict, k: int = DEFAULT_K) -> KmerIndex:
    """Build the inverted index over {sequence_id: nucleotides}.

    Only unambiguous windows are indexed; an ACGT-only sequence of length L
    contributes exactly L-k+1 postings.  Iteration over sorted ids keeps
    rebuilds bit-for-bit identical.
    """
    if not 8 <= k <= 16:
        raise ValueError(f"k must be in [8, 16], got {k}")
    postings: dict[str, list] = {}
    for seq_id in sorted(library_sequences):
        seq = library_sequences[seq_id].upper()
        for offset in range(len(seq) - k + 1):
            kmer = seq[offset : offset + k]
            if any(c not in "ACGT" for c in kmer):
                continue
            postings.setdefault(kmer, []).append((seq_id, offset))
    return KmerIndex(k=k, postings=postings, sequence_ids=tuple(sorted(library_sequences)))
