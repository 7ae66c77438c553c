"""Tiered reference libraries built from store snapshots.

Five tiers with distinct inclusion filters: species-level (compliant +
species name), public (compliant + public), species-level full-length
(species name + full-length barcode, no compliance requirement), all
(compliant), and historical (frozen year-end snapshot of the compliant
set).  Builds are deterministic; historical builds freeze on first use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from barcodelab import errors
from barcodelab.errors import NoViableFrame
from barcodelab.model.audit import now_iso
from barcodelab.seq.kmer import KmerIndex, kmer_index
from barcodelab.seq.matrix import encode_anchored

LIBRARY_KINDS = ("SpeciesLevel", "Public", "SpeciesLevelFullLength", "All", "Historical")

COI_FULL_LENGTH_OVER = 640  # full-length means strictly longer than this


@dataclass
class LibraryEntry:
    seq_key: str
    process_id: str
    sample_id: str
    marker: str
    nucleotides: str
    taxonomy: dict
    bin_uri: str | None
    visibility: str
    compliant: bool
    length: int

    def to_doc(self) -> dict:
        return {
            "seq_key": self.seq_key,
            "process_id": self.process_id,
            "sample_id": self.sample_id,
            "marker": self.marker,
            "nucleotides": self.nucleotides,
            "taxonomy": self.taxonomy,
            "bin_uri": self.bin_uri,
            "visibility": self.visibility,
            "compliant": self.compliant,
            "length": self.length,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "LibraryEntry":
        return cls(**doc)


@dataclass
class ReferenceLibrary:
    kind: str
    marker: str
    built_at: str
    entries: list
    year: int | None = None
    kmer: KmerIndex | None = None
    anchored: np.ndarray | None = field(default=None, repr=False)
    anchored_rows: list = field(default_factory=list)  # entry indexes with anchors

    @property
    def name(self) -> str:
        suffix = f":{self.year}" if self.year else ""
        return f"{self.marker}/{self.kind}{suffix}"

    def build_indexes(self, profile=None, code: str = "invertebrate_mitochondrial") -> None:
        self.kmer = kmer_index({e.seq_key: e.nucleotides for e in self.entries})
        if self.marker.upper().startswith("COI") and profile is not None:
            rows = []
            kept = []
            for i, entry in enumerate(self.entries):
                try:
                    rows.append(encode_anchored(entry.nucleotides, profile, code))
                    kept.append(i)
                except (NoViableFrame, ValueError):
                    continue
            self.anchored = np.vstack(rows) if rows else None
            self.anchored_rows = kept


def _full_length_over(platform, marker: str) -> int:
    if marker.upper().startswith("COI"):
        return COI_FULL_LENGTH_OVER
    info = platform.markers.get(marker) or {}
    return int(0.95 * info.get("full_length", 0))


def _passes(kind: str, entry: LibraryEntry, full_over: int, year: int | None,
            upload_date: str) -> bool:
    species_present = bool(entry.taxonomy.get("species"))
    if kind == "SpeciesLevel":
        return entry.compliant and species_present
    if kind == "Public":
        return entry.compliant and entry.visibility == "public"
    if kind == "SpeciesLevelFullLength":
        return species_present and entry.length > full_over
    if kind == "All":
        return entry.compliant
    if kind == "Historical":
        cutoff = f"{year}-12-31T23:59:59Z"
        return entry.compliant and upload_date <= cutoff
    raise errors.UnknownKind(kind)


def build_library(platform, kind: str, marker: str, year: int | None = None) -> ReferenceLibrary:
    """Build (or retrieve, for frozen historical years) a reference library."""
    if kind not in LIBRARY_KINDS:
        raise errors.UnknownKind(kind)
    if kind == "Historical":
        if year is None:
            raise ValueError("historical libraries need a year")
        frozen = platform.store.kv_get(f"library:historical:{marker}:{year}")
        if frozen is not None:
            lib = ReferenceLibrary(
                kind=kind, marker=marker, built_at=frozen["built_at"], year=year,
                entries=[LibraryEntry.from_doc(d) for d in frozen["entries"]],
            )
            lib.build_indexes(platform.coi_profile)
            return lib

    from barcodelab.validation.compliance import check_barcode_compliance

    full_over = _full_length_over(platform, marker)
    entries = []
    for seq_doc in platform.store.iter_sequences(marker=marker):
        spec_doc = platform.store.get_specimen(seq_doc["sample_id"])
        if spec_doc is None:
            continue
        report = check_barcode_compliance(platform, seq_doc, spec_doc)
        entry = LibraryEntry(
            seq_key=f"{seq_doc['process_id']}:{seq_doc['marker_code']}",
            process_id=seq_doc["process_id"],
            sample_id=seq_doc["sample_id"],
            marker=marker,
            nucleotides=seq_doc["nucleotides"],
            taxonomy={k: v for k, v in (spec_doc.get("taxonomy") or {}).items() if v},
            bin_uri=platform.store.bin_of(f"{seq_doc['process_id']}:{seq_doc['marker_code']}"),
            visibility=spec_doc.get("visibility", "private"),
            compliant=report.barcode_compliant,
            length=len(seq_doc["nucleotides"].replace("-", "")),
        )
        if _passes(kind, entry, full_over, year, seq_doc.get("upload_date", "")):
            entries.append(entry)
    entries.sort(key=lambda e: e.seq_key)
    library = ReferenceLibrary(kind=kind, marker=marker, built_at=now_iso(), year=year,
                               entries=entries)
    library.build_indexes(platform.coi_profile)
    if kind == "Historical":
        platform.store.kv_set(
            f"library:historical:{marker}:{year}",
            {"built_at": library.built_at, "entries": [e.to_doc() for e in entries]},
        )
    return library
