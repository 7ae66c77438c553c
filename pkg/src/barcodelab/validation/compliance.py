"""Barcode-compliance gate, stop-codon screening, contaminant checks.

The gate applies four criteria: ambiguous bases under 1%, both primers
recorded, country present, and length above 75% of the marker's full
barcode region (COI: anything over 486 bp, i.e. 487 and up, passes).
Failing records stay stored; they are only flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from functools import lru_cache
from importlib import resources

from barcodelab import errors
from barcodelab.seq.distance import align_overlap
from barcodelab.seq.fasta import parse_fasta
from barcodelab.seq.frames import detect_frame, internal_stop_positions

CONTAMINANT_IDENTITY_THRESHOLD = 0.98
CONTAMINANT_MIN_OVERLAP = 300


@dataclass(frozen=True)
class ComplianceReport:
    ambiguity_ok: bool
    primers_present: bool
    country_present: bool
    length_ok: bool
    ambiguous_fraction: float
    length: int
    required_length_over: int  # compliant iff length > this

    @property
    def barcode_compliant(self) -> bool:
        return self.ambiguity_ok and self.primers_present and self.country_present and self.length_ok

    def to_doc(self) -> dict:
        doc = asdict(self)
        doc["barcode_compliant"] = self.barcode_compliant
        return doc


def ambiguous_fraction(nucleotides: str) -> float:
    seq = nucleotides.upper().replace("-", "")
    if not seq:
        return 0.0
    ambiguous = sum(1 for c in seq if c not in "ACGT")
    return ambiguous / len(seq)


def check_barcode_compliance(platform, sequence_doc: dict, specimen_doc: dict) -> ComplianceReport:
    marker = platform.markers.get(sequence_doc["marker_code"])
    if marker is None:
        raise errors.UnknownMarker(sequence_doc["marker_code"])
    full_length = marker["full_length"]
    threshold = int(0.75 * full_length)  # compliant iff strictly greater
    seq = sequence_doc["nucleotides"].replace("-", "")
    frac = ambiguous_fraction(seq)
    return ComplianceReport(
        ambiguity_ok=frac < 0.01,
        primers_present=bool(sequence_doc.get("forward_primer")) and bool(sequence_doc.get("reverse_primer")),
        country_present=bool((specimen_doc.get("collection") or {}).get("country")),
        length_ok=len(seq) > threshold,
        ambiguous_fraction=frac,
        length=len(seq),
        required_length_over=threshold,
    )


def check_stop_codons(platform, sequence_doc: dict) -> dict:
    """Internal stop positions in the stored (or detected) reading frame."""
    marker = platform.markers.get(sequence_doc["marker_code"])
    if marker is None:
        raise errors.UnknownMarker(sequence_doc["marker_code"])
    if not marker.get("protein_coding"):
        raise ValueError(f"marker is not protein-coding: {sequence_doc['marker_code']}")
    protein = sequence_doc.get("amino_acids")
    if protein is None:
        result = detect_frame(
            sequence_doc["nucleotides"], marker["genetic_code"], platform.coi_profile
        )
        protein = result.protein
    positions = internal_stop_positions(protein)
    return {"flagged": bool(positions), "positions": positions, "protein": protein}


class ContaminantLibrary:
    """Named nucleotide set of known laboratory contaminants per marker."""

    def __init__(self, entries: list | None = None):
        # entries: {"id", "organism", "marker", "sequence"}
        self.entries = list(entries or [])

    @classmethod
    def load_bundled(cls) -> "ContaminantLibrary":
        text = resources.files("barcodelab.validation").joinpath("data/contaminants.fasta").read_text()
        entries = []
        for entry in parse_fasta(text):
            organism, _, marker = entry.extra.partition("|")
            entries.append(
                {
                    "id": entry.id,
                    "organism": organism or entry.id,
                    "marker": marker or "COI-5P",
                    "sequence": entry.sequence,
                }
            )
        return cls(entries)

    def for_marker(self, marker: str) -> list:
        return [e for e in self.entries if e["marker"] == marker]

    def screen(
        self,
        marker: str,
        nucleotides: str,
        identity_threshold: float = CONTAMINANT_IDENTITY_THRESHOLD,
        min_overlap: int = CONTAMINANT_MIN_OVERLAP,
    ) -> dict | None:
        """Best hit over the thresholds, or None."""
        best = None
        for entry in self.for_marker(marker):
            result = align_overlap(nucleotides, entry["sequence"])
            if result["overlap_bp"] < min_overlap:
                continue
            if result["identity_fraction"] < identity_threshold:
                continue
            if best is None or result["identity_fraction"] > best["identity"]:
                best = {
                    "organism": entry["organism"],
                    "identity": result["identity_fraction"],
                    "overlap_bp": result["overlap_bp"],
                }
        return best


def screen_contaminants(platform, sequence_doc: dict) -> dict | None:
    return platform.contaminants.screen(sequence_doc["marker_code"], sequence_doc["nucleotides"])
