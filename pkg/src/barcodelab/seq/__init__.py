"""Sequence primitives: FASTA, genetic codes, frames, distances, composition."""

from barcodelab.seq.fasta import FastaEntry, parse_fasta, render_fasta
from barcodelab.seq.codes import GeneticCode, get_genetic_code, list_genetic_codes
from barcodelab.seq.distance import p_distance, align_overlap, reverse_complement
from barcodelab.seq.composition import composition
from barcodelab.seq.kmer import KmerIndex, kmer_index
from barcodelab.seq.frames import ProteinProfile, FrameResult, detect_frame, translate, load_coi_profile

__all__ = [
    "FastaEntry",
    "parse_fasta",
    "render_fasta",
    "GeneticCode",
    "get_genetic_code",
    "list_genetic_codes",
    "p_distance",
    "align_overlap",
    "reverse_complement",
    "composition",
    "KmerIndex",
    "kmer_index",
    "ProteinProfile",
    "FrameResult",
    "detect_frame",
    "translate",
    "load_coi_profile",
]
