"""Translation and reading-frame detection against the bundled COI profile.

The profile is a position-specific scoring matrix (log-odds, bits) built
from the bundled COI protein alignment, aligned to query proteins with
affine gaps and free end gaps.  Frame choice maximizes the alignment score
minus a per-internal-stop penalty; a query is rejected (NoViableFrame) when
no frame's penalized score clears the scoring floor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from barcodelab.errors import NoViableFrame, UnknownGeneticCode
from barcodelab.seq.codes import GeneticCode, get_genetic_code
from barcodelab.seq.distance import reverse_complement

AMINO_ACIDS = "ACDEFGHIKLMNPQRSTVWY"
AA_INDEX = {aa: i for i, aa in enumerate(AMINO_ACIDS)}

UNKNOWN_RESIDUE_SCORE = -4.0
STOP_RESIDUE_SCORE = -6.0

DEFAULT_FLOOR_BITS = 60.0
DEFAULT_STOP_PENALTY_BITS = 8.0
DEFAULT_GAP_OPEN = -11.0
DEFAULT_GAP_EXTEND = -1.0

NEG_INF = -1e9


def translate(seq: str, code: GeneticCode | str, frame: int = 0) -> str:
    """Translate a nucleotide sequence in the given frame (0, 1, or 2)."""
    if frame not in (0, 1, 2):
        raise ValueError(f"frame must be 0, 1, or 2, got {frame}")
    if isinstance(code, str):
        code = get_genetic_code(code)
    elif not isinstance(code, GeneticCode):
        raise UnknownGeneticCode(repr(code))
    seq = seq.upper().replace("U", "T")
    out = []
    for i in range(frame, len(seq) - 2, 3):
        out.append(code.translate_codon(seq[i : i + 3]))
    return "".join(out)


def internal_stop_positions(protein: str) -> list[int]:
    """0-based indices of internal stops (a terminal '*' is not internal)."""
    return [i for i, aa in enumerate(protein[:-1]) if aa == "*"]


@dataclass
class ProteinProfile:
    """PSSM over the 20 amino acids plus affine gap penalties."""

    length: int
    scores: np.ndarray  # (length, 20) log-odds in bits
    consensus: str
    gap_open: float = DEFAULT_GAP_OPEN
    gap_extend: float = DEFAULT_GAP_EXTEND
    floor_bits: float = DEFAULT_FLOOR_BITS
    stop_penalty_bits: float = DEFAULT_STOP_PENALTY_BITS

    @classmethod
    def from_alignment(cls, proteins: list[str], **overrides) -> "ProteinProfile":
        if not proteins:
            raise ValueError("empty alignment")
        length = len(proteins[0])
        if any(len(p) != length for p in proteins):
            raise ValueError("alignment rows differ in length")
        counts = np.zeros((length, 20), dtype=np.float64)
        for protein in proteins:
            for pos, aa in enumerate(protein.upper()):
                idx = AA_INDEX.get(aa)
                if idx is not None:
                    counts[pos, idx] += 1
        background = 1.0 / 20.0
        pseudo = 1.0
        totals = counts.sum(axis=1, keepdims=True)
        freqs = (counts + pseudo * background) / (totals + pseudo)
        scores = np.log2(freqs / background)
        consensus = "".join(AMINO_ACIDS[i] for i in np.argmax(counts, axis=1))
        return cls(length=length, scores=scores.astype(np.float64), consensus=consensus, **overrides)

    def _score_table(self) -> np.ndarray:
        """scores extended with stop (col 20) and unknown (col 21) residues."""
        table = getattr(self, "_score_table_cache", None)
        if table is None:
            table = np.hstack([
                self.scores,
                np.full((self.length, 1), STOP_RESIDUE_SCORE),
                np.full((self.length, 1), UNKNOWN_RESIDUE_SCORE),
            ])
            object.__setattr__(self, "_score_table_cache", table)
        return table

    def _residue_scores(self, protein: str) -> np.ndarray:
        """(len(protein), profile_length) substitution score lookup."""
        codes = np.fromiter(
            (AA_INDEX.get(aa, 20 if aa == "*" else 21) for aa in protein),
            dtype=np.int64, count=len(protein),
        )
        return self._score_table()[:, codes].T

    def _diag_index(self, m: int) -> np.ndarray:
        cache = getattr(self, "_diag_index_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_diag_index_cache", cache)
        if m not in cache:
            n = self.length
            cache[m] = (np.arange(n)[None, :] - np.arange(m)[:, None] + (m - 1)).ravel()
        return cache[m]

    def align(self, protein: str) -> dict:
        return self.align_batch([protein])[0]

    def align_batch(self, proteins: list) -> list:
        """Overlap-align proteins to the profile with affine gaps, batched.

        Returns one {"score", "offset", "aligned_len"} per protein.  The
        score comes from the affine DP (free end gaps both sides); the
        anchor offset (profile column of protein residue 0) comes from the
        best-scoring gapless diagonal, which is what the COI anchoring
        downstream needs.  Batching runs all inputs through one vectorized
        DP, which is what makes six-frame detection cheap.
        """
        k_total = len(proteins)
        n = self.length
        ms = np.array([len(p) for p in proteins], dtype=np.int64)
        max_m = int(ms.max()) if k_total else 0
        results: list[dict] = [
            {"score": 0.0, "offset": 0, "aligned_len": 0} for _ in range(k_total)
        ]
        if max_m == 0:
            return results

        subs = np.full((k_total, max_m, n), NEG_INF)
        for k, protein in enumerate(proteins):
            if protein:
                subs[k, : len(protein), :] = self._residue_scores(protein)

        open_, ext = self.gap_open, self.gap_extend
        cols = np.arange(n + 1, dtype=np.float64)
        a_prev = np.zeros((k_total, n + 1))
        m_prev = np.full((k_total, n + 1), NEG_INF)
        iy_prev = np.full((k_total, n + 1), NEG_INF)
        best_final = np.full(k_total, NEG_INF)
        for j in range(1, max_m + 1):
            m_row = np.full((k_total, n + 1), NEG_INF)
            m_row[:, 1:] = a_prev[:, :-1] + subs[:, j - 1, :]
            iy_row = np.maximum(m_prev + open_, iy_prev + ext)
            # Ix chains within the row: gap in the protein consuming profile
            q = m_row + open_ - ext * (cols + 1)
            r = np.maximum.accumulate(q, axis=1)
            ix_row = np.full((k_total, n + 1), NEG_INF)
            ix_row[:, 1:] = ext * cols[1:] + r[:, :-1]
            a_row = np.maximum(np.maximum(m_row, ix_row), iy_row)
            a_row[:, 0] = 0.0  # free protein prefix
            active = j <= ms
            best_final = np.where(
                active, np.maximum(best_final, a_row[:, n]), best_final
            )  # free trailing protein
            at_end = j == ms
            if at_end.any():
                best_final = np.where(
                    at_end, np.maximum(best_final, a_row.max(axis=1)), best_final
                )  # free trailing profile columns
            m_prev, iy_prev, a_prev = m_row, iy_row, a_row

        for k, protein in enumerate(proteins):
            m = len(protein)
            if m == 0:
                continue
            sub = subs[k, :m, :]
            sums = np.bincount(self._diag_index(m), weights=sub.ravel(),
                               minlength=n + m - 1)
            best_shift = int(np.argmax(sums))
            best_d = best_shift - (m - 1)
            results[k] = {
                "score": float(best_final[k]),
                "offset": best_d,
                "aligned_len": min(m, n - best_d) - max(0, -best_d),
            }
        return results


@dataclass
class FrameResult:
    frame: int
    strand: str  # "forward" | "reverse"
    protein: str
    profile_score: float
    penalized_score: float
    internal_stops: list
    profile_offset: int  # profile column of protein residue 0
    oriented: str  # the sequence in the orientation that was translated


def _parse_protein_fasta(text: str) -> list[tuple[str, str]]:
    entries = []
    name = None
    chunks: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                entries.append((name, "".join(chunks)))
            name = line[1:]
            chunks = []
        else:
            chunks.append(line)
    if name is not None:
        entries.append((name, "".join(chunks)))
    return entries


@lru_cache(maxsize=1)
def load_coi_profile() -> ProteinProfile:
    text = resources.files("barcodelab.seq").joinpath("data/coi_profile_alignment.fasta").read_text()
    proteins = [seq for _name, seq in _parse_protein_fasta(text)]
    return ProteinProfile.from_alignment(proteins)


def detect_frame(
    seq: str,
    code: GeneticCode | str = "invertebrate_mitochondrial",
    profile: ProteinProfile | None = None,
) -> FrameResult:
    """Evaluate all six frames and return the best profile match.

    Ties break toward the lowest frame index, forward strand first.
    Raises NoViableFrame when no frame's penalized score clears the floor.
    """
    seq = seq.upper().replace("U", "T")
    if len(seq) < 60:
        raise ValueError(f"sequence too short for frame detection: {len(seq)} < 60")
    if isinstance(code, str):
        code = get_genetic_code(code)
    if profile is None:
        profile = load_coi_profile()

    candidates = []
    for strand, oriented in (("forward", seq), ("reverse", reverse_complement(seq))):
        for frame in (0, 1, 2):
            candidates.append((strand, oriented, frame, translate(oriented, code, frame)))
    alignments = profile.align_batch([c[3] for c in candidates])

    best: FrameResult | None = None
    for (strand, oriented, frame, protein), aln in zip(candidates, alignments):
        stops = internal_stop_positions(protein)
        penalized = aln["score"] - profile.stop_penalty_bits * len(stops)
        result = FrameResult(
            frame=frame,
            strand=strand,
            protein=protein,
            profile_score=aln["score"],
            penalized_score=penalized,
            internal_stops=stops,
            profile_offset=aln["offset"],
            oriented=oriented,
        )
        if best is None or result.penalized_score > best.penalized_score:
            best = result
    assert best is not None
    if best.penalized_score < profile.floor_bits:
        raise NoViableFrame(
            f"best frame scores {best.penalized_score:.1f} bits, floor is {profile.floor_bits:.1f}"
        )
    return best
