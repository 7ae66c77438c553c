"""Bulk distance computation over sequence sets.

Sequences are encoded into a common coordinate system (profile-anchored for
COI, direct for pre-aligned input, pairwise overlap alignment otherwise)
and pairwise p-distances are computed with chunked numpy.  Cells with no
comparable positions come back as NaN.
"""

from __future__ import annotations

import numpy as np

from barcodelab.errors import MixedMarkers, NoViableFrame
from barcodelab.seq.distance import align_overlap
from barcodelab.seq.frames import ProteinProfile, detect_frame

PAD = -2
AMBIG = -1

_BASE_CODE = {"A": 0, "C": 1, "G": 2, "T": 3}


def encode_plain(seq: str, width: int | None = None, offset: int = 0) -> np.ndarray:
    width = width if width is not None else offset + len(seq)
    out = np.full(width, PAD, dtype=np.int8)
    for i, ch in enumerate(seq.upper()):
        pos = offset + i
        if 0 <= pos < width:
            out[pos] = _BASE_CODE.get(ch, AMBIG)
    return out


def encode_anchored(
    seq: str, profile: ProteinProfile, code: str = "invertebrate_mitochondrial"
) -> np.ndarray:
    """Encode into profile nucleotide coordinates via frame detection."""
    res = detect_frame(seq, code, profile)
    width = profile.length * 3
    out = np.full(width, PAD, dtype=np.int8)
    oriented = res.oriented
    start = 3 * res.profile_offset - res.frame
    for i, ch in enumerate(oriented.upper()):
        pos = start + i
        if 0 <= pos < width:
            out[pos] = _BASE_CODE.get(ch, AMBIG)
    return out


def pairwise_p_distance(encoded: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Symmetric p-distance matrix from an (n, width) int8 encoding."""
    n = encoded.shape[0]
    dist = np.zeros((n, n), dtype=np.float64)
    valid = encoded >= 0
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = encoded[start:stop]  # (b, w)
        both = valid[start:stop][:, None, :] & valid[None, :, :]  # (b, n, w)
        diff = (block[:, None, :] != encoded[None, :, :]) & both
        compared = both.sum(axis=2)
        mismatches = diff.sum(axis=2)
        with np.errstate(invalid="ignore", divide="ignore"):
            dist[start:stop] = np.where(compared > 0, mismatches / np.maximum(compared, 1), np.nan)
    np.fill_diagonal(dist, 0.0)
    return dist


def encode_set(
    sequences: dict,
    marker: str | None = None,
    profile: ProteinProfile | None = None,
    code: str = "invertebrate_mitochondrial",
) -> tuple:
    """(sorted_ids, encoded_matrix) in a shared coordinate system.

    COI markers anchor through the profile; equal-length inputs encode
    directly; anything else falls back to overlap alignment per pair (the
    caller gets ids plus None and should use distance_matrix()).
    """
    ids = sorted(sequences)
    if marker and marker.upper().startswith("COI") and profile is not None:
        rows = []
        for seq_id in ids:
            rows.append(encode_anchored(sequences[seq_id], profile, code))
        return ids, np.vstack(rows)
    lengths = {len(sequences[i]) for i in ids}
    if len(lengths) == 1:
        width = lengths.pop()
        return ids, np.vstack([encode_plain(sequences[i], width) for i in ids])
    return ids, None


def distance_matrix(
    sequences: dict,
    marker: str | None = None,
    profile: ProteinProfile | None = None,
    code: str = "invertebrate_mitochondrial",
) -> tuple:
    """(sorted_ids, square p-distance matrix)."""
    ids, encoded = encode_set(sequences, marker, profile, code)
    if encoded is not None:
        return ids, pairwise_p_distance(encoded)
    n = len(ids)
    dist = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            result = align_overlap(sequences[ids[i]], sequences[ids[j]])
            dist[i, j] = dist[j, i] = 1.0 - result["identity_fraction"]
    return ids, dist
