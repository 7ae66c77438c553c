"""Pairwise nucleotide comparison: p-distance and overlap alignment.

p_distance expects pre-aligned (or equal-length) inputs and compares only
positions where both sequences carry unambiguous bases.  align_overlap runs
a free-end-gap global alignment (linear gaps, rows vectorized with a
cumulative-max trick) and reports the overlap length and identity over it.
"""

from __future__ import annotations

import numpy as np

from barcodelab.errors import NoOverlap

_COMPLEMENT = str.maketrans("ACGTURYSWKMBDHVN-", "TGCAAYRSWMKVHDBN-")

# Stiff gap cost: barcode regions are essentially indel-free, so alignments
# should not buy identity by shifting segments around isolated mismatches.
MATCH = 2
MISMATCH = -3
GAP = -12


def reverse_complement(seq: str) -> str:
    return seq.upper().translate(_COMPLEMENT)[::-1]


def _encode(seq: str) -> np.ndarray:
    """Map bases to codes; unambiguous ACGT -> 0..3, everything else -> -1."""
    arr = np.frombuffer(seq.upper().encode(), dtype=np.uint8)
    out = np.full(arr.shape, -1, dtype=np.int8)
    for i, base in enumerate(b"ACGT"):
        out[arr == base] = i
    return out


def p_distance(a: str, b: str) -> float:
    """Uncorrected proportion of differing positions over comparable sites."""
    if len(a) != len(b):
        raise NoOverlap(f"length mismatch: {len(a)} vs {len(b)} (align first)")
    ea, eb = _encode(a), _encode(b)
    comparable = (ea >= 0) & (eb >= 0)
    n = int(comparable.sum())
    if n == 0:
        raise NoOverlap("no comparable positions")
    mismatches = int(((ea != eb) & comparable).sum())
    return mismatches / n


def identity_over_positions(a: str, b: str) -> tuple[int, int]:
    """(#compared, #matching) over unambiguous positions of equal-length strings."""
    ea, eb = _encode(a), _encode(b)
    comparable = (ea >= 0) & (eb >= 0)
    n = int(comparable.sum())
    matches = int(((ea == eb) & comparable).sum())
    return n, matches


def _overlap_stats(aligned_a: str, aligned_b: str) -> tuple[int, float]:
    overlap = 0
    compared = 0
    matches = 0
    for ca, cb in zip(aligned_a, aligned_b):
        if ca != "-" and cb != "-":
            overlap += 1
            if ca in "ACGT" and cb in "ACGT":
                compared += 1
                if ca == cb:
                    matches += 1
    identity = matches / compared if compared else 0.0
    return overlap, identity


def align_overlap(a: str, b: str) -> dict:
    """Global alignment with free end gaps.

    Returns {"overlap_bp": aligned columns where both sequences have bases,
    "identity_fraction": matches over unambiguous overlap columns,
    "aligned": (aligned_a, aligned_b)}.

    When the optimal alignment is empty (no similarity at all), the
    sequences are compared ungapped at offset zero so dissimilar inputs
    report identity 0.0 instead of failing.
    """
    a = a.upper()
    b = b.upper()
    if not a or not b:
        raise NoOverlap("empty input")
    n, m = len(a), len(b)
    ea, eb = _encode(a), _encode(b)

    score = np.zeros((n + 1, m + 1), dtype=np.int32)
    js = np.arange(m + 1, dtype=np.int32)
    gap_ramp = GAP * js
    for i in range(1, n + 1):
        ai = ea[i - 1]
        if ai >= 0:
            sub = np.where(eb == ai, MATCH, MISMATCH).astype(np.int32)
        else:
            sub = np.full(m, MISMATCH, dtype=np.int32)
        cand = np.maximum(score[i - 1, :-1] + sub, score[i - 1, 1:] + GAP)
        # fold in left-gap chains: score[i,j] = max_{k<=j} cand'[k] + GAP*(j-k)
        t = np.empty(m + 1, dtype=np.int32)
        t[0] = 0  # free leading gap boundary
        t[1:] = cand
        score[i] = np.maximum.accumulate(t - gap_ramp) + gap_ramp

    last_row = score[n, :]
    last_col = score[:, m]
    jr = int(np.argmax(last_row))
    ic = int(np.argmax(last_col))
    if last_row[jr] >= last_col[ic]:
        i, j = n, jr
    else:
        i, j = ic, m

    ta, tb = a[i:], b[j:]
    out_a: list[str] = []
    out_b: list[str] = []
    while i > 0 and j > 0:
        ai = ea[i - 1]
        s = MATCH if (ai >= 0 and ai == eb[j - 1]) else MISMATCH
        cur = score[i, j]
        if cur == score[i - 1, j - 1] + s:
            i -= 1
            j -= 1
            out_a.append(a[i])
            out_b.append(b[j])
        elif cur == score[i - 1, j] + GAP:
            i -= 1
            out_a.append(a[i])
            out_b.append("-")
        elif cur == score[i, j - 1] + GAP:
            j -= 1
            out_a.append("-")
            out_b.append(b[j])
        else:  # free-boundary cell reached (score 0 with no move decomposition)
            break
    # leading overhangs
    la, lb = a[:i], b[:j]
    aligned_a = la + "-" * len(lb) + "".join(reversed(out_a)) + ta + "-" * len(tb)
    aligned_b = "-" * len(la) + lb + "".join(reversed(out_b)) + "-" * len(ta) + tb

    overlap, identity = _overlap_stats(aligned_a, aligned_b)
    if overlap == 0:
        # no-similarity fallback: ungapped comparison at offset zero
        aligned_a = a + "-" * max(0, m - n)
        aligned_b = b + "-" * max(0, n - m)
        overlap, identity = _overlap_stats(aligned_a, aligned_b)
        if overlap == 0:
            raise NoOverlap("alignment produced no overlapping columns")
    return {
        "overlap_bp": overlap,
        "identity_fraction": identity,
        "aligned": (aligned_a, aligned_b),
    }
