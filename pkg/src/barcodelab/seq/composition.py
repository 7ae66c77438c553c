"""Base composition statistics for the marker summary report."""

from __future__ import annotations


def composition(seq: str) -> dict:
    """Counts per base plus GC% and ambiguous%.

    GC% uses the full sequence length as denominator; S counts toward GC,
    all other ambiguity codes toward neither.  ambiguous% is the non-ACGT,
    non-gap fraction; gaps are reported separately so ACGT% + ambiguous% +
    gap% = 100%.
    """
    seq = seq.upper()
    if not seq:
        raise ValueError("empty sequence")
    counts: dict[str, int] = {}
    for ch in seq:
        counts[ch] = counts.get(ch, 0) + 1
    length = len(seq)
    gc = counts.get("G", 0) + counts.get("C", 0) + counts.get("S", 0)
    acgt = sum(counts.get(b, 0) for b in "ACGT")
    gaps = counts.get("-", 0)
    ambiguous = length - acgt - gaps
    return {
        "length": length,
        "counts": dict(sorted(counts.items())),
        "gc_percent": 100.0 * gc / length,
        "acgt_percent": 100.0 * acgt / length,
        "ambiguous_percent": 100.0 * ambiguous / length,
        "gap_percent": 100.0 * gaps / length,
    }
