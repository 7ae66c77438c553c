"""Trace quality classification from phd-format score files.

The score file is the text layout produced by base callers: per-base lines
"base quality position" between BEGIN_DNA and END_DNA.  The class is a pure
function of the mean quality: Failed < 20 <= Low < 30 <= Medium < 40 <= High.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

from barcodelab.errors import MalformedScoreFile

THRESHOLDS = (("Failed", 0.0), ("Low", 20.0), ("Medium", 30.0), ("High", 40.0))


@dataclass(frozen=True)
class TraceQuality:
    quality_class: str
    mean_phred: float | None
    base_count: int

    def to_doc(self) -> dict:
        return asdict(self)


def class_for_mean(mean_phred: float) -> str:
    chosen = "Failed"
    for name, floor in THRESHOLDS:
        if mean_phred >= floor:
            chosen = name
    return chosen


def parse_phd(text: str) -> list:
    """Per-base Phred scores from a phd.1 text file."""
    scores: list[int] = []
    in_dna = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped == "BEGIN_DNA":
            in_dna = True
            continue
        if stripped == "END_DNA":
            in_dna = False
            continue
        if not in_dna or not stripped:
            continue
        parts = stripped.split()
        if len(parts) < 2:
            raise MalformedScoreFile(f"line {line_no}: expected 'base quality [position]'")
        try:
            scores.append(int(parts[1]))
        except ValueError as exc:
            raise MalformedScoreFile(f"line {line_no}: quality not an integer") from exc
    if not scores:
        raise MalformedScoreFile("no called bases between BEGIN_DNA/END_DNA")
    return scores


def classify_trace(score_file_text: str | None, declared_failed: bool = False) -> TraceQuality:
    """Classify from a score file; absent files fall back to the declared status."""
    if score_file_text is None:
        return TraceQuality("Failed" if declared_failed else "Low", None, 0)
    scores = parse_phd(score_file_text)
    mean = sum(scores) / len(scores)
    return TraceQuality(class_for_mean(mean), mean, len(scores))
