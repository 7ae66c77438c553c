"""Issue records produced by the three-tier submission checks."""

from __future__ import annotations

from dataclasses import dataclass, asdict

CATEGORIES = ("Consistency", "Completeness", "Compliance")
RESOLUTIONS = ("AutoCorrected", "Annotated", "Paused", "Rejected")


@dataclass(frozen=True)
class ValidationIssue:
    category: str
    field: str
    message: str
    resolution: str
    row: int | None = None
    record: str | None = None
    corrected_value: object = None
    suggestion: str | None = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category: {self.category}")
        if self.resolution not in RESOLUTIONS:
            raise ValueError(f"unknown resolution: {self.resolution}")
        # Completeness problems annotate or pause; they never reject a batch.
        if self.category == "Completeness" and self.resolution == "Rejected":
            raise ValueError("completeness issues never reject")

    def to_doc(self) -> dict:
        return asdict(self)


def blocks_batch(issues: list) -> bool:
    return any(i.resolution in ("Paused", "Rejected") for i in issues)
