"""Record data model: specimen/sequence records, audit trail, backbone taxonomy."""

from barcodelab.model.records import (
    RANKS,
    ProcessID,
    TaxonomyAssignment,
    CollectionEvent,
    SpecimenRecord,
    SequenceRecord,
)
from barcodelab.model.audit import AuditEvent, replay_events, flatten_doc, diff_docs, apply_diff
from barcodelab.model.taxonomy import TaxonomyRegistry

__all__ = [
    "RANKS",
    "ProcessID",
    "TaxonomyAssignment",
    "CollectionEvent",
    "SpecimenRecord",
    "SequenceRecord",
    "AuditEvent",
    "replay_events",
    "flatten_doc",
    "diff_docs",
    "apply_diff",
    "TaxonomyRegistry",
]
