"""Submission checks, compliance gating, and upload-package validation."""

from barcodelab.validation.issues import ValidationIssue, blocks_batch
from barcodelab.validation.specimen import (
    parse_submission_table,
    validate_specimen_batch,
    persist_specimen_batch,
)
from barcodelab.validation.compliance import (
    ComplianceReport,
    ContaminantLibrary,
    check_barcode_compliance,
    check_stop_codons,
    screen_contaminants,
)
from barcodelab.validation.traces import TraceQuality, classify_trace
from barcodelab.validation.packages import validate_upload_package
from barcodelab.validation.countries import CountryRegistry

__all__ = [
    "ValidationIssue",
    "blocks_batch",
    "parse_submission_table",
    "validate_specimen_batch",
    "persist_specimen_batch",
    "ComplianceReport",
    "ContaminantLibrary",
    "check_barcode_compliance",
    "check_stop_codons",
    "screen_contaminants",
    "TraceQuality",
    "classify_trace",
    "validate_upload_package",
    "CountryRegistry",
]
