"""Reference libraries and the sequence identification engine."""

from barcodelab.idengine.library import ReferenceLibrary, LibraryEntry, build_library, LIBRARY_KINDS
from barcodelab.idengine.identify import (
    IdThresholds,
    identify_coi,
    identify_generic,
    batch_identify,
    assign_rank,
)

__all__ = [
    "ReferenceLibrary",
    "LibraryEntry",
    "build_library",
    "LIBRARY_KINDS",
    "IdThresholds",
    "identify_coi",
    "identify_generic",
    "batch_identify",
    "assign_rank",
]
