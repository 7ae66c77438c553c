"""Exception hierarchy shared across the platform.

Every domain error derives from BarcodeLabError so the service layer can map
them onto HTTP statuses in one place.
"""

from __future__ import annotations


class BarcodeLabError(Exception):
    """Base class for all domain errors."""


# --- record model ---------------------------------------------------------

class DuplicateSampleId(BarcodeLabError):
    pass


class UnknownProject(BarcodeLabError):
    pass


class UnknownRecord(BarcodeLabError):
    pass


class UnknownTarget(BarcodeLabError):
    pass


class MissingRequiredField(BarcodeLabError):
    def __init__(self, field: str):
        self.field = field
        super().__init__(f"missing required field: {field}")


class ValidationReject(BarcodeLabError):
    pass


class EmptyHistoryWindow(BarcodeLabError):
    pass


class VersionConflict(BarcodeLabError):
    def __init__(self, current_version: int, submitted_version: int):
        self.current_version = current_version
        self.submitted_version = submitted_version
        super().__init__(
            f"stale version token: record is at v{current_version}, edit based on v{submitted_version}"
        )


class PermissionDenied(BarcodeLabError):
    def __init__(self, permission: str, detail: str = ""):
        self.permission = permission
        msg = f"permission denied: {permission}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


# --- sequences ------------------------------------------------------------

class MalformedDefline(BarcodeLabError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"malformed defline at line {line_no}" + (f": {detail}" if detail else ""))


class EmptySequence(BarcodeLabError):
    def __init__(self, seq_id: str):
        self.seq_id = seq_id
        super().__init__(f"empty sequence: {seq_id}")


class InvalidCharacter(BarcodeLabError):
    def __init__(self, seq_id: str, position: int, char: str):
        self.seq_id = seq_id
        self.position = position
        self.char = char
        super().__init__(f"invalid character {char!r} in {seq_id} at position {position}")


class UnknownGeneticCode(BarcodeLabError):
    pass


class NoViableFrame(BarcodeLabError):
    pass


class NoOverlap(BarcodeLabError):
    pass


# --- validation -----------------------------------------------------------

class EmptyBatch(BarcodeLabError):
    pass


class UnknownMarker(BarcodeLabError):
    pass


class MalformedScoreFile(BarcodeLabError):
    pass


class LimitExceeded(BarcodeLabError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"limit exceeded: {which}")


class UnlistedFile(BarcodeLabError):
    def __init__(self, filename: str):
        self.filename = filename
        super().__init__(f"file not listed in manifest: {filename}")


class UnregisteredPrimer(BarcodeLabError):
    pass


class UnregisteredRunSite(BarcodeLabError):
    pass


class MissingMandatoryField(BarcodeLabError):
    def __init__(self, field: str, context: str = ""):
        self.field = field
        msg = f"missing mandatory field: {field}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


# --- clustering / identification ------------------------------------------

class EmptyInput(BarcodeLabError):
    pass


class MixedMarkers(BarcodeLabError):
    pass


class UnknownBin(BarcodeLabError):
    pass


class UnknownKind(BarcodeLabError):
    pass


class NotCoiLike(BarcodeLabError):
    pass


class EmptyLibrary(BarcodeLabError):
    pass


class BatchTooLarge(BarcodeLabError):
    pass


# --- analytics ------------------------------------------------------------

class TooManyRecords(BarcodeLabError):
    pass


class TooFew(BarcodeLabError):
    pass


class NoComparablePairs(BarcodeLabError):
    pass


class SingleSpecies(BarcodeLabError):
    pass


class UnalignedInput(BarcodeLabError):
    pass


class MissingCoordinates(BarcodeLabError):
    pass


class DegenerateMatrix(BarcodeLabError):
    pass


class EmptySite(BarcodeLabError):
    pass


# --- containers / registry -------------------------------------------------

class DuplicateCode(BarcodeLabError):
    pass


class BadCodeFormat(BarcodeLabError):
    pass


class IllegalNesting(BarcodeLabError):
    pass


class NoAclSupported(BarcodeLabError):
    pass


class UnknownDataset(BarcodeLabError):
    pass


class UnknownContainer(BarcodeLabError):
    pass


class AlreadyPublished(BarcodeLabError):
    pass


class ParseError(BarcodeLabError):
    def __init__(self, position: int, detail: str = ""):
        self.position = position
        super().__init__(f"query parse error at {position}" + (f": {detail}" if detail else ""))


class UnknownQualifier(BarcodeLabError):
    def __init__(self, qualifier: str):
        self.qualifier = qualifier
        super().__init__(f"unknown qualifier: [{qualifier}]")


class EmptySelection(BarcodeLabError):
    pass


class EmptyDataset(BarcodeLabError):
    pass


class MissingMandatorySourceField(BarcodeLabError):
    def __init__(self, record: str, field: str):
        self.record = record
        self.field = field
        super().__init__(f"record {record} missing mandatory source field: {field}")
