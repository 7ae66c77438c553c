"""Record types for the two-sided specimen/sequence data model.

Records are plain dataclasses serialized to JSON documents; the documents
are the unit of storage, audit replay, and API payloads.  Field names in
the docs are stable lowercase identifiers; spreadsheet/display labels map
onto them at the submission and rendering layers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, asdict

RANKS = [
    "kingdom",
    "phylum",
    "class",
    "order",
    "family",
    "subfamily",
    "tribe",
    "genus",
    "species",
    "subspecies",
]

PROCESS_ID_RE = re.compile(r"^([A-Z]{3,5})(\d+)-(\d{2})$")
PROJECT_CODE_RE = re.compile(r"^[A-Z]{3,5}$")


@dataclass(frozen=True)
class ProcessID:
    project_code: str
    serial: int
    year: int  # two-digit

    def render(self) -> str:
        return f"{self.project_code}{self.serial}-{self.year:02d}"

    @classmethod
    def parse(cls, text: str) -> "ProcessID":
        m = PROCESS_ID_RE.match(text.strip())
        if not m:
            raise ValueError(f"not a ProcessID: {text!r}")
        serial = int(m.group(2))
        if serial <= 0:
            raise ValueError(f"ProcessID serial must be positive: {text!r}")
        return cls(project_code=m.group(1), serial=serial, year=int(m.group(3)))


@dataclass
class TaxonomyAssignment:
    kingdom: str | None = None
    phylum: str | None = None
    class_: str | None = None
    order: str | None = None
    family: str | None = None
    subfamily: str | None = None
    tribe: str | None = None
    genus: str | None = None
    species: str | None = None
    subspecies: str | None = None
    identifier_name: str | None = None
    identifier_email: str | None = None
    identification_method: str | None = None
    references: str | None = None
    notes: str | None = None

    _FIELD_BY_RANK = {r: ("class_" if r == "class" else r) for r in RANKS}

    def get_rank(self, rank: str) -> str | None:
        return getattr(self, self._FIELD_BY_RANK[rank])

    def set_rank(self, rank: str, value: str | None) -> None:
        setattr(self, self._FIELD_BY_RANK[rank], value)

    def deepest_rank(self) -> str | None:
        for rank in reversed(RANKS):
            if self.get_rank(rank):
                return rank
        return None

    def to_doc(self) -> dict:
        doc = {}
        for rank in RANKS:
            doc[rank] = self.get_rank(rank)
        for extra in ("identifier_name", "identifier_email", "identification_method", "references", "notes"):
            doc[extra] = getattr(self, extra)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "TaxonomyAssignment":
        obj = cls()
        for rank in RANKS:
            obj.set_rank(rank, doc.get(rank))
        for extra in ("identifier_name", "identifier_email", "identification_method", "references", "notes"):
            setattr(obj, extra, doc.get(extra))
        return obj


@dataclass
class CollectionEvent:
    country: str | None = None
    country_code: str | None = None
    province: str | None = None
    region: str | None = None
    sector: str | None = None
    site: str | None = None
    latitude: float | None = None
    longitude: float | None = None
    coord_precision: int | None = None  # decimal places as submitted
    coord_accuracy: str | None = None
    elevation: float | None = None
    depth: float | None = None
    elevation_accuracy: str | None = None
    depth_accuracy: str | None = None
    collectors: list = field(default_factory=list)
    collection_date: str | None = None
    collection_time: str | None = None
    date_accuracy: str | None = None
    site_code: str | None = None
    collection_event_id: str | None = None
    notes: str | None = None

    def to_doc(self) -> dict:
        return asdict(self)

    @classmethod
    def from_doc(cls, doc: dict) -> "CollectionEvent":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in doc.items() if k in known})


def validate_latlon(lat: float | None, lon: float | None) -> None:
    if lat is not None and not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude out of range: {lat}")
    if lon is not None and not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude out of range: {lon}")


@dataclass
class SpecimenRecord:
    sample_id: str
    project: str
    storing_institution: str
    taxonomy: TaxonomyAssignment
    collection: CollectionEvent
    field_id: str | None = None
    museum_id: str | None = None
    process_ids: list = field(default_factory=list)
    attributes: dict = field(default_factory=dict)
    images: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    comments: list = field(default_factory=list)
    visibility: str = "private"
    gps_obfuscated: bool = False
    created_at: str = ""
    updated_at: str = ""
    version: int = 1

    def to_doc(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "project": self.project,
            "storing_institution": self.storing_institution,
            "taxonomy": self.taxonomy.to_doc(),
            "collection": self.collection.to_doc(),
            "field_id": self.field_id,
            "museum_id": self.museum_id,
            "process_ids": list(self.process_ids),
            "attributes": dict(self.attributes),
            "images": [dict(i) for i in self.images],
            "tags": [dict(t) for t in self.tags],
            "comments": [dict(c) for c in self.comments],
            "visibility": self.visibility,
            "gps_obfuscated": self.gps_obfuscated,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "version": self.version,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SpecimenRecord":
        return cls(
            sample_id=doc["sample_id"],
            project=doc["project"],
            storing_institution=doc["storing_institution"],
            taxonomy=TaxonomyAssignment.from_doc(doc.get("taxonomy", {})),
            collection=CollectionEvent.from_doc(doc.get("collection", {})),
            field_id=doc.get("field_id"),
            museum_id=doc.get("museum_id"),
            process_ids=list(doc.get("process_ids", [])),
            attributes=dict(doc.get("attributes", {})),
            images=list(doc.get("images", [])),
            tags=list(doc.get("tags", [])),
            comments=list(doc.get("comments", [])),
            visibility=doc.get("visibility", "private"),
            gps_obfuscated=doc.get("gps_obfuscated", False),
            created_at=doc.get("created_at", ""),
            updated_at=doc.get("updated_at", ""),
            version=doc.get("version", 1),
        )


SEQUENCE_FLAGS = ("stop-codon", "contaminant", "misidentification", "non-compliant")


@dataclass
class SequenceRecord:
    process_id: str
    sample_id: str
    marker_code: str
    nucleotides: str
    run_site: str
    amino_acids: str | None = None
    reading_frame: int | None = None
    strand: str | None = None
    translation_matrix: str | None = None
    forward_primer: str | None = None
    reverse_primer: str | None = None
    traces: list = field(default_factory=list)
    genbank_accession: str | None = None
    upload_date: str = ""
    updated_at: str = ""
    flags: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    comments: list = field(default_factory=list)
    version: int = 1

    @property
    def seq_key(self) -> str:
        return f"{self.process_id}:{self.marker_code}"

    def to_doc(self) -> dict:
        return {
            "process_id": self.process_id,
            "sample_id": self.sample_id,
            "marker_code": self.marker_code,
            "nucleotides": self.nucleotides,
            "run_site": self.run_site,
            "amino_acids": self.amino_acids,
            "reading_frame": self.reading_frame,
            "strand": self.strand,
            "translation_matrix": self.translation_matrix,
            "forward_primer": self.forward_primer,
            "reverse_primer": self.reverse_primer,
            "traces": [dict(t) for t in self.traces],
            "genbank_accession": self.genbank_accession,
            "upload_date": self.upload_date,
            "updated_at": self.updated_at,
            "flags": sorted(self.flags),
            "tags": [dict(t) for t in self.tags],
            "comments": [dict(c) for c in self.comments],
            "version": self.version,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SequenceRecord":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in doc.items() if k in known})
