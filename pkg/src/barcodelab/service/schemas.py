"""Pydantic request/response models for the workbench API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ContainerCreate(BaseModel):
    kind: str
    code: str
    title: str = ""
    description: str = ""
    parent: str | None = None


class AclUpdate(BaseModel):
    user: str
    permissions: list[str] = Field(default_factory=list)


class RecordUpdate(BaseModel):
    updates: dict
    expected_version: int | None = None


class AnnotationCreate(BaseModel):
    type: str = "tag"  # tag | comment
    label: str | None = None
    text: str | None = None
    target_kind: str = "record"  # record | sequence | image | trace
    target_detail: str | None = None


class DatasetRecords(BaseModel):
    record_refs: list[str]


class CitationAttach(BaseModel):
    citation: str


class BinUpdateRequest(BaseModel):
    marker: str = "COI-5P"
    seed_threshold: float = 0.022
    prune_distance: float = 0.044
    inflation: float = 2.0


class LibraryBuild(BaseModel):
    kind: str
    marker: str = "COI-5P"
    year: int | None = None


class IdentifyRequest(BaseModel):
    db: str | None = None
    kind: str | None = None
    marker: str = "COI-5P"
    year: int | None = None
    fasta: str
    species_threshold: float = 0.99
    genus_threshold: float = 0.97
    family_threshold: float = 0.95


class AnalysisLaunch(BaseModel):
    tool: str
    selection: dict
    params: dict = Field(default_factory=dict)


class PackageBuild(BaseModel):
    selection: dict
    cadence_tag: str
    include_private: bool = False


class AccessionImport(BaseModel):
    rows: list[dict]


class TaxonCreate(BaseModel):
    rank: str
    name: str
    parent_rank: str | None = None
    parent_name: str | None = None


class UserCreate(BaseModel):
    username: str
