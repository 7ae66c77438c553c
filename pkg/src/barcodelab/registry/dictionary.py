"""Canonical export columns shared by the API and data packages."""

from __future__ import annotations

SPECIMEN_FIELDS = [
    ("sample_id", "string", "Unique specimen identifier"),
    ("field_id", "string", "Identifier assigned in the field"),
    ("museum_id", "string", "Identifier assigned at institutional accession"),
    ("process_ids", "string", "Minted process identifiers, ';'-separated"),
    ("project", "string", "Home project code"),
    ("storing_institution", "string", "Registered depository"),
    ("kingdom", "string", "Taxonomy: kingdom"),
    ("phylum", "string", "Taxonomy: phylum"),
    ("class", "string", "Taxonomy: class"),
    ("order", "string", "Taxonomy: order"),
    ("family", "string", "Taxonomy: family"),
    ("subfamily", "string", "Taxonomy: subfamily"),
    ("tribe", "string", "Taxonomy: tribe"),
    ("genus", "string", "Taxonomy: genus"),
    ("species", "string", "Taxonomy: species"),
    ("subspecies", "string", "Taxonomy: subspecies"),
    ("identifier", "string", "Person providing the identification"),
    ("identification_method", "string", "How the identification was made"),
    ("country", "string", "Collection country"),
    ("country_code", "string", "ISO-3166 alpha-2 code"),
    ("province", "string", "Province or state"),
    ("region", "string", "Region"),
    ("sector", "string", "Sector"),
    ("site", "string", "Exact collection site"),
    ("latitude", "number", "Decimal degrees"),
    ("longitude", "number", "Decimal degrees"),
    ("elevation", "number", "Meters above sea level"),
    ("depth", "number", "Meters below surface"),
    ("collectors", "string", "Collector names, ';'-separated"),
    ("collection_date", "date", "ISO date of the collection event"),
    ("site_code", "string", "Collection site code"),
    ("collection_event_id", "string", "Collection event identifier"),
    ("sex", "string", "Specimen sex"),
    ("life_stage", "string", "Specimen life stage"),
    ("tissue_type", "string", "Tissue descriptor"),
    ("voucher_type", "string", "Voucher status"),
    ("extra_info", "string", "Free-text extra info"),
    ("visibility", "string", "public or private"),
    ("tags", "string", "Tag labels, ';'-separated"),
    ("image_count", "integer", "Number of attached images"),
    ("created_at", "datetime", "Record creation timestamp"),
    ("updated_at", "datetime", "Last modification timestamp"),
]

SEQUENCE_FIELDS = [
    ("process_id", "string", "Sequence-side record identifier"),
    ("sample_id", "string", "Joined specimen identifier"),
    ("marker_code", "string", "Registered gene marker"),
    ("nucleotides", "string", "IUPAC nucleotide sequence"),
    ("seq_length", "integer", "Ungapped sequence length"),
    ("amino_acids", "string", "Derived protein translation"),
    ("translation_matrix", "string", "Genetic code used for translation"),
    ("forward_primer", "string", "Registered forward primer code"),
    ("reverse_primer", "string", "Registered reverse primer code"),
    ("run_site", "string", "Facility that generated the sequence"),
    ("genbank_accession", "string", "External accession, when assigned"),
    ("bin_uri", "string", "Current BIN assignment"),
    ("flags", "string", "QC flags, ';'-separated"),
    ("trace_count", "integer", "Number of attached trace files"),
    ("upload_date", "datetime", "Sequence upload timestamp"),
]

BIN_FIELDS = [
    ("bin_uri", "string", "Barcode Index Number URI"),
    ("doi", "string", "DOI-shaped identifier for the BIN page"),
    ("member_count", "integer", "Number of member sequences"),
    ("members", "string", "Member sequence keys, ';'-separated"),
    ("founding", "string", "Founding member sequence key"),
    ("avg_distance", "number", "Mean intra-BIN p-distance"),
    ("max_distance", "number", "Maximum intra-BIN p-distance"),
    ("created_at", "datetime", "First time this URI was issued"),
]

TAXONOMY_FIELDS = [
    ("taxid", "integer", "Stable node identifier"),
    ("rank", "string", "Taxonomic rank"),
    ("name", "string", "Scientific name"),
    ("parent_rank", "string", "Parent node rank"),
    ("parent_name", "string", "Parent node name"),
]


def specimen_row(doc: dict) -> dict:
    taxonomy = doc.get("taxonomy") or {}
    collection = doc.get("collection") or {}
    attributes = doc.get("attributes") or {}
    return {
        "sample_id": doc.get("sample_id"),
        "field_id": doc.get("field_id"),
        "museum_id": doc.get("museum_id"),
        "process_ids": "; ".join(doc.get("process_ids", [])),
        "project": doc.get("project"),
        "storing_institution": doc.get("storing_institution"),
        "kingdom": taxonomy.get("kingdom"),
        "phylum": taxonomy.get("phylum"),
        "class": taxonomy.get("class"),
        "order": taxonomy.get("order"),
        "family": taxonomy.get("family"),
        "subfamily": taxonomy.get("subfamily"),
        "tribe": taxonomy.get("tribe"),
        "genus": taxonomy.get("genus"),
        "species": taxonomy.get("species"),
        "subspecies": taxonomy.get("subspecies"),
        "identifier": taxonomy.get("identifier_name"),
        "identification_method": taxonomy.get("identification_method"),
        "country": collection.get("country"),
        "country_code": collection.get("country_code"),
        "province": collection.get("province"),
        "region": collection.get("region"),
        "sector": collection.get("sector"),
        "site": collection.get("site"),
        "latitude": collection.get("latitude"),
        "longitude": collection.get("longitude"),
        "elevation": collection.get("elevation"),
        "depth": collection.get("depth"),
        "collectors": "; ".join(collection.get("collectors", [])),
        "collection_date": collection.get("collection_date"),
        "site_code": collection.get("site_code"),
        "collection_event_id": collection.get("collection_event_id"),
        "sex": attributes.get("sex"),
        "life_stage": attributes.get("life_stage"),
        "tissue_type": attributes.get("tissue_type"),
        "voucher_type": attributes.get("voucher_type"),
        "extra_info": attributes.get("extra_info"),
        "visibility": doc.get("visibility"),
        "tags": "; ".join(t.get("label", "") for t in doc.get("tags", [])),
        "image_count": len(doc.get("images", [])),
        "created_at": doc.get("created_at"),
        "updated_at": doc.get("updated_at"),
    }


def sequence_row(doc: dict, bin_uri: str | None = None) -> dict:
    return {
        "process_id": doc.get("process_id"),
        "sample_id": doc.get("sample_id"),
        "marker_code": doc.get("marker_code"),
        "nucleotides": doc.get("nucleotides"),
        "seq_length": len((doc.get("nucleotides") or "").replace("-", "")),
        "amino_acids": doc.get("amino_acids"),
        "translation_matrix": doc.get("translation_matrix"),
        "forward_primer": doc.get("forward_primer"),
        "reverse_primer": doc.get("reverse_primer"),
        "run_site": doc.get("run_site"),
        "genbank_accession": doc.get("genbank_accession"),
        "bin_uri": bin_uri,
        "flags": "; ".join(doc.get("flags", [])),
        "trace_count": len(doc.get("traces", [])),
        "upload_date": doc.get("upload_date"),
    }


def combined_row(spec_doc: dict, seq_doc: dict, bin_uri: str | None = None) -> dict:
    row = specimen_row(spec_doc)
    seq = sequence_row(seq_doc, bin_uri)
    seq.pop("sample_id", None)
    row.update(seq)
    return row


COMBINED_FIELDS = SPECIMEN_FIELDS + [f for f in SEQUENCE_FIELDS if f[0] != "sample_id"]
