"""Upload-package validation for image, trace, and sequence submissions.

Raises typed errors naming the violated limit; a clean package returns the
parsed, normalized payload ready for ingestion.
"""

from __future__ import annotations

from barcodelab import errors
from barcodelab.seq.fasta import parse_fasta
from barcodelab.validation.images import megapixels

MAX_IMAGES_PER_PACKAGE = 200
MAX_IMAGE_MEGAPIXELS = 20.0
MAX_IMAGES_PER_SPECIMEN = 10
MAX_TRACE_FILES_PER_PACKAGE = 400
MAX_TRACES_PER_RECORD = 10
MAX_SEQUENCES_PER_UPLOAD = 2000

IMAGE_MANDATORY = ("image name", "original specimen", "orientation", "license", "license institution")
TRACE_MANDATORY = ("trace file", "pcr primer fwd", "pcr primer rev", "process id")


def _lower_keys(row: dict) -> dict:
    return {str(k).strip().lower(): (v.strip() if isinstance(v, str) else v) for k, v in row.items()}


def validate_upload_package(platform, kind: str, manifest: list, files: dict) -> dict:
    if kind == "image":
        return _validate_images(platform, manifest, files)
    if kind == "trace":
        return _validate_traces(platform, manifest, files)
    if kind == "sequence":
        return _validate_sequences(platform, manifest, files)
    raise ValueError(f"unknown package kind: {kind}")


def _validate_images(platform, manifest: list, files: dict) -> dict:
    image_files = {n: b for n, b in files.items() if n.lower().endswith((".jpg", ".jpeg", ".png"))}
    if len(image_files) > MAX_IMAGES_PER_PACKAGE:
        raise errors.LimitExceeded(f"images per package <= {MAX_IMAGES_PER_PACKAGE}")
    rows = [_lower_keys(r) for r in manifest]
    listed = {r.get("image name") for r in rows}
    for name in sorted(image_files):
        if name not in listed:
            raise errors.UnlistedFile(name)
    per_specimen: dict[str, int] = {}
    normalized = []
    for row in rows:
        for field in IMAGE_MANDATORY:
            if not row.get(field):
                raise errors.MissingMandatoryField(field, f"image row {row.get('image name')}")
        name = row["image name"]
        if name not in image_files:
            raise errors.UnlistedFile(f"{name} (listed but not in package)")
        mp = megapixels(image_files[name])
        if mp > MAX_IMAGE_MEGAPIXELS:
            raise errors.LimitExceeded(
                f"image megapixels <= {MAX_IMAGE_MEGAPIXELS:g} ({name}: {mp:.1f} MP)"
            )
        specimen = row.get("sample id") or row.get("process id") or ""
        per_specimen[specimen] = per_specimen.get(specimen, 0) + 1
        if per_specimen[specimen] > MAX_IMAGES_PER_SPECIMEN:
            raise errors.LimitExceeded(
                f"images per specimen <= {MAX_IMAGES_PER_SPECIMEN} ({specimen})"
            )
        normalized.append(row)
    return {"kind": "image", "rows": normalized}


def _validate_traces(platform, manifest: list, files: dict) -> dict:
    trace_files = {n: b for n, b in files.items() if n.lower().endswith((".ab1", ".scf"))}
    if len(trace_files) > MAX_TRACE_FILES_PER_PACKAGE:
        raise errors.LimitExceeded(f"trace files per package <= {MAX_TRACE_FILES_PER_PACKAGE}")
    rows = [_lower_keys(r) for r in manifest]
    listed = {r.get("trace file") for r in rows}
    for name in sorted(trace_files):
        if name not in listed:
            raise errors.UnlistedFile(name)
    per_record: dict[str, int] = {}
    for row in rows:
        for field in TRACE_MANDATORY:
            if not row.get(field):
                raise errors.MissingMandatoryField(field, f"trace row {row.get('trace file')}")
        name = row["trace file"]
        if name not in trace_files:
            raise errors.UnlistedFile(f"{name} (listed but not in package)")
        score = row.get("score file")
        if score and score not in files:
            raise errors.UnlistedFile(f"{score} (score file missing from package)")
        for primer_field in ("pcr primer fwd", "pcr primer rev"):
            primer = row[primer_field]
            if not platform.store.has_vocab("primer", primer):
                raise errors.UnregisteredPrimer(primer)
        record = row["process id"]
        per_record[record] = per_record.get(record, 0) + 1
        if per_record[record] > MAX_TRACES_PER_RECORD:
            raise errors.LimitExceeded(f"traces per record <= {MAX_TRACES_PER_RECORD} ({record})")
    return {"kind": "trace", "rows": rows}


def _validate_sequences(platform, manifest: list, files: dict) -> dict:
    meta = _lower_keys(manifest[0]) if manifest else {}
    run_site = meta.get("run site")
    if not run_site:
        raise errors.MissingMandatoryField("run site", "sequence upload metadata")
    if not platform.store.has_vocab("runsite", run_site):
        raise errors.UnregisteredRunSite(run_site)
    fasta_names = [n for n in files if n.lower().endswith((".fas", ".fasta", ".fa"))]
    if not fasta_names:
        raise errors.MissingMandatoryField("sequence", "no FASTA file in package")
    entries = []
    for name in sorted(fasta_names):
        entries.extend(parse_fasta(files[name].decode("utf-8")))
    if len(entries) > MAX_SEQUENCES_PER_UPLOAD:
        raise errors.LimitExceeded(f"sequences per upload <= {MAX_SEQUENCES_PER_UPLOAD}")
    marker = meta.get("marker")
    if not marker:
        raise errors.MissingMandatoryField("marker", "sequence upload metadata")
    if platform.markers.get(marker) is None:
        raise errors.UnknownMarker(marker)
    return {"kind": "sequence", "marker": marker, "run_site": run_site, "entries": entries}
