"""FastAPI application: public data API, taxonomy, identification, workbench.

Paths live under /api/v4/...; the legacy-style aliases from the published
endpoint table (/index.php/API_Public/..., /index.php/API_Tax/...,
/index.php/lds_xml) are registered as drop-in compatible routes.
"""

from __future__ import annotations

import io
import zipfile
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from barcodelab import errors
from barcodelab.canonical import dumps
from barcodelab.idengine.identify import IdThresholds, batch_identify, identify
from barcodelab.idengine.library import LIBRARY_KINDS, build_library
from barcodelab.model import lifecycle
from barcodelab.platform import Platform
from barcodelab.registry import containers as reg_containers
from barcodelab.registry.dictionary import (
    COMBINED_FIELDS,
    SEQUENCE_FIELDS,
    SPECIMEN_FIELDS,
    combined_row,
    sequence_row,
    specimen_row,
)
from barcodelab.registry.genbank import export_genbank_package, import_accessions
from barcodelab.registry.packages import build_data_package
from barcodelab.registry.search import RESULT_CAP, QueryExpression, QueryTerm, search
from barcodelab.seq.fasta import parse_fasta
from barcodelab.service import views
from barcodelab.service.analyses import ANALYSIS_TOOLS, run_analysis
from barcodelab.service.formats import CONTENT_TYPES, render, render_xml
from barcodelab.service.jobs import JobRunner
from barcodelab.service.schemas import (
    AccessionImport,
    AclUpdate,
    AnalysisLaunch,
    AnnotationCreate,
    BinUpdateRequest,
    CitationAttach,
    ContainerCreate,
    DatasetRecords,
    IdentifyRequest,
    LibraryBuild,
    PackageBuild,
    RecordUpdate,
    TaxonCreate,
    UserCreate,
)
from barcodelab.validation.packages import validate_upload_package
from barcodelab.validation.specimen import (
    parse_submission_table,
    persist_specimen_batch,
    validate_specimen_batch,
)
from barcodelab.validation.traces import classify_trace

_ERROR_STATUS = [
    (errors.PermissionDenied, 403),
    (errors.VersionConflict, 409),
    (errors.DuplicateSampleId, 409),
    (errors.DuplicateCode, 409),
    (errors.AlreadyPublished, 409),
    ((errors.UnknownRecord, errors.UnknownTarget, errors.UnknownBin, errors.UnknownDataset,
      errors.UnknownContainer, errors.UnknownProject), 404),
    (errors.NotCoiLike, 422),
    ((errors.BatchTooLarge, errors.LimitExceeded, errors.TooManyRecords), 413),
]

_PARAM_QUALIFIERS = {
    "taxon": "tax",
    "geo": "geo",
    "ids": "ids",
    "bin": "bin",
    "container": "container",
    "institutions": "inst",
    "researchers": "researcher",
    "marker": "marker",
}

_DB_KINDS = {
    "": "All",
    "SPECIES": "SpeciesLevel",
    "SPECIES_PUBLIC": "Public",
    "SPECIES_FULL": "SpeciesLevelFullLength",
    "PUBLIC": "Public",
}

_MARKER_ALIASES = {"COX1": "COI-5P", "COI": "COI-5P", "COI-5P": "COI-5P"}


def _status_for(exc: errors.BarcodeLabError) -> int:
    for types, status in _ERROR_STATUS:
        if isinstance(exc, types):
            return status
    return 400


def create_app(platform: Platform, console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="BarcodeLab", version="0.1.0")
    app.state.platform = platform
    app.state.jobs = JobRunner(platform)
    app.state.libraries = {}

    @app.exception_handler(errors.BarcodeLabError)
    async def domain_error_handler(_request: Request, exc: errors.BarcodeLabError):
        payload = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, errors.PermissionDenied):
            payload["permission"] = exc.permission
        return JSONResponse(status_code=_status_for(exc), content=payload)

    def current_user(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        username = platform.store.user_by_token(authorization.removeprefix("Bearer ").strip())
        if username is None:
            raise HTTPException(status_code=401, detail="invalid token")
        return username

    def require(user: str, container: str, permission: str) -> None:
        reg_containers.require_access(platform.store, user, container, permission)

    def can_view_record(user: str, spec_doc: dict) -> None:
        if spec_doc.get("visibility") == "public":
            return
        require(user, spec_doc["project"], "ViewDownload")

    # ------------------------------------------------------------------
    # public data API
    # ------------------------------------------------------------------

    def _public_query(params: dict) -> list:
        terms = []
        for param, qualifier in _PARAM_QUALIFIERS.items():
            raw = params.get(param)
            if not raw:
                continue
            for value in raw.split("|"):
                value = value.strip()
                if value:
                    terms.append(QueryTerm(qualifier, value))
        if not terms:
            raise HTTPException(status_code=400, detail="at least one filter parameter required")
        result = search(platform, QueryExpression(terms), scope="public")
        return result["records"]

    def _collect_params(taxon=None, ids=None, bin=None, container=None, institutions=None,
                        researchers=None, geo=None, marker=None) -> dict:
        return {"taxon": taxon, "ids": ids, "bin": bin, "container": container,
                "institutions": institutions, "researchers": researchers, "geo": geo,
                "marker": marker}

    _ENDPOINT_FORMATS = {
        "stats": ("tsv", "json", "xml"),
        "specimen": ("tsv", "json", "xml"),
        "sequence": ("tsv", "json", "xml", "fasta"),
        "combined": ("tsv", "json", "xml"),
        "trace": ("zip",),
    }

    def public_data(endpoint: str, fmt: str, params: dict) -> Response:
        supported = _ENDPOINT_FORMATS.get(endpoint)
        if supported is None:
            raise HTTPException(status_code=404, detail=f"unknown endpoint: {endpoint}")
        if endpoint == "trace":
            fmt = "zip"
        if fmt not in supported:
            raise HTTPException(
                status_code=400, detail=f"unsupported format for {endpoint}: {fmt}"
            )
        sample_ids = _public_query(params)
        truncated = len(sample_ids) >= RESULT_CAP
        marker = params.get("marker")

        if endpoint == "stats":
            rows, columns = _stats_rows(sample_ids, marker)
            body, ctype = render(fmt, columns, rows, meta={"count": rows[0]["records"]},
                                 xml_root="stats", xml_row="summary")
            return Response(content=body, media_type=ctype)

        if not sample_ids:
            raise HTTPException(status_code=404, detail="no matching records")

        if endpoint == "specimen":
            rows = [specimen_row(platform.store.get_specimen(s)) for s in sample_ids]
            body, ctype = render(fmt, [f[0] for f in SPECIMEN_FIELDS], rows,
                                 meta={"count": len(rows), "truncated": truncated})
            return Response(content=body, media_type=ctype)

        if endpoint in ("sequence", "combined"):
            rows = []
            for sample_id in sample_ids:
                spec = platform.store.get_specimen(sample_id)
                for seq in platform.store.iter_sequences(sample_id=sample_id, marker=marker):
                    uri = platform.store.bin_of(f"{seq['process_id']}:{seq['marker_code']}")
                    if endpoint == "sequence":
                        row = sequence_row(seq, uri)
                        row["species"] = (spec.get("taxonomy") or {}).get("species")
                        rows.append(row)
                    else:
                        rows.append(combined_row(spec, seq, uri))
            if not rows:
                raise HTTPException(status_code=404, detail="no matching sequences")
            columns = [f[0] for f in (SEQUENCE_FIELDS if endpoint == "sequence" else COMBINED_FIELDS)]
            body, ctype = render(fmt, columns, rows,
                                 meta={"count": len(rows), "truncated": truncated})
            return Response(content=body, media_type=ctype)

        if endpoint == "trace":
            buffer = io.BytesIO()
            count = 0
            with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
                for sample_id in sample_ids:
                    for seq in platform.store.iter_sequences(sample_id=sample_id, marker=marker):
                        for trace in seq.get("traces", []):
                            blob = platform.store.get_blob(trace.get("blob", ""))
                            if blob is not None:
                                info = zipfile.ZipInfo(
                                    f"{seq['process_id']}/{trace['filename']}",
                                    date_time=(2020, 1, 1, 0, 0, 0),
                                )
                                archive.writestr(info, blob)
                                count += 1
            if count == 0:
                raise HTTPException(status_code=404, detail="no trace files for the selection")
            return Response(content=buffer.getvalue(), media_type=CONTENT_TYPES["zip"])

        raise AssertionError(f"unhandled endpoint: {endpoint}")

    def _stats_rows(sample_ids: list, marker: str | None) -> tuple:
        species = set()
        bins = set()
        n_sequences = 0
        markers = set()
        for sample_id in sample_ids:
            spec = platform.store.get_specimen(sample_id)
            sp = (spec.get("taxonomy") or {}).get("species")
            if sp:
                species.add(sp)
            for seq in platform.store.iter_sequences(sample_id=sample_id, marker=marker):
                n_sequences += 1
                markers.add(seq["marker_code"])
                uri = platform.store.bin_of(f"{seq['process_id']}:{seq['marker_code']}")
                if uri:
                    bins.add(uri)
        row = {
            "records": len(sample_ids),
            "sequences": n_sequences,
            "species": len(species),
            "markers": len(markers),
            "bins": len(bins),
        }
        return [row], list(row)

    @app.get("/api/v4/public/{endpoint}")
    def api_public(endpoint: str, format: str = Query(default="json"),
                   taxon: str | None = None, ids: str | None = None,
                   bin: str | None = None, container: str | None = None,
                   institutions: str | None = None, researchers: str | None = None,
                   geo: str | None = None, marker: str | None = None):
        return public_data(endpoint, format,
                           _collect_params(taxon, ids, bin, container, institutions,
                                           researchers, geo, marker))

    @app.get("/index.php/API_Public/{endpoint}")
    def api_public_alias(endpoint: str, format: str = Query(default="tsv"),
                         taxon: str | None = None, ids: str | None = None,
                         bin: str | None = None, container: str | None = None,
                         institutions: str | None = None, researchers: str | None = None,
                         geo: str | None = None, marker: str | None = None):
        return public_data(endpoint, format,
                           _collect_params(taxon, ids, bin, container, institutions,
                                           researchers, geo, marker))

    # ------------------------------------------------------------------
    # taxonomy API
    # ------------------------------------------------------------------

    def taxon_data(tax_id: int, data_types: str) -> dict:
        node = platform.taxonomy.get_by_taxid(tax_id)
        if node is None:
            raise HTTPException(status_code=404, detail=f"unknown taxid: {tax_id}")
        requested = [t.strip() for t in data_types.split(",") if t.strip()]
        return views.taxon_payload(platform, node, requested)

    def taxon_search(name: str) -> dict:
        nodes = platform.taxonomy.search_name(name)
        return {
            "query": name,
            "matches": [
                {"taxid": n.taxid, "rank": n.rank, "name": n.name,
                 "parent_rank": n.parent_rank, "parent_name": n.parent_name}
                for n in nodes
            ],
        }

    @app.get("/api/v4/taxonomy/data")
    def api_taxon_data(taxId: int, dataTypes: str = "basic"):
        return Response(content=dumps(taxon_data(taxId, dataTypes)),
                        media_type="application/json")

    @app.get("/index.php/API_Tax/TaxonData")
    def api_taxon_data_alias(taxId: int, dataTypes: str = "basic"):
        return Response(content=dumps(taxon_data(taxId, dataTypes)),
                        media_type="application/json")

    @app.get("/api/v4/taxonomy/search")
    def api_taxon_search(taxName: str):
        return Response(content=dumps(taxon_search(taxName)), media_type="application/json")

    @app.get("/index.php/API_Tax/TaxonSearch")
    def api_taxon_search_alias(taxName: str):
        return Response(content=dumps(taxon_search(taxName)), media_type="application/json")

    # ------------------------------------------------------------------
    # identification API
    # ------------------------------------------------------------------

    def _parse_db_name(db: str) -> tuple:
        parts = db.upper().split("_")
        marker_token = parts[0]
        marker = _MARKER_ALIASES.get(marker_token)
        if marker is None:
            known = {m.upper(): m for m in platform.markers.names()}
            marker = known.get(marker_token)
        if marker is None:
            raise HTTPException(status_code=400, detail=f"unknown db: {db}")
        rest = "_".join(parts[1:])
        year = None
        if rest.isdigit() and len(rest) == 4:
            kind = "Historical"
            year = int(rest)
        else:
            kind = _DB_KINDS.get(rest)
            if kind is None:
                raise HTTPException(status_code=400, detail=f"unknown db: {db}")
        return marker, kind, year

    def _library(marker: str, kind: str, year: int | None = None, rebuild: bool = False):
        key = f"{marker}/{kind}" + (f":{year}" if year else "")
        if rebuild or key not in app.state.libraries:
            app.state.libraries[key] = build_library(platform, kind, marker, year)
        return app.state.libraries[key]

    def id_engine_xml(db: str, sequence: str) -> Response:
        marker, kind, year = _parse_db_name(db)
        library = _library(marker, kind, year)
        result = identify(platform, sequence, library)
        rows = []
        for match in result["matches"]:
            taxonomy = match["taxonomy"]
            rows.append({
                "process_id": match["process_id"],
                "identification": taxonomy.get("species") or taxonomy.get("genus")
                or taxonomy.get("family"),
                "phylum": taxonomy.get("phylum"),
                "family": taxonomy.get("family"),
                "species": taxonomy.get("species"),
                "similarity": round(match["identity"], 4),
                "overlap_bp": match["overlap_bp"],
                "bin_uri": match["bin_uri"],
                "visibility": match["visibility"],
            })
        columns = ["process_id", "identification", "phylum", "family", "species",
                   "similarity", "overlap_bp", "bin_uri", "visibility"]
        meta = {
            "db": db,
            "count": len(rows),
            "assigned_rank": result["assignment"]["rank"],
            "assigned_taxon": result["assignment"]["taxon"],
        }
        body = render_xml(columns, rows, root="matches", row_element="match", meta=meta)
        return Response(content=body, media_type=CONTENT_TYPES["xml"])

    @app.get("/api/v4/id")
    def api_id(db: str, sequence: str):
        return id_engine_xml(db, sequence)

    @app.get("/index.php/lds_xml")
    def api_id_alias(db: str, sequence: str):
        return id_engine_xml(db, sequence)

    # ------------------------------------------------------------------
    # public BIN pages
    # ------------------------------------------------------------------

    @app.get("/api/v4/public/bins/{bin_uri}")
    def api_bin_page(bin_uri: str):
        return Response(content=dumps(views.bin_page(platform, bin_uri)),
                        media_type="application/json")

    # ------------------------------------------------------------------
    # workbench
    # ------------------------------------------------------------------

    wb = "/api/v4/wb"

    @app.get(f"{wb}/me")
    def wb_me(user: str = Depends(current_user)):
        return {"username": user}

    @app.post(f"{wb}/users", status_code=201)
    def wb_create_user(payload: UserCreate, user: str = Depends(current_user)):
        if user != "admin":
            raise errors.PermissionDenied("Admin", "only admin may create users")
        token = platform.ensure_user(payload.username)
        return {"username": payload.username, "token": token}

    @app.post(f"{wb}/containers", status_code=201)
    def wb_create_container(payload: ContainerCreate, user: str = Depends(current_user)):
        return reg_containers.create_container(
            platform.store, payload.kind, payload.code, user,
            payload.title, payload.description, payload.parent,
        )

    @app.get(f"{wb}/containers/{{code}}")
    def wb_get_container(code: str, user: str = Depends(current_user)):
        doc = platform.store.get_container(code)
        if doc is None:
            raise errors.UnknownContainer(code)
        if doc["kind"] != "Campaign" and not doc.get("published"):
            allowed, _ = reg_containers.check_access(platform.store, user, code, "Analyze")
            if not allowed and user != doc.get("manager"):
                raise errors.PermissionDenied("Analyze", f"no access to {code}")
        return doc

    @app.post(f"{wb}/containers/{{code}}/acl")
    def wb_set_acl(code: str, payload: AclUpdate, user: str = Depends(current_user)):
        return reg_containers.set_acl(platform.store, code, payload.user,
                                      payload.permissions, user)

    @app.get(f"{wb}/containers/{{code}}/access")
    def wb_check_access(code: str, permission: str, user: str = Depends(current_user)):
        allowed, reason = reg_containers.check_access(platform.store, user, code, permission)
        return {"allowed": allowed, "reason": reason}

    @app.get(f"{wb}/projects/{{code}}/summary")
    def wb_project_summary(code: str, user: str = Depends(current_user)):
        require(user, code, "Analyze")
        return views.project_summary(platform, code)

    @app.get(f"{wb}/projects/{{code}}/records")
    def wb_record_console(code: str, user: str = Depends(current_user)):
        require(user, code, "ViewDownload")
        return views.record_console(platform, code)

    @app.post(f"{wb}/records", status_code=201)
    def wb_create_record(payload: dict, user: str = Depends(current_user)):
        """Single-record online form: one submission row, same checks as batch."""
        project = payload.get("project")
        if not project:
            raise HTTPException(status_code=400, detail="project is required")
        require(user, project, "EditSpecimens")
        result = persist_specimen_batch(platform, project, [payload.get("row", {})], user)
        status = 201 if not result["blocked"] else 422
        return JSONResponse(status_code=status, content={
            "blocked": result["blocked"],
            "created": result["created"],
            "issues": [[i.to_doc() for i in row] for row in result["issues"]],
        })

    @app.get(f"{wb}/records/{{record_id}}")
    def wb_specimen_page(record_id: str, user: str = Depends(current_user)):
        payload = views.specimen_page(platform, record_id)
        can_view_record(user, payload["record"])
        return payload

    @app.patch(f"{wb}/records/{{record_id}}")
    def wb_update_record(record_id: str, payload: RecordUpdate,
                         user: str = Depends(current_user)):
        sample_id = platform.store.resolve_record_id(record_id)
        if sample_id is None:
            raise errors.UnknownRecord(record_id)
        return lifecycle.update_specimen(platform, sample_id, payload.updates, user,
                                         expected_version=payload.expected_version)

    @app.post(f"{wb}/records/{{record_id}}/annotations", status_code=201)
    def wb_annotate(record_id: str, payload: AnnotationCreate,
                    user: str = Depends(current_user)):
        target = {"kind": payload.target_kind, "id": record_id, "detail": payload.target_detail}
        if payload.target_kind in ("sequence", "trace"):
            target["id"] = record_id
        annotation = {"type": payload.type, "label": payload.label, "text": payload.text}
        return lifecycle.annotate(platform, target, annotation, user)

    @app.get(f"{wb}/records/{{record_id}}/history")
    def wb_history(record_id: str, window: str | None = None,
                   user: str = Depends(current_user)):
        sample_id = platform.store.resolve_record_id(record_id)
        if sample_id is None:
            raise errors.UnknownRecord(record_id)
        can_view_record(user, platform.store.get_specimen(sample_id))
        events = lifecycle.record_history(platform, record_id, window)
        return {"events": [e.to_doc() for e in events]}

    @app.get(f"{wb}/records/{{record_id}}/delta")
    def wb_delta(record_id: str, from_week: str, to_week: str,
                 user: str = Depends(current_user)):
        sample_id = platform.store.resolve_record_id(record_id)
        if sample_id is None:
            raise errors.UnknownRecord(record_id)
        can_view_record(user, platform.store.get_specimen(sample_id))
        return {"fields": lifecycle.delta_view(platform, record_id, from_week, to_week)}

    @app.get(f"{wb}/sequences/{{seq_key}}")
    def wb_sequence_page(seq_key: str, user: str = Depends(current_user)):
        payload = views.sequence_page(platform, seq_key)
        spec = platform.store.get_specimen(payload["specimen"]["sample_id"])
        can_view_record(user, spec)
        return payload

    # --- submissions ---------------------------------------------------

    @app.post(f"{wb}/validate/specimens")
    async def wb_validate_specimens(request: Request, user: str = Depends(current_user)):
        text = (await request.body()).decode("utf-8")
        rows = parse_submission_table(text)
        result = validate_specimen_batch(platform, rows)
        return {
            "blocked": result["blocked"],
            "issues": [[i.to_doc() for i in row] for row in result["issues"]],
        }

    @app.post(f"{wb}/submissions/specimens")
    async def wb_submit_specimens(request: Request, project: str,
                                  user: str = Depends(current_user)):
        require(user, project, "EditSpecimens")
        text = (await request.body()).decode("utf-8")
        rows = parse_submission_table(text)
        result = persist_specimen_batch(platform, project, rows, user)
        status = 201 if not result["blocked"] else 422
        return JSONResponse(status_code=status, content={
            "blocked": result["blocked"],
            "created": result["created"],
            "issues": [[i.to_doc() for i in row] for row in result["issues"]],
        })

    @app.post(f"{wb}/submissions/sequences")
    async def wb_submit_sequences(request: Request, marker: str, run_site: str,
                                  fwd_primer: str | None = None,
                                  rev_primer: str | None = None,
                                  user: str = Depends(current_user)):
        body = await request.body()
        package = validate_upload_package(
            platform, "sequence",
            [{"Marker": marker, "Run Site": run_site}],
            {"upload.fasta": body},
        )
        created = []
        failures = []
        for entry in package["entries"]:
            try:
                doc = lifecycle.add_sequence(platform, entry.id, marker, entry.sequence,
                                             run_site, user,
                                             forward_primer=fwd_primer,
                                             reverse_primer=rev_primer)
                created.append(f"{doc['process_id']}:{doc['marker_code']}")
            except errors.PermissionDenied:
                raise
            except errors.BarcodeLabError as exc:
                failures.append({"id": entry.id, "error": str(exc)})
        return {"created": created, "failures": failures}

    @app.post(f"{wb}/submissions/images")
    async def wb_submit_images(request: Request, user: str = Depends(current_user)):
        manifest, files = _unpack_zip(await request.body(), manifest_suffixes=(".tsv", ".csv"))
        package = validate_upload_package(platform, "image", manifest, files)
        attached = []
        for row in package["rows"]:
            record_ref = row.get("sample id") or row.get("process id")
            sample_id = platform.store.resolve_record_id(record_ref or "")
            if sample_id is None:
                raise errors.UnknownRecord(record_ref or "<missing id>")
            blob = platform.store.put_blob(files[row["image name"]])
            image = {
                "name": row["image name"],
                "orientation": row.get("orientation"),
                "original_specimen": row.get("original specimen"),
                "caption": row.get("caption"),
                "license": row.get("license"),
                "license_holder": row.get("license holder"),
                "license_year": row.get("license year"),
                "license_institution": row.get("license institution"),
                "photographer": row.get("photographer"),
                "blob": blob,
            }
            lifecycle.add_images(platform, sample_id, [image], user)
            attached.append({"sample_id": sample_id, "image": row["image name"]})
        return {"attached": attached}

    @app.post(f"{wb}/submissions/traces")
    async def wb_submit_traces(request: Request, marker: str = "COI-5P",
                               user: str = Depends(current_user)):
        manifest, files = _unpack_zip(await request.body(), manifest_suffixes=(".tsv", ".csv"))
        package = validate_upload_package(platform, "trace", manifest, files)
        attached = []
        for row in package["rows"]:
            process_id = row["process id"]
            row_marker = row.get("marker") or marker
            seq_key = f"{process_id}:{row_marker}"
            if platform.store.get_sequence(seq_key) is None:
                raise errors.UnknownRecord(seq_key)
            score_name = row.get("score file")
            quality = None
            mean_phred = None
            if score_name:
                result = classify_trace(files[score_name].decode("utf-8"))
                quality = result.quality_class
                mean_phred = result.mean_phred
            blob = platform.store.put_blob(files[row["trace file"]])
            trace = {
                "filename": row["trace file"],
                "score_file": score_name,
                "forward_primer": row["pcr primer fwd"],
                "reverse_primer": row["pcr primer rev"],
                "direction": row.get("sequencing primer direction"),
                "sequencing_primer": row.get("sequencing primer"),
                "quality_class": quality,
                "mean_phred": mean_phred,
                "blob": blob,
            }
            lifecycle.add_traces(platform, seq_key, [trace], user)
            seq_doc = platform.store.get_sequence(seq_key)
            primer_updates = {}
            if not seq_doc.get("forward_primer"):
                primer_updates["forward_primer"] = row["pcr primer fwd"]
            if not seq_doc.get("reverse_primer"):
                primer_updates["reverse_primer"] = row["pcr primer rev"]
            if primer_updates:
                lifecycle.modify_sequence(platform, seq_key, primer_updates, user)
            attached.append({"seq_key": seq_key, "trace": row["trace file"]})
        return {"attached": attached}

    # --- datasets / publication -----------------------------------------

    @app.post(f"{wb}/datasets/{{code}}/records")
    def wb_dataset_add(code: str, payload: DatasetRecords, user: str = Depends(current_user)):
        return reg_containers.add_to_dataset(platform, code, payload.record_refs, user)

    @app.post(f"{wb}/datasets/{{code}}/publish")
    def wb_dataset_publish(code: str, user: str = Depends(current_user)):
        return reg_containers.publish_dataset(platform, code, user)

    @app.post(f"{wb}/datasets/{{code}}/citation")
    def wb_dataset_citation(code: str, payload: CitationAttach,
                            user: str = Depends(current_user)):
        return reg_containers.attach_citation(platform, code, payload.citation, user)

    # --- bins / libraries / identification ---------------------------------

    @app.post(f"{wb}/bins/update")
    def wb_bins_update(payload: BinUpdateRequest, user: str = Depends(current_user)):
        from barcodelab.binning.registry import run_bin_update
        from barcodelab.binning.resl import ReslParams

        params = ReslParams(seed_threshold=payload.seed_threshold,
                            prune_distance=payload.prune_distance,
                            inflation=payload.inflation)
        return run_bin_update(platform, params, marker=payload.marker)

    @app.post(f"{wb}/libraries/build")
    def wb_library_build(payload: LibraryBuild, user: str = Depends(current_user)):
        if payload.kind not in LIBRARY_KINDS:
            raise errors.UnknownKind(payload.kind)
        library = _library(payload.marker, payload.kind, payload.year, rebuild=True)
        return {"name": library.name, "kind": library.kind, "marker": library.marker,
                "entries": len(library.entries), "built_at": library.built_at}

    @app.get(f"{wb}/libraries")
    def wb_libraries(user: str = Depends(current_user)):
        return {
            "libraries": [
                {"name": lib.name, "kind": lib.kind, "marker": lib.marker,
                 "entries": len(lib.entries), "built_at": lib.built_at}
                for lib in app.state.libraries.values()
            ]
        }

    @app.post(f"{wb}/identify")
    def wb_identify(payload: IdentifyRequest, format: str = "json",
                    user: str = Depends(current_user)):
        if payload.db:
            marker, kind, year = _parse_db_name(payload.db)
        else:
            marker, kind, year = payload.marker, payload.kind or "All", payload.year
        library = _library(marker, kind, year)
        entries = parse_fasta(payload.fasta)
        thresholds = IdThresholds(payload.species_threshold, payload.genus_threshold,
                                  payload.family_threshold)
        current_taxonomy = {}
        for entry in entries:
            sample_id = platform.store.resolve_record_id(entry.id)
            if sample_id:
                spec = platform.store.get_specimen(sample_id)
                taxonomy = dict((spec.get("taxonomy") or {}))
                taxonomy["_sample_id"] = sample_id
                current_taxonomy[entry.id] = taxonomy
        result = batch_identify(platform, [(e.id, e.sequence) for e in entries], library,
                                thresholds, current_taxonomy)
        if format == "tsv":
            from barcodelab.service.formats import render_tsv

            return Response(content=render_tsv(result["columns"], result["rows"]),
                            media_type=CONTENT_TYPES["tsv"])
        return result

    # --- analyses ---------------------------------------------------------------

    @app.post(f"{wb}/analyses", status_code=201)
    def wb_launch_analysis(payload: AnalysisLaunch, user: str = Depends(current_user)):
        if payload.tool not in ANALYSIS_TOOLS:
            raise HTTPException(status_code=400, detail=f"unknown tool: {payload.tool}")
        selection = payload.selection
        if "project" in selection:
            require(user, selection["project"], "Analyze")
        if "dataset" in selection:
            require(user, selection["dataset"], "Analyze")
        size = len(selection.get("sample_ids", []))
        job = app.state.jobs.launch(
            payload.tool,
            lambda: run_analysis(platform, payload.tool, selection, payload.params),
            size_hint=size,
            params={"tool": payload.tool, "selection": selection, **payload.params},
        )
        return job

    @app.get(f"{wb}/analyses/{{job_id}}")
    def wb_get_analysis(job_id: str, format: str = "json",
                        user: str = Depends(current_user)):
        job = app.state.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job: {job_id}")
        if format == "tsv":
            rows = (job.get("result") or {}).get("rows")
            if not isinstance(rows, list) or not rows:
                raise HTTPException(status_code=400,
                                    detail="job result has no tabular rows")
            from barcodelab.service.formats import render_tsv

            columns = list(rows[0])
            return Response(content=render_tsv(columns, rows),
                            media_type=CONTENT_TYPES["tsv"])
        return job

    # --- packages / exports --------------------------------------------------------

    @app.post(f"{wb}/packages", status_code=201)
    def wb_build_package(payload: PackageBuild, user: str = Depends(current_user)):
        from barcodelab.service.selection import resolve_sample_ids

        sample_ids = resolve_sample_ids(platform, payload.selection)
        result = build_data_package(platform, sample_ids, payload.cadence_tag,
                                    include_private=payload.include_private)
        blob = platform.store.put_blob(result["archive"])
        platform.store.kv_set(f"package:{result['name']}", {
            "blob": blob, "descriptor": result["descriptor"],
        })
        return {"name": result["name"], "counts": result["counts"],
                "descriptor": result["descriptor"]}

    @app.get(f"{wb}/packages/{{name}}/archive")
    def wb_package_archive(name: str, user: str = Depends(current_user)):
        meta = platform.store.kv_get(f"package:{name}")
        if meta is None:
            raise HTTPException(status_code=404, detail=f"unknown package: {name}")
        data = platform.store.get_blob(meta["blob"])
        return Response(content=data, media_type=CONTENT_TYPES["zip"])

    @app.post(f"{wb}/export/genbank")
    def wb_export_genbank(dataset: str, user: str = Depends(current_user)):
        doc = platform.store.get_container(dataset)
        if doc is None or doc["kind"] != "Dataset":
            raise errors.UnknownDataset(dataset)
        if user != doc["manager"]:
            require(user, dataset, "ViewDownload")
        result = export_genbank_package(platform, dataset)
        return Response(content=result["archive"], media_type=CONTENT_TYPES["zip"])

    @app.post(f"{wb}/export/accessions")
    def wb_import_accessions(payload: AccessionImport, user: str = Depends(current_user)):
        return import_accessions(platform, payload.rows, user)

    # --- search / taxa -------------------------------------------------------------

    @app.get(f"{wb}/search")
    def wb_search(q: str, scope: str = "public", user: str = Depends(current_user)):
        if scope.startswith("project:"):
            require(user, scope.split(":", 1)[1], "ViewDownload")
        return search(platform, q, scope=scope)

    @app.post(f"{wb}/taxa", status_code=201)
    def wb_add_taxon(payload: TaxonCreate, user: str = Depends(current_user)):
        return platform.add_taxon(payload.rank, payload.name, payload.parent_rank,
                                  payload.parent_name)

    # ------------------------------------------------------------------

    @app.get("/api/v4/health")
    def health():
        return {"status": "ok", "records": platform.store.count_specimens()}

    if console_dir and Path(console_dir).exists():
        app.mount("/console", StaticFiles(directory=str(console_dir), html=True),
                  name="console")

    return app


def _unpack_zip(body: bytes, manifest_suffixes: tuple) -> tuple:
    try:
        archive = zipfile.ZipFile(io.BytesIO(body))
    except zipfile.BadZipFile as exc:
        raise HTTPException(status_code=400, detail="body is not a zip archive") from exc
    files: dict[str, bytes] = {}
    manifest_rows: list = []
    for info in archive.infolist():
        if info.is_dir():
            continue
        name = Path(info.filename).name
        data = archive.read(info)
        if name.lower().endswith(manifest_suffixes):
            manifest_rows.extend(parse_submission_table(data.decode("utf-8")))
        else:
            files[name] = data
    return manifest_rows, files
