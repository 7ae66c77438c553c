"""Operator CLI: a thin HTTP client for the service, plus `serve`.

Every data command talks to a running server (BARCODELAB_URL,
BARCODELAB_TOKEN); `serve` starts one.  Exit codes: 0 success, 2 validation
failure, 3 permission failure.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

DEFAULT_URL = "http://127.0.0.1:8345"

_PERMISSION_STATUSES = {401, 403}
_VALIDATION_STATUSES = {400, 409, 413, 422}


class Client:
    def __init__(self, base_url: str, token: str | None):
        self.base_url = base_url.rstrip("/")
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self.http = httpx.Client(base_url=self.base_url, headers=headers, timeout=120.0)

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        response = self.http.request(method, path, **kwargs)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail") or response.json().get("error")
            except Exception:
                detail = response.text[:500]
            click.echo(f"error {response.status_code}: {detail}", err=True)
            if response.status_code in _PERMISSION_STATUSES:
                sys.exit(3)
            if response.status_code in _VALIDATION_STATUSES:
                sys.exit(2)
            sys.exit(1)
        return response


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@click.group()
@click.option("--base-url", envvar="BARCODELAB_URL", default=DEFAULT_URL, show_default=True)
@click.option("--token", envvar="BARCODELAB_TOKEN", default=None)
@click.pass_context
def main(ctx, base_url, token):
    """Desk-scale DNA barcode platform client."""
    ctx.obj = {"base_url": base_url, "token": token}


def _client(ctx) -> Client:
    return Client(ctx.obj["base_url"], ctx.obj["token"])


@main.command()
@click.option("--data-dir", envvar="BARCODELAB_DATA_DIR", default="./barcodelab-data",
              show_default=True)
@click.option("--host", envvar="BARCODELAB_BIND", default="127.0.0.1", show_default=True)
@click.option("--port", default=8345, show_default=True)
@click.option("--console-dir", envvar="BARCODELAB_CONSOLE_DIR", default=None)
def serve(data_dir, host, port, console_dir):
    """Run the HTTP service."""
    import uvicorn

    from barcodelab.platform import Platform
    from barcodelab.service.app import create_app

    Path(data_dir).mkdir(parents=True, exist_ok=True)
    platform = Platform.open(data_dir)
    token = platform.bootstrap_admin()
    click.echo(f"admin token: {token}")
    app = create_app(platform, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.group()
def submit():
    """Submit specimens, sequences, images, or traces."""


@submit.command("specimens")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--project", required=True)
@click.pass_context
def submit_specimens(ctx, file, project):
    client = _client(ctx)
    response = client.request(
        "POST", f"/api/v4/wb/submissions/specimens?project={project}",
        content=file.read_bytes(), headers={"Content-Type": "text/tab-separated-values"},
    )
    payload = response.json()
    _echo_json(payload)
    if payload.get("blocked"):
        sys.exit(2)


@submit.command("sequences")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--marker", required=True)
@click.option("--run-site", required=True)
@click.option("--fwd-primer", default=None)
@click.option("--rev-primer", default=None)
@click.pass_context
def submit_sequences(ctx, file, marker, run_site, fwd_primer, rev_primer):
    client = _client(ctx)
    params = {"marker": marker, "run_site": run_site}
    if fwd_primer:
        params["fwd_primer"] = fwd_primer
    if rev_primer:
        params["rev_primer"] = rev_primer
    response = client.request(
        "POST", "/api/v4/wb/submissions/sequences",
        params=params,
        content=file.read_bytes(), headers={"Content-Type": "text/x-fasta"},
    )
    _echo_json(response.json())


@submit.command("images")
@click.argument("package", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def submit_images(ctx, package):
    client = _client(ctx)
    response = client.request(
        "POST", "/api/v4/wb/submissions/images",
        content=package.read_bytes(), headers={"Content-Type": "application/zip"},
    )
    _echo_json(response.json())


@submit.command("traces")
@click.argument("package", type=click.Path(exists=True, path_type=Path))
@click.option("--marker", default="COI-5P", show_default=True)
@click.pass_context
def submit_traces(ctx, package, marker):
    client = _client(ctx)
    response = client.request(
        "POST", f"/api/v4/wb/submissions/traces?marker={marker}",
        content=package.read_bytes(), headers={"Content-Type": "application/zip"},
    )
    _echo_json(response.json())


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def validate(ctx, file):
    """Dry-run specimen validation; exit 2 when the batch would be blocked."""
    client = _client(ctx)
    response = client.request("POST", "/api/v4/wb/validate/specimens",
                              content=file.read_bytes())
    payload = response.json()
    _echo_json(payload)
    if payload.get("blocked"):
        sys.exit(2)


@main.group()
def bins():
    """BIN registry operations."""


@bins.command("update")
@click.option("--marker", default="COI-5P", show_default=True)
@click.option("--seed-threshold", default=0.022, show_default=True)
@click.option("--prune-distance", default=0.044, show_default=True)
@click.option("--inflation", default=2.0, show_default=True)
@click.pass_context
def bins_update(ctx, marker, seed_threshold, prune_distance, inflation):
    client = _client(ctx)
    response = client.request("POST", "/api/v4/wb/bins/update", json={
        "marker": marker, "seed_threshold": seed_threshold,
        "prune_distance": prune_distance, "inflation": inflation,
    })
    _echo_json(response.json())


@main.group()
def library():
    """Reference library operations."""


@library.command("build")
@click.option("--kind", required=True,
              type=click.Choice(["SpeciesLevel", "Public", "SpeciesLevelFullLength",
                                 "All", "Historical"]))
@click.option("--marker", default="COI-5P", show_default=True)
@click.option("--year", type=int, default=None)
@click.pass_context
def library_build(ctx, kind, marker, year):
    client = _client(ctx)
    response = client.request("POST", "/api/v4/wb/libraries/build",
                              json={"kind": kind, "marker": marker, "year": year})
    _echo_json(response.json())


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--db", default=None, help="library name, e.g. COX1_SPECIES_PUBLIC")
@click.option("--kind", default=None)
@click.option("--marker", default="COI-5P", show_default=True)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "tsv"]))
@click.pass_context
def identify(ctx, file, db, kind, marker, fmt):
    """Run batch identification on a FASTA file."""
    client = _client(ctx)
    response = client.request("POST", f"/api/v4/wb/identify?format={fmt}", json={
        "db": db, "kind": kind, "marker": marker, "fasta": file.read_text(),
    })
    if fmt == "tsv":
        click.echo(response.text, nl=False)
    else:
        _echo_json(response.json())


def _selection_from(project, dataset, query, ids) -> dict:
    if project:
        return {"project": project}
    if dataset:
        return {"dataset": dataset}
    if query:
        return {"query": query}
    if ids:
        return {"sample_ids": list(ids)}
    raise click.UsageError("give one of --project / --dataset / --query / --id")


@main.command()
@click.argument("tool")
@click.option("--project", default=None)
@click.option("--dataset", default=None)
@click.option("--query", default=None)
@click.option("--id", "ids", multiple=True)
@click.option("--param", "params", multiple=True, help="k=v analysis parameters")
@click.pass_context
def analyze(ctx, tool, project, dataset, query, ids, params):
    """Launch an analysis and print its result (waits for completion)."""
    client = _client(ctx)
    parsed = {}
    for item in params:
        key, _, value = item.partition("=")
        parsed[key] = value
    selection = _selection_from(project, dataset, query, ids)
    response = client.request("POST", "/api/v4/wb/analyses", json={
        "tool": tool, "selection": selection, "params": parsed,
    })
    job = response.json()
    while job["status"] in ("queued", "running"):
        import time

        time.sleep(0.5)
        job = client.request("GET", f"/api/v4/wb/analyses/{job['job_id']}").json()
    _echo_json(job)
    if job["status"] == "error":
        sys.exit(2)


@main.group()
def package():
    """Data package operations."""


@package.command("build")
@click.option("--tag", required=True, help="cadence tag, e.g. 2026-Q3")
@click.option("--project", default=None)
@click.option("--dataset", default=None)
@click.option("--query", default=None)
@click.option("--id", "ids", multiple=True)
@click.option("--include-private", is_flag=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
def package_build(ctx, tag, project, dataset, query, ids, include_private, out):
    client = _client(ctx)
    selection = _selection_from(project, dataset, query, ids)
    response = client.request("POST", "/api/v4/wb/packages", json={
        "selection": selection, "cadence_tag": tag, "include_private": include_private,
    })
    payload = response.json()
    _echo_json({"name": payload["name"], "counts": payload["counts"]})
    if out:
        archive = client.request("GET", f"/api/v4/wb/packages/{payload['name']}/archive")
        out.write_bytes(archive.content)
        click.echo(f"wrote {out}")


@main.command()
@click.argument("query")
@click.option("--scope", default="public", show_default=True)
@click.pass_context
def search(ctx, query, scope):
    """Search records with the portal query language."""
    client = _client(ctx)
    response = client.request("GET", "/api/v4/wb/search",
                              params={"q": query, "scope": scope})
    _echo_json(response.json())


if __name__ == "__main__":
    main()
