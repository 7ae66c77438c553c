#!/usr/bin/env python3
"""Fixture server for the console end-to-end test.

Seeds an in-memory platform (project, 10 records with sequences, a built
library) and serves the API on the given port. The e2e test reads the
token from FIXTURE_TOKEN.
"""

import sys
from pathlib import Path

import uvicorn

REPO = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO / "tests"))

from corpus import fresh_platform, seed_project  # noqa: E402

from barcodelab.service.app import create_app  # noqa: E402


def main() -> None:
    port = int(sys.argv[1])
    token = sys.argv[2]
    platform = fresh_platform()
    platform.ensure_user("alice", token)
    platform.ensure_user("bob", token + "-bob")
    seed_project(platform, n_records=10, visibility="public")
    from barcodelab.registry.containers import set_acl

    set_acl(platform.store, "MHAHG", "bob", ["EditSpecimens", "ViewDownload", "Analyze"],
            "alice")
    app = create_app(platform)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="error")


if __name__ == "__main__":
    main()
