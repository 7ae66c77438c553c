"""Canonical JSON serialization used for audit replay and determinism checks."""

from __future__ import annotations

import hashlib
import json


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def dump_bytes(obj) -> bytes:
    return dumps(obj).encode("ascii")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
