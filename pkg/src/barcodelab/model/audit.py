"""Append-only audit events, field-level diffs, and state replay.

Events carry enough payload to rebuild record state from scratch:
creation events hold full documents, modification events hold field-level
before/after values keyed by dot paths.  Replaying the event stream over
an empty state must reproduce the live store byte-for-byte (canonical
JSON), which the acceptance suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

_REMOVED = {"__removed__": True}


@dataclass(frozen=True)
class AuditEvent:
    event_id: int
    timestamp: str  # ISO-8601 UTC
    actor: str
    action: str
    target: str  # sample_id of the home record
    payload: dict

    def to_doc(self) -> dict:
        return {
            "event_id": self.event_id,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "target": self.target,
            "payload": self.payload,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "AuditEvent":
        return cls(
            event_id=doc["event_id"],
            timestamp=doc["timestamp"],
            actor=doc["actor"],
            action=doc["action"],
            target=doc["target"],
            payload=doc.get("payload", {}),
        )


def now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def iso_week_key(ts: str) -> str:
    """ISO week key ('2026-W32') for a timestamp; weekly snapshots use this."""
    dt = datetime.fromisoformat(ts.replace("Z", "+00:00"))
    year, week, _ = dt.isocalendar()
    return f"{year}-W{week:02d}"


# --- flatten / diff -------------------------------------------------------
# Dicts are recursed into; lists and scalars are leaves.  This keeps the
# diff at field granularity while staying exactly invertible.

def flatten_doc(doc: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in doc.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_doc(value, prefix=f"{path}."))
        else:
            flat[path] = value
    return flat


def diff_docs(old: dict, new: dict) -> list:
    """Field-level diff as {field, old, new} triples, sorted by field."""
    flat_old = flatten_doc(old)
    flat_new = flatten_doc(new)
    triples = []
    for path in sorted(set(flat_old) | set(flat_new)):
        in_old = path in flat_old
        in_new = path in flat_new
        if in_old and in_new and flat_old[path] == flat_new[path]:
            continue
        triples.append({
            "field": path,
            "old": flat_old[path] if in_old else _REMOVED,
            "new": flat_new[path] if in_new else _REMOVED,
        })
    return triples


def set_path(doc: dict, path: str, value) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def delete_path(doc: dict, path: str) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.get(part)
        if not isinstance(node, dict):
            return
    node.pop(parts[-1], None)


def apply_diff(doc: dict, triples: list) -> dict:
    """Apply {field, old, new} triples; returns the same (mutated) doc."""
    for triple in triples:
        if triple["new"] == _REMOVED:
            delete_path(doc, triple["field"])
        else:
            set_path(doc, triple["field"], triple["new"])
    return doc


# --- replay ----------------------------------------------------------------

def blank_state() -> dict:
    return {"specimens": {}, "sequences": {}}


def apply_event(state: dict, event: AuditEvent) -> None:
    action = event.action
    payload = event.payload
    if action == "New-Specimen":
        state["specimens"][event.target] = payload["record"]
    elif action == "Modify-Specimen":
        doc = state["specimens"][event.target]
        apply_diff(doc, payload["fields"])
        doc["updated_at"] = event.timestamp
        doc["version"] = doc.get("version", 1) + 1
    elif action == "New-Sequence":
        state["sequences"][payload["seq_key"]] = payload["sequence"]
    elif action == "Modify-Sequence":
        doc = state["sequences"][payload["seq_key"]]
        apply_diff(doc, payload["fields"])
        doc["updated_at"] = event.timestamp
        doc["version"] = doc.get("version", 1) + 1
    elif action == "New-Image(s)":
        doc = state["specimens"][event.target]
        doc["images"] = doc.get("images", []) + payload["images"]
        doc["updated_at"] = event.timestamp
    elif action == "New-Trace(s)":
        doc = state["sequences"][payload["seq_key"]]
        doc["traces"] = doc.get("traces", []) + payload["traces"]
        doc["updated_at"] = event.timestamp
    elif action == "Add-Tag":
        _annotation_list(state, event, "tags").append(payload["tag"])
    elif action == "Add-Comment":
        _annotation_list(state, event, "comments").append(payload["comment"])
    else:
        raise ValueError(f"unknown audit action: {action}")


def _annotation_list(state: dict, event: AuditEvent, kind: str) -> list:
    seq_key = event.payload.get("seq_key")
    if seq_key:
        doc = state["sequences"][seq_key]
    else:
        doc = state["specimens"][event.target]
    return doc.setdefault(kind, [])


def replay_events(events: list) -> dict:
    """Rebuild {'specimens': ..., 'sequences': ...} from the event stream."""
    state = blank_state()
    for event in sorted(events, key=lambda e: e.event_id):
        apply_event(state, event)
    return state
