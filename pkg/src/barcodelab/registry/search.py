"""Query language for the public portal and workbench search.

Grammar: whitespace-separated terms.  `word[tax]` and `word[geo]` qualify
a term; quoted phrases match storing institutions exactly; `DS-` codes and
bare 3-5 letter uppercase codes select datasets/projects; ProcessID- and
BIN-shaped tokens select identifiers.  Anything else is a bare keyword.

Terms with different qualifiers intersect (AND); repeated terms with the
same qualifier union (OR).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from barcodelab import errors
from barcodelab.model.records import PROCESS_ID_RE, PROJECT_CODE_RE, RANKS

BIN_URI_RE = re.compile(r"^BOLD:[A-Z]{3}[A-Z0-9]{4}$")
QUALIFIER_RE = re.compile(r"^(?P<term>.+)\[(?P<qual>[a-zA-Z]+)\]$")

KNOWN_QUALIFIERS = {"tax", "geo", "inst", "ids", "bin", "container", "marker", "researcher"}

RESULT_CAP = 100_000


@dataclass(frozen=True)
class QueryTerm:
    qualifier: str
    value: str


@dataclass
class QueryExpression:
    terms: list

    def groups(self) -> dict:
        grouped: dict[str, list] = {}
        for term in self.terms:
            grouped.setdefault(term.qualifier, []).append(term.value)
        return grouped


def parse_query(text: str) -> QueryExpression:
    if not text or not text.strip():
        raise errors.ParseError(0, "empty query")
    terms: list[QueryTerm] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "\"'":
            end = text.find(ch, pos + 1)
            if end < 0:
                raise errors.ParseError(pos, "unterminated quote")
            phrase = text[pos + 1 : end]
            if not phrase.strip():
                raise errors.ParseError(pos, "empty phrase")
            terms.append(QueryTerm("inst", phrase))
            pos = end + 1
            continue
        end = pos
        while end < n and not text[end].isspace():
            end += 1
        token = text[pos:end]
        terms.append(_classify(token, pos))
        pos = end
    if not terms:
        raise errors.ParseError(0, "empty query")
    return QueryExpression(terms)


def _classify(token: str, pos: int) -> QueryTerm:
    m = QUALIFIER_RE.match(token)
    if m:
        qual = m.group("qual").lower()
        if qual not in KNOWN_QUALIFIERS:
            raise errors.UnknownQualifier(m.group("qual"))
        return QueryTerm(qual, m.group("term"))
    if BIN_URI_RE.match(token):
        return QueryTerm("bin", token)
    if token.startswith("DS-"):
        return QueryTerm("container", token)
    if PROCESS_ID_RE.match(token):
        return QueryTerm("ids", token)
    if PROJECT_CODE_RE.match(token):
        return QueryTerm("container", token)
    return QueryTerm("bare", token)


# --- evaluation --------------------------------------------------------------


def _record_taxa(spec: dict) -> set:
    return {v.lower() for v in (spec.get("taxonomy") or {}).values() if isinstance(v, str) and v}


def _record_geo(spec: dict) -> set:
    coll = spec.get("collection") or {}
    values = set()
    for key in ("country", "country_code", "province", "region", "sector", "site"):
        v = coll.get(key)
        if v:
            values.add(str(v).lower())
    return values


def _matches_group(platform, spec: dict, sequences: list, qualifier: str, values: list) -> bool:
    """OR across the group's values."""
    low = [v.lower() for v in values]
    if qualifier == "tax":
        taxa = _record_taxa(spec)
        return any(v in taxa for v in low)
    if qualifier == "geo":
        geo = _record_geo(spec)
        return any(v in geo for v in low)
    if qualifier == "inst":
        return any(v == (spec.get("storing_institution") or "").lower() for v in low)
    if qualifier == "ids":
        ids = {spec["sample_id"]} | set(spec.get("process_ids", []))
        ids.update(s["process_id"] for s in sequences)
        return any(v in ids for v in values)
    if qualifier == "bin":
        uris = {platform.store.bin_of(f"{s['process_id']}:{s['marker_code']}") for s in sequences}
        return any(v in uris for v in values)
    if qualifier == "container":
        for v in values:
            if spec["project"] == v:
                return True
            container = platform.store.get_container(v)
            if container and spec["sample_id"] in container.get("members", []):
                return True
            if container and container["kind"] in ("Folder", "Campaign"):
                if spec["project"] in _projects_under(platform.store, container):
                    return True
        return False
    if qualifier == "marker":
        markers = {s["marker_code"].lower() for s in sequences}
        return any(v in markers for v in low)
    if qualifier == "researcher":
        people = {c.lower() for c in (spec.get("collection") or {}).get("collectors", [])}
        identifier = ((spec.get("taxonomy") or {}).get("identifier_name") or "").lower()
        if identifier:
            people.add(identifier)
        return any(v in people for v in low)
    if qualifier == "bare":
        haystack = _record_taxa(spec) | _record_geo(spec)
        haystack.add(spec["sample_id"].lower())
        haystack.update(p.lower() for p in spec.get("process_ids", []))
        haystack.add((spec.get("storing_institution") or "").lower())
        return any(v in haystack for v in low)
    raise errors.UnknownQualifier(qualifier)


def _projects_under(store, container: dict) -> set:
    projects = set()
    for child in container.get("children", []):
        child_doc = store.get_container(child)
        if child_doc is None:
            continue
        if child_doc["kind"] == "Project":
            projects.add(child)
        else:
            projects |= _projects_under(store, child_doc)
    return projects


def search(platform, expression: str | QueryExpression, scope: str = "public") -> dict:
    """Evaluate a query; returns {"records": [sample_ids], "truncated": bool}.

    scope: "public" (only public records), "all", "project:CODE", or
    "dataset:DS-CODE".
    """
    expr = parse_query(expression) if isinstance(expression, str) else expression
    groups = expr.groups()

    if scope == "public" or scope == "all":
        specimens = platform.store.iter_specimens()
    elif scope.startswith("project:"):
        specimens = platform.store.iter_specimens(project=scope.split(":", 1)[1])
    elif scope.startswith("dataset:"):
        code = scope.split(":", 1)[1]
        container = platform.store.get_container(code)
        if container is None or container["kind"] != "Dataset":
            raise errors.UnknownDataset(code)
        specimens = [platform.store.get_specimen(s) for s in sorted(container.get("members", []))]
    else:
        raise ValueError(f"unknown scope: {scope}")

    hits = []
    truncated = False
    for spec in specimens:
        if spec is None:
            continue
        if scope == "public" and spec.get("visibility") != "public":
            continue
        sequences = platform.store.iter_sequences(sample_id=spec["sample_id"])
        if all(
            _matches_group(platform, spec, sequences, qualifier, values)
            for qualifier, values in groups.items()
        ):
            hits.append(spec["sample_id"])
            if len(hits) >= RESULT_CAP:
                truncated = True
                break
    return {"records": hits, "truncated": truncated}
