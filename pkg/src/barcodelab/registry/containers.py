"""Projects, Folders, Campaigns, Datasets and their access control lists.

Permission model: five independently grantable options, except AddToDataset
which carries Analyze and ViewDownload with it.  The container manager holds
everything.  Folder ACLs grant over contained projects independently of the
projects' own ACLs.  Campaigns carry no ACL at all.
"""

from __future__ import annotations

import re

from barcodelab import errors
from barcodelab.model.audit import now_iso

PERMISSIONS = ("Analyze", "ViewDownload", "EditSequences", "EditSpecimens", "AddToDataset")

CONTAINER_KINDS = ("Project", "Folder", "Campaign", "Dataset")

PROJECT_CODE_RE = re.compile(r"^[A-Z]{3,5}$")
DATASET_CODE_RE = re.compile(r"^DS-[A-Z0-9][A-Z0-9-]*$")

# legal parent kind -> child kinds it may contain
_NESTING = {
    "Folder": {"Project"},
    "Campaign": {"Project", "Folder"},
}


def implied_permissions(granted) -> set:
    perms = set(granted)
    if "AddToDataset" in perms:
        perms.update({"Analyze", "ViewDownload"})
    return perms


def create_container(
    store,
    kind: str,
    code: str,
    manager: str,
    title: str = "",
    description: str = "",
    parent: str | None = None,
    ts: str | None = None,
) -> dict:
    if kind not in CONTAINER_KINDS:
        raise ValueError(f"unknown container kind: {kind}")
    if store.get_container(code) is not None:
        raise errors.DuplicateCode(code)
    if kind == "Project" and not PROJECT_CODE_RE.match(code):
        raise errors.BadCodeFormat(f"project codes are 3-5 uppercase letters: {code!r}")
    if kind == "Dataset" and not DATASET_CODE_RE.match(code):
        raise errors.BadCodeFormat(f"dataset codes start with 'DS-': {code!r}")
    parent_doc = None
    if parent is not None:
        parent_doc = store.get_container(parent)
        if parent_doc is None:
            raise errors.UnknownContainer(parent)
        allowed = _NESTING.get(parent_doc["kind"], set())
        if kind not in allowed:
            raise errors.IllegalNesting(f"{parent_doc['kind']} cannot contain {kind}")
    doc = {
        "kind": kind,
        "code": code,
        "title": title or code,
        "description": description,
        "manager": manager,
        "acl": {},  # user -> sorted granted permissions
        "children": [],
        "members": [],  # Dataset: record refs (sample_ids)
        "published": False,
        "doi": None,
        "citation": None,
        "created_at": ts or now_iso(),
    }
    if kind == "Campaign":
        doc.pop("acl")
    store.put_container(doc)
    if parent_doc is not None:
        if code not in parent_doc["children"]:
            parent_doc["children"].append(code)
            store.put_container(parent_doc)
    return doc


def set_acl(store, code: str, user: str, permissions: list, actor: str) -> dict:
    doc = store.get_container(code)
    if doc is None:
        raise errors.UnknownContainer(code)
    if doc["kind"] == "Campaign":
        raise errors.NoAclSupported("campaigns do not support access control")
    if actor != doc["manager"]:
        raise errors.PermissionDenied("ManageACL", f"only the manager of {code} may edit its ACL")
    bad = [p for p in permissions if p not in PERMISSIONS]
    if bad:
        raise ValueError(f"unknown permissions: {bad}")
    if permissions:
        doc["acl"][user] = sorted(set(permissions))
    else:
        doc["acl"].pop(user, None)
    store.put_container(doc)
    return doc


def _granted_on(doc: dict, user: str) -> set:
    if doc.get("manager") == user:
        return set(PERMISSIONS)
    return implied_permissions(doc.get("acl", {}).get(user, ())) if "acl" in doc else set()


def check_access(store, user: str, code: str, permission: str) -> tuple:
    """(allowed, reason). Folder grants extend over contained projects."""
    if permission not in PERMISSIONS:
        raise ValueError(f"unknown permission: {permission}")
    doc = store.get_container(code)
    if doc is None:
        raise errors.UnknownContainer(code)
    if doc["kind"] == "Campaign":
        raise errors.NoAclSupported("campaigns do not support access control")
    if permission in _granted_on(doc, user):
        return True, f"{permission} granted on {code}"
    if doc["kind"] == "Project":
        for folder in store.iter_containers(kind="Folder"):
            if code in folder.get("children", []) and permission in _granted_on(folder, user):
                return True, f"{permission} granted via folder {folder['code']}"
    return False, f"{permission} not granted on {code}"


def require_access(store, user: str, code: str, permission: str) -> None:
    allowed, reason = check_access(store, user, code, permission)
    if not allowed:
        raise errors.PermissionDenied(permission, reason)


def add_to_dataset(platform, dataset_code: str, record_refs: list, actor: str) -> dict:
    """Reference records into a dataset (no copies; duplicates ignored)."""
    doc = platform.store.get_container(dataset_code)
    if doc is None or doc["kind"] != "Dataset":
        raise errors.UnknownDataset(dataset_code)
    resolved = []
    for ref in record_refs:
        sample_id = platform.store.resolve_record_id(ref)
        if sample_id is None:
            raise errors.UnknownRecord(ref)
        spec = platform.store.get_specimen(sample_id)
        if spec.get("visibility") != "public":
            allowed, _ = check_access(platform.store, actor, spec["project"], "AddToDataset")
            if not allowed:
                raise errors.PermissionDenied(
                    "AddToDataset", f"record {sample_id} is private in project {spec['project']}"
                )
        resolved.append(sample_id)
    for sample_id in resolved:
        if sample_id not in doc["members"]:
            doc["members"].append(sample_id)
    platform.store.put_container(doc)
    return doc


def publish_dataset(platform, dataset_code: str, actor: str, ts: str | None = None) -> dict:
    """Make a dataset (and its member records) public; mint a DOI-shaped id."""
    ts = ts or now_iso()
    doc = platform.store.get_container(dataset_code)
    if doc is None or doc["kind"] != "Dataset":
        raise errors.UnknownDataset(dataset_code)
    if actor != doc["manager"]:
        raise errors.PermissionDenied("Publish", f"only the manager of {dataset_code} may publish")
    if doc.get("published"):
        raise errors.AlreadyPublished(dataset_code)

    warnings = []
    for sample_id in doc["members"]:
        for seq in platform.store.iter_sequences(sample_id=sample_id):
            for flag in seq.get("flags", []):
                warnings.append({"record": sample_id, "flag": flag})

    doc["published"] = True
    doc["doi"] = f"dx.doi.org/10.5883/{dataset_code}"
    doc["published_at"] = ts
    platform.store.put_container(doc)

    from barcodelab.model.lifecycle import _snapshot

    for sample_id in doc["members"]:
        spec = platform.store.get_specimen(sample_id)
        if spec.get("visibility") != "public":
            old = spec["visibility"]
            spec["visibility"] = "public"
            spec["updated_at"] = ts
            spec["version"] = spec.get("version", 1) + 1
            platform.store.put_specimen(spec)
            platform.store.append_event(
                ts, actor, "Modify-Specimen", sample_id,
                {"fields": [{"field": "visibility", "old": old, "new": "public"}]},
            )
            _snapshot(platform, sample_id, ts)
    doc["warnings"] = warnings
    return doc


def attach_citation(platform, dataset_code: str, citation: str, actor: str) -> dict:
    doc = platform.store.get_container(dataset_code)
    if doc is None or doc["kind"] != "Dataset":
        raise errors.UnknownDataset(dataset_code)
    if actor != doc["manager"]:
        raise errors.PermissionDenied("Publish", "only the manager may attach a citation")
    doc["citation"] = citation
    platform.store.put_container(doc)
    return doc
