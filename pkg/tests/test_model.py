"""Record model tests: lifecycle, audit trail, deltas, replay."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import coi_family, seed_project, ts_at
from barcodelab import errors
from barcodelab.canonical import dump_bytes
from barcodelab.model.audit import apply_diff, diff_docs, iso_week_key, replay_events
from barcodelab.model.lifecycle import (
    add_images,
    add_sequence,
    annotate,
    create_specimen,
    delta_view,
    record_history,
    snapshot_as_of,
    update_specimen,
)
from barcodelab.model.records import ProcessID
from barcodelab.registry.containers import create_container, set_acl


def _project(platform, code="MHAHG", manager="alice"):
    platform.ensure_user(manager)
    create_container(platform.store, "Project", code, manager, ts="2026-01-02T08:00:00Z")


def _row(sample_id="06-SRNP-2459", **overrides):
    row = {
        "sample_id": sample_id,
        "field_id": sample_id,
        "storing_institution": "University of Pennsylvania",
        "taxonomy": {"phylum": "Arthropoda"},
        "collection": {"country": "Costa Rica"},
    }
    row.update(overrides)
    return row


# --- ProcessID ---------------------------------------------------------------

def test_process_id_render_parse():
    pid = ProcessID("MHAHG", 656, 6)
    assert pid.render() == "MHAHG656-06"
    assert ProcessID.parse("MHAHG656-06") == pid


@given(st.from_regex(r"[A-Z]{3,5}", fullmatch=True),
       st.integers(min_value=1, max_value=99999),
       st.integers(min_value=0, max_value=99))
@settings(max_examples=100, deadline=None)
def test_process_id_round_trip(code, serial, year):
    pid = ProcessID(code, serial, year)
    assert ProcessID.parse(pid.render()) == pid


def test_process_id_rejects_bad_strings():
    for bad in ("mhahg1-06", "MHAHG-06", "MHAHG1", "TOOLONGG1-06", "MHAHG0-06"):
        with pytest.raises(ValueError):
            ProcessID.parse(bad)


# --- create -------------------------------------------------------------------

def test_create_specimen_mints_project_prefix(platform):
    _project(platform)
    doc = create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    assert doc["process_ids"][0].startswith("MHAHG")
    parsed = ProcessID.parse(doc["process_ids"][0])
    assert parsed.project_code == "MHAHG"
    events = platform.store.events_for("06-SRNP-2459")
    assert [e.action for e in events] == ["New-Specimen"]


def test_create_duplicate_sample_id(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    with pytest.raises(errors.DuplicateSampleId):
        create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(6))


def test_create_missing_phylum(platform):
    _project(platform)
    with pytest.raises(errors.MissingRequiredField) as exc:
        create_specimen(platform, "MHAHG", _row(taxonomy={}), "alice", ts=ts_at(5))
    assert exc.value.field == "phylum"


def test_create_unknown_project(platform):
    with pytest.raises(errors.UnknownProject):
        create_specimen(platform, "ZZZZZ", _row(), "alice", ts=ts_at(5))


def test_create_fills_taxonomy_gaps(platform):
    _project(platform)
    doc = create_specimen(
        platform, "MHAHG",
        _row(taxonomy={"phylum": "Arthropoda", "species": "Astraptes tucuti"}),
        "alice", ts=ts_at(5),
    )
    assert doc["taxonomy"]["genus"] == "Astraptes"
    assert doc["taxonomy"]["family"] == "Hesperiidae"
    assert doc["taxonomy"]["kingdom"] == "Animalia"


def test_process_id_serials_monotonic(platform):
    _project(platform)
    docs = [
        create_specimen(platform, "MHAHG", _row(f"S-{i}"), "alice", ts=ts_at(5))
        for i in range(3)
    ]
    serials = [ProcessID.parse(d["process_ids"][0]).serial for d in docs]
    assert serials == [1, 2, 3]


# --- update --------------------------------------------------------------------

def test_update_bumps_version_and_audits(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    doc = update_specimen(platform, "06-SRNP-2459",
                          {"taxonomy.species": "Astraptes tucuti"}, "alice", ts=ts_at(6))
    assert doc["version"] == 2
    events = platform.store.events_for("06-SRNP-2459")
    assert [e.action for e in events] == ["New-Specimen", "Modify-Specimen"]


def test_update_denied_for_analyze_only(platform):
    _project(platform)
    platform.ensure_user("bob")
    set_acl(platform.store, "MHAHG", "bob", ["Analyze"], "alice")
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    with pytest.raises(errors.PermissionDenied) as exc:
        update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes tucuti"},
                        "bob", ts=ts_at(6))
    assert exc.value.permission == "EditSpecimens"


def test_two_updates_two_modify_events(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes tucuti"},
                    "alice", ts=ts_at(6))
    update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes janeira"},
                    "alice", ts=ts_at(7))
    events = platform.store.events_for("06-SRNP-2459")
    assert sum(1 for e in events if e.action == "Modify-Specimen") == 2


def test_update_unknown_record(platform):
    _project(platform)
    with pytest.raises(errors.UnknownRecord):
        update_specimen(platform, "nope", {"taxonomy.species": "x"}, "alice")


def test_update_rejects_unknown_taxon(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    with pytest.raises(errors.ValidationReject):
        update_specimen(platform, "06-SRNP-2459",
                        {"taxonomy.species": "Madeuppus fakeus"}, "alice", ts=ts_at(6))


def test_update_version_conflict(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes tucuti"},
                    "alice", ts=ts_at(6))
    with pytest.raises(errors.VersionConflict):
        update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes janeira"},
                        "alice", ts=ts_at(7), expected_version=1)


def test_update_protected_fields(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    for path in ("sample_id", "version", "process_ids", "created_at"):
        with pytest.raises(errors.ValidationReject):
            update_specimen(platform, "06-SRNP-2459", {path: "x"}, "alice", ts=ts_at(6))


# --- annotate ----------------------------------------------------------------------

def test_tag_leaves_fields_untouched(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    before = dump_bytes(platform.store.get_specimen("06-SRNP-2459")["taxonomy"])
    annotate(platform, {"kind": "record", "id": "06-SRNP-2459"},
             {"type": "tag", "label": "Suspicious Identification"}, "alice", ts=ts_at(6))
    after_doc = platform.store.get_specimen("06-SRNP-2459")
    assert dump_bytes(after_doc["taxonomy"]) == before
    assert after_doc["tags"][0]["label"] == "Suspicious Identification"


def test_empty_tag_rejected(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    with pytest.raises(errors.ValidationReject):
        annotate(platform, {"kind": "record", "id": "06-SRNP-2459"},
                 {"type": "tag", "label": "  "}, "alice")


def test_concurrent_tags_both_present(platform):
    """Both orders of two users' tags converge to the same final set."""
    for order in (("alice", "bob"), ("bob", "alice")):
        p = __import__("corpus").fresh_platform()
        p.ensure_user("alice")
        create_container(p.store, "Project", "MHAHG", "alice", ts=ts_at(1))
        p.ensure_user("bob")
        set_acl(p.store, "MHAHG", "bob", ["ViewDownload"], "alice")
        create_specimen(p, "MHAHG", _row(), "alice", ts=ts_at(5))
        for i, user in enumerate(order):
            annotate(p, {"kind": "record", "id": "06-SRNP-2459"},
                     {"type": "tag", "label": f"tag-by-{user}"}, user, ts=ts_at(6 + i))
        labels = {t["label"] for t in p.store.get_specimen("06-SRNP-2459")["tags"]}
        assert labels == {"tag-by-alice", "tag-by-bob"}


def test_annotate_unknown_target(platform):
    _project(platform)
    with pytest.raises(errors.UnknownTarget):
        annotate(platform, {"kind": "record", "id": "missing"},
                 {"type": "tag", "label": "x"}, "alice")


def test_comment_on_sequence(platform, family):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    seq = add_sequence(platform, "06-SRNP-2459", "COI-5P", family.backbone,
                       "Centre for Biodiversity Genomics", "alice", ts=ts_at(6))
    annotate(platform, {"kind": "sequence", "id": f"{seq['process_id']}:COI-5P"},
             {"type": "comment", "text": "verified against voucher"}, "alice", ts=ts_at(7))
    stored = platform.store.get_sequence(f"{seq['process_id']}:COI-5P")
    assert stored["comments"][0]["text"] == "verified against voucher"


# --- history / delta ------------------------------------------------------------------

def test_history_fresh_record(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    events = record_history(platform, "06-SRNP-2459")
    assert [e.action for e in events] == ["New-Specimen"]


def test_history_window_excludes(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts="2026-01-05T10:00:00Z")
    events = record_history(platform, "06-SRNP-2459", window="week",
                            now_ts="2026-06-01T00:00:00Z")
    assert events == []


def test_history_order_matches_insertion(platform, family):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    add_sequence(platform, "06-SRNP-2459", "COI-5P", family.backbone,
                 "Centre for Biodiversity Genomics", "alice", ts=ts_at(6))
    add_images(platform, "06-SRNP-2459", [{"name": "a.jpg"}], "alice", ts=ts_at(7))
    update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes tucuti"},
                    "alice", ts=ts_at(8))
    actions = [e.action for e in record_history(platform, "06-SRNP-2459")]
    assert actions == ["Modify-Specimen", "New-Image(s)", "New-Sequence", "New-Specimen"]


def test_history_resolves_process_id(platform):
    _project(platform)
    doc = create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    via_pid = record_history(platform, doc["process_ids"][0])
    assert [e.action for e in via_pid] == ["New-Specimen"]


def test_delta_no_changes_empty(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts="2026-01-05T10:00:00Z")
    assert delta_view(platform, "06-SRNP-2459", "2026-W02", "2026-W02") == []


def test_delta_single_edit(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(
        taxonomy={"phylum": "Arthropoda", "species": "Astraptes tucuti"}
    ), "alice", ts="2026-01-05T10:00:00Z")  # week 2026-W02
    update_specimen(platform, "06-SRNP-2459", {"taxonomy.species": "Astraptes janeira"},
                    "alice", ts="2026-01-14T10:00:00Z")  # week 2026-W03
    triples = delta_view(platform, "06-SRNP-2459", "2026-W02", "2026-W03")
    species = [t for t in triples if t["field"] == "specimen.taxonomy.species"]
    assert species == [{
        "field": "specimen.taxonomy.species",
        "old": "Astraptes tucuti",
        "new": "Astraptes janeira",
    }]


def test_delta_empty_window(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts="2026-03-05T10:00:00Z")
    with pytest.raises(errors.EmptyHistoryWindow):
        delta_view(platform, "06-SRNP-2459", "2026-W01", "2026-W02")


def test_delta_order_check(platform):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    with pytest.raises(ValueError):
        delta_view(platform, "06-SRNP-2459", "2026-W09", "2026-W02")


def test_delta_apply_reproduces_snapshot(platform):
    """Random edit walk: from-snapshot + diff == to-snapshot, all week pairs."""
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts="2026-01-05T10:00:00Z")
    rng = random.Random(11)
    species_pool = ["Astraptes tucuti", "Astraptes janeira", "Astraptes enotrus"]
    for week in range(3, 12, 2):
        day = (week - 1) * 7 - 2
        month = 1
        while day > 28:
            day -= 28
            month += 1
        ts = f"2026-{month:02d}-{day:02d}T10:00:00Z"
        update_specimen(platform, "06-SRNP-2459", {
            "taxonomy.species": rng.choice(species_pool),
            "collection.site": f"site-{rng.randint(0, 9)}",
        }, "alice", ts=ts)
    weeks = platform.store.snapshot_weeks("06-SRNP-2459")
    assert len(weeks) >= 4
    for i in range(len(weeks)):
        for j in range(i, len(weeks)):
            from_week, to_week = weeks[i], weeks[j]
            snap_from = snapshot_as_of(platform, "06-SRNP-2459", from_week)
            snap_to = snapshot_as_of(platform, "06-SRNP-2459", to_week)
            triples = delta_view(platform, "06-SRNP-2459", from_week, to_week)
            assert dump_bytes(apply_diff(snap_from, triples)) == dump_bytes(snap_to)


# --- global invariants -------------------------------------------------------------------

def test_audit_append_only_and_replay(platform, family):
    sample_ids = seed_project(platform, n_records=4)
    lengths = [len(platform.store.all_events())]
    update_specimen(platform, sample_ids[0], {"collection.site": "trail"}, "alice",
                    ts=ts_at(20))
    lengths.append(len(platform.store.all_events()))
    annotate(platform, {"kind": "record", "id": sample_ids[1]},
             {"type": "tag", "label": "check"}, "alice", ts=ts_at(21))
    lengths.append(len(platform.store.all_events()))
    assert lengths == sorted(lengths) and len(set(lengths)) == 3

    state = replay_events(platform.store.all_events())
    assert dump_bytes(state) == platform.store.dump_state()


def test_extension_safety(platform, family):
    _project(platform)
    create_specimen(platform, "MHAHG", _row(), "alice", ts=ts_at(5))
    before = dump_bytes(platform.store.get_specimen("06-SRNP-2459"))
    add_sequence(platform, "06-SRNP-2459", "ITS2", "ACGT" * 90,
                 "Centre for Biodiversity Genomics", "alice", ts=ts_at(6))
    assert dump_bytes(platform.store.get_specimen("06-SRNP-2459")) == before


def test_iso_week_key():
    assert iso_week_key("2026-01-05T10:00:00Z") == "2026-W02"
    assert iso_week_key("2026-01-01T00:00:00Z") == "2026-W01"


def test_diff_docs_round_trip():
    old = {"a": 1, "nested": {"x": "1", "y": [1, 2]}, "gone": "yes"}
    new = {"a": 2, "nested": {"x": "1", "y": [1, 2, 3]}, "fresh": {"k": "v"}}
    triples = diff_docs(old, new)
    assert dump_bytes(apply_diff(old, triples)) == dump_bytes(new)
