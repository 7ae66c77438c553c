"""Acceptance criteria, one test per criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Oracles here are independent of the code paths they check: planted
truth tables, brute-force enumeration, networkx, and direct recomputation.
"""

import io
import itertools
import json
import math
import random
import struct
import time
import zipfile
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from corpus import coi_family, fresh_platform, grant, seed_project, ts_at
from barcodelab import errors
from barcodelab.canonical import dump_bytes


@contextmanager
def criterion(name: str, budget_seconds: float | None = None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    if budget_seconds is not None and elapsed > budget_seconds:
        print(f"[FAIL] {name} (runtime {elapsed:.1f}s > {budget_seconds}s)")
        raise AssertionError(f"{name}: runtime {elapsed:.1f}s over budget {budget_seconds}s")
    print(f"[PASS] {name} ({elapsed:.2f}s)")


# =========================================================================
# 1. Compliance gate
# =========================================================================

def test_compliance_gate():
    from barcodelab.validation.compliance import check_barcode_compliance

    platform = fresh_platform()
    family = coi_family()
    n_backbone = len(family.backbone)

    # 50 planted records; the truth table is computed from the plan alone:
    # ambiguity < 1%, length > 486 (75% of 648), both primers, country.
    plan = []
    rng = random.Random(42)
    for i in range(50):
        length = [657, 486, 487, 488, 400, 650][i % 6]
        ambig = [0.0, 0.009, 0.011, 0.0, 0.005, 0.02][(i // 6) % 6]
        primers = (i % 4) != 3
        country = (i % 5) != 4
        plan.append({"length": length, "ambig": ambig, "primers": primers,
                     "country": country})

    with criterion("compliance gate: 50-record planted truth table", budget_seconds=1.0):
        mismatches = 0
        for i, spec in enumerate(plan):
            seq = family.mutate(family.backbone, rng.randint(0, 10), seed=1000 + i)
            seq = seq[: spec["length"]]
            n_ambig = round(spec["ambig"] * spec["length"])
            if n_ambig:
                seq = "N" * n_ambig + seq[n_ambig:]
            seq_doc = {
                "marker_code": "COI-5P",
                "nucleotides": seq,
                "forward_primer": "LepF1" if spec["primers"] else None,
                "reverse_primer": "LepR1" if spec["primers"] else None,
            }
            spec_doc = {"collection": {"country": "Costa Rica"} if spec["country"] else {}}

            # hand truth table from the plant
            truth = {
                "ambiguity_ok": (n_ambig / spec["length"]) < 0.01,
                "length_ok": spec["length"] > 486,
                "primers_present": spec["primers"],
                "country_present": spec["country"],
            }
            truth["barcode_compliant"] = all(truth.values())

            report = check_barcode_compliance(platform, seq_doc, spec_doc)
            got = {
                "ambiguity_ok": report.ambiguity_ok,
                "length_ok": report.length_ok,
                "primers_present": report.primers_present,
                "country_present": report.country_present,
                "barcode_compliant": report.barcode_compliant,
            }
            if got != truth:
                mismatches += 1
        assert mismatches == 0
        # thresholds verbatim: 486 fails, 487 passes; 0.9% passes, 1.1% fails
        lengths = {spec["length"]: None for spec in plan}
        assert {486, 487, 488} <= set(lengths)


# =========================================================================
# 2. Identification self-retrieval
# =========================================================================

def test_identification_self_retrieval():
    from barcodelab.idengine.identify import identify_coi
    from barcodelab.idengine.library import LibraryEntry, ReferenceLibrary
    from barcodelab.seq.distance import align_overlap

    platform = fresh_platform()
    family = coi_family()
    rng = random.Random(7)

    entries = []
    for i in range(500):
        seq = family.mutate(family.backbone, 20, seed=3000 + i)
        entries.append(LibraryEntry(
            seq_key=f"TOY{i:04d}-26:COI-5P", process_id=f"TOY{i:04d}-26",
            sample_id=f"TS{i:04d}", marker="COI-5P", nucleotides=seq,
            taxonomy={"phylum": "Arthropoda", "genus": "Astraptes",
                      "species": f"Astraptes sp{i:04d}"},
            bin_uri=None, visibility="public", compliant=True, length=len(seq),
        ))
    library = ReferenceLibrary(kind="All", marker="COI-5P", built_at="t",
                               entries=sorted(entries, key=lambda e: e.seq_key))

    with criterion("identification: self-retrieval + mutants + oracle ordering",
                   budget_seconds=30.0):
        library.build_indexes(platform.coi_profile)

        for entry in library.entries:
            result = identify_coi(platform, entry.nucleotides, library)
            top = result["matches"][0]
            assert top["process_id"] == entry.process_id, entry.process_id
            assert top["identity"] == 1.0

        one_percent = max(1, round(0.01 * len(family.backbone)))
        for i in range(100):
            parent = library.entries[(i * 5) % 500]
            mutant = family.mutate(parent.nucleotides, one_percent, seed=6000 + i)
            top = identify_coi(platform, mutant, library)["matches"][0]
            assert top["process_id"] == parent.process_id
            assert top["identity"] >= 0.985

        # exhaustive alignment oracle over a 50-entry sub-library
        sub_entries = library.entries[:50]
        sub = ReferenceLibrary(kind="All", marker="COI-5P", built_at="t",
                               entries=sub_entries)
        sub.build_indexes(platform.coi_profile)
        for q in range(8):
            query = family.mutate(sub_entries[q * 6].nucleotides, 4, seed=8000 + q)
            engine = identify_coi(platform, query, sub)["matches"]
            oracle = []
            for entry in sub_entries:
                res = align_overlap(query, entry.nucleotides)
                oracle.append((-res["identity_fraction"], -res["overlap_bp"],
                               entry.process_id))
            oracle.sort()
            assert [m["process_id"] for m in engine] == [o[2] for o in oracle[:100]]


# =========================================================================
# 3. RESL properties
# =========================================================================

def test_resl_properties():
    import networkx as nx

    from barcodelab.binning.registry import format_bin_uri, update_bin_registry
    from barcodelab.binning.resl import OtuCluster, ReslParams, resl_cluster
    from barcodelab.seq.matrix import distance_matrix

    family = coi_family()
    params = ReslParams()

    sequences = {}
    for g in range(40):
        center = family.mutate(family.backbone, 30, seed=100 + g)
        for i in range(5):
            sequences[f"G{g:02d}M{i}"] = family.mutate(center, (i * 3) % 7,
                                                       seed=g * 100 + i)

    with criterion("RESL: partition + order invariance + oracle + registry",
                   budget_seconds=20.0):
        clusters = resl_cluster(sequences, params, profile=None)

        members = [m for c in clusters for m in c.members]
        assert sorted(members) == sorted(sequences)
        assert len(members) == len(set(members))

        shuffled = dict(sorted(sequences.items(), key=lambda kv: kv[0][::-1]))
        again = resl_cluster(shuffled, params, profile=None)
        assert [c.members for c in clusters] == [c.members for c in again]

        # brute-force single-linkage oracle at the seed threshold (networkx)
        ids, dist = distance_matrix(sequences)
        graph = nx.Graph()
        graph.add_nodes_from(ids)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if not np.isnan(dist[i, j]) and dist[i, j] <= params.seed_threshold:
                    graph.add_edge(ids[i], ids[j])
        oracle_components = sorted(frozenset(c) for c in nx.connected_components(graph))

        from barcodelab.binning.resl import single_linkage_components

        got = sorted(frozenset(ids[i] for i in comp)
                     for comp in single_linkage_components(dist, params.seed_threshold))
        assert got == oracle_components

        # registry idempotence on rerun
        counter = itertools.count(1)
        mint = lambda: format_bin_uri(next(counter))
        state, log1 = update_bin_registry(clusters, {}, mint, ts="2026-02-01T00:00:00Z")
        state2, log2 = update_bin_registry(clusters, state, mint, ts="2026-03-01T00:00:00Z")
        assert log2 == []
        assert {u: d["members"] for u, d in state.items()} == \
               {u: d["members"] for u, d in state2.items()}

        # constructed 60/40 split keeps the majority uri
        big = [f"s{i:02d}" for i in range(10)]
        mk = lambda g: OtuCluster(members=sorted(g), representative=sorted(g)[0], stats={})
        base, _ = update_bin_registry([mk(big)], {}, mint)
        uri = next(iter(base))
        split, _ = update_bin_registry([mk(big[:6]), mk(big[6:])], base, mint)
        assert set(split[uri]["members"]) == set(big[:6])


# =========================================================================
# 4. Discordance arithmetic
# =========================================================================

def test_discordance_arithmetic():
    from barcodelab.binning.discordance import bin_discordance

    with criterion("discordance: class partition + planted tribe conflict"):
        records = []
        # 3 discordant bins (tribe conflict planted in the first)
        records += [
            {"record_id": "d1", "bin_uri": "BOLD:AAA0001",
             "taxonomy": {"subfamily": "Deltocephalinae", "tribe": "Platymetopiini",
                          "genus": "Platymetopius"}},
            {"record_id": "d2", "bin_uri": "BOLD:AAA0001",
             "taxonomy": {"subfamily": "Deltocephalinae", "tribe": "Athysanini",
                          "genus": "Fitchana", "species": "Fitchana twiningi"}},
            {"record_id": "d3", "bin_uri": "BOLD:AAA0001",
             "taxonomy": {"subfamily": "Deltocephalinae", "tribe": "Athysanini",
                          "genus": "Fitchana", "species": "Fitchana twiningi"}},
        ]
        for b in (2, 3):
            records += [
                {"record_id": f"g{b}{i}", "bin_uri": f"BOLD:AAA000{b}",
                 "taxonomy": {"genus": f"Genus{b}{i % 2}"}}
                for i in range(4)
            ]
        # 5 concordant bins
        for b in range(4, 9):
            records += [
                {"record_id": f"c{b}{i}", "bin_uri": f"BOLD:AAB000{b}",
                 "taxonomy": {"species": f"Species {b}"}}
                for i in range(3)
            ]
        # 4 singletons
        for b in range(9, 13):
            records.append({"record_id": f"s{b}", "bin_uri": f"BOLD:AAC00{b:02d}",
                            "taxonomy": {"species": f"Species {b}"}})
        # 2 records with no bin
        records += [{"record_id": f"n{i}", "bin_uri": None, "taxonomy": {}}
                    for i in range(2)]

        report = bin_discordance(records)
        classes = report["classes"]
        assert classes["discordant"]["bins"] == 3
        assert classes["concordant"]["bins"] == 5
        assert classes["singleton"]["bins"] == 4
        assert (classes["discordant"]["bins"] + classes["concordant"]["bins"]
                + classes["singleton"]["bins"]) == report["totals"]["bins"] == 12
        assert classes["singleton"]["records"] == classes["singleton"]["bins"]
        assert report["totals"]["records"] == len(records)
        assert report["totals"]["records_with_bins"] == len(records) - 2

        planted = [r for r in report["discordant_bins"]
                   if r["bin_uri"] == "BOLD:AAA0001"][0]
        assert planted["conflict_rank"] == "tribe"
        assert planted["tallies"]["tribe"] == {"Athysanini": 2, "Platymetopiini": 1}


# =========================================================================
# 5. NJ correctness
# =========================================================================

def _tree_distance(edges, leaves):
    adjacency = {}
    for a, b, w in edges:
        adjacency.setdefault(a, []).append((b, w))
        adjacency.setdefault(b, []).append((a, w))

    def dist_from(start):
        out = {start: 0.0}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt, w in adjacency[node]:
                if nxt not in out:
                    out[nxt] = out[node] + w
                    stack.append(nxt)
        return out

    n = len(leaves)
    matrix = np.zeros((n, n))
    for i, leaf in enumerate(leaves):
        d = dist_from(leaf)
        for j, other in enumerate(leaves):
            matrix[i, j] = d[other]
    return matrix


def test_nj_correctness():
    from barcodelab.analytics.njtree import neighbor_joining

    with criterion("NJ: additive recovery (1e-9), 3-taxon closed form, 25k cap"):
        # 4-taxon additive
        edges4 = [("A", "u", 0.2), ("B", "u", 0.4), ("u", "v", 0.7),
                  ("C", "v", 0.3), ("D", "v", 0.5)]
        leaves4 = ["A", "B", "C", "D"]
        d4 = _tree_distance(edges4, leaves4)
        tree4 = neighbor_joining(leaves4, d4)
        lengths4 = tree4.edge_lengths()
        expected4 = {
            frozenset(["A"]): 0.2, frozenset(["B"]): 0.4, frozenset(["C"]): 0.3,
            frozenset(["D"]): 0.5, frozenset(["A", "B"]): 0.7,
        }
        assert frozenset(["A", "B"]) in tree4.splits()
        for key, value in expected4.items():
            assert abs(lengths4[key] - value) < 1e-9

        # 6-taxon additive
        edges6 = [("A", "u", 0.11), ("B", "u", 0.23), ("u", "v", 0.31),
                  ("C", "v", 0.17), ("v", "w", 0.19), ("D", "w", 0.29),
                  ("w", "x", 0.13), ("E", "x", 0.37), ("F", "x", 0.41)]
        leaves6 = ["A", "B", "C", "D", "E", "F"]
        d6 = _tree_distance(edges6, leaves6)
        tree6 = neighbor_joining(leaves6, d6)
        splits = tree6.splits()
        assert frozenset(["A", "B"]) in splits and frozenset(["E", "F"]) in splits
        lengths6 = tree6.edge_lengths()
        for leaf, expected in (("A", 0.11), ("B", 0.23), ("C", 0.17),
                               ("D", 0.29), ("E", 0.37), ("F", 0.41)):
            assert abs(lengths6[frozenset([leaf])] - expected) < 1e-9
        assert abs(lengths6[frozenset(["A", "B"])] - 0.31) < 1e-9
        assert abs(lengths6[frozenset(["E", "F"])] - 0.13) < 1e-9

        # 3-taxon closed form
        d3 = np.array([[0.0, 0.3, 0.5], [0.3, 0.0, 0.6], [0.5, 0.6, 0.0]])
        tree3 = neighbor_joining(["X", "Y", "Z"], d3)
        lengths3 = tree3.edge_lengths()
        assert abs(lengths3[frozenset(["X"])] - (0.3 + 0.5 - 0.6) / 2) < 1e-12
        assert abs(lengths3[frozenset(["Y"])] - (0.3 + 0.6 - 0.5) / 2) < 1e-12
        assert abs(lengths3[frozenset(["Z"])] - (0.5 + 0.6 - 0.3) / 2) < 1e-12

        # cap
        with pytest.raises(errors.TooManyRecords):
            neighbor_joining([f"L{i}" for i in range(25_001)], np.zeros((2, 2)))


# =========================================================================
# 6. Statistics closed forms
# =========================================================================

def test_statistics_closed_forms():
    from barcodelab.analytics.diversity import accumulation_curve, diversity
    from barcodelab.analytics.geo import mantel_test

    with criterion("statistics closed forms: Shannon, Simpson, Mantel, curve, Jaccard"):
        out = diversity({"site": ["A", "B"] * 8})
        assert abs(out["alpha"]["site"]["shannon"] - math.log(2)) < 1e-12

        single = diversity({"site": ["OnlyOne"] * 5})
        assert single["alpha"]["site"]["simpson"] == 0.0

        rng = random.Random(0)
        n = 9
        m1 = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                m1[i, j] = m1[j, i] = rng.uniform(1.0, 9.0)
        result = mantel_test(m1, 2.5 * m1, permutations=199, seed=0)
        assert abs(result["mantel_r"] - 1.0) < 1e-12

        labels = [f"Sp {i}" for i in range(12)]
        curve = accumulation_curve(labels, permutations=60, seed=0)
        assert curve["mean"] == [float(k) for k in range(1, 13)]

        disjoint = diversity({"s1": ["A", "B", "C"], "s2": ["D", "E"]})
        assert disjoint["beta"]["jaccard"][0][1] == 1.0


# =========================================================================
# 7. Audit replay
# =========================================================================

def test_audit_replay():
    from barcodelab.model.audit import apply_diff, replay_events
    from barcodelab.model.lifecycle import (
        add_images,
        add_sequence,
        annotate,
        create_specimen,
        delta_view,
        snapshot_as_of,
        update_specimen,
    )
    from barcodelab.registry.containers import create_container

    platform = fresh_platform()
    family = coi_family()
    platform.ensure_user("alice")
    create_container(platform.store, "Project", "RAND", "alice", ts=ts_at(1))

    rng = random.Random(123)
    sample_ids = []
    # one genus: species swaps stay consistent with the backbone chain
    species_pool = ["Astraptes tucuti", "Astraptes janeira", "Astraptes enotrus"]
    countries = ["Costa Rica", "Canada", "Mexico", "Brazil"]

    with criterion("audit replay: 1,000 randomized operations, byte-for-byte"):
        ops = 0
        clock_day = 2
        while ops < 1000:
            clock_day += rng.random() < 0.25
            ts = ts_at(int(clock_day), hour=rng.randint(0, 22), minute=ops % 60)
            dice = rng.random()
            if dice < 0.25 or not sample_ids:
                sample_id = f"R-{len(sample_ids):04d}"
                create_specimen(platform, "RAND", {
                    "sample_id": sample_id, "field_id": sample_id,
                    "storing_institution": "University of Guelph",
                    "taxonomy": {"phylum": "Arthropoda",
                                 "species": rng.choice(species_pool)},
                    "collection": {"country": rng.choice(countries)},
                }, "alice", ts=ts)
                sample_ids.append(sample_id)
            elif dice < 0.55:
                update_specimen(platform, rng.choice(sample_ids), {
                    "taxonomy.species": rng.choice(species_pool),
                    "collection.site": f"site-{ops}-{rng.randint(0, 50)}",
                }, "alice", ts=ts)
            elif dice < 0.7:
                annotate(platform, {"kind": "record", "id": rng.choice(sample_ids)},
                         {"type": rng.choice(["tag", "comment"]),
                          "label": f"note {ops}", "text": f"note {ops}"},
                         "alice", ts=ts)
            elif dice < 0.85:
                add_sequence(platform, rng.choice(sample_ids), "ITS2",
                             "".join(rng.choice("ACGT") for _ in range(240)),
                             "Centre for Biodiversity Genomics", "alice", ts=ts)
            else:
                add_images(platform, rng.choice(sample_ids),
                           [{"name": f"img-{ops}.jpg", "license": "CC BY-SA"}],
                           "alice", ts=ts)
            ops += 1

        assert len(platform.store.all_events()) >= 1000
        state = replay_events(platform.store.all_events())
        assert dump_bytes(state) == platform.store.dump_state()

        # delta property over sampled week pairs of the busiest records
        for sample_id in sample_ids[:8]:
            weeks = platform.store.snapshot_weeks(sample_id)
            pairs = [(a, b) for i, a in enumerate(weeks) for b in weeks[i:]]
            for from_week, to_week in pairs:
                snap_from = snapshot_as_of(platform, sample_id, from_week)
                snap_to = snapshot_as_of(platform, sample_id, to_week)
                triples = delta_view(platform, sample_id, from_week, to_week)
                assert dump_bytes(apply_diff(snap_from, triples)) == dump_bytes(snap_to)


# =========================================================================
# 8. ACL matrix
# =========================================================================

def test_acl_matrix():
    from barcodelab.service.app import create_app

    platform = fresh_platform()
    family = coi_family()
    seed_project(platform, n_records=3)
    platform.ensure_user("alice")
    from barcodelab.registry.containers import PERMISSIONS, create_container, set_acl

    create_container(platform.store, "Dataset", "DS-ACL", "alice")
    client = TestClient(create_app(platform))

    def probe_calls(token):
        headers = {"Authorization": f"Bearer {token}"}
        return {
            "Analyze": lambda: client.post(
                "/api/v4/wb/analyses",
                json={"tool": "composition", "selection": {"project": "MHAHG"}},
                headers=headers),
            "ViewDownload": lambda: client.get(
                "/api/v4/wb/projects/MHAHG/records", headers=headers),
            "EditSpecimens": lambda: client.patch(
                "/api/v4/wb/records/MHAHG-S000",
                json={"updates": {"collection.site": "probe"}}, headers=headers),
            "EditSequences": lambda: client.post(
                "/api/v4/wb/submissions/sequences",
                params={"marker": "ITS2",
                        "run_site": "Centre for Biodiversity Genomics"},
                content=b">MHAHG-S000\n" + b"ACGT" * 60, headers=headers),
            "AddToDataset": lambda: client.post(
                "/api/v4/wb/datasets/DS-ACL/records",
                json={"record_refs": ["MHAHG-S001"]}, headers=headers),
        }

    implications = {
        "Analyze": {"Analyze"},
        "ViewDownload": {"ViewDownload"},
        "EditSequences": {"EditSequences"},
        "EditSpecimens": {"EditSpecimens"},
        "AddToDataset": {"AddToDataset", "Analyze", "ViewDownload"},
    }

    with criterion("ACL matrix: 5 permissions x 5 operation classes x grant/deny"):
        for granted in PERMISSIONS:
            user = f"probe_{granted.lower()}"
            token = platform.ensure_user(user)
            set_acl(platform.store, "MHAHG", user, [granted], "alice")
            set_acl(platform.store, "DS-ACL", user, [granted], "alice")
            for asked, call in probe_calls(token).items():
                response = call()
                expect_allowed = asked in implications[granted]
                if expect_allowed:
                    assert response.status_code < 400, (granted, asked, response.text)
                else:
                    assert response.status_code == 403, (granted, asked, response.text)
                    assert response.json()["permission"] == asked
            set_acl(platform.store, "MHAHG", user, [], "alice")
            set_acl(platform.store, "DS-ACL", user, [], "alice")

        # AddToDataset implies Analyze and ViewDownload in the checker itself
        from barcodelab.registry.containers import implied_permissions

        assert implied_permissions(["AddToDataset"]) == {
            "AddToDataset", "Analyze", "ViewDownload",
        }


# =========================================================================
# 9. API fidelity
# =========================================================================

def test_api_fidelity():
    from barcodelab.registry import search as search_module
    from barcodelab.registry.containers import add_to_dataset, create_container, publish_dataset
    from barcodelab.service.app import create_app

    platform = fresh_platform()
    family = coi_family()
    public_ids = seed_project(platform, n_records=12, visibility="public")
    create_container(platform.store, "Dataset", "DS-FID", "alice")
    add_to_dataset(platform, "DS-FID", public_ids, "alice")
    publish_dataset(platform, "DS-FID", "alice", ts=ts_at(28))

    # private records carry sentinel values that must never leak
    from barcodelab.model.lifecycle import create_specimen

    sentinels = []
    for i in range(8):
        sample_id = f"PRIV-{i:03d}"
        sentinel = f"ZZREDACTEDZZ{i:03d}"
        sentinels.append(sentinel)
        create_specimen(platform, "MHAHG", {
            "sample_id": sample_id, "field_id": sentinel,
            "storing_institution": "University of Guelph",
            "taxonomy": {"phylum": "Arthropoda", "species": "Astraptes tucuti"},
            "collection": {"country": "Costa Rica", "site": sentinel,
                           "collectors": [sentinel],
                           "latitude": 10.123456, "longitude": -84.654321},
        }, "alice", ts=ts_at(20 + (i % 5)))

    client = TestClient(create_app(platform))

    with criterion("API fidelity: store oracles, formats, privacy fuzz, cap, determinism"):
        # oracle comparisons across formats
        oracle_ids = sorted(
            d["sample_id"] for d in platform.store.iter_specimens()
            if d.get("visibility") == "public"
            and "Arthropoda" in (d.get("taxonomy") or {}).values()
        )
        as_json = client.get("/api/v4/public/specimen?taxon=Arthropoda&format=json").json()
        assert [r["sample_id"] for r in as_json["records"]] == oracle_ids

        as_tsv = client.get("/api/v4/public/specimen?taxon=Arthropoda&format=tsv").text
        lines = as_tsv.strip().splitlines()
        col = lines[0].split("\t").index("sample_id")
        assert [l.split("\t")[col] for l in lines[1:]] == oracle_ids

        as_xml = client.get("/api/v4/public/specimen?taxon=Arthropoda&format=xml").text
        assert [s.split("</")[0] for s in as_xml.split("<sample_id>")[1:]] == oracle_ids

        stats = client.get("/api/v4/public/stats?taxon=Arthropoda&format=json").json()
        seq_oracle = [
            s for s in platform.store.iter_sequences()
            if s["sample_id"] in oracle_ids
        ]
        row = stats["records"][0]
        assert row["records"] == len(oracle_ids)
        assert row["sequences"] == len(seq_oracle)

        combined = client.get(
            "/api/v4/public/combined?taxon=Arthropoda&format=json"
        ).json()
        assert len(combined["records"]) == len(seq_oracle)

        # byte determinism
        for url in (
            "/api/v4/public/specimen?taxon=Arthropoda&format=tsv",
            "/api/v4/public/combined?taxon=Arthropoda&format=xml",
            "/api/v4/public/stats?taxon=Arthropoda&format=json",
        ):
            assert client.get(url).content == client.get(url).content

        # privacy fuzz: 10,000 randomized public requests
        rng = random.Random(99)
        taxa = ["Arthropoda", "Insecta", "Lepidoptera", "Astraptes tucuti", "Chordata"]
        geos = ["Costa Rica", "Canada", "Argentina", "Mexico", "CR"]
        markers = ["COI-5P", "ITS2"]
        formats = ["json", "tsv", "xml"]
        endpoints = ["specimen", "sequence", "combined", "stats"]
        checked = 0
        for _ in range(10_000):
            params = {}
            if rng.random() < 0.8:
                params["taxon"] = rng.choice(taxa)
            if rng.random() < 0.5:
                params["geo"] = rng.choice(geos)
            if rng.random() < 0.2:
                params["marker"] = rng.choice(markers)
            if rng.random() < 0.1:
                params["ids"] = f"PRIV-{rng.randint(0, 7):03d}"
            if rng.random() < 0.1:
                params["institutions"] = "University of Guelph"
            if not params:
                params["taxon"] = "Arthropoda"
            params["format"] = rng.choice(formats)
            endpoint = rng.choice(endpoints)
            response = client.get(f"/api/v4/public/{endpoint}", params=params)
            assert response.status_code in (200, 404), response.text
            body = response.text
            assert "PRIV-" not in body
            for sentinel in sentinels:
                assert sentinel not in body
            checked += 1
        assert checked == 10_000

        # result cap honored: constant is 100,000 and truncation engages at it
        assert search_module.RESULT_CAP == 100_000
        original = search_module.RESULT_CAP
        try:
            search_module.RESULT_CAP = 5
            capped = search_module.search(platform, "Arthropoda[tax]", scope="all")
            assert len(capped["records"]) == 5 and capped["truncated"]
        finally:
            search_module.RESULT_CAP = original
        uncapped = search_module.search(platform, "Arthropoda[tax]", scope="all")
        assert not uncapped["truncated"]


# =========================================================================
# 10. Data package round-trip
# =========================================================================

def test_data_package_round_trip():
    import hashlib

    import jsonschema

    from barcodelab.binning.registry import run_bin_update
    from barcodelab.registry.packages import build_data_package

    platform = fresh_platform()
    family = coi_family()
    sample_ids = seed_project(platform, n_records=8, visibility="public")
    run_bin_update(platform, ts=ts_at(25))

    independent_schema = {
        "type": "object",
        "required": ["profile", "name", "id", "created", "counts", "resources"],
        "properties": {
            "resources": {
                "type": "array", "minItems": 1,
                "items": {"type": "object",
                          "required": ["name", "path", "format", "bytes", "hash"]},
            },
            "counts": {"type": "object",
                       "required": ["records", "sequences", "markers", "bins"]},
        },
    }

    with criterion("data package: recount, checksums, determinism, descriptor schema"):
        result = build_data_package(platform, sample_ids, "2026-Q3")
        descriptor = result["descriptor"]
        archive = zipfile.ZipFile(io.BytesIO(result["archive"]))

        # recount from the resources themselves
        specimens = archive.read("specimens.tsv").decode().strip().splitlines()
        assert len(specimens) - 1 == descriptor["counts"]["records"]
        fasta = archive.read("sequences.fasta").decode()
        assert fasta.count(">") == descriptor["counts"]["sequences"]
        bins_tsv = archive.read("bins.tsv").decode().strip().splitlines()
        assert len(bins_tsv) - 1 == descriptor["counts"]["bins"]
        markers = {block.splitlines()[0].split("|")[1] for block in fasta.split(">")[1:]}
        assert len(markers) == descriptor["counts"]["markers"]

        # checksums
        for resource in descriptor["resources"]:
            data = archive.read(resource["path"])
            assert len(data) == resource["bytes"]
            assert resource["hash"] == f"sha256:{hashlib.sha256(data).hexdigest()}"

        # byte-identical rebuild
        rebuilt = build_data_package(platform, sample_ids, "2026-Q3")
        assert rebuilt["archive"] == result["archive"]

        # descriptor validates against an independent schema, from the zip
        embedded = json.loads(archive.read("datapackage.json"))
        jsonschema.validate(embedded, independent_schema)
        assert embedded == descriptor


# =========================================================================
# 11. Upload limits
# =========================================================================

def _jpeg_bytes(width=100, height=80):
    sof = struct.pack(">BBHBHHB", 0xFF, 0xC0, 17, 8, height, width, 3) + b"\x01\x11\x00" * 3
    return b"\xff\xd8" + sof + b"\xff\xd9"


def test_upload_limits():
    from barcodelab.validation.packages import validate_upload_package

    platform = fresh_platform()

    def image_manifest(names, specimen_for=lambda i: f"S-{i // 10:03d}"):
        return [
            {"Image name": name, "Sample ID": specimen_for(i),
             "Original specimen": "Yes", "Orientation": "dorsal",
             "License": "CC BY-SA", "License Institution": "University of Guelph"}
            for i, name in enumerate(names)
        ]

    def trace_manifest(names, record_for=lambda i: f"R-{i // 10}"):
        return [
            {"Trace File": name, "PCR Primer Fwd": "LepF1", "PCR Primer Rev": "LepR1",
             "Process ID": record_for(i), "Marker": "COI-5P"}
            for i, name in enumerate(names)
        ]

    with criterion("upload limits: 2000 seqs / 200 images / 20MP / 400+10 traces / 10 images"):
        # sequences: 2000 exact ok, 2001 rejected naming the limit
        meta = [{"Marker": "COI-5P", "Run Site": "Centre for Biodiversity Genomics"}]
        ok = validate_upload_package(
            platform, "sequence", meta,
            {"b.fasta": "".join(f">Q{i}\nACGTACGT\n" for i in range(2000)).encode()})
        assert len(ok["entries"]) == 2000
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(
                platform, "sequence", meta,
                {"b.fasta": "".join(f">Q{i}\nACGTACGT\n" for i in range(2001)).encode()})
        assert "2000" in str(exc.value)

        # images: 200 ok, 201 rejected
        names200 = [f"i{i:03d}.jpg" for i in range(200)]
        ok = validate_upload_package(platform, "image", image_manifest(names200),
                                     {n: _jpeg_bytes() for n in names200})
        assert len(ok["rows"]) == 200
        names201 = [f"i{i:03d}.jpg" for i in range(201)]
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(platform, "image", image_manifest(names201),
                                    {n: _jpeg_bytes() for n in names201})
        assert "200" in str(exc.value)

        # 20 MP boundary: exactly 20 MP passes, above fails
        exact = {"ok.jpg": _jpeg_bytes(5000, 4000)}  # 20.0 MP
        validate_upload_package(platform, "image", image_manifest(["ok.jpg"]), exact)
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(platform, "image", image_manifest(["big.jpg"]),
                                    {"big.jpg": _jpeg_bytes(5001, 4000)})
        assert "20" in str(exc.value)

        # images per specimen: 10 ok, 11 rejected
        names10 = [f"s{i}.jpg" for i in range(10)]
        validate_upload_package(platform, "image",
                                image_manifest(names10, lambda i: "SAME"),
                                {n: _jpeg_bytes() for n in names10})
        names11 = [f"s{i}.jpg" for i in range(11)]
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(platform, "image",
                                    image_manifest(names11, lambda i: "SAME"),
                                    {n: _jpeg_bytes() for n in names11})
        assert "10" in str(exc.value)

        # traces: 400 ok, 401 rejected; 10 per record ok, 11 rejected
        names400 = [f"t{i:03d}.ab1" for i in range(400)]
        ok = validate_upload_package(platform, "trace", trace_manifest(names400),
                                     {n: b"x" for n in names400})
        assert len(ok["rows"]) == 400
        names401 = [f"t{i:03d}.ab1" for i in range(401)]
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(platform, "trace", trace_manifest(names401),
                                    {n: b"x" for n in names401})
        assert "400" in str(exc.value)

        names11t = [f"u{i}.ab1" for i in range(11)]
        with pytest.raises(errors.LimitExceeded) as exc:
            validate_upload_package(platform, "trace",
                                    trace_manifest(names11t, lambda i: "ONE"),
                                    {n: b"x" for n in names11t})
        assert "10" in str(exc.value)
