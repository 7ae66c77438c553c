"""Deterministic test corpus: COI-like sequence families and seeded stores.

Everything derives from the bundled profile's consensus protein, so frame
detection and anchoring behave exactly as they do for real submissions.
Mutations are substitution-only, which keeps anchored identities equal to
alignment-oracle identities.
"""

from __future__ import annotations

import random

from barcodelab.model.lifecycle import add_sequence, create_specimen
from barcodelab.platform import Platform
from barcodelab.registry.containers import create_container, set_acl
from barcodelab.seq.codes import get_genetic_code
from barcodelab.seq.frames import load_coi_profile

BASE_TS = "2026-01-05T10:00:00Z"


class CoiFamily:
    """Factory for COI-like nucleotide sequences sharing one backbone."""

    def __init__(self, seed: int = 20240901):
        self.profile = load_coi_profile()
        self.code = get_genetic_code("invertebrate_mitochondrial")
        self._codons_by_aa: dict[str, list] = {}
        for codon, aa in sorted(self.code.table.items()):
            self._codons_by_aa.setdefault(aa, []).append(codon)
        rng = random.Random(seed)
        self.backbone = "".join(
            rng.choice(self._codons_by_aa[aa]) for aa in self.profile.consensus
        )

    def mutate(self, seq: str, n_mutations: int, seed: int) -> str:
        """Substitute exactly n distinct positions (never to the same base)."""
        rng = random.Random(seed)
        out = list(seq)
        for pos in rng.sample(range(len(out)), n_mutations):
            choices = [b for b in "ACGT" if b != out[pos]]
            out[pos] = rng.choice(choices)
        return "".join(out)

    def variant(self, seed: int, divergence: float = 0.02) -> str:
        n = max(1, round(divergence * len(self.backbone)))
        return self.mutate(self.backbone, n, seed)

    def species_cluster(self, seed: int, size: int, center_divergence: float = 0.05,
                        radius_mutations: int = 4) -> list:
        """A tight cluster of sequences around a species-specific center."""
        center = self.variant(seed, center_divergence)
        return [self.mutate(center, (i * 7) % (radius_mutations + 1), seed * 1000 + i)
                for i in range(size)]

    def random_dna(self, seed: int, length: int = 300) -> str:
        rng = random.Random(seed)
        return "".join(rng.choice("ACGT") for _ in range(length))


_FAMILY: CoiFamily | None = None


def coi_family() -> CoiFamily:
    global _FAMILY
    if _FAMILY is None:
        _FAMILY = CoiFamily()
    return _FAMILY


def fresh_platform() -> Platform:
    return Platform.open()


def ts_at(day: int, hour: int = 10, minute: int = 0) -> str:
    """Timestamps on successive days of 2026 (day 1 = Jan 1)."""
    month = 1
    while day > 28:
        day -= 28
        month += 1
    return f"2026-{month:02d}-{day:02d}T{hour:02d}:{minute:02d}:00Z"


SPECIES_POOL = [
    ("Arthropoda", "Insecta", "Lepidoptera", "Hesperiidae", "Astraptes", "Astraptes tucuti"),
    ("Arthropoda", "Insecta", "Lepidoptera", "Hesperiidae", "Astraptes", "Astraptes janeira"),
    ("Arthropoda", "Insecta", "Hemiptera", "Miridae", "Adelphocoris", "Adelphocoris lineolatus"),
    ("Arthropoda", "Insecta", "Hemiptera", "Corixidae", "Sigara", "Sigara alternata"),
    ("Arthropoda", "Insecta", "Hemiptera", "Corixidae", "Callicorixa", "Callicorixa audeni"),
    ("Arthropoda", "Insecta", "Coleoptera", "Buprestidae", "Agrilus", "Agrilus planipennis"),
    ("Arthropoda", "Insecta", "Hymenoptera", "Apidae", "Bombus", "Bombus terrestris"),
    ("Arthropoda", "Insecta", "Diptera", "Culicidae", "Aedes", "Aedes aegypti"),
    ("Chordata", "Aves", "Passeriformes", "Furnariidae", "Furnarius", "Furnarius rufus"),
    ("Chordata", "Mammalia", "Rodentia", "Cricetidae", "Peromyscus", "Peromyscus maniculatus"),
]

COUNTRY_POOL = ["Costa Rica", "Canada", "Argentina", "Mexico", "Brazil", "Germany"]


def seed_project(
    platform: Platform,
    code: str = "MHAHG",
    manager: str = "alice",
    n_records: int = 10,
    with_sequences: bool = True,
    visibility: str = "private",
    divergence_step: int = 3,
    start_day: int = 5,
) -> list:
    """Create a project and n records with deterministic data. Returns sample ids."""
    platform.ensure_user(manager)
    if platform.store.get_container(code) is None:
        create_container(platform.store, "Project", code, manager, ts=BASE_TS)
    family = coi_family()
    sample_ids = []
    for i in range(n_records):
        phylum, cls, order, fam, genus, species = SPECIES_POOL[i % len(SPECIES_POOL)]
        country = COUNTRY_POOL[i % len(COUNTRY_POOL)]
        sample_id = f"{code}-S{i:03d}"
        create_specimen(platform, code, {
            "sample_id": sample_id,
            "field_id": f"F-{i:03d}",
            "storing_institution": "University of Guelph",
            "visibility": visibility,
            "taxonomy": {"phylum": phylum, "class": cls, "order": order,
                         "family": fam, "genus": genus, "species": species},
            "collection": {"country": country, "latitude": round(5.0 + i * 0.7, 2),
                           "longitude": round(-85.0 + i * 1.3, 2)},
        }, manager, ts=ts_at(start_day + i))
        if with_sequences:
            seq = family.mutate(family.backbone, (i * divergence_step) % 60, seed=900 + i)
            add_sequence(platform, sample_id, "COI-5P", seq,
                         "Centre for Biodiversity Genomics", manager,
                         ts=ts_at(start_day + i, hour=12),
                         forward_primer="LepF1", reverse_primer="LepR1")
        sample_ids.append(sample_id)
    return sample_ids


def grant(platform: Platform, container: str, manager: str, user: str, permissions: list) -> None:
    platform.ensure_user(user)
    set_acl(platform.store, container, user, permissions, manager)
