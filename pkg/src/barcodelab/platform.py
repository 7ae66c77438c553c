"""Platform facade: one object owning the store and the loaded registries.

The service, CLI, and tests all construct a Platform and pass it into the
operation modules.  Opening a data directory seeds the controlled
vocabularies (markers, primers, run sites, institutions) on first use.
"""

from __future__ import annotations

import hashlib
import os
import secrets
from pathlib import Path

from barcodelab.model.taxonomy import TaxonomyRegistry
from barcodelab.seq.frames import load_coi_profile
from barcodelab.storage import Store
from barcodelab.validation.compliance import ContaminantLibrary
from barcodelab.validation.countries import CountryRegistry

SEED_MARKERS = {
    "COI-5P": {"full_length": 648, "protein_coding": True,
               "genetic_code": "invertebrate_mitochondrial"},
    "matK": {"full_length": 840, "protein_coding": True, "genetic_code": "standard"},
    "rbcL": {"full_length": 607, "protein_coding": True, "genetic_code": "standard"},
    "ITS2": {"full_length": 360, "protein_coding": False, "genetic_code": None},
    "trnH-psbA": {"full_length": 450, "protein_coding": False, "genetic_code": None},
    "16S": {"full_length": 550, "protein_coding": False, "genetic_code": None},
}

SEED_RUNSITES = [
    "Centre for Biodiversity Genomics",
    "Biodiversity Institute of Ontario",
    "Smithsonian Institution",
]

SEED_PRIMERS = {
    "LepF1": {"marker": "COI-5P", "direction": "forward",
              "sequence": "ATTCAACCAATCATAAAGATATTGG", "cocktail": False},
    "LepR1": {"marker": "COI-5P", "direction": "reverse",
              "sequence": "TAAACTTCTGGATGTCCAAAAAATCA", "cocktail": False},
    "ITS2F": {"marker": "ITS2", "direction": "forward",
              "sequence": "ATGCGATACTTGGTGTGAAT", "cocktail": False},
    "ITS2R": {"marker": "ITS2", "direction": "reverse",
              "sequence": "GACGCTTCTCCAGACTACAAT", "cocktail": False},
}

SEED_INSTITUTIONS = [
    "University of Pennsylvania",
    "Smithsonian Institution",
    "Centre for Biodiversity Genomics",
    "Museo Argentino de Ciencias Naturales",
    "York University",
    "University of Guelph",
    "Natural History Museum London",
    "Research Collection of D. H. Janzen & W. Hallwachs",
]

SEED_IDENTIFIERS = {
    "John Burns": {"affiliation": "Smithsonian Institution"},
    "Megan A. Milton": {"affiliation": "Centre for Biodiversity Genomics"},
    "Angela Telfer": {"affiliation": "Centre for Biodiversity Genomics"},
}


class MarkerRegistry:
    def __init__(self, store: Store):
        self._store = store

    def get(self, name: str) -> dict | None:
        return self._store.get_vocab("marker", name)

    def add(self, name: str, doc: dict) -> None:
        self._store.add_vocab("marker", name, doc)

    def names(self) -> list:
        return [name for name, _doc in self._store.iter_vocab("marker")]


class Platform:
    def __init__(self, store: Store):
        self.store = store
        self.countries = CountryRegistry.load_bundled()
        self.contaminants = ContaminantLibrary.load_bundled()
        self.coi_profile = load_coi_profile()
        self.markers = MarkerRegistry(store)
        self._seed_vocabularies()
        self.taxonomy = TaxonomyRegistry.load_bundled()
        for rank, name, parent_rank, parent_name in store.iter_backbone_rows():
            try:
                self.taxonomy.add(rank, name, parent_rank, parent_name, moderated=True)
            except ValueError:
                pass

    @classmethod
    def open(cls, data_dir: str | Path | None = None) -> "Platform":
        store = Store(Path(data_dir) / "barcodelab.sqlite" if data_dir else None)
        return cls(store)

    def _seed_vocabularies(self) -> None:
        if self.store.kv_get("vocab_seeded"):
            return
        for name, doc in SEED_MARKERS.items():
            self.store.add_vocab("marker", name, doc)
        for name in SEED_RUNSITES:
            self.store.add_vocab("runsite", name, {})
        for name, doc in SEED_PRIMERS.items():
            self.store.add_vocab("primer", name, doc)
        for name in SEED_INSTITUTIONS:
            self.store.add_vocab("institution", name, {})
        for name, doc in SEED_IDENTIFIERS.items():
            self.store.add_vocab("identifier", name, doc)
        self.store.kv_set("vocab_seeded", "1")

    # --- users ---------------------------------------------------------------

    def ensure_user(self, username: str, token: str | None = None) -> str:
        existing = self.store.get_user(username)
        if existing:
            return existing["token"]
        token = token or secrets.token_hex(16)
        self.store.put_user(username, token, {})
        return token

    def bootstrap_admin(self) -> str:
        """Create the admin user; token derives from the secret when set."""
        secret = os.environ.get("BARCODELAB_TOKEN_SECRET")
        token = hashlib.sha256(f"admin:{secret}".encode()).hexdigest()[:32] if secret else None
        return self.ensure_user("admin", token)

    # --- backbone taxonomy extension ------------------------------------------

    def add_taxon(self, rank: str, name: str, parent_rank: str | None,
                  parent_name: str | None) -> dict:
        node = self.taxonomy.add(rank, name, parent_rank, parent_name, moderated=True)
        self.store.add_backbone_row(rank, name, parent_rank, parent_name)
        return {"taxid": node.taxid, "rank": node.rank, "name": node.name,
                "moderated": node.moderated}
