"""Genetic code tables loaded from the bundled TSV (codon, residue, start)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from barcodelab.errors import UnknownGeneticCode

# IUPAC ambiguity expansion used when translating degenerate codons.
IUPAC_SETS = {
    "A": "A", "C": "C", "G": "G", "T": "T", "U": "T",
    "R": "AG", "Y": "CT", "S": "GC", "W": "AT", "K": "GT", "M": "AC",
    "B": "CGT", "D": "AGT", "H": "ACT", "V": "ACG", "N": "ACGT",
}


@dataclass(frozen=True)
class GeneticCode:
    name: str
    table: dict  # codon -> residue, '*' for stops
    starts: frozenset

    def translate_codon(self, codon: str) -> str:
        """Translate one codon; degenerate codons resolve to a residue only
        when all expansions agree, otherwise 'X' ('*' if all are stops)."""
        direct = self.table.get(codon)
        if direct is not None:
            return direct
        pools = []
        for ch in codon:
            pool = IUPAC_SETS.get(ch)
            if pool is None:  # gap or junk inside a codon
                return "X"
            pools.append(pool)
        residues = set()
        for a in pools[0]:
            for b in pools[1]:
                for c in pools[2]:
                    residues.add(self.table[a + b + c])
                    if len(residues) > 1:
                        return "X" if residues != {"*"} else "X"
        return residues.pop()


@lru_cache(maxsize=1)
def _load_tables() -> dict:
    tables: dict[str, dict] = {}
    starts: dict[str, set] = {}
    data = resources.files("barcodelab.seq").joinpath("data/genetic_codes.tsv").read_text()
    for line in data.splitlines()[1:]:
        name, codon, aa, is_start = line.split("\t")
        tables.setdefault(name, {})[codon] = aa
        if is_start == "1":
            starts.setdefault(name, set()).add(codon)
    return {
        name: GeneticCode(name, table, frozenset(starts.get(name, set())))
        for name, table in tables.items()
    }


def list_genetic_codes() -> list[str]:
    return sorted(_load_tables())


def get_genetic_code(name: str) -> GeneticCode:
    key = name.strip().lower().replace(" ", "_")
    tables = _load_tables()
    if key not in tables:
        raise UnknownGeneticCode(name)
    return tables[key]
