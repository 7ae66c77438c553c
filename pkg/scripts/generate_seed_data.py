#!/usr/bin/env python3
"""Regenerates the bundled data files under src/barcodelab/*/data.

Everything here is deterministic (fixed seeds) so the shipped files can be
reproduced exactly.  Run from the repo root:

    python scripts/generate_seed_data.py
"""

from __future__ import annotations

import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "src" / "barcodelab"

BASES = "TCAG"

# NCBI translation table layout: base1 varies slowest, base3 fastest.
NCBI_TABLES = {
    "standard": (
        "FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG",
        "---M---------------M---------------M----------------------------",
    ),
    "vertebrate_mitochondrial": (
        "FFLLSSSSYY**CCWWLLLLPPPPHHQQRRRRIIMMTTTTNNKKSS**VVVVAAAADDEEGGGG",
        "--------------------------------MMMM---------------M------------",
    ),
    "invertebrate_mitochondrial": (
        "FFLLSSSSYY**CCWWLLLLPPPPHHQQRRRRIIMMTTTTNNKKSSSSVVVVAAAADDEEGGGG",
        "---M----------------------------MMMM---------------M------------",
    ),
}

# COI-like residue composition used to synthesize the bundled profile family.
COI_COMPOSITION = {
    "L": 0.12, "I": 0.08, "F": 0.08, "G": 0.09, "S": 0.07, "T": 0.07,
    "A": 0.07, "V": 0.06, "P": 0.05, "M": 0.04, "W": 0.03, "N": 0.04,
    "H": 0.03, "D": 0.03, "E": 0.02, "Q": 0.02, "R": 0.02, "K": 0.02,
    "Y": 0.03, "C": 0.01,
}

PROFILE_LENGTH = 219
PROFILE_PHYLA = [
    "Arthropoda", "Chordata", "Mollusca", "Annelida", "Echinodermata",
    "Cnidaria", "Nematoda", "Platyhelminthes", "Porifera", "Bryozoa",
    "Rotifera", "Tardigrada",
]


def write_genetic_codes() -> None:
    rows = ["table\tcodon\tamino_acid\tis_start"]
    for name, (aas, starts) in NCBI_TABLES.items():
        i = 0
        for b1 in BASES:
            for b2 in BASES:
                for b3 in BASES:
                    codon = b1 + b2 + b3
                    rows.append(f"{name}\t{codon}\t{aas[i]}\t{'1' if starts[i] == 'M' else '0'}")
                    i += 1
    path = ROOT / "seq" / "data" / "genetic_codes.tsv"
    path.write_text("\n".join(rows) + "\n")
    print(f"wrote {path}")


def weighted_residue(rng: random.Random) -> str:
    r = rng.random()
    acc = 0.0
    for aa, w in COI_COMPOSITION.items():
        acc += w
        if r < acc:
            return aa
    return "L"


def make_canonical_protein(rng: random.Random) -> str:
    return "".join(weighted_residue(rng) for _ in range(PROFILE_LENGTH))


def mutate_protein(rng: random.Random, protein: str, rate: float) -> str:
    out = []
    for aa in protein:
        if rng.random() < rate:
            sub = weighted_residue(rng)
            while sub == aa:
                sub = weighted_residue(rng)
            out.append(sub)
        else:
            out.append(aa)
    return "".join(out)


def write_profile_alignment() -> str:
    rng = random.Random(20240901)
    canonical = make_canonical_protein(rng)
    lines = []
    n_per_phylum = 5
    for phylum in PROFILE_PHYLA:
        for i in range(n_per_phylum):
            rate = rng.uniform(0.02, 0.15)
            member = mutate_protein(rng, canonical, rate)
            lines.append(f">COIPROF-{phylum}-{i + 1:02d}|{phylum}")
            lines.append(member)
    path = ROOT / "seq" / "data" / "coi_profile_alignment.fasta"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(PROFILE_PHYLA) * n_per_phylum} sequences)")
    return canonical


def reverse_translate(rng: random.Random, protein: str, table: str) -> str:
    aas, _ = NCBI_TABLES[table]
    codons_by_aa: dict[str, list[str]] = {}
    i = 0
    for b1 in BASES:
        for b2 in BASES:
            for b3 in BASES:
                codons_by_aa.setdefault(aas[i], []).append(b1 + b2 + b3)
                i += 1
    return "".join(rng.choice(codons_by_aa[aa]) for aa in protein)


def write_contaminants(canonical: str) -> None:
    rng = random.Random(77002)
    organisms = [
        ("CONT-HUMAN", "Homo sapiens"),
        ("CONT-MOUSE", "Mus musculus"),
        ("CONT-COW", "Bos taurus"),
        ("CONT-PIG", "Sus scrofa"),
        ("CONT-WOLBACHIA", "Wolbachia pipientis"),
        ("CONT-RICKETTSIA", "Rickettsia prowazekii"),
    ]
    lines = []
    for code, organism in organisms:
        protein = mutate_protein(rng, canonical, rng.uniform(0.20, 0.30))
        nt = reverse_translate(rng, protein, "invertebrate_mitochondrial")
        lines.append(f">{code}|{organism}|COI-5P")
        lines.append(nt)
    path = ROOT / "validation" / "data" / "contaminants.fasta"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def main() -> None:
    write_genetic_codes()
    canonical = write_profile_alignment()
    write_contaminants(canonical)


if __name__ == "__main__":
    main()
