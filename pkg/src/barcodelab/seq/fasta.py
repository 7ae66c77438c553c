"""FASTA parsing with the platform's strict defline grammar.

Deflines start with '>' followed by a record identifier (ProcessID or
SampleID).  Anything after the first '|' is free text and is preserved
verbatim.  Sequence lines may be wrapped; whitespace is stripped.
"""

from __future__ import annotations

from dataclasses import dataclass

from barcodelab.errors import EmptySequence, InvalidCharacter, MalformedDefline

IUPAC_NUCLEOTIDES = frozenset("ACGTURYSWKMBDHVN-")
UNAMBIGUOUS = frozenset("ACGT")


def normalize_nucleotides(seq_id: str, raw: str) -> str:
    """Uppercase and validate a nucleotide string against the IUPAC alphabet."""
    seq = raw.upper()
    for pos, ch in enumerate(seq):
        if ch not in IUPAC_NUCLEOTIDES:
            raise InvalidCharacter(seq_id, pos, ch)
    return seq


@dataclass(frozen=True)
class FastaEntry:
    id: str
    extra: str
    sequence: str


def parse_fasta(text: str) -> list[FastaEntry]:
    """Parse FASTA text into entries, enforcing the defline grammar.

    Raises MalformedDefline, EmptySequence, or InvalidCharacter.
    """
    entries: list[FastaEntry] = []
    current_id: str | None = None
    current_extra = ""
    chunks: list[str] = []
    pending = False

    def flush() -> None:
        nonlocal pending
        if current_id is None:
            return
        seq = "".join(chunks)
        if not seq:
            raise EmptySequence(current_id)
        entries.append(FastaEntry(current_id, current_extra, normalize_nucleotides(current_id, seq)))
        pending = False

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(">"):
            flush()
            defline = stripped[1:]
            if "|" in defline:
                head, _, extra = defline.partition("|")
            else:
                head, extra = defline, ""
            head = head.strip()
            if not head or any(c.isspace() for c in head):
                raise MalformedDefline(line_no, repr(stripped))
            current_id = head
            current_extra = extra
            chunks = []
            pending = True
        else:
            if current_id is None:
                raise MalformedDefline(line_no, "sequence data before first defline")
            chunks.append("".join(stripped.split()))
    flush()
    return entries


def render_fasta(entries: list[FastaEntry], width: int = 60) -> str:
    """Render entries in canonical form: one defline, wrapped sequence lines."""
    out: list[str] = []
    for e in entries:
        defline = f">{e.id}"
        if e.extra:
            defline += f"|{e.extra}"
        out.append(defline)
        for i in range(0, len(e.sequence), width):
            out.append(e.sequence[i : i + width])
    return "\n".join(out) + "\n"
