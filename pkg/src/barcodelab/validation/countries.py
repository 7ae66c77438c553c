"""Country name registry with alias normalization and typo suggestions."""

from __future__ import annotations

from importlib import resources


def damerau_levenshtein(a: str, b: str, cap: int = 3) -> int:
    """Edit distance with transpositions, early-capped for speed."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    prev2: list[int] | None = None
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and ca == b[j - 2] and a[i - 2] == cb:
                cur[j] = min(cur[j], prev2[j - 2] + cost)
        if min(cur) > cap:
            return cap + 1
        prev2, prev = prev, cur
    return prev[-1]


class CountryRegistry:
    def __init__(self) -> None:
        self._canonical: dict[str, str] = {}  # lowercase name/alias -> canonical name
        self._codes: dict[str, str] = {}

    @classmethod
    def load_bundled(cls) -> "CountryRegistry":
        reg = cls()
        text = resources.files("barcodelab.validation").joinpath("data/countries.tsv").read_text()
        for line in text.splitlines()[1:]:
            if not line.strip():
                continue
            name, code, aliases = (line.split("\t") + ["", ""])[:3]
            reg.add(name, code, [a for a in aliases.split("|") if a])
        return reg

    def add(self, name: str, code: str, aliases: list | None = None) -> None:
        self._canonical[name.lower()] = name
        self._codes[name] = code
        for alias in aliases or []:
            self._canonical[alias.lower()] = name

    def normalize(self, raw: str) -> str | None:
        return self._canonical.get(raw.strip().lower())

    def code_of(self, name: str) -> str | None:
        return self._codes.get(name)

    def names(self) -> list:
        return sorted(self._codes)

    def suggest(self, raw: str, max_distance: int = 2) -> str | None:
        """Closest registered country within the distance budget."""
        raw_l = raw.strip().lower()
        best: tuple[int, str] | None = None
        for key, canonical in self._canonical.items():
            d = damerau_levenshtein(raw_l, key, cap=max_distance)
            if d <= max_distance and (best is None or d < best[0]):
                best = (d, canonical)
        return best[1] if best else None
