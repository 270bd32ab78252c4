"""Stress annotation for verse lines.

A line's rhythmic identity is the string of stressed (1) / unstressed (0)
syllables, one bit per syllable. Patterns come either precomputed from the
corpus file or from a flat pronunciation lexicon applied token by token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

MAX_SYLLABLES = 32

_BITS_RE = re.compile(r"[01]{1,%d}$" % MAX_SYLLABLES)
_VOWEL_RUN_RE = re.compile(r"[aeiouy]+")

#: A rhythmic type is the pattern rendered as a '0'/'1' key string.
RhythmicType = str


@dataclass(frozen=True)
class StressPattern:
    """Per-syllable stress of one verse line, as a string over {'0', '1'}."""

    bits: str

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValueError("stress pattern must have at least one syllable")
        if len(self.bits) > MAX_SYLLABLES:
            raise ValueError(
                f"stress pattern of {len(self.bits)} syllables exceeds the "
                f"{MAX_SYLLABLES}-syllable limit"
            )
        bad = set(self.bits) - {"0", "1"}
        if bad:
            raise ValueError(f"stress pattern contains non-bit characters: {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.bits)


def rhythmic_type(pattern: StressPattern) -> RhythmicType:
    """Render a stress pattern as its rhythmic-type key.

    The mapping is a bijection: distinct patterns give distinct keys, and the
    key length equals the syllable count.
    """
    return pattern.bits


def estimate_syllables(token: str) -> int:
    """Crude syllable count: number of vowel-letter runs, at least 1.

    Used only to decide whether an out-of-lexicon token is a monosyllable
    (assumed stressed) or a polysyllable (unknown stress). Not a
    grapheme-to-phoneme model.
    """
    return max(1, len(_VOWEL_RUN_RE.findall(token)))


@dataclass(frozen=True)
class StressLexicon:
    """Flat token -> stress-bits lexicon plus a set of unstressed function words.

    Function words are monosyllables always realized unstressed; in the TSV
    form they are ordinary entries with stress bits ``0``.
    """

    entries: Mapping[str, str]
    function_words: frozenset[str] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        for token, bits in self.entries.items():
            if not _BITS_RE.match(bits):
                raise ValueError(f"lexicon entry {token!r} has invalid stress bits {bits!r}")
        if self.function_words is None:
            words = frozenset(t for t, b in self.entries.items() if b == "0")
            object.__setattr__(self, "function_words", words)

    @classmethod
    def from_tsv(cls, lines: Iterable[str], *, source: str = "<lexicon>") -> "StressLexicon":
        """Parse ``token<TAB>stress_bits`` lines; '#' comments and blanks skipped."""
        entries: dict[str, str] = {}
        for line_no, raw in enumerate(lines, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{source}:{line_no}: expected 2 tab-separated fields, got {len(parts)}")
            token, bits = parts[0].strip().lower(), parts[1].strip()
            if not token:
                raise ValueError(f"{source}:{line_no}: empty token")
            if token in entries:
                raise ValueError(f"{source}:{line_no}: duplicate lexicon entry {token!r}")
            if not _BITS_RE.match(bits):
                raise ValueError(f"{source}:{line_no}: invalid stress bits {bits!r} for {token!r}")
            entries[token] = bits
        return cls(entries=entries)

    @classmethod
    def load(cls, path: str | Path) -> "StressLexicon":
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            return cls.from_tsv(fh, source=str(path))


def annotate_line(tokens: Iterable[str], lexicon: StressLexicon) -> StressPattern | None:
    """Concatenate per-token stress into a line pattern.

    Per token: lexicon entry if present; function-word monosyllables are
    unstressed; other monosyllables missing from the lexicon default to
    stressed; a missing polysyllable makes the whole line unknown (``None``),
    which excludes it from rhythmic features without being an error.
    """
    tokens = list(tokens)
    if not tokens:
        raise ValueError("annotate_line requires at least one token")
    parts: list[str] = []
    total = 0
    for token in tokens:
        bits = lexicon.entries.get(token)
        if bits is None:
            if token in lexicon.function_words:
                bits = "0"
            elif estimate_syllables(token) == 1:
                bits = "1"
            else:
                return None
        total += len(bits)
        if total > MAX_SYLLABLES:
            raise ValueError(
                f"line exceeds {MAX_SYLLABLES} syllables at token {token!r}; "
                "not a plausible verse line"
            )
        parts.append(bits)
    return StressPattern("".join(parts))
