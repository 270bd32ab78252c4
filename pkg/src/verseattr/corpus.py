"""Document model and the tab-separated corpus file format.

One record per verse line, seven tab-separated columns:

    play_id<TAB>author<TAB>act<TAB>scene<TAB>line_index<TAB>text<TAB>stress

``author`` is a label or ``?`` for unknown; ``stress`` is a '0'/'1' bit
string or ``-`` for unannotated. Lines starting with ``#`` are comments.
Fields may not contain tabs; there is no quoting. Line indices within a play
must run 1, 2, 3, ... in file order. Prologue/epilogue conventionally map to
act 0, scenes 0 and 99.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .prosody import StressLexicon, StressPattern, annotate_line

N_COLUMNS = 7

# Lowercased maximal runs of letters, internal apostrophes retained
# (elisions like "ta'en" stay single tokens). Digits and punctuation separate.
_TOKEN_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")


class CorpusFormatError(ValueError):
    """Malformed corpus input; message carries source location."""

    def __init__(self, message: str, *, source: str = "<corpus>", line_no: int | None = None):
        prefix = source if line_no is None else f"{source}:{line_no}"
        super().__init__(f"{prefix}: {message}")
        self.source = source
        self.line_no = line_no


def tokenize(text: str) -> tuple[str, ...]:
    """Split text into lowercase word tokens. Deterministic; '' gives ()."""
    return tuple(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class VerseLine:
    play_id: str
    act: int
    scene: int
    index_in_play: int
    text: str
    tokens: tuple[str, ...]
    stress: StressPattern | None = None

    @classmethod
    def make(
        cls,
        play_id: str,
        act: int,
        scene: int,
        index_in_play: int,
        text: str,
        stress: StressPattern | None = None,
    ) -> "VerseLine":
        return cls(play_id, act, scene, index_in_play, text, tokenize(text), stress)


@dataclass(frozen=True)
class Scene:
    act: int
    scene: int
    lines: tuple[VerseLine, ...]
    author_label: str | None = None

    def __post_init__(self) -> None:
        if not self.lines:
            raise ValueError("a scene must contain at least one line")
        play_ids = {line.play_id for line in self.lines}
        if len(play_ids) > 1:
            raise ValueError(f"scene mixes lines from plays {sorted(play_ids)}")


@dataclass(frozen=True)
class Play:
    play_id: str
    scenes: tuple[Scene, ...]
    author_label: str | None = None

    def __post_init__(self) -> None:
        keys = [(s.act, s.scene) for s in self.scenes]
        if len(keys) != len(set(keys)):
            raise ValueError(f"play {self.play_id!r} has duplicate (act, scene) pairs")

    @property
    def lines(self) -> Iterator[VerseLine]:
        for scene in self.scenes:
            yield from scene.lines

    @property
    def n_lines(self) -> int:
        return sum(len(s.lines) for s in self.scenes)


@dataclass(frozen=True)
class Corpus:
    plays: tuple[Play, ...]

    @property
    def authors(self) -> frozenset[str]:
        labels = {p.author_label for p in self.plays} | {
            s.author_label for p in self.plays for s in p.scenes
        }
        labels.discard(None)
        return frozenset(labels)  # type: ignore[arg-type]

    def play(self, play_id: str) -> Play:
        for p in self.plays:
            if p.play_id == play_id:
                return p
        raise KeyError(f"no play with id {play_id!r}")


def _derive_label(labels: Iterable[str | None]) -> str | None:
    distinct = set(labels)
    if len(distinct) == 1:
        return next(iter(distinct))
    return None


class _PlayAccumulator:
    """Groups a play's records into scenes, enforcing ordering invariants."""

    def __init__(self, play_id: str):
        self.play_id = play_id
        self.last_index = 0
        self.closed: set[tuple[int, int]] = set()
        self.open_key: tuple[int, int] | None = None
        self.open_lines: list[VerseLine] = []
        self.open_labels: list[str | None] = []
        self.scenes: list[Scene] = []

    def add(
        self,
        line: VerseLine,
        author: str | None,
        *,
        source: str,
        line_no: int,
    ) -> None:
        if line.index_in_play != self.last_index + 1:
            kind = "duplicate or non-contiguous" if line.index_in_play <= self.last_index else "non-contiguous"
            raise CorpusFormatError(
                f"play {self.play_id!r}: {kind} line_index {line.index_in_play} "
                f"(expected {self.last_index + 1})",
                source=source,
                line_no=line_no,
            )
        self.last_index = line.index_in_play
        key = (line.act, line.scene)
        if key != self.open_key:
            self._close()
            if key in self.closed:
                raise CorpusFormatError(
                    f"play {self.play_id!r}: scene {key[0]}.{key[1]} appears twice",
                    source=source,
                    line_no=line_no,
                )
            self.open_key = key
        self.open_lines.append(line)
        self.open_labels.append(author)

    def _close(self) -> None:
        if self.open_key is not None:
            self.closed.add(self.open_key)
            self.scenes.append(
                Scene(
                    act=self.open_key[0],
                    scene=self.open_key[1],
                    lines=tuple(self.open_lines),
                    author_label=_derive_label(self.open_labels),
                )
            )
            self.open_key = None
            self.open_lines = []
            self.open_labels = []

    def finish(self) -> Play:
        self._close()
        return Play(
            play_id=self.play_id,
            scenes=tuple(self.scenes),
            author_label=_derive_label(s.author_label for s in self.scenes),
        )


def _parse_int(value: str, column: str, minimum: int, *, source: str, line_no: int) -> int:
    try:
        number = int(value)
    except ValueError:
        raise CorpusFormatError(
            f"column {column!r} must be an integer, got {value!r}", source=source, line_no=line_no
        ) from None
    if number < minimum:
        raise CorpusFormatError(
            f"column {column!r} must be >= {minimum}, got {number}", source=source, line_no=line_no
        )
    return number


def _parse_stress(value: str, *, source: str, line_no: int) -> StressPattern | None:
    if value == "-":
        return None
    try:
        return StressPattern(value)
    except ValueError as exc:
        raise CorpusFormatError(f"column 'stress': {exc}", source=source, line_no=line_no) from None


def parse_corpus(source_lines: Iterable[str] | str, *, source: str = "<corpus>") -> Corpus:
    """Parse corpus TSV records into a Corpus, in file order.

    Raises CorpusFormatError naming the offending line for malformed records,
    duplicate or non-contiguous line indices, and invalid stress strings.
    """
    if isinstance(source_lines, str):
        source_lines = source_lines.splitlines()
    accumulators: dict[str, _PlayAccumulator] = {}
    for line_no, raw in enumerate(source_lines, start=1):
        record = raw.rstrip("\n")
        if not record.strip() or record.startswith("#"):
            continue
        fields = record.split("\t")
        if len(fields) != N_COLUMNS:
            raise CorpusFormatError(
                f"expected {N_COLUMNS} tab-separated columns, got {len(fields)}",
                source=source,
                line_no=line_no,
            )
        play_id, author, act_s, scene_s, index_s, text, stress_s = fields
        if not play_id:
            raise CorpusFormatError("empty play_id", source=source, line_no=line_no)
        act = _parse_int(act_s, "act", 0, source=source, line_no=line_no)
        scene = _parse_int(scene_s, "scene", 0, source=source, line_no=line_no)
        index = _parse_int(index_s, "line_index", 1, source=source, line_no=line_no)
        stress = _parse_stress(stress_s, source=source, line_no=line_no)
        line = VerseLine.make(play_id, act, scene, index, text, stress)
        acc = accumulators.get(play_id)
        if acc is None:
            acc = accumulators[play_id] = _PlayAccumulator(play_id)
        acc.add(line, None if author == "?" else author, source=source, line_no=line_no)
    return Corpus(plays=tuple(acc.finish() for acc in accumulators.values()))


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_corpus(fh, source=str(path))


def serialize_corpus(corpus: Corpus) -> str:
    """Render a Corpus back to the TSV format; parse(serialize(c)) == c."""
    rows: list[str] = []
    for play in corpus.plays:
        if play.play_id.startswith("#") or "\t" in play.play_id or "\n" in play.play_id:
            raise ValueError(f"play_id {play.play_id!r} is not serializable")
        for scene in play.scenes:
            author = scene.author_label or play.author_label or "?"
            if "\t" in author or "\n" in author:
                raise ValueError(f"author label {author!r} is not serializable")
            for line in scene.lines:
                if "\t" in line.text or "\n" in line.text:
                    raise ValueError(f"line text may not contain tabs or newlines: {line.text!r}")
                stress = line.stress.bits if line.stress is not None else "-"
                rows.append(
                    "\t".join(
                        (
                            play.play_id,
                            author,
                            str(line.act),
                            str(line.scene),
                            str(line.index_in_play),
                            line.text,
                            stress,
                        )
                    )
                )
    return "\n".join(rows) + ("\n" if rows else "")


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def annotate_corpus(corpus: Corpus, lexicon: StressLexicon) -> Corpus:
    """Fill missing stress annotations from a lexicon where derivable.

    Existing annotations are kept; lines the lexicon cannot scan stay
    unannotated. Returns a new Corpus.
    """
    plays = []
    for play in corpus.plays:
        scenes = []
        for scene in play.scenes:
            lines = []
            for line in scene.lines:
                if line.stress is None and line.tokens:
                    pattern = annotate_line(line.tokens, lexicon)
                    if pattern is not None:
                        line = dataclasses.replace(line, stress=pattern)
                lines.append(line)
            scenes.append(dataclasses.replace(scene, lines=tuple(lines)))
        plays.append(dataclasses.replace(play, scenes=tuple(scenes)))
    return Corpus(plays=tuple(plays))


@dataclass(frozen=True)
class ValidationReport:
    """Report-only findings from validate_corpus."""

    excluded_scenes: tuple[tuple[str, int, int, int], ...]  # (play, act, scene, n_lines)
    unlabeled_plays: tuple[str, ...]
    unannotated_lines: int
    total_lines: int

    def format(self) -> str:
        out = []
        if self.excluded_scenes:
            out.append("excluded scenes (below line threshold):")
            for play_id, act, scene, n in self.excluded_scenes:
                out.append(f"  {play_id} {act}.{scene}: {n} lines")
        else:
            out.append("excluded scenes: none")
        if self.unlabeled_plays:
            out.append("unlabeled plays: " + ", ".join(self.unlabeled_plays))
        else:
            out.append("unlabeled plays: none")
        out.append(f"lines without stress annotation: {self.unannotated_lines} of {self.total_lines}")
        return "\n".join(out)


def validate_corpus(corpus: Corpus, min_lines: int) -> ValidationReport:
    """Flag scenes below the line threshold, unlabeled plays, unannotated lines."""
    if min_lines < 1:
        raise ValueError(f"min_lines must be >= 1, got {min_lines}")
    excluded = []
    unlabeled = []
    unannotated = 0
    total = 0
    for play in corpus.plays:
        if play.author_label is None:
            unlabeled.append(play.play_id)
        for scene in play.scenes:
            if len(scene.lines) < min_lines:
                excluded.append((play.play_id, scene.act, scene.scene, len(scene.lines)))
            for line in scene.lines:
                total += 1
                if line.stress is None:
                    unannotated += 1
    return ValidationReport(
        excluded_scenes=tuple(excluded),
        unlabeled_plays=tuple(unlabeled),
        unannotated_lines=unannotated,
        total_lines=total,
    )
