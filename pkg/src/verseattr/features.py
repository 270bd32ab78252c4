"""Most-frequent-word and most-frequent-rhythmic-type features.

Segments (scenes or line windows) become relative-frequency vectors over
vocabularies induced from training segments only. Word counts are normalized
by the segment's token total, rhythmic-type counts by its number of
stress-annotated lines; the two blocks are normalized independently and
concatenated in combined mode. Normalizing within the segment keeps short
windows and whole scenes on the same scale.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Corpus, VerseLine
from .prosody import rhythmic_type
from .validation import check_fitted

MODES = ("words", "rhythm", "combined")


@dataclass(frozen=True, eq=False)
class Segment:
    """A unit of classification: an ordered run of verse lines.

    ``play_id`` and ``ref`` record provenance: ref is ("scene", act, scene)
    or ("window", first_line, last_line). Leakage checks use these to assert
    that no training segment came from a held-out play.
    """

    lines: tuple[VerseLine, ...]
    label: str | None
    play_id: str
    ref: tuple[str, int, int]

    def __post_init__(self) -> None:
        if not self.lines:
            raise ValueError("a segment must contain at least one line")
        if len(self.ref) != 3 or self.ref[0] not in ("scene", "window"):
            raise ValueError(f"segment ref must be ('scene'|'window', a, b), got {self.ref!r}")

    @cached_property
    def token_counts(self) -> Counter:
        counts: Counter = Counter()
        for line in self.lines:
            counts.update(line.tokens)
        return counts

    @cached_property
    def token_total(self) -> int:
        return sum(len(line.tokens) for line in self.lines)

    @cached_property
    def rhythm_counts(self) -> Counter:
        return Counter(
            rhythmic_type(line.stress) for line in self.lines if line.stress is not None
        )

    @cached_property
    def annotated_lines(self) -> int:
        return sum(1 for line in self.lines if line.stress is not None)


def scene_segment(play_id: str, act: int, scene: int, lines, label) -> Segment:
    return Segment(lines=tuple(lines), label=label, play_id=play_id, ref=("scene", act, scene))


def window_segment(play_id: str, start: int, end: int, lines) -> Segment:
    return Segment(lines=tuple(lines), label=None, play_id=play_id, ref=("window", start, end))


def segment_scenes(corpus: Corpus, min_lines: int) -> list[Segment]:
    """One labeled segment per scene with at least min_lines lines, corpus order."""
    segments = []
    for play in corpus.plays:
        for scene in play.scenes:
            if len(scene.lines) < min_lines:
                continue
            label = scene.author_label if scene.author_label is not None else play.author_label
            segments.append(scene_segment(play.play_id, scene.act, scene.scene, scene.lines, label))
    return segments


@dataclass(frozen=True)
class FeatureSpec:
    """Induced vocabularies: which words/rhythmic types make up the vector."""

    words: tuple[str, ...]
    rhythm_types: tuple[str, ...]
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate entries in word list")
        if len(set(self.rhythm_types)) != len(self.rhythm_types):
            raise ValueError("duplicate entries in rhythmic-type list")

    @property
    def dim(self) -> int:
        return len(self.words) + len(self.rhythm_types)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f"w:{w}" for w in self.words) + tuple(f"r:{t}" for t in self.rhythm_types)


def _top_k(counts: Counter, k: int) -> tuple[str, ...]:
    # frequency descending, ties lexicographic ascending
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return tuple(key for key, _ in ranked[:k])


def build_feature_spec(
    train: Sequence[Segment],
    top_words: int = 500,
    top_rhythms: int = 500,
    mode: str = "combined",
) -> FeatureSpec:
    """Induce the top-k vocabularies from training segments.

    If fewer distinct items exist the lists (and the vector dimension)
    shrink accordingly.
    """
    if not train:
        raise ValueError("cannot induce a feature spec from an empty training set")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if top_words < 1 or top_rhythms < 1:
        raise ValueError("top_words and top_rhythms must be >= 1")
    words: tuple[str, ...] = ()
    rhythms: tuple[str, ...] = ()
    if mode in ("words", "combined"):
        word_counts: Counter = Counter()
        for seg in train:
            word_counts.update(seg.token_counts)
        words = _top_k(word_counts, top_words)
    if mode in ("rhythm", "combined"):
        rhythm_counts: Counter = Counter()
        for seg in train:
            rhythm_counts.update(seg.rhythm_counts)
        rhythms = _top_k(rhythm_counts, top_rhythms)
    return FeatureSpec(words=words, rhythm_types=rhythms, mode=mode)


def vectorize(segment: Segment, spec: FeatureSpec) -> np.ndarray:
    """Relative-frequency vector of one segment under a spec.

    Word entry i is count(words[i]) / total tokens; rhythm entry j is
    count(lines of type j) / annotated lines. A zero denominator yields an
    all-zero block.
    """
    parts = []
    if spec.words:
        block = np.zeros(len(spec.words))
        total = segment.token_total
        if total:
            counts = segment.token_counts
            for i, word in enumerate(spec.words):
                c = counts.get(word)
                if c:
                    block[i] = c / total
        parts.append(block)
    if spec.rhythm_types:
        block = np.zeros(len(spec.rhythm_types))
        denom = segment.annotated_lines
        if denom:
            counts = segment.rhythm_counts
            for j, key in enumerate(spec.rhythm_types):
                c = counts.get(key)
                if c:
                    block[j] = c / denom
        parts.append(block)
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)


def vectorize_segments(segments: Iterable[Segment], spec: FeatureSpec) -> np.ndarray:
    rows = [vectorize(seg, spec) for seg in segments]
    if not rows:
        return np.zeros((0, spec.dim))
    return np.vstack(rows)


class MostFrequentVectorizer(BaseEstimator, TransformerMixin):
    """Transformer over segments: fit induces vocabularies, transform vectorizes.

    Parameters
    ----------
    top_words : int, number of most frequent word types to keep.
    top_rhythms : int, number of most frequent rhythmic types to keep.
    mode : 'words', 'rhythm', or 'combined'.
    """

    def __init__(self, top_words: int = 500, top_rhythms: int = 500, mode: str = "combined"):
        self.top_words = top_words
        self.top_rhythms = top_rhythms
        self.mode = mode

    def fit(self, segments: Sequence[Segment], y=None) -> "MostFrequentVectorizer":
        self.spec_ = build_feature_spec(segments, self.top_words, self.top_rhythms, self.mode)
        return self

    def transform(self, segments: Iterable[Segment]) -> np.ndarray:
        check_fitted(self, "spec_")
        return vectorize_segments(segments, self.spec_)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_fitted(self, "spec_")
        return np.asarray(self.spec_.feature_names, dtype=object)
