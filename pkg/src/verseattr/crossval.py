"""Leave-one-play-out evaluation and scene attribution with vote tables.

Every scene of a held-out play is classified by models trained on the
remaining plays; training samples are leveled per author by random
subsampling and the whole process repeats for a configured number of
iterations, accumulating hard votes per scene. Per-iteration randomness is
keyed by (master seed, play id, iteration) so results do not depend on the
order or parallelism of the runs.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .features import FeatureSpec, Segment, build_feature_spec, segment_scenes, vectorize_segments
from .svm import CalibratedAuthorClassifier

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class EvalConfig:
    iterations: int = 30
    top_words: int = 500
    top_rhythms: int = 500
    mode: str = "combined"
    C: float = 1.0
    tol: float = 1e-4
    max_passes: int = 10_000
    calibration_folds: int = 3
    min_lines: int = 10
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.min_lines < 1:
            raise ValueError(f"min_lines must be >= 1, got {self.min_lines}")


def iteration_rng(master_seed: int, play_id: str, iteration: int) -> np.random.Generator:
    """Independent RNG stream per (seed, play, iteration); adding plays never
    perturbs another play's draws."""
    play_key = int.from_bytes(hashlib.sha256(play_id.encode("utf-8")).digest()[:8], "little")
    seq = np.random.SeedSequence([master_seed & _SEED_MASK, play_key, iteration])
    return np.random.default_rng(seq)


def balance_classes(segments: Sequence[Segment], rng: np.random.Generator) -> list[Segment]:
    """Level per-author sample counts by uniform subsampling without replacement.

    Every author is reduced to the smallest per-author count; the surviving
    segments keep their original order.
    """
    by_author: dict[str, list[int]] = {}
    for i, seg in enumerate(segments):
        if seg.label is None:
            raise ValueError(f"unlabeled segment in training pool: {seg.play_id} {seg.ref}")
        by_author.setdefault(seg.label, []).append(i)
    if not by_author:
        raise ValueError("empty training pool")
    minimum = min(len(v) for v in by_author.values())
    keep: set[int] = set()
    for author in sorted(by_author):
        indices = by_author[author]
        chosen = rng.choice(len(indices), size=minimum, replace=False)
        keep.update(indices[j] for j in chosen)
    return [segments[i] for i in sorted(keep)]


def train_iteration(
    pool: Sequence[Segment], cfg: EvalConfig, rng: np.random.Generator
) -> tuple[CalibratedAuthorClassifier, FeatureSpec]:
    """One ensemble member: balance, induce features, train a calibrated model."""
    balanced = balance_classes(pool, rng)
    spec = build_feature_spec(balanced, cfg.top_words, cfg.top_rhythms, cfg.mode)
    X = vectorize_segments(balanced, spec)
    y = np.array([seg.label for seg in balanced], dtype=object)
    clf = CalibratedAuthorClassifier(
        C=cfg.C,
        tol=cfg.tol,
        max_passes=cfg.max_passes,
        calibration_folds=cfg.calibration_folds,
        random_state=rng,
    ).fit(X, y)
    return clf, spec


SceneKey = tuple[str, int, int]  # (play_id, act, scene)


@dataclass
class VoteTable:
    """Hard classification votes per scene over all iterations."""

    mode: str
    iterations: int
    authors: tuple[str, ...]
    rows: dict[SceneKey, dict[str, int]] = field(default_factory=dict)
    truth: dict[SceneKey, str | None] = field(default_factory=dict)
    play_accuracy: dict[str, float] = field(default_factory=dict)

    def merge_votes(self, keys: Sequence[SceneKey], votes: np.ndarray) -> None:
        for row, key in enumerate(keys):
            counts = self.rows.setdefault(key, {a: 0 for a in self.authors})
            for col, author in enumerate(self.authors):
                counts[author] += int(votes[row, col])


def _scene_key(segment: Segment) -> SceneKey:
    return (segment.play_id, segment.ref[1], segment.ref[2])


def _vote_chunk(
    pool: Sequence[Segment],
    tests: Sequence[Segment],
    authors: tuple[str, ...],
    play_id: str,
    cfg: EvalConfig,
    iterations: Sequence[int],
) -> np.ndarray:
    """Votes matrix (n_test x n_authors) accumulated over the given iterations."""
    votes = np.zeros((len(tests), len(authors)), dtype=np.int64)
    column = {author: i for i, author in enumerate(authors)}
    for iteration in iterations:
        rng = iteration_rng(cfg.master_seed, play_id, iteration)
        clf, spec = train_iteration(pool, cfg, rng)
        predictions = clf.predict(vectorize_segments(tests, spec))
        for row, label in enumerate(predictions):
            votes[row, column[label]] += 1
    return votes


def _iteration_chunks(n_iterations: int, jobs: int) -> list[list[int]]:
    chunk = max(1, -(-n_iterations // max(jobs, 1)))
    ids = list(range(n_iterations))
    return [ids[i : i + chunk] for i in range(0, n_iterations, chunk)]


def _attribute_play(
    pool: Sequence[Segment],
    tests: Sequence[Segment],
    authors: tuple[str, ...],
    play_id: str,
    cfg: EvalConfig,
    jobs: int,
    executor: ProcessPoolExecutor | None,
) -> np.ndarray:
    if executor is None or jobs <= 1:
        return _vote_chunk(pool, tests, authors, play_id, cfg, range(cfg.iterations))
    futures = [
        executor.submit(_vote_chunk, pool, tests, authors, play_id, cfg, chunk)
        for chunk in _iteration_chunks(cfg.iterations, jobs)
    ]
    votes = np.zeros((len(tests), len(authors)), dtype=np.int64)
    for future in futures:  # fixed order; vote sums commute anyway
        votes += future.result()
    return votes


def _check_pool_authors(pool: Sequence[Segment], required: set[str], excluded_play: str) -> None:
    present = {seg.label for seg in pool}
    missing = sorted(required - present)
    if missing:
        raise ValueError(
            f"author(s) {', '.join(missing)} have no scenes left after excluding "
            f"play {excluded_play!r}"
        )


def leave_one_play_out(corpus: Corpus, cfg: EvalConfig, jobs: int = 1) -> VoteTable:
    """Classify each labeled play's scenes with models trained on the rest."""
    segments = segment_scenes(corpus, cfg.min_lines)
    labeled = [seg for seg in segments if seg.label is not None]
    labeled_plays = [p.play_id for p in corpus.plays if p.author_label is not None]
    if len(labeled_plays) < 2:
        raise ValueError("leave-one-play-out needs at least 2 labeled plays")
    authors = tuple(sorted({seg.label for seg in labeled}))
    if len(authors) < 2:
        raise ValueError("leave-one-play-out needs at least 2 authors")

    table = VoteTable(mode=cfg.mode, iterations=cfg.iterations, authors=authors)
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for play_id in labeled_plays:
            tests = [seg for seg in segments if seg.play_id == play_id]
            if not tests:
                continue
            pool = [seg for seg in labeled if seg.play_id != play_id]
            _check_pool_authors(pool, set(authors), play_id)
            votes = _attribute_play(pool, tests, authors, play_id, cfg, jobs, executor)
            keys = [_scene_key(seg) for seg in tests]
            table.merge_votes(keys, votes)
            for key, seg in zip(keys, tests):
                table.truth[key] = seg.label
            correct = sum(
                votes[row, authors.index(seg.label)]
                for row, seg in enumerate(tests)
                if seg.label in authors
            )
            table.play_accuracy[play_id] = correct / (len(tests) * cfg.iterations)
    finally:
        if executor is not None:
            executor.shutdown()
    return table


def attribute_scenes(
    corpus: Corpus, target_play: str, cfg: EvalConfig, jobs: int = 1
) -> VoteTable:
    """Classify one play's scenes with models trained on all other labeled plays."""
    target = corpus.play(target_play)  # raises KeyError if absent
    segments = segment_scenes(corpus, cfg.min_lines)
    pool = [seg for seg in segments if seg.label is not None and seg.play_id != target_play]
    authors = tuple(sorted({seg.label for seg in pool}))
    if len(authors) < 2:
        raise ValueError("attribution needs at least 2 authors among the other labeled plays")
    tests = [seg for seg in segments if seg.play_id == target_play]

    table = VoteTable(mode=cfg.mode, iterations=cfg.iterations, authors=authors)
    if not tests:
        return table
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        votes = _attribute_play(pool, tests, authors, target_play, cfg, jobs, executor)
    finally:
        if executor is not None:
            executor.shutdown()
    keys = [_scene_key(seg) for seg in tests]
    table.merge_votes(keys, votes)
    for key, seg in zip(keys, tests):
        table.truth[key] = seg.label
    if target.author_label is not None and target.author_label in authors:
        correct = sum(
            votes[row, authors.index(seg.label)]
            for row, seg in enumerate(tests)
            if seg.label in authors
        )
        table.play_accuracy[target_play] = correct / (len(tests) * cfg.iterations)
    return table
