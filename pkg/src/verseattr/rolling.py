"""Rolling attribution over overlapping fixed-length line windows.

A target play of n lines is segmented into windows of k lines starting at
line i+1 for i = 0, d, 2d, ... while i < n - k; every window is classified
by each of the ensemble's models and the resulting probability
distributions are averaged per aligned d-line group over all (window,
iteration) pairs whose window fully contains the group. Windows ignore
scene boundaries on purpose; that is what localizes authorship shifts.

Because window starts stop strictly below n - k, the group ending at line n
is never fully contained in any window; such groups are reported as
uncovered and carry no probabilities.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .crossval import EvalConfig, iteration_rng, train_iteration
from .features import Segment, segment_scenes, vectorize_segments, window_segment

Span = tuple[int, int]  # inclusive [first_line, last_line]


@dataclass(frozen=True)
class RollingConfig(EvalConfig):
    k: int = 100
    d: int = 5
    positive_author: str | None = None

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.k < 1:
            raise ValueError(f"window constraint violated: k >= 1 (k={self.k})")
        if self.d < 1:
            raise ValueError(f"window constraint violated: d >= 1 (d={self.d})")
        if self.d > self.k:
            raise ValueError(f"window constraint violated: d <= k (d={self.d}, k={self.k})")


def enumerate_windows(n: int, k: int, d: int) -> list[Span]:
    """Spans [i+1, i+k] for i = 0, d, 2d, ... while i < n - k.

    Raises on violated constraints (k >= 1, k < n, 1 <= d <= k), naming the
    inequality. When d >= n - k only i = 0 qualifies and a single window is
    returned.
    """
    if k < 1:
        raise ValueError(f"window constraint violated: k >= 1 (k={k})")
    if not k < n:
        raise ValueError(f"window constraint violated: k < n (k={k}, n={n})")
    if d < 1:
        raise ValueError(f"window constraint violated: d >= 1 (d={d})")
    if d > k:
        raise ValueError(f"window constraint violated: d <= k (d={d}, k={k})")
    return [(i + 1, i + k) for i in range(0, n - k, d)]


def group_spans(n: int, d: int) -> list[Span]:
    """Aligned runs of d lines starting at line 1; the last may be shorter."""
    return [(start, min(start + d - 1, n)) for start in range(1, n + 1, d)]


def windows_containing(group: Span, windows: Sequence[Span]) -> list[int]:
    g_start, g_end = group
    return [i for i, (w_start, w_end) in enumerate(windows) if w_start <= g_start and g_end <= w_end]


@dataclass(frozen=True)
class GroupResult:
    group_index: int  # 1-based over all d-line groups of the play
    line_span: Span
    mean_prob: Mapping[str, float]
    n_classifications: int


@dataclass(frozen=True)
class RollingResult:
    target_play: str
    authors: tuple[str, ...]
    positive_author: str
    k: int
    d: int
    iterations: int
    mode: str
    groups: tuple[GroupResult, ...]
    uncovered_group_indices: tuple[int, ...]

    @property
    def negative_author(self) -> str:
        if len(self.authors) != 2:
            raise ValueError("signed curves are defined for exactly two authors")
        other = [a for a in self.authors if a != self.positive_author]
        return other[0]

    def signed_curve(self) -> list[tuple[float, float, float]]:
        """Per group: (p(positive author), -p(negative author), their average)."""
        negative = self.negative_author
        curve = []
        for group in self.groups:
            p_pos = group.mean_prob[self.positive_author]
            p_neg = group.mean_prob[negative]
            curve.append((p_pos, -p_neg, (p_pos - p_neg) / 2.0))
        return curve

    def predicted_authors(self) -> list[str]:
        """Argmax of each group's mean distribution; ties go lexicographically first."""
        out = []
        for group in self.groups:
            best = min(group.mean_prob.items(), key=lambda item: (-item[1], item[0]))
            out.append(best[0])
        return out


def _probability_chunk(
    pool: Sequence[Segment],
    window_segments: Sequence[Segment],
    authors: tuple[str, ...],
    play_id: str,
    cfg: EvalConfig,
    iterations: Sequence[int],
) -> np.ndarray:
    """Sum of per-window probability rows over the given iterations."""
    total = np.zeros((len(window_segments), len(authors)))
    for iteration in iterations:
        rng = iteration_rng(cfg.master_seed, play_id, iteration)
        clf, spec = train_iteration(pool, cfg, rng)
        proba = clf.predict_proba(vectorize_segments(window_segments, spec))
        if tuple(clf.classes_) != authors:
            raise RuntimeError("model classes diverged from the candidate author set")
        total += proba
    return total


def rolling_attribute(
    corpus: Corpus, target_play: str, cfg: RollingConfig, jobs: int = 1
) -> RollingResult:
    """Authorship probability curve over a play's d-line groups."""
    target = corpus.play(target_play)
    lines = list(target.lines)
    n = len(lines)
    if n <= cfg.k:
        raise ValueError(
            f"window constraint violated: k < n (k={cfg.k}, n={n}); choose a smaller k"
        )
    windows = enumerate_windows(n, cfg.k, cfg.d)
    window_segments = [
        window_segment(target_play, start, end, lines[start - 1 : end]) for start, end in windows
    ]
    spans = group_spans(n, cfg.d)
    members = [windows_containing(span, windows) for span in spans]
    covered = [i for i, m in enumerate(members) if m]
    uncovered = tuple(i + 1 for i, m in enumerate(members) if not m)

    pool = [
        seg
        for seg in segment_scenes(corpus, cfg.min_lines)
        if seg.label is not None and seg.play_id != target_play
    ]
    authors = tuple(sorted({seg.label for seg in pool}))
    if len(authors) < 2:
        raise ValueError("rolling attribution needs at least 2 authors in the training pool")
    positive = cfg.positive_author if cfg.positive_author is not None else authors[0]
    if positive not in authors:
        raise ValueError(f"positive author {positive!r} not among candidates {list(authors)}")

    if jobs > 1:
        chunk = max(1, -(-cfg.iterations // jobs))
        chunks = [list(range(cfg.iterations))[i : i + chunk] for i in range(0, cfg.iterations, chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(
                    _probability_chunk, pool, window_segments, authors, target_play, cfg, c
                )
                for c in chunks
            ]
            window_sums = sum(future.result() for future in futures)
    else:
        window_sums = _probability_chunk(
            pool, window_segments, authors, target_play, cfg, range(cfg.iterations)
        )

    groups = []
    for index in covered:
        member = members[index]
        sums = window_sums[member].sum(axis=0)
        count = cfg.iterations * len(member)
        mean = sums / count
        groups.append(
            GroupResult(
                group_index=index + 1,
                line_span=spans[index],
                mean_prob={a: float(p) for a, p in zip(authors, mean)},
                n_classifications=count,
            )
        )
    return RollingResult(
        target_play=target_play,
        authors=authors,
        positive_author=positive,
        k=cfg.k,
        d=cfg.d,
        iterations=cfg.iterations,
        mode=cfg.mode,
        groups=tuple(groups),
        uncovered_group_indices=uncovered,
    )


def misattribution_rate(result: RollingResult, truth: Sequence[str]) -> float:
    """Fraction of groups whose argmax mean probability differs from the truth."""
    if len(truth) != len(result.groups):
        raise ValueError(
            f"truth has {len(truth)} labels for {len(result.groups)} classified groups"
        )
    predicted = result.predicted_authors()
    wrong = sum(1 for p, t in zip(predicted, truth) if p != t)
    return wrong / len(result.groups) if result.groups else 0.0
