"""Synthetic corpora with controllable author profiles and planted switches.

Generated plays give the evaluation and rolling pipelines something with
known ground truth: tokens are drawn i.i.d. from a per-author word
distribution and each line carries a stress pattern drawn from a per-author
rhythm distribution. No syntax, no metrical well-formedness; bag-of-words
and bag-of-rhythms features cannot tell the difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus, Play, Scene, VerseLine, tokenize
from .prosody import StressPattern
from .validation import as_rng


@dataclass(frozen=True, eq=False)
class AuthorProfile:
    """Word and rhythm distributions plus a line-length range (tokens per line)."""

    vocabulary: Mapping[str, float]
    rhythms: Mapping[str, float]
    line_length: tuple[int, int] = (6, 9)

    def __post_init__(self) -> None:
        if not self.vocabulary or not self.rhythms:
            raise ValueError("profile distributions must be nonempty")
        for word, weight in self.vocabulary.items():
            if not (weight > 0 and np.isfinite(weight)):
                raise ValueError(f"vocabulary weight for {word!r} must be positive and finite")
            if tokenize(word) != (word,):
                raise ValueError(f"vocabulary entry {word!r} does not survive tokenization")
        for pattern, weight in self.rhythms.items():
            if not (weight > 0 and np.isfinite(weight)):
                raise ValueError(f"rhythm weight for {pattern!r} must be positive and finite")
            StressPattern(pattern)  # validates the key
        lo, hi = self.line_length
        if not (1 <= lo <= hi):
            raise ValueError(f"line_length range must satisfy 1 <= lo <= hi, got {self.line_length}")

    @cached_property
    def _words(self) -> tuple[np.ndarray, np.ndarray]:
        items = sorted(self.vocabulary.items())
        words = np.array([w for w, _ in items], dtype=object)
        weights = np.array([float(v) for _, v in items])
        return words, weights / weights.sum()

    @cached_property
    def _patterns(self) -> tuple[np.ndarray, np.ndarray]:
        items = sorted(self.rhythms.items())
        patterns = np.array([p for p, _ in items], dtype=object)
        weights = np.array([float(v) for _, v in items])
        return patterns, weights / weights.sum()

    def sample_line_text(self, rng: np.random.Generator) -> tuple[str, str]:
        lo, hi = self.line_length
        n = int(rng.integers(lo, hi + 1))
        words, probs = self._words
        tokens = rng.choice(words, size=n, p=probs)
        patterns, pattern_probs = self._patterns
        pattern = str(rng.choice(patterns, p=pattern_probs))
        return " ".join(tokens), pattern


def interpolate_profiles(a: AuthorProfile, b: AuthorProfile, t: float) -> AuthorProfile:
    """Mix two profiles: t=0 gives a, t=1 gives b.

    The dial makes attribution tasks harder as profiles approach each other.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"mixing coefficient must be in [0, 1], got {t}")

    def mix(left: Mapping[str, float], right: Mapping[str, float]) -> dict[str, float]:
        left_total = sum(left.values())
        right_total = sum(right.values())
        support = sorted(set(left) | set(right))
        mixed = {
            key: (1.0 - t) * left.get(key, 0.0) / left_total + t * right.get(key, 0.0) / right_total
            for key in support
        }
        return {k: v for k, v in mixed.items() if v > 0.0}

    lo = round((1.0 - t) * a.line_length[0] + t * b.line_length[0])
    hi = round((1.0 - t) * a.line_length[1] + t * b.line_length[1])
    return AuthorProfile(
        vocabulary=mix(a.vocabulary, b.vocabulary),
        rhythms=mix(a.rhythms, b.rhythms),
        line_length=(lo, hi),
    )


def generate_play(
    profile: AuthorProfile,
    scenes: int,
    lines_per_scene: int,
    rng,
    *,
    play_id: str,
    author: str,
) -> Play:
    """A fully labeled play: `scenes` scenes of `lines_per_scene` lines each."""
    if scenes < 1 or lines_per_scene < 1:
        raise ValueError("scenes and lines_per_scene must be >= 1")
    rng = as_rng(rng)
    built = []
    index = 0
    for s in range(1, scenes + 1):
        lines = []
        for _ in range(lines_per_scene):
            index += 1
            text, pattern = profile.sample_line_text(rng)
            lines.append(VerseLine.make(play_id, 1, s, index, text, StressPattern(pattern)))
        built.append(Scene(act=1, scene=s, lines=tuple(lines), author_label=author))
    return Play(play_id=play_id, scenes=tuple(built), author_label=author)


def generate_mixed_play(
    profile_a: AuthorProfile,
    profile_b: AuthorProfile,
    switch_lines: Sequence[int],
    total_lines: int,
    rng,
    *,
    play_id: str,
    author_a: str = "A",
    author_b: str = "B",
) -> tuple[Play, tuple[str, ...]]:
    """Alternating authorship starting with profile_a; switches at the given lines.

    A switch at line s means s is the first line of the next segment. Returns
    the play (author label unknown) and the per-line truth labels.
    """
    if total_lines < 1:
        raise ValueError("total_lines must be >= 1")
    previous = 1
    for s in switch_lines:
        if not 1 < s <= total_lines:
            raise ValueError(f"switch line {s} outside (1, {total_lines}]")
        if not previous < s:
            raise ValueError(f"switch lines must be strictly ascending, got {list(switch_lines)}")
        previous = s
    rng = as_rng(rng)
    profiles = (profile_a, profile_b)
    names = (author_a, author_b)
    switches = set(switch_lines)
    truth: list[str] = []
    lines: list[VerseLine] = []
    current = 0
    for index in range(1, total_lines + 1):
        if index in switches:
            current = 1 - current
        text, pattern = profiles[current].sample_line_text(rng)
        lines.append(VerseLine.make(play_id, 1, 1, index, text, StressPattern(pattern)))
        truth.append(names[current])
    scene = Scene(act=1, scene=1, lines=tuple(lines), author_label=None)
    return Play(play_id=play_id, scenes=(scene,), author_label=None), tuple(truth)


_ONSETS = "b c d f g h l m n p r s t v w br cl dr fl gr pl st tr".split()
_NUCLEI = "a e i o u ai ea ou".split()
_CODAS = ["n", "r", "l", "s", "t", "nd", "rt", "ss"]

_CORE_WORDS = (
    "the and to of a in that is you my it not his me with "
    "be your for he this but have as thou him so will what her no"
).split()


def _pseudo_words(prefix: str, count: int) -> list[str]:
    words = []
    i = 0
    while len(words) < count:
        onset = _ONSETS[i % len(_ONSETS)]
        nucleus = _NUCLEI[(i // len(_ONSETS)) % len(_NUCLEI)]
        coda = _CODAS[(i // (len(_ONSETS) * len(_NUCLEI))) % len(_CODAS)]
        words.append(prefix + onset + nucleus + coda)
        i += 1
    return words


def contrasting_profiles(
    separation: float = 1.0,
    n_core: int = 30,
    n_content: int = 60,
    line_length: tuple[int, int] = (6, 9),
) -> tuple[AuthorProfile, AuthorProfile]:
    """A deterministic pair of author profiles for experiments.

    Both share a Zipf-weighted function-word core; each has its own content
    vocabulary and rhythm preferences. ``separation`` = 1 keeps the content
    vocabularies disjoint; lower values cross-mix the full distributions,
    down to identical profiles at 0.
    """
    if not 0.0 <= separation <= 1.0:
        raise ValueError(f"separation must be in [0, 1], got {separation}")
    core = {w: 40.0 / (r + 1) for r, w in enumerate(_CORE_WORDS[:n_core])}

    def content(words: list[str]) -> dict[str, float]:
        return {w: 10.0 / (r + 2) for r, w in enumerate(words)}

    vocab_a = dict(core)
    vocab_a.update(content(_pseudo_words("a", n_content)))
    vocab_b = dict(core)
    vocab_b.update(content(_pseudo_words("o", n_content)))

    rhythms_a = {"0101010101": 6.0, "0101010110": 2.0, "00101010101": 1.5, "0101010100": 0.5}
    rhythms_b = {"1010101010": 6.0, "1010101001": 2.0, "10101010101": 1.5, "0101010101": 0.5}

    pure_a = AuthorProfile(vocab_a, rhythms_a, line_length)
    pure_b = AuthorProfile(vocab_b, rhythms_b, line_length)
    mix = (1.0 - separation) / 2.0
    if mix == 0.0:
        return pure_a, pure_b
    return (
        interpolate_profiles(pure_a, pure_b, mix),
        interpolate_profiles(pure_b, pure_a, mix),
    )


def synthetic_corpus(
    profiles: Mapping[str, AuthorProfile],
    plays_per_author: int,
    scenes_per_play: int,
    lines_per_scene: int,
    seed: int,
) -> Corpus:
    """Labeled corpus of pure-author plays, deterministic in the seed."""
    from .crossval import iteration_rng  # per-play seed keying shared with the evaluator

    plays = []
    for author in sorted(profiles):
        for p in range(plays_per_author):
            play_id = f"{author}-{p + 1}"
            plays.append(
                generate_play(
                    profiles[author],
                    scenes_per_play,
                    lines_per_scene,
                    iteration_rng(seed, play_id, 0),
                    play_id=play_id,
                    author=author,
                )
            )
    return Corpus(plays=tuple(plays))


# --- profile/config file ---------------------------------------------------
#
# JSON schema:
# {
#   "seed": 1,
#   "authors": {
#     "anne": {"vocabulary": {"word": weight, ...},
#              "rhythms": {"0101010101": weight, ...},
#              "line_length": [6, 9]},
#     ...
#   },
#   "plays": [
#     {"play_id": "anne-1", "author": "anne", "scenes": 4, "lines_per_scene": 40},
#     {"play_id": "mix", "authors": ["anne", "bea"],
#      "switch_lines": [301], "total_lines": 600}
#   ]
# }


@dataclass(frozen=True)
class SynthesisPlan:
    profiles: Mapping[str, AuthorProfile]
    plays: tuple[Mapping, ...]
    seed: int


def _profile_from_dict(name: str, raw: Mapping) -> AuthorProfile:
    try:
        vocabulary = {str(w): float(v) for w, v in raw["vocabulary"].items()}
        rhythms = {str(p): float(v) for p, v in raw["rhythms"].items()}
    except (KeyError, AttributeError, TypeError, ValueError) as exc:
        raise ValueError(f"author {name!r}: invalid profile ({exc})") from None
    length = raw.get("line_length", (6, 9))
    return AuthorProfile(vocabulary, rhythms, (int(length[0]), int(length[1])))


def load_synthesis_plan(raw: Mapping) -> SynthesisPlan:
    if "authors" not in raw or "plays" not in raw:
        raise ValueError("profile config needs 'authors' and 'plays' sections")
    profiles = {name: _profile_from_dict(name, spec) for name, spec in raw["authors"].items()}
    plays = tuple(raw["plays"])
    for spec in plays:
        if "play_id" not in spec:
            raise ValueError(f"play spec without play_id: {spec}")
        if "author" in spec:
            if spec["author"] not in profiles:
                raise ValueError(f"play {spec['play_id']!r} names unknown author {spec['author']!r}")
        elif "authors" in spec:
            unknown = [a for a in spec["authors"] if a not in profiles]
            if unknown or len(spec["authors"]) != 2:
                raise ValueError(f"play {spec['play_id']!r} needs exactly 2 known authors")
            if "switch_lines" not in spec or "total_lines" not in spec:
                raise ValueError(f"mixed play {spec['play_id']!r} needs switch_lines and total_lines")
        else:
            raise ValueError(f"play {spec['play_id']!r} names no author(s)")
    return SynthesisPlan(profiles=profiles, plays=plays, seed=int(raw.get("seed", 0)))


def synthesize(plan: SynthesisPlan) -> tuple[Corpus, dict[str, tuple[str, ...]]]:
    """Build the corpus described by a plan; per-play RNG streams keep the
    output independent of play order. Returns (corpus, per-line truth for
    mixed plays)."""
    from .crossval import iteration_rng  # seed keying shared with the evaluator

    plays = []
    truths: dict[str, tuple[str, ...]] = {}
    for spec in plan.plays:
        play_id = str(spec["play_id"])
        rng = iteration_rng(plan.seed, play_id, 0)
        if "author" in spec:
            plays.append(
                generate_play(
                    plan.profiles[spec["author"]],
                    int(spec.get("scenes", 1)),
                    int(spec.get("lines_per_scene", 30)),
                    rng,
                    play_id=play_id,
                    author=str(spec["author"]),
                )
            )
        else:
            first, second = spec["authors"]
            play, truth = generate_mixed_play(
                plan.profiles[first],
                plan.profiles[second],
                [int(s) for s in spec["switch_lines"]],
                int(spec["total_lines"]),
                rng,
                play_id=play_id,
                author_a=str(first),
                author_b=str(second),
            )
            plays.append(play)
            truths[play_id] = truth
    return Corpus(plays=tuple(plays)), truths
