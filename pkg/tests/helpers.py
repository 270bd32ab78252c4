from __future__ import annotations

from verseattr.corpus import VerseLine
from verseattr.features import Segment
from verseattr.prosody import StressPattern


def make_line(
    text: str,
    *,
    play: str = "p1",
    act: int = 1,
    scene: int = 1,
    index: int = 1,
    stress: str | None = None,
) -> VerseLine:
    pattern = StressPattern(stress) if stress is not None else None
    return VerseLine.make(play, act, scene, index, text, pattern)


def make_segment(
    texts,
    *,
    stresses=None,
    label: str | None = None,
    play: str = "p1",
    ref: tuple[str, int, int] = ("scene", 1, 1),
) -> Segment:
    if stresses is None:
        stresses = [None] * len(texts)
    lines = tuple(
        make_line(text, play=play, index=i + 1, stress=stress)
        for i, (text, stress) in enumerate(zip(texts, stresses))
    )
    return Segment(lines=lines, label=label, play_id=play, ref=ref)
