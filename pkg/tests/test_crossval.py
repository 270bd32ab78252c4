from __future__ import annotations

import numpy as np
import pytest

from verseattr.corpus import Corpus
from verseattr.crossval import (
    EvalConfig,
    attribute_scenes,
    balance_classes,
    iteration_rng,
    leave_one_play_out,
    train_iteration,
)
from verseattr.synth import contrasting_profiles, generate_play, synthetic_corpus

from helpers import make_segment

FAST = dict(iterations=2, top_words=60, top_rhythms=10, min_lines=5, tol=1e-3)


def labeled_pool(counts: dict[str, int]):
    segments = []
    for author, n in counts.items():
        for i in range(n):
            segments.append(
                make_segment(
                    [f"{author} text {i}"] * 3,
                    label=author,
                    play=f"{author}-play",
                    ref=("scene", 1, i),
                )
            )
    return segments


class TestBalanceClasses:
    def test_levels_to_minimum(self):
        pool = labeled_pool({"shak": 53, "flet": 90, "mass": 46})
        balanced = balance_classes(pool, np.random.default_rng(0))
        counts = {a: sum(1 for s in balanced if s.label == a) for a in ("shak", "flet", "mass")}
        assert counts == {"shak": 46, "flet": 46, "mass": 46}

    def test_already_balanced_is_identity(self):
        pool = labeled_pool({"a": 4, "b": 4})
        balanced = balance_classes(pool, np.random.default_rng(1))
        assert balanced == pool

    def test_order_preserved(self):
        pool = labeled_pool({"a": 10, "b": 3})
        balanced = balance_classes(pool, np.random.default_rng(2))
        positions = [pool.index(seg) for seg in balanced]
        assert positions == sorted(positions)

    def test_unlabeled_segment_rejected(self):
        with pytest.raises(ValueError, match="unlabeled"):
            balance_classes([make_segment(["x"], label=None)], np.random.default_rng(0))

    def test_inclusion_frequencies_are_uniform(self):
        # Monte-Carlo: each of 6 'b' segments kept with probability 2/6
        pool = labeled_pool({"a": 2, "b": 6})
        runs = 10_000
        kept = np.zeros(6)
        for seed in range(runs):
            balanced = balance_classes(pool, np.random.default_rng(seed))
            for seg in balanced:
                if seg.label == "b":
                    kept[seg.ref[2]] += 1
        p = 2 / 6
        sigma = (p * (1 - p) / runs) ** 0.5
        assert np.all(np.abs(kept / runs - p) < 3 * sigma + 0.005)


class TestIterationRng:
    def test_streams_are_reproducible_and_distinct(self):
        a1 = iteration_rng(7, "playx", 3).integers(0, 1 << 30, 4)
        a2 = iteration_rng(7, "playx", 3).integers(0, 1 << 30, 4)
        b = iteration_rng(7, "playx", 4).integers(0, 1 << 30, 4)
        c = iteration_rng(7, "playy", 3).integers(0, 1 << 30, 4)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)
        assert not np.array_equal(a1, c)


@pytest.fixture(scope="module")
def disjoint_corpus() -> Corpus:
    # two authors with fully disjoint content vocabularies, 4 plays each
    pa, pb = contrasting_profiles(separation=1.0)
    return synthetic_corpus({"anne": pa, "bea": pb}, 4, 8, 10, seed=2)


def rule_based_author(scene_lines, marker_words) -> str:
    tokens = {t for line in scene_lines for t in line.tokens}
    return "anne" if tokens & marker_words else "bea"


class TestLeaveOnePlayOut:
    def test_disjoint_vocabularies_classified_perfectly(self, disjoint_corpus):
        cfg = EvalConfig(**FAST)
        table = leave_one_play_out(disjoint_corpus, cfg)
        assert set(table.play_accuracy) == {p.play_id for p in disjoint_corpus.plays}
        assert all(acc == 1.0 for acc in table.play_accuracy.values())
        # the one-word oracle agrees with the plays' labels, so the pipeline matched it
        pa, pb = contrasting_profiles(separation=1.0)
        markers = set(pa.vocabulary) - set(pb.vocabulary)
        for play in disjoint_corpus.plays:
            for scene in play.scenes:
                assert rule_based_author(scene.lines, markers) == play.author_label

    def test_votes_sum_to_iterations(self, disjoint_corpus):
        cfg = EvalConfig(**FAST)
        table = leave_one_play_out(disjoint_corpus, cfg)
        for key, votes in table.rows.items():
            assert sum(votes.values()) == cfg.iterations

    def test_single_iteration_votes_are_indicator_rows(self, disjoint_corpus):
        cfg = EvalConfig(**dict(FAST, iterations=1))
        table = leave_one_play_out(disjoint_corpus, cfg)
        for votes in table.rows.values():
            assert sorted(votes.values()) == [0, 1]

    def test_reproducible(self, disjoint_corpus):
        cfg = EvalConfig(**FAST)
        one = leave_one_play_out(disjoint_corpus, cfg)
        two = leave_one_play_out(disjoint_corpus, cfg)
        assert one.rows == two.rows
        assert one.play_accuracy == two.play_accuracy

    def test_needs_two_labeled_plays(self):
        pa, _ = contrasting_profiles()
        single = Corpus(
            plays=(generate_play(pa, 2, 8, np.random.default_rng(0), play_id="p", author="a"),)
        )
        with pytest.raises(ValueError, match="2 labeled plays"):
            leave_one_play_out(single, EvalConfig(**FAST))

    def test_missing_author_after_exclusion_errors(self):
        pa, pb = contrasting_profiles()
        plays = (
            generate_play(pa, 3, 8, np.random.default_rng(0), play_id="a-only", author="anne"),
            generate_play(pb, 3, 8, np.random.default_rng(1), play_id="b-1", author="bea"),
            generate_play(pb, 3, 8, np.random.default_rng(2), play_id="b-2", author="bea"),
        )
        with pytest.raises(ValueError, match="no scenes left"):
            leave_one_play_out(Corpus(plays=plays), EvalConfig(**FAST))


class TestNoLeakage:
    def test_training_pool_never_contains_target_play(self, disjoint_corpus, monkeypatch):
        import verseattr.crossval as crossval

        seen: list[tuple[str, set[str]]] = []
        original = crossval._vote_chunk

        def spy(pool, tests, authors, play_id, cfg, iterations):
            seen.append((play_id, {seg.play_id for seg in pool}))
            return original(pool, tests, authors, play_id, cfg, iterations)

        monkeypatch.setattr(crossval, "_vote_chunk", spy)
        leave_one_play_out(disjoint_corpus, EvalConfig(**dict(FAST, iterations=1)))
        assert seen
        for target, pool_plays in seen:
            assert target not in pool_plays


class TestAttributeScenes:
    def test_unknown_target_rejected(self, disjoint_corpus):
        with pytest.raises(KeyError):
            attribute_scenes(disjoint_corpus, "nope", EvalConfig(**FAST))

    def test_planted_target_majority_voted_correctly(self):
        pa, pb = contrasting_profiles(separation=1.0)
        corpus = synthetic_corpus({"anne": pa, "bea": pb}, 2, 6, 10, seed=8)
        target = generate_play(
            pa, 5, 10, np.random.default_rng(123), play_id="mystery", author="anne"
        )
        # strip the label: the pipeline must not rely on it
        from dataclasses import replace

        scenes = tuple(replace(s, author_label=None) for s in target.scenes)
        corpus = Corpus(plays=corpus.plays + (replace(target, scenes=scenes, author_label=None),))
        cfg = EvalConfig(**dict(FAST, iterations=3))
        table = attribute_scenes(corpus, "mystery", cfg)
        assert len(table.rows) == 5
        for votes in table.rows.values():
            assert votes["anne"] > votes["bea"]
        assert table.play_accuracy == {}  # unlabeled target has no accuracy row

    def test_short_scenes_absent_from_table(self):
        # target mixes 12-line and 4-line scenes; only the long ones are classified
        pa, pb = contrasting_profiles(separation=1.0)
        base = synthetic_corpus({"anne": pa, "bea": pb}, 2, 4, 12, seed=5)
        rng = np.random.default_rng(9)
        long_part = generate_play(pa, 2, 12, rng, play_id="tgt", author="anne")
        short_part = generate_play(pa, 2, 4, rng, play_id="tgt", author="anne")
        from dataclasses import replace

        scenes = long_part.scenes + tuple(
            replace(s, scene=s.scene + 2) for s in short_part.scenes
        )
        target = replace(long_part, scenes=scenes)
        corpus = Corpus(plays=base.plays + (target,))
        cfg = EvalConfig(**dict(FAST, iterations=1, min_lines=10))
        table = attribute_scenes(corpus, "tgt", cfg)
        assert set(table.rows) == {("tgt", 1, 1), ("tgt", 1, 2)}

    def test_jobs_do_not_change_results(self, disjoint_corpus):
        cfg = EvalConfig(**FAST)
        first = disjoint_corpus.plays[0].play_id
        serial = attribute_scenes(disjoint_corpus, first, cfg, jobs=1)
        parallel = attribute_scenes(disjoint_corpus, first, cfg, jobs=2)
        assert serial.rows == parallel.rows


def test_train_iteration_uses_balanced_pool():
    pool = labeled_pool({"a": 6, "b": 2})
    cfg = EvalConfig(iterations=1, top_words=10, top_rhythms=5, min_lines=1)
    clf, spec = train_iteration(pool, cfg, np.random.default_rng(3))
    assert tuple(clf.classes_) == ("a", "b")
    assert spec.mode == "combined"
