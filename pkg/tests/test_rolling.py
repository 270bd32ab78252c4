from __future__ import annotations

import numpy as np
import pytest

from verseattr.corpus import Corpus
from verseattr.crossval import iteration_rng
from verseattr.rolling import (
    GroupResult,
    RollingConfig,
    RollingResult,
    enumerate_windows,
    group_spans,
    misattribution_rate,
    rolling_attribute,
    windows_containing,
)
from verseattr.synth import contrasting_profiles, generate_mixed_play, generate_play, synthetic_corpus


def while_loop_windows(n, k, d):
    """Oracle: literal enumeration of i = 0, d, 2d, ... while i < n - k."""
    spans = []
    i = 0
    while i < n - k:
        spans.append((i + 1, i + k))
        i += d
    return spans


class TestEnumerateWindows:
    def test_paper_default_geometry(self):
        spans = enumerate_windows(200, 100, 5)
        assert spans == while_loop_windows(200, 100, 5)
        assert len(spans) == 20
        assert spans[0] == (1, 100)
        assert spans[1] == (6, 105)
        assert spans[-1] == (96, 195)

    def test_single_window_when_step_overshoots(self):
        assert enumerate_windows(101, 100, 5) == [(1, 100)]

    def test_all_windows_have_length_k(self):
        for start, end in enumerate_windows(137, 40, 7):
            assert end - start + 1 == 40

    def test_brute_force_sweep_small(self):
        for n in range(2, 61):
            for k in range(1, n):
                for d in range(1, k + 1):
                    assert enumerate_windows(n, k, d) == while_loop_windows(n, k, d)

    def test_window_count_formula(self):
        # ceil((n-k)/d) when d does not divide n-k, else (n-k)/d
        for n in range(2, 80):
            for k in range(1, n):
                for d in range(1, k + 1):
                    m = n - k
                    expected = m // d if m % d == 0 else -(-m // d)
                    assert len(enumerate_windows(n, k, d)) == expected

    @pytest.mark.parametrize(
        "n,k,d,constraint",
        [(100, 100, 5, "k < n"), (100, 0, 1, "k >= 1"), (100, 10, 0, "d >= 1"), (100, 10, 11, "d <= k")],
    )
    def test_violated_constraints_named(self, n, k, d, constraint):
        with pytest.raises(ValueError, match=constraint.replace("<", "<").replace(">", ">")):
            enumerate_windows(n, k, d)


class TestGroupCoverage:
    def test_interior_group_covered_by_k_over_d_windows(self):
        windows = enumerate_windows(300, 100, 5)
        spans = group_spans(300, 5)
        counts = [len(windows_containing(g, windows)) for g in spans]
        # ramp up over the first k/d - 1 groups, constant interior, ramp down
        assert counts[:20] == [min(j + 1, 20) for j in range(20)]
        assert set(counts[19:40]) == {20}
        assert counts[-1] == 0  # the group ending at line n is never contained
        tail = counts[40:-1]
        assert tail == sorted(tail, reverse=True)

    def test_coverage_unimodal_many_geometries(self):
        for n, k, d in [(150, 40, 5), (123, 30, 7), (90, 50, 10), (64, 20, 4)]:
            windows = enumerate_windows(n, k, d)
            counts = [len(windows_containing(g, windows)) for g in group_spans(n, d)]
            peak = max(counts)
            rising = True
            seen_fall = False
            for prev, cur in zip(counts, counts[1:]):
                if cur > prev:
                    assert not seen_fall, f"coverage not unimodal for {(n, k, d)}: {counts}"
                elif cur < prev:
                    seen_fall = True
            assert peak >= 1

    def test_group_spans_partition_lines(self):
        for n, d in [(600, 5), (37, 5), (10, 3), (7, 7)]:
            spans = group_spans(n, d)
            covered = [line for start, end in spans for line in range(start, end + 1)]
            assert covered == list(range(1, n + 1))


def fake_result(probs: list[dict[str, float]], authors=("anne", "bea")) -> RollingResult:
    groups = tuple(
        GroupResult(group_index=i + 1, line_span=(i * 5 + 1, i * 5 + 5), mean_prob=p, n_classifications=600)
        for i, p in enumerate(probs)
    )
    return RollingResult(
        target_play="t",
        authors=tuple(authors),
        positive_author=authors[0],
        k=100,
        d=5,
        iterations=30,
        mode="combined",
        groups=groups,
        uncovered_group_indices=(),
    )


class TestMisattributionRate:
    def test_paper_arithmetic(self):
        probs = [{"anne": 0.9, "bea": 0.1}] * 4402 + [{"anne": 0.2, "bea": 0.8}] * 10
        result = fake_result(probs)
        truth = ["anne"] * 4412
        rate = misattribution_rate(result, truth)
        assert rate == pytest.approx(10 / 4412)
        assert 1.0 - rate == pytest.approx(0.9977, abs=1e-4)

    def test_zero_and_total_error(self):
        result = fake_result([{"anne": 0.7, "bea": 0.3}] * 5)
        assert misattribution_rate(result, ["anne"] * 5) == 0.0
        assert misattribution_rate(result, ["bea"] * 5) == 1.0

    def test_length_mismatch_rejected(self):
        result = fake_result([{"anne": 0.7, "bea": 0.3}] * 5)
        with pytest.raises(ValueError, match="labels"):
            misattribution_rate(result, ["anne"] * 4)

    def test_tie_goes_to_lexicographically_first(self):
        result = fake_result([{"anne": 0.5, "bea": 0.5}])
        assert result.predicted_authors() == ["anne"]


class TestSignedCurve:
    def test_probabilities_and_signs(self):
        result = fake_result([{"anne": 0.8, "bea": 0.2}, {"anne": 0.3, "bea": 0.7}])
        curve = result.signed_curve()
        assert curve[0] == pytest.approx((0.8, -0.2, 0.3))
        assert curve[1] == pytest.approx((0.3, -0.7, -0.2))

    def test_gap_is_always_one_for_two_authors(self):
        result = fake_result([{"anne": p, "bea": 1 - p} for p in (0.1, 0.5, 0.9)])
        for p_pos, neg, _ in result.signed_curve():
            assert p_pos - neg == pytest.approx(1.0)

    def test_positive_author_override(self):
        result = fake_result([{"anne": 0.8, "bea": 0.2}])
        flipped = fake_result([{"anne": 0.8, "bea": 0.2}], authors=("anne", "bea"))
        assert flipped.signed_curve()[0][0] == pytest.approx(0.8)
        from dataclasses import replace

        swapped = replace(result, positive_author="bea")
        assert swapped.signed_curve()[0] == pytest.approx((0.2, -0.8, -0.3))

    def test_three_author_curve_rejected(self):
        result = RollingResult(
            target_play="t",
            authors=("a", "b", "c"),
            positive_author="a",
            k=100,
            d=5,
            iterations=30,
            mode="combined",
            groups=(),
            uncovered_group_indices=(),
        )
        with pytest.raises(ValueError, match="two authors"):
            result.signed_curve()


@pytest.fixture(scope="module")
def rolling_setup():
    pa, pb = contrasting_profiles(separation=0.8)
    base = synthetic_corpus({"anne": pa, "bea": pb}, 4, 10, 14, seed=3)
    mixed, truth = generate_mixed_play(
        pa, pb, [301], 600, iteration_rng(99, "mix", 0), play_id="mix", author_a="anne", author_b="bea"
    )
    return Corpus(plays=base.plays + (mixed,)), truth


FAST_ROLLING = dict(iterations=3, top_words=80, top_rhythms=10, min_lines=5, tol=1e-3)


class TestRollingAttribute:
    def test_planted_switch_recovered(self, rolling_setup):
        corpus, truth = rolling_setup
        cfg = RollingConfig(k=100, d=5, master_seed=17, **FAST_ROLLING)
        result = rolling_attribute(corpus, "mix", cfg)
        group_truth = [truth[g.line_span[0] - 1] for g in result.groups]
        assert misattribution_rate(result, group_truth) <= 0.03
        # the signed average crosses zero within 2d lines of the true switch
        crossings = []
        curve = result.signed_curve()
        for (g1, (_, _, a1)), (g2, (_, _, a2)) in zip(
            zip(result.groups, curve), zip(result.groups[1:], curve[1:])
        ):
            if a1 > 0 >= a2 or a1 < 0 <= a2:
                crossings.append(g2.line_span[0])
        assert len(crossings) == 1
        assert abs(crossings[0] - 301) <= 2 * cfg.d

    def test_interior_groups_classified_iterations_times_k_over_d(self, rolling_setup):
        corpus, _ = rolling_setup
        cfg = RollingConfig(k=100, d=5, master_seed=17, **FAST_ROLLING)
        result = rolling_attribute(corpus, "mix", cfg)
        interior = [g for g in result.groups if 20 <= g.group_index <= 100]
        assert {g.n_classifications for g in interior} == {cfg.iterations * (cfg.k // cfg.d)}

    def test_group_means_are_distributions(self, rolling_setup):
        corpus, _ = rolling_setup
        cfg = RollingConfig(k=100, d=5, master_seed=17, **FAST_ROLLING)
        result = rolling_attribute(corpus, "mix", cfg)
        for group in result.groups:
            values = list(group.mean_prob.values())
            assert all(0.0 <= v <= 1.0 for v in values)
            assert sum(values) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_and_jobs_invariant(self, rolling_setup):
        corpus, _ = rolling_setup
        cfg = RollingConfig(k=100, d=5, master_seed=17, **dict(FAST_ROLLING, iterations=2))
        one = rolling_attribute(corpus, "mix", cfg, jobs=1)
        two = rolling_attribute(corpus, "mix", cfg, jobs=3)
        assert one == two

    def test_homogeneous_target_strongly_attributed(self):
        pa, pb = contrasting_profiles(separation=0.8)
        base = synthetic_corpus({"anne": pa, "bea": pb}, 3, 10, 14, seed=6)
        target = generate_play(pa, 1, 400, iteration_rng(1, "solo", 0), play_id="solo", author="anne")
        from dataclasses import replace

        target = replace(
            target,
            author_label=None,
            scenes=tuple(replace(s, author_label=None) for s in target.scenes),
        )
        corpus = Corpus(plays=base.plays + (target,))
        cfg = RollingConfig(k=100, d=5, master_seed=2, **FAST_ROLLING)
        result = rolling_attribute(corpus, "solo", cfg)
        share = np.mean([g.mean_prob["anne"] > 0.5 for g in result.groups])
        assert share >= 0.99

    def test_k_not_smaller_than_n_rejected(self, rolling_setup):
        corpus, _ = rolling_setup
        cfg = RollingConfig(k=600, d=5, master_seed=0, **FAST_ROLLING)
        with pytest.raises(ValueError, match="k < n"):
            rolling_attribute(corpus, "mix", cfg)

    def test_uncovered_trailing_group_reported(self, rolling_setup):
        corpus, _ = rolling_setup
        cfg = RollingConfig(k=100, d=5, master_seed=17, **dict(FAST_ROLLING, iterations=1))
        result = rolling_attribute(corpus, "mix", cfg)
        assert result.uncovered_group_indices == (120,)
        assert result.groups[-1].group_index == 119


class TestRollingConfig:
    def test_step_larger_than_window_rejected(self):
        with pytest.raises(ValueError, match="d <= k"):
            RollingConfig(k=10, d=11)

    def test_defaults_match_method_parameters(self):
        cfg = RollingConfig()
        assert cfg.k == 100 and cfg.d == 5 and cfg.iterations == 30
