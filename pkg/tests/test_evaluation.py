"""Metric layer: edit distance, relaxed matching, ranking scores, reports."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countqa.evaluation import (
    CountEvalReport,
    cnp_accuracy,
    count_metrics,
    format_count_report,
    format_instance_report,
    instance_metrics,
    instance_relevant,
    label_segments,
    levenshtein,
    normalized_distance,
    pc_tradeoff,
    proximity,
    relaxed_match,
)
from countqa.types import CnpLabel, GoldInstance

from oracles import (
    edit_distance_oracle,
    harmonic_mean_oracle,
    hit_at_k_oracle,
    precision_at_k_oracle,
    recall_at_k_oracle,
    reciprocal_rank_oracle,
)


class TestLevenshtein:
    def test_classic_cases(self):
        assert levenshtein("kitten", "sitting") == 3
        assert levenshtein("flaw", "lawn") == 2
        assert levenshtein("", "abc") == 3
        assert levenshtein("abc", "") == 3
        assert levenshtein("same", "same") == 0

    @given(st.text(max_size=12), st.text(max_size=12))
    @settings(max_examples=200)
    def test_matches_full_matrix_oracle(self, a, b):
        assert levenshtein(a, b) == edit_distance_oracle(a, b)

    @given(st.text(max_size=12), st.text(max_size=12))
    @settings(max_examples=100)
    def test_symmetric(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)


class TestNormalizedDistance:
    def test_two_empties_are_identical(self):
        assert normalized_distance("", "") == 0.0

    def test_divides_by_longer_side(self):
        assert normalized_distance("abcd", "") == 1.0
        assert normalized_distance("abcde", "abcdX") == pytest.approx(0.2)
        assert normalized_distance("ab", "abcd") == pytest.approx(0.5)


class TestInstanceRelevant:
    GOLD = GoldInstance("Haleakala", aliases=("Haleakalā", "East Maui Volcano"))

    def test_exact_and_casefolded(self):
        assert instance_relevant("Haleakala", self.GOLD)
        assert instance_relevant("haleakala", self.GOLD)
        assert instance_relevant("HALEAKALA", self.GOLD)

    def test_whitespace_normalized(self):
        assert instance_relevant("  East   Maui Volcano ", self.GOLD)

    def test_alias_rescues_spelling_variant(self):
        # one substitution over nine characters is 0.111, past the cutoff,
        # so the accented form only matches because it is listed as an alias
        assert normalized_distance("haleakala", "haleakalā") > 0.1
        assert instance_relevant("Haleakalā", self.GOLD)

    def test_cutoff_is_strict(self):
        gold = GoldInstance("abcdefghij")
        assert not instance_relevant("abcdefghiX", gold)  # 1/10 exactly
        long_gold = GoldInstance("abcdefghijk")
        assert instance_relevant("abcdefghijX", long_gold)  # 1/11 < 0.1

    def test_unrelated_name(self):
        assert not instance_relevant("Mauna Kea", self.GOLD)

    def test_empty_candidate_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            instance_relevant("   ", self.GOLD)


class TestRelaxedMatch:
    def test_anchor_pairs(self):
        assert relaxed_match(507, 503)
        assert not relaxed_match(234, 503)

    def test_bounds_inclusive(self):
        assert relaxed_match(90, 100)
        assert relaxed_match(110, 100)
        assert not relaxed_match(89.99, 100)
        assert not relaxed_match(110.01, 100)

    def test_float_edge_tolerated(self):
        # 0.9 * 70 is not exactly 63 in floats; the match must not flicker
        assert relaxed_match(63, 70)
        assert relaxed_match(77, 70)

    def test_gold_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            relaxed_match(5, 0)
        with pytest.raises(ValueError, match="positive"):
            relaxed_match(5, -3)

    @given(
        st.floats(min_value=1, max_value=1e6),
        st.floats(min_value=0.90, max_value=1.10),
    )
    @settings(max_examples=200)
    def test_ratio_inside_band_matches(self, gold, ratio):
        assert relaxed_match(gold * ratio, gold)


class TestProximity:
    def test_values(self):
        assert proximity(700, 700) == 1.0
        assert proximity(350, 700) == 0.5
        assert proximity(700, 350) == 0.5

    def test_positive_only(self):
        with pytest.raises(ValueError, match="positive"):
            proximity(0, 10)
        with pytest.raises(ValueError, match="positive"):
            proximity(10, -1)

    @given(st.floats(min_value=0.1, max_value=1e6),
           st.floats(min_value=0.1, max_value=1e6))
    @settings(max_examples=200)
    def test_symmetric_and_bounded(self, a, b):
        value = proximity(a, b)
        assert value == proximity(b, a)
        assert 0.0 < value <= 1.0


class TestPcTradeoff:
    @pytest.mark.parametrize("p, c, expected", [
        (37.7, 84.7, 52.2),
        (45.0, 96.1, 61.3),
        (93.2, 18.3, 30.6),
    ])
    def test_anchor_values(self, p, c, expected):
        assert pc_tradeoff(p, c) == pytest.approx(expected, abs=0.05)

    def test_degenerate_inputs(self):
        assert pc_tradeoff(0.0, 80.0) == 0.0
        assert pc_tradeoff(80.0, 0.0) == 0.0

    @given(st.floats(min_value=0, max_value=100),
           st.floats(min_value=0, max_value=100))
    @settings(max_examples=200)
    def test_matches_oracle(self, p, c):
        assert pc_tradeoff(p, c) == pytest.approx(harmonic_mean_oracle(p, c))


class TestCountMetrics:
    GOLDS = {"a": 100.0, "b": 200.0, "c": None, "d": 50.0}
    PREDS = {"a": 105.0, "b": 500.0, "c": 5.0}

    def test_worked_case(self):
        report = count_metrics(self.PREDS, self.GOLDS)
        assert report.total_queries == 4
        assert report.answered == 3
        assert report.coverage == 75.0
        # precision only over answered queries that have a gold count
        assert report.relaxed_precision == 50.0
        assert report.proximity == pytest.approx((100 / 105 + 200 / 500) / 2)
        assert report.pc == pytest.approx(pc_tradeoff(50.0, 75.0))

    def test_per_query_rows(self):
        rows = {r["id"]: r for r in count_metrics(self.PREDS, self.GOLDS).per_query}
        assert rows["a"]["matched"] is True
        assert rows["b"]["matched"] is False
        assert rows["c"]["matched"] is None and rows["c"]["predicted"] == 5.0
        assert rows["d"]["predicted"] is None and rows["d"]["matched"] is None

    def test_unanswered_gold_none_query(self):
        report = count_metrics({}, {"only": None})
        assert report.coverage == 0.0
        assert report.relaxed_precision == 0.0
        assert report.answered == 0

    def test_all_answered_all_matched(self):
        report = count_metrics({"x": 10.0}, {"x": 10.0})
        assert report.relaxed_precision == 100.0
        assert report.coverage == 100.0
        assert report.pc == 100.0
        assert report.proximity == 1.0

    def test_empty_gold_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            count_metrics({}, {})

    def test_report_round_trips_to_dict(self):
        report = count_metrics(self.PREDS, self.GOLDS)
        data = report.to_dict()
        assert data["total_queries"] == 4
        assert len(data["per_query"]) == 4
        assert isinstance(data["per_query"], list)


def _gold_groups(names_per_group):
    return [
        GoldInstance(names[0], aliases=tuple(names[1:]))
        for names in names_per_group
    ]


# distinct multi-word names keep alias groups far apart in edit distance,
# so relevance against one group never bleeds into another
_NAME_POOL = [
    "alpha falcon", "bravo heron", "charlie osprey", "delta plover",
    "echo sandpiper", "foxtrot kestrel", "golf cormorant",
]
_NOISE_POOL = ["quartz vein", "basalt column", "granite shelf", "marble seam"]


class TestInstanceMetrics:
    def test_single_query_against_oracles(self):
        gold_names = [[n] for n in _NAME_POOL[:3]]
        ranking = [_NAME_POOL[0], _NOISE_POOL[0], _NAME_POOL[2], _NOISE_POOL[1]]
        report = instance_metrics(
            {"q": ranking}, {"q": _gold_groups(gold_names)}, ks=(1, 2, 5)
        )
        for k in (1, 2, 5):
            assert report.map_at_k[k] == pytest.approx(
                100 * precision_at_k_oracle(ranking, gold_names, k))
            assert report.ar_at_k[k] == pytest.approx(
                100 * recall_at_k_oracle(ranking, gold_names, k))
            assert report.hit_at_k[k] == pytest.approx(
                100 * hit_at_k_oracle(ranking, gold_names, k))
        assert report.mrr == pytest.approx(
            reciprocal_rank_oracle(ranking, gold_names))

    @given(
        gold_idx=st.lists(st.integers(0, len(_NAME_POOL) - 1), min_size=1,
                          max_size=5, unique=True),
        picks=st.lists(st.tuples(st.booleans(), st.integers(0, 6)),
                       max_size=8),
        k=st.integers(1, 8),
    )
    @settings(max_examples=300, deadline=None)
    def test_random_rankings_match_oracles(self, gold_idx, picks, k):
        gold_names = [[_NAME_POOL[i]] for i in gold_idx]
        ranking = [
            _NAME_POOL[i % len(_NAME_POOL)] if from_gold
            else _NOISE_POOL[i % len(_NOISE_POOL)]
            for from_gold, i in picks
        ]
        report = instance_metrics(
            {"q": ranking}, {"q": _gold_groups(gold_names)}, ks=(k,)
        )
        assert report.map_at_k[k] == pytest.approx(
            100 * precision_at_k_oracle(ranking, gold_names, k))
        assert report.ar_at_k[k] == pytest.approx(
            100 * recall_at_k_oracle(ranking, gold_names, k))
        assert report.hit_at_k[k] == pytest.approx(
            100 * hit_at_k_oracle(ranking, gold_names, k))
        assert report.mrr == pytest.approx(
            reciprocal_rank_oracle(ranking, gold_names))

    def test_averages_over_queries(self):
        gold = {
            "q1": _gold_groups([[_NAME_POOL[0]], [_NAME_POOL[1]]]),
            "q2": _gold_groups([[_NAME_POOL[2]]]),
        }
        rankings = {
            "q1": [_NAME_POOL[0], _NAME_POOL[1]],   # precision@1 = 1, rr = 1
            "q2": [_NOISE_POOL[0], _NAME_POOL[2]],  # precision@1 = 0, rr = 1/2
        }
        report = instance_metrics(rankings, gold, ks=(1, 2))
        assert report.evaluated_queries == 2
        assert report.map_at_k[1] == pytest.approx(50.0)
        assert report.ar_at_k[1] == pytest.approx(25.0)   # (1/2 + 0) / 2
        assert report.hit_at_k[2] == pytest.approx(100.0)
        assert report.mrr == pytest.approx(0.75)

    def test_alias_match_counts(self):
        gold = {"q": [GoldInstance("Hawaii", aliases=("Hawai'i", "Big Island"))]}
        report = instance_metrics({"q": ["big island"]}, gold, ks=(1,))
        assert report.map_at_k[1] == 100.0
        assert report.ar_at_k[1] == 100.0

    def test_queries_without_gold_are_skipped(self):
        gold = {"scored": _gold_groups([[_NAME_POOL[0]]]), "no-gold": []}
        report = instance_metrics({"scored": [_NAME_POOL[0]]}, gold)
        assert report.evaluated_queries == 1
        assert report.map_at_k[1] == 100.0

    def test_missing_ranking_scores_zero(self):
        gold = {
            "ranked": _gold_groups([[_NAME_POOL[0]]]),
            "absent": _gold_groups([[_NAME_POOL[1]]]),
        }
        report = instance_metrics({"ranked": [_NAME_POOL[0]]}, gold, ks=(1,))
        assert report.evaluated_queries == 2
        assert report.map_at_k[1] == 50.0
        assert report.mrr == 0.5

    def test_empty_ranking_contributes_zero_precision(self):
        gold = {"q": _gold_groups([[_NAME_POOL[0]]])}
        report = instance_metrics({"q": []}, gold, ks=(1,))
        assert report.map_at_k[1] == 0.0
        assert report.hit_at_k[1] == 0.0
        assert report.mrr == 0.0

    def test_ks_deduplicated_and_sorted(self):
        gold = {"q": _gold_groups([[_NAME_POOL[0]]])}
        report = instance_metrics({"q": [_NAME_POOL[0]]}, gold, ks=(5, 1, 5))
        assert list(report.map_at_k) == [1, 5]

    def test_invalid_ks_rejected(self):
        gold = {"q": _gold_groups([[_NAME_POOL[0]]])}
        with pytest.raises(ValueError, match="positive"):
            instance_metrics({"q": []}, gold, ks=(0,))
        with pytest.raises(ValueError, match="positive"):
            instance_metrics({"q": []}, gold, ks=())

    def test_no_gold_anywhere_rejected(self):
        with pytest.raises(ValueError, match="gold instances"):
            instance_metrics({"q": ["name"]}, {"q": []})

    def test_report_to_dict_uses_string_keys(self):
        gold = {"q": _gold_groups([[_NAME_POOL[0]]])}
        data = instance_metrics({"q": [_NAME_POOL[0]]}, gold).to_dict()
        assert set(data["map_at_k"]) == {"1", "5", "10"}
        assert data["evaluated_queries"] == 1


class TestCnpAccuracy:
    S, G, I = CnpLabel.SYNONYM, CnpLabel.SUBGROUP, CnpLabel.INCOMPARABLE

    def test_per_class_scores(self):
        pairs = [(self.S, self.S), (self.S, self.G), (self.G, self.G),
                 (self.I, self.I)]
        scores = cnp_accuracy(pairs)
        assert scores[self.S] == 0.5
        assert scores[self.G] == 1.0
        assert scores[self.I] == 1.0

    def test_never_predicted_class_is_none(self):
        scores = cnp_accuracy([(self.S, self.S)])
        assert scores[self.S] == 1.0
        assert scores[self.G] is None
        assert scores[self.I] is None

    def test_empty_input_all_none(self):
        assert all(v is None for v in cnp_accuracy([]).values())


class TestLabelSegments:
    def test_labels(self):
        labels = label_segments(700, {
            "s1": 700.0, "s2": 750.0, "s3": None, "s4": 2000.0,
        })
        assert labels == {"s1": True, "s2": True, "s3": False, "s4": False}

    def test_gold_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            label_segments(0, {"s1": 5.0})


class TestFormatting:
    def test_count_table(self):
        report = CountEvalReport(
            relaxed_precision=37.7, coverage=84.7, pc=52.2,
            proximity=0.641, total_queries=100, answered=84,
        )
        text = format_count_report(report)
        lines = text.splitlines()
        assert lines[0].startswith("Relaxed Precision")
        assert "37.7" in lines[0]
        assert "84.7" in lines[1]
        assert "52.2" in lines[2]
        assert "0.641" in lines[3]
        assert "84" in lines[4] and "100" in lines[5]

    def test_instance_table(self):
        gold = {"q": _gold_groups([[_NAME_POOL[0]]])}
        report = instance_metrics({"q": [_NAME_POOL[0]]}, gold)
        text = format_instance_report(report)
        lines = text.splitlines()
        assert lines[0].split() == ["k", "MAP@k", "AR@k", "Hit@k"]
        assert lines[1].split()[0] == "1"
        assert "MRR" in text and "Queries" in text
