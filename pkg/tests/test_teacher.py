"""Complexity measures and the score pipeline.

Formula tests pin hand-computed values; corpus-level behavior uses a
mid-size synthetic corpus trained once per module.
"""

import numpy as np
import pytest
from scipy.stats import kstest, spearmanr

from contact_complexity import corpus, gbdt, teacher, textvec
from contact_complexity.corpus import Transcript, Utterance


@pytest.fixture(scope="module")
def fitted():
    cfg = corpus.CorpusConfig(n_contacts=3000, n_classes=6, seed=11)
    transcripts, records, z = corpus.generate_corpus(cfg)
    vocab = textvec.fit_vocabulary(transcripts)
    vectors = [textvec.vectorize(vocab, t) for t in transcripts]
    y = np.array([t.label for t in transcripts])
    ensemble = gbdt.train(vectors, y, gbdt.GbdtConfig(n_classes=6, n_rounds=30))
    triples = teacher.complexity_triples(transcripts, ensemble, vocab)
    pipeline = teacher.fit_score_pipeline(triples, weight=2.0)
    return transcripts, z, vocab, ensemble, triples, pipeline


def _transcript(speakers):
    utts = tuple(Utterance(speaker=s, text="hello there") for s in speakers)
    return Transcript(id="t", utterances=utts, label=0, group="g")


class TestAgentSentenceCount:
    def test_direct_count(self):
        t = _transcript(["agent", "customer", "agent", "agent", "customer"])
        assert teacher.agent_sentence_count(t) == 3

    def test_all_customer_is_zero(self):
        assert teacher.agent_sentence_count(_transcript(["customer"] * 4)) == 0

    def test_alternating_ten_utterances_starting_customer(self):
        t = _transcript(["customer", "agent"] * 5)
        assert teacher.agent_sentence_count(t) == 5


class TestEntropy:
    def test_one_hot_is_zero(self):
        assert teacher.entropy([0.0, 1.0, 0.0]) == 0.0

    def test_uniform_152_classes_is_log_152(self):
        p = np.full(152, 1 / 152)
        assert teacher.entropy(p) == pytest.approx(np.log(152), rel=1e-9)
        assert teacher.entropy(p) == pytest.approx(5.0239, abs=5e-5)

    def test_fair_coin_is_log_two(self):
        assert teacher.entropy([0.5, 0.5]) == pytest.approx(np.log(2), rel=1e-9)

    def test_bounded_by_log_c(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            p = rng.dirichlet(np.ones(7))
            h = teacher.entropy(p)
            assert 0.0 <= h <= np.log(7) + 1e-12


class TestKlDivergence:
    def test_identical_distributions_give_zero(self):
        assert teacher.kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_hand_computed_value(self):
        expected = 0.5 * np.log(2) + 0.5 * np.log(2 / 3)
        got = teacher.kl_divergence([0.5, 0.5], [0.25, 0.75])
        assert got == pytest.approx(expected, rel=1e-9)
        assert got == pytest.approx(0.14384, abs=5e-6)

    def test_asymmetric(self):
        a = teacher.kl_divergence([0.5, 0.5], [0.25, 0.75])
        b = teacher.kl_divergence([0.25, 0.75], [0.5, 0.5])
        assert a != b

    def test_zero_numerator_terms_drop(self):
        assert teacher.kl_divergence([0.0, 1.0], [0.5, 0.5]) == pytest.approx(np.log(2))

    def test_nonnegative_even_with_tiny_probabilities(self):
        p = np.array([1e-16, 1.0 - 1e-16])
        assert teacher.kl_divergence(p, p) == 0.0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            teacher.kl_divergence([0.5, 0.5], [1 / 3, 1 / 3, 1 / 3])


class TestSkillfulness:
    def test_single_round_is_zero(self):
        assert teacher.skillfulness([[0.2, 0.8]]) == 0.0

    def test_hand_computed_two_round_value(self):
        expected = 0.25 * np.log(0.5) + 0.75 * np.log(1.5)
        got = teacher.skillfulness([[0.25, 0.75], [0.5, 0.5]])
        assert got == pytest.approx(expected, rel=1e-9)
        assert got == pytest.approx(0.13081, abs=5e-6)

    def test_constant_sequence_is_zero(self):
        assert teacher.skillfulness([[0.4, 0.6]] * 9) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            teacher.skillfulness([])

    def test_final_round_contributes_exactly_zero(self):
        staged = [[0.1, 0.9], [0.3, 0.7], [0.25, 0.75]]
        partial = sum(teacher.kl_divergence(p, staged[-1]) for p in staged[:-1])
        assert teacher.skillfulness(staged) == pytest.approx(partial, rel=1e-12)


class TestComplexityTriple:
    def test_identical_transcripts_give_identical_triples(self, fitted):
        transcripts, _, vocab, ensemble, _, _ = fitted
        a = teacher.complexity_triple(transcripts[0], ensemble, vocab)
        b = teacher.complexity_triple(transcripts[0], ensemble, vocab)
        assert a == b

    def test_batch_matches_single(self, fitted):
        transcripts, _, vocab, ensemble, triples, _ = fitted
        for i in (0, 100, 2999):
            single = teacher.complexity_triple(transcripts[i], ensemble, vocab)
            assert single.length == triples[i].length
            assert single.entropy == pytest.approx(triples[i].entropy, rel=1e-9)
            assert single.skillfulness == pytest.approx(triples[i].skillfulness, rel=1e-9)

    def test_out_of_vocabulary_transcript_scores_finitely(self, fitted):
        _, _, vocab, ensemble, _, _ = fitted
        t = Transcript(
            id="oov",
            utterances=(Utterance("customer", "qqqq wwww"), Utterance("agent", "zzzz xxxx")),
            label=0, group="g")
        triple = teacher.complexity_triple(t, ensemble, vocab)
        assert triple.length == 1
        assert np.isfinite(triple.entropy) and triple.entropy >= 0
        assert np.isfinite(triple.skillfulness) and triple.skillfulness >= 0

    def test_latent_correlates_with_length_and_entropy(self, fitted):
        _, z, _, _, triples, _ = fitted
        assert spearmanr(z, [t.length for t in triples]).statistic > 0.4
        assert spearmanr(z, [t.entropy for t in triples]).statistic > 0.4

    def test_invariant_ranges(self, fitted):
        _, _, _, ensemble, triples, _ = fitted
        log_c = np.log(ensemble.n_classes)
        for t in triples:
            assert t.length >= 1
            assert -1e-12 <= t.entropy <= log_c + 1e-9
            assert t.skillfulness >= 0


class TestScorePipeline:
    def test_scores_on_fitting_corpus_are_uniform(self, fitted):
        _, _, _, _, triples, pipeline = fitted
        q = teacher.score_many(pipeline, triples)
        assert kstest(q, "uniform").statistic < 2 / np.sqrt(len(q))
        assert np.all(q > 0) and np.all(q < 1)

    def test_median_triple_scores_near_half(self, fitted):
        # holds when the weighted sum is Gaussian-like, i.e. at the
        # normality-selected weight; see test_median_maps_to_zero below for
        # the per-attribute half of the argument
        _, _, _, _, triples, _ = fitted
        w = teacher.select_weight(triples)
        pipeline = teacher.fit_score_pipeline(triples, weight=w)
        med = teacher.ComplexityTriple(
            length=int(np.median([t.length for t in triples])),
            entropy=float(np.median([t.entropy for t in triples])),
            skillfulness=float(np.median([t.skillfulness for t in triples])),
        )
        assert teacher.score(pipeline, med) == pytest.approx(0.5, abs=0.02)

    def test_median_maps_to_zero_under_each_normal_map(self, fitted):
        _, _, _, _, triples, pipeline = fitted
        for qmap, col in (
            (pipeline.length_map, [t.length for t in triples]),
            (pipeline.entropy_map, [t.entropy for t in triples]),
            (pipeline.skill_map, [t.skillfulness for t in triples]),
        ):
            assert qmap.transform(float(np.median(col))) == pytest.approx(0.0, abs=0.05)

    def test_dominating_triple_clamps_to_top_quantile(self, fitted):
        _, _, _, _, triples, pipeline = fitted
        big = teacher.ComplexityTriple(
            length=max(t.length for t in triples) + 10,
            entropy=max(t.entropy for t in triples) + 1,
            skillfulness=max(t.skillfulness for t in triples) + 1,
        )
        n = len(triples)
        assert teacher.score(pipeline, big) == pytest.approx(1 - 0.5 / n, abs=1e-12)

    def test_coordinatewise_dominance_is_monotone(self, fitted):
        _, _, _, _, triples, pipeline = fitted
        rng = np.random.default_rng(4)
        idx = rng.integers(0, len(triples), size=200)
        for i in idx:
            t = triples[int(i)]
            bigger = teacher.ComplexityTriple(t.length + 1, t.entropy + 0.05,
                                              t.skillfulness + 0.05)
            assert teacher.score(pipeline, bigger) >= teacher.score(pipeline, t)

    def test_rescaling_attributes_leaves_scores_unchanged(self, fitted):
        _, _, _, _, triples, pipeline = fitted
        q = teacher.score_many(pipeline, triples)
        scaled = [teacher.ComplexityTriple(t.length, 100.0 * t.entropy,
                                           100.0 * t.skillfulness) for t in triples]
        pipeline2 = teacher.fit_score_pipeline(scaled, weight=pipeline.weight)
        q2 = teacher.score_many(pipeline2, scaled)
        np.testing.assert_allclose(q2, q, atol=1e-9)

    def test_rejects_constant_attribute_column(self):
        triples = [teacher.ComplexityTriple(i + 1, 1.0, float(i)) for i in range(10)]
        with pytest.raises(ValueError, match="entropy"):
            teacher.fit_score_pipeline(triples)

    def test_rejects_nonpositive_weight(self, fitted):
        _, _, _, _, triples, _ = fitted
        with pytest.raises(ValueError, match="weight"):
            teacher.fit_score_pipeline(triples[:10], weight=0.0)

    def test_pipeline_round_trip(self, fitted, tmp_path):
        _, _, _, _, triples, pipeline = fitted
        path = tmp_path / "pipeline.txt"
        teacher.save_pipeline(path, pipeline, model_ref="m.txt", vocab_ref="v.txt")
        loaded, refs = teacher.load_pipeline(path)
        assert refs == {"model": "m.txt", "vocabulary": "v.txt"}
        assert loaded.weight == pipeline.weight
        q = teacher.score_many(pipeline, triples[:50])
        q2 = teacher.score_many(loaded, triples[:50])
        np.testing.assert_array_equal(q, q2)


class TestSelectWeight:
    def test_singleton_grid_returns_its_weight(self, fitted):
        _, _, _, _, triples, _ = fitted
        assert teacher.select_weight(triples, [2.0]) == 2.0

    def test_zero_statistic_weight_wins(self, fitted, monkeypatch):
        _, _, _, _, triples, _ = fitted
        monkeypatch.setattr(teacher, "weight_statistics",
                            lambda t, g: [(w, 0.0 if w == 2.0 else 5.0) for w in g])
        assert teacher.select_weight(triples, (0.5, 1.0, 2.0, 4.0)) == 2.0

    def test_selection_minimizes_the_real_statistic(self, fitted):
        _, _, _, _, triples, _ = fitted
        grid = (0.5, 1.0, 2.0, 4.0)
        stats = teacher.weight_statistics(triples, grid)
        best = min(stats, key=lambda ws: (ws[1], ws[0]))[0]
        assert teacher.select_weight(triples, grid) == best

    def test_ties_prefer_smaller_weight(self, fitted, monkeypatch):
        _, _, _, _, triples, _ = fitted
        monkeypatch.setattr(teacher, "weight_statistics",
                            lambda t, g: [(w, 1.0) for w in g])
        assert teacher.select_weight(triples, (4.0, 0.5, 2.0)) == 0.5

    def test_empty_grid_rejected(self, fitted):
        _, _, _, _, triples, _ = fitted
        with pytest.raises(ValueError):
            teacher.weight_statistics(triples, [])


class TestBinnedLabelCurve:
    def test_all_high_labels_give_constant_curve(self):
        rng = np.random.default_rng(1)
        scores = rng.random(500)
        curve = teacher.binned_label_curve(scores, ["high"] * 500)
        filled = curve.counts > 0
        np.testing.assert_allclose(curve.probabilities["high"][filled], 1.0)

    def test_threshold_labels_make_a_step_at_bin_twelve(self):
        rng = np.random.default_rng(2)
        scores = rng.random(20_000)
        labels = ["high" if q > 0.6 else "low" for q in scores]
        curve = teacher.binned_label_curve(scores, labels, n_bins=20)
        high = curve.probabilities["high"]
        np.testing.assert_allclose(high[:12], 0.0, atol=1e-12)
        np.testing.assert_allclose(high[12:], 1.0, atol=1e-12)

    def test_empty_bins_flagged_not_interpolated(self):
        scores = [0.05, 0.95, 0.96]
        curve = teacher.binned_label_curve(scores, ["low", "high", "high"], n_bins=10)
        assert curve.counts[5] == 0
        assert np.isnan(curve.probabilities["high"][5])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="labels"):
            teacher.binned_label_curve([0.5], ["low", "high"])

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            teacher.binned_label_curve([0.5], ["medium"])


class TestScoresFile:
    def test_round_trip(self, fitted, tmp_path):
        transcripts, _, _, _, triples, pipeline = fitted
        q = teacher.score_many(pipeline, triples[:20])
        path = tmp_path / "scores.csv"
        teacher.save_scores(path, [t.id for t in transcripts[:20]],
                            [t.group for t in transcripts[:20]], triples[:20], q)
        ids, groups, loaded_triples, loaded_q = teacher.load_scores(path)
        assert ids == [t.id for t in transcripts[:20]]
        assert groups == [t.group for t in transcripts[:20]]
        assert loaded_triples == triples[:20]
        np.testing.assert_array_equal(loaded_q, q)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("a,b\n")
        with pytest.raises(Exception, match="header"):
            teacher.load_scores(path)
