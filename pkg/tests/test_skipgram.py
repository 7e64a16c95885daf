import math

import numpy as np
import pytest

from pathlens import corpus, skipgram
from pathlens.errors import EmptyCorpus, UnknownToken, VocabularyTooSmall

from conftest import random_micro_corpus


def make_vocab(n):
    return corpus.TokenVocab.from_tokens([f"t{i}" for i in range(n)])


def random_model(rng, v, d, scale=0.5):
    vocab = make_vocab(v)
    W = rng.normal(0, scale, size=(v, d))
    W_out = rng.normal(0, scale, size=(d, v))
    return skipgram.SkipGramModel(vocab, W, W_out)


# --- independent oracles ------------------------------------------------------

def pair_loss_ref(W, W_out, center, context):
    """Literal softmax cross-entropy for one pair, computed from scratch."""
    v = W[center]
    u = np.array([np.dot(W_out[:, j], v) for j in range(W.shape[0])])
    m = u.max()
    return -(u[context] - m - math.log(np.exp(u - m).sum()))


def corpus_loss_ref(W, W_out, sequences, vocab, window):
    """Nested-loop transcription of the per-student averaged cross-entropy."""
    total = 0.0
    for seq in sequences:
        idxs = [vocab.index[t] for t in seq.tokens if t in vocab.index]
        if not idxs:
            continue
        student = 0.0
        for t in range(len(idxs)):
            for i in range(-window, window + 1):
                if i == 0 or not (0 <= t + i < len(idxs)):
                    continue
                student += pair_loss_ref(W, W_out, idxs[t], idxs[t + i])
        total += student / len(idxs)
    return total


# --- init ---------------------------------------------------------------------

class TestInit:
    def test_seeded_init_is_bitwise_deterministic(self):
        vocab = make_vocab(3)
        cfg = skipgram.SkipGramConfig(vector_size=2, seed=99)
        a = skipgram.init_model(vocab, cfg)
        b = skipgram.init_model(vocab, cfg)
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.W_out, b.W_out)

    def test_output_weights_start_at_zero(self):
        model = skipgram.init_model(make_vocab(4), skipgram.SkipGramConfig(vector_size=3))
        assert not model.W_out.any()
        assert np.abs(model.W).max() <= 0.5 / 3

    def test_vocab_too_small(self):
        with pytest.raises(VocabularyTooSmall):
            skipgram.init_model(make_vocab(1), skipgram.SkipGramConfig())


# --- context windows ----------------------------------------------------------

class TestContextPairs:
    def test_window_one_with_truncation(self):
        a, b, c = 0, 1, 2
        assert skipgram.context_pairs([a, b, c], 1) == [(a, b), (b, a), (b, c), (c, b)]

    def test_window_two_center_contexts(self):
        idx = [10, 11, 12, 13]
        pairs = skipgram.context_pairs(idx, 2)
        assert {ctx for cen, ctx in pairs if cen == 12} == {10, 11, 13}

    def test_single_token_yields_nothing(self):
        assert skipgram.context_pairs([5], 3) == []

    def test_no_mixed_prefix_pairs_on_decorated_corpus(self):
        seqs = [
            corpus.Sequence("a", ("s:1", "s:2", "s:3")),
            corpus.Sequence("b", ("s:1", "s:2", "s:3")),
        ]
        decorated = corpus.decorate_outcome(seqs, {"a": True, "b": False})
        vocab = corpus.build_vocab(decorated)
        for seq in decorated:
            for cen, ctx in skipgram.context_pairs(vocab.encode(seq.tokens), 2):
                assert vocab.tokens[cen][:2] == vocab.tokens[ctx][:2]


# --- softmax forward ----------------------------------------------------------

class TestForwardSoftmax:
    def test_zero_weights_uniform(self):
        vocab = make_vocab(3)
        model = skipgram.SkipGramModel(vocab, np.zeros((3, 2)), np.zeros((2, 3)))
        assert np.allclose(skipgram.forward_softmax(model, 0), [1 / 3] * 3, atol=1e-15)

    def test_sums_to_one_over_random_models(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = int(rng.integers(2, 12))
            d = int(rng.integers(1, 6))
            model = random_model(rng, v, d, scale=2.0)
            p = skipgram.forward_softmax(model, int(rng.integers(v)))
            assert abs(p.sum() - 1.0) <= 1e-12
            assert (p > 0).all() and (p < 1).all()

    def test_logit_shift_invariance(self):
        rng = np.random.default_rng(4)
        model = random_model(rng, 5, 3)
        center = 2
        v = model.W[center]
        # adding c*v/(v.v) to every output column shifts every logit by c
        shifted = skipgram.SkipGramModel(
            model.vocab,
            model.W,
            model.W_out + 1000.0 * np.outer(v, np.ones(5)) / (v @ v),
        )
        p0 = skipgram.forward_softmax(model, center)
        p1 = skipgram.forward_softmax(shifted, center)
        assert np.abs(p0 - p1).max() <= 1e-12


# --- corpus loss --------------------------------------------------------------

class TestCorpusLoss:
    def test_uniform_model_two_token_student(self):
        vocab = corpus.TokenVocab.from_tokens(["A", "B", "C"])
        model = skipgram.SkipGramModel(vocab, np.zeros((3, 2)), np.zeros((2, 3)))
        loss = skipgram.corpus_loss(model, [corpus.Sequence("u", ("A", "B"))], 1)
        assert abs(loss - math.log(3)) <= 1e-12

    def test_matches_nested_loop_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            sequences, vocab = random_micro_corpus(rng)
            d = int(rng.integers(1, 5))
            model = skipgram.SkipGramModel(
                vocab,
                rng.normal(0, 0.4, size=(len(vocab), d)),
                rng.normal(0, 0.4, size=(d, len(vocab))),
            )
            window = int(rng.integers(1, 4))
            got = skipgram.corpus_loss(model, sequences, window)
            want = corpus_loss_ref(model.W, model.W_out, sequences, vocab, window)
            assert abs(got - want) <= 1e-10

    def test_out_of_vocab_student_excluded(self):
        vocab = corpus.TokenVocab.from_tokens(["A", "B"])
        model = skipgram.SkipGramModel(vocab, np.zeros((2, 2)), np.zeros((2, 2)))
        with_ghost = [
            corpus.Sequence("u", ("A", "B")),
            corpus.Sequence("ghost", ("zzz", "qqq")),
        ]
        without = [corpus.Sequence("u", ("A", "B"))]
        assert skipgram.corpus_loss(model, with_ghost, 1) == skipgram.corpus_loss(model, without, 1)

    def test_empty_corpus(self):
        vocab = corpus.TokenVocab.from_tokens(["A", "B"])
        model = skipgram.SkipGramModel(vocab, np.zeros((2, 2)), np.zeros((2, 2)))
        with pytest.raises(EmptyCorpus):
            skipgram.corpus_loss(model, [corpus.Sequence("u", ("zzz",))], 1)


# --- gradients ----------------------------------------------------------------

class TestGradients:
    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(21)
        h = 1e-5
        for _ in range(5):
            v = int(rng.integers(3, 11))
            d = int(rng.integers(2, 6))
            model = random_model(rng, v, d)
            center = int(rng.integers(v))
            context = int(rng.integers(v))
            _, gW, gWout = skipgram.pair_loss_and_gradients(model, center, context)

            for mat, grad in ((model.W, gW), (model.W_out, gWout)):
                fd = np.zeros_like(mat)
                it = np.nditer(mat, flags=["multi_index"])
                while not it.finished:
                    ij = it.multi_index
                    orig = mat[ij]
                    mat[ij] = orig + h
                    up = pair_loss_ref(model.W, model.W_out, center, context)
                    mat[ij] = orig - h
                    dn = pair_loss_ref(model.W, model.W_out, center, context)
                    mat[ij] = orig
                    fd[ij] = (up - dn) / (2 * h)
                    it.iternext()
                denom = max(np.abs(fd).max(), 1e-8)
                assert np.abs(grad - fd).max() / denom < 1e-4


# --- training -----------------------------------------------------------------

class TestTrain:
    def make_alternating_corpus(self, n=30):
        return [corpus.Sequence(f"u{i}", ("A", "B") * 5) for i in range(n)]

    def test_loss_decreases_and_starts_near_log_v(self):
        seqs = self.make_alternating_corpus()
        vocab = corpus.build_vocab(seqs)
        cfg = skipgram.SkipGramConfig(vector_size=4, window=1, epochs=20, seed=3)
        model, trace = skipgram.train(seqs, vocab, cfg)
        assert len(trace) == 20
        assert trace[-1] < trace[0]
        # zero output weights make the very first pairs cost log V each
        assert trace[0] <= math.log(len(vocab)) + 1e-9

    def test_bitwise_deterministic_for_fixed_seed(self):
        seqs = self.make_alternating_corpus(8)
        vocab = corpus.build_vocab(seqs)
        cfg = skipgram.SkipGramConfig(vector_size=3, window=1, epochs=3, seed=5)
        m1, t1 = skipgram.train(seqs, vocab, cfg)
        m2, t2 = skipgram.train(seqs, vocab, cfg)
        assert np.array_equal(m1.W, m2.W)
        assert np.array_equal(m1.W_out, m2.W_out)
        assert t1 == t2

    def test_planted_twins_beat_cross_cluster_similarity(self):
        seqs = []
        for rep in range(40):
            seqs.append(corpus.Sequence(f"a{rep}", ("f1", "c1a", "f1")))
            seqs.append(corpus.Sequence(f"b{rep}", ("f1", "c1b", "f1")))
            seqs.append(corpus.Sequence(f"c{rep}", ("f2", "c2a", "f2")))
            seqs.append(corpus.Sequence(f"d{rep}", ("f2", "c2b", "f2")))
        vocab = corpus.build_vocab(seqs)
        cfg = skipgram.SkipGramConfig(vector_size=5, window=1, epochs=10, seed=2)
        model, _ = skipgram.train(seqs, vocab, cfg)

        def cos(a, b):
            va = skipgram.embedding_of(model, a)
            vb = skipgram.embedding_of(model, b)
            return va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb))

        twin = cos("c1a", "c1b")
        cross = max(cos(x, y) for x in ("c1a", "c1b") for y in ("c2a", "c2b"))
        assert twin > cross
        assert skipgram.nearest_neighbors(model, "c1a", 1)[0][0] == "c1b"

    def test_negative_sampling_mode_trains_and_is_deterministic(self):
        seqs = self.make_alternating_corpus(20)
        vocab = corpus.build_vocab(seqs)
        cfg = skipgram.SkipGramConfig(
            vector_size=4, window=1, epochs=10, seed=7,
            mode=skipgram.MODE_NEGATIVE, negative=2,
        )
        m1, t1 = skipgram.train(seqs, vocab, cfg)
        m2, t2 = skipgram.train(seqs, vocab, cfg)
        assert np.array_equal(m1.W, m2.W)
        assert t1 == t2
        assert t1[-1] < t1[0]

    def test_empty_corpus_raises(self):
        vocab = corpus.TokenVocab.from_tokens(["A", "B"])
        with pytest.raises(EmptyCorpus):
            skipgram.train([corpus.Sequence("u", ("zzz",))], vocab, skipgram.SkipGramConfig())


# --- queries ------------------------------------------------------------------

class TestQueries:
    def test_embedding_is_the_w_row(self):
        vocab = make_vocab(4)
        model = skipgram.init_model(vocab, skipgram.SkipGramConfig(vector_size=2, seed=8))
        vec = skipgram.embedding_of(model, "t2")
        assert vec is model.W[2] or np.array_equal(vec, model.W[2])
        assert vec.shape == (2,)

    def test_unknown_token(self):
        model = skipgram.init_model(make_vocab(3), skipgram.SkipGramConfig(vector_size=2))
        with pytest.raises(UnknownToken):
            skipgram.embedding_of(model, "nope")
        with pytest.raises(UnknownToken):
            skipgram.nearest_neighbors(model, "nope", 1)

    def test_neighbor_cap_and_query_exclusion(self):
        rng = np.random.default_rng(13)
        model = random_model(rng, 6, 3)
        got = skipgram.nearest_neighbors(model, "t0", 100)
        assert len(got) == 5
        assert all(tok != "t0" for tok, _ in got)

    def test_tie_break_by_vocab_index(self):
        vocab = make_vocab(4)
        W = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [-1.0, 0.0]])
        model = skipgram.SkipGramModel(vocab, W, np.zeros((2, 4)))
        got = skipgram.nearest_neighbors(model, "t3", 3)
        # t1 and t2 tie at cosine 0; t1 wins by index
        assert [tok for tok, _ in got][:2] == ["t1", "t2"]


def test_model_file_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    model = random_model(rng, 5, 3)
    path = tmp_path / "m.json"
    skipgram.save_model(model, path)
    loaded = skipgram.load_model(path)
    assert loaded.vocab.tokens == model.vocab.tokens
    assert np.array_equal(loaded.W, model.W)
    assert np.array_equal(loaded.W_out, model.W_out)
