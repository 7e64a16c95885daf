import io

import numpy as np
import pytest

from pathlens import corpus


@pytest.fixture
def sam_events():
    """The canonical walkthrough student: 9 visits, two revisits."""
    screens = ["s:1", "s:2", "s:3", "s:2", "s:3", "s:4", "s:5", "s:6", "s:7"]
    return [corpus.EventRecord("sam", sid, i + 1) for i, sid in enumerate(screens)]


@pytest.fixture
def events_csv():
    def make(rows, header="user_id,screen_id,interaction_id"):
        return io.StringIO(header + "\n" + "\n".join(rows) + "\n")
    return make


def random_micro_corpus(rng: np.random.Generator, max_vocab=20, max_students=5):
    """A tiny random corpus plus its vocabulary, for oracle comparisons."""
    v = int(rng.integers(3, max_vocab + 1))
    alphabet = [f"t{i}" for i in range(v)]
    n_students = int(rng.integers(1, max_students + 1))
    sequences = []
    for s in range(n_students):
        length = int(rng.integers(2, 12))
        tokens = tuple(alphabet[int(rng.integers(v))] for _ in range(length))
        sequences.append(corpus.Sequence(f"stu{s}", tokens))
    vocab = corpus.build_vocab(sequences)
    return sequences, vocab
