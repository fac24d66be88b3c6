import math

import numpy as np
import pytest

from unilab.exceptions import (
    AlphabetError,
    EmptyTextError,
    InvalidParameterError,
    SequenceTooShortError,
)
from unilab.repositories import model_repository
from unilab.schemas.alphabet_model import Alphabet
from unilab.services import lang_service

UNIFORM_SYMBOLS = 1_000_000
LOG2_26 = 4.7004


def test_normalize_text_folds_case_and_drops_other_symbols(latin):
    text = lang_service.normalize_text('Hello, World! 42', latin)
    assert text == 'HELLOWORLD'


def test_normalize_text_without_alphabet_symbols(latin):
    with pytest.raises(EmptyTextError):
        lang_service.normalize_text('1234 !?', latin)


def test_encode_unknown_symbol(abcd):
    with pytest.raises(AlphabetError):
        abcd.encode('ABE')


def test_uniform_corpus_has_no_redundancy(latin, uniform_text):
    corpus = uniform_text(UNIFORM_SYMBOLS)
    model = lang_service.fit_ngram(corpus, latin, order=1)
    estimate = lang_service.redundancy(model)

    assert estimate.R0 == pytest.approx(LOG2_26, abs=1e-4)
    assert estimate.R == pytest.approx(LOG2_26, abs=0.01)
    assert estimate.D == pytest.approx(0.0, abs=0.01)


def test_english_redundancy_grows_with_order(english, latin):
    first, second = lang_service.entropy_profile(english, latin, [1, 2])
    assert 0 < first.D < second.D
    assert second.R < first.R < first.R0


def test_entropy_rate_never_exceeds_absolute_rate(latin):
    model = lang_service.uniform_model(latin, order=2)
    assert lang_service.entropy_rate(model) <= math.log2(latin.G)


def test_fit_shorter_than_order(latin):
    with pytest.raises(SequenceTooShortError):
        lang_service.fit_ngram('AB', latin, order=3)


def test_counts_are_read_only(create_model):
    model = create_model()
    with pytest.raises(ValueError, match='read-only'):
        model.counts[0, 0] = 7


def test_uniform_model_cross_entropy(latin):
    model = lang_service.uniform_model(latin, order=2)
    bits = lang_service.cross_entropy(model, 'THEQUICKBROWNFOX')
    assert bits == pytest.approx(math.log2(latin.G))


def test_likelihood_grows_under_concatenation(create_model):
    model = create_model()
    head = lang_service.sequence_log_likelihood(model, 'THERIVER')
    whole = lang_service.sequence_log_likelihood(model, 'THERIVERRUNS')
    assert whole >= head > 0


def test_unseen_text_keeps_finite_likelihood(create_model):
    model = create_model()
    bits = lang_service.sequence_log_likelihood(model, 'QXZJQXZJ')
    assert math.isfinite(bits)


def test_english_scores_better_than_shuffled(create_model, english):
    model = create_model()
    sample = english[:500]
    shuffled = ''.join(np.random.default_rng(3).permutation(list(sample)))
    assert lang_service.cross_entropy(
        model, sample
    ) < lang_service.cross_entropy(model, shuffled)


def test_likelihood_shorter_than_order(create_model):
    model = create_model(order=3)
    with pytest.raises(SequenceTooShortError):
        lang_service.sequence_log_likelihood(model, 'AB')


def test_generate_text_is_seeded(create_model):
    model = create_model()
    first = lang_service.generate_text(model, 200, seed=11)
    again = lang_service.generate_text(model, 200, seed=11)
    other = lang_service.generate_text(model, 200, seed=12)

    assert first.shape == (200,)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_model_document_round_trip(create_model, tmp_path):
    model = create_model(order=2)
    path = tmp_path / 'model.json'
    model_repository.save_model(model, path)
    loaded = model_repository.load_model(path)

    assert loaded.order == model.order
    assert loaded.alpha == model.alpha
    assert loaded.alphabet == model.alphabet
    assert np.array_equal(loaded.counts, model.counts)


def test_normalize_text_drops_symbols_outside_a_small_alphabet():
    alphabet = Alphabet.from_profile('AB')
    assert lang_service.normalize_text('a1b2c3', alphabet) == 'AB'


@pytest.mark.parametrize(
    'raw', ['Hello, World! 42', 'the quick brown fox', 'ALREADYCLEAN']
)
def test_normalize_text_is_idempotent(latin, raw):
    once = lang_service.normalize_text(raw, latin)
    assert lang_service.normalize_text(once, latin) == once


def test_fit_counts_every_window():
    alphabet = Alphabet.from_profile('AB')
    model = lang_service.fit_ngram('ABAB', alphabet, order=2, alpha=1.0)
    assert model.counts.tolist() == [[0, 2], [1, 0]]


def test_order_zero_is_rejected(latin):
    with pytest.raises(InvalidParameterError):
        lang_service.fit_ngram('ABAB', latin, order=0)


@pytest.mark.parametrize('order', [1, 2, 3])
def test_smoothed_rows_sum_to_one(create_model, order):
    probabilities = lang_service.conditional_probabilities(
        create_model(order=order)
    )
    assert np.allclose(probabilities.sum(axis=1), 1.0, rtol=0, atol=1e-12)


def test_uniform_binary_likelihood():
    model = lang_service.uniform_model(Alphabet.from_profile('AB'))
    assert lang_service.sequence_log_likelihood(model, 'AB') == 2.0


def test_likelihood_matches_direct_product(create_model, latin):
    model = create_model(order=2)
    probabilities = lang_service.conditional_probabilities(model)
    sequences = np.random.default_rng(8).integers(latin.G, size=(20, 5))
    for sequence in sequences:
        product = math.prod(
            probabilities[a, b] for a, b in zip(sequence, sequence[1:])
        )
        bits = lang_service.sequence_log_likelihood(model, sequence)
        assert bits == pytest.approx(-math.log2(product), rel=1e-12)
