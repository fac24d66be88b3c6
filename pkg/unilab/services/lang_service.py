import logging

import numpy as np

from unilab.config import Settings
from unilab.exceptions import (
    EmptyTextError,
    InvalidParameterError,
    SequenceTooShortError,
)
from unilab.schemas import alphabet_model, ngram_model

logger = logging.getLogger(__name__)

MAX_TABLE_SIZE = 10**8


def normalize_text(raw: str | bytes, alphabet: alphabet_model.Alphabet) -> str:
    if isinstance(raw, bytes):
        raw = raw.decode('utf-8', errors='ignore')
    if alphabet.fold_case:
        raw = raw.upper()
    index = alphabet.index
    text = ''.join(c for c in raw if c in index)
    if not text:
        raise EmptyTextError('Input contains no symbols of the alphabet')
    return text


def absolute_rate(alphabet: alphabet_model.Alphabet) -> float:
    return float(np.log2(alphabet.G))


def as_indices(
    corpus: str | np.ndarray, alphabet: alphabet_model.Alphabet
) -> np.ndarray:
    if isinstance(corpus, str):
        return alphabet.encode(corpus)
    indices = np.asarray(corpus, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= alphabet.G):
        raise InvalidParameterError('symbol index outside the alphabet')
    return indices


def window_codes(indices: np.ndarray, width: int, G: int) -> np.ndarray:
    """Base-G codes of every length-``width`` window along the last axis."""
    length = indices.shape[-1]
    codes = np.zeros(indices.shape[:-1] + (length - width + 1,), np.int64)
    for j in range(width):
        codes = codes * G + indices[..., j : length - width + 1 + j]
    return codes


def fit_ngram(
    corpus: str | np.ndarray,
    alphabet: alphabet_model.Alphabet,
    order: int | None = None,
    alpha: float | None = None,
) -> ngram_model.NGramModel:
    order = Settings().DEFAULT_ORDER if order is None else order
    alpha = Settings().DEFAULT_ALPHA if alpha is None else alpha
    if order < 1:
        raise InvalidParameterError('model order must be at least 1')
    if alpha <= 0:
        raise InvalidParameterError('smoothing alpha must be positive')
    G = alphabet.G
    if G**order > MAX_TABLE_SIZE:
        raise InvalidParameterError(
            f'An order-{order} table over {G} symbols is too large'
        )

    indices = as_indices(corpus, alphabet)
    if indices.size < order:
        raise SequenceTooShortError(
            f'Corpus of {indices.size} symbols is shorter than order {order}'
        )

    codes = window_codes(indices, order, G)
    counts = np.bincount(codes, minlength=G**order).reshape(-1, G)
    logger.info(
        'Fitted order-%d model on %d symbols (%d windows)',
        order,
        indices.size,
        codes.size,
    )
    return ngram_model.NGramModel(
        alphabet=alphabet,
        order=order,
        alpha=alpha,
        counts=counts.astype(np.int64),
        total_symbols=int(indices.size),
    )


def uniform_model(
    alphabet: alphabet_model.Alphabet, order: int = 1
) -> ngram_model.NGramModel:
    G = alphabet.G
    return ngram_model.NGramModel(
        alphabet=alphabet,
        order=order,
        alpha=Settings().DEFAULT_ALPHA,
        counts=np.ones((G ** (order - 1), G), dtype=np.int64),
        total_symbols=G**order + order - 1,
    )


def conditional_probabilities(model: ngram_model.NGramModel) -> np.ndarray:
    smoothed = model.counts + model.alpha
    return smoothed / smoothed.sum(axis=1, keepdims=True)


def conditional_log2(model: ngram_model.NGramModel) -> np.ndarray:
    """Flat table of log2 P(symbol | context) indexed by window code."""
    return np.log2(conditional_probabilities(model)).ravel()


def context_weights(model: ngram_model.NGramModel) -> np.ndarray:
    context_counts = model.counts.sum(axis=1).astype(np.float64)
    total = context_counts.sum()
    if total == 0:
        return np.full(context_counts.size, 1 / context_counts.size)
    return context_counts / total


def symbol_frequencies(model: ngram_model.NGramModel) -> np.ndarray:
    smoothed = model.counts.sum(axis=0) + model.alpha
    return smoothed / smoothed.sum()


def entropy_rate(model: ngram_model.NGramModel) -> float:
    probabilities = conditional_probabilities(model)
    row_entropy = -(probabilities * np.log2(probabilities)).sum(axis=1)
    rate = float(context_weights(model) @ row_entropy)
    return min(max(rate, 0.0), absolute_rate(model.alphabet))


def redundancy(
    model: ngram_model.NGramModel,
) -> ngram_model.RedundancyEstimate:
    R0 = absolute_rate(model.alphabet)
    R = entropy_rate(model)
    return ngram_model.RedundancyEstimate(
        order=model.order, R0=R0, R=R, D=R0 - R
    )


def entropy_profile(
    corpus: str | np.ndarray,
    alphabet: alphabet_model.Alphabet,
    orders: list[int],
    alpha: float | None = None,
) -> list[ngram_model.RedundancyEstimate]:
    indices = as_indices(corpus, alphabet)
    return [
        redundancy(fit_ngram(indices, alphabet, order, alpha))
        for order in orders
    ]


def sequence_log_likelihoods(
    model: ngram_model.NGramModel, sequences: np.ndarray
) -> np.ndarray:
    """-log2 P for each row of a 2-D index array.

    The first ``order - 1`` symbols of a row condition the first scored
    step and are not scored themselves.
    """
    if sequences.shape[-1] < model.order:
        raise SequenceTooShortError(
            f'Sequences of length {sequences.shape[-1]} are shorter than '
            f'model order {model.order}'
        )
    codes = window_codes(sequences, model.order, model.alphabet.G)
    return -conditional_log2(model)[codes].sum(axis=-1)


def sequence_log_likelihood(
    model: ngram_model.NGramModel, sequence: str | np.ndarray
) -> float:
    indices = as_indices(sequence, model.alphabet)
    return float(sequence_log_likelihoods(model, indices[None, :])[0])


def cross_entropy(
    model: ngram_model.NGramModel, text: str | np.ndarray
) -> float:
    indices = as_indices(text, model.alphabet)
    bits = sequence_log_likelihood(model, indices)
    return bits / (indices.size - model.order + 1)


def generate_text(
    model: ngram_model.NGramModel, length: int, seed: int
) -> np.ndarray:
    G = model.alphabet.G
    rng = np.random.default_rng(seed)
    if length <= 0:
        return np.zeros(0, dtype=np.int64)

    opening = model.order - 1
    context_table = model.counts.sum(axis=1) + model.alpha
    context = int(
        rng.choice(context_table.size, p=context_table / context_table.sum())
    )
    digits = []
    for _ in range(opening):
        digits.append(context % G)
        context //= G
    sequence = list(reversed(digits))[:length]

    cumulative = np.cumsum(conditional_probabilities(model), axis=1)
    draws = rng.random(max(length - len(sequence), 0))
    modulus = G ** max(opening, 0)
    context = 0
    for symbol in sequence:
        context = context * G + symbol
    for u in draws:
        row = context % modulus if opening else 0
        symbol = int(np.searchsorted(cumulative[row], u, side='right'))
        symbol = min(symbol, G - 1)
        sequence.append(symbol)
        context = row * G + symbol
    return np.asarray(sequence, dtype=np.int64)
