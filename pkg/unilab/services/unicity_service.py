import logging
import math
from fractions import Fraction

import numpy as np

from unilab.config import Settings
from unilab.core.seeding import derive_seed, make_rng
from unilab.core.workers import Workers, split_range
from unilab.exceptions import (
    InvalidParameterError,
    MessageSpaceError,
    SequenceTooShortError,
)
from unilab.schemas import (
    alphabet_model,
    cipher_model,
    ngram_model,
    unicity_model,
)
from unilab.services import cipher_service, lang_service

logger = logging.getLogger(__name__)

LINEAR_LIMIT_LOG2 = 52


def unicity_distance(H_K: float, D: float) -> float:
    if H_K < 0 or D < 0:
        raise InvalidParameterError('H(K) and D must be nonnegative')
    if D == 0:
        logger.warning('Zero redundancy: unicity distance is unbounded')
        return math.inf
    return H_K / D


def log2_wrong_keys(H_K: float) -> float:
    """log2(2^H_K - 1) without forming 2^H_K."""
    if H_K == 0:
        return -math.inf
    return H_K + math.log2(-math.expm1(-H_K * math.log(2)))


def _linear(log2_value: float) -> float | None:
    if log2_value < LINEAR_LIMIT_LOG2:
        return 2.0**log2_value
    return None


def expected_spurious_keys(
    H_K: float, D: float, N: float
) -> unicity_model.SpuriousExpectation:
    if N < 0:
        raise InvalidParameterError('message length must be nonnegative')
    if H_K < 0 or D < 0:
        raise InvalidParameterError('H(K) and D must be nonnegative')
    decay = N * D
    log2_expected = log2_wrong_keys(H_K) - decay
    log2_approximation = H_K - decay
    return unicity_model.SpuriousExpectation(
        N=N,
        log2_expected=log2_expected,
        expected=_linear(log2_expected),
        log2_approximation=log2_approximation,
        approximation=_linear(log2_approximation),
        gap=2.0**-decay,
    )


def spurious_probability(R: float, R0: float, N: float) -> float:
    """Chance that a random key decrypts to a meaningful message."""
    return 2.0 ** ((R - R0) * N)


def unicity_threshold(H_K: float, D: float) -> float:
    """First whole N at which the expected spurious count drops below 1."""
    log2_wrong = log2_wrong_keys(H_K)
    if log2_wrong < 0:
        return 0
    if D == 0:
        return math.inf
    N = math.floor(log2_wrong / D) + 1
    while N > 0 and log2_wrong - (N - 1) * D < 0:
        N -= 1
    while log2_wrong - N * D >= 0:
        N += 1
    return N


def unicity_report(
    H_K: float, D: float, lengths: list[int] | None = None
) -> unicity_model.UnicityReport:
    U = unicity_distance(H_K, D)
    rows = []
    for N in lengths or []:
        expectation = expected_spurious_keys(H_K, D, N)
        rows.append(
            unicity_model.UnicityRow(
                N=N,
                log2_expected=expectation.log2_expected,
                expected=expectation.expected,
            )
        )
    return unicity_model.UnicityReport(
        H_K=H_K, D=D, U=U, threshold_N=unicity_threshold(H_K, D), rows=rows
    )


def build_toy_language(
    alphabet: alphabet_model.Alphabet, N: int, R_target: float, seed: int
) -> unicity_model.ToyLanguage:
    if N < 1:
        raise InvalidParameterError('toy languages need N >= 1')
    if R_target < 0:
        raise InvalidParameterError('entropy rate must be nonnegative')
    space = alphabet.G**N
    if space > Settings().MESSAGE_SPACE_CAP:
        raise MessageSpaceError(
            f'{alphabet.G}^{N} messages exceed the message space cap'
        )
    size = round(2.0 ** (R_target * N))
    if size > space:
        raise MessageSpaceError(
            f'{size} meaningful messages requested but only {space} '
            f'messages of length {N} exist'
        )
    if size > Settings().JOINT_CAP:
        raise MessageSpaceError(f'{size} messages exceed the set size cap')

    rng = np.random.default_rng(seed)
    codes = np.sort(rng.choice(space, size=size, replace=False))
    R_actual = math.log2(size) / N
    logger.debug('Toy language: %d of %d messages, N=%d', size, space, N)
    return unicity_model.ToyLanguage(
        alphabet=alphabet,
        N=N,
        codes=codes.astype(np.int64),
        R=R_actual,
        construction_seed=seed,
    )


def exact_set_recognizer(
    language: unicity_model.ToyLanguage,
) -> unicity_model.MeaningfulnessRecognizer:
    return unicity_model.MeaningfulnessRecognizer(
        mode='exact-set', language=language
    )


def likelihood_recognizer(
    model: ngram_model.NGramModel,
    heldout: str | np.ndarray,
    length: int,
    margin: float = 1.0,
) -> unicity_model.MeaningfulnessRecognizer:
    """Threshold = mean per-letter score of held-out windows + margin."""
    indices = lang_service.as_indices(heldout, model.alphabet)
    if length < model.order or indices.size < length:
        raise SequenceTooShortError(
            f'Cannot calibrate {length}-letter windows on '
            f'{indices.size} held-out symbols'
        )
    windows = indices[: indices.size // length * length].reshape(-1, length)
    scores = lang_service.sequence_log_likelihoods(model, windows) / length
    threshold = float(scores.mean()) + margin
    logger.info('Calibrated recognizer threshold %.4f bits/letter', threshold)
    return unicity_model.MeaningfulnessRecognizer(
        mode='likelihood-threshold', model=model, threshold=threshold
    )


def accepts(
    recognizer: unicity_model.MeaningfulnessRecognizer, candidates: np.ndarray
) -> np.ndarray:
    """Acceptance of each row of a (B, N) candidate array."""
    B, N = candidates.shape
    if N == 0:
        return np.ones(B, dtype=bool)

    if recognizer.mode == 'exact-set':
        language = recognizer.language
        if N != language.N:
            return np.zeros(B, dtype=bool)
        G = language.alphabet.G
        powers = G ** np.arange(N - 1, -1, -1, dtype=np.int64)
        codes = candidates @ powers
        position = np.searchsorted(language.codes, codes)
        position = np.minimum(position, language.size - 1)
        return language.codes[position] == codes

    scores = lang_service.sequence_log_likelihoods(
        recognizer.model, candidates
    )
    return scores / N <= recognizer.threshold


def _count_range(
    space: cipher_model.KeySpace,
    recognizer: unicity_model.MeaningfulnessRecognizer,
    ciphertext: np.ndarray,
    true_key: np.ndarray,
    start: int,
    stop: int,
) -> int:
    total = 0
    for block in cipher_service.iter_key_blocks(space, start, stop):
        wrong = (block != true_key).any(axis=1)
        decryptions = cipher_service.decrypt_block(block, ciphertext)
        total += int((accepts(recognizer, decryptions) & wrong).sum())
    return total


def count_spurious_keys(
    space: cipher_model.KeySpace,
    recognizer: unicity_model.MeaningfulnessRecognizer,
    ciphertext: str | np.ndarray,
    true_key: cipher_model.SubstitutionKey,
    workers: Workers | None = None,
) -> int:
    cipher_service.check_enumerable(space)
    ciphertext = lang_service.as_indices(ciphertext, space.alphabet)
    if ciphertext.size == 0:
        return space.key_count - 1

    workers = workers or Workers()
    ranges = split_range(space.key_count, workers.max_workers)
    true_key = np.asarray(true_key.permutation, dtype=np.int64)
    counts = workers.map(
        _count_range,
        [space] * len(ranges),
        [recognizer] * len(ranges),
        [ciphertext] * len(ranges),
        [true_key] * len(ranges),
        [start for start, _ in ranges],
        [stop for _, stop in ranges],
    )
    return sum(counts)


def _all_keys(space: cipher_model.KeySpace) -> np.ndarray:
    cipher_service.check_enumerable(space)
    return np.concatenate(list(cipher_service.iter_key_blocks(space)))


def spurious_census(
    space: cipher_model.KeySpace, language: unicity_model.ToyLanguage
) -> unicity_model.SpuriousCensus:
    """Spurious counts over every (plaintext in set, key) pair."""
    keys = _all_keys(space)
    messages = language.digits()
    if keys.shape[0] * messages.shape[0] > Settings().JOINT_CAP:
        raise InvalidParameterError('too many (message, key) pairs')

    recognizer = exact_set_recognizer(language)
    inverse = np.argsort(keys, axis=1)
    K, S = keys.shape[0], messages.shape[0]
    counts = np.empty((K, S), dtype=np.int64)
    for t in range(K):
        ciphertexts = keys[t][messages]
        decryptions = inverse[:, ciphertexts]
        accepted = accepts(recognizer, decryptions.reshape(-1, language.N))
        accepted = accepted.reshape(K, S)
        counts[t] = accepted.sum(axis=0) - accepted[t]

    pairs = counts.size
    se = counts.std(ddof=1) / math.sqrt(pairs) if pairs > 1 else math.inf
    return unicity_model.SpuriousCensus(
        mean=float(counts.mean()), se=float(se), pairs=pairs
    )


def _stirling2(n: int, k: int) -> int:
    row = [1] + [0] * k
    for i in range(1, n + 1):
        for j in range(min(i, k), 0, -1):
            row[j] = j * row[j] + row[j - 1]
        row[0] = 0
    return row[k]


def exact_expected_spurious(
    space: cipher_model.KeySpace, N: int, set_size: int
) -> float:
    """Mean spurious count for a uniformly drawn set holding the plaintext.

    Wrong keys fixing every letter of the plaintext always decrypt to it;
    the others land on one of the remaining messages, each in the set with
    probability (set_size - 1) / (G^N - 1).
    """
    K = space.key_count
    if N == 0:
        return float(K - 1)
    G = space.alphabet.G
    M = G**N
    hit = Fraction(set_size - 1, M - 1)
    if space.kind != 'substitution':
        return float((K - 1) * hit)

    total = Fraction(0)
    for d in range(1, min(G, N) + 1):
        strings = math.comb(G, d) * math.factorial(d) * _stirling2(N, d)
        fixing = math.factorial(G - d) - 1
        total += strings * (fixing + (K - 1 - fixing) * hit)
    return float(total / M)


def _seed_census(
    alphabet: alphabet_model.Alphabet,
    kind: cipher_model.CipherKind,
    N: int,
    R: float,
    seed: int,
) -> tuple[float, int]:
    space = cipher_service.build_key_space(kind, alphabet)
    language = build_toy_language(alphabet, N, R, seed)
    return spurious_census(space, language).mean, language.size


def hellman_check(
    alphabet: alphabet_model.Alphabet,
    kind: cipher_model.CipherKind,
    N: int,
    R: float,
    seeds: list[int],
    workers: Workers | None = None,
) -> unicity_model.HellmanCheck:
    if not seeds:
        raise InvalidParameterError('at least one construction seed needed')
    workers = workers or Workers()
    space = cipher_service.build_key_space(kind, alphabet)
    results = workers.map(
        _seed_census,
        [alphabet] * len(seeds),
        [kind] * len(seeds),
        [N] * len(seeds),
        [R] * len(seeds),
        seeds,
    )
    means = np.array([mean for mean, _ in results])
    size = results[0][1]
    R_actual = math.log2(size) / N
    R0 = lang_service.absolute_rate(alphabet)
    se = (
        means.std(ddof=1) / math.sqrt(means.size)
        if means.size > 1
        else math.inf
    )
    return unicity_model.HellmanCheck(
        N=N,
        R=R_actual,
        key_count=space.key_count,
        seeds=list(seeds),
        seed_means=means.tolist(),
        grand_mean=float(means.mean()),
        combined_se=float(se),
        hellman_prediction=(
            (space.key_count - 1) * spurious_probability(R_actual, R0, N)
        ),
        exact_expectation=exact_expected_spurious(space, N, size),
    )


def _sample_keys(
    space: cipher_model.KeySpace, rng: np.random.Generator, count: int
) -> np.ndarray:
    G = space.alphabet.G
    if space.kind == 'identity':
        return np.tile(np.arange(G, dtype=np.int64), (count, 1))
    if space.kind == 'shift':
        shifts = rng.integers(G, size=(count, 1))
        return (np.arange(G)[None, :] + shifts) % G
    identity = np.tile(np.arange(G, dtype=np.int64), (count, 1))
    return rng.permuted(identity, axis=1)


def _sample_plaintext(
    recognizer: unicity_model.MeaningfulnessRecognizer,
    N: int,
    rng: np.random.Generator,
    source: np.ndarray | None,
    seed: int,
) -> np.ndarray:
    if recognizer.mode == 'exact-set':
        language = recognizer.language
        if N != language.N:
            raise InvalidParameterError(
                f'toy language has N={language.N}, not {N}'
            )
        return language.digits()[rng.integers(language.size)]
    if source is not None:
        if source.size < N:
            raise SequenceTooShortError('plaintext source is too short')
        start = int(rng.integers(source.size - N + 1))
        return source[start : start + N]
    return lang_service.generate_text(recognizer.model, N, seed)


def _monte_carlo_trial(
    space: cipher_model.KeySpace,
    recognizer: unicity_model.MeaningfulnessRecognizer,
    N: int,
    samples: int,
    seed: int,
    trial: int,
    source: np.ndarray | None,
) -> float:
    rng = make_rng(seed, trial)
    plaintext = _sample_plaintext(
        recognizer, N, rng, source, derive_seed(seed, trial, 1)
    )
    true_key = cipher_service.sample_key(space, rng)
    ciphertext = cipher_service.encrypt(true_key, plaintext, space.alphabet)

    keys = _sample_keys(space, rng, samples)
    wrong = (keys != np.asarray(true_key.permutation)).any(axis=1)
    if not wrong.any():
        return 0.0
    decryptions = cipher_service.decrypt_block(keys, ciphertext)
    accepted = accepts(recognizer, decryptions) & wrong
    return float(accepted.sum() / wrong.sum()) * (space.key_count - 1)


def monte_carlo_spurious(
    space: cipher_model.KeySpace,
    recognizer: unicity_model.MeaningfulnessRecognizer,
    N: int,
    trials: int,
    seed: int,
    samples_per_trial: int = 1000,
    plaintext_source: str | np.ndarray | None = None,
    workers: Workers | None = None,
) -> unicity_model.SpuriousEstimate:
    if trials < 1 or samples_per_trial < 1:
        raise InvalidParameterError('trials and samples must be positive')
    if N < 0:
        raise InvalidParameterError('message length must be nonnegative')
    source = None
    if plaintext_source is not None:
        source = lang_service.as_indices(plaintext_source, space.alphabet)

    workers = workers or Workers()
    estimates = np.array(
        workers.map(
            _monte_carlo_trial,
            [space] * trials,
            [recognizer] * trials,
            [N] * trials,
            [samples_per_trial] * trials,
            [seed] * trials,
            range(trials),
            [source] * trials,
        ),
        dtype=np.float64,
    )
    se = (
        estimates.std(ddof=1) / math.sqrt(trials) if trials > 1 else math.inf
    )
    logger.info(
        'Monte Carlo spurious estimate at N=%d: %.4g (%d trials)',
        N,
        estimates.mean(),
        trials,
    )
    return unicity_model.SpuriousEstimate(
        N=N,
        mean=float(estimates.mean()),
        se=float(se),
        trials=trials,
        samples_per_trial=samples_per_trial,
        seed=seed,
    )
