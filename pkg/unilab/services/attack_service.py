import logging
import math

import numpy as np

from unilab.core.seeding import derive_seed, make_rng
from unilab.core.workers import Workers
from unilab.exceptions import InvalidParameterError, SequenceTooShortError
from unilab.schemas import attack_model, cipher_model, ngram_model
from unilab.services import cipher_service, lang_service, unicity_service

logger = logging.getLogger(__name__)


class DecryptionScorer:
    """Scores decryption maps (cipher index -> plain index) in bits.

    The ciphertext is reduced to its distinct n-gram windows and their
    multiplicities, so a score costs one gather over those windows.
    """

    def __init__(self, model: ngram_model.NGramModel, ciphertext: np.ndarray):
        G, n = model.alphabet.G, model.order
        codes = lang_service.window_codes(ciphertext, n, G)
        unique, self.weights = np.unique(codes, return_counts=True)
        powers = G ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self.windows = (unique[:, None] // powers) % G
        self.powers = powers
        self.log2_table = lang_service.conditional_log2(model)

    def __call__(self, decryption: np.ndarray) -> float:
        plain = decryption[self.windows] @ self.powers
        return float(-(self.weights @ self.log2_table[plain]))


def frequency_decryption(
    model: ngram_model.NGramModel, ciphertext: np.ndarray
) -> np.ndarray:
    """Map the k-th most frequent ciphertext symbol to the k-th plaintext."""
    G = model.alphabet.G
    cipher_counts = np.bincount(ciphertext, minlength=G)
    cipher_rank = np.argsort(-cipher_counts, kind='stable')
    plain_rank = np.argsort(
        -lang_service.symbol_frequencies(model), kind='stable'
    )
    decryption = np.empty(G, dtype=np.int64)
    decryption[cipher_rank] = plain_rank
    return decryption


def _run_chain(
    config: attack_model.AttackConfig, ciphertext: np.ndarray, chain: int
) -> tuple[float, np.ndarray, list[float]]:
    G = config.model.alphabet.G
    score = DecryptionScorer(config.model, ciphertext)
    rng = make_rng(config.seed, chain)
    first = rng.integers(G, size=config.iterations)
    second = (first + rng.integers(1, G, size=config.iterations)) % G
    draws = rng.random(config.iterations)

    decryption = frequency_decryption(config.model, ciphertext)
    current = score(decryption)
    best, best_decryption = current, decryption.copy()
    trace = []
    for step in range(config.iterations):
        a, b = first[step], second[step]
        decryption[a], decryption[b] = decryption[b], decryption[a]
        proposed = score(decryption)
        improvement = current - proposed
        if improvement >= 0 or draws[step] < 2.0 ** (
            improvement / config.temperature
        ):
            current = proposed
            if current < best:
                best, best_decryption = current, decryption.copy()
        else:
            decryption[a], decryption[b] = decryption[b], decryption[a]
        if (step + 1) % config.checkpoint_interval == 0:
            trace.append(best)
    return best, best_decryption, trace


def mcmc_crack(
    ciphertext: str | np.ndarray,
    config: attack_model.AttackConfig,
    true_key: cipher_model.SubstitutionKey | None = None,
    workers: Workers | None = None,
) -> attack_model.AttackResult:
    alphabet = config.model.alphabet
    ciphertext = lang_service.as_indices(ciphertext, alphabet)
    if ciphertext.size < config.model.order:
        raise SequenceTooShortError(
            f'Ciphertext of {ciphertext.size} symbols is shorter than the '
            f'model order {config.model.order}'
        )

    workers = workers or Workers()
    chains = config.restarts + 1
    runs = workers.map(
        _run_chain, [config] * chains, [ciphertext] * chains, range(chains)
    )

    best_chain = min(range(chains), key=lambda c: (runs[c][0], c))
    best_score, decryption, _ = runs[best_chain]
    trace = np.minimum.accumulate(
        np.concatenate([np.asarray(t, dtype=np.float64) for *_, t in runs])
    )
    best_key = cipher_model.SubstitutionKey(
        permutation=tuple(np.argsort(decryption).tolist())
    )
    plaintext = decryption[ciphertext]

    key_accuracy = plaintext_accuracy = None
    if true_key is not None:
        truth = np.asarray(true_key.permutation)
        key_accuracy = float((np.argsort(decryption) == truth).mean())
        plaintext_accuracy = float(
            (plaintext == np.argsort(truth)[ciphertext]).mean()
        )
    logger.debug(
        'MCMC best score %.2f bits over %d chains', best_score, chains
    )

    return attack_model.AttackResult(
        best_key=best_key,
        best_score=best_score,
        score_trace=trace.tolist(),
        key_accuracy=key_accuracy,
        plaintext_accuracy=plaintext_accuracy,
        plaintext=alphabet.decode(plaintext),
        chain_scores=[run[0] for run in runs],
        chain_keys=[
            cipher_model.SubstitutionKey(
                permutation=tuple(np.argsort(run[1]).tolist())
            )
            for run in runs
        ],
        iterations=config.iterations,
        seed=config.seed,
    )


def _recovery_trial(
    config: attack_model.AttackConfig, corpus: np.ndarray, N: int, trial: int
) -> attack_model.RecoveryTrial:
    alphabet = config.model.alphabet
    space = cipher_service.build_key_space('substitution', alphabet)
    rng = make_rng(config.seed, N, trial)
    start = int(rng.integers(corpus.size - N + 1))
    plaintext = corpus[start : start + N]
    key = cipher_service.sample_key(space, rng)
    ciphertext = cipher_service.encrypt(key, plaintext, alphabet)

    seed = derive_seed(config.seed, N, trial)
    result = mcmc_crack(
        ciphertext, config.model_copy(update={'seed': seed}), key
    )
    return attack_model.RecoveryTrial(
        N=N,
        trial=trial,
        key_accuracy=result.key_accuracy,
        plaintext_accuracy=result.plaintext_accuracy,
        best_score_bits=result.best_score,
        iterations=result.iterations,
        seed=seed,
    )


def _summarize(
    N: int, trials: list[attack_model.RecoveryTrial], threshold: float
):
    accuracy = np.array([t.plaintext_accuracy for t in trials])
    key_accuracy = np.array([t.key_accuracy for t in trials])
    se = (
        accuracy.std(ddof=1) / math.sqrt(accuracy.size)
        if accuracy.size > 1
        else math.inf
    )
    return attack_model.RecoverySummary(
        N=N,
        trials=accuracy.size,
        mean_plaintext_accuracy=float(accuracy.mean()),
        se_plaintext_accuracy=float(se),
        median_plaintext_accuracy=float(np.median(accuracy)),
        q10_plaintext_accuracy=float(np.quantile(accuracy, 0.1)),
        q90_plaintext_accuracy=float(np.quantile(accuracy, 0.9)),
        mean_key_accuracy=float(key_accuracy.mean()),
        success_rate=float((accuracy >= threshold).mean()),
    )


def recovery_curve(
    lengths: list[int],
    trials_per_length: int,
    config: attack_model.AttackConfig,
    corpus: str | np.ndarray,
    success_threshold: float = 0.9,
    workers: Workers | None = None,
) -> attack_model.RecoveryCurve:
    if not lengths:
        raise InvalidParameterError('at least one ciphertext length needed')
    if trials_per_length < 1:
        raise InvalidParameterError('trials_per_length must be at least 1')
    model = config.model
    corpus = lang_service.as_indices(corpus, model.alphabet)
    if corpus.size < max(lengths):
        raise SequenceTooShortError(
            f'Corpus of {corpus.size} symbols is shorter than the longest '
            f'requested ciphertext ({max(lengths)})'
        )
    if min(lengths) < model.order:
        raise SequenceTooShortError('lengths must reach the model order')

    tasks = [(N, t) for N in lengths for t in range(trials_per_length)]
    workers = workers or Workers()
    logger.info('Running %d attack trials', len(tasks))
    trials = workers.map(
        _recovery_trial,
        [config] * len(tasks),
        [corpus] * len(tasks),
        [N for N, _ in tasks],
        [t for _, t in tasks],
    )

    H_K = cipher_service.log2_key_count('substitution', model.alphabet.G)
    D = lang_service.redundancy(model).D
    return attack_model.RecoveryCurve(
        key_entropy=H_K,
        redundancy=D,
        model_order=model.order,
        unicity_distance=unicity_service.unicity_distance(H_K, max(D, 0.0)),
        success_threshold=success_threshold,
        summaries=[
            _summarize(
                N, [t for t in trials if t.N == N], success_threshold
            )
            for N in dict.fromkeys(lengths)
        ],
        trials=trials,
    )
