import logging
import math

import numpy as np

from unilab.commands.common import (
    load_text,
    override_block,
    split_text,
    suppressed,
)
from unilab.core.seeding import derive_seed, make_rng
from unilab.core.workers import Workers
from unilab.exceptions import EnumerationCapError
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.experiment_model import (
    CommandOutput,
    ExperimentConfig,
    SpuriousConfig,
)
from unilab.schemas.cipher_model import KeySpace
from unilab.schemas.unicity_model import (
    MeaningfulnessRecognizer,
    SpuriousEstimate,
)
from unilab.services import cipher_service, lang_service, unicity_service

logger = logging.getLogger(__name__)

COLUMNS = [
    'N',
    'H_K_bits',
    'D_bits_per_letter',
    'expected_spurious_log2',
    'observed_mean',
    'observed_se',
    'trials',
    'seed',
]


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'spurious',
        parents=parents,
        help='observed against predicted spurious key counts',
    )
    suppressed(
        parser, '--cipher', choices=['substitution', 'shift', 'identity']
    )
    suppressed(parser, '--alphabet')
    suppressed(parser, '--lengths', type=int, nargs='+')
    suppressed(parser, '-R', '--rate', dest='R', type=float)
    suppressed(parser, '--construction-seeds', type=int)
    suppressed(parser, '--monte-carlo', action='store_true')
    suppressed(parser, '--trials', type=int)
    suppressed(parser, '--samples-per-trial', type=int)
    suppressed(parser, '--corpus')
    suppressed(parser, '--order', type=int)
    suppressed(parser, '--alpha', type=float)
    suppressed(parser, '--margin', type=float)
    suppressed(parser, '--train-fraction', type=float)
    parser.set_defaults(handler=run, override=override)


def override(config: ExperimentConfig, args) -> ExperimentConfig:
    return override_block(
        config,
        'spurious',
        args,
        list(SpuriousConfig.model_fields),
    )


def _row(N: int, H_K: float, D: float, observed: dict) -> dict:
    expectation = unicity_service.expected_spurious_keys(H_K, D, N)
    return {
        'N': N,
        'H_K_bits': H_K,
        'D_bits_per_letter': D,
        'expected_spurious_log2': expectation.log2_expected,
        **observed,
    }


def _observed(estimate: SpuriousEstimate) -> dict:
    return {
        'observed_mean': estimate.mean,
        'observed_se': estimate.se,
        'trials': estimate.trials,
        'seed': estimate.seed,
    }


def run_toy(block: SpuriousConfig, seed: int, workers: Workers):
    alphabet = Alphabet.from_profile(block.alphabet)
    space = cipher_service.build_key_space(block.cipher, alphabet)
    H_K = space.key_entropy_bits
    R0 = lang_service.absolute_rate(alphabet)
    rows, results = [], []
    for N in block.lengths:
        if block.monte_carlo:
            language = unicity_service.build_toy_language(
                alphabet, N, block.R, derive_seed(seed, N)
            )
            recognizer = unicity_service.exact_set_recognizer(language)
            estimate = unicity_service.monte_carlo_spurious(
                space,
                recognizer,
                N,
                block.trials,
                derive_seed(seed, N, 1),
                block.samples_per_trial,
                workers=workers,
            )
            D = R0 - language.R
            rows.append(_row(N, H_K, D, _observed(estimate)))
            results.append(estimate.model_dump(mode='json'))
            continue

        seeds = [
            derive_seed(seed, N, i) for i in range(block.construction_seeds)
        ]
        check = unicity_service.hellman_check(
            alphabet, block.cipher, N, block.R, seeds, workers
        )
        observed = {
            'observed_mean': check.grand_mean,
            'observed_se': check.combined_se,
            'trials': len(seeds),
            'seed': seed,
        }
        rows.append(_row(N, H_K, R0 - check.R, observed))
        results.append(check.model_dump(mode='json'))
    return rows, results


def _exhaustive_trial(
    space: KeySpace,
    recognizer: MeaningfulnessRecognizer,
    heldout: np.ndarray,
    N: int,
    seed: int,
    trial: int,
    workers: Workers,
) -> int:
    rng = make_rng(seed, N, trial)
    start = int(rng.integers(heldout.size - N + 1))
    plaintext = heldout[start : start + N]
    key = cipher_service.sample_key(space, rng)
    ciphertext = cipher_service.encrypt(key, plaintext, space.alphabet)
    return unicity_service.count_spurious_keys(
        space, recognizer, ciphertext, key, workers
    )


def run_likelihood(block: SpuriousConfig, seed: int, workers: Workers):
    alphabet = Alphabet.from_profile(block.alphabet)
    space = cipher_service.build_key_space(block.cipher, alphabet)
    if not block.monte_carlo:
        try:
            cipher_service.check_enumerable(space)
        except EnumerationCapError as e:
            raise EnumerationCapError(
                f'{e.detail}; rerun with --monte-carlo'
            )

    train, heldout = split_text(
        load_text(block.corpus, alphabet), block.train_fraction
    )
    model = lang_service.fit_ngram(train, alphabet, block.order, block.alpha)
    D = lang_service.redundancy(model).D
    heldout = alphabet.encode(heldout)
    H_K = space.key_entropy_bits

    rows, results = [], []
    for N in block.lengths:
        recognizer = unicity_service.likelihood_recognizer(
            model, heldout, N, block.margin
        )
        if block.monte_carlo:
            estimate = unicity_service.monte_carlo_spurious(
                space,
                recognizer,
                N,
                block.trials,
                derive_seed(seed, N),
                block.samples_per_trial,
                plaintext_source=heldout,
                workers=workers,
            )
            observed = _observed(estimate)
            results.append(estimate.model_dump(mode='json'))
        else:
            counts = [
                _exhaustive_trial(
                    space, recognizer, heldout, N, seed, trial, workers
                )
                for trial in range(block.trials)
            ]
            observed = _summarize_counts(counts, seed)
            results.append({
                'N': N,
                'counts': counts,
                'threshold': recognizer.threshold,
            })
        logger.info(
            'N=%d: observed %.4g spurious keys', N, observed['observed_mean']
        )
        rows.append(_row(N, H_K, D, observed))
    return rows, results


def _summarize_counts(counts: list[int], seed: int) -> dict:
    counts = np.asarray(counts, dtype=np.float64)
    se = (
        counts.std(ddof=1) / math.sqrt(counts.size)
        if counts.size > 1
        else math.inf
    )
    return {
        'observed_mean': float(counts.mean()),
        'observed_se': float(se),
        'trials': int(counts.size),
        'seed': seed,
    }


def run(config: ExperimentConfig, workers: Workers) -> CommandOutput:
    block = config.spurious
    if block.corpus is None:
        rows, results = run_toy(block, config.seed, workers)
    else:
        rows, results = run_likelihood(block, config.seed, workers)
    return CommandOutput(
        result={'experiments': results},
        columns=COLUMNS,
        rows=rows,
    )
