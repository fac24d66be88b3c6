import logging
from pathlib import Path

from unilab.commands.common import (
    load_text,
    override_block,
    split_text,
    suppressed,
)
from unilab.core.workers import Workers
from unilab.exceptions import ConfigError, CorpusError
from unilab.repositories import key_repository, model_repository
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.attack_model import AttackConfig
from unilab.schemas.experiment_model import (
    AttackExperimentConfig,
    CommandOutput,
    ExperimentConfig,
)
from unilab.schemas.ngram_model import NGramModel
from unilab.services import attack_service, cipher_service, lang_service

logger = logging.getLogger(__name__)

COLUMNS = [
    'N',
    'trial',
    'key_accuracy',
    'plaintext_accuracy',
    'best_score_bits',
    'iterations',
    'seed',
]


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'attack',
        parents=parents,
        help='MCMC key search and plaintext recovery curves',
    )
    suppressed(parser, '--corpus')
    suppressed(parser, '--model')
    suppressed(parser, '--alphabet')
    suppressed(parser, '--train-fraction', type=float)
    suppressed(parser, '--order', type=int)
    suppressed(parser, '--alpha', type=float)
    suppressed(parser, '--iterations', type=int)
    suppressed(parser, '--restarts', type=int)
    suppressed(parser, '--temperature', type=float)
    suppressed(parser, '--checkpoint-interval', type=int)
    suppressed(parser, '--lengths', type=int, nargs='+')
    suppressed(parser, '--trials-per-length', type=int)
    suppressed(parser, '--success-threshold', type=float)
    suppressed(parser, '--ciphertext')
    suppressed(parser, '--ciphertext-file')
    suppressed(parser, '--key')
    suppressed(parser, '--key-file')
    parser.set_defaults(handler=run, override=override)


def override(config: ExperimentConfig, args) -> ExperimentConfig:
    return override_block(
        config, 'attack', args, list(AttackExperimentConfig.model_fields)
    )


def _attack_config(
    block: AttackExperimentConfig, model: NGramModel, seed: int
) -> AttackConfig:
    return AttackConfig(
        model=model,
        iterations=block.iterations,
        restarts=block.restarts,
        seed=seed,
        temperature=block.temperature,
        checkpoint_interval=block.checkpoint_interval,
    )


def run_curve(
    block: AttackExperimentConfig, seed: int, workers: Workers
) -> CommandOutput:
    alphabet = Alphabet.from_profile(block.alphabet)
    train, heldout = split_text(
        load_text(block.corpus, alphabet), block.train_fraction
    )
    if block.model:
        model = model_repository.load_model(block.model)
    else:
        model = lang_service.fit_ngram(
            train, alphabet, block.order, block.alpha
        )
    curve = attack_service.recovery_curve(
        block.lengths,
        block.trials_per_length,
        _attack_config(block, model, seed),
        alphabet.encode(heldout),
        block.success_threshold,
        workers,
    )
    return CommandOutput(
        result=curve.model_dump(mode='json', exclude={'trials'}),
        columns=COLUMNS,
        rows=[trial.model_dump() for trial in curve.trials],
    )


def _read_ciphertext(block: AttackExperimentConfig) -> str:
    if block.ciphertext is not None:
        return block.ciphertext
    if block.ciphertext_file is None:
        raise ConfigError(
            'Give --lengths for a recovery curve, or a ciphertext to crack'
        )
    try:
        return Path(block.ciphertext_file).read_text(encoding='utf-8')
    except OSError as e:
        raise CorpusError(
            f'Cannot read ciphertext {block.ciphertext_file}: {e.strerror}'
        )


def _true_key(block: AttackExperimentConfig, alphabet: Alphabet):
    if block.key is not None:
        return cipher_service.key_from_string(block.key, alphabet)
    if block.key_file is not None:
        keys = key_repository.read_keys(block.key_file, alphabet)
        if not keys:
            raise ConfigError(f'No key found in {block.key_file}')
        return keys[0]
    return None


def run_single(
    block: AttackExperimentConfig, seed: int, workers: Workers
) -> CommandOutput:
    if block.model:
        model = model_repository.load_model(block.model)
    elif block.corpus:
        alphabet = Alphabet.from_profile(block.alphabet)
        train, _ = split_text(
            load_text(block.corpus, alphabet), block.train_fraction
        )
        model = lang_service.fit_ngram(
            train, alphabet, block.order, block.alpha
        )
    else:
        raise ConfigError('The attack needs a --model or a --corpus')

    alphabet = model.alphabet
    ciphertext = lang_service.normalize_text(
        _read_ciphertext(block), alphabet
    )
    result = attack_service.mcmc_crack(
        ciphertext,
        _attack_config(block, model, seed),
        _true_key(block, alphabet),
        workers,
    )
    logger.info('Best decryption scores %.2f bits', result.best_score)
    row = {
        'N': len(ciphertext),
        'trial': 0,
        'key_accuracy': result.key_accuracy,
        'plaintext_accuracy': result.plaintext_accuracy,
        'best_score_bits': result.best_score,
        'iterations': result.iterations,
        'seed': result.seed,
    }
    return CommandOutput(
        result={
            **result.model_dump(mode='json'),
            'best_key': cipher_service.key_to_string(
                result.best_key, alphabet
            ),
        },
        columns=COLUMNS,
        rows=[row],
    )


def run(config: ExperimentConfig, workers: Workers) -> CommandOutput:
    block = config.attack
    if block.lengths:
        return run_curve(block, config.seed, workers)
    return run_single(block, config.seed, workers)
