import logging

from unilab.commands.common import load_text, override_block, suppressed
from unilab.core.workers import Workers
from unilab.exceptions import ConfigError
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.experiment_model import (
    CommandOutput,
    ExperimentConfig,
    UnicityConfig,
)
from unilab.services import cipher_service, lang_service, unicity_service

logger = logging.getLogger(__name__)

COLUMNS = [
    'N',
    'H_K_bits',
    'D_bits_per_letter',
    'expected_spurious_log2',
    'expected_spurious',
    'U',
]


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'unicity',
        parents=parents,
        help='unicity distance and expected spurious keys',
    )
    suppressed(
        parser, '--cipher', choices=['substitution', 'shift', 'identity']
    )
    suppressed(parser, '--alphabet')
    suppressed(parser, '-D', '--redundancy', dest='D', type=float)
    suppressed(parser, '--corpus')
    suppressed(parser, '--order', type=int)
    suppressed(parser, '--alpha', type=float)
    suppressed(parser, '--lengths', type=int, nargs='+')
    parser.set_defaults(handler=run, override=override)


def override(config: ExperimentConfig, args) -> ExperimentConfig:
    return override_block(
        config,
        'unicity',
        args,
        ['cipher', 'alphabet', 'D', 'corpus', 'order', 'alpha', 'lengths'],
    )


def measure_redundancy(block: UnicityConfig, alphabet: Alphabet) -> float:
    if block.D is not None:
        return block.D
    if block.corpus is None:
        raise ConfigError('Supply either a redundancy (-D) or a corpus')
    text = load_text(block.corpus, alphabet)
    model = lang_service.fit_ngram(text, alphabet, block.order, block.alpha)
    return lang_service.redundancy(model).D


def run(config: ExperimentConfig, workers: Workers) -> CommandOutput:
    block = config.unicity
    alphabet = Alphabet.from_profile(block.alphabet)
    H_K = cipher_service.log2_key_count(block.cipher, alphabet.G)
    D = measure_redundancy(block, alphabet)
    if D <= 0:
        logger.warning('Redundancy %.4g <= 0: no finite unicity distance', D)
        D = 0.0

    report = unicity_service.unicity_report(H_K, D, block.lengths)
    rows = [
        {
            'N': row.N,
            'H_K_bits': H_K,
            'D_bits_per_letter': D,
            'expected_spurious_log2': row.log2_expected,
            'expected_spurious': row.expected,
            'U': report.U,
        }
        for row in report.rows
    ]
    return CommandOutput(
        result=report.model_dump(mode='json'),
        columns=COLUMNS,
        rows=rows,
    )
