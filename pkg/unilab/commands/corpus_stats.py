import numpy as np

from unilab.commands.common import (
    load_text,
    override_block,
    suppressed,
)
from unilab.core.workers import Workers
from unilab.repositories import model_repository
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.experiment_model import CommandOutput, ExperimentConfig
from unilab.services import lang_service

COLUMNS = ['order', 'R0', 'R', 'D', 'symbols']


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'corpus-stats',
        parents=parents,
        help='entropy rate and redundancy of a corpus',
    )
    suppressed(parser, 'corpus', nargs='?')
    suppressed(parser, '--alphabet')
    suppressed(parser, '--orders', type=int, nargs='+')
    suppressed(parser, '--alpha', type=float)
    suppressed(parser, '--save-model', dest='save_model')
    parser.set_defaults(handler=run, override=override)


def override(config: ExperimentConfig, args) -> ExperimentConfig:
    return override_block(
        config,
        'corpus_stats',
        args,
        ['corpus', 'alphabet', 'orders', 'alpha', 'save_model'],
    )


def run(config: ExperimentConfig, workers: Workers) -> CommandOutput:
    block = config.corpus_stats
    alphabet = Alphabet.from_profile(block.alphabet)
    text = load_text(block.corpus, alphabet)

    indices = alphabet.encode(text)
    estimates = lang_service.entropy_profile(
        indices, alphabet, block.orders, block.alpha
    )
    if block.save_model:
        model = lang_service.fit_ngram(
            indices, alphabet, block.orders[-1], block.alpha
        )
        model_repository.save_model(model, block.save_model)

    counts = np.bincount(indices, minlength=alphabet.G).tolist()
    rows = [
        {**estimate.model_dump(), 'symbols': len(text)}
        for estimate in estimates
    ]
    return CommandOutput(
        result={
            'R0': lang_service.absolute_rate(alphabet),
            'symbols': len(text),
            'symbol_counts': dict(zip(alphabet.symbols, counts)),
            'estimates': [e.model_dump() for e in estimates],
        },
        columns=COLUMNS,
        rows=rows,
    )
