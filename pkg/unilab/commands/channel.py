from unilab.commands.common import override_block, suppressed
from unilab.core.workers import Workers
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.experiment_model import CommandOutput, ExperimentConfig
from unilab.services import channel_service

COLUMNS = [
    'N',
    'I_theoretical',
    'I_empA',
    'I_empB',
    'reliable',
    'N_min',
    'clamped',
]


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'channel',
        parents=parents,
        help='secrecy system as a channel: theoretical and exact MI',
    )
    suppressed(
        parser, '--cipher', choices=['substitution', 'shift', 'identity']
    )
    suppressed(parser, '--alphabet')
    suppressed(parser, '--lengths', type=int, nargs='+')
    suppressed(parser, '-R', '--rate', dest='R', type=float)
    parser.set_defaults(handler=run, override=override)


def override(config: ExperimentConfig, args) -> ExperimentConfig:
    return override_block(
        config, 'channel', args, ['cipher', 'alphabet', 'lengths', 'R']
    )


def run(config: ExperimentConfig, workers: Workers) -> CommandOutput:
    block = config.channel
    reports = channel_service.channel_sweep(
        Alphabet.from_profile(block.alphabet),
        block.cipher,
        block.lengths,
        block.R,
        config.seed,
        workers,
    )
    rows = [
        {
            'N': report.N,
            'I_theoretical': report.I_theoretical,
            'I_empA': report.I_empirical_decompA,
            'I_empB': report.I_empirical_decompB,
            'reliable': report.reliable,
            'N_min': report.N_min,
            'clamped': report.clamped,
        }
        for report in reports
    ]
    return CommandOutput(
        result={'reports': [r.model_dump(mode='json') for r in reports]},
        columns=COLUMNS,
        rows=rows,
    )
