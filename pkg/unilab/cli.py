import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from unilab import __version__
from unilab.commands import attack, channel, corpus_stats, spurious, unicity
from unilab.config import Settings
from unilab.core.log import setup_logging
from unilab.core.seeding import fresh_seed
from unilab.core.workers import Workers
from unilab.exceptions import USAGE_FAILURE, ConfigError, UnilabException
from unilab.repositories import report_repository
from unilab.schemas.experiment_model import ExperimentConfig

logger = logging.getLogger(__name__)

COMMANDS = [corpus_stats, unicity, spurious, channel, attack]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, default=argparse.SUPPRESS)
    common.add_argument('--seed', type=int, default=argparse.SUPPRESS)
    common.add_argument('--workers', type=int, default=argparse.SUPPRESS)
    common.add_argument(
        '--format', choices=['csv', 'json'], default=argparse.SUPPRESS
    )
    common.add_argument('--out', type=Path, default=argparse.SUPPRESS)
    common.add_argument(
        '--log-level',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        default=argparse.SUPPRESS,
    )

    parser = argparse.ArgumentParser(
        prog='unilab',
        description='Unicity distance experiments',
        parents=[common],
    )
    parser.add_argument('--version', action='version', version=__version__)
    subparsers = parser.add_subparsers(dest='command', required=True)
    for command in COMMANDS:
        command.register(subparsers, [common])
    return parser


def load_config(path: Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        return ExperimentConfig.model_validate_json(
            Path(path).read_text(encoding='utf-8')
        )
    except OSError as e:
        raise ConfigError(f'Cannot read config {path}: {e.strerror}')
    except ValidationError as e:
        raise ConfigError(f'Invalid config {path}: {e}')


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(getattr(args, 'config', None))
    updates = {
        name: getattr(args, name)
        for name in ('seed', 'workers', 'format', 'out', 'log_level')
        if hasattr(args, name)
    }
    if 'out' in updates:
        updates['out'] = str(updates['out'])
    config = ExperimentConfig.model_validate({
        **config.model_dump(),
        **updates,
    })
    config = args.override(config, args)
    if config.seed is None:
        config = config.model_copy(update={'seed': fresh_seed()})
    return config


def render(command: str, config: ExperimentConfig, output) -> str:
    resolved = config.model_dump(mode='json')
    seeds = {'seed': config.seed}
    if config.format == 'csv':
        header = (
            f'# tool=unilab version={__version__} command={command} '
            f'seed={config.seed}\n'
            f'# config={json.dumps(resolved, sort_keys=True)}\n'
        )
        return header + report_repository.render_csv(
            output.columns, output.rows
        )
    document = report_repository.build_document(
        command, resolved, seeds, output.result
    )
    return report_repository.render_json(document)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, 'log_level', None) or Settings().LOG_LEVEL)

    try:
        config = resolve_config(args)
        if config.log_level:
            setup_logging(config.log_level)
        logger.info('Running %s with seed %d', args.command, config.seed)
        with Workers(config.workers) as workers:
            output = args.handler(config, workers)
        text = render(args.command, config, output)
    except UnilabException as e:
        print(f'error: {e.detail}', file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f'error: invalid parameters: {e}', file=sys.stderr)
        return USAGE_FAILURE

    if config.out:
        try:
            report_repository.write_text(config.out, text)
        except OSError as e:
            print(f'error: cannot write {config.out}: {e}', file=sys.stderr)
            return USAGE_FAILURE
    else:
        sys.stdout.write(text)
    return 0


if __name__ == '__main__':
    raise SystemExit(main())
