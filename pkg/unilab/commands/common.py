import argparse

from pydantic import BaseModel

from unilab.exceptions import ConfigError
from unilab.repositories import corpus_repository
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.experiment_model import ExperimentConfig
from unilab.services import lang_service


def override_block(
    config: ExperimentConfig,
    block: str,
    args: argparse.Namespace,
    names: list[str],
) -> ExperimentConfig:
    """Replace the block fields given on the command line."""
    current: BaseModel = getattr(config, block)
    updates = {
        name: getattr(args, name) for name in names if hasattr(args, name)
    }
    if not updates:
        return config
    updated = type(current).model_validate({
        **current.model_dump(),
        **updates,
    })
    return config.model_copy(update={block: updated})


def load_text(path: str | None, alphabet: Alphabet) -> str:
    if path is None:
        raise ConfigError('A corpus path is required for this command')
    return lang_service.normalize_text(
        corpus_repository.read_corpus(path), alphabet
    )


def split_text(text: str, train_fraction: float) -> tuple[str, str]:
    cut = int(len(text) * train_fraction)
    return text[:cut], text[cut:]


def suppressed(parser: argparse.ArgumentParser, *flags: str, **kwargs):
    parser.add_argument(*flags, default=argparse.SUPPRESS, **kwargs)
