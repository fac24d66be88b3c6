from pathlib import Path

from unilab.config import Settings
from unilab.exceptions import CorpusError


def resolve_path(path: str | Path) -> Path:
    path = Path(path)
    if path.is_absolute() or path.exists():
        return path
    return Settings().CORPUS_DIR / path


def read_corpus(path: str | Path) -> str:
    resolved = resolve_path(path)
    try:
        return resolved.read_text(encoding='utf-8', errors='replace')
    except OSError as e:
        raise CorpusError(f'Cannot read corpus {resolved}: {e.strerror}')
