from pathlib import Path

from unilab.exceptions import CorpusError
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.cipher_model import SubstitutionKey
from unilab.services import cipher_service


def read_keys(path: str | Path, alphabet: Alphabet) -> list[SubstitutionKey]:
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise CorpusError(f'Cannot read key file {path}: {e.strerror}')
    return [
        cipher_service.key_from_string(line.strip(), alphabet)
        for line in lines
        if line.strip()
    ]


def write_keys(
    path: str | Path, keys: list[SubstitutionKey], alphabet: Alphabet
):
    lines = [cipher_service.key_to_string(key, alphabet) for key in keys]
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
