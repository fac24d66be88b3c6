import json
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from unilab.exceptions import ConfigError, CorpusError
from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.ngram_model import NGramModel

FORMAT = 'unilab.ngram'
VERSION = 1


def model_to_document(model: NGramModel) -> dict:
    return {
        'format': FORMAT,
        'version': VERSION,
        'alphabet': model.alphabet.symbols,
        'fold_case': model.alphabet.fold_case,
        'order': model.order,
        'alpha': model.alpha,
        'total_symbols': model.total_symbols,
        'counts': model.counts.tolist(),
    }


def model_from_document(document: dict) -> NGramModel:
    if document.get('format') != FORMAT:
        raise ConfigError('Not an n-gram model document')
    if document.get('version') != VERSION:
        raise ConfigError(
            f'Unsupported model version {document.get("version")}'
        )
    try:
        return NGramModel(
            alphabet=Alphabet(
                symbols=document['alphabet'],
                fold_case=document.get('fold_case', True),
            ),
            order=document['order'],
            alpha=document['alpha'],
            counts=np.asarray(document['counts'], dtype=np.int64),
            total_symbols=document['total_symbols'],
        )
    except (KeyError, ValidationError) as e:
        raise ConfigError(f'Invalid model document: {e}')


def save_model(model: NGramModel, path: str | Path):
    Path(path).write_text(
        json.dumps(model_to_document(model)), encoding='utf-8'
    )


def load_model(path: str | Path) -> NGramModel:
    try:
        document = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise CorpusError(f'Cannot read model {path}: {e.strerror}')
    except json.JSONDecodeError as e:
        raise ConfigError(f'Model {path} is not valid JSON: {e}')
    return model_from_document(document)
