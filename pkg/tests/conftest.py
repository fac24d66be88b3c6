from pathlib import Path

import numpy as np
import pytest

from tests.factories import cipher_factory, language_factory
from unilab.cli import main
from unilab.core.workers import Workers
from unilab.schemas.alphabet_model import Alphabet
from unilab.services import cipher_service, lang_service, unicity_service

DATA_DIR = Path(__file__).parent / 'data'
CORPUS_PATH = DATA_DIR / 'corpus.txt'


@pytest.fixture
def latin():
    return Alphabet.from_profile('latin')


@pytest.fixture
def abcd():
    return Alphabet.from_profile('ABCD')


@pytest.fixture(scope='session')
def english():
    alphabet = Alphabet.from_profile('latin')
    raw = CORPUS_PATH.read_text(encoding='utf-8')
    return lang_service.normalize_text(raw, alphabet)


@pytest.fixture
def workers():
    with Workers(1) as pool:
        yield pool


@pytest.fixture
def create_key():
    def _create_key(**kwargs):
        return cipher_factory.SubstitutionKeyFactory(**kwargs)

    return _create_key


@pytest.fixture
def create_space():
    def _create_space(kind='substitution', symbols='ABCD'):
        return cipher_service.build_key_space(
            kind, Alphabet.from_profile(symbols)
        )

    return _create_space


@pytest.fixture
def create_language():
    def _create_language(**kwargs):
        params = language_factory.ToyLanguageFactory(**kwargs)
        return unicity_service.build_toy_language(
            Alphabet.from_profile(params['symbols']),
            params['N'],
            params['R'],
            params['seed'],
        )

    return _create_language


@pytest.fixture
def create_model(english):
    def _create_model(order=2, alpha=0.5, text=None):
        alphabet = Alphabet.from_profile('latin')
        return lang_service.fit_ngram(
            english if text is None else text, alphabet, order, alpha
        )

    return _create_model


@pytest.fixture
def uniform_text():
    def _uniform_text(size, G=26, seed=0):
        rng = np.random.default_rng(seed)
        return rng.integers(G, size=size)

    return _uniform_text


@pytest.fixture
def run_cli(capsys):
    def _run_cli(*argv):
        code = main([str(arg) for arg in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run_cli
