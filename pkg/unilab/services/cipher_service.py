import itertools
import logging
import math
from typing import Iterator

import numpy as np

from unilab.config import Settings
from unilab.exceptions import AlphabetError, EnumerationCapError
from unilab.schemas import alphabet_model, cipher_model
from unilab.services.lang_service import as_indices

logger = logging.getLogger(__name__)

BLOCK_SIZE = 2**16


def log2_key_count(kind: cipher_model.CipherKind, G: int) -> float:
    if kind == 'identity':
        return 0.0
    if kind == 'shift':
        return float(np.log2(G)) if G > 1 else 0.0
    return float(np.log2(np.arange(2, G + 1, dtype=np.float64)).sum())


def build_key_space(
    kind: cipher_model.CipherKind, alphabet: alphabet_model.Alphabet
) -> cipher_model.KeySpace:
    G = alphabet.G
    key_count = {
        'substitution': math.factorial(G),
        'shift': G,
        'identity': 1,
    }[kind]
    return cipher_model.KeySpace(
        kind=kind,
        alphabet=alphabet,
        key_count=key_count,
        key_entropy_bits=log2_key_count(kind, G),
    )


def key_entropy(space: cipher_model.KeySpace) -> float:
    return log2_key_count(space.kind, space.alphabet.G)


def identity_key(G: int) -> cipher_model.SubstitutionKey:
    return cipher_model.SubstitutionKey(permutation=tuple(range(G)))


def shift_key(G: int, shift: int) -> cipher_model.SubstitutionKey:
    permutation = tuple((i + shift) % G for i in range(G))
    return cipher_model.SubstitutionKey(permutation=permutation)


def invert_key(
    key: cipher_model.SubstitutionKey,
) -> cipher_model.SubstitutionKey:
    inverse = [0] * key.G
    for plain, cipher in enumerate(key.permutation):
        inverse[cipher] = plain
    return cipher_model.SubstitutionKey(permutation=tuple(inverse))


def key_to_string(
    key: cipher_model.SubstitutionKey, alphabet: alphabet_model.Alphabet
) -> str:
    return ''.join(alphabet.symbols[i] for i in key.permutation)


def key_from_string(
    text: str, alphabet: alphabet_model.Alphabet
) -> cipher_model.SubstitutionKey:
    if len(text) != alphabet.G:
        raise AlphabetError(
            f'Key image {text!r} must have {alphabet.G} symbols'
        )
    return cipher_model.SubstitutionKey(
        permutation=tuple(alphabet.encode(text).tolist())
    )


def _apply(table: tuple[int, ...], text, alphabet: alphabet_model.Alphabet):
    if len(table) != alphabet.G:
        raise AlphabetError('key size does not match the alphabet')
    indices = as_indices(text, alphabet)
    mapped = np.asarray(table, dtype=np.int64)[indices]
    if isinstance(text, str):
        return alphabet.decode(mapped)
    return mapped


def encrypt(
    key: cipher_model.SubstitutionKey,
    plaintext,
    alphabet: alphabet_model.Alphabet,
):
    return _apply(key.permutation, plaintext, alphabet)


def decrypt(
    key: cipher_model.SubstitutionKey,
    ciphertext,
    alphabet: alphabet_model.Alphabet,
):
    return _apply(invert_key(key).permutation, ciphertext, alphabet)


def sample_key(
    space: cipher_model.KeySpace, seed
) -> cipher_model.SubstitutionKey:
    rng = np.random.default_rng(seed)
    G = space.alphabet.G
    if space.kind == 'identity':
        return identity_key(G)
    if space.kind == 'shift':
        return shift_key(G, int(rng.integers(G)))
    return cipher_model.SubstitutionKey(
        permutation=tuple(rng.permutation(G).tolist())
    )


def check_enumerable(space: cipher_model.KeySpace, cap: int | None = None):
    cap = Settings().ENUMERATION_CAP if cap is None else cap
    if space.key_count > cap:
        raise EnumerationCapError(
            f'{space.kind} key space holds {space.key_count} keys, above the '
            f'enumeration cap of {cap}; use the Monte Carlo path instead'
        )


def iter_key_blocks(
    space: cipher_model.KeySpace,
    start: int = 0,
    stop: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> Iterator[np.ndarray]:
    """Keys ``start..stop`` in lexicographic order as (B, G) arrays."""
    G = space.alphabet.G
    stop = space.key_count if stop is None else min(stop, space.key_count)
    if space.kind in {'shift', 'identity'}:
        shifts = np.arange(start, stop, dtype=np.int64)
        for offset in range(0, shifts.size, block_size):
            block = shifts[offset : offset + block_size, None]
            yield (np.arange(G, dtype=np.int64)[None, :] + block) % G
        return

    permutations = itertools.islice(
        itertools.permutations(range(G)), start, stop
    )
    while chunk := list(itertools.islice(permutations, block_size)):
        yield np.array(chunk, dtype=np.int64)


def enumerate_keys(
    space: cipher_model.KeySpace, cap: int | None = None
) -> Iterator[cipher_model.SubstitutionKey]:
    check_enumerable(space, cap)
    logger.debug('Enumerating %d %s keys', space.key_count, space.kind)
    for block in iter_key_blocks(space):
        for row in block.tolist():
            yield cipher_model.SubstitutionKey.model_construct(
                permutation=tuple(row)
            )


def decrypt_block(keys: np.ndarray, ciphertext: np.ndarray) -> np.ndarray:
    """Decrypt one ciphertext under each key row: (B, G) -> (B, N)."""
    inverse = np.argsort(keys, axis=1)
    return inverse[:, ciphertext]


def encrypt_block(keys: np.ndarray, messages: np.ndarray) -> np.ndarray:
    """Encrypt (S, N) messages under each key row: -> (B, S, N)."""
    return keys[:, messages]
