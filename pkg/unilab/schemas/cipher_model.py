import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from unilab.schemas.alphabet_model import Alphabet

CipherKind = Literal['substitution', 'shift', 'identity']


class SubstitutionKey(BaseModel):
    """Plaintext symbol index -> ciphertext symbol index."""

    model_config = ConfigDict(frozen=True)

    permutation: tuple[int, ...]

    @field_validator('permutation')
    @classmethod
    def is_bijection(cls, permutation: tuple[int, ...]):
        if sorted(permutation) != list(range(len(permutation))):
            raise ValueError('key must be a permutation of 0..G-1')
        return permutation

    @property
    def G(self) -> int:
        return len(self.permutation)


class KeySpace(BaseModel):
    """Uniformly weighted cipher keys; ``identity`` is the noiseless case."""

    model_config = ConfigDict(frozen=True)

    kind: CipherKind
    alphabet: Alphabet
    key_count: int
    key_entropy_bits: float

    @model_validator(mode='after')
    def check_key_count(self):
        expected = {
            'substitution': math.factorial(self.alphabet.G),
            'shift': self.alphabet.G,
            'identity': 1,
        }[self.kind]
        if self.key_count != expected:
            raise ValueError(f'{self.kind} spaces hold {expected} keys')
        return self
