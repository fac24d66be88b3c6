import string
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from unilab.exceptions import AlphabetError

PROFILES = {'latin': string.ascii_uppercase}


class Alphabet(BaseModel):
    model_config = ConfigDict(frozen=True)

    symbols: str
    fold_case: bool = True

    @field_validator('symbols')
    @classmethod
    def distinct_symbols(cls, symbols: str) -> str:
        MIN_SYMBOLS = 2
        if len(symbols) < MIN_SYMBOLS:
            raise ValueError('an alphabet needs at least two symbols')
        if len(set(symbols)) != len(symbols):
            raise ValueError('alphabet symbols must be distinct')
        return symbols

    @classmethod
    def from_profile(cls, profile: str) -> 'Alphabet':
        if profile in PROFILES:
            return cls(symbols=PROFILES[profile])
        return cls(symbols=profile)

    @property
    def G(self) -> int:
        return len(self.symbols)

    @property
    def index(self) -> dict[str, int]:
        return _symbol_index(self.symbols)

    def encode(self, text: str) -> np.ndarray:
        index = self.index
        try:
            return np.fromiter(
                (index[c] for c in text), dtype=np.int64, count=len(text)
            )
        except KeyError as e:
            raise AlphabetError(
                f'Symbol {e.args[0]!r} is not in the alphabet {self.symbols}'
            )

    def decode(self, indices) -> str:
        return ''.join(self.symbols[int(i)] for i in indices)


@lru_cache(maxsize=64)
def _symbol_index(symbols: str) -> dict[str, int]:
    return {symbol: i for i, symbol in enumerate(symbols)}
