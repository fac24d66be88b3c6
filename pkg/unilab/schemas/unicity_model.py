import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from unilab.schemas.alphabet_model import Alphabet
from unilab.schemas.ngram_model import NGramModel
from unilab.schemas.types import Deviation, Letters, Log2


class ToyLanguage(BaseModel):
    """Uniform set of meaningful length-N messages, stored as base-G codes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alphabet: Alphabet
    N: int = Field(ge=1)
    codes: np.ndarray
    R: float
    construction_seed: int

    @model_validator(mode='after')
    def check_codes(self):
        if self.codes.ndim != 1 or self.codes.size == 0:
            raise ValueError('a toy language needs at least one message')
        if (np.diff(self.codes) <= 0).any():
            raise ValueError('message codes must be sorted and distinct')
        if self.codes[0] < 0 or self.codes[-1] >= self.alphabet.G**self.N:
            raise ValueError('message code outside the message space')
        self.codes.setflags(write=False)
        return self

    @property
    def size(self) -> int:
        return int(self.codes.size)

    @property
    def message_space(self) -> int:
        return self.alphabet.G**self.N

    def digits(self) -> np.ndarray:
        """Messages as an (S, N) array of symbol indices."""
        G = self.alphabet.G
        powers = G ** np.arange(self.N - 1, -1, -1, dtype=np.int64)
        return (self.codes[:, None] // powers) % G

    def messages(self) -> list[str]:
        return [self.alphabet.decode(row) for row in self.digits()]


class MeaningfulnessRecognizer(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: Literal['exact-set', 'likelihood-threshold']
    language: ToyLanguage | None = None
    model: NGramModel | None = None
    threshold: float | None = None

    @model_validator(mode='after')
    def check_mode(self):
        if self.mode == 'exact-set' and self.language is None:
            raise ValueError('exact-set mode needs a toy language')
        if self.mode == 'likelihood-threshold' and (
            self.model is None or self.threshold is None
        ):
            raise ValueError('likelihood mode needs a model and a threshold')
        return self


class SpuriousExpectation(BaseModel):
    N: float
    log2_expected: Log2
    expected: float | None
    log2_approximation: Log2
    approximation: float | None
    gap: float


class UnicityRow(BaseModel):
    N: int
    log2_expected: Log2
    expected: float | None


class UnicityReport(BaseModel):
    H_K: float
    D: float
    U: Letters
    threshold_N: Letters
    rows: list[UnicityRow] = []

    @model_validator(mode='after')
    def check_identity(self):
        if self.D > 0 and not math.isclose(
            self.U * self.D, self.H_K, rel_tol=1e-9, abs_tol=1e-9
        ):
            raise ValueError('U * D must equal H_K')
        return self


class SpuriousEstimate(BaseModel):
    N: int
    mean: float
    se: Deviation
    trials: int
    samples_per_trial: int
    seed: int


class SpuriousCensus(BaseModel):
    mean: float
    se: Deviation
    pairs: int


class HellmanCheck(BaseModel):
    N: int
    R: float
    key_count: int
    seeds: list[int]
    seed_means: list[float]
    grand_mean: float
    combined_se: Deviation
    hellman_prediction: float
    exact_expectation: float
