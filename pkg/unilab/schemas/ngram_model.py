import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from unilab.schemas.alphabet_model import Alphabet


class NGramModel(BaseModel):
    """Add-alpha smoothed character n-gram counts.

    ``counts[c, s]`` counts symbol ``s`` after context ``c``; contexts are
    the base-G numbers of the preceding ``order - 1`` symbols, most
    significant first.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alphabet: Alphabet
    order: int = Field(ge=1)
    alpha: float = Field(gt=0)
    counts: np.ndarray
    total_symbols: int = Field(ge=0)

    @model_validator(mode='after')
    def check_counts(self):
        G = self.alphabet.G
        shape = (G ** (self.order - 1), G)
        if self.counts.shape != shape:
            raise ValueError(f'counts must have shape {shape}')
        if (self.counts < 0).any():
            raise ValueError('counts must be nonnegative')
        self.counts.setflags(write=False)
        return self


class RedundancyEstimate(BaseModel):
    order: int
    R0: float
    R: float
    D: float
