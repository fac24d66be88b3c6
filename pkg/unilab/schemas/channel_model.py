import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from unilab.schemas.cipher_model import KeySpace
from unilab.schemas.types import Letters
from unilab.schemas.unicity_model import ToyLanguage


class EncryptionChannelInstance(BaseModel):
    """Exact joint of (plaintext, ciphertext) in sparse pair form.

    Pair ``i`` carries ``probability[i]`` for plaintext
    ``language.codes[pair_plain[i]]`` and ciphertext
    ``ciphertext_codes[pair_cipher[i]]``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    language: ToyLanguage
    key_space: KeySpace
    ciphertext_codes: np.ndarray
    pair_plain: np.ndarray
    pair_cipher: np.ndarray
    probability: np.ndarray

    @model_validator(mode='after')
    def check_joint(self):
        if abs(float(self.probability.sum()) - 1.0) > 1e-12:
            raise ValueError('joint probabilities must sum to 1')
        for array in (
            self.ciphertext_codes,
            self.pair_plain,
            self.pair_cipher,
            self.probability,
        ):
            array.setflags(write=False)
        return self


class TheoreticalMI(BaseModel):
    bits: float
    clamped: bool
    at_boundary: bool


class Reliability(BaseModel):
    reliable: bool
    N_min: Letters


class Equivocation(BaseModel):
    key: float
    plaintext: float
    idealized_plaintext: float


class ChannelReport(BaseModel):
    N: int
    R0: float
    R: float
    H_K: float
    I_theoretical: float
    clamped: bool
    I_empirical_decompA: float
    I_empirical_decompB: float
    mi_gap: float
    H_P: float
    H_C: float
    H_C_ideal: float
    key_equivocation: float
    plaintext_equivocation: float
    idealized_plaintext_equivocation: float
    reliable: bool
    N_min: Letters
    messages: int
    keys: int
