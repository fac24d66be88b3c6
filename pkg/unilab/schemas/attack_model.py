from pydantic import BaseModel, ConfigDict, Field, model_validator

from unilab.schemas.cipher_model import SubstitutionKey
from unilab.schemas.ngram_model import NGramModel
from unilab.schemas.types import Deviation, Letters


class AttackConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: NGramModel
    iterations: int = Field(default=20_000, ge=1)
    restarts: int = Field(default=5, ge=0)
    seed: int
    temperature: float = Field(default=1.0, gt=0)
    checkpoint_interval: int = Field(default=100, ge=1)

    @model_validator(mode='after')
    def check_order(self):
        MIN_ORDER = 2
        if self.model.order < MIN_ORDER:
            raise ValueError('the attack needs a model of order >= 2')
        return self


class AttackResult(BaseModel):
    best_key: SubstitutionKey
    best_score: float
    score_trace: list[float]
    key_accuracy: float | None = None
    plaintext_accuracy: float | None = None
    plaintext: str
    chain_scores: list[float]
    chain_keys: list[SubstitutionKey]
    iterations: int
    seed: int


class RecoveryTrial(BaseModel):
    N: int
    trial: int
    key_accuracy: float
    plaintext_accuracy: float
    best_score_bits: float
    iterations: int
    seed: int


class RecoverySummary(BaseModel):
    N: int
    trials: int
    mean_plaintext_accuracy: float
    se_plaintext_accuracy: Deviation
    median_plaintext_accuracy: float
    q10_plaintext_accuracy: float
    q90_plaintext_accuracy: float
    mean_key_accuracy: float
    success_rate: float


class RecoveryCurve(BaseModel):
    key_entropy: float
    redundancy: float
    model_order: int
    unicity_distance: Letters
    success_threshold: float
    summaries: list[RecoverySummary]
    trials: list[RecoveryTrial]
