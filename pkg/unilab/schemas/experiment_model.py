from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from unilab.config import Settings
from unilab.schemas.cipher_model import CipherKind

OutputFormat = Literal['csv', 'json']


class Block(BaseModel):
    model_config = ConfigDict(extra='forbid')


class CorpusStatsConfig(Block):
    corpus: str | None = None
    alphabet: str = 'latin'
    orders: list[int] = [1, 2, 3]
    alpha: float = Field(default=0.5, gt=0)
    save_model: str | None = None


class UnicityConfig(Block):
    cipher: CipherKind = 'substitution'
    alphabet: str = 'latin'
    D: float | None = None
    corpus: str | None = None
    order: int = Field(default=3, ge=1)
    alpha: float = Field(default=0.5, gt=0)
    lengths: list[int] = list(range(0, 51, 5))


class SpuriousConfig(Block):
    cipher: CipherKind = 'substitution'
    alphabet: str = 'ABCD'
    lengths: list[int] = [3]
    R: float = Field(default=1.0, ge=0)
    construction_seeds: int = Field(default=100, ge=1)
    monte_carlo: bool = False
    trials: int = Field(default=100, ge=1)
    samples_per_trial: int = Field(default=1000, ge=1)
    corpus: str | None = None
    order: int = Field(default=2, ge=1)
    alpha: float = Field(default=0.5, gt=0)
    margin: float = 1.0
    train_fraction: float = Field(default=0.8, gt=0, lt=1)


class ChannelConfig(Block):
    cipher: CipherKind = 'substitution'
    alphabet: str = 'ABCD'
    lengths: list[int] = [1, 2, 3]
    R: float = Field(default=1.0, ge=0)


class AttackExperimentConfig(Block):
    corpus: str | None = None
    model: str | None = None
    alphabet: str = 'latin'
    train_fraction: float = Field(default=0.8, gt=0, lt=1)
    order: int = Field(default=2, ge=2)
    alpha: float = Field(default=0.5, gt=0)
    iterations: int = Field(default=20_000, ge=1)
    restarts: int = Field(default=5, ge=0)
    temperature: float = Field(default=1.0, gt=0)
    checkpoint_interval: int = Field(default=100, ge=1)
    lengths: list[int] = []
    trials_per_length: int = 20
    success_threshold: float = Field(default=0.9, ge=0, le=1)
    ciphertext: str | None = None
    ciphertext_file: str | None = None
    key: str | None = None
    key_file: str | None = None


class ExperimentConfig(Block):
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    workers: int = Field(default_factory=lambda: Settings().WORKERS, ge=1)
    format: OutputFormat = 'json'
    out: str | None = None
    log_level: str | None = None

    corpus_stats: CorpusStatsConfig = CorpusStatsConfig()
    unicity: UnicityConfig = UnicityConfig()
    spurious: SpuriousConfig = SpuriousConfig()
    channel: ChannelConfig = ChannelConfig()
    attack: AttackExperimentConfig = AttackExperimentConfig()


class CommandOutput(BaseModel):
    result: dict | list
    columns: list[str]
    rows: list[dict]
