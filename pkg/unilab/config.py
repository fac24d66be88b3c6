from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    CORPUS_DIR: Path = Path('corpora')

    ENUMERATION_CAP: int = 10**7
    JOINT_CAP: int = 10**7
    MESSAGE_SPACE_CAP: int = 2**62

    DEFAULT_ORDER: int = 3
    DEFAULT_ALPHA: float = 0.5

    WORKERS: int = 1
    LOG_LEVEL: str = 'WARNING'

    class Config:
        env_prefix = 'UNILAB_'
        env_file = '.env'
        env_file_encoding = 'utf-8'
