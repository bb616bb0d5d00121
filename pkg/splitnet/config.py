#config.py
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    OUT_DIR: Optional[str] = os.getenv("SPLITNET_OUT_DIR") or None
    LOG_LEVEL: str = os.getenv("SPLITNET_LOG_LEVEL", "INFO")
    DEFAULT_SEED: int = int(os.getenv("SPLITNET_DEFAULT_SEED", "0"))

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_prefix="SPLITNET_",
        env_file=".env",
        extra="ignore",
    )

    def __init__(self, **values):
        super().__init__(**values)
        self.LOG_LEVEL = self.LOG_LEVEL.upper()
        if self.LOG_LEVEL not in LOG_LEVELS:
            raise ValueError(f"SPLITNET_LOG_LEVEL debe ser uno de {', '.join(LOG_LEVELS)}")
        if self.DEFAULT_SEED < 0:
            raise ValueError("SPLITNET_DEFAULT_SEED no puede ser negativa")


settings = Settings()
