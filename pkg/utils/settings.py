"""
Process settings read from the environment (prefix LLG_) and .env files
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LlgSettings(BaseSettings):
    """Worker cap and log level"""
    model_config = SettingsConfigDict(env_prefix="LLG_", env_file=".env", extra="ignore")

    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"

