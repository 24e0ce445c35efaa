from pydantic_settings import BaseSettings


class LoggingSettings(BaseSettings):
    level: str = "INFO"
    format: str = "%(asctime)s - %(levelname)s - %(message)s"

    class Config:
        env_prefix = "PLANEMF_LOG_"
